//! Plumbing behind the `costpack` binary: file formats, random and
//! reduction-based instance generators, algorithm dispatch, and the
//! benchmark harness.

pub mod bench;
pub mod formats;
pub mod gen;
pub mod reduce;
pub mod runner;
