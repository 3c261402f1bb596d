//! Bin packing with cardinality-dependent bin costs.
//!
//! Items have rational sizes in `[0, 1]` and a bin holding `j` items costs
//! `f(j)` for a monotone table `f` with `f(0) = 0`; a bin's items must total
//! at most size 1. The goal is a partition of all items minimizing the summed
//! bin costs.
//!
//! The crate provides, all over exact rational arithmetic:
//!
//! - [`classify`]: the per-item-cost minimizer `k` that separates the
//!   polynomially solvable regimes (`k <= 2`) from the NP-hard one.
//! - [`exact`]: exact polynomial solvers for `k = 1` (singletons) and
//!   `k = 2` (guess enumeration plus maximum-weight matchings).
//! - [`oracle`]: an exponential brute-force optimum for cross-checking, with
//!   a greedy baseline.
//! - [`lp`] / [`milp`]: an exact rational simplex (Bland's rule, two-phase)
//!   and a branch-and-bound mixed-integer layer on top.
//! - [`aptas`]: a two-stage approximation scheme whose accuracy parameter
//!   trades cost guarantees against running time.
//!
//! The `parallel` feature (on by default) fans the scheme's guess sweep and
//! other embarrassingly parallel loops out over rayon; disabling it yields a
//! fully sequential build with identical outputs.

pub mod aptas;
pub mod classify;
pub mod epsilon;
pub mod error;
pub mod exact;
pub mod instance;
pub mod lp;
pub mod matching;
pub mod milp;
pub mod oracle;
pub mod packing;
mod par;
pub mod rational;

pub use classify::{average_cost, minimizer_k, Classification, Verdict};
pub use epsilon::{Epsilon, EpsilonError};
pub use error::SolveError;
pub use instance::{validate_instance, CostFunction, Instance, InstanceError, Item};
pub use packing::{
    bin_density_class, packing_cost, verify_packing, verify_packing_of, DensityClass, Packing,
    VerificationReport, Violation,
};
pub use rational::{rat, ParseRatError, Rat};
