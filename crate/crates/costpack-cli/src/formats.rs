//! Instance and packing files.
//!
//! Both formats are plain JSON documents with exact rationals carried as
//! strings (`"p/q"` or `"p"`), so values survive serialization unchanged.
//! Field order is fixed by the struct definitions and rendering is stable,
//! which makes repeated writes of the same data byte-identical.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use costpack_core::aptas::AptasCertificate;
use costpack_core::{packing_cost, validate_instance, Instance, Packing, Rat};
use serde::{Deserialize, Serialize};

pub const INSTANCE_FORMAT: &str = "costpack-instance";
pub const PACKING_FORMAT: &str = "costpack-packing";
pub const FORMAT_VERSION: u32 = 1;

/// Failure while reading a file: syntax errors carry the line and column,
/// semantic errors the offending field.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("{path}: field {field}: {message}")]
    Field { path: String, field: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ParseError {
    fn field(path: &Path, field: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError::Field {
            path: path.display().to_string(),
            field: field.into(),
            message: message.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        ParseError::Io { path: path.display().to_string(), source }
    }
}

/// Optional free-form context carried by instance files.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Decision threshold attached by the hardness reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn is_empty(&self) -> bool {
        *self == Metadata::default()
    }
}

/// On-disk form of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format: String,
    pub version: u32,
    pub sizes: Vec<String>,
    pub cost: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl InstanceFile {
    /// Assembles a file body from raw (unnormalized) instance data.
    pub fn from_parts(sizes: &[Rat], raw_cost: &[Rat], metadata: Option<Metadata>) -> Self {
        InstanceFile {
            format: INSTANCE_FORMAT.to_string(),
            version: FORMAT_VERSION,
            sizes: sizes.iter().map(Rat::to_string).collect(),
            cost: raw_cost.iter().map(Rat::to_string).collect(),
            metadata: metadata.filter(|m| !m.is_empty()),
        }
    }

    /// Rebuilds the file body for an already validated instance. The raw
    /// cost table is recovered exactly by undoing the normalization.
    pub fn from_instance(inst: &Instance, metadata: Option<Metadata>) -> Self {
        let sizes: Vec<Rat> = inst.items().iter().map(|it| it.size.clone()).collect();
        let raw: Vec<Rat> = inst.cost().table().iter().map(|c| inst.denormalize(c)).collect();
        InstanceFile::from_parts(&sizes, &raw, metadata)
    }

    pub fn render(&self) -> String {
        render_json(self)
    }
}

/// On-disk form of a packing, carrying both the packing itself and the
/// costs it was checked against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingFile {
    pub format: String,
    pub version: u32,
    /// Item ids per bin.
    pub bins: Vec<Vec<usize>>,
    pub cardinalities: Vec<usize>,
    /// Per-bin cost in the normalized scale (`f(1) = 1`).
    pub bin_costs: Vec<String>,
    pub total_cost: String,
    /// Total cost in the scale of the original cost table.
    pub total_cost_raw: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateFile>,
}

/// Serialized execution report of the approximation scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub epsilon: String,
    pub guess_signature: String,
    pub stage1_cost: String,
    pub stage2_cost: String,
    pub total_cost: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
    pub lower_bound: String,
    pub bound_rhs: String,
    pub guesses_examined: usize,
    pub guesses_pruned: usize,
    pub budget_exhausted: bool,
}

impl From<&AptasCertificate> for CertificateFile {
    fn from(cert: &AptasCertificate) -> Self {
        CertificateFile {
            epsilon: cert.epsilon.to_string(),
            guess_signature: cert.guess_signature.clone(),
            stage1_cost: cert.stage1_cost.to_string(),
            stage2_cost: cert.stage2_cost.to_string(),
            total_cost: cert.total_cost.to_string(),
            omega: cert.omega.as_ref().map(Rat::to_string),
            lower_bound: cert.lower_bound.to_string(),
            bound_rhs: cert.bound_rhs.to_string(),
            guesses_examined: cert.guesses_examined,
            guesses_pruned: cert.guesses_pruned,
            budget_exhausted: cert.budget_exhausted,
        }
    }
}

impl PackingFile {
    /// Prices `packing` against `inst` and assembles the file body.
    pub fn from_packing(
        inst: &Instance,
        packing: &Packing,
        certificate: Option<&AptasCertificate>,
    ) -> Self {
        let cardinalities: Vec<usize> = packing.bins.iter().map(Vec::len).collect();
        let bin_costs: Vec<String> =
            cardinalities.iter().map(|&c| inst.cost().at(c).to_string()).collect();
        let total = packing_cost(inst, packing);
        let raw = inst.denormalize(&total);
        PackingFile {
            format: PACKING_FORMAT.to_string(),
            version: FORMAT_VERSION,
            bins: packing.bins.clone(),
            cardinalities,
            bin_costs,
            total_cost: total.to_string(),
            total_cost_raw: raw.to_string(),
            certificate: certificate.map(CertificateFile::from),
        }
    }

    pub fn packing(&self) -> Packing {
        Packing::new(self.bins.clone())
    }

    pub fn render(&self) -> String {
        render_json(self)
    }
}

fn render_json<T: Serialize>(value: &T) -> String {
    let mut body = serde_json::to_string_pretty(value).expect("formats serialize infallibly");
    body.push('\n');
    body
}

/// Parses one rational string, reporting the field on failure.
pub fn parse_rat_field(path: &Path, field: &str, value: &str) -> Result<Rat, ParseError> {
    Rat::from_str(value).map_err(|e| ParseError::field(path, field, e.to_string()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ParseError> {
    let text = fs::read_to_string(path).map_err(|e| ParseError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| ParseError::Syntax {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn check_header(path: &Path, expected: &str, format: &str, version: u32) -> Result<(), ParseError> {
    if format != expected {
        return Err(ParseError::field(
            path,
            "format",
            format!("expected {expected:?}, got {format:?}"),
        ));
    }
    if version != FORMAT_VERSION {
        return Err(ParseError::field(
            path,
            "version",
            format!("unsupported version {version}, this build reads {FORMAT_VERSION}"),
        ));
    }
    Ok(())
}

/// Reads and validates an instance file.
pub fn parse_instance_file(path: &Path) -> Result<(Instance, InstanceFile), ParseError> {
    let file: InstanceFile = read_json(path)?;
    check_header(path, INSTANCE_FORMAT, &file.format, file.version)?;
    let mut sizes = Vec::with_capacity(file.sizes.len());
    for (i, s) in file.sizes.iter().enumerate() {
        sizes.push(parse_rat_field(path, &format!("sizes[{i}]"), s)?);
    }
    let mut cost = Vec::with_capacity(file.cost.len());
    for (j, c) in file.cost.iter().enumerate() {
        cost.push(parse_rat_field(path, &format!("cost[{j}]"), c)?);
    }
    let inst = validate_instance(sizes, cost)
        .map_err(|e| ParseError::field(path, "cost", e.to_string()))?;
    Ok((inst, file))
}

/// Reads a packing file without checking it against any instance; pairing
/// and cost verification belong to the `verify` command.
pub fn parse_packing_file(path: &Path) -> Result<PackingFile, ParseError> {
    let file: PackingFile = read_json(path)?;
    check_header(path, PACKING_FORMAT, &file.format, file.version)?;
    if file.cardinalities.len() != file.bins.len() || file.bin_costs.len() != file.bins.len() {
        return Err(ParseError::field(
            path,
            "cardinalities",
            format!(
                "expected one cardinality and one cost per bin ({} bins, {} cardinalities, {} costs)",
                file.bins.len(),
                file.cardinalities.len(),
                file.bin_costs.len()
            ),
        ));
    }
    Ok(file)
}

pub fn write_text(path: &Path, body: &str) -> Result<(), ParseError> {
    fs::write(path, body).map_err(|e| ParseError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use costpack_core::rat;

    fn tmp(name: &str, body: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("costpack-formats-tests");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn instance_round_trip_is_lossless() {
        let sizes = vec![rat(1, 2), rat(1, 2)];
        let cost = vec![Rat::zero(), Rat::one(), Rat::one()];
        let file = InstanceFile::from_parts(&sizes, &cost, None);
        let path = tmp("round.json", &file.render());
        let (inst, reread) = parse_instance_file(&path).unwrap();
        assert_eq!(reread, file);
        assert_eq!(inst.n(), 2);
        assert_eq!(*inst.size_of(1), rat(1, 2));
        assert_eq!(*inst.cost().at(2), Rat::one());
        let rewritten = InstanceFile::from_instance(&inst, None);
        assert_eq!(rewritten, file);
    }

    #[test]
    fn zero_denominator_is_a_field_error() {
        let file = InstanceFile {
            format: INSTANCE_FORMAT.into(),
            version: FORMAT_VERSION,
            sizes: vec!["1/0".into()],
            cost: vec!["0".into(), "1".into()],
            metadata: None,
        };
        let path = tmp("zero-den.json", &file.render());
        let err = parse_instance_file(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sizes[0]"), "missing field context: {msg}");
        assert!(msg.contains("denominator"), "missing cause: {msg}");
    }

    #[test]
    fn syntax_error_reports_line_and_column() {
        let path = tmp("syntax.json", "{\n  \"format\": \"costpack-instance\",\n  !\n}\n");
        let err = parse_instance_file(&path).unwrap_err();
        match err {
            ParseError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("expected syntax error, got {other}"),
        }
    }

    #[test]
    fn non_monotone_cost_is_rejected_with_field() {
        let file = InstanceFile {
            format: INSTANCE_FORMAT.into(),
            version: FORMAT_VERSION,
            sizes: vec!["0".into(), "0".into()],
            cost: vec!["0".into(), "2".into(), "1".into()],
            metadata: None,
        };
        let path = tmp("non-monotone.json", &file.render());
        let err = parse_instance_file(&path).unwrap_err();
        assert!(matches!(err, ParseError::Field { ref field, .. } if field == "cost"));
    }

    #[test]
    fn packing_file_carries_costs_in_both_scales() {
        let sizes = vec![rat(1, 2), rat(1, 2), rat(1, 4)];
        let raw = vec![Rat::zero(), rat(3, 1), rat(4, 1), rat(5, 1)];
        let inst = validate_instance(sizes, raw).unwrap();
        let packing = Packing::new(vec![vec![1, 2], vec![3]]);
        let file = PackingFile::from_packing(&inst, &packing, None);
        assert_eq!(file.cardinalities, vec![2, 1]);
        assert_eq!(file.bin_costs, vec!["4/3".to_string(), "1".to_string()]);
        assert_eq!(file.total_cost, "7/3");
        assert_eq!(file.total_cost_raw, "7");
        let path = tmp("packing.json", &file.render());
        let reread = parse_packing_file(&path).unwrap();
        assert_eq!(reread, file);
        assert_eq!(reread.packing().bins, packing.bins);
    }

    #[test]
    fn packing_file_rejects_mismatched_parallel_arrays() {
        let body = serde_json::json!({
            "format": PACKING_FORMAT,
            "version": FORMAT_VERSION,
            "bins": [[1], [2]],
            "cardinalities": [1],
            "bin_costs": ["1", "1"],
            "total_cost": "2",
            "total_cost_raw": "2",
        });
        let path = tmp("mismatch.json", &format!("{body}\n"));
        let err = parse_packing_file(&path).unwrap_err();
        assert!(matches!(err, ParseError::Field { ref field, .. } if field == "cardinalities"));
    }

    #[test]
    fn wrong_format_tag_is_rejected() {
        let file = InstanceFile {
            format: "something-else".into(),
            version: FORMAT_VERSION,
            sizes: vec![],
            cost: vec!["0".into()],
            metadata: None,
        };
        let path = tmp("wrong-format.json", &file.render());
        let err = parse_instance_file(&path).unwrap_err();
        assert!(matches!(err, ParseError::Field { ref field, .. } if field == "format"));
    }
}
