//! Benchmark harness: runs a set of algorithms over a set of instance
//! files and reports costs, ratios, and wall times.
//!
//! Machine-readable output is one JSON record per line and deliberately
//! excludes timing, so repeated runs over the same inputs are
//! byte-identical. Wall times appear only in the rendered text table.

use std::path::{Path, PathBuf};
use std::time::Instant;

use costpack_core::milp::Budget;
use costpack_core::oracle::brute_force_opt;
use costpack_core::{packing_cost, Epsilon, Instance, Rat};
use serde::Serialize;

use crate::formats::{parse_instance_file, ParseError};
use crate::runner::{check_outcome, lower_bound, run_algorithm, Algorithm};

/// One benchmark row, timing excluded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRecord {
    pub instance: String,
    pub algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_raw: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_to_oracle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_to_lower_bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guesses_examined: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guesses_pruned: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget_exhausted: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A record plus the wall time that stays out of the machine output.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub record: BenchRecord,
    pub millis: u128,
}

pub struct BenchRequest {
    pub instances: Vec<PathBuf>,
    pub algorithms: Vec<Algorithm>,
    /// Accuracy parameters; the scheme gets one row per value.
    pub epsilons: Vec<Epsilon>,
    pub oracle_limit: usize,
    pub budget_nodes: u64,
    pub force: bool,
}

fn instance_label(path: &Path, name: Option<&str>) -> String {
    match name {
        Some(n) => n.to_string(),
        None => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string()),
    }
}

fn blank_record(label: &str, algorithm: &str, epsilon: Option<&Epsilon>) -> BenchRecord {
    BenchRecord {
        instance: label.to_string(),
        algorithm: algorithm.to_string(),
        epsilon: epsilon.map(|e| e.value().to_string()),
        status: String::new(),
        cost: None,
        cost_raw: None,
        bins: None,
        ratio_to_oracle: None,
        ratio_to_lower_bound: None,
        guesses_examined: None,
        guesses_pruned: None,
        budget_exhausted: None,
        error: None,
    }
}

#[allow(clippy::too_many_arguments)]
fn run_row(
    inst: &Instance,
    label: &str,
    algorithm: Algorithm,
    epsilon: &Epsilon,
    show_epsilon: bool,
    oracle_cost: Option<&Rat>,
    lb: &Rat,
    budget_nodes: u64,
    oracle_limit: usize,
    force: bool,
) -> BenchRow {
    let mut record =
        blank_record(label, algorithm.name(), show_epsilon.then_some(epsilon));
    let budget = Budget::new(budget_nodes);
    let started = Instant::now();
    let result = run_algorithm(inst, algorithm, epsilon, &budget, oracle_limit, force)
        .and_then(|out| check_outcome(inst, &out).map(|()| out));
    let millis = started.elapsed().as_millis();
    match result {
        Ok(out) => {
            record.status = "ok".to_string();
            record.cost = Some(out.cost.to_string());
            record.cost_raw = Some(inst.denormalize(&out.cost).to_string());
            record.bins = Some(out.packing.bin_count());
            record.ratio_to_oracle = oracle_cost.and_then(|opt| {
                (!opt.is_zero()).then(|| (&out.cost / opt).to_string())
            });
            record.ratio_to_lower_bound =
                (!lb.is_zero()).then(|| (&out.cost / lb).to_string());
            if let Some(cert) = &out.certificate {
                record.guesses_examined = Some(cert.guesses_examined);
                record.guesses_pruned = Some(cert.guesses_pruned);
                record.budget_exhausted = Some(cert.budget_exhausted);
            }
        }
        Err(err) => {
            record.status = "error".to_string();
            record.error = Some(err.to_string());
        }
    }
    BenchRow { record, millis }
}

/// Runs the full grid. Solver failures become error rows; unreadable
/// instance files abort with the parse error.
pub fn run_bench(req: &BenchRequest) -> Result<Vec<BenchRow>, ParseError> {
    let mut rows = Vec::new();
    let fallback = Epsilon::new(Rat::one()).expect("1 is a valid accuracy");
    for path in &req.instances {
        let (inst, file) = parse_instance_file(path)?;
        let label = instance_label(
            path,
            file.metadata.as_ref().and_then(|m| m.name.as_deref()),
        );
        // One oracle evaluation per instance feeds every ratio column.
        let oracle_cost: Option<Rat> = if inst.n() <= req.oracle_limit {
            brute_force_opt(&inst, Some(req.oracle_limit))
                .ok()
                .map(|(p, _)| packing_cost(&inst, &p))
        } else {
            None
        };
        let lb = lower_bound(&inst);
        for &algorithm in &req.algorithms {
            if algorithm.needs_epsilon() {
                for eps in &req.epsilons {
                    rows.push(run_row(
                        &inst,
                        &label,
                        algorithm,
                        eps,
                        true,
                        oracle_cost.as_ref(),
                        &lb,
                        req.budget_nodes,
                        req.oracle_limit,
                        req.force,
                    ));
                }
            } else {
                rows.push(run_row(
                    &inst,
                    &label,
                    algorithm,
                    &fallback,
                    false,
                    oracle_cost.as_ref(),
                    &lb,
                    req.budget_nodes,
                    req.oracle_limit,
                    req.force,
                ));
            }
        }
    }
    Ok(rows)
}

/// One JSON document per line, in row order.
pub fn machine_report(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(&row.record).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Fixed-width table with wall times, for humans.
pub fn text_report(rows: &[BenchRow]) -> String {
    let headers =
        ["instance", "algorithm", "eps", "status", "cost", "raw", "vs-oracle", "vs-lb", "bins", "ms"];
    let mut cells: Vec<[String; 10]> = Vec::with_capacity(rows.len());
    for row in rows {
        let r = &row.record;
        let detail = match (&r.error, &r.budget_exhausted) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(true)) => "ok (budget hit)".to_string(),
            _ => r.status.clone(),
        };
        cells.push([
            r.instance.clone(),
            r.algorithm.clone(),
            r.epsilon.clone().unwrap_or_else(|| "-".into()),
            detail,
            r.cost.clone().unwrap_or_else(|| "-".into()),
            r.cost_raw.clone().unwrap_or_else(|| "-".into()),
            r.ratio_to_oracle.clone().unwrap_or_else(|| "-".into()),
            r.ratio_to_lower_bound.clone().unwrap_or_else(|| "-".into()),
            r.bins.map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
            row.millis.to_string(),
        ]);
    }
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in &cells {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let render = |out: &mut String, fields: &[&str]| {
        let line: Vec<String> = fields
            .iter()
            .enumerate()
            .map(|(i, f)| format!("{f:<width$}", width = widths[i]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    };
    render(&mut out, &headers);
    for row in &cells {
        let fields: Vec<&str> = row.iter().map(String::as_str).collect();
        render(&mut out, &fields);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::write_text;
    use crate::gen::{generate_random_instance, CostModel, SizeModel};

    fn write_flat_instance(dir: &Path, n: usize, seed: u64) -> PathBuf {
        let file = generate_random_instance(
            n,
            &SizeModel::UniformRational { denominator: 8 },
            &CostModel::Flat,
            seed,
        )
        .unwrap();
        let path = dir.join(format!("flat-{n}-{seed}.json"));
        write_text(&path, &file.render()).unwrap();
        path
    }

    fn request(instances: Vec<PathBuf>, algorithms: Vec<Algorithm>) -> BenchRequest {
        BenchRequest {
            instances,
            algorithms,
            epsilons: vec![Epsilon::new(Rat::one()).unwrap()],
            oracle_limit: 12,
            budget_nodes: 1_000_000,
            force: false,
        }
    }

    #[test]
    fn grid_produces_one_row_per_cell_with_ratios() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_flat_instance(dir.path(), 5, 1);
        let b = write_flat_instance(dir.path(), 6, 2);
        let req = request(
            vec![a, b],
            vec![Algorithm::Greedy, Algorithm::Aptas, Algorithm::Oracle],
        );
        let rows = run_bench(&req).unwrap();
        assert_eq!(rows.len(), 6);
        for row in &rows {
            assert_eq!(row.record.status, "ok");
            let ratio: Rat =
                row.record.ratio_to_oracle.as_ref().unwrap().parse().unwrap();
            assert!(ratio >= Rat::one());
            if row.record.algorithm == "oracle" {
                assert_eq!(ratio, Rat::one());
            }
        }
        let table = text_report(&rows);
        assert!(table.contains("vs-oracle"));
    }

    #[test]
    fn oracle_error_rows_do_not_abort_the_run() {
        let dir = tempfile::tempdir().unwrap();
        let big = write_flat_instance(dir.path(), 15, 3);
        let mut req = request(vec![big], vec![Algorithm::Oracle, Algorithm::Greedy]);
        req.oracle_limit = 12;
        let rows = run_bench(&req).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].record.status, "error");
        assert!(rows[0].record.error.as_ref().unwrap().contains("limit"));
        assert_eq!(rows[1].record.status, "ok");
        assert!(rows[1].record.ratio_to_oracle.is_none());
        assert!(rows[1].record.ratio_to_lower_bound.is_some());
    }

    #[test]
    fn machine_report_is_stable_across_runs() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_flat_instance(dir.path(), 6, 4);
        let req = request(vec![a.clone()], vec![Algorithm::Aptas, Algorithm::Greedy]);
        let first = machine_report(&run_bench(&req).unwrap());
        let second = machine_report(&run_bench(&req).unwrap());
        assert_eq!(first, second);
        assert!(!first.contains("millis"));
        assert_eq!(first.lines().count(), 2);
    }

    #[test]
    fn empty_instance_set_gives_empty_report() {
        let req = request(vec![], vec![Algorithm::Greedy]);
        let rows = run_bench(&req).unwrap();
        assert!(rows.is_empty());
        assert_eq!(machine_report(&rows), "");
    }
}
