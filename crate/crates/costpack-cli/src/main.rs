//! `costpack`: classify, solve, generate, reduce, verify, and benchmark
//! bin packing instances with cardinality-dependent bin costs.
//!
//! Exit codes: 0 on success, 2 when a verification fails or a packing is
//! infeasible, 3 when the node budget runs out, 1 for every other error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use costpack_core::milp::{Budget, DEFAULT_NODE_BUDGET};
use costpack_core::oracle::DEFAULT_ORACLE_LIMIT;
use costpack_core::{
    minimizer_k, packing_cost, verify_packing, Epsilon, Rat, SolveError, Verdict,
};

use costpack_cli::bench::{machine_report, run_bench, text_report, BenchRequest};
use costpack_cli::formats::{
    parse_instance_file, parse_packing_file, parse_rat_field, write_text, PackingFile, ParseError,
};
use costpack_cli::gen::{generate_random_instance, CostModel, SizeModel};
use costpack_cli::reduce::{reduce_three_partition, ThreePartitionInput};
use costpack_cli::runner::{check_outcome, run_algorithm, Algorithm};

/// Overrides the default node budget when `--budget` is absent.
const BUDGET_ENV: &str = "COSTPACK_BUDGET";

#[derive(Parser)]
#[command(
    name = "costpack",
    version,
    about = "Bin packing with cardinality-dependent bin costs",
    after_help = "Exit codes: 0 success, 2 infeasible or failed verification, 3 budget exhausted, 1 other errors."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the cost function's complexity class.
    Classify {
        /// Instance file.
        instance: PathBuf,
    },
    /// Pack an instance and emit the packing as JSON.
    Solve {
        /// Instance file.
        instance: PathBuf,
        /// Solver; `auto` picks by classification.
        #[arg(long, value_enum, default_value_t = Algorithm::Auto)]
        algorithm: Algorithm,
        /// Accuracy parameter for the approximation scheme, a unit
        /// fraction such as 1/2.
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        /// Search node budget (default: $COSTPACK_BUDGET or 1000000).
        #[arg(long)]
        budget: Option<u64>,
        /// Run an exact small-k solver even if the instance classifies
        /// differently.
        #[arg(long)]
        force: bool,
        /// Largest n the brute-force oracle accepts.
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: usize,
        /// Write the packing here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Generate a random instance.
    Gen {
        /// Number of items.
        #[arg(long)]
        n: usize,
        /// `uniform:D` or `discrete:r1,r2,...`.
        #[arg(long, default_value = "uniform:16")]
        size_model: String,
        /// `flat`, `linear`, `concave[:D]`, `step:K,x`, or
        /// `random-monotone[:D]`.
        #[arg(long, default_value = "random-monotone:16")]
        cost_model: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instance name recorded in the metadata.
        #[arg(long)]
        name: Option<String>,
        /// Write the instance here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Emit the hardness instance encoding a 3-Partition input.
    #[command(name = "reduce-3p")]
    Reduce3p {
        /// The 3m integers, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        integers: Vec<u64>,
        /// Triple-sum bound Z.
        #[arg(long)]
        bound: u64,
        /// Cardinality the emitted cost function favors; at least 3.
        #[arg(long)]
        k: usize,
        /// Write the instance here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check a packing file against its instance.
    Verify {
        /// Instance file.
        instance: PathBuf,
        /// Packing file.
        packing: PathBuf,
    },
    /// Run algorithms over instance files and tabulate costs and ratios.
    Bench {
        /// Instance files.
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        /// Comma-separated subset of auto,k1,k2,aptas,oracle,greedy.
        #[arg(long, value_delimiter = ',', default_value = "greedy,aptas,oracle")]
        algorithms: Vec<String>,
        /// Accuracy parameters for scheme rows, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1/2")]
        epsilon: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: usize,
        /// Search node budget per row (default: $COSTPACK_BUDGET or
        /// 1000000).
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        force: bool,
        /// Write one JSON record per row here (timing excluded).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::new(1, e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::BudgetExceeded => 3,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn budget_nodes(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| Failure::new(1, format!("{BUDGET_ENV}={text:?} is not a node count"))),
        Err(_) => Ok(DEFAULT_NODE_BUDGET),
    }
}

fn parse_epsilon(text: &str) -> Result<Epsilon, Failure> {
    let value = Rat::from_str(text)
        .map_err(|e| Failure::new(1, format!("--epsilon {text:?}: {e}")))?;
    Epsilon::new(value).map_err(|e| Failure::new(1, e.to_string()))
}

/// Writes to the path when given, otherwise prints to stdout. Returns how
/// the target should be referred to in follow-up messages.
fn emit(output: Option<&Path>, body: &str) -> Result<bool, Failure> {
    match output {
        Some(path) => {
            write_text(path, body)?;
            Ok(true)
        }
        None => {
            print!("{body}");
            Ok(false)
        }
    }
}

/// Summary lines go to stdout when the document went to a file, and to
/// stderr when stdout already carries the document.
fn note(to_file: bool, line: &str) {
    if to_file {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Classify { instance } => classify_cmd(&instance),
        Command::Solve { instance, algorithm, epsilon, budget, force, oracle_limit, output } => {
            solve_cmd(&instance, algorithm, &epsilon, budget, force, oracle_limit, output.as_deref())
        }
        Command::Gen { n, size_model, cost_model, seed, name, output } => {
            gen_cmd(n, &size_model, &cost_model, seed, name, output.as_deref())
        }
        Command::Reduce3p { integers, bound, k, output } => {
            reduce_cmd(integers, bound, k, output.as_deref())
        }
        Command::Verify { instance, packing } => verify_cmd(&instance, &packing),
        Command::Bench { instances, algorithms, epsilon, oracle_limit, budget, force, output } => {
            bench_cmd(instances, &algorithms, &epsilon, oracle_limit, budget, force, output.as_deref())
        }
    }
}

fn classify_cmd(path: &Path) -> Result<(), Failure> {
    let (inst, _) = parse_instance_file(path)?;
    let cls = minimizer_k(inst.cost());
    println!("items: {}", inst.n());
    println!("total size: {}", inst.total_size());
    if inst.n() == 0 {
        println!("verdict: poly-k1 (empty instance)");
        return Ok(());
    }
    println!("minimizer k: {}", cls.k);
    println!("per-item price at k: {}", cls.per_item_cost[cls.k - 1]);
    let (verdict, suggestion) = match cls.verdict {
        Verdict::PolyK1 => ("poly-k1", "k1"),
        Verdict::PolyK2 => ("poly-k2", "k2"),
        Verdict::NpHard => ("np-hard", "aptas"),
    };
    println!("verdict: {verdict}");
    println!("suggested algorithm: {suggestion}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve_cmd(
    path: &Path,
    algorithm: Algorithm,
    epsilon_text: &str,
    budget_flag: Option<u64>,
    force: bool,
    oracle_limit: usize,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let (inst, _) = parse_instance_file(path)?;
    let epsilon = if algorithm.needs_epsilon() {
        parse_epsilon(epsilon_text)?
    } else {
        Epsilon::new(Rat::one()).expect("1 is a valid accuracy")
    };
    let budget = Budget::new(budget_nodes(budget_flag)?);
    let outcome = run_algorithm(&inst, algorithm, &epsilon, &budget, oracle_limit, force)?;
    check_outcome(&inst, &outcome)?;
    let file = PackingFile::from_packing(&inst, &outcome.packing, outcome.certificate.as_ref());
    let to_file = emit(output, &file.render())?;
    note(to_file, &format!("algorithm: {}", outcome.algorithm));
    note(to_file, &format!("bins: {}", outcome.packing.bin_count()));
    note(
        to_file,
        &format!("cost: {} (raw {})", outcome.cost, inst.denormalize(&outcome.cost)),
    );
    if let Some(cert) = &outcome.certificate {
        note(to_file, &format!("epsilon: {}", cert.epsilon));
        note(to_file, &format!("lower bound: {}", cert.lower_bound));
        note(to_file, &format!("guarantee rhs at lower bound: {}", cert.bound_rhs));
        note(
            to_file,
            &format!(
                "guesses examined/pruned: {}/{}",
                cert.guesses_examined, cert.guesses_pruned
            ),
        );
        if cert.budget_exhausted {
            return Err(Failure::new(
                3,
                "node budget ran out mid-sweep; the packing above is the best \
                 candidate found but the approximation guarantee is not certified",
            ));
        }
    }
    Ok(())
}

fn gen_cmd(
    n: usize,
    size_model: &str,
    cost_model: &str,
    seed: u64,
    name: Option<String>,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let size: SizeModel =
        size_model.parse().map_err(|e| Failure::new(1, format!("--size-model: {e}")))?;
    let cost: CostModel =
        cost_model.parse().map_err(|e| Failure::new(1, format!("--cost-model: {e}")))?;
    let mut file = generate_random_instance(n, &size, &cost, seed)
        .map_err(|e| Failure::new(1, e.to_string()))?;
    if name.is_some() {
        let mut meta = file.metadata.take().unwrap_or_default();
        meta.name = name;
        file.metadata = Some(meta);
    }
    let to_file = emit(output, &file.render())?;
    if to_file {
        note(true, &format!("wrote {n}-item instance"));
    }
    Ok(())
}

fn reduce_cmd(
    integers: Vec<u64>,
    bound: u64,
    k: usize,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let tp = ThreePartitionInput { integers, bound, target_k: k };
    let red = reduce_three_partition(&tp).map_err(|e| Failure::new(1, e.to_string()))?;
    let to_file = emit(output, &red.file.render())?;
    note(to_file, &format!("items: {}", red.instance.n()));
    note(to_file, &format!("decision threshold m*f(k): {}", red.threshold));
    note(
        to_file,
        "the instance packs at cost <= threshold iff the 3-Partition input is a YES instance",
    );
    Ok(())
}

fn verify_cmd(instance_path: &Path, packing_path: &Path) -> Result<(), Failure> {
    let (inst, _) = parse_instance_file(instance_path)?;
    let file = parse_packing_file(packing_path)?;
    let packing = file.packing();
    let mut problems: Vec<String> = Vec::new();

    let report = verify_packing(&inst, &packing);
    problems.extend(report.violations.iter().map(|v| v.to_string()));

    // The stated cardinalities and costs must match what the bins imply.
    for (i, bin) in file.bins.iter().enumerate() {
        if file.cardinalities[i] != bin.len() {
            problems.push(format!(
                "bin {i}: stated cardinality {} but {} items listed",
                file.cardinalities[i],
                bin.len()
            ));
        }
    }
    if problems.is_empty() {
        let packing_name = packing_path.display().to_string();
        for (i, stated) in file.bin_costs.iter().enumerate() {
            let stated = parse_rat_field(packing_path, &format!("bin_costs[{i}]"), stated)?;
            let actual = inst.cost().at(file.bins[i].len());
            if stated != *actual {
                problems.push(format!("bin {i}: stated cost {stated}, actual {actual}"));
            }
        }
        let total = packing_cost(&inst, &packing);
        let stated_total = parse_rat_field(packing_path, "total_cost", &file.total_cost)?;
        if stated_total != total {
            problems.push(format!("stated total {stated_total}, actual {total}"));
        }
        let stated_raw = parse_rat_field(packing_path, "total_cost_raw", &file.total_cost_raw)?;
        let raw = inst.denormalize(&total);
        if stated_raw != raw {
            problems.push(format!("stated raw total {stated_raw}, actual {raw}"));
        }
        if problems.is_empty() {
            println!(
                "ok: {packing_name} packs all {} items into {} bins, cost {total} (raw {raw})",
                inst.n(),
                packing.bin_count(),
            );
            return Ok(());
        }
    }
    for p in &problems {
        println!("violation: {p}");
    }
    Err(Failure::new(2, format!("verification failed with {} problem(s)", problems.len())))
}

#[allow(clippy::too_many_arguments)]
fn bench_cmd(
    instances: Vec<PathBuf>,
    algorithms: &[String],
    epsilon: &[String],
    oracle_limit: usize,
    budget_flag: Option<u64>,
    force: bool,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let algorithms: Vec<Algorithm> = algorithms
        .iter()
        .map(|a| a.parse().map_err(|e: String| Failure::new(1, e)))
        .collect::<Result<_, _>>()?;
    let epsilons: Vec<Epsilon> =
        epsilon.iter().map(|e| parse_epsilon(e)).collect::<Result<_, _>>()?;
    let req = BenchRequest {
        instances,
        algorithms,
        epsilons,
        oracle_limit,
        budget_nodes: budget_nodes(budget_flag)?,
        force,
    };
    let rows = run_bench(&req)?;
    print!("{}", text_report(&rows));
    if let Some(path) = output {
        write_text(path, &machine_report(&rows))?;
    }
    Ok(())
}

