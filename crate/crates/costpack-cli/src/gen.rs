//! Random instance generation.
//!
//! Generators are pure functions of their parameters and the seed: the same
//! call yields the same file, byte for byte, across runs and platforms.

use std::fmt;
use std::str::FromStr;

use costpack_core::{rat, validate_instance, Rat};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formats::{InstanceFile, Metadata};

/// Rejected generator parameters.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BadModel {
    #[error("unknown model {0:?}")]
    Unknown(String),
    #[error("model argument {0:?} is not {1}")]
    BadArgument(String, &'static str),
    #[error("grid denominator must be in 1..=2^62")]
    BadGrid,
    #[error("discrete size model needs a nonempty choice list")]
    EmptyChoices,
    #[error("size choice {0} is outside [0, 1]")]
    ChoiceOutOfRange(String),
    #[error("step cost model needs a threshold of at least 1")]
    ZeroThreshold,
    #[error("step penalty {0} is below 1, the table would not be monotone")]
    PenaltyBelowOne(String),
}

/// How item sizes are drawn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SizeModel {
    /// `u/D` with `u` uniform over `0..=D`.
    UniformRational { denominator: u64 },
    /// Uniform over an explicit list of sizes.
    Discrete { choices: Vec<Rat> },
}

/// How the cost table is built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostModel {
    /// Every nonempty bin costs 1 (classic bin packing).
    Flat,
    /// `f(j) = j`.
    Linear,
    /// Random concave table: increments drawn on the `1/D` grid, sorted
    /// non-increasing, first increment forced positive.
    Concave { denominator: u64 },
    /// `f(j) = 1` for `j <= threshold`, `penalty` beyond (cardinality
    /// constraint shape).
    Step { threshold: usize, penalty: Rat },
    /// Random monotone table: nonnegative increments on the `1/D` grid,
    /// first increment forced positive.
    RandomMonotone { denominator: u64 },
}

const DEFAULT_GRID: u64 = 16;
const GRID_LIMIT: u64 = 1 << 62;

impl SizeModel {
    fn validate(&self) -> Result<(), BadModel> {
        match self {
            SizeModel::UniformRational { denominator } => {
                if *denominator == 0 || *denominator > GRID_LIMIT {
                    return Err(BadModel::BadGrid);
                }
            }
            SizeModel::Discrete { choices } => {
                if choices.is_empty() {
                    return Err(BadModel::EmptyChoices);
                }
                for c in choices {
                    if c.is_negative() || *c > Rat::one() {
                        return Err(BadModel::ChoiceOutOfRange(c.to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Rat {
        match self {
            SizeModel::UniformRational { denominator } => {
                let num = rng.gen_range(0..=*denominator);
                Rat::new(num as i64, *denominator as i64)
            }
            SizeModel::Discrete { choices } => choices[rng.gen_range(0..choices.len())].clone(),
        }
    }
}

impl CostModel {
    fn validate(&self) -> Result<(), BadModel> {
        match self {
            CostModel::Concave { denominator } | CostModel::RandomMonotone { denominator } => {
                if *denominator == 0 || *denominator > GRID_LIMIT {
                    return Err(BadModel::BadGrid);
                }
            }
            CostModel::Step { threshold, penalty } => {
                if *threshold == 0 {
                    return Err(BadModel::ZeroThreshold);
                }
                if *penalty < Rat::one() {
                    return Err(BadModel::PenaltyBelowOne(penalty.to_string()));
                }
            }
            CostModel::Flat | CostModel::Linear => {}
        }
        Ok(())
    }

    /// Raw table of length `n + 1`.
    fn table(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<Rat> {
        let mut table = vec![Rat::zero()];
        match self {
            CostModel::Flat => table.extend((1..=n).map(|_| Rat::one())),
            CostModel::Linear => table.extend((1..=n).map(Rat::from_usize)),
            CostModel::Step { threshold, penalty } => table.extend((1..=n).map(|j| {
                if j <= *threshold {
                    Rat::one()
                } else {
                    penalty.clone()
                }
            })),
            CostModel::Concave { denominator } => {
                let d = *denominator;
                let mut steps: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=d)).collect();
                steps.sort_unstable_by(|a, b| b.cmp(a));
                if let Some(first) = steps.first_mut() {
                    *first = (*first).max(1);
                }
                extend_by_increments(&mut table, &steps, d);
            }
            CostModel::RandomMonotone { denominator } => {
                let d = *denominator;
                let mut steps: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=d)).collect();
                if let Some(first) = steps.first_mut() {
                    *first = (*first).max(1);
                }
                extend_by_increments(&mut table, &steps, d);
            }
        }
        table
    }
}

fn extend_by_increments(table: &mut Vec<Rat>, steps: &[u64], denominator: u64) {
    let mut value = Rat::zero();
    for &s in steps {
        value = &value + &rat(s as i64, denominator as i64);
        table.push(value.clone());
    }
}

/// Draws `n` sizes and a cost table, validates the result, and returns the
/// file body. The sizes consume the random stream first, then the table.
pub fn generate_random_instance(
    n: usize,
    size_model: &SizeModel,
    cost_model: &CostModel,
    seed: u64,
) -> Result<InstanceFile, BadModel> {
    size_model.validate()?;
    cost_model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes: Vec<Rat> = (0..n).map(|_| size_model.draw(&mut rng)).collect();
    let cost = cost_model.table(n, &mut rng);
    validate_instance(sizes.clone(), cost.clone()).expect("generated instances validate");
    let metadata = Metadata {
        generator: Some(format!("sizes={size_model} cost={cost_model}")),
        seed: Some(seed),
        ..Metadata::default()
    };
    Ok(InstanceFile::from_parts(&sizes, &cost, Some(metadata)))
}

impl fmt::Display for SizeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeModel::UniformRational { denominator } => write!(f, "uniform:{denominator}"),
            SizeModel::Discrete { choices } => {
                let list: Vec<String> = choices.iter().map(Rat::to_string).collect();
                write!(f, "discrete:{}", list.join(","))
            }
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostModel::Flat => write!(f, "flat"),
            CostModel::Linear => write!(f, "linear"),
            CostModel::Concave { denominator } => write!(f, "concave:{denominator}"),
            CostModel::Step { threshold, penalty } => write!(f, "step:{threshold},{penalty}"),
            CostModel::RandomMonotone { denominator } => {
                write!(f, "random-monotone:{denominator}")
            }
        }
    }
}

fn parse_grid(arg: Option<&str>, whole: &str) -> Result<u64, BadModel> {
    match arg {
        None => Ok(DEFAULT_GRID),
        Some(a) => a
            .parse::<u64>()
            .map_err(|_| BadModel::BadArgument(whole.to_string(), "a positive integer")),
    }
}

impl FromStr for SizeModel {
    type Err = BadModel;

    /// `uniform:D` (alias `uniform-rational:D`) or `discrete:r1,r2,...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let model = match head {
            "uniform" | "uniform-rational" => {
                SizeModel::UniformRational { denominator: parse_grid(arg, s)? }
            }
            "discrete" => {
                let list = arg.ok_or(BadModel::EmptyChoices)?;
                let choices = list
                    .split(',')
                    .map(|t| {
                        Rat::from_str(t)
                            .map_err(|_| BadModel::BadArgument(s.to_string(), "a rational list"))
                    })
                    .collect::<Result<Vec<Rat>, BadModel>>()?;
                SizeModel::Discrete { choices }
            }
            _ => return Err(BadModel::Unknown(s.to_string())),
        };
        model.validate()?;
        Ok(model)
    }
}

impl FromStr for CostModel {
    type Err = BadModel;

    /// `flat`, `linear`, `concave[:D]`, `step:K,x`, `random-monotone[:D]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let model = match head {
            "flat" => CostModel::Flat,
            "linear" => CostModel::Linear,
            "concave" => CostModel::Concave { denominator: parse_grid(arg, s)? },
            "random-monotone" => CostModel::RandomMonotone { denominator: parse_grid(arg, s)? },
            "step" => {
                let arg = arg.ok_or_else(|| {
                    BadModel::BadArgument(s.to_string(), "of the form step:K,x")
                })?;
                let (k, x) = arg.split_once(',').ok_or_else(|| {
                    BadModel::BadArgument(s.to_string(), "of the form step:K,x")
                })?;
                let threshold = k
                    .parse::<usize>()
                    .map_err(|_| BadModel::BadArgument(s.to_string(), "a positive integer K"))?;
                let penalty = Rat::from_str(x)
                    .map_err(|_| BadModel::BadArgument(s.to_string(), "a rational penalty"))?;
                CostModel::Step { threshold, penalty }
            }
            _ => return Err(BadModel::Unknown(s.to_string())),
        };
        model.validate()?;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_table_matches_classic_bin_packing() {
        let model: CostModel = "flat".parse().unwrap();
        let file = generate_random_instance(
            4,
            &SizeModel::UniformRational { denominator: 10 },
            &model,
            7,
        )
        .unwrap();
        assert_eq!(file.cost, vec!["0", "1", "1", "1", "1"]);
    }

    #[test]
    fn step_table_matches_cardinality_constraint_shape() {
        let n = 4;
        let model = CostModel::Step { threshold: 2, penalty: Rat::from_usize(n) };
        let file = generate_random_instance(
            n,
            &SizeModel::UniformRational { denominator: 10 },
            &model,
            7,
        )
        .unwrap();
        assert_eq!(file.cost, vec!["0", "1", "1", "4", "4"]);
    }

    #[test]
    fn same_seed_yields_identical_files() {
        let size: SizeModel = "uniform:32".parse().unwrap();
        let cost: CostModel = "random-monotone:8".parse().unwrap();
        let a = generate_random_instance(12, &size, &cost, 99).unwrap();
        let b = generate_random_instance(12, &size, &cost, 99).unwrap();
        assert_eq!(a.render(), b.render());
        let c = generate_random_instance(12, &size, &cost, 100).unwrap();
        assert_ne!(a.render(), c.render());
    }

    #[test]
    fn concave_tables_have_non_increasing_increments() {
        for seed in 0..20 {
            let file = generate_random_instance(
                10,
                &SizeModel::UniformRational { denominator: 6 },
                &CostModel::Concave { denominator: 12 },
                seed,
            )
            .unwrap();
            let table: Vec<Rat> =
                file.cost.iter().map(|c| c.parse().unwrap()).collect();
            for j in 2..table.len() {
                let prev = &table[j - 1] - &table[j - 2];
                let next = &table[j] - &table[j - 1];
                assert!(next <= prev, "seed {seed}: increment grew at {j}");
            }
        }
    }

    #[test]
    fn discrete_sizes_come_from_the_choice_list() {
        let size: SizeModel = "discrete:1/2,1/4,0".parse().unwrap();
        let file =
            generate_random_instance(30, &size, &CostModel::Linear, 3).unwrap();
        for s in &file.sizes {
            assert!(["1/2", "1/4", "0"].contains(&s.as_str()), "unexpected size {s}");
        }
    }

    #[test]
    fn bad_models_are_rejected() {
        assert!(matches!("uniform:0".parse::<SizeModel>(), Err(BadModel::BadGrid)));
        assert!(matches!("discrete:3/2".parse::<SizeModel>(), Err(BadModel::ChoiceOutOfRange(_))));
        assert!(matches!("step:0,5".parse::<CostModel>(), Err(BadModel::ZeroThreshold)));
        assert!(matches!("step:2,1/2".parse::<CostModel>(), Err(BadModel::PenaltyBelowOne(_))));
        assert!(matches!("mystery".parse::<CostModel>(), Err(BadModel::Unknown(_))));
        assert!(matches!("step:2".parse::<CostModel>(), Err(BadModel::BadArgument(..))));
    }

    #[test]
    fn model_strings_round_trip_through_display() {
        for text in ["uniform:16", "discrete:1/2,1/4", "flat", "linear", "concave:8", "step:2,4", "random-monotone:16"] {
            let canonical = if text.contains("uniform") || text.contains("discrete") {
                text.parse::<SizeModel>().unwrap().to_string()
            } else {
                text.parse::<CostModel>().unwrap().to_string()
            };
            assert_eq!(canonical, text);
        }
    }
}
