//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`, `#` starts a comment, keys are case-insensitive.
//! Documented keys:
//!
//! | key             | meaning                                             | default |
//! |-----------------|-----------------------------------------------------|---------|
//! | `problem`       | `nnpca` or `binclass`                               | required|
//! | `solvers`       | comma-separated preset names (see `presets list`)   | required|
//! | `dataset`       | LIBSVM file (`.gz` accepted); omit for synthetic    | none    |
//! | `n`, `d`        | synthetic sample count / dimension                  | 1000, 50|
//! | `loss`          | `l1`, `l2` or `l3` (binclass)                       | `l2`    |
//! | `omega`         | loss parameter for `l1`/`l3`                        | 1.0     |
//! | `lambda`        | l1 weight, or `auto` for `1/n`                      | auto    |
//! | `separability`  | synthetic binclass label noise control              | 1.0     |
//! | `test_fraction` | held-out fraction for accuracy columns (binclass)   | 0.1     |
//! | `epochs`        | work budget in epochs                               | 10      |
//! | `seed`          | master seed                                         | 42      |
//! | `out`           | output directory                                    | `out`   |
//! | `threads`       | worker threads across solvers                       | 1       |
//!
//! Environment variables never alter numeric behavior; only the `--seed`,
//! `--epochs`, `--out` and `--threads` CLI flags override these keys.

use std::path::PathBuf;

use proxsarah_core::problems::losses::LossKind;
use proxsarah_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    NnPca,
    BinClass,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub solvers: Vec<String>,
    pub dataset: Option<PathBuf>,
    pub n: usize,
    pub d: usize,
    pub loss: LossKind,
    pub lambda: Option<f64>,
    pub separability: f64,
    pub test_fraction: f64,
    pub epochs: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub threads: usize,
}

/// CLI flags that take precedence over config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub epochs: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key '{key}': cannot parse '{value}'")))
}

pub fn parse_config(text: &str, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut problem = None;
    let mut solvers: Vec<String> = Vec::new();
    let mut dataset = None;
    let mut n = 1000usize;
    let mut d = 50usize;
    let mut loss_name = "l2".to_string();
    let mut omega = 1.0;
    let mut lambda = None;
    let mut separability = 1.0;
    let mut test_fraction = 0.1;
    let mut epochs = 10.0;
    let mut seed = 42u64;
    let mut out = PathBuf::from("out");
    let mut threads = 1usize;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            )));
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        match key.as_str() {
            "problem" => {
                problem = Some(match value.to_ascii_lowercase().as_str() {
                    "nnpca" => ProblemKind::NnPca,
                    "binclass" => ProblemKind::BinClass,
                    other => {
                        return Err(Error::Config(format!(
                            "key 'problem': unknown kind '{other}' (expected nnpca or binclass)"
                        )))
                    }
                });
            }
            "solvers" => {
                solvers = value
                    .split(',')
                    .map(|s| s.trim().to_ascii_lowercase())
                    .filter(|s| !s.is_empty())
                    .collect();
            }
            "dataset" => dataset = Some(PathBuf::from(value)),
            "n" => n = parse_num(&key, value)?,
            "d" => d = parse_num(&key, value)?,
            "loss" => loss_name = value.to_ascii_lowercase(),
            "omega" => omega = parse_num(&key, value)?,
            "lambda" => {
                lambda = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(parse_num(&key, value)?)
                };
            }
            "separability" => separability = parse_num(&key, value)?,
            "test_fraction" => test_fraction = parse_num(&key, value)?,
            "epochs" => epochs = parse_num(&key, value)?,
            "seed" => seed = parse_num(&key, value)?,
            "out" => out = PathBuf::from(value),
            "threads" => threads = parse_num(&key, value)?,
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
    }

    let problem = problem
        .ok_or_else(|| Error::Config("missing required key 'problem'".to_string()))?;
    if solvers.is_empty() {
        return Err(Error::Config("key 'solvers': at least one solver is required".to_string()));
    }
    let loss = match loss_name.as_str() {
        "l1" => LossKind::L1Sigmoid { omega },
        "l2" => LossKind::TwoLayer,
        "l3" => LossKind::LogisticDiff { omega },
        other => {
            return Err(Error::Config(format!(
                "key 'loss': unknown loss '{other}' (expected l1, l2 or l3)"
            )))
        }
    };
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::Config(format!(
            "key 'test_fraction': must be in [0, 1), got {test_fraction}"
        )));
    }

    Ok(ExperimentConfig {
        problem,
        solvers,
        dataset,
        n,
        d,
        loss,
        lambda,
        separability,
        test_fraction,
        epochs: overrides.epochs.unwrap_or(epochs),
        seed: overrides.seed.unwrap_or(seed),
        out: overrides.out.clone().unwrap_or(out),
        threads: overrides.threads.unwrap_or(threads).max(1),
    })
}
