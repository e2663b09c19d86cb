//! Experiment execution: builds the problem, runs each configured solver
//! (optionally across threads), establishes the session reference optimum,
//! and writes CSV traces, SVG plots, and the session manifest.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use proxsarah_core::data::{
    canonicalize_labels, normalize_rows, open_dataset, split, synth_binclass, synth_nnpca,
    Dataset, SparseSample,
};
use proxsarah_core::metrics::ETA_REF;
use proxsarah_core::problems::binclass::{accuracy, BinClassProblem};
use proxsarah_core::problems::nnpca::NnPcaProblem;
use proxsarah_core::solvers::{
    preset_config, run_solver, OutputRule, RunHooks, RunResult, SolverConfig,
};
use proxsarah_core::{Error, ProblemOracle, Regularizer, Result, WeightVector};

use crate::config::{ExperimentConfig, ProblemKind};
use crate::csvout::write_csv;
use crate::plot::{render, Series};

pub struct SolverOutcome {
    pub name: String,
    pub result: RunResult,
    pub wall_ms: u128,
}

pub struct SessionSummary {
    pub f_star: f64,
    pub outcomes: Vec<SolverOutcome>,
    pub out_dir: PathBuf,
    pub csv_paths: Vec<PathBuf>,
    pub svg_paths: Vec<PathBuf>,
}

enum BuiltProblem {
    NnPca { oracle: NnPcaProblem },
    BinClass { oracle: BinClassProblem, test: Vec<SparseSample> },
}

impl BuiltProblem {
    fn oracle(&self) -> &dyn ProblemOracle {
        match self {
            BuiltProblem::NnPca { oracle } => oracle,
            BuiltProblem::BinClass { oracle, .. } => oracle,
        }
    }

    fn regularizer(&self, cfg: &ExperimentConfig, n: usize) -> Regularizer {
        match self {
            BuiltProblem::NnPca { .. } => Regularizer::nonneg_unit_ball(),
            BuiltProblem::BinClass { .. } => Regularizer::L1 {
                lambda: cfg.lambda.unwrap_or(1.0 / n as f64),
            },
        }
    }
}

fn load_binclass(cfg: &ExperimentConfig) -> Result<Dataset> {
    match &cfg.dataset {
        Some(path) => {
            let ds = open_dataset(path)?;
            Ok(normalize_rows(canonicalize_labels(ds)?))
        }
        None => Ok(normalize_rows(synth_binclass(cfg.n, cfg.d, cfg.seed, cfg.separability))),
    }
}

fn build_problem(cfg: &ExperimentConfig) -> Result<BuiltProblem> {
    match cfg.problem {
        ProblemKind::NnPca => {
            let ds = match &cfg.dataset {
                Some(path) => normalize_rows(open_dataset(path)?),
                None => synth_nnpca(cfg.n, cfg.d, cfg.seed),
            };
            Ok(BuiltProblem::NnPca { oracle: NnPcaProblem::new(ds)? })
        }
        ProblemKind::BinClass => {
            let ds = load_binclass(cfg)?;
            let (train, test) = if cfg.test_fraction > 0.0 {
                split(&ds, cfg.test_fraction, cfg.seed)?
            } else {
                (ds, Dataset { samples: vec![], dim: 0, normalized: true })
            };
            Ok(BuiltProblem::BinClass {
                oracle: BinClassProblem::new(train, cfg.loss)?,
                test: test.samples,
            })
        }
    }
}

/// Stable identifier for the dataset, used to key the persisted F*.
fn dataset_key(cfg: &ExperimentConfig) -> String {
    match &cfg.dataset {
        Some(path) => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
            format!("{}-{:?}", stem, cfg.problem).to_ascii_lowercase()
        }
        None => match cfg.problem {
            ProblemKind::NnPca => format!("synth-nnpca-n{}-d{}-seed{}", cfg.n, cfg.d, cfg.seed),
            ProblemKind::BinClass => format!(
                "synth-binclass-n{}-d{}-seed{}-{}",
                cfg.n,
                cfg.d,
                cfg.seed,
                cfg.loss.name()
            ),
        },
    }
}

fn fstar_path(out: &Path, key: &str) -> PathBuf {
    out.join(format!("fstar-{key}.txt"))
}

fn load_persisted_fstar(path: &Path) -> Option<f64> {
    fs::read_to_string(path).ok()?.trim().parse().ok()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SessionSummary> {
    let problem = build_problem(cfg)?;
    let oracle = problem.oracle();
    let n = oracle.num_components().expect("finite-sum problems only");
    let reg = problem.regularizer(cfg, n);
    let lipschitz = oracle.lipschitz();

    // resolve all solver names before doing any work
    let mut solver_cfgs = Vec::new();
    for name in &cfg.solvers {
        let preset = preset_config(name, n, lipschitz).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("key 'solvers': {msg}")),
            other => other,
        })?;
        solver_cfgs.push((
            preset.name.to_string(),
            SolverConfig {
                variant: preset.variant,
                epochs: cfg.epochs,
                seed: cfg.seed,
                output: OutputRule::Last,
            },
        ));
    }

    let accuracy_hook: Option<Box<dyn Fn(&WeightVector) -> (Option<f64>, Option<f64>) + Sync>> =
        match &problem {
            BuiltProblem::NnPca { .. } => None,
            BuiltProblem::BinClass { oracle, test } => {
                let train = oracle.samples().to_vec();
                let test = test.clone();
                Some(Box::new(move |w: &WeightVector| {
                    let tr = Some(accuracy(w, &train));
                    let te = if test.is_empty() { None } else { Some(accuracy(w, &test)) };
                    (tr, te)
                }))
            }
        };
    let hooks = RunHooks { accuracy: accuracy_hook.as_deref() };

    // run solvers, round-robin across worker threads; slot order (not
    // completion order) determines every output, so thread count cannot
    // change a byte
    let slots: Vec<Mutex<Option<Result<(RunResult, u128)>>>> =
        solver_cfgs.iter().map(|_| Mutex::new(None)).collect();
    let workers = cfg.threads.min(solver_cfgs.len()).max(1);
    std::thread::scope(|scope| {
        for worker in 0..workers {
            let slots = &slots;
            let solver_cfgs = &solver_cfgs;
            let reg = &reg;
            let hooks = hooks;
            scope.spawn(move || {
                for idx in (worker..solver_cfgs.len()).step_by(workers) {
                    let started = Instant::now();
                    let r = run_solver(oracle, reg, &solver_cfgs[idx].1, hooks)
                        .map(|res| (res, started.elapsed().as_millis()));
                    *slots[idx].lock().unwrap() = Some(r);
                }
            });
        }
    });

    let mut outcomes = Vec::new();
    for ((name, _), slot) in solver_cfgs.iter().zip(slots) {
        let (result, wall_ms) = slot.into_inner().unwrap().expect("worker ran every slot")?;
        outcomes.push(SolverOutcome { name: name.clone(), result, wall_ms });
    }

    // session F*: running minimum over every recorded objective, persisted
    // per dataset so later sessions keep a consistent reference
    let key = dataset_key(cfg);
    fs::create_dir_all(&cfg.out)?;
    let fstar_file = fstar_path(&cfg.out, &key);
    let mut f_star = load_persisted_fstar(&fstar_file).unwrap_or(f64::INFINITY);
    for o in &outcomes {
        for row in &o.result.trace.rows {
            if row.objective < f_star {
                f_star = row.objective;
            }
        }
    }
    for o in &mut outcomes {
        o.result.trace.apply_f_star(f_star);
    }
    fs::write(&fstar_file, format!("{f_star:.16e}\n"))?;

    let mut csv_paths = Vec::new();
    for o in &outcomes {
        let path = cfg.out.join(format!("{}.csv", o.name));
        let mut buf = Vec::new();
        write_csv(&o.result.trace, &mut buf)?;
        fs::write(&path, buf)?;
        csv_paths.push(path);
    }

    let svg_paths = write_plots(cfg, &outcomes)?;
    write_manifest(cfg, &key, f_star, lipschitz, n, &outcomes)?;

    Ok(SessionSummary { f_star, outcomes, out_dir: cfg.out.clone(), csv_paths, svg_paths })
}

fn write_plots(cfg: &ExperimentConfig, outcomes: &[SolverOutcome]) -> Result<Vec<PathBuf>> {
    let series = |f: &dyn Fn(&proxsarah_core::metrics::TraceRow) -> Option<f64>| -> Vec<Series> {
        outcomes
            .iter()
            .map(|o| Series {
                name: o.name.clone(),
                points: o
                    .result
                    .trace
                    .rows
                    .iter()
                    .filter_map(|r| f(r).map(|y| (r.epoch_fraction, y)))
                    .collect(),
            })
            .collect()
    };

    let mut paths = Vec::new();
    let residual = series(&|r| Some(r.rel_residual));
    let path = cfg.out.join("residual.svg");
    fs::write(
        &path,
        render("Objective residual", "epochs", "(F - F*)/|F*|", &residual, true),
    )?;
    paths.push(path);

    let gmap = series(&|r| Some(r.grad_map_norm_sq));
    let path = cfg.out.join("grad_mapping.svg");
    fs::write(
        &path,
        render(
            &format!("Gradient mapping (eta = {ETA_REF})"),
            "epochs",
            "||G(w)||^2",
            &gmap,
            true,
        ),
    )?;
    paths.push(path);

    let acc = series(&|r| r.train_acc);
    if acc.iter().any(|s| !s.points.is_empty()) {
        let mut all = acc;
        all.extend(
            series(&|r| r.test_acc)
                .into_iter()
                .map(|mut s| {
                    s.name = format!("{} (test)", s.name);
                    s
                })
                .filter(|s| !s.points.is_empty()),
        );
        let path = cfg.out.join("accuracy.svg");
        fs::write(&path, render("Classification accuracy", "epochs", "accuracy", &all, false))?;
        paths.push(path);
    }
    Ok(paths)
}

fn write_manifest(
    cfg: &ExperimentConfig,
    dataset_key: &str,
    f_star: f64,
    lipschitz: f64,
    n: usize,
    outcomes: &[SolverOutcome],
) -> Result<()> {
    let mut f = fs::File::create(cfg.out.join("manifest.txt"))?;
    writeln!(f, "proxsarah {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(f, "dataset = {dataset_key}")?;
    writeln!(f, "n = {n}")?;
    writeln!(f, "L = {lipschitz:.16e}")?;
    writeln!(f, "f_star = {f_star:.16e}")?;
    writeln!(f, "eta_ref = {ETA_REF}")?;
    writeln!(f, "seed = {}", cfg.seed)?;
    writeln!(f, "epochs = {}", cfg.epochs)?;
    writeln!(f, "threads = {}", cfg.threads)?;
    for o in outcomes {
        writeln!(
            f,
            "solver {} : sfo = {}, prox_calls = {}, wall_ms = {}",
            o.name, o.result.counters.sfo, o.result.counters.prox_calls, o.wall_ms
        )?;
    }
    Ok(())
}
