//! The averaged proximal-SARAH solver plus the four baseline methods it is
//! benchmarked against, with shared configuration, trace recording, and
//! output-iterate selection.

mod baselines;
mod engine;
mod presets;
mod select;

pub use presets::{preset_config, preset_names, PresetInfo};
pub use select::{draw_output_index, select_output};

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::metrics::{grad_mapping_norm_sq, RunTrace, TraceRow, ETA_REF};
use crate::oracle::{full_objective, OracleMode, ProblemOracle};
use crate::prox::{prox_uncounted, Regularizer};
use crate::stepsize::{
    adaptive_composite_with_form, constant_composite, BracketForm, ScheduleMode, StepSchedule,
};
use crate::vector::WeightVector;

/// How `(gamma_t, eta_t)` are derived for a ProxSARAH run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleRule {
    /// Constant pair from the variance factor `omega` and epoch length.
    Constant,
    /// Backward-recursive increasing `gamma_t` at fixed `eta`.
    Adaptive { eta: f64, form: BracketForm },
    /// Caller-supplied constant pair (used by the trade-off presets and the
    /// reduction-identity tests).
    Explicit { gamma: f64, eta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    ProxSarah { rule: ScheduleRule, m: usize, b_hat: usize, b_s: usize },
    ProxSvrg { m: usize, b_hat: usize, eta: f64 },
    ProxSpiderBoost { m: usize, b_hat: usize, eta: f64 },
    ProxSgd { eta0: f64, eta_tilde: f64, b_hat: usize },
    /// `eta = None` uses the theoretical step `1/L`.
    ProxGd { eta: Option<f64> },
}

/// Which iterate a run reports as its result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputRule {
    #[default]
    Last,
    /// `Prob(w_t^{(s)}) = gamma_t / (S Sigma_m)`; ProxSARAH only.
    WeightedRandom,
    /// Uniform over all `(m+1) S` stored iterates; ProxSARAH only.
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    /// Work budget in epochs (`n` component gradients each).
    pub epochs: f64,
    pub seed: u64,
    pub output: OutputRule,
}

impl SolverConfig {
    pub fn new(variant: Variant, epochs: f64, seed: u64) -> Self {
        Self { variant, epochs, seed, output: OutputRule::Last }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epochs > 0.0) {
            return Err(Error::invalid(format!("epochs must be > 0, got {}", self.epochs)));
        }
        match self.variant {
            Variant::ProxSarah { m, b_hat, b_s, .. } => {
                if m < 1 || b_hat < 1 || b_s < 1 {
                    return Err(Error::invalid("ProxSARAH requires m, b_hat, b_s >= 1"));
                }
            }
            Variant::ProxSvrg { m, b_hat, eta } | Variant::ProxSpiderBoost { m, b_hat, eta } => {
                if m < 1 || b_hat < 1 || eta <= 0.0 {
                    return Err(Error::invalid("baseline requires m, b_hat >= 1 and eta > 0"));
                }
            }
            Variant::ProxSgd { eta0, eta_tilde, b_hat } => {
                if eta0 <= 0.0 || eta_tilde < 0.0 || b_hat < 1 {
                    return Err(Error::invalid("ProxSGD requires eta0 > 0, eta_tilde >= 0, b_hat >= 1"));
                }
            }
            Variant::ProxGd { eta } => {
                if let Some(e) = eta {
                    if e <= 0.0 {
                        return Err(Error::invalid("ProxGD step must be > 0"));
                    }
                }
            }
        }
        if self.output != OutputRule::Last
            && !matches!(self.variant, Variant::ProxSarah { .. })
        {
            return Err(Error::Config(
                "randomized output rules are only defined for ProxSARAH".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_w: WeightVector,
    /// Iterate chosen by the configured output rule.
    pub selected_w: WeightVector,
    pub trace: RunTrace,
    pub counters: Counters,
}

/// Optional accuracy evaluator `(train, test)` invoked at trace points.
pub type AccuracyFn<'a> = &'a (dyn Fn(&WeightVector) -> (Option<f64>, Option<f64>) + Sync);

#[derive(Default, Clone, Copy)]
pub struct RunHooks<'a> {
    pub accuracy: Option<AccuracyFn<'a>>,
}

/// Epoch length in SFO units: `n` in finite-sum mode, a fixed reference of
/// 1000 draws in expectation mode (where no finite `n` exists).
pub const EXPECTATION_EPOCH_REF: usize = 1000;

pub(crate) fn epoch_ref(oracle: &dyn ProblemOracle) -> usize {
    match oracle.mode() {
        OracleMode::FiniteSum { n } => n,
        OracleMode::Expectation { .. } => EXPECTATION_EPOCH_REF,
    }
}

/// Starting point: the origin projected onto the feasible set, except under
/// a ball-with-orthant constraint where the origin is stationary for the
/// NN-PCA objective; there the normalized all-ones vector is used.
pub fn initial_point(dim: usize, reg: &Regularizer) -> WeightVector {
    let w = match reg {
        Regularizer::NonnegBall { .. } => {
            let v = 1.0 / (dim as f64).sqrt();
            WeightVector::from_vec(vec![v; dim])
        }
        _ => WeightVector::zeros(dim),
    };
    prox_uncounted(reg, &w, 1.0)
}

/// Builds the `(gamma, eta)` schedule for a ProxSARAH configuration.
pub fn build_schedule(
    rule: ScheduleRule,
    oracle: &dyn ProblemOracle,
    m: usize,
    b_hat: usize,
) -> Result<StepSchedule> {
    let lipschitz = oracle.lipschitz();
    match rule {
        ScheduleRule::Constant => {
            let mode = match oracle.mode() {
                OracleMode::FiniteSum { n } => ScheduleMode::FiniteSum { n },
                OracleMode::Expectation { .. } => ScheduleMode::Expectation,
            };
            constant_composite(lipschitz, m, b_hat, mode)
        }
        ScheduleRule::Adaptive { eta, form } => match oracle.mode() {
            OracleMode::FiniteSum { n } => {
                adaptive_composite_with_form(lipschitz, eta, m, b_hat, n, form)
            }
            OracleMode::Expectation { .. } => Err(Error::Config(
                "adaptive schedules need a finite sample count; use a constant rule in \
                 expectation mode"
                    .into(),
            )),
        },
        ScheduleRule::Explicit { gamma, eta } => {
            if !(0.0 < gamma && gamma <= 1.0) || eta <= 0.0 {
                return Err(Error::invalid(format!(
                    "explicit schedule requires gamma in (0,1] and eta > 0, got ({gamma}, {eta})"
                )));
            }
            Ok(StepSchedule { gammas: vec![gamma; m + 1], etas: vec![eta; m + 1], sigma_m: gamma * (m as f64 + 1.0) })
        }
    }
}

/// Outer-iteration count for a given epoch budget: each outer iteration
/// costs `b_s + 2 m b_hat` SFO calls, and one epoch is [`epoch_ref`] calls.
pub fn outer_iterations(epochs: f64, epoch_len: usize, sfo_per_outer: u64) -> usize {
    let s = (epochs * epoch_len as f64 / sfo_per_outer as f64).ceil() as usize;
    s.max(1)
}

/// Trace recorder shared by all solvers. Metric evaluation is out-of-band:
/// it uses its own scratch counters and never advances solver RNG streams.
pub(crate) struct Tracer<'a> {
    oracle: &'a dyn ProblemOracle,
    reg: &'a Regularizer,
    hooks: RunHooks<'a>,
    epoch_len: f64,
    pub trace: RunTrace,
}

impl<'a> Tracer<'a> {
    pub fn new(oracle: &'a dyn ProblemOracle, reg: &'a Regularizer, hooks: RunHooks<'a>) -> Self {
        Self {
            oracle,
            reg,
            hooks,
            epoch_len: epoch_ref(oracle) as f64,
            trace: RunTrace::new(0.0),
        }
    }

    pub fn record(&mut self, sfo: u64, w: &WeightVector) -> Result<()> {
        let objective = full_objective(self.oracle, self.reg, w);
        let grad_map = grad_mapping_norm_sq(self.oracle, self.reg, w, ETA_REF)?;
        let (train_acc, test_acc) = match self.hooks.accuracy {
            Some(f) => f(w),
            None => (None, None),
        };
        self.trace.push(TraceRow {
            epoch_fraction: sfo as f64 / self.epoch_len,
            objective,
            // provisional residual against F* = 0; the session rewrites it
            // via RunTrace::apply_f_star once the running minimum is known
            rel_residual: objective,
            grad_map_norm_sq: grad_map,
            train_acc,
            test_acc,
            wall_ms: 0,
        });
        Ok(())
    }
}

/// Inner-step stride between trace rows: about 20 rows per epoch.
pub(crate) fn trace_stride(epoch_len: usize, b_hat: usize) -> usize {
    (epoch_len + 20 * b_hat - 1) / (20 * b_hat).max(1)
}

/// Runs the solver selected by `cfg.variant`.
pub fn run_solver(
    oracle: &dyn ProblemOracle,
    reg: &Regularizer,
    cfg: &SolverConfig,
    hooks: RunHooks<'_>,
) -> Result<RunResult> {
    cfg.validate()?;
    reg.validate()?;
    match cfg.variant {
        Variant::ProxSarah { .. } | Variant::ProxSpiderBoost { .. } => {
            engine::run_sarah_family(oracle, reg, cfg, hooks)
        }
        Variant::ProxSvrg { .. } => baselines::run_svrg(oracle, reg, cfg, hooks),
        Variant::ProxSgd { .. } => baselines::run_sgd(oracle, reg, cfg, hooks),
        Variant::ProxGd { .. } => baselines::run_gd(oracle, reg, cfg, hooks),
    }
}

fn expect_variant(ok: bool, name: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("config variant does not match {name}")))
    }
}

pub fn prox_sarah(
    oracle: &dyn ProblemOracle,
    reg: &Regularizer,
    cfg: &SolverConfig,
) -> Result<RunResult> {
    expect_variant(matches!(cfg.variant, Variant::ProxSarah { .. }), "prox_sarah")?;
    run_solver(oracle, reg, cfg, RunHooks::default())
}

pub fn prox_svrg(
    oracle: &dyn ProblemOracle,
    reg: &Regularizer,
    cfg: &SolverConfig,
) -> Result<RunResult> {
    expect_variant(matches!(cfg.variant, Variant::ProxSvrg { .. }), "prox_svrg")?;
    run_solver(oracle, reg, cfg, RunHooks::default())
}

pub fn prox_spiderboost(
    oracle: &dyn ProblemOracle,
    reg: &Regularizer,
    cfg: &SolverConfig,
) -> Result<RunResult> {
    expect_variant(matches!(cfg.variant, Variant::ProxSpiderBoost { .. }), "prox_spiderboost")?;
    run_solver(oracle, reg, cfg, RunHooks::default())
}

pub fn prox_sgd(
    oracle: &dyn ProblemOracle,
    reg: &Regularizer,
    cfg: &SolverConfig,
) -> Result<RunResult> {
    expect_variant(matches!(cfg.variant, Variant::ProxSgd { .. }), "prox_sgd")?;
    run_solver(oracle, reg, cfg, RunHooks::default())
}

pub fn prox_gd(
    oracle: &dyn ProblemOracle,
    reg: &Regularizer,
    cfg: &SolverConfig,
) -> Result<RunResult> {
    expect_variant(matches!(cfg.variant, Variant::ProxGd { .. }), "prox_gd")?;
    run_solver(oracle, reg, cfg, RunHooks::default())
}
