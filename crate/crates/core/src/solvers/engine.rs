//! The averaged proximal-SARAH outer/inner loop. ProxSpiderBoost is the
//! same loop with `gamma = 1` and a constant step, so both run here.

use crate::error::{Error, Result};
use crate::estimators::{sarah_snapshot, sarah_update, BatchSampler};
use crate::oracle::{OracleMode, ProblemOracle};
use crate::prox::{prox, Regularizer};
use crate::rng::RngStream;
use crate::vector::WeightVector;

use super::select::select_output;
use super::{
    build_schedule, epoch_ref, initial_point, outer_iterations, trace_stride, Counters, OutputRule,
    RunHooks, RunResult, ScheduleRule, SolverConfig, Tracer, Variant,
};

// RNG stream ids, one per purpose so variants consuming different amounts of
// randomness for one purpose do not shift another's draws.
const STREAM_SNAPSHOT: u64 = 1;
const STREAM_INNER: u64 = 2;
const STREAM_OUTPUT: u64 = 3;

pub(super) fn run_sarah_family(
    oracle: &dyn ProblemOracle,
    reg: &Regularizer,
    cfg: &SolverConfig,
    hooks: RunHooks<'_>,
) -> Result<RunResult> {
    let (schedule, m, b_hat, b_s) = match cfg.variant {
        Variant::ProxSarah { rule, m, b_hat, b_s } => {
            (build_schedule(rule, oracle, m, b_hat)?, m, b_hat, b_s)
        }
        Variant::ProxSpiderBoost { m, b_hat, eta } => {
            let n = match oracle.mode() {
                OracleMode::FiniteSum { n } => n,
                OracleMode::Expectation { .. } => {
                    return Err(Error::Unsupported(
                        "ProxSpiderBoost requires a finite sum".into(),
                    ))
                }
            };
            let rule = ScheduleRule::Explicit { gamma: 1.0, eta };
            (build_schedule(rule, oracle, m, b_hat)?, m, b_hat, n)
        }
        _ => unreachable!("run_sarah_family dispatched on a non-SARAH variant"),
    };

    let epoch_len = epoch_ref(oracle);
    let sfo_per_outer = b_s as u64 + 2 * m as u64 * b_hat as u64;
    let outer = outer_iterations(cfg.epochs, epoch_len, sfo_per_outer);
    let stride = trace_stride(epoch_len, b_hat);

    let mut snapshot_sampler = match oracle.mode() {
        OracleMode::FiniteSum { n } => {
            BatchSampler::finite(RngStream::new(cfg.seed, STREAM_SNAPSHOT), n)
        }
        OracleMode::Expectation { .. } => BatchSampler::stream(),
    };
    let mut inner_sampler = match oracle.mode() {
        OracleMode::FiniteSum { n } => {
            BatchSampler::finite(RngStream::new(cfg.seed, STREAM_INNER), n)
        }
        // one counter stream serves snapshot and inner draws; counters never
        // repeat, which is exactly i.i.d. sampling for the synthetic oracle
        OracleMode::Expectation { .. } => BatchSampler::stream(),
    };
    let shared_stream = matches!(oracle.mode(), OracleMode::Expectation { .. });

    let mut counters = Counters::new();
    let mut tracer = Tracer::new(oracle, reg, hooks);
    let mut w = initial_point(oracle.dimension(), reg);
    tracer.record(0, &w)?;

    // Candidate iterates {w_t^{(s)} : t = 0..m, s = 1..S} for the randomized
    // output rules; Last needs none of them.
    let mut candidates: Vec<WeightVector> = Vec::new();
    let keep = cfg.output != OutputRule::Last;

    for _ in 0..outer {
        let sampler = if shared_stream { &mut inner_sampler } else { &mut snapshot_sampler };
        let mut state = sarah_snapshot(oracle, &w, b_s, sampler, &mut counters)?;
        if keep {
            candidates.push(w.clone());
        }

        // t = 0: first prox step off the snapshot estimate, then averaging
        let mut z = w.clone();
        z.axpy(-schedule.eta(0), &state.v);
        let hat = prox(reg, &z, schedule.eta(0), &mut counters)?;
        w.mix(schedule.gamma(0), &hat);

        for t in 1..=m {
            if keep {
                candidates.push(w.clone());
            }
            let batch = inner_sampler.draw(b_hat)?;
            sarah_update(&mut state, oracle, &w, &batch, &mut counters);
            let mut z = w.clone();
            z.axpy(-schedule.eta(t), &state.v);
            let hat = prox(reg, &z, schedule.eta(t), &mut counters)?;
            w.mix(schedule.gamma(t), &hat);
            if t % stride == 0 {
                tracer.record(counters.sfo, &w)?;
            }
        }
        tracer.record(counters.sfo, &w)?;
    }

    let selected_w = match cfg.output {
        OutputRule::Last => w.clone(),
        rule => {
            let mut rng = RngStream::new(cfg.seed, STREAM_OUTPUT);
            select_output(&candidates, &schedule.gammas, rule, &mut rng)?
        }
    };

    Ok(RunResult { final_w: w, selected_w, trace: tracer.trace, counters })
}
