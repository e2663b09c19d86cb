//! Evaluation quantities recorded along a solver run: objective, relative
//! residual against a reference optimum, squared gradient-mapping norm at a
//! shared reference step, and optional train/test accuracy.
//!
//! All metric evaluation is out-of-band: it never touches solver counters or
//! RNG streams.

use crate::counters::Counters;
use crate::error::Result;
use crate::mapping::gradient_mapping;
use crate::oracle::{full_gradient, OracleMode, ProblemOracle};
use crate::prox::Regularizer;
use crate::vector::WeightVector;

/// Reference proximal step shared by every solver when reporting
/// `||G_eta(w)||^2`, so the metric is comparable across methods.
pub const ETA_REF: f64 = 0.5;

/// Validation-batch size used to approximate the full gradient when the
/// oracle is an expectation (no finite sum to average over).
pub const EXPECTATION_VALIDATION_BATCH: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub epoch_fraction: f64,
    pub objective: f64,
    pub rel_residual: f64,
    pub grad_map_norm_sq: f64,
    pub train_acc: Option<f64>,
    pub test_acc: Option<f64>,
    pub wall_ms: u64,
}

/// Trace of metric rows with strictly increasing `epoch_fraction`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    pub eta_ref: f64,
    pub f_star: f64,
    /// Set when `f_star == 0` forced the residual into absolute mode.
    pub absolute_residual: bool,
}

impl RunTrace {
    pub fn new(f_star: f64) -> Self {
        Self {
            rows: Vec::new(),
            eta_ref: ETA_REF,
            f_star,
            absolute_residual: f_star == 0.0,
        }
    }

    /// Appends a row; rows that do not advance `epoch_fraction` are dropped
    /// (stride points and outer boundaries can coincide).
    pub fn push(&mut self, row: TraceRow) {
        debug_assert!(row.grad_map_norm_sq >= 0.0);
        if let Some(last) = self.rows.last() {
            if row.epoch_fraction <= last.epoch_fraction {
                return;
            }
        }
        self.rows.push(row);
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Re-bases every row's residual on a reference optimum established
    /// after the run (the running minimum across a comparison session).
    pub fn apply_f_star(&mut self, f_star: f64) {
        self.f_star = f_star;
        self.absolute_residual = f_star == 0.0;
        for row in &mut self.rows {
            row.rel_residual = rel_residual(row.objective, f_star).0;
        }
    }
}

/// `(F_w - F_star)/|F_star|`, or the absolute residual `F_w - F_star` when
/// the reference is zero. The flag reports which mode applied.
pub fn rel_residual(f_w: f64, f_star: f64) -> (f64, bool) {
    if f_star == 0.0 {
        (f_w, true)
    } else {
        ((f_w - f_star) / f_star.abs(), false)
    }
}

/// `||G_{eta_ref}(w)||^2` using the true full gradient (finite-sum mode) or
/// a fixed validation batch (expectation mode). Scratch counters only.
pub fn grad_mapping_norm_sq(
    oracle: &dyn ProblemOracle,
    reg: &Regularizer,
    w: &WeightVector,
    eta_ref: f64,
) -> Result<f64> {
    let mut scratch = Counters::new();
    let grad = match oracle.mode() {
        OracleMode::FiniteSum { .. } => full_gradient(oracle, w, &mut scratch)?,
        OracleMode::Expectation { .. } => {
            log::debug!(
                "expectation-mode gradient mapping over a fixed validation batch of {} draws",
                EXPECTATION_VALIDATION_BATCH
            );
            let mut acc = vec![0.0; oracle.dimension()];
            let scale = 1.0 / EXPECTATION_VALIDATION_BATCH as f64;
            for id in 0..EXPECTATION_VALIDATION_BATCH {
                oracle.accumulate_component_gradient(w.values(), id, scale, &mut acc);
            }
            WeightVector::from_vec(acc)
        }
    };
    let g = gradient_mapping(w, &grad, eta_ref, reg)?;
    Ok(g.norm_sq())
}
