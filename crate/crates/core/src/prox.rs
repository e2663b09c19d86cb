use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::vector::WeightVector;

/// Regularizers `psi` supported by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    /// `psi == 0`; the proximal step degenerates to the identity.
    Zero,
    /// `psi(w) = lambda * ||w||_1`.
    L1 { lambda: f64 },
    /// Indicator of `{w : ||w|| <= radius, w >= 0}`.
    ///
    /// The exact Euclidean projection onto this set clips negative entries
    /// to zero first and then scales radially onto the ball: clipping is the
    /// projection onto the orthant, and for a nonnegative vector radial
    /// scaling stays inside the orthant, so the composition solves the
    /// projection onto the intersection.
    NonnegBall { radius: f64 },
}

impl Regularizer {
    pub fn nonneg_unit_ball() -> Self {
        Regularizer::NonnegBall { radius: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Regularizer::Zero => Ok(()),
            Regularizer::L1 { lambda } if lambda >= 0.0 => Ok(()),
            Regularizer::L1 { lambda } => {
                Err(Error::invalid(format!("L1 lambda must be >= 0, got {lambda}")))
            }
            Regularizer::NonnegBall { radius } if radius > 0.0 => Ok(()),
            Regularizer::NonnegBall { radius } => {
                Err(Error::invalid(format!("ball radius must be > 0, got {radius}")))
            }
        }
    }
}

/// `prox_{t psi}(w)`, exact per regularizer kind. Increments `prox_calls`.
///
/// For `L1` the effective soft threshold is `t * lambda`; for indicator
/// regularizers `t` does not change the projection.
pub fn prox(
    reg: &Regularizer,
    w: &WeightVector,
    t: f64,
    counters: &mut Counters,
) -> Result<WeightVector> {
    if t < 0.0 {
        return Err(Error::invalid(format!("prox scaling t must be >= 0, got {t}")));
    }
    counters.add_prox(1);
    Ok(prox_uncounted(reg, w, t))
}

/// Projection/shrinkage without counter bookkeeping; used by metrics.
pub fn prox_uncounted(reg: &Regularizer, w: &WeightVector, t: f64) -> WeightVector {
    match *reg {
        Regularizer::Zero => w.clone(),
        Regularizer::L1 { lambda } => {
            let thr = t * lambda;
            WeightVector::from_vec(w.values().iter().map(|&v| soft_threshold(v, thr)).collect())
        }
        Regularizer::NonnegBall { radius } => {
            let mut out: Vec<f64> = w.values().iter().map(|&v| v.max(0.0)).collect();
            let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > radius {
                let s = radius / norm;
                for v in &mut out {
                    *v *= s;
                }
            }
            WeightVector::from_vec(out)
        }
    }
}

fn soft_threshold(v: f64, thr: f64) -> f64 {
    if v > thr {
        v - thr
    } else if v < -thr {
        v + thr
    } else {
        0.0
    }
}

/// Feasibility slack for indicator regularizers.
const FEASIBILITY_TOL: f64 = 1e-9;

/// The value `psi(w)` contributed to `F(w) = f(w) + psi(w)`.
///
/// Infeasible points under an indicator regularizer return `f64::INFINITY`
/// as a distinguished sentinel; the solvers never produce it by arithmetic.
pub fn objective_term(reg: &Regularizer, w: &WeightVector) -> f64 {
    match *reg {
        Regularizer::Zero => 0.0,
        Regularizer::L1 { lambda } => lambda * w.values().iter().map(|v| v.abs()).sum::<f64>(),
        Regularizer::NonnegBall { radius } => {
            let nonneg = w.values().iter().all(|&v| v >= -FEASIBILITY_TOL);
            if nonneg && w.norm() <= radius + FEASIBILITY_TOL {
                0.0
            } else {
                f64::INFINITY
            }
        }
    }
}
