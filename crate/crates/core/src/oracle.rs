use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::vector::WeightVector;

/// Whether `f` is a finite average of `n` components or an expectation over
/// a random variable synthesized from a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    FiniteSum { n: usize },
    /// Sample ids are draw counters; the oracle synthesizes the realization
    /// deterministically from `(seed, counter)`.
    Expectation { seed: u64 },
}

/// Smooth part `f` of the composite objective `F = f + psi`.
///
/// Implementations are read-only after construction and safe to share across
/// threads; all call accounting lives in a [`Counters`] owned by the caller.
pub trait ProblemOracle: Sync {
    fn dimension(&self) -> usize;

    fn mode(&self) -> OracleMode;

    /// Average-smoothness constant `L` of the components (analytic, supplied
    /// by the problem constructor).
    fn lipschitz(&self) -> f64;

    /// `acc += scale * grad f_id(w)`. The sparse-support problems only touch
    /// the coordinates in the sample's support.
    ///
    /// In `FiniteSum` mode `id` must lie in `[0, n)`; in `Expectation` mode
    /// `id` is a draw counter.
    fn accumulate_component_gradient(&self, w: &[f64], id: u64, scale: f64, acc: &mut [f64]);

    /// Value of the smooth part `f(w)` (the exact mean over components, or
    /// the exact expectation for enumerable synthetic oracles).
    fn smooth_objective(&self, w: &[f64]) -> f64;

    fn num_components(&self) -> Option<usize> {
        match self.mode() {
            OracleMode::FiniteSum { n } => Some(n),
            OracleMode::Expectation { .. } => None,
        }
    }
}

/// `grad f_i(w)` as a dense vector; adds 1 to the `sfo` counter.
pub fn component_gradient(
    oracle: &dyn ProblemOracle,
    w: &WeightVector,
    id: u64,
    counters: &mut Counters,
) -> Result<WeightVector> {
    if let OracleMode::FiniteSum { n } = oracle.mode() {
        if id as usize >= n {
            return Err(Error::invalid(format!("component index {id} out of range (n = {n})")));
        }
    }
    let mut out = vec![0.0; oracle.dimension()];
    oracle.accumulate_component_gradient(w.values(), id, 1.0, &mut out);
    counters.add_sfo(1);
    Ok(WeightVector::from_vec(out))
}

/// Samples per leaf of the reduction tree. The tree shape is a function of
/// `n` alone, so the result is bit-identical however the leaves are scheduled.
const REDUCTION_LEAF: usize = 256;

/// Exact full gradient `(1/n) sum_i grad f_i(w)`; adds `n` to `sfo`.
///
/// Summation follows a fixed-shape pairwise tree over the index range.
pub fn full_gradient(
    oracle: &dyn ProblemOracle,
    w: &WeightVector,
    counters: &mut Counters,
) -> Result<WeightVector> {
    let n = match oracle.mode() {
        OracleMode::FiniteSum { n } => n,
        OracleMode::Expectation { .. } => {
            return Err(Error::Unsupported(
                "full_gradient requires FiniteSum mode; use a snapshot estimator instead".into(),
            ))
        }
    };
    counters.add_sfo(n as u64);
    let mut sum = tree_sum(oracle, w.values(), 0, n);
    let inv = 1.0 / n as f64;
    for v in sum.iter_mut() {
        *v *= inv;
    }
    Ok(WeightVector::from_vec(sum))
}

fn tree_sum(oracle: &dyn ProblemOracle, w: &[f64], lo: usize, hi: usize) -> Vec<f64> {
    if hi - lo <= REDUCTION_LEAF {
        let mut acc = vec![0.0; oracle.dimension()];
        for i in lo..hi {
            oracle.accumulate_component_gradient(w, i as u64, 1.0, &mut acc);
        }
        acc
    } else {
        let mid = lo + (hi - lo) / 2;
        let mut left = tree_sum(oracle, w, lo, mid);
        let right = tree_sum(oracle, w, mid, hi);
        for (a, b) in left.iter_mut().zip(&right) {
            *a += b;
        }
        left
    }
}

/// Full objective `F(w) = f(w) + psi(w)`.
pub fn full_objective(
    oracle: &dyn ProblemOracle,
    reg: &crate::prox::Regularizer,
    w: &WeightVector,
) -> f64 {
    oracle.smooth_objective(w.values()) + crate::prox::objective_term(reg, w)
}
