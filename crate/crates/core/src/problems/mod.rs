//! Benchmark objectives: nonnegative PCA, sparse binary classification with
//! three nonconvex losses, small synthetic expectation-mode oracles, and toy
//! quadratic sums used by the verification suite.

pub mod binclass;
pub mod losses;
pub mod nnpca;
pub mod synthetic;
pub mod toy;

pub use binclass::{accuracy, BinClassProblem};
pub use losses::LossKind;
pub use nnpca::NnPcaProblem;
pub use synthetic::SyntheticExpectation;

use crate::oracle::ProblemOracle;
use crate::rng::RngStream;
use crate::vector::WeightVector;

/// Empirical check of the average-smoothness bound
/// `(1/n) sum_i ||grad f_i(w) - grad f_i(w')||^2 <= L^2 ||w - w'||^2`.
///
/// Returns the maximum observed ratio of left to right side (without the
/// `L^2` factor) over `trials` random pairs; a valid `L` keeps it at or
/// below `L^2 + 1e-6`.
pub fn empirical_smoothness_check(
    oracle: &dyn ProblemOracle,
    trials: usize,
    rng: &mut RngStream,
) -> f64 {
    let n = oracle.num_components().expect("finite-sum oracle required");
    let d = oracle.dimension();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let w = WeightVector::from_vec((0..d).map(|_| 2.0 * rng.gen_f64() - 1.0).collect());
        let v = WeightVector::from_vec((0..d).map(|_| 2.0 * rng.gen_f64() - 1.0).collect());
        let dist = w.dist_sq(&v);
        if dist == 0.0 {
            continue;
        }
        let mut lhs = 0.0;
        let mut gw = vec![0.0; d];
        for i in 0..n as u64 {
            gw.iter_mut().for_each(|x| *x = 0.0);
            oracle.accumulate_component_gradient(w.values(), i, 1.0, &mut gw);
            oracle.accumulate_component_gradient(v.values(), i, -1.0, &mut gw);
            lhs += gw.iter().map(|x| x * x).sum::<f64>();
        }
        worst = worst.max(lhs / n as f64 / dist);
    }
    worst
}
