//! Small dense quadratic-sum oracles used by unit tests and the runtime
//! verification suite. Component gradients are affine in `w`, which makes
//! every estimator identity exactly checkable by enumeration.

use crate::oracle::{OracleMode, ProblemOracle};
use crate::rng::RngStream;

/// `f_k(w) = (1/2) sum_j a_{kj} w_j^2 + b_k^T w` with diagonal curvature.
#[derive(Debug, Clone)]
pub struct QuadComponent {
    pub curvature: Vec<f64>,
    pub linear: Vec<f64>,
}

impl QuadComponent {
    pub fn gradient_into(&self, w: &[f64], scale: f64, acc: &mut [f64]) {
        for j in 0..w.len() {
            acc[j] += scale * (self.curvature[j] * w[j] + self.linear[j]);
        }
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        w.iter()
            .enumerate()
            .map(|(j, &x)| 0.5 * self.curvature[j] * x * x + self.linear[j] * x)
            .sum()
    }
}

/// Finite sum of diagonal quadratics.
#[derive(Debug, Clone)]
pub struct QuadSumOracle {
    components: Vec<QuadComponent>,
    dim: usize,
    lipschitz: f64,
}

fn average_smoothness(components: &[QuadComponent], dim: usize) -> f64 {
    // (1/n) sum_i ||dg_i||^2 = sum_j ((1/n) sum_i a_ij^2) dw_j^2, so the
    // tight constant is the max over coordinates of the mean squared
    // curvature.
    let n = components.len() as f64;
    let mut worst: f64 = 0.0;
    for j in 0..dim {
        let mean: f64 = components.iter().map(|c| c.curvature[j] * c.curvature[j]).sum::<f64>() / n;
        worst = worst.max(mean);
    }
    worst.sqrt().max(f64::MIN_POSITIVE)
}

impl QuadSumOracle {
    pub fn new(components: Vec<QuadComponent>) -> Self {
        assert!(!components.is_empty());
        let dim = components[0].curvature.len();
        let lipschitz = average_smoothness(&components, dim);
        Self { components, dim, lipschitz }
    }

    /// Random curvatures in [0, 1.5) and normal-ish linear terms.
    pub fn random(n: usize, d: usize, rng: &mut RngStream) -> Self {
        let components = (0..n)
            .map(|_| QuadComponent {
                curvature: (0..d).map(|_| 1.5 * rng.gen_f64()).collect(),
                linear: (0..d).map(|_| 2.0 * rng.gen_f64() - 1.0).collect(),
            })
            .collect();
        Self::new(components)
    }

    /// Components with constant gradients (zero curvature).
    pub fn from_linear(grads: Vec<Vec<f64>>) -> Self {
        let d = grads[0].len();
        let components = grads
            .into_iter()
            .map(|g| QuadComponent { curvature: vec![0.0; d], linear: g })
            .collect();
        Self::new(components)
    }

    /// `f_1(w) = w^2/2`, `f_2(w) = w` in one dimension.
    pub fn scalar_quadratic_and_linear() -> Self {
        Self::new(vec![
            QuadComponent { curvature: vec![1.0], linear: vec![0.0] },
            QuadComponent { curvature: vec![0.0], linear: vec![1.0] },
        ])
    }

    /// `n` identical copies of `f(w) = ||w||^2 / 2`, so every estimator is
    /// exact and the solver trajectory equals deterministic gradient descent.
    pub fn replicated_quadratic(n: usize, d: usize) -> Self {
        Self::new(
            (0..n)
                .map(|_| QuadComponent { curvature: vec![1.0; d], linear: vec![0.0; d] })
                .collect(),
        )
    }

    pub fn components(&self) -> &[QuadComponent] {
        &self.components
    }
}

impl ProblemOracle for QuadSumOracle {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn mode(&self) -> OracleMode {
        OracleMode::FiniteSum { n: self.components.len() }
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn accumulate_component_gradient(&self, w: &[f64], id: u64, scale: f64, acc: &mut [f64]) {
        self.components[id as usize].gradient_into(w, scale, acc);
    }

    fn smooth_objective(&self, w: &[f64]) -> f64 {
        self.components.iter().map(|c| c.value(w)).sum::<f64>() / self.components.len() as f64
    }
}
