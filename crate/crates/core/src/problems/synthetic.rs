//! Expectation-mode oracle with a small enumerable latent distribution.
//!
//! The random variable takes at most 8 equally likely outcomes, each a
//! diagonal quadratic sharing one curvature vector. Shared curvature keeps
//! the gradient variance independent of `w`, so the variance bound of the
//! bounded-variance assumption is exact, and all expectation-mode estimator
//! identities can be verified by enumerating outcomes.

use crate::error::{Error, Result};
use crate::oracle::{OracleMode, ProblemOracle};
use crate::problems::toy::QuadComponent;
use crate::rng::RngStream;

pub const MAX_OUTCOMES: usize = 8;

#[derive(Debug, Clone)]
pub struct SyntheticExpectation {
    outcomes: Vec<QuadComponent>,
    dim: usize,
    seed: u64,
    lipschitz: f64,
    sigma_sq: f64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

impl SyntheticExpectation {
    /// Builds an oracle whose outcomes share `curvature` and differ in their
    /// linear terms.
    pub fn new(curvature: Vec<f64>, linears: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let k = linears.len();
        if k == 0 || k > MAX_OUTCOMES {
            return Err(Error::invalid(format!(
                "outcome count must be in [1, {MAX_OUTCOMES}], got {k}"
            )));
        }
        let dim = curvature.len();
        if linears.iter().any(|l| l.len() != dim) {
            return Err(Error::invalid("linear terms must match the curvature dimension"));
        }
        // sigma^2 = (1/k) sum_k ||b_k - b_mean||^2, independent of w
        let mut mean = vec![0.0; dim];
        for l in &linears {
            for (m, v) in mean.iter_mut().zip(l) {
                *m += v / k as f64;
            }
        }
        let sigma_sq = linears
            .iter()
            .map(|l| l.iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .sum::<f64>()
            / k as f64;
        let lipschitz = curvature
            .iter()
            .fold(0.0_f64, |acc, &c| acc.max(c.abs()))
            .max(f64::MIN_POSITIVE);
        let outcomes = linears
            .into_iter()
            .map(|linear| QuadComponent { curvature: curvature.clone(), linear })
            .collect();
        Ok(Self { outcomes, dim, seed, lipschitz, sigma_sq })
    }

    pub fn random(k: usize, d: usize, seed: u64) -> Result<Self> {
        let mut rng = RngStream::new(seed, 0x5_301);
        let curvature: Vec<f64> = (0..d).map(|_| 0.5 + rng.gen_f64()).collect();
        let linears = (0..k)
            .map(|_| (0..d).map(|_| 2.0 * rng.gen_f64() - 1.0).collect())
            .collect();
        Self::new(curvature, linears, seed)
    }

    /// Exact variance bound of the component gradients (Assumption-style
    /// `E||grad f(w; xi) - grad f(w)||^2 <= sigma^2`, tight here).
    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn outcomes(&self) -> &[QuadComponent] {
        &self.outcomes
    }

    /// Latent outcome drawn by the given counter.
    pub fn outcome_index(&self, counter: u64) -> usize {
        (splitmix64(self.seed ^ counter.wrapping_mul(0x2545F4914F6CDD1D)) % self.outcomes.len() as u64)
            as usize
    }

    /// Enumerated `E||grad f(w; xi) - grad f(w)||^2` at `w`.
    pub fn enumerated_variance(&self, w: &[f64]) -> f64 {
        let k = self.outcomes.len();
        let mut mean = vec![0.0; self.dim];
        for c in &self.outcomes {
            c.gradient_into(w, 1.0 / k as f64, &mut mean);
        }
        let mut var = 0.0;
        for c in &self.outcomes {
            let mut g = vec![0.0; self.dim];
            c.gradient_into(w, 1.0, &mut g);
            var += g.iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
        var / k as f64
    }
}

impl ProblemOracle for SyntheticExpectation {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn mode(&self) -> OracleMode {
        OracleMode::Expectation { seed: self.seed }
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn accumulate_component_gradient(&self, w: &[f64], id: u64, scale: f64, acc: &mut [f64]) {
        let k = self.outcome_index(id);
        self.outcomes[k].gradient_into(w, scale, acc);
    }

    /// Exact expectation over the uniform latent distribution.
    fn smooth_objective(&self, w: &[f64]) -> f64 {
        self.outcomes.iter().map(|c| c.value(w)).sum::<f64>() / self.outcomes.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_bound_is_tight_and_w_independent() {
        let p = SyntheticExpectation::random(5, 4, 77).unwrap();
        let probes = [
            vec![0.0; 4],
            vec![1.0, -2.0, 0.5, 3.0],
            vec![-10.0, 4.0, 0.0, 1.0],
        ];
        for w in &probes {
            let v = p.enumerated_variance(w);
            assert!((v - p.sigma_sq()).abs() < 1e-12);
        }
    }

    #[test]
    fn outcome_draws_are_deterministic_and_cover() {
        let p = SyntheticExpectation::random(4, 2, 9).unwrap();
        let seen: std::collections::HashSet<usize> =
            (0..200).map(|c| p.outcome_index(c)).collect();
        assert_eq!(seen.len(), 4);
        let a: Vec<usize> = (0..50).map(|c| p.outcome_index(c)).collect();
        let b: Vec<usize> = (0..50).map(|c| p.outcome_index(c)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_too_many_outcomes() {
        assert!(SyntheticExpectation::random(9, 2, 1).is_err());
    }
}
