use crate::data::{Dataset, SparseSample};
use crate::error::{Error, Result};
use crate::oracle::{OracleMode, ProblemOracle};

/// Nonnegative PCA: minimize `-(1/2n) sum_i (z_i^T w)^2` over the
/// nonnegative unit ball. Rows are unit-normalized, so each component is
/// 1-smooth.
#[derive(Debug, Clone)]
pub struct NnPcaProblem {
    samples: Vec<SparseSample>,
    dim: usize,
}

impl NnPcaProblem {
    pub fn new(ds: Dataset) -> Result<Self> {
        if !ds.normalized {
            return Err(Error::invalid("NN-PCA requires unit-normalized rows"));
        }
        if ds.is_empty() {
            return Err(Error::invalid("NN-PCA requires at least one sample"));
        }
        Ok(Self { dim: ds.dim, samples: ds.samples })
    }

    pub fn samples(&self) -> &[SparseSample] {
        &self.samples
    }
}

impl ProblemOracle for NnPcaProblem {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn mode(&self) -> OracleMode {
        OracleMode::FiniteSum { n: self.samples.len() }
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }

    // grad f_i(w) = -(z_i^T w) z_i
    fn accumulate_component_gradient(&self, w: &[f64], id: u64, scale: f64, acc: &mut [f64]) {
        let z = &self.samples[id as usize];
        let proj = z.dot(w);
        z.axpy_into(-scale * proj, acc);
    }

    fn smooth_objective(&self, w: &[f64]) -> f64 {
        let sum: f64 = self
            .samples
            .iter()
            .map(|z| {
                let p = z.dot(w);
                p * p
            })
            .sum();
        -0.5 * sum / self.samples.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth_nnpca;
    use crate::oracle::{component_gradient, full_gradient};
    use crate::problems::empirical_smoothness_check;
    use crate::rng::RngStream;
    use crate::vector::WeightVector;
    use crate::Counters;

    fn single_sample(indices: Vec<u32>, values: Vec<f64>, dim: usize) -> NnPcaProblem {
        NnPcaProblem {
            samples: vec![SparseSample { indices, values, label: None }],
            dim,
        }
    }

    #[test]
    fn gradient_examples() {
        // z = [1, 0], w = [1, 0] -> grad = [-1, 0]
        let p = single_sample(vec![0], vec![1.0], 2);
        let w = WeightVector::from_vec(vec![1.0, 0.0]);
        let mut c = Counters::new();
        let g = component_gradient(&p, &w, 0, &mut c).unwrap();
        assert_eq!(g.values(), &[-1.0, 0.0]);

        // any z, w = 0 -> zero gradient
        let g0 = component_gradient(&p, &WeightVector::zeros(2), 0, &mut c).unwrap();
        assert_eq!(g0.values(), &[0.0, 0.0]);
    }

    #[test]
    fn objective_and_gradient_hand_values() {
        // z = [1, 0], w = [0.6, 0.8]: f = -0.18, grad = [-0.6, 0]
        let p = single_sample(vec![0], vec![1.0], 2);
        let w = WeightVector::from_vec(vec![0.6, 0.8]);
        assert!((p.smooth_objective(w.values()) + 0.18).abs() < 1e-15);
        let g = component_gradient(&p, &w, 0, &mut Counters::new()).unwrap();
        assert!((g[0] + 0.6).abs() < 1e-15);
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn identical_rows_full_gradient() {
        // all z_i equal z with ||z|| = 1, w = z -> full gradient = -z
        let z = SparseSample { indices: vec![0, 1], values: vec![0.6, 0.8], label: None };
        let p = NnPcaProblem { samples: vec![z.clone(), z.clone(), z], dim: 2 };
        let w = WeightVector::from_vec(vec![0.6, 0.8]);
        let g = full_gradient(&p, &w, &mut Counters::new()).unwrap();
        assert!((g[0] + 0.6).abs() < 1e-15);
        assert!((g[1] + 0.8).abs() < 1e-15);
    }

    #[test]
    fn objective_lower_bound_on_feasible_set() {
        let p = NnPcaProblem::new(synth_nnpca(40, 8, 3)).unwrap();
        let mut rng = RngStream::new(31, 0);
        for _ in 0..200 {
            let mut w: Vec<f64> = (0..8).map(|_| rng.gen_f64()).collect();
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1.0 {
                w.iter_mut().for_each(|v| *v /= norm);
            }
            assert!(p.smooth_objective(&w) >= -0.5 - 1e-12);
        }
    }

    #[test]
    fn permutation_invariance_and_linearity() {
        let ds = synth_nnpca(10, 6, 5);
        let mut rev = ds.clone();
        rev.samples.reverse();
        let a = NnPcaProblem::new(ds).unwrap();
        let b = NnPcaProblem::new(rev).unwrap();
        let w = WeightVector::from_vec(vec![0.1, -0.2, 0.3, 0.0, 0.5, -0.4]);
        assert!((a.smooth_objective(w.values()) - b.smooth_objective(w.values())).abs() < 1e-15);

        // gradient is linear in w
        let g1 = full_gradient(&a, &w, &mut Counters::new()).unwrap();
        let mut w2 = w.clone();
        w2.scale(3.0);
        let g2 = full_gradient(&a, &w2, &mut Counters::new()).unwrap();
        for (x, y) in g1.values().iter().zip(g2.values()) {
            assert!((3.0 * x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn smoothness_ratio_at_most_one() {
        let p = NnPcaProblem::new(synth_nnpca(30, 8, 11)).unwrap();
        let ratio = empirical_smoothness_check(&p, 100, &mut RngStream::new(12, 0));
        assert!(ratio <= 1.0 + 1e-6, "ratio = {ratio}");
    }
}
