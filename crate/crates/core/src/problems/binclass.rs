use crate::data::{Dataset, SparseSample};
use crate::error::{Error, Result};
use crate::oracle::{OracleMode, ProblemOracle};
use crate::problems::losses::{loss_derivative, loss_value, LossKind};
use crate::vector::WeightVector;

/// Sparse binary classification with a nonconvex loss:
/// `f_i(w) = loss(a_i^T w, b_i)`. The l1 penalty is handled by the
/// regularizer, not the smooth part.
#[derive(Debug, Clone)]
pub struct BinClassProblem {
    samples: Vec<SparseSample>,
    dim: usize,
    loss: LossKind,
}

impl BinClassProblem {
    pub fn new(ds: Dataset, loss: LossKind) -> Result<Self> {
        if ds.is_empty() {
            return Err(Error::invalid("classification requires at least one sample"));
        }
        for (i, s) in ds.samples.iter().enumerate() {
            match s.label {
                Some(l) if l == 1.0 || l == -1.0 => {}
                other => {
                    return Err(Error::invalid(format!(
                        "sample {i} has non-canonical label {other:?}; run canonicalize_labels"
                    )))
                }
            }
        }
        Ok(Self { dim: ds.dim, samples: ds.samples, loss })
    }

    pub fn loss(&self) -> LossKind {
        self.loss
    }

    pub fn samples(&self) -> &[SparseSample] {
        &self.samples
    }
}

impl ProblemOracle for BinClassProblem {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn mode(&self) -> OracleMode {
        OracleMode::FiniteSum { n: self.samples.len() }
    }

    fn lipschitz(&self) -> f64 {
        self.loss.lipschitz()
    }

    // grad f_i(w) = loss'(a_i^T w, b_i) * a_i, supported on a_i's support
    fn accumulate_component_gradient(&self, w: &[f64], id: u64, scale: f64, acc: &mut [f64]) {
        let a = &self.samples[id as usize];
        let s = a.dot(w);
        let coeff = loss_derivative(self.loss, s, a.label.unwrap());
        a.axpy_into(scale * coeff, acc);
    }

    fn smooth_objective(&self, w: &[f64]) -> f64 {
        let sum: f64 = self
            .samples
            .iter()
            .map(|a| loss_value(self.loss, a.dot(w), a.label.unwrap()))
            .sum();
        sum / self.samples.len() as f64
    }
}

/// Fraction of samples with `sign(a_i^T w) == b_i`; a zero score predicts +1.
pub fn accuracy(w: &WeightVector, samples: &[SparseSample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let correct = samples
        .iter()
        .filter(|a| {
            let pred = if a.dot(w.values()) >= 0.0 { 1.0 } else { -1.0 };
            pred == a.label.unwrap_or(1.0)
        })
        .count();
    correct as f64 / samples.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth_binclass;
    use crate::oracle::component_gradient;
    use crate::problems::empirical_smoothness_check;
    use crate::rng::RngStream;
    use crate::Counters;

    fn two_layer_problem(n: usize, seed: u64) -> BinClassProblem {
        BinClassProblem::new(synth_binclass(n, 10, seed, 1.0), LossKind::TwoLayer).unwrap()
    }

    #[test]
    fn two_layer_gradient_hand_value() {
        // a = [1], b = 1, w = [0]: gradient = l2'(0, 1) * a = [-0.25]
        let ds = Dataset {
            samples: vec![SparseSample { indices: vec![0], values: vec![1.0], label: Some(1.0) }],
            dim: 1,
            normalized: true,
        };
        let p = BinClassProblem::new(ds, LossKind::TwoLayer).unwrap();
        let g = component_gradient(&p, &WeightVector::zeros(1), 0, &mut Counters::new()).unwrap();
        assert!((g[0] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn objective_at_zero_is_quarter_for_two_layer() {
        let p = two_layer_problem(25, 3);
        let w = WeightVector::zeros(10);
        assert!((p.smooth_objective(w.values()) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn gradient_support_is_sample_support() {
        let p = two_layer_problem(20, 4);
        let mut rng = RngStream::new(41, 0);
        let w = WeightVector::from_vec((0..10).map(|_| rng.gen_normal()).collect());
        for i in 0..20u64 {
            let g = component_gradient(&p, &w, i, &mut Counters::new()).unwrap();
            let support = &p.samples[i as usize].indices;
            for (j, v) in g.values().iter().enumerate() {
                if *v != 0.0 {
                    assert!(support.contains(&(j as u32)));
                }
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let losses = [
            LossKind::L1Sigmoid { omega: 1.0 },
            LossKind::TwoLayer,
            LossKind::LogisticDiff { omega: 1.0 },
        ];
        let mut rng = RngStream::new(43, 0);
        let h = 1e-6;
        for loss in losses {
            let p = BinClassProblem::new(synth_binclass(15, 8, 9, 0.9), loss).unwrap();
            for _ in 0..50 {
                let w = WeightVector::from_vec((0..8).map(|_| rng.gen_normal()).collect());
                let i = rng.gen_index(15);
                let g = component_gradient(&p, &w, i, &mut Counters::new()).unwrap();
                for j in 0..8 {
                    let mut wp = w.clone();
                    wp.values_mut()[j] += h;
                    let mut wm = w.clone();
                    wm.values_mut()[j] -= h;
                    let a = &p.samples[i as usize];
                    let fd = (loss_value(loss, a.dot(wp.values()), a.label.unwrap())
                        - loss_value(loss, a.dot(wm.values()), a.label.unwrap()))
                        / (2.0 * h);
                    let denom = g[j].abs().max(1e-6);
                    assert!((fd - g[j]).abs() / denom < 1e-5, "{loss:?} coord {j}");
                }
            }
        }
    }

    #[test]
    fn accuracy_rules() {
        let p = two_layer_problem(40, 6);
        // w = 0: every score is 0, prediction +1
        let zero = WeightVector::zeros(10);
        let plus = p.samples().iter().filter(|s| s.label == Some(1.0)).count();
        let acc = accuracy(&zero, p.samples());
        assert!((acc - plus as f64 / 40.0).abs() < 1e-15);

        // perfectly separating w on a 2-point toy
        let ds = Dataset {
            samples: vec![
                SparseSample { indices: vec![0], values: vec![1.0], label: Some(1.0) },
                SparseSample { indices: vec![0], values: vec![-1.0], label: Some(-1.0) },
            ],
            dim: 1,
            normalized: true,
        };
        assert_eq!(accuracy(&WeightVector::from_vec(vec![2.0]), &ds.samples), 1.0);

        // sign antisymmetry when no zero scores
        let mut rng = RngStream::new(44, 0);
        let w = WeightVector::from_vec((0..10).map(|_| rng.gen_normal()).collect());
        if p.samples().iter().all(|s| s.dot(w.values()) != 0.0) {
            let mut neg = w.clone();
            neg.scale(-1.0);
            let s = accuracy(&w, p.samples()) + accuracy(&neg, p.samples());
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn smoothness_constants_hold() {
        let cases = [
            (LossKind::L1Sigmoid { omega: 1.0 }, 0.7698 * 0.7698),
            (LossKind::TwoLayer, 0.15405 * 0.15405),
            (LossKind::LogisticDiff { omega: 1.0 }, 0.092372 * 0.092372),
        ];
        for (loss, l_sq) in cases {
            let p = BinClassProblem::new(synth_binclass(30, 6, 13, 1.0), loss).unwrap();
            let ratio = empirical_smoothness_check(&p, 100, &mut RngStream::new(14, 0));
            assert!(ratio <= l_sq + 1e-6, "{loss:?}: ratio = {ratio}, L^2 = {l_sq}");
        }
    }
}
