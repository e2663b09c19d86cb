use crate::error::{Error, Result};
use crate::prox::{prox_uncounted, Regularizer};
use crate::vector::WeightVector;

/// Gradient mapping `G_eta(w) = (w - prox_{eta psi}(w - eta * grad)) / eta`.
///
/// With `psi == 0` this reduces to `grad`; `G_eta(w*) = 0` characterizes
/// stationarity of the composite problem. Does not touch prox counters:
/// this is an observation, not a solver step.
pub fn gradient_mapping(
    w: &WeightVector,
    grad: &WeightVector,
    eta: f64,
    reg: &Regularizer,
) -> Result<WeightVector> {
    if eta <= 0.0 {
        return Err(Error::invalid(format!("gradient mapping requires eta > 0, got {eta}")));
    }
    let mut step = w.clone();
    step.axpy(-eta, grad);
    let proxed = prox_uncounted(reg, &step, eta);
    let mut out = w.sub(&proxed);
    out.scale(1.0 / eta);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_reg_returns_gradient() {
        let w = WeightVector::from_vec(vec![0.3, -0.7]);
        let g = WeightVector::from_vec(vec![1.0, 2.0]);
        let gm = gradient_mapping(&w, &g, 0.5, &Regularizer::Zero).unwrap();
        for (a, b) in gm.values().iter().zip(g.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn l1_soft_threshold_example() {
        // w=[1], grad=[0], eta=1, psi = 0.5*|.|_1 -> (1 - 0.5)/1 = 0.5.
        let w = WeightVector::from_vec(vec![1.0]);
        let g = WeightVector::zeros(1);
        let gm = gradient_mapping(&w, &g, 1.0, &Regularizer::L1 { lambda: 0.5 }).unwrap();
        assert!((gm[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn stationary_point_maps_to_zero() {
        // For psi = indicator of the nonneg unit ball, w on the boundary with
        // gradient pointing outward along w is a fixed point of the prox step.
        let w = WeightVector::from_vec(vec![0.6, 0.8]);
        let mut g = w.clone();
        g.scale(-1.0); // -w: step moves radially outward, projection returns w
        let gm = gradient_mapping(&w, &g, 0.5, &Regularizer::nonneg_unit_ball()).unwrap();
        assert!(gm.norm_sq() < 1e-24);
    }

    #[test]
    fn invalid_eta() {
        let w = WeightVector::zeros(1);
        assert!(gradient_mapping(&w, &w, 0.0, &Regularizer::Zero).is_err());
        assert!(gradient_mapping(&w, &w, -1.0, &Regularizer::Zero).is_err());
    }

    #[test]
    fn fixed_point_iff_zero_mapping() {
        // Interior stationary point of a quadratic with L1: w = 0 with
        // |grad| <= lambda is a prox fixed point.
        let w = WeightVector::from_vec(vec![0.0, 0.0]);
        let g = WeightVector::from_vec(vec![0.3, -0.2]);
        let gm = gradient_mapping(&w, &g, 1.0, &Regularizer::L1 { lambda: 0.5 }).unwrap();
        assert_eq!(gm.norm_sq(), 0.0);
        // And a non-stationary point maps to something nonzero.
        let g2 = WeightVector::from_vec(vec![0.9, 0.0]);
        let gm2 = gradient_mapping(&w, &g2, 1.0, &Regularizer::L1 { lambda: 0.5 }).unwrap();
        assert!(gm2.norm_sq() > 0.0);
    }
}
