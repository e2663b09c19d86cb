//! The three nonconvex scalar losses for binary classification, with
//! analytic derivatives and their smoothness constants.

/// Loss family applied to the margin `s = a^T w` with label `tau in {-1, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    /// Normalized sigmoid loss `1 - tanh(omega * tau * s)`.
    L1Sigmoid { omega: f64 },
    /// Two-layer network loss `(1 - sigmoid(tau * s))^2`.
    TwoLayer,
    /// Logistic difference loss
    /// `ln(1 + exp(-tau s)) - ln(1 + exp(-tau s - omega))`.
    LogisticDiff { omega: f64 },
}

impl LossKind {
    /// Smoothness constant of the loss in `s` for unit-norm rows.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            // max_x 2 tanh(x) sech^2(x) = 4 / (3 sqrt(3)), times omega^2
            LossKind::L1Sigmoid { omega } => 4.0 / (3.0 * 3.0_f64.sqrt()) * omega * omega,
            LossKind::TwoLayer => 0.15405,
            LossKind::LogisticDiff { .. } => 0.092372,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossKind::L1Sigmoid { .. } => "l1",
            LossKind::TwoLayer => "l2",
            LossKind::LogisticDiff { .. } => "l3",
        }
    }
}

/// Numerically stable `1 / (1 + exp(-x))`.
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable `ln(1 + exp(-x))`.
fn log1p_exp_neg(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

/// Loss value at margin `s` for label `tau`. Overflow-free for `|s| <= 1e4`.
pub fn loss_value(kind: LossKind, s: f64, tau: f64) -> f64 {
    debug_assert!(tau == 1.0 || tau == -1.0);
    match kind {
        LossKind::L1Sigmoid { omega } => 1.0 - (omega * tau * s).tanh(),
        LossKind::TwoLayer => {
            let q = sigmoid(-tau * s);
            q * q
        }
        LossKind::LogisticDiff { omega } => log1p_exp_neg(tau * s) - log1p_exp_neg(tau * s + omega),
    }
}

/// Analytic derivative of the loss with respect to `s`.
pub fn loss_derivative(kind: LossKind, s: f64, tau: f64) -> f64 {
    debug_assert!(tau == 1.0 || tau == -1.0);
    match kind {
        LossKind::L1Sigmoid { omega } => {
            let t = (omega * tau * s).tanh();
            -omega * tau * (1.0 - t * t)
        }
        LossKind::TwoLayer => {
            let q = sigmoid(-tau * s);
            -2.0 * tau * q * q * sigmoid(tau * s)
        }
        LossKind::LogisticDiff { omega } => -tau * sigmoid(-tau * s) + tau * sigmoid(-tau * s - omega),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    const KINDS: [LossKind; 3] = [
        LossKind::L1Sigmoid { omega: 1.0 },
        LossKind::TwoLayer,
        LossKind::LogisticDiff { omega: 1.0 },
    ];

    #[test]
    fn anchor_values() {
        assert_eq!(loss_value(LossKind::L1Sigmoid { omega: 1.0 }, 0.0, 1.0), 1.0);
        assert!((loss_value(LossKind::TwoLayer, 0.0, 1.0) - 0.25).abs() < 1e-15);
        let expect = 2.0_f64.ln() - (1.0 + (-1.0_f64).exp()).ln();
        let got = loss_value(LossKind::LogisticDiff { omega: 1.0 }, 0.0, 1.0);
        assert!((got - expect).abs() < 1e-15);
        assert!((got - 0.379885).abs() < 1e-6);
    }

    #[test]
    fn two_layer_derivative_at_zero() {
        assert!((loss_derivative(LossKind::TwoLayer, 0.0, 1.0) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // h balances truncation against cancellation roundoff: with
        // f = O(1) the difference quotient carries ~5e-11 absolute noise
        let h = 1e-5;
        let mut rng = RngStream::new(21, 0);
        for kind in KINDS {
            for _ in 0..1000 {
                let s = 20.0 * (rng.gen_f64() - 0.5);
                let tau = if rng.gen_f64() < 0.5 { 1.0 } else { -1.0 };
                let fd = (loss_value(kind, s + h, tau) - loss_value(kind, s - h, tau)) / (2.0 * h);
                let an = loss_derivative(kind, s, tau);
                // the absolute floor covers central-difference roundoff
                // (~1e-10 with f = O(1), h = 1e-6) on near-zero derivatives
                let denom = an.abs().max(1e-4);
                assert!(
                    (fd - an).abs() / denom < 1e-6,
                    "{kind:?} s={s}: fd={fd} analytic={an}"
                );
            }
        }
    }

    #[test]
    fn second_derivative_grid_below_lipschitz() {
        // |l''(s, tau)| sampled by central differences of l' over a grid
        // never exceeds the declared smoothness constant (+1e-3).
        let h = 1e-5;
        for kind in KINDS {
            let bound = kind.lipschitz() + 1e-3;
            for tau in [1.0, -1.0] {
                let mut s = -20.0;
                while s <= 20.0 {
                    let dd = (loss_derivative(kind, s + h, tau)
                        - loss_derivative(kind, s - h, tau))
                        / (2.0 * h);
                    assert!(dd.abs() <= bound, "{kind:?} tau={tau} s={s}: |l''|={}", dd.abs());
                    s += 0.01;
                }
            }
        }
    }

    #[test]
    fn no_overflow_at_large_margins() {
        for kind in KINDS {
            for s in [1e4, -1e4] {
                for tau in [1.0, -1.0] {
                    assert!(loss_value(kind, s, tau).is_finite());
                    assert!(loss_derivative(kind, s, tau).is_finite());
                }
            }
        }
    }
}
