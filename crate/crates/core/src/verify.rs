//! Runtime verification suite: re-derives the estimator identities and
//! step-size recursions by brute-force enumeration at small scale and
//! reports a pass/fail table with max residuals.
//!
//! Each check is exact (enumeration vs closed form), so tolerances are tight
//! float-roundoff budgets, not statistical ones.

use crate::counters::Counters;
use crate::error::Result;
use crate::estimators::{binomial, brute_force_variance, for_each_subset};
use crate::oracle::{full_gradient, ProblemOracle};
use crate::problems::synthetic::SyntheticExpectation;
use crate::problems::toy::QuadSumOracle;
use crate::prox::{prox_uncounted, Regularizer};
use crate::rng::RngStream;
use crate::stepsize::{
    adaptive_composite_raw, adaptive_sigma_bound, constant_composite, lemma4_constant,
    lemma4_recursion, lemma4_residuals, lemma4_sigma_bound, noncomposite_sigma_bound,
    adaptive_noncomposite, tradeoff_config, BracketForm, ScheduleMode,
};
use crate::vector::WeightVector;

#[derive(Debug, Clone)]
pub struct CheckResult {
    /// Human-readable key, e.g. "Eq. (11) mini-batch variance enumeration".
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Inputs to report when the check fails.
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, residual: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            detail,
        }
    }
}

/// Test hooks for mutation sanity: nonzero perturbations must make the
/// corresponding checks fail.
#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Relative perturbation applied to the variance factor `omega` before
    /// evaluating the constant step-size formulas.
    pub perturb_omega: f64,
}

fn toy(n: usize, d: usize, seed: u64) -> QuadSumOracle {
    QuadSumOracle::random(n, d, &mut RngStream::new(seed, 0))
}

fn grad(oracle: &dyn ProblemOracle, w: &WeightVector) -> WeightVector {
    full_gradient(oracle, w, &mut Counters::new()).unwrap()
}

fn component(oracle: &dyn ProblemOracle, w: &WeightVector, i: u64) -> Vec<f64> {
    let mut g = vec![0.0; oracle.dimension()];
    oracle.accumulate_component_gradient(w.values(), i, 1.0, &mut g);
    g
}

/// Eq. (9): the batch mean of the SARAH update over all subsets equals
/// `v_{t-1} + grad f(w_t) - grad f(w_{t-1})`.
fn check_bias_identity() -> CheckResult {
    let n = 5;
    let oracle = toy(n, 3, 101);
    let w_prev = WeightVector::from_vec(vec![0.4, -0.7, 0.2]);
    let w_t = WeightVector::from_vec(vec![-0.1, 0.3, 0.8]);
    let v_prev = WeightVector::from_vec(vec![0.5, 0.1, -0.2]);
    let mut worst: f64 = 0.0;
    for b in 1..=n {
        let mut mean = vec![0.0; 3];
        for_each_subset(n, b, |ids| {
            for &i in ids {
                let gt = component(&oracle, &w_t, i);
                let gp = component(&oracle, &w_prev, i);
                for j in 0..3 {
                    mean[j] += (gt[j] - gp[j]) / b as f64;
                }
            }
        });
        let count = binomial(n, b) as f64;
        let gt = grad(&oracle, &w_t);
        let gp = grad(&oracle, &w_prev);
        for j in 0..3 {
            let expected = v_prev[j] + gt[j] - gp[j];
            let got = v_prev[j] + mean[j] / count;
            worst = worst.max((expected - got).abs());
        }
    }
    CheckResult::new(
        "Eq. (9) SARAH bias identity (subset enumeration, n=5)",
        worst,
        1e-12,
        format!("n={n}, all batch sizes"),
    )
}

/// Eq. (10): the telescoped variance identity over fully enumerated batch
/// paths of an actual ProxSARAH inner loop (n=4, b=1, m=2).
fn check_telescoping_identity() -> CheckResult {
    let n = 4usize;
    let m = 2usize;
    let d = 2usize;
    let oracle = toy(n, d, 102);
    let reg = Regularizer::L1 { lambda: 0.05 };
    let (gamma, eta) = (0.5, 0.3);
    let w0 = WeightVector::from_vec(vec![0.6, -0.4]);
    let v0 = grad(&oracle, &w0); // exact snapshot: v0 - grad f(w0) = 0

    // accumulate E||v_t - grad f(w_t)||^2, E||v_j - v_{j-1}||^2 and
    // E||grad f(w_j) - grad f(w_{j-1})||^2 over all n^m equally likely paths
    let paths = n.pow(m as u32);
    let mut err_sq = vec![0.0; m + 1];
    let mut vdiff_sq = vec![0.0; m + 1];
    let mut gdiff_sq = vec![0.0; m + 1];
    for path in 0..paths {
        let mut w_prev = w0.clone();
        let mut v = v0.clone();
        // first prox-averaging step off the snapshot
        let mut z = w_prev.clone();
        z.axpy(-eta, &v);
        let hat = prox_uncounted(&reg, &z, eta);
        let mut w = w_prev.clone();
        w.mix(gamma, &hat);

        let mut code = path;
        for t in 1..=m {
            let i = (code % n) as u64;
            code /= n;
            let gt = component(&oracle, &w, i);
            let gp = component(&oracle, &w_prev, i);
            let v_old = v.clone();
            for j in 0..d {
                v.values_mut()[j] += gt[j] - gp[j];
            }
            vdiff_sq[t] += v.dist_sq(&v_old) / paths as f64;
            gdiff_sq[t] += grad(&oracle, &w).dist_sq(&grad(&oracle, &w_prev)) / paths as f64;
            err_sq[t] += v.dist_sq(&grad(&oracle, &w)) / paths as f64;

            w_prev = w.clone();
            let mut z = w.clone();
            z.axpy(-eta, &v);
            let hat = prox_uncounted(&reg, &z, eta);
            w.mix(gamma, &hat);
        }
    }

    let mut worst: f64 = 0.0;
    for t in 1..=m {
        let telescoped: f64 =
            (1..=t).map(|j| vdiff_sq[j] - gdiff_sq[j]).sum::<f64>();
        worst = worst.max((err_sq[t] - telescoped).abs());
    }
    CheckResult::new(
        "Eq. (10) telescoped variance over enumerated paths (n=4, m=2)",
        worst,
        1e-12,
        format!("{paths} paths, single-sample batches"),
    )
}

/// Eq. (10'): snapshot variance over all subsets equals
/// `(1/b) (n-b)/(n-1) sigma_n^2` exactly for without-replacement sampling.
fn check_snapshot_variance() -> CheckResult {
    let n = 6usize;
    let d = 3usize;
    let oracle = toy(n, d, 103);
    let w = WeightVector::from_vec(vec![0.2, 0.9, -0.5]);
    let full = grad(&oracle, &w);
    let comps: Vec<Vec<f64>> = (0..n as u64).map(|i| component(&oracle, &w, i)).collect();
    let sigma_n_sq = comps
        .iter()
        .map(|g| g.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        / n as f64
        - full.norm_sq();

    let mut worst: f64 = 0.0;
    for b in 1..=n {
        let mut var = 0.0;
        for_each_subset(n, b, |ids| {
            let mut mean = vec![0.0; d];
            for &i in ids {
                for (a, g) in mean.iter_mut().zip(&comps[i as usize]) {
                    *a += g / b as f64;
                }
            }
            var += mean
                .iter()
                .zip(full.values())
                .map(|(a, f)| (a - f) * (a - f))
                .sum::<f64>();
        });
        var /= binomial(n, b) as f64;
        let closed = (n - b) as f64 / ((n - 1) as f64 * b as f64) * sigma_n_sq;
        worst = worst.max((var - closed).abs());
    }
    CheckResult::new(
        "Eq. (10') snapshot variance enumeration (n=6)",
        worst,
        1e-12,
        format!("sigma_n^2 = {sigma_n_sq:.6}"),
    )
}

/// Eq. (11): the finite-sum mini-batch SARAH difference variance closed form
/// vs exact subset enumeration, n=5, all batch sizes.
fn check_minibatch_variance() -> CheckResult {
    let n = 5;
    let oracle = toy(n, 2, 104);
    let w_t = WeightVector::from_vec(vec![0.5, -0.1]);
    let w_prev = WeightVector::from_vec(vec![-0.3, 0.7]);
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for b in 1..=n {
        let (enumerated, closed) = brute_force_variance(&oracle, &w_t, &w_prev, b).unwrap();
        let r = (enumerated - closed).abs();
        if r > worst {
            worst = r;
            detail = format!("b={b}: enumerated={enumerated:.15e}, closed={closed:.15e}");
        }
    }
    CheckResult::new("Eq. (11) mini-batch variance enumeration (n=5)", worst, 1e-12, detail)
}

/// Eq. (12): the i.i.d. (expectation-mode) difference variance identity by
/// enumerating all outcome tuples of a small synthetic distribution.
fn check_expectation_variance() -> CheckResult {
    let p = SyntheticExpectation::random(4, 2, 909).unwrap();
    let k = p.outcomes().len();
    let w_t = WeightVector::from_vec(vec![0.3, -0.6]);
    let w_prev = WeightVector::from_vec(vec![-0.2, 0.4]);

    let diffs: Vec<Vec<f64>> = p
        .outcomes()
        .iter()
        .map(|c| {
            let mut g = vec![0.0; 2];
            c.gradient_into(w_t.values(), 1.0, &mut g);
            c.gradient_into(w_prev.values(), -1.0, &mut g);
            g
        })
        .collect();
    let mean_diff: Vec<f64> = (0..2)
        .map(|j| diffs.iter().map(|g| g[j]).sum::<f64>() / k as f64)
        .collect();
    let mean_diff_sq: f64 = mean_diff.iter().map(|v| v * v).sum();
    let e_comp_sq: f64 = diffs
        .iter()
        .map(|g| g.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        / k as f64;

    let mut worst: f64 = 0.0;
    for b in 1..=3usize {
        // enumerate all k^b equally likely i.i.d. tuples
        let tuples = k.pow(b as u32);
        let mut enumerated = 0.0;
        for code in 0..tuples {
            let mut acc = vec![0.0; 2];
            let mut c = code;
            for _ in 0..b {
                let idx = c % k;
                c /= k;
                for (a, g) in acc.iter_mut().zip(&diffs[idx]) {
                    *a += g / b as f64;
                }
            }
            enumerated += acc.iter().map(|v| v * v).sum::<f64>() / tuples as f64;
        }
        let closed = (1.0 - 1.0 / b as f64) * mean_diff_sq + e_comp_sq / b as f64;
        worst = worst.max((enumerated - closed).abs());
    }
    CheckResult::new(
        "Eq. (12) i.i.d. mini-batch variance enumeration (k=4, b<=3)",
        worst,
        1e-12,
        "synthetic 4-outcome distribution".to_string(),
    )
}

/// Eq. (13)/(14): the adaptive-composite recursion reproduces the frozen
/// hand-derived example and respects its Sigma_m lower bound.
fn check_adaptive_composite() -> CheckResult {
    let raw = adaptive_composite_raw(1.0, 0.5, 2, 1, 101, BracketForm::Theorem).unwrap();
    let expected = [4.0 / 11.0, 0.5, 1.0];
    let mut worst = raw
        .iter()
        .zip(expected.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    // Sigma_m bound across a small sweep
    for (m, b, n, eta) in [(2usize, 1usize, 101usize, 0.5), (16, 2, 64, 0.4), (64, 5, 300, 0.6)] {
        let raw = adaptive_composite_raw(1.0, eta, m, b, n, BracketForm::Theorem).unwrap();
        let sigma: f64 = raw.iter().sum();
        let bound = adaptive_sigma_bound(1.0, eta, m, b, n);
        worst = worst.max((bound - sigma).max(0.0));
    }
    CheckResult::new(
        "Eq. (13)/(14) adaptive composite recursion + Sigma bound",
        worst,
        1e-12,
        format!("gamma = {raw:?}"),
    )
}

/// Eq. (15): constant composite step-sizes reproduce the frozen examples.
/// `perturb` shifts the variance factor `omega` to exercise mutation sanity.
fn check_constant_composite(perturb: f64) -> CheckResult {
    // n=101, b=1, m=6, L=1: omega = 1.5 (perturbed by the hook), so
    // gamma = 1/sqrt(1.5 m), eta = 2 sqrt(1.5 m)/(4 sqrt(1.5 m) + 1)
    let s = constant_composite(1.0, 6, 1, ScheduleMode::FiniteSum { n: 101 }).unwrap();
    let omega = 1.5 * (1.0 + perturb);
    let root = (omega * 6.0).sqrt();
    let mut worst = (s.gamma(0) - 1.0 / root).abs();
    worst = worst.max((s.eta(0) - 2.0 * root / (4.0 * root + 1.0)).abs());
    CheckResult::new(
        "Eq. (15) constant composite step-sizes (n=101, b=1, m=6)",
        worst,
        1e-12,
        format!("gamma = {:.15}, eta = {:.15}", s.gamma(0), s.eta(0)),
    )
}

/// Eq. (19): trade-off rule frozen example.
fn check_tradeoff() -> CheckResult {
    let (b, eta) = tradeoff_config(1.0, 1.0, 10, 100).unwrap();
    let worst = (b as f64 - 13.0).abs().max((eta - 0.4).abs());
    CheckResult::new(
        "Eq. (19) batch/step trade-off rule (n=100, m=10)",
        worst,
        1e-12,
        format!("b_hat = {b}, eta = {eta}"),
    )
}

/// Eq. (20): expectation-mode constant step-sizes frozen example.
fn check_constant_expectation() -> CheckResult {
    // b=6, m=4: omega = 1/4, omega m = 1 -> gamma = 1, eta = 2/5
    let s = constant_composite(1.0, 4, 6, ScheduleMode::Expectation).unwrap();
    let worst = (s.gamma(0) - 1.0).abs().max((s.eta(0) - 0.4).abs());
    CheckResult::new(
        "Eq. (20) expectation-mode constant step-sizes (b=6, m=4)",
        worst,
        1e-12,
        format!("gamma = {}, eta = {}", s.gamma(0), s.eta(0)),
    )
}

/// Eq. (24) and Theorem 4: the non-composite recursion frozen example and
/// its Sigma_m lower bound.
fn check_noncomposite() -> CheckResult {
    let s = adaptive_noncomposite(1.0, 2, 1.0).unwrap();
    let expected = [0.4, 0.5, 1.0];
    let mut worst = s
        .etas
        .iter()
        .zip(expected.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    for (l, m, rho) in [(1.0, 2usize, 1.0), (2.0, 32, 0.7), (0.5, 128, 1.3)] {
        let s = adaptive_noncomposite(l, m, rho).unwrap();
        let sigma: f64 = s.etas.iter().sum();
        let bound = noncomposite_sigma_bound(l, m, rho);
        worst = worst.max((bound - sigma).max(0.0));
    }
    CheckResult::new(
        "Eq. (24) non-composite recursion + Theorem 4 Sigma bound",
        worst,
        1e-12,
        format!("eta_hat = {:?}", s.etas),
    )
}

/// Eq. (28): tightness residuals of the generic recursion over randomized
/// parameters.
fn check_lemma4_tightness() -> CheckResult {
    let mut rng = RngStream::new(606, 0);
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for _ in 0..200 {
        let delta = 0.05 + 3.0 * rng.gen_f64();
        let nu = 0.05 + 3.0 * rng.gen_f64();
        let l = 0.1 + 4.0 * rng.gen_f64();
        let m = 1 + (rng.next_u64() % 256) as usize;
        let s = lemma4_recursion(l, delta, nu, m).unwrap();
        let r = lemma4_residuals(&s, l, delta, nu);
        if r > worst {
            worst = r;
            detail = format!("delta={delta:.4}, nu={nu:.4}, L={l:.4}, m={m}");
        }
    }
    CheckResult::new("Eq. (28) recursion tightness, 200 randomized cases", worst, 1e-10, detail)
}

/// Eq. (29)/(30): frozen generic-recursion example, the constant variant,
/// and the Sigma_m lower bound across randomized cases.
fn check_lemma4_bounds() -> CheckResult {
    let s = lemma4_recursion(1.0, 1.0, 1.0, 1).unwrap();
    let mut worst = (s.gamma(0) - 0.5).abs().max((s.gamma(1) - 1.0).abs());
    let c = lemma4_constant(1.0, 1.0, 1.0, 2).unwrap();
    worst = worst.max((c.gamma(0) - 0.5).abs());
    let mut rng = RngStream::new(607, 0);
    for _ in 0..200 {
        let delta = 0.05 + 3.0 * rng.gen_f64();
        let nu = 0.05 + 3.0 * rng.gen_f64();
        let l = 0.1 + 4.0 * rng.gen_f64();
        let m = 1 + (rng.next_u64() % 256) as usize;
        let s = lemma4_recursion(l, delta, nu, m).unwrap();
        let bound = lemma4_sigma_bound(l, delta, nu, m);
        worst = worst.max((bound - s.sigma_m).max(0.0) / bound.max(1.0));
    }
    CheckResult::new(
        "Eq. (29)/(30) recursion examples + Sigma bounds, 200 randomized",
        worst,
        1e-10,
        "delta/nu/L randomized, m <= 256".to_string(),
    )
}

/// Runs all identity checks and returns one result per paper reference.
pub fn verify_suite(options: VerifyOptions) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_bias_identity(),
        check_telescoping_identity(),
        check_snapshot_variance(),
        check_minibatch_variance(),
        check_expectation_variance(),
        check_adaptive_composite(),
        check_constant_composite(options.perturb_omega),
        check_tradeoff(),
        check_constant_expectation(),
        check_noncomposite(),
        check_lemma4_tightness(),
        check_lemma4_bounds(),
    ])
}
