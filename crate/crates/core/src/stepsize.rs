//! Step-size schedules for the averaged proximal-SARAH iteration: constant
//! pairs `(gamma, eta)` for the finite-sum and expectation settings, the
//! backward-recursive adaptive schedules, the non-composite variant, and the
//! generic tight recursion they all specialize.

use crate::error::{Error, Result};

/// Per-inner-iteration step-size pairs `(gamma_t, eta_t)`, `t = 0..=m`.
///
/// `gamma_t in (0, 1]` are averaging weights, `eta_t > 0` proximal step
/// sizes; `sigma_m` caches `sum_t gamma_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSchedule {
    pub gammas: Vec<f64>,
    pub etas: Vec<f64>,
    pub sigma_m: f64,
}

impl StepSchedule {
    fn new(gammas: Vec<f64>, etas: Vec<f64>) -> Self {
        debug_assert_eq!(gammas.len(), etas.len());
        let sigma_m = gammas.iter().sum();
        Self { gammas, etas, sigma_m }
    }

    /// Number of inner iterations `m` (schedule length minus one).
    pub fn m(&self) -> usize {
        self.gammas.len() - 1
    }

    pub fn gamma(&self, t: usize) -> f64 {
        self.gammas[t]
    }

    pub fn eta(&self, t: usize) -> f64 {
        self.etas[t]
    }

    /// Combined step `gamma_t * eta_t`.
    pub fn combined(&self, t: usize) -> f64 {
        self.gammas[t] * self.etas[t]
    }
}

/// Sampling regime the schedule is derived for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    FiniteSum { n: usize },
    Expectation,
}

/// Variance factor `omega`: `3(n - b)/(2b(n-1))` for a finite sum,
/// `3/(2b)` for the expectation setting.
pub fn omega(mode: ScheduleMode, b_hat: usize) -> Result<f64> {
    let b = b_hat as f64;
    match mode {
        ScheduleMode::FiniteSum { n } => {
            if b_hat == 0 || b_hat >= n {
                return Err(Error::invalid(format!(
                    "constant schedule requires 1 <= b_hat <= n-1, got b_hat = {b_hat}, n = {n}"
                )));
            }
            let nf = n as f64;
            Ok(3.0 * (nf - b) / (2.0 * b * (nf - 1.0)))
        }
        ScheduleMode::Expectation => {
            if b_hat == 0 {
                return Err(Error::invalid("batch size must be >= 1"));
            }
            Ok(3.0 / (2.0 * b))
        }
    }
}

fn clamp_gamma(gamma: f64, context: &str) -> f64 {
    if gamma > 1.0 {
        log::warn!("{context}: gamma = {gamma:.6} exceeds 1, clamped to 1");
        1.0
    } else {
        gamma
    }
}

/// Constant step-size pair `gamma = 1/(L sqrt(omega m))`,
/// `eta = 2 sqrt(omega m) / (4 sqrt(omega m) + 1)`.
///
/// `gamma` is clamped into `(0, 1]` with a logged warning when the formula
/// exceeds 1 (possible for large batches or tiny `m`).
pub fn constant_composite(
    lipschitz: f64,
    m: usize,
    b_hat: usize,
    mode: ScheduleMode,
) -> Result<StepSchedule> {
    if lipschitz <= 0.0 {
        return Err(Error::invalid("L must be positive"));
    }
    if m < 1 {
        return Err(Error::invalid("epoch length m must be >= 1"));
    }
    let om = omega(mode, b_hat)?;
    let root = (om * m as f64).sqrt();
    let gamma = clamp_gamma(1.0 / (lipschitz * root), "constant_composite");
    let eta = 2.0 * root / (4.0 * root + 1.0);
    Ok(StepSchedule::new(vec![gamma; m + 1], vec![eta; m + 1]))
}

/// Which bracket the adaptive-composite recursion divides by. The theorem
/// statement uses `eta + omega_eta L Sigma`, its appendix restatement uses
/// `1 + omega_eta L Sigma`; both are provided, theorem form by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BracketForm {
    #[default]
    Theorem,
    Appendix,
}

/// `omega_eta = (1 + 2 eta^2)(n - b)/(b(n - 1))`.
pub fn omega_eta(eta: f64, b_hat: usize, n: usize) -> f64 {
    (1.0 + 2.0 * eta * eta) * (n - b_hat) as f64 / (b_hat as f64 * (n - 1) as f64)
}

/// Unclamped backward recursion for the adaptive composite schedule:
/// `gamma_m = delta/L`, and going down from `t = m-1`,
/// `gamma_t = delta / (L [bracket + omega_eta L sum_{j>t} gamma_j])`
/// where `bracket` is `eta` or `1` per [`BracketForm`] and
/// `delta = 2/eta - 3`.
pub fn adaptive_composite_raw(
    lipschitz: f64,
    eta: f64,
    m: usize,
    b_hat: usize,
    n: usize,
    form: BracketForm,
) -> Result<Vec<f64>> {
    if lipschitz <= 0.0 {
        return Err(Error::invalid("L must be positive"));
    }
    if !(0.0..2.0 / 3.0).contains(&eta) || eta == 0.0 {
        return Err(Error::invalid(format!(
            "adaptive schedule requires 0 < eta < 2/3 (so delta = 2/eta - 3 > 0), got {eta}"
        )));
    }
    if b_hat == 0 || b_hat >= n {
        return Err(Error::invalid(format!(
            "adaptive schedule requires 1 <= b_hat <= n-1, got b_hat = {b_hat}, n = {n}"
        )));
    }
    let delta = 2.0 / eta - 3.0;
    let om = omega_eta(eta, b_hat, n);
    let bracket = match form {
        BracketForm::Theorem => eta,
        BracketForm::Appendix => 1.0,
    };
    let mut gammas = vec![0.0; m + 1];
    gammas[m] = delta / lipschitz;
    let mut tail = gammas[m]; // sum_{j > t} gamma_j, accumulated backward
    for t in (0..m).rev() {
        gammas[t] = delta / (lipschitz * (bracket + om * lipschitz * tail));
        tail += gammas[t];
    }
    Ok(gammas)
}

/// Lower bound on `Sigma_m` guaranteed for the adaptive composite schedule:
/// `2 delta (m+1) / (L (sqrt(2 delta omega_eta m + 1) + 1))`.
pub fn adaptive_sigma_bound(lipschitz: f64, eta: f64, m: usize, b_hat: usize, n: usize) -> f64 {
    let delta = 2.0 / eta - 3.0;
    let om = omega_eta(eta, b_hat, n);
    2.0 * delta * (m as f64 + 1.0) / (lipschitz * ((2.0 * delta * om * m as f64 + 1.0).sqrt() + 1.0))
}

/// Adaptive composite schedule: fixed `eta_t = eta`, `gamma_t` from the
/// backward recursion, clamped into `(0, 1]` for use in the solver.
pub fn adaptive_composite(
    lipschitz: f64,
    eta: f64,
    m: usize,
    b_hat: usize,
    n: usize,
) -> Result<StepSchedule> {
    adaptive_composite_with_form(lipschitz, eta, m, b_hat, n, BracketForm::default())
}

pub fn adaptive_composite_with_form(
    lipschitz: f64,
    eta: f64,
    m: usize,
    b_hat: usize,
    n: usize,
    form: BracketForm,
) -> Result<StepSchedule> {
    let raw = adaptive_composite_raw(lipschitz, eta, m, b_hat, n, form)?;
    let gammas: Vec<f64> = raw
        .into_iter()
        .map(|g| clamp_gamma(g, "adaptive_composite"))
        .collect();
    Ok(StepSchedule::new(gammas, vec![eta; m + 1]))
}

/// Non-composite adaptive schedule of combined steps: `eta_hat_m = 1/L` and
/// backward `eta_hat_t = 1/(L(1 + rho L sum_{j>t} eta_hat_j))`. Returned
/// with the `gamma_t = 1, eta_t = eta_hat_t` convention.
pub fn adaptive_noncomposite(lipschitz: f64, m: usize, rho: f64) -> Result<StepSchedule> {
    if lipschitz <= 0.0 || rho <= 0.0 {
        return Err(Error::invalid("L and rho must be positive"));
    }
    let mut etas = vec![0.0; m + 1];
    etas[m] = 1.0 / lipschitz;
    let mut tail = etas[m];
    for t in (0..m).rev() {
        etas[t] = 1.0 / (lipschitz * (1.0 + rho * lipschitz * tail));
        tail += etas[t];
    }
    let sigma: f64 = etas.iter().sum();
    let bound = noncomposite_sigma_bound(lipschitz, m, rho);
    debug_assert!(sigma >= bound - 1e-9, "Sigma_m = {sigma} below bound {bound}");
    Ok(StepSchedule::new(vec![1.0; m + 1], etas))
}

/// `2(m+1) / ((sqrt(2 rho m + 1) + 1) L)`.
pub fn noncomposite_sigma_bound(lipschitz: f64, m: usize, rho: f64) -> f64 {
    2.0 * (m as f64 + 1.0) / (((2.0 * rho * m as f64 + 1.0).sqrt() + 1.0) * lipschitz)
}

/// Fixed non-composite step `eta_hat = 2/(L(1 + sqrt(4m + 1)))`, the
/// constant alternative to the backward recursion.
pub fn noncomposite_fixed(lipschitz: f64, m: usize) -> Result<StepSchedule> {
    if lipschitz <= 0.0 {
        return Err(Error::invalid("L must be positive"));
    }
    let eta = 2.0 / (lipschitz * (1.0 + (4.0 * m as f64 + 1.0).sqrt()));
    Ok(StepSchedule::new(vec![1.0; m + 1], vec![eta; m + 1]))
}

/// Generic tight backward recursion: `gamma_m = delta/L`,
/// `gamma_t = delta / (L [1 + nu L sum_{j>t} gamma_j])`.
pub fn lemma4_recursion(lipschitz: f64, delta: f64, nu: f64, m: usize) -> Result<StepSchedule> {
    if lipschitz <= 0.0 || delta <= 0.0 || nu <= 0.0 {
        return Err(Error::invalid("L, delta, nu must be positive"));
    }
    let mut gammas = vec![0.0; m + 1];
    gammas[m] = delta / lipschitz;
    let mut tail = gammas[m];
    for t in (0..m).rev() {
        gammas[t] = delta / (lipschitz * (1.0 + nu * lipschitz * tail));
        tail += gammas[t];
    }
    Ok(StepSchedule::new(gammas, vec![1.0; m + 1]))
}

/// Constant variant of the generic recursion:
/// `gamma_t = 2 delta / (L (sqrt(1 + 4 delta nu m) + 1))`.
pub fn lemma4_constant(lipschitz: f64, delta: f64, nu: f64, m: usize) -> Result<StepSchedule> {
    if lipschitz <= 0.0 || delta <= 0.0 || nu <= 0.0 {
        return Err(Error::invalid("L, delta, nu must be positive"));
    }
    let gamma = 2.0 * delta / (lipschitz * ((1.0 + 4.0 * delta * nu * m as f64).sqrt() + 1.0));
    Ok(StepSchedule::new(vec![gamma; m + 1], vec![1.0; m + 1]))
}

/// `2 delta (m+1) / (L (sqrt(1 + 2 delta nu m) + 1))`.
pub fn lemma4_sigma_bound(lipschitz: f64, delta: f64, nu: f64, m: usize) -> f64 {
    2.0 * delta * (m as f64 + 1.0) / (lipschitz * ((1.0 + 2.0 * delta * nu * m as f64).sqrt() + 1.0))
}

/// Maximum residual of the tightness conditions the recursion solves with
/// equality: `nu L^2 gamma_t sum_{j>t} gamma_j - delta + L gamma_t` for
/// `t < m`, and `L gamma_m - delta`.
pub fn lemma4_residuals(schedule: &StepSchedule, lipschitz: f64, delta: f64, nu: f64) -> f64 {
    let m = schedule.m();
    let mut worst = (lipschitz * schedule.gamma(m) - delta).abs();
    let mut tail = schedule.gamma(m);
    for t in (0..m).rev() {
        let g = schedule.gamma(t);
        let r = nu * lipschitz * lipschitz * g * tail - delta + lipschitz * g;
        worst = worst.max(r.abs());
        tail += g;
    }
    worst
}

/// Batch/step trade-off rule: given a target averaging weight
/// `gamma_bar in (0, 1]`, returns `(b_hat, eta)` with
/// `C = 2/(3 L^2 gamma_bar^2)`, `b_hat = floor(m n / (C n + m - C))`
/// clamped to `[1, n-1]`, and `eta = 2/(4 + L gamma_bar)`.
/// Requires `m >= C`.
pub fn tradeoff_config(
    gamma_bar: f64,
    lipschitz: f64,
    m: usize,
    n: usize,
) -> Result<(usize, f64)> {
    if !(0.0..=1.0).contains(&gamma_bar) || gamma_bar == 0.0 {
        return Err(Error::invalid(format!("gamma_bar must be in (0, 1], got {gamma_bar}")));
    }
    if m < 1 || n < 2 {
        return Err(Error::invalid("trade-off rule requires m >= 1 and n >= 2"));
    }
    let c = 2.0 / (3.0 * lipschitz * lipschitz * gamma_bar * gamma_bar);
    if (m as f64) < c {
        return Err(Error::Config(format!(
            "epoch length m = {m} is below C = {c:.4}; the trade-off rule needs m >= C \
             (increase m or gamma_bar)"
        )));
    }
    let mf = m as f64;
    let nf = n as f64;
    let b = (mf * nf / (c * nf + mf - c)).floor() as usize;
    let b_hat = b.clamp(1, n - 1);
    let eta = 2.0 / (4.0 + lipschitz * gamma_bar);
    Ok((b_hat, eta))
}
