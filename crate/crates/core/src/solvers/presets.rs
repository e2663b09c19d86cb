//! Named solver configurations: eight ProxSARAH variants and the four
//! baseline methods, all derived from the sample count `n` and smoothness
//! constant `L`.

use crate::error::{Error, Result};
use crate::stepsize::{tradeoff_config, BracketForm};

use super::{ScheduleRule, Variant};

/// Adaptive presets target `gamma_m = 0.99`, i.e. `delta = 0.99 L`, which
/// fixes `eta = 2/(3 + 0.99 L)` through `delta = 2/eta - 3`.
fn adaptive_eta(lipschitz: f64) -> f64 {
    2.0 / (3.0 + 0.99 * lipschitz)
}

#[derive(Debug, Clone)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub variant: Variant,
}

pub fn preset_names() -> Vec<&'static str> {
    vec![
        "v1", "v2", "v3", "v4", "v5", "a-v1", "a-v2", "a-v3", // ProxSARAH family
        "svrg", "spiderboost", "sgd", "gd", // baselines
    ]
}

fn isqrt_floor(n: usize) -> usize {
    ((n as f64).sqrt().floor() as usize).max(1)
}

fn icbrt_floor(n: usize) -> usize {
    (((n as f64).powf(1.0 / 3.0) + 1e-9).floor() as usize).max(1)
}

fn tradeoff_preset(gamma_bar: f64, m: usize, n: usize, lipschitz: f64) -> Result<Variant> {
    let (b_hat, eta) = tradeoff_config(gamma_bar, lipschitz, m, n)?;
    Ok(Variant::ProxSarah {
        rule: ScheduleRule::Explicit { gamma: gamma_bar, eta },
        m,
        b_hat,
        b_s: n,
    })
}

/// Resolves a preset name to a concrete configuration for a finite sum of
/// `n` components with smoothness `L`.
pub fn preset_config(name: &str, n: usize, lipschitz: f64) -> Result<PresetInfo> {
    if n < 2 {
        return Err(Error::invalid(format!("presets need n >= 2 samples, got {n}")));
    }
    if lipschitz <= 0.0 {
        return Err(Error::invalid(format!("L must be positive, got {lipschitz}")));
    }
    let root = isqrt_floor(n);
    let cbrt = icbrt_floor(n);
    let adaptive = |m: usize, b_hat: usize| Variant::ProxSarah {
        rule: ScheduleRule::Adaptive { eta: adaptive_eta(lipschitz), form: BracketForm::Theorem },
        m,
        b_hat,
        b_s: n,
    };
    let (description, variant): (&'static str, Variant) = match name {
        "v1" => (
            "ProxSARAH, single sample, constant step-sizes, m = n",
            Variant::ProxSarah { rule: ScheduleRule::Constant, m: n, b_hat: 1, b_s: n },
        ),
        "v2" => (
            "ProxSARAH, gamma = 0.95, m = floor(sqrt(n)), batch from the trade-off rule",
            tradeoff_preset(0.95, root, n, lipschitz)?,
        ),
        "v3" => (
            "ProxSARAH, gamma = 0.99, m = floor(sqrt(n)), batch from the trade-off rule",
            tradeoff_preset(0.99, root, n, lipschitz)?,
        ),
        "v4" => (
            "ProxSARAH, gamma = 0.95, m = floor(n^(1/3)), batch from the trade-off rule",
            tradeoff_preset(0.95, cbrt, n, lipschitz)?,
        ),
        "v5" => (
            "ProxSARAH, gamma = 0.99, m = floor(n^(1/3)), batch from the trade-off rule",
            tradeoff_preset(0.99, cbrt, n, lipschitz)?,
        ),
        "a-v1" => (
            "ProxSARAH, single sample, adaptive step-sizes, m = n",
            adaptive(n, 1),
        ),
        "a-v2" => (
            "ProxSARAH, adaptive step-sizes, b = m = floor(sqrt(n))",
            adaptive(root, root),
        ),
        "a-v3" => (
            "ProxSARAH, adaptive step-sizes, b = m = floor(n^(1/3))",
            adaptive(cbrt, cbrt),
        ),
        "svrg" => (
            "ProxSVRG, single sample, theoretical step eta = 1/(3nL), m = n",
            Variant::ProxSvrg { m: n, b_hat: 1, eta: 1.0 / (3.0 * n as f64 * lipschitz) },
        ),
        "svrg-mini" => (
            "ProxSVRG, mini-batch b = floor(n^(2/3)), m = floor(n^(1/3)), eta = 1/(3L)",
            Variant::ProxSvrg {
                m: cbrt,
                b_hat: ((n as f64).powf(2.0 / 3.0) + 1e-9).floor() as usize,
                eta: 1.0 / (3.0 * lipschitz),
            },
        ),
        "spiderboost" => (
            "ProxSpiderBoost, b = m = floor(sqrt(n)), eta = 1/(2L)",
            Variant::ProxSpiderBoost { m: root, b_hat: root, eta: 0.5 / lipschitz },
        ),
        "sgd" => (
            "ProxSGD, eta_t = 0.1/(1 + floor(t/n))",
            Variant::ProxSgd { eta0: 0.1, eta_tilde: 1.0, b_hat: 1 },
        ),
        "gd" => (
            "ProxGD, full gradients, eta = 1/L",
            Variant::ProxGd { eta: None },
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}'; known presets: {}",
                preset_names().join(", ")
            )))
        }
    };
    // resolve the name to its canonical static spelling
    let name = preset_names()
        .into_iter()
        .chain(std::iter::once("svrg-mini"))
        .find(|p| *p == name)
        .expect("matched above");
    Ok(PresetInfo { name, description, variant })
}
