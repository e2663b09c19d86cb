//! Subcommand implementations. Each returns a `Result`; the binary maps
//! success to exit code 0, verification failure to 1, and config/usage
//! errors to 2.

use std::fs;
use std::path::Path;

use proxsarah_core::solvers::{preset_config, preset_names, ScheduleRule, Variant};
use proxsarah_core::stepsize::{
    adaptive_composite_with_form, constant_composite, ScheduleMode, StepSchedule,
};
use proxsarah_core::verify::{verify_suite, VerifyOptions};
use proxsarah_core::Result;

use crate::config::{parse_config, Overrides};
use crate::runner::run_experiment;

pub fn cmd_run(config_path: &Path, overrides: &Overrides) -> Result<()> {
    let text = fs::read_to_string(config_path)?;
    let cfg = parse_config(&text, overrides)?;
    let summary = run_experiment(&cfg)?;

    println!("F* = {:.16e}", summary.f_star);
    for o in &summary.outcomes {
        let last = o.result.trace.last().expect("every run records at least one row");
        println!(
            "{:<12} objective = {:.6e}  rel_residual = {:.3e}  ||G||^2 = {:.3e}  \
             sfo = {}  wall = {} ms",
            o.name,
            last.objective,
            last.rel_residual,
            last.grad_map_norm_sq,
            o.result.counters.sfo,
            o.wall_ms
        );
    }
    for p in summary.csv_paths.iter().chain(&summary.svg_paths) {
        println!("wrote {}", p.display());
    }
    Ok(())
}

/// Runs the identity suite and prints one line per check. Returns whether
/// every check passed.
pub fn cmd_verify(perturb_omega: f64) -> Result<bool> {
    let results = verify_suite(VerifyOptions { perturb_omega })?;
    let mut all_pass = true;
    for r in &results {
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!(
            "{:<55} {status}  (max residual {:.3e}, tol {:.1e})",
            format!("{}:", r.name),
            r.residual,
            r.tolerance
        );
        if !r.pass {
            all_pass = false;
            println!("  offending inputs: {}", r.detail);
        }
    }
    println!(
        "{}/{} checks passed",
        results.iter().filter(|r| r.pass).count(),
        results.len()
    );
    Ok(all_pass)
}

pub fn cmd_presets_list() -> Result<()> {
    // representative problem size, only used to pull the descriptions
    for name in preset_names() {
        let info = preset_config(name, 1000, 1.0)?;
        println!("{:<12} {}", name, info.description);
    }
    Ok(())
}

fn schedule_for(variant: &Variant, n: usize, lipschitz: f64) -> Result<Option<StepSchedule>> {
    let mode = ScheduleMode::FiniteSum { n };
    match *variant {
        Variant::ProxSarah { rule, m, b_hat, .. } => match rule {
            ScheduleRule::Constant => constant_composite(lipschitz, m, b_hat, mode).map(Some),
            ScheduleRule::Adaptive { eta, form } => {
                adaptive_composite_with_form(lipschitz, eta, m, b_hat, n, form).map(Some)
            }
            ScheduleRule::Explicit { .. } => Ok(None),
        },
        _ => Ok(None),
    }
}

pub fn cmd_presets_describe(name: &str, n: usize, lipschitz: f64) -> Result<()> {
    let info = preset_config(name, n, lipschitz)?;
    println!("{}: {}", info.name, info.description);
    println!("n = {n}, L = {lipschitz}");
    match info.variant {
        Variant::ProxSarah { rule, m, b_hat, b_s } => {
            println!("variant = ProxSARAH, m = {m}, b_hat = {b_hat}, b_s = {b_s}");
            match rule {
                ScheduleRule::Constant => println!("schedule = constant"),
                ScheduleRule::Adaptive { eta, form } => {
                    println!("schedule = adaptive ({form:?} bracket), eta = {eta:.12}")
                }
                ScheduleRule::Explicit { gamma, eta } => {
                    println!("schedule = explicit, gamma = {gamma:.12}, eta = {eta:.12}")
                }
            }
            if let Some(s) = schedule_for(&info.variant, n, lipschitz)? {
                let last = s.m();
                println!(
                    "gamma_1 = {:.12}, gamma_m = {:.12}, eta_1 = {:.12}, sigma_m = {:.12}",
                    s.gamma(1),
                    s.gamma(last),
                    s.eta(1),
                    s.sigma_m
                );
            }
        }
        Variant::ProxSvrg { m, b_hat, eta } => {
            println!("variant = ProxSVRG, m = {m}, b_hat = {b_hat}, eta = {eta:.12}")
        }
        Variant::ProxSpiderBoost { m, b_hat, eta } => {
            println!("variant = ProxSpiderBoost, m = {m}, b_hat = {b_hat}, eta = {eta:.12}")
        }
        Variant::ProxSgd { eta0, eta_tilde, b_hat } => {
            println!("variant = ProxSGD, eta0 = {eta0}, eta_tilde = {eta_tilde}, b_hat = {b_hat}")
        }
        Variant::ProxGd { eta } => {
            let eta = eta.unwrap_or(1.0 / lipschitz);
            println!("variant = ProxGD, eta = {eta:.12}")
        }
    }
    Ok(())
}
