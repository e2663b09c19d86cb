//! Black-box contract tests for the `proxsarah` binary: exit codes, output
//! files, and the desk-scale descent smoke check.

use std::process::{Command, Output};

use proxsarah_core::data::synth_nnpca;
use proxsarah_core::problems::NnPcaProblem;
use proxsarah_core::solvers::{preset_config, run_solver, OutputRule, RunHooks, SolverConfig};
use proxsarah_core::{ProblemOracle, Regularizer};

fn proxsarah(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proxsarah")).args(args).output().unwrap()
}

#[test]
fn verify_passes_on_fresh_checkout() {
    let out = proxsarah(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("PASS"));
    assert!(!stdout.contains("FAIL"));
    assert!(stdout.contains("max residual"));
}

#[test]
fn perturbed_omega_fails_eq_15_with_exit_1() {
    let out = proxsarah(&["verify", "--perturb-omega", "0.05"]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let failed: Vec<&str> = stdout.lines().filter(|l| l.contains("FAIL")).collect();
    assert_eq!(failed.len(), 1, "exactly the constant-composite check should fail:\n{stdout}");
    assert!(failed[0].contains("Eq. (15)"));
    assert!(stdout.contains("offending inputs"));
}

#[test]
fn run_smoke_contract() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, "problem = nnpca\nsolvers = v1\nn = 120\nd = 10\nepochs = 2\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_proxsarah"))
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("v1.csv")).unwrap();
    assert!(csv.starts_with(
        "epoch_fraction,objective,rel_residual,grad_map_norm_sq,train_acc,test_acc,wall_ms\n"
    ));
    assert!(out_dir.join("residual.svg").exists());
    assert!(out_dir.join("grad_mapping.svg").exists());
}

#[test]
fn unknown_solver_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, "problem = nnpca\nsolvers = nope\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_proxsarah")).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("solvers"), "{stderr}");
    assert!(stderr.contains("nope"), "{stderr}");
}

#[test]
fn presets_describe_invalid_n_exits_2() {
    let out = proxsarah(&["presets", "describe", "v1", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn desk_scale_descent_smoke() {
    // per-epoch min of ||G_0.5||^2 is nonincreasing after the first epoch
    // for the constant-step variants, allowing a 10% rebound (the guarantee
    // is in expectation only)
    let oracle = NnPcaProblem::new(synth_nnpca(1000, 50, 42)).unwrap();
    let reg = Regularizer::nonneg_unit_ball();
    for preset in ["v1", "v3"] {
        let info = preset_config(preset, 1000, oracle.lipschitz()).unwrap();
        let cfg = SolverConfig {
            variant: info.variant,
            epochs: 10.0,
            seed: 42,
            output: OutputRule::Last,
        };
        let run = run_solver(&oracle, &reg, &cfg, RunHooks::default()).unwrap();
        let mut per_epoch = vec![f64::INFINITY; 11];
        for row in &run.trace.rows {
            let e = (row.epoch_fraction.floor() as usize).min(10);
            per_epoch[e] = per_epoch[e].min(row.grad_map_norm_sq);
        }
        let observed: Vec<f64> =
            per_epoch.into_iter().filter(|v| v.is_finite()).collect();
        for pair in observed[1..].windows(2) {
            assert!(
                pair[1] <= 1.1 * pair[0],
                "{preset}: per-epoch min rebounded: {:?}",
                observed
            );
        }
    }
}
