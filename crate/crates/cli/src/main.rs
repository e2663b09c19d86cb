use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use proxsarah_cli::commands::{cmd_presets_describe, cmd_presets_list, cmd_run, cmd_verify};
use proxsarah_cli::config::Overrides;

/// ProxSARAH benchmark harness.
#[derive(Parser)]
#[command(name = "proxsarah", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        /// Path to a `key = value` config file.
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the epoch budget.
        #[arg(long)]
        epochs: Option<f64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the number of worker threads.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check the analytical identities behind the step-size rules.
    Verify {
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb_omega: f64,
    },
    /// Inspect the built-in solver presets.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
}

#[derive(Subcommand)]
enum PresetsAction {
    /// List all preset names.
    List,
    /// Show the derived parameters of one preset for a given problem size.
    Describe {
        name: String,
        #[command(flatten)]
        shape: ProblemShape,
    },
}

#[derive(Args)]
struct ProblemShape {
    /// Number of components.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Smoothness constant.
    #[arg(long = "L", default_value_t = 1.0)]
    lipschitz: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, seed, epochs, out, threads } => {
            let overrides = Overrides { seed, epochs, out, threads };
            cmd_run(&config, &overrides).map(|()| true)
        }
        Command::Verify { perturb_omega } => cmd_verify(perturb_omega),
        Command::Presets { action } => match action {
            PresetsAction::List => cmd_presets_list().map(|()| true),
            PresetsAction::Describe { name, shape } => {
                cmd_presets_describe(&name, shape.n, shape.lipschitz).map(|()| true)
            }
        },
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
