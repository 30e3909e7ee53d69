use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirty_bosons_harness::commands::{execute, Command, CommonArgs};
use dirty_bosons_harness::manifest::ToleranceProfile;
use dirty_bosons_harness::HarnessError;

#[derive(Parser)]
#[command(name = "dbosons", version, about = "Bose gas in a random potential: predictions, ensembles and checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Disorder stream; overrides `ensemble.stream`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output root; each run goes to `<out>/<run-id>/`.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = ToleranceProfile::Strict)]
    tolerance_profile: ToleranceProfile,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form predictions over the sweep axes.
    Predict(Common),
    /// Disorder realizations.
    Generate(Common),
    /// Lowest single-particle levels, and the tail fit for large ensembles.
    Spectrum(Common),
    /// Gross-Pitaevskii ground state.
    Gpe(Common),
    /// Ground state followed by fragment analysis.
    Fragments(Common),
    /// Acceptance experiment with a PASS/FAIL verdict.
    Verify {
        /// dos_tail, fragmentation or correlator.
        experiment: String,
        #[command(flatten)]
        common: Common,
    },
    /// Analytic table and ensemble measurements over the sweep axes.
    Sweep(Common),
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    let (command, common) = match cli.command {
        Cmd::Predict(c) => (Command::Predict, c),
        Cmd::Generate(c) => (Command::Generate, c),
        Cmd::Spectrum(c) => (Command::Spectrum, c),
        Cmd::Gpe(c) => (Command::Gpe, c),
        Cmd::Fragments(c) => (Command::Fragments, c),
        Cmd::Verify { experiment, common } => (Command::Verify { experiment }, common),
        Cmd::Sweep(c) => (Command::Sweep, c),
    };
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HarnessError::Validation(format!("--threads: {e}")))?;
    }
    let args = CommonArgs {
        config: common.config,
        seed: common.seed,
        out: common.out,
        profile: common.tolerance_profile,
    };
    let outcome = execute(&command, &args)?;
    print!("{}", outcome.summary);
    if !outcome.summary.ends_with('\n') {
        println!();
    }
    println!("run directory: {}", outcome.run_dir.display());
    Ok(outcome.passed.unwrap_or(true))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
