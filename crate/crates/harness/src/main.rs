use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use onet_harness::config::{ExperimentConfig, Params};
use onet_harness::error::HarnessError;
use onet_harness::experiments::{self, Check};
use onet_harness::suite;

#[derive(Parser)]
#[command(name = "onet", version, about = "Operator-learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// List the available experiments.
    List,
    /// Run the fast invariant suite.
    Check,
}

fn print_checks(group: &str, checks: &[Check]) {
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {group}/{}: {}", c.name, c.detail);
    }
}

fn run(path: &Path) -> Result<bool, HarnessError> {
    let mut cfg = ExperimentConfig::load(path).map_err(|e| match e {
        HarnessError::Io { path, source } => HarnessError::Config {
            line: 0,
            message: format!("cannot read {path}: {source}"),
        },
        other => other,
    })?;
    if let Some(dir) = std::env::var_os("ONET_OUT") {
        cfg.output_dir = PathBuf::from(dir);
    }
    let svg = Params::new(&cfg).bool("svg", false)?;
    let report = experiments::run(&cfg)?;
    report.write(&cfg.output_dir, svg)?;
    print_checks(&report.experiment, &report.checks);
    for (k, v) in &report.metrics {
        println!("  {k} = {v:.6e}");
    }
    println!("wrote {}", cfg.output_dir.display());
    Ok(report.passed())
}

fn check() -> Result<bool, HarnessError> {
    let mut ok = true;
    for (group, checks) in suite::run_suite()? {
        print_checks(&group, &checks);
        ok &= checks.iter().all(|c| c.passed);
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config } => run(config),
        Command::List => {
            for e in experiments::registry() {
                println!("{:<20} {}", e.name, e.about);
            }
            Ok(true)
        }
        Command::Check => check(),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
