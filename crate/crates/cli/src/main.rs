use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lognls::check;
use lognls::runner::{self, SuiteError};
use lognls::{parse_config, Status};

const DEFAULT_OUT: &str = "lognls-out";

#[derive(Debug, Parser)]
#[command(version, about = "Split-step experiments for the logarithmic Schrödinger equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory (default: `[output] dir` from the config, then `lognls-out`)
    #[arg(long, global = true, env = "LOGNLS_OUT")]
    out: Option<PathBuf>,

    /// Overrides `scenario.seed`
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for `suite` and `check`
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one configuration file
    Run { config: PathBuf },
    /// Run every `*.toml` file in a directory
    Suite { dir: PathBuf },
    /// Run the built-in property suite
    Check,
}

fn exit(status: Status) -> ExitCode {
    ExitCode::from(status.exit_code() as u8)
}

fn run_one(path: &Path, out: Option<PathBuf>, seed: Option<u64>) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return exit(Status::ConfigError);
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return exit(Status::ConfigError);
        }
    };
    if let Some(seed) = seed {
        config.set_seed(seed);
    }
    let dir = out
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let record = match runner::run(&config, &dir) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot write to {}: {e}", dir.display());
            return exit(Status::ConfigError);
        }
    };
    match (&record.report, &record.error) {
        (Some(report), _) => {
            println!(
                "{}: {} (max discrepancy {:.3e})",
                record.scenario,
                if report.pass { "pass" } else { "FAIL" },
                report.max_discrepancy()
            );
            for key in report.failures() {
                println!(
                    "  {key}: {:.3e} > {:.3e}",
                    report.discrepancies[key], report.tolerances[key]
                );
            }
        }
        (None, Some(e)) => eprintln!("error: {e}"),
        (None, None) => {}
    }
    exit(record.status)
}

fn run_suite(dir: &Path, out: Option<PathBuf>, threads: usize, seed: Option<u64>) -> ExitCode {
    let out = out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    match runner::run_suite(dir, &out, threads, seed) {
        Ok(outcome) => {
            for row in &outcome.rows {
                println!("{}: {:?}", row.name, row.status);
            }
            exit(outcome.status)
        }
        Err(e @ (SuiteError::Empty(_) | SuiteError::Read { .. })) => {
            eprintln!("error: {e}");
            exit(Status::ConfigError)
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit(Status::ConfigError)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => run_one(&config, cli.out, cli.seed),
        Command::Suite { dir } => run_suite(&dir, cli.out, cli.threads, cli.seed),
        Command::Check => {
            let results = check::run_all(cli.threads);
            for r in &results {
                println!("{r}");
            }
            if results.iter().all(|r| r.pass) {
                ExitCode::SUCCESS
            } else {
                exit(Status::Fail)
            }
        }
    }
}
