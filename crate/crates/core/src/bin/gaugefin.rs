//! Batch front end. Exit status: 0 success, 1 usage or input error,
//! 2 computation error. Failures print a JSON error object on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gaugefin::io::{run, Command, RunConfig, RunOptions};
use gaugefin::Error;

const THREADS_ENV: &str = "GAUGEFIN_THREADS";

#[derive(Parser)]
#[command(
    name = "gaugefin",
    version,
    about = "Gauge-invariant portfolio analytics"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Omit the timestamp so identical runs produce identical bytes.
    #[arg(long)]
    canonical: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate asset paths and summarize them.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Export the first simulated path as a panel CSV.
        #[arg(long)]
        export_panel: Option<PathBuf>,
    },
    /// Extract the market gauge fields A and B_N from a panel.
    Gauge {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        panel: Option<PathBuf>,
    },
    /// Diversification scaling and Etemadi convergence studies.
    Riskfree {
        #[command(flatten)]
        common: Common,
    },
    /// Solve the gauge-field pricing equation.
    Price {
        #[command(flatten)]
        common: Common,
    },
    /// Final values in risk-free units and discount factors.
    Discount {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        panel: Option<PathBuf>,
    },
    /// Drift-insensitive portfolio weights.
    Sensitivity {
        #[command(flatten)]
        common: Common,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    eprintln!(
        "{}",
        serde_json::json!({ "error": { "kind": kind, "message": message, "exit_code": code } })
    );
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string(), 1),
    };
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                return fail(
                    "usage",
                    format!("{THREADS_ENV} must be a positive integer, got {v:?}"),
                    1,
                )
            }
        }
    }
    let (command, common, options) = match cli.command {
        Cmd::Simulate {
            common,
            export_panel,
        } => (
            Command::Simulate,
            common,
            RunOptions {
                export_panel,
                ..Default::default()
            },
        ),
        Cmd::Gauge { common, panel } => (
            Command::Gauge,
            common,
            RunOptions {
                panel,
                ..Default::default()
            },
        ),
        Cmd::Riskfree { common } => (Command::Riskfree, common, RunOptions::default()),
        Cmd::Price { common } => (Command::Price, common, RunOptions::default()),
        Cmd::Discount { common, panel } => (
            Command::Discount,
            common,
            RunOptions {
                panel,
                ..Default::default()
            },
        ),
        Cmd::Sensitivity { common } => (Command::Sensitivity, common, RunOptions::default()),
    };
    let options = RunOptions {
        canonical: common.canonical,
        ..options
    };
    let config = match &common.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => return fail("config", e.to_string(), exit_code(&e)),
        },
        None => RunConfig::default(),
    };
    let result = run(command, &config, &options).and_then(|report| {
        let text = report.to_json()?;
        match &common.output {
            Some(path) => std::fs::write(path, text).map_err(Error::from),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            fail(
                if code == 1 { "input" } else { "computation" },
                e.to_string(),
                code,
            )
        }
    }
}
