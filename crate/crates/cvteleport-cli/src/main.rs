//! `cvteleport` — figure data, sweeps, optimization and verification for the
//! continuous-variable teleportation interferometer.
//!
//! Exit codes: 0 success, 1 bad arguments, 2 verification failure, 3 oracle
//! truncation leakage above the reliability limit.

mod figures;
mod output;
mod params;
mod verify;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use figures::{cmd_fig, cmd_optimize, cmd_oracle_check, cmd_sweep, Figure, FreeSel, SweepVariable};
use output::{emit, Table};
use params::ParamFlags;
use std::path::PathBuf;
use std::process::ExitCode;
use verify::Suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(name = "cvteleport", version, about = "Teleportation interferometry simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce the data behind a published figure.
    Fig {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        flags: ParamFlags,
        #[command(flatten)]
        io: IoFlags,
    },
    /// Sweep one variable; every other parameter is held at its flag value.
    Sweep {
        #[arg(value_enum)]
        variable: SweepVariable,
        #[command(flatten)]
        flags: ParamFlags,
        #[command(flatten)]
        io: IoFlags,
    },
    /// Numerically maximize the visibility over the free parameters.
    Optimize {
        #[arg(long, value_enum, default_value = "lambda")]
        free: FreeSel,
        #[command(flatten)]
        flags: ParamFlags,
        #[command(flatten)]
        io: IoFlags,
    },
    /// Run one verification suite; exits 2 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        flags: ParamFlags,
        #[command(flatten)]
        io: IoFlags,
    },
    /// Cross-check one configuration against the truncated dense simulation.
    OracleCheck {
        #[command(flatten)]
        flags: ParamFlags,
        #[command(flatten)]
        io: IoFlags,
    },
}

#[derive(Debug, clap::Args)]
struct IoFlags {
    /// Write the result to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format for tabular commands.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn emit_table(table: &Table, io: &IoFlags) -> Result<(), String> {
    let text = match io.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut t = table.to_json();
            t.push('\n');
            t
        }
    };
    emit(&text, io.out.as_deref())
}

fn with_thread_pool<T: Send>(
    threads: Option<usize>,
    body: impl FnOnce() -> Result<T, String> + Send,
) -> Result<T, String> {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| e.to_string())?
            .install(body),
        None => body(),
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Fig { figure, flags, io } => {
            let params = flags.resolve()?;
            let table = with_thread_pool(params.threads, || cmd_fig(figure, &params))?;
            emit_table(&table, &io)?;
            Ok(0)
        }
        Command::Sweep { variable, flags, io } => {
            let params = flags.resolve()?;
            let table = with_thread_pool(params.threads, || cmd_sweep(variable, &params))?;
            emit_table(&table, &io)?;
            Ok(0)
        }
        Command::Optimize { free, flags, io } => {
            let params = flags.resolve()?;
            let value = cmd_optimize(free, &params)?;
            let mut text = serde_json::to_string_pretty(&value).expect("result serializes");
            text.push('\n');
            emit(&text, io.out.as_deref())?;
            Ok(0)
        }
        Command::Verify { suite, flags, io } => {
            let params = flags.resolve()?;
            let report = verify::run_suite(suite, params.chi)?;
            match io.format {
                Format::Json => {
                    let mut text =
                        serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
                    text.push('\n');
                    emit(&text, io.out.as_deref())?;
                }
                Format::Csv => {
                    // Human-readable PASS/FAIL lines on stdout; --out still
                    // captures the JSON report for tooling.
                    emit(&report.to_text(), None)?;
                    if let Some(path) = &io.out {
                        let mut text = serde_json::to_string_pretty(&report.to_json())
                            .expect("report serializes");
                        text.push('\n');
                        emit(&text, Some(path))?;
                    }
                }
            }
            Ok(if report.passed() { 0 } else { 2 })
        }
        Command::OracleCheck { flags, io } => {
            let params = flags.resolve()?;
            let check = cmd_oracle_check(&params)?;
            let mut text = serde_json::to_string_pretty(&check.json).expect("result serializes");
            text.push('\n');
            emit(&text, io.out.as_deref())?;
            Ok(if check.leaked { 3 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
