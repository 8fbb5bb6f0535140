//! `conslaw`: verification reports for the exact conservation-law pipelines.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::Value;

use commands::{EmtArgs, LedgerArgs, LemmaArgs, SweepArgs};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "conslaw", version, about = "Exact checks for generalized isometric embeddings and conservation laws")]
struct Cli {
    /// Write the JSON report here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the Gauss-map pre-image and check residuals and the rank certificate
    VerifyLemma(LemmaArgs),
    /// Dimension ledger and the Cartan-test equality
    Ledger(LedgerArgs),
    /// Build the explicit integral flag and run the Cartan test on it
    Flag(LemmaArgs),
    /// Check d_∇τ = (∇·T) vol on a metric chart
    EmtAudit(EmtArgs),
    /// Lemma checks over a grid of (n, m) and random ψ
    Sweep(SweepArgs),
}

fn inputs<T: serde::Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn run(command: &Command) -> Report {
    let started = Instant::now();
    let (name, echo, outcome) = match command {
        Command::VerifyLemma(a) => ("verify-lemma", inputs(a), commands::verify_lemma_cmd(a)),
        Command::Ledger(a) => ("ledger", inputs(a), commands::ledger_cmd(a)),
        Command::Flag(a) => ("flag", inputs(a), commands::flag_cmd(a)),
        Command::EmtAudit(a) => ("emt-audit", inputs(a), commands::emt_audit_cmd(a)),
        Command::Sweep(a) => ("sweep", inputs(a), commands::sweep_cmd(a)),
    };
    report::assemble(name, echo, started, outcome)
}

fn emit(report: &Report, output: Option<&PathBuf>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(&cli.command);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Err(e) = emit(&report, cli.output.as_ref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.verdict.exit_code() as u8)
}
