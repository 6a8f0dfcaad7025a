//! `polyosc`: tabulate, build, verify and export polynomial deformed
//! oscillator objects.
//!
//! Exit codes: 0 when every check passes, 1 on a check failure or a
//! divergent state, 2 on a configuration error.

mod commands;
mod settings;
mod suites;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Document;
use settings::{CommonArgs, ConfigError, Format, RunConfig};

#[derive(Parser)]
#[command(name = "polyosc", version, about = "Polynomial deformed oscillator algebras and their coherent states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of n, F(n), G(n), F(n)!.
    Tabulate(CommonArgs),
    /// Run invariant suites; nonzero exit on any failure.
    Verify(CommonArgs),
    /// Coherent-state coefficients and number distribution.
    State(CommonArgs),
    /// Ladder and number operator matrices.
    Dump(CommonArgs),
    /// Passage coefficients to the k-fermion algebra.
    Passage(CommonArgs),
    /// Frame diagonals of a resolving measure.
    Measure(CommonArgs),
}

fn render(doc: &Document, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&doc.json).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Csv => doc.csv.clone(),
        Format::Pretty => doc.pretty.clone(),
    }
}

fn emit(cfg: &RunConfig, doc: &Document) -> anyhow::Result<()> {
    let text = render(doc, cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(command: Command) -> Result<bool, (u8, String)> {
    let (args, run): (CommonArgs, fn(&RunConfig) -> anyhow::Result<Document>) = match command {
        Command::Tabulate(a) => (a, commands::tabulate),
        Command::Verify(a) => (a, |cfg| Ok(suites::verify(cfg))),
        Command::State(a) => (a, commands::state),
        Command::Dump(a) => (a, commands::dump),
        Command::Passage(a) => (a, commands::passage),
        Command::Measure(a) => (a, commands::measure),
    };
    let cfg = args.resolve().map_err(|ConfigError(m)| (2, m))?;
    let doc = run(&cfg).map_err(|e| (1, format!("{e:#}")))?;
    emit(&cfg, &doc).map_err(|e| (1, format!("{e:#}")))?;
    Ok(doc.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
