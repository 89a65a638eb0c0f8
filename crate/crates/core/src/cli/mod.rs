//! Command-line front end.
//!
//! Exit codes: 0 success, 1 property violation, 2 usage, parse or I/O error,
//! 3 semantically invalid input (not qubits, wrong length, not a state).

pub mod format;
pub mod io;
pub mod sweep;
pub mod verify;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::entanglement::{concurrence_vector, EntanglementVector, State};
use format::fmt_num;
use sweep::{MuRange, SweepRow, SweepSpec};
use verify::Suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SEMANTIC: i32 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid input: {0}")]
    Semantic(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Semantic(_) => EXIT_SEMANTIC,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "monogamy", version, about = "Concurrence and monogamy lower bounds for small multiqubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print C(A|rest) and every pairwise C(A|B_i) for a state file.
    Concurrence {
        #[arg(long)]
        state: PathBuf,
        /// Subsystem playing the role of A.
        #[arg(long, default_value_t = 0)]
        focus: usize,
    },
    /// Sweep μ and write every applicable bound to CSV.
    Bounds {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long)]
        gamma: f64,
        /// Defaults to --gamma.
        #[arg(long)]
        gamma_prime: Option<f64>,
        /// MIN:MAX:STEP
        #[arg(long, allow_hyphen_values = true)]
        mu_range: MuRange,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        focus: usize,
    },
    /// Run seeded property checks.
    Verify {
        /// lemmas, orderings, ckw, states or all
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Write the CSV behind one of the two comparison figures.
    Reproduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        figure: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one of the two worked example states as a JSON state file.
    Example {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Runs a parsed command, printing to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Concurrence { state, focus } => cmd_concurrence(&state, focus, out),
        Command::Bounds {
            state,
            alpha,
            gamma,
            gamma_prime,
            mu_range,
            out: path,
            focus,
        } => {
            let spec = SweepSpec::new(mu_range, alpha, gamma, gamma_prime)?;
            cmd_bounds(&state, focus, &spec, &path, out)
        }
        Command::Verify { suite, samples, seed } => cmd_verify(suite, samples, seed, out),
        Command::Reproduce { figure, out: path } => cmd_reproduce(figure, &path, out),
        Command::Example { which, out: path } => {
            let state = match which {
                1 => State::Pure(sweep::example1_state()),
                _ => State::Mixed(sweep::example2_state()),
            };
            io::write_state(&path, &state)?;
            Ok(EXIT_OK)
        }
    }
}

fn semantic(e: impl std::fmt::Display) -> CliError {
    CliError::Semantic(e.to_string())
}

fn console(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn load_vector(path: &Path, focus: usize) -> Result<EntanglementVector, CliError> {
    let state = io::read_state(path)?;
    concurrence_vector(&state, focus).map_err(semantic)
}

pub fn render_vector(ev: &EntanglementVector) -> String {
    let total = ev.total.map(fmt_num).unwrap_or_else(|| "n/a".to_string());
    let pairwise: Vec<String> = ev.pairwise.iter().copied().map(fmt_num).collect();
    format!("total: {total}\npairwise: {}\n", pairwise.join(", "))
}

pub fn cmd_concurrence(path: &Path, focus: usize, out: &mut dyn Write) -> Result<i32, CliError> {
    let ev = load_vector(path, focus)?;
    out.write_all(render_vector(&ev).as_bytes()).map_err(console)?;
    Ok(EXIT_OK)
}

fn write_rows(path: &Path, rows: &[SweepRow], columns: &[sweep::Column]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    sweep::write_csv(BufWriter::new(file), rows, columns)
}

/// Reports ordering breaks (exit 1) after the file is written.
fn finish_sweep(rows: &[SweepRow], out: &mut dyn Write) -> Result<i32, CliError> {
    let broken: Vec<String> = rows.iter().flat_map(SweepRow::violations).collect();
    writeln!(out, "{} rows written", rows.len()).map_err(console)?;
    if broken.is_empty() {
        return Ok(EXIT_OK);
    }
    for v in &broken {
        writeln!(out, "ordering violation at {v}").map_err(console)?;
    }
    Ok(EXIT_VIOLATION)
}

pub fn cmd_bounds(path: &Path, focus: usize, spec: &SweepSpec, csv: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let ev = load_vector(path, focus)?;
    let rows = sweep::run_sweep(&ev, spec);
    write_rows(csv, &rows, &sweep::full_columns())?;
    finish_sweep(&rows, out)
}

pub fn cmd_verify(suite: Suite, samples: usize, seed: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    let reports = verify::run_suite(suite, samples, seed);
    for r in &reports {
        writeln!(out, "{r}").map_err(console)?;
    }
    Ok(if reports.iter().all(verify::SuiteReport::passed) {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

/// Rows behind figure 1 (mixed W-class example) or 2 (pure example).
pub fn figure_rows(figure: u8) -> Vec<SweepRow> {
    let state = match figure {
        1 => State::Mixed(sweep::example2_state()),
        _ => State::Pure(sweep::example1_state()),
    };
    let ev = concurrence_vector(&state, 0).expect("example states are three qubits");
    sweep::run_sweep(&ev, &sweep::figure_sweep())
}

pub fn cmd_reproduce(figure: u8, csv: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(1..=2).contains(&figure) {
        return Err(CliError::Usage(format!("figure must be 1 or 2, got {figure}")));
    }
    let rows = figure_rows(figure);
    write_rows(csv, &rows, &sweep::figure_columns(figure == 2))?;
    finish_sweep(&rows, out)
}

/// Parses `args`, runs, and maps errors to exit codes with a diagnostic on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
