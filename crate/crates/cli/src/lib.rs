//! Command-line front end for `zeno-core`: survival curves, response
//! breakdowns, and the closed-form versus oracle verification report, written
//! as CSV or JSON.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{Context, Result};
use clap::Parser;

use crate::config::{resolve, Cli, RunConfig};

/// Exit status for a run whose verification report contains FLAG entries.
pub const EXIT_FLAGS: u8 = 2;
/// Exit status for IO and computation failures.
pub const EXIT_FAILURE: u8 = 1;
/// Exit status for malformed invocations.
pub const EXIT_USAGE: u8 = 64;

/// Execute a resolved configuration, writing the artifact to its destination
/// and diagnostics to `diag`. Returns the process exit status.
pub fn run(cfg: &RunConfig, diag: &mut dyn Write) -> Result<u8> {
    let outcome = commands::execute(cfg)?;
    match &cfg.output {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            outcome.table.write(cfg, &mut w)?;
            w.flush().with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            outcome.table.write(cfg, &mut w)?;
            w.flush()?;
        }
    }
    for note in &outcome.notes {
        writeln!(diag, "{note}")?;
    }
    let flagged = outcome.report.as_ref().is_some_and(|r| r.flag_count() > 0);
    Ok(if flagged && !cfg.params.allow_flags {
        EXIT_FLAGS
    } else {
        0
    })
}

/// Parse `args` (program name first), run, and map every failure onto an exit status.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve(&cli.command) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let stderr = io::stderr();
    let mut diag = stderr.lock();
    match run(&cfg, &mut diag) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(diag, "error: {e:#}");
            EXIT_FAILURE
        }
    }
}
