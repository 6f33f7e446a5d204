//! Command-line front end of the lattice laboratory.
//!
//! [`execute`] turns parsed arguments into an output [`Document`];
//! [`main_with`] adds argument parsing, file output and exit codes.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;

pub use cli::{Cli, Command};
use config::{parse_config, Settings};
pub use error::{CliError, Result};
pub use output::Document;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Spectrum(_) => "spectrum",
        Command::Simulate(_) => "simulate",
        Command::Drift(_) => "drift",
        Command::Resonances(_) => "resonances",
        Command::Kam(_) => "kam",
        Command::Residue(_) => "residue",
        Command::Symmetry(_) => "symmetry",
        Command::NormalformEval(_) => "normalform-eval",
    }
}

/// Runs one command and returns its document, header included.
pub fn execute(cli: &Cli) -> Result<Document> {
    let file = match &cli.config {
        None => Default::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })?;
            parse_config(&text)?
        }
    };
    let mut s = Settings::new(file);
    let seq = cli.sequential;
    let mut doc = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(&mut s, a),
        Command::Simulate(a) => commands::simulate(&mut s, a),
        Command::Drift(a) => commands::drift(&mut s, a, seq),
        Command::Resonances(a) => commands::resonances(&mut s, a, seq),
        Command::Kam(a) => commands::kam(&mut s, a),
        Command::Residue(a) => commands::residue(&mut s, a),
        Command::Symmetry(a) => commands::symmetry(&mut s, a),
        Command::NormalformEval(a) => commands::normalform_eval(&mut s, a),
    }?;
    s.finish()?;
    let mut header = vec![
        ("tool".to_string(), format!("kglab {VERSION}")),
        ("command".to_string(), command_name(&cli.command).to_string()),
    ];
    header.extend(s.effective().iter().cloned());
    if !cli.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        header.push(("timestamp".to_string(), secs.to_string()));
    }
    doc.header = header;
    Ok(doc)
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = execute(&cli).and_then(|doc| {
        let text = doc.emit();
        match &cli.output {
            Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            }),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
        }
    });
    match result {
        Ok(()) => error::EXIT_OK,
        Err(e) => {
            eprintln!("kglab: {e}");
            e.exit_code()
        }
    }
}
