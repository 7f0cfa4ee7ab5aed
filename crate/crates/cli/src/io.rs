use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use realgap_core::number::Rational;

use crate::error::CliError;

pub fn parse_rational(name: &str, text: &str) -> Result<Rational, CliError> {
    text.parse().map_err(|e| CliError::usage(format!("{name}: {e}")))
}

/// Comma-separated rationals; the empty string is the empty vector.
pub fn parse_rational_list(name: &str, text: &str) -> Result<Vec<Rational>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|t| parse_rational(name, t)).collect()
}

pub fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(CliError::Failure),
        None => {
            let mut out = std::io::stdout().lock();
            let nl = if text.ends_with('\n') { "" } else { "\n" };
            match write!(out, "{text}{nl}") {
                // a closed pipe (e.g. `| head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Failure(e.into())),
                _ => Ok(()),
            }
        }
    }
}

/// `p/q`, or just `p` for integers.
pub fn show(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        q.to_string()
    }
}
