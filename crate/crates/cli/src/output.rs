//! CSV and manifest writers. Every file starts with `#` comment lines that
//! carry the resolved configuration.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use kitwpa_core::spectrum::{fmt_f64, Spectrum};
use serde::Serialize;

use crate::config::Config;
use crate::CliError;

/// Comment block: command line summary, notes, then the config as TOML.
pub fn header_comments(command: &str, config: &Config, notes: &[String]) -> Vec<String> {
    let mut lines = vec![format!("kitwpa {command}")];
    lines.extend(notes.iter().map(|n| format!("note: {n}")));
    lines.push("resolved config:".to_string());
    lines.extend(
        config
            .to_toml()
            .lines()
            .filter(|l| !l.is_empty())
            .map(str::to_string),
    );
    lines
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Domain(format!("cli::write: {}: {e}", path.display()))
}

/// A cell in a plain CSV table.
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

pub fn write_table(
    path: &Path,
    comments: &[String],
    header: &str,
    rows: &[Vec<Cell>],
) -> Result<(), CliError> {
    let mut text = String::new();
    for c in comments {
        let _ = writeln!(text, "# {c}");
    }
    let _ = writeln!(text, "{header}");
    for row in rows {
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        let _ = writeln!(text, "{}", cells.join(","));
    }
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn write_spectrum(path: &Path, comments: &[String], s: &Spectrum) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    s.write_csv(&mut out, comments)
        .map_err(|e| io_err(path, e))?;
    out.flush().map_err(|e| io_err(path, e))
}

/// `<out>.manifest.toml`
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.toml");
    PathBuf::from(name)
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    output: String,
    notes: &'a [String],
    results: &'a toml::Table,
    config: &'a Config,
}

pub fn write_manifest(
    out: &Path,
    command: &str,
    config: &Config,
    notes: &[String],
    results: &toml::Table,
) -> Result<PathBuf, CliError> {
    let path = manifest_path(out);
    let manifest = Manifest {
        command,
        output: out.display().to_string(),
        notes,
        results,
        config,
    };
    let text =
        toml::to_string(&manifest).map_err(|e| CliError::Domain(format!("cli::manifest: {e}")))?;
    std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(path)
}
