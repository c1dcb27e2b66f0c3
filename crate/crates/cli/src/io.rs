//! CSV and JSON plumbing. CSV files are comma-separated with one header row.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use eiv_core::{Dataset, Latent};
use serde_json::Value;

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))
}

fn parse(field: &str, row: usize, path: &Path) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| anyhow!("{}: row {row}: {field:?} is not a number", path.display()))?;
    if !v.is_finite() {
        bail!("{}: row {row}: value {field} is not finite", path.display());
    }
    Ok(v)
}

/// Reads a "y,x" file.
pub fn read_pairs(path: &Path) -> Result<Dataset> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "y" || &headers[1] != "x" {
        bail!("{}: expected header \"y,x\", found {:?}", path.display(), headers.iter().collect::<Vec<_>>());
    }
    let (mut y, mut x) = (Vec::new(), Vec::new());
    for (i, record) in rdr.records().enumerate() {
        let record = record.with_context(|| format!("{}: malformed row {}", path.display(), i + 1))?;
        y.push(parse(&record[0], i + 1, path)?);
        x.push(parse(&record[1], i + 1, path)?);
    }
    if y.is_empty() {
        bail!("{} has no data rows", path.display());
    }
    Ok(Dataset::new(y, x)?)
}

/// Reads one column, by name or the first one.
pub fn read_column(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers()?.clone();
    let idx = match column {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow!("{}: no column named {name:?}", path.display()))?,
        None => 0,
    };
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.with_context(|| format!("{}: malformed row {}", path.display(), i + 1))?;
        let field = record.get(idx).ok_or_else(|| anyhow!("{}: row {} is too short", path.display(), i + 1))?;
        out.push(parse(field, i + 1, path)?);
    }
    Ok(out)
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_columns(path: Option<&Path>, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink(path)?);
    w.write_record(header)?;
    for i in 0..columns[0].len() {
        w.write_record(columns.iter().map(|c| c[i].to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_pairs(data: &Dataset, path: Option<&Path>) -> Result<()> {
    write_columns(path, &["y", "x"], &[data.y(), data.x()])
}

pub fn write_latent(latent: &Latent, path: &Path) -> Result<()> {
    write_columns(Some(path), &["xi", "delta", "epsilon"], &[&latent.xi, &latent.delta, &latent.epsilon])
}

/// Pretty JSON followed by a newline.
pub fn emit(value: &Value, path: Option<&Path>) -> Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
