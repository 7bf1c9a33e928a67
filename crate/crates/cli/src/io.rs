use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::error::CliError;

/// Reads numeric CSV rows, checking every row has `width` columns when given.
pub fn read_rows(path: &Path, header: bool, width: Option<usize>) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    CliError::Input(format!("{} row {}: bad number {f:?}", path.display(), line + 1))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if let Some(w) = width {
            if row.len() != w {
                return Err(CliError::Input(format!(
                    "{} row {}: expected {w} columns, got {}",
                    path.display(),
                    line + 1,
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(io::BufWriter::new(io::stdout()))),
    }
}

fn write_err(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("write failed: {e}"))
}

/// Writes rows with `Display` formatting, which round-trips `f64` exactly.
pub fn write_rows<T: std::fmt::Display>(
    out: Box<dyn Write>,
    header: Option<Vec<String>>,
    rows: &[Vec<T>],
) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    if let Some(h) = header {
        w.write_record(&h).map_err(write_err)?;
    }
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(write_err)?;
    }
    w.flush().map_err(write_err)
}

pub fn write_json<T: serde::Serialize>(mut out: Box<dyn Write>, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value).map_err(write_err)?;
    writeln!(out).map_err(write_err)?;
    out.flush().map_err(write_err)
}
