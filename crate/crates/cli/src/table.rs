//! CSV output: comma-separated, UTF-8, header row, floats printed with 17
//! significant digits so they round-trip bit-exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use openqs::dynamics::SeriesTable;

use crate::error::CliError;

/// `{:.16e}` gives 1 + 16 = 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_columns(
    path: &Path,
    header: &[&str],
    columns: &[&[f64]],
    overwrite: bool,
) -> Result<(), CliError> {
    if path.exists() && !overwrite {
        return Err(CliError::Io(format!(
            "refusing to overwrite {} (pass --overwrite)",
            path.display()
        )));
    }
    assert_eq!(header.len(), columns.len(), "header/column mismatch");
    let rows = columns.first().map(|c| c.len()).unwrap_or(0);
    for c in columns {
        assert_eq!(c.len(), rows, "ragged columns");
    }
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for i in 0..rows {
        let mut line = String::new();
        for (k, c) in columns.iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            line.push_str(&fmt_f64(c[i]));
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Series table as CSV with `time` leading.
pub fn write_series(path: &Path, table: &SeriesTable, overwrite: bool) -> Result<(), CliError> {
    let mut header: Vec<&str> = vec!["time"];
    let mut columns: Vec<&[f64]> = vec![&table.time];
    for (name, values) in &table.columns {
        header.push(name);
        columns.push(values);
    }
    write_columns(path, &header, &columns, overwrite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn float_format_round_trips() {
        for &x in &[0.1, -3.75e-11, std::f64::consts::PI, 1.0 / 3.0, 6.02e23] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s} did not round-trip");
        }
    }

    #[test]
    fn writes_header_and_rows() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_columns(&path, &["time", "x"], &[&[0.0, 1.0], &[2.0, 3.0]], false).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "time,x");
        assert_eq!(lines.count(), 2);
    }
}
