//! CSV tables with fixed numeric formatting.

use std::path::Path;

use qdpl::Spectrum;

use crate::{CliError, Result};

/// Nine significant digits, `.` as decimal point regardless of locale.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.8e}")
}

/// Writes an axis column followed by the spectrum's value columns.
pub fn write_spectrum(path: &Path, spectrum: &Spectrum) -> Result<()> {
    spectrum.validate()?;
    let mut header = vec![spectrum.axis_name.clone()];
    header.extend(spectrum.values.iter().map(|(n, _)| n.clone()));
    let rows = (0..spectrum.axis.len()).map(|i| {
        let mut r = vec![spectrum.axis[i]];
        r.extend(spectrum.values.iter().map(|(_, v)| v[i]));
        r
    });
    write_rows(path, &header, rows)
}

pub fn write_rows(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Csv { path: path.display().to_string(), reason: e.to_string() };
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.iter().map(|v| fmt_num(*v))).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv { path: path.display().to_string(), reason: e.to_string() })?;
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Header and numeric rows of a CSV written by [`write_rows`].
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_table(&text).map_err(|reason| CliError::Csv { path: path.display().to_string(), reason })
}

pub fn parse_table(text: &str) -> std::result::Result<Table, String> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err("missing header".into());
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| format!("row {row}: {e}"))?;
        if rec.len() != header.len() {
            return Err(format!("row {row}: expected {} fields, found {}", header.len(), rec.len()));
        }
        let vals = rec
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|_| format!("row {row}: `{f}` is not a number")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        rows.push(vals);
    }
    if rows.is_empty() {
        return Err("no data rows".into());
    }
    Ok(Table { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_num(1.0 / 3.0), "3.33333333e-1");
        assert_eq!(fmt_num(-1234.5), "-1.23450000e3");
    }

    #[test]
    fn parse_errors_name_the_row() {
        let e = parse_table("a,b\n1,2\n3,x\n").unwrap_err();
        assert!(e.contains("row 3"), "{e}");
        assert!(parse_table("a,b\n").unwrap_err().contains("no data"));
    }
}
