//! CSV and JSON writers shared by the artifact producers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Writes a header row and numeric rows; floats use the shortest round-trip form.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    write_csv(BufWriter::new(File::create(path)?), header, rows)
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_round_trip_floats() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["lambda", "value"], vec![vec![4.0, 2.0], vec![0.1, 1.0 / 3.0]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "lambda,value\n4,2\n0.1,0.3333333333333333\n");
    }
}
