use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use kacmat::error::{Error, Result};
use num_complex::Complex64;
use serde_json::Value;

pub const SPECTRA_HEADER: [&str; 3] = ["sample", "re", "im"];

/// Header plus rows, written as CSV.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// Shortest round-trip form, with an exponent far from unit scale.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_table(out: &mut dyn Write, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header).map_err(csv_error)?;
    for row in &table.rows {
        w.write_record(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(out: &mut dyn Write, value: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// `sample,re,im` rows; floats in shortest round-trip form.
pub fn points_table<'a>(sets: impl IntoIterator<Item = (u64, &'a [Complex64])>) -> Table {
    let mut t = Table::new(&SPECTRA_HEADER);
    for (i, pts) in sets {
        for z in pts {
            t.push(vec![i.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
        }
    }
    t
}

/// Reads a `sample,re,im` file. Sample indices run from zero to the largest
/// index present; indices without rows are empty point sets.
pub fn read_points(path: &Path) -> Result<Vec<Vec<Complex64>>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let header = r.headers().map_err(csv_error)?.clone();
    if header.iter().collect::<Vec<_>>() != SPECTRA_HEADER {
        return Err(Error::Parse(format!(
            "{}: expected header `sample,re,im`, found `{}`",
            path.display(),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut sets: BTreeMap<u64, Vec<Complex64>> = BTreeMap::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let bad =
            |what: &str| Error::Parse(format!("{} row {}: bad {what}", path.display(), line + 2));
        let field = |k: usize| rec.get(k).map(str::trim);
        let i: u64 = field(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("sample"))?;
        let re: f64 = field(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("re"))?;
        let im: f64 = field(2)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("im"))?;
        sets.entry(i).or_default().push(Complex64::new(re, im));
    }
    let Some((&last, _)) = sets.last_key_value() else {
        return Err(Error::Parse(format!("{}: no rows", path.display())));
    };
    Ok((0..=last)
        .map(|i| sets.remove(&i).unwrap_or_default())
        .collect())
}
