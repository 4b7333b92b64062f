//! Plain-text interchange: matrices and vectors as row-major CSV, metadata
//! as JSON sidecars, images as binary portable graymaps.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Writes a matrix as CSV, one row per line.
pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            // ryu-style shortest round-trip formatting via Display on f64
            out.push_str(&format!("{:?}", m[(i, j)]));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a CSV of numbers into a matrix; all rows must have equal length.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "{}:{}: ragged row ({} vs {} columns)",
                    path.display(),
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{}: empty matrix", path.display())));
    }
    let (nr, nc) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

/// Writes a vector as a single-column CSV.
pub fn write_vector_csv(path: &Path, v: &DVector<f64>) -> Result<()> {
    let m = DMatrix::from_fn(v.len(), 1, |i, _| v[i]);
    write_matrix_csv(path, &m)
}

/// Reads a vector from CSV; accepts a single column or a single row.
pub fn read_vector_csv(path: &Path) -> Result<DVector<f64>> {
    let m = read_matrix_csv(path)?;
    if m.ncols() == 1 {
        Ok(DVector::from_fn(m.nrows(), |i, _| m[(i, 0)]))
    } else if m.nrows() == 1 {
        Ok(DVector::from_fn(m.ncols(), |j, _| m[(0, j)]))
    } else {
        Err(Error::Parse(format!(
            "{}: expected a vector, got {}x{}",
            path.display(),
            m.nrows(),
            m.ncols()
        )))
    }
}

/// Writes a pretty-printed JSON sidecar.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Writes an image as a binary 8-bit PGM, mapping [lo, hi] linearly to
/// 0..255 where lo/hi are the image min/max (flat images map to 0).
pub fn write_pgm(path: &Path, img: &DMatrix<f64>) -> Result<()> {
    let (h, w) = img.shape();
    let lo = img.min();
    let hi = img.max();
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let mut file = fs::File::create(path)?;
    write!(file, "P5\n{w} {h}\n255\n")?;
    let mut bytes = Vec::with_capacity(w * h);
    for i in 0..h {
        for j in 0..w {
            let t = ((img[(i, j)] - lo) / span * 255.0).round().clamp(0.0, 255.0);
            bytes.push(t as u8);
        }
    }
    file.write_all(&bytes)?;
    Ok(())
}
