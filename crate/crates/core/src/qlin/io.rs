//! Plain-text matrix exchange: a `rows cols` header line followed by
//! row-major `re im` pairs separated by whitespace.

use std::fmt::Write as _;

use num_complex::Complex;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Serializes `m`, one matrix row per line.
pub fn write_matrix<T: Real>(m: &ComplexMatrix<T>) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let line: Vec<String> = (0..m.cols())
            .map(|j| format!("{} {}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        let _ = writeln!(out, "{}", line.join("  "));
    }
    out
}

pub fn parse_matrix<T: Real>(text: &str) -> Result<ComplexMatrix<T>> {
    let mut tokens = text.split_whitespace();
    let mut dim = |what: &str| -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad {what}")))
    };
    let rows = dim("row count")?;
    let cols = dim("column count")?;
    let values: Vec<T> = tokens
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| Error::Parse(format!("bad number {t:?}")))
        })
        .collect::<Result<_>>()?;
    if values.len() != 2 * rows * cols {
        return Err(Error::Parse(format!(
            "expected {} reals for a {rows}x{cols} matrix, found {}",
            2 * rows * cols,
            values.len()
        )));
    }
    let data = values
        .chunks_exact(2)
        .map(|p| Complex::new(p[0], p[1]))
        .collect();
    ComplexMatrix::from_vec(rows, cols, data)
}
