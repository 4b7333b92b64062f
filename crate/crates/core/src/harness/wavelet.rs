//! Undecimated two-level Haar wavelet frame for square images, materialized
//! as a dense Parseval analysis operator with redundancy 7.
//!
//! One-dimensional building blocks are circulant low/high-pass filters with
//! coefficient 1/2, so H^T H + G^T G = I at each level; the seven separable
//! two-dimensional sub-bands then satisfy O^T O = I exactly.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::AnalysisOperator;

/// Number of sub-bands in the two-level separable decomposition.
pub const NUM_BANDS: usize = 7;

/// Circulant filter with taps (1/2, ±1/2) at lags 0 and `lag`.
fn circulant(side: usize, lag: usize, sign: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(side, side);
    for i in 0..side {
        m[(i, i)] += 0.5;
        m[(i, (i + lag) % side)] += sign * 0.5;
    }
    m
}

/// The seven 2-D sub-band matrices, each side^2 x side^2, ordered
/// approximation first, then level-2 details, then level-1 details:
/// AA, AD2, DA2, DD2, AD1, DA1, DD1 (A = low-pass, D = detail).
pub fn haar_bands(side: usize) -> Result<Vec<DMatrix<f64>>> {
    if side < 4 {
        return Err(Error::InvalidArgument(format!(
            "image side must be >= 4, got {side}"
        )));
    }
    let h1 = circulant(side, 1, 1.0);
    let g1 = circulant(side, 1, -1.0);
    let h2 = circulant(side, 2, 1.0);
    let g2 = circulant(side, 2, -1.0);
    let hh = &h2 * &h1; // two-level low-pass
    let gh = &g2 * &h1; // level-2 detail

    Ok(vec![
        hh.kronecker(&hh),
        hh.kronecker(&gh),
        gh.kronecker(&hh),
        gh.kronecker(&gh),
        h1.kronecker(&g1),
        g1.kronecker(&h1),
        g1.kronecker(&g1),
    ])
}

/// Stacks the sub-bands into a (7 side^2) x side^2 Parseval analysis
/// operator. Rows [k n, (k+1) n) hold band k, n = side^2.
pub fn undecimated_haar_frame(side: usize) -> Result<AnalysisOperator> {
    let bands = haar_bands(side)?;
    let n = side * side;
    let mut matrix = DMatrix::zeros(NUM_BANDS * n, n);
    for (k, band) in bands.iter().enumerate() {
        matrix.rows_mut(k * n, n).copy_from(band);
    }
    Ok(AnalysisOperator::from_parts(matrix, 1.0, 1.0, Some(1.0)))
}

/// Row index range of each sub-band within the stacked operator.
pub fn band_ranges(side: usize) -> Vec<(usize, usize)> {
    let n = side * side;
    (0..NUM_BANDS).map(|k| (k * n, (k + 1) * n)).collect()
}
