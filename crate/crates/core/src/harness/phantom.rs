//! Built-in piecewise-constant ellipse phantom (head-phantom style), so the
//! image experiment ships no assets and is bit-reproducible.

use nalgebra::DMatrix;

/// (intensity, semi-axis a, semi-axis b, center x, center y, rotation in
/// degrees), on the [-1, 1]^2 square. Intensities are dyadic so summed
/// pixel values are exact (no rounding residue at region boundaries).
const ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.75, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.25, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.25, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.125, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.125, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.125, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.125, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.125, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.125, 0.023, 0.046, 0.06, -0.605, 0.0),
];

/// Rasterizes the phantom on a side x side grid (pixel centers). Entry
/// (i, j) holds image row i (top to bottom), column j (left to right).
pub fn phantom(side: usize) -> DMatrix<f64> {
    DMatrix::from_fn(side, side, |i, j| {
        let x = -1.0 + (2.0 * j as f64 + 1.0) / side as f64;
        let y = 1.0 - (2.0 * i as f64 + 1.0) / side as f64;
        let mut v = 0.0;
        for &(val, a, b, x0, y0, phi_deg) in &ELLIPSES {
            let phi = phi_deg.to_radians();
            let (s, c) = phi.sin_cos();
            let dx = x - x0;
            let dy = y - y0;
            let xr = c * dx + s * dy;
            let yr = -s * dx + c * dy;
            if (xr / a).powi(2) + (yr / b).powi(2) <= 1.0 {
                v += val;
            }
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let a = phantom(32);
        let b = phantom(32);
        assert_eq!(a, b);
        assert!(a.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn structure_present() {
        let img = phantom(64);
        // background is zero, skull ring bright, interior dimmer
        assert_eq!(img[(0, 0)], 0.0);
        assert_eq!(img[(63, 63)], 0.0);
        let center = img[(32, 32)];
        assert!(center > 0.0 && center < 1.0);
        // outer ellipse shell has full intensity somewhere on the midline
        let top_shell = (0..64).map(|i| img[(i, 32)]).fold(0.0f64, f64::max);
        assert_eq!(top_shell, 1.0);
        // nontrivial piecewise structure: several distinct gray levels
        let mut levels: Vec<i64> = img.iter().map(|&v| (v * 1e9).round() as i64).collect();
        levels.sort_unstable();
        levels.dedup();
        assert!(levels.len() >= 4, "{} levels", levels.len());
    }
}
