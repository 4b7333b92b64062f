use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Normalized mean square error ||xhat - x||_2 / ||x||_2.
pub fn nmse(xhat: &DVector<f64>, x: &DVector<f64>) -> Result<f64> {
    if xhat.len() != x.len() {
        return Err(Error::Shape(format!(
            "length mismatch {} vs {}",
            xhat.len(),
            x.len()
        )));
    }
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((xhat - x).norm() / norm)
}

/// Peak signal-to-noise ratio in decibels,
/// 20 log10(||X||_inf sqrt(n1 n2) / ||X - Xhat||_F).
/// Identical images give +infinity.
pub fn psnr(xhat: &DMatrix<f64>, x: &DMatrix<f64>) -> f64 {
    assert_eq!(xhat.shape(), x.shape(), "image shapes must match");
    let err = (x - xhat).norm();
    if err == 0.0 {
        return f64::INFINITY;
    }
    let peak = x.amax();
    let (n1, n2) = x.shape();
    20.0 * (peak * ((n1 * n2) as f64).sqrt() / err).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nmse_examples() {
        let x = DVector::from_vec(vec![2.0, 0.0]);
        assert_eq!(nmse(&x, &x).unwrap(), 0.0);
        let zero = DVector::zeros(2);
        assert_relative_eq!(nmse(&zero, &x).unwrap(), 1.0);
        // unit-norm perturbation of a norm-2 reference
        let xhat = DVector::from_vec(vec![2.0, 1.0]);
        assert_relative_eq!(nmse(&xhat, &x).unwrap(), 0.5);
        assert!(matches!(nmse(&x, &zero), Err(Error::ZeroReference)));
    }

    #[test]
    fn psnr_examples() {
        let x = DMatrix::from_element(2, 2, 1.0);
        assert!(psnr(&x, &x).is_infinite());
        let xhat = DMatrix::from_element(2, 2, 2.0);
        // 20 log10(1 * 2 / 2) = 0 dB
        assert_relative_eq!(psnr(&xhat, &x), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn metrics_permutation_invariant() {
        let x = DVector::from_vec(vec![1.0, -2.0, 3.0, 0.5]);
        let xhat = DVector::from_vec(vec![0.9, -2.2, 3.3, 0.1]);
        let perm = [2usize, 0, 3, 1];
        let xp = DVector::from_fn(4, |i, _| x[perm[i]]);
        let xhp = DVector::from_fn(4, |i, _| xhat[perm[i]]);
        assert_relative_eq!(nmse(&xhat, &x).unwrap(), nmse(&xhp, &xp).unwrap());

        let xm = DMatrix::from_vec(2, 2, x.as_slice().to_vec());
        let xhm = DMatrix::from_vec(2, 2, xhat.as_slice().to_vec());
        let xpm = DMatrix::from_vec(2, 2, xp.as_slice().to_vec());
        let xhpm = DMatrix::from_vec(2, 2, xhp.as_slice().to_vec());
        assert_relative_eq!(psnr(&xhm, &xm), psnr(&xhpm, &xpm));
    }
}
