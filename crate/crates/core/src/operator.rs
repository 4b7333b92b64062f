use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Relative tolerance below which the smallest singular value marks the
/// operator as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// A dense p x n analysis operator (p >= n, full column rank) with cached
/// spectral data: the operator norm, the pseudo-inverse norm and the
/// condition number kappa = ||O|| * ||O^+||.
#[derive(Debug, Clone)]
pub struct AnalysisOperator {
    matrix: DMatrix<f64>,
    op_norm: f64,
    pinv_norm: f64,
    /// Some(c) when O^T O = c I, which lets the solver use a Woodbury
    /// factorization instead of forming the n x n Gram matrix.
    tight_frame: Option<f64>,
}

impl AnalysisOperator {
    /// Builds an operator from a dense matrix, computing its spectral data
    /// by singular value decomposition.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (p, n) = matrix.shape();
        if p < n {
            return Err(Error::Shape(format!(
                "analysis operator must have p >= n, got {p} x {n}"
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "analysis operator entries must be finite".into(),
            ));
        }
        let svd = matrix.clone().svd(false, false);
        let sigma_max = svd.singular_values.max();
        let sigma_min = svd.singular_values.min();
        if sigma_min <= RANK_TOL * sigma_max {
            return Err(Error::RankDeficient {
                sigma_min,
                sigma_max,
            });
        }
        let tight_frame = if sigma_max - sigma_min <= 1e-12 * sigma_max {
            Some(sigma_max * sigma_max)
        } else {
            None
        };
        Ok(Self {
            matrix,
            op_norm: sigma_max,
            pinv_norm: 1.0 / sigma_min,
            tight_frame,
        })
    }

    /// Constructor for operators whose spectral data is known by
    /// construction (controlled-condition frames, Parseval wavelet frames).
    /// A claimed tight frame is spot-checked with random probes.
    pub(crate) fn from_parts(
        matrix: DMatrix<f64>,
        op_norm: f64,
        pinv_norm: f64,
        tight_frame: Option<f64>,
    ) -> Self {
        debug_assert!(matrix.nrows() >= matrix.ncols());
        if let Some(c) = tight_frame {
            let n = matrix.ncols();
            let mut rng = crate::rng::substream(0x7f7f, &[n as u64]);
            for _ in 0..2 {
                let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
                let gram_v = matrix.transpose() * (&matrix * &v);
                let err = (&gram_v - &v * c).norm();
                assert!(
                    err <= 1e-8 * c * v.norm(),
                    "tight-frame constant does not match the matrix (residual {err:.3e})"
                );
            }
        }
        Self {
            matrix,
            op_norm,
            pinv_norm,
            tight_frame,
        }
    }

    /// Random p x n operator with a prescribed condition number: a Gaussian
    /// matrix whose singular values are replaced by a log-linear ramp from
    /// 1 down to 1/kappa.
    pub fn random_with_condition<R: Rng>(
        p: usize,
        n: usize,
        kappa: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if p < n || n == 0 {
            return Err(Error::Shape(format!("need p >= n >= 1, got {p} x {n}")));
        }
        if kappa < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "condition number must be >= 1, got {kappa}"
            )));
        }
        let g = DMatrix::from_fn(p, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let svd = g.svd(true, true);
        let u = svd.u.as_ref().expect("svd with u");
        let v_t = svd.v_t.as_ref().expect("svd with v_t");
        let log_kappa = kappa.ln();
        let ramp = DVector::from_fn(n, |i, _| {
            if n == 1 {
                1.0
            } else {
                (-log_kappa * i as f64 / (n - 1) as f64).exp()
            }
        });
        let mut scaled = u.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= ramp[j];
        }
        let matrix = scaled * v_t;
        let tight = if kappa == 1.0 { Some(1.0) } else { None };
        Ok(Self::from_parts(matrix, 1.0, kappa, tight))
    }

    /// Deterministic p x n section of the orthogonal cosine transform: the
    /// first n columns of the p x p DCT-II matrix. Columns are orthonormal,
    /// so the frame is tight with kappa = 1.
    pub fn cosine_frame(p: usize, n: usize) -> Result<Self> {
        if p < n || n == 0 {
            return Err(Error::Shape(format!("need p >= n >= 1, got {p} x {n}")));
        }
        let scale = (2.0 / p as f64).sqrt();
        let matrix = DMatrix::from_fn(p, n, |k, j| {
            let row_scale = if k == 0 { scale / 2f64.sqrt() } else { scale };
            row_scale * (std::f64::consts::PI * (2 * j + 1) as f64 * k as f64 / (2 * p) as f64).cos()
        });
        Ok(Self::from_parts(matrix, 1.0, 1.0, Some(1.0)))
    }

    pub fn p(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    pub fn pinv_norm(&self) -> f64 {
        self.pinv_norm
    }

    /// Condition number kappa(O) = ||O||_{2->2} * ||O^+||_{2->2}.
    pub fn kappa(&self) -> f64 {
        self.op_norm * self.pinv_norm
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub(crate) fn tight_frame_constant(&self) -> Option<f64> {
        self.tight_frame
    }

    /// Analysis coefficients O x.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    pub fn apply_transpose(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        self.matrix.tr_mul(coeffs)
    }
}
