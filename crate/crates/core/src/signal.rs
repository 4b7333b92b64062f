use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::operator::AnalysisOperator;
use crate::rng::substream;

/// Entries of O x with magnitude at most `ZERO_TOL_REL * ||O x||_inf` count
/// as zero when deciding the analysis support.
pub const ZERO_TOL_REL: f64 = 1e-9;

const MAX_RETRIES: usize = 10;

/// A vector x together with the support S of its analysis coefficients O x.
#[derive(Debug, Clone)]
pub struct AnalysisSparseSignal {
    x: DVector<f64>,
    support: Vec<usize>,
}

impl AnalysisSparseSignal {
    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    /// Analysis support S (sorted, zero-based).
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Analysis sparsity s = |S|.
    pub fn s(&self) -> usize {
        self.support.len()
    }
}

/// Draws an s-analysis-sparse signal: the support is sampled uniformly among
/// size-s subsets of the analysis indices, and x is drawn from the null space
/// of the off-support rows of O, normalized to unit norm.
pub fn gen_analysis_sparse_signal(
    op: &AnalysisOperator,
    s: usize,
    rng_seed: u64,
) -> Result<AnalysisSparseSignal> {
    gen_analysis_sparse_signal_with_rng(op, s, &mut substream(rng_seed, &[0]))
}

pub fn gen_analysis_sparse_signal_with_rng<R: Rng>(
    op: &AnalysisOperator,
    s: usize,
    rng: &mut R,
) -> Result<AnalysisSparseSignal> {
    let p = op.p();
    if s > p {
        return Err(Error::InvalidArgument(format!("s = {s} exceeds p = {p}")));
    }
    let mut last_err = None;
    for _ in 0..MAX_RETRIES {
        let mut support: Vec<usize> = sample(rng, p, s).into_iter().collect();
        support.sort_unstable();
        match gen_signal_on_support(op, &support, rng) {
            Ok(sig) => return Ok(sig),
            Err(e @ Error::DegenerateDraw { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(Error::DegenerateDraw {
        retries: MAX_RETRIES,
    }))
}

/// Same construction with the support fixed by the caller.
pub fn gen_signal_on_support<R: Rng>(
    op: &AnalysisOperator,
    support: &[usize],
    rng: &mut R,
) -> Result<AnalysisSparseSignal> {
    let (p, n) = (op.p(), op.n());
    let s = support.len();
    if support.iter().any(|&i| i >= p) {
        return Err(Error::InvalidArgument("support index out of range".into()));
    }
    let support = {
        let mut sorted = support.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != s {
            return Err(Error::InvalidArgument("support indices must be distinct".into()));
        }
        sorted
    };
    let support = support.as_slice();
    if s == 0 {
        // O has full column rank, so O x supported on the empty set forces x = 0.
        return Ok(AnalysisSparseSignal {
            x: DVector::zeros(n),
            support: Vec::new(),
        });
    }
    let in_support = {
        let mut mask = vec![false; p];
        for &i in support {
            mask[i] = true;
        }
        mask
    };
    let null_basis = off_support_null_basis(op.matrix(), &in_support)?;
    if null_basis.ncols() == 0 {
        return Err(Error::InfeasibleSparsity { p, s, n });
    }
    for attempt in 0..MAX_RETRIES {
        let coeffs = DVector::from_fn(null_basis.ncols(), |_, _| {
            rng.sample::<f64, _>(StandardNormal)
        });
        let mut x = &null_basis * coeffs;
        let norm = x.norm();
        if norm == 0.0 {
            continue;
        }
        x /= norm;
        let c = op.apply(&x);
        let tol = ZERO_TOL_REL * c.amax();
        let realized: Vec<usize> = (0..p).filter(|&i| c[i].abs() > tol).collect();
        if realized == support {
            return Ok(AnalysisSparseSignal {
                x,
                support: support.to_vec(),
            });
        }
        let _ = attempt;
    }
    Err(Error::DegenerateDraw {
        retries: MAX_RETRIES,
    })
}

/// Orthonormal basis of null(O_{S^c}) via the eigendecomposition of the
/// off-support Gram matrix.
fn off_support_null_basis(matrix: &DMatrix<f64>, in_support: &[bool]) -> Result<DMatrix<f64>> {
    let n = matrix.ncols();
    let off_rows: Vec<usize> = (0..matrix.nrows()).filter(|&i| !in_support[i]).collect();
    if off_rows.is_empty() {
        return Ok(DMatrix::identity(n, n));
    }
    let b = matrix.select_rows(off_rows.iter());
    let gram = b.tr_mul(&b);
    let eig = gram.symmetric_eigen();
    let lambda_max = eig.eigenvalues.max().max(f64::MIN_POSITIVE);
    let null_cols: Vec<usize> = (0..n)
        .filter(|&j| eig.eigenvalues[j] <= 1e-12 * lambda_max)
        .collect();
    Ok(eig.eigenvectors.select_columns(null_cols.iter()))
}

/// Indices of the k largest-magnitude entries, ties broken by lowest index.
/// Returned sorted ascending.
pub fn best_k_term_support(coeffs: &DVector<f64>, k: usize) -> Result<Vec<usize>> {
    let p = coeffs.len();
    if k > p {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds vector length {p}"
        )));
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        coeffs[b]
            .abs()
            .partial_cmp(&coeffs[a].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut top: Vec<usize> = order.into_iter().take(k).collect();
    top.sort_unstable();
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::AnalysisOperator;
    use nalgebra::DMatrix;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity_op(n: usize) -> AnalysisOperator {
        AnalysisOperator::new(DMatrix::identity(n, n)).unwrap()
    }

    #[test]
    fn identity_signal_is_plain_sparse() {
        let op = identity_op(5);
        let sig = gen_analysis_sparse_signal(&op, 2, 7).unwrap();
        assert_eq!(sig.s(), 2);
        let nnz = sig.x().iter().filter(|v| v.abs() > 1e-12).count();
        assert_eq!(nnz, 2);
    }

    #[test]
    fn zero_sparsity_forces_zero_signal() {
        let op = identity_op(5);
        let sig = gen_analysis_sparse_signal(&op, 0, 7).unwrap();
        assert_eq!(sig.s(), 0);
        assert_eq!(sig.x().norm(), 0.0);
    }

    #[test]
    fn frame_signal_has_exact_analysis_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let op = AnalysisOperator::random_with_condition(60, 55, 1.1, &mut rng).unwrap();
        let sig = gen_analysis_sparse_signal_with_rng(&op, 10, &mut rng).unwrap();
        assert_eq!(sig.s(), 10);
        let c = op.apply(sig.x());
        let tol = ZERO_TOL_REL * c.amax();
        let realized: Vec<usize> = (0..60).filter(|&i| c[i].abs() > tol).collect();
        assert_eq!(realized, sig.support());
        approx::assert_relative_eq!(sig.x().norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn infeasible_sparsity_detected() {
        // p - s >= n leaves no null space for a generic frame
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let op = AnalysisOperator::random_with_condition(60, 55, 1.1, &mut rng).unwrap();
        let err = gen_analysis_sparse_signal_with_rng(&op, 4, &mut rng).unwrap_err();
        assert!(matches!(err, Error::InfeasibleSparsity { .. }));
    }

    #[test]
    fn deterministic_given_seed() {
        let op = identity_op(8);
        let a = gen_analysis_sparse_signal(&op, 3, 42).unwrap();
        let b = gen_analysis_sparse_signal(&op, 3, 42).unwrap();
        assert_eq!(a.x(), b.x());
        assert_eq!(a.support(), b.support());
    }

    #[test]
    fn best_k_examples() {
        let c = DVector::from_vec(vec![3.0, -5.0, 1.0]);
        assert_eq!(best_k_term_support(&c, 2).unwrap(), vec![0, 1]);
        assert_eq!(best_k_term_support(&c, 0).unwrap(), Vec::<usize>::new());
        assert_eq!(best_k_term_support(&c, 3).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn best_k_tie_break_lowest_index() {
        let c = DVector::from_vec(vec![1.0, -1.0, 1.0, 1.0]);
        assert_eq!(best_k_term_support(&c, 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn best_k_monotone_nested() {
        let c = DVector::from_vec(vec![0.3, -2.0, 0.3, 1.5, -0.2, 0.3]);
        let mut prev: Vec<usize> = Vec::new();
        for k in 0..=6 {
            let cur = best_k_term_support(&c, k).unwrap();
            assert!(prev.iter().all(|i| cur.contains(i)), "k = {k}");
            prev = cur;
        }
    }

    #[test]
    fn best_k_l1_ratio_at_equality() {
        // s-sparse with equal magnitudes: kept l1 mass is exactly k/s of the total
        let s = 6;
        let mut v = vec![0.0; 12];
        for i in 0..s {
            v[2 * i] = if i % 2 == 0 { 1.0 } else { -1.0 };
        }
        let c = DVector::from_vec(v);
        let total: f64 = c.iter().map(|x: &f64| x.abs()).sum();
        for k in 0..=s {
            let top = best_k_term_support(&c, k).unwrap();
            let kept: f64 = top.iter().map(|&i| c[i].abs()).sum();
            approx::assert_relative_eq!(
                kept,
                total * k as f64 / s as f64,
                epsilon = 1e-12
            );
        }
    }
}
