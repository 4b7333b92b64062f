//! Solver for the weighted l1 analysis program
//!
//! ```text
//! min_z ||O z||_{1,w}   s.t.  ||y - A z||_2 <= eta,
//! ```
//!
//! by operator splitting on the stacked map z -> (O z, A z): consensus ADMM
//! with the weighted l1 term handled by soft-thresholding and the data
//! constraint by projection onto the eta-ball around y. eta = 0 falls out as
//! projection onto {y}, so the noiseless program shares the code path.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::AnalysisOperator;
use crate::profile::WeightVector;

/// Window length (iterations) over which relative objective change is
/// measured for the stopping rule.
const OBJ_WINDOW: usize = 50;

/// Iterations between penalty-parameter rebalancing steps.
const RHO_PERIOD: usize = 100;

/// Last iteration at which the penalty may change: convergence requires an
/// eventually constant penalty, so rebalancing is frozen after this point.
const RHO_ADAPT_CUTOFF: usize = 2000;

/// Gaussian measurements y = A x + noise with a declared noise bound.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    pub a: DMatrix<f64>,
    pub y: DVector<f64>,
    pub eta: f64,
}

impl MeasurementSet {
    pub fn new(a: DMatrix<f64>, y: DVector<f64>, eta: f64) -> Result<Self> {
        if a.nrows() != y.len() {
            return Err(Error::Shape(format!(
                "A has {} rows but y has length {}",
                a.nrows(),
                y.len()
            )));
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise bound must be finite and >= 0, got {eta}"
            )));
        }
        Ok(Self { a, y, eta })
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }
}

/// One recovery instance: measurements, analysis operator, weights and the
/// constraint radius (copied from the measurement set, overridable).
#[derive(Debug, Clone)]
pub struct RecoveryProblem<'a> {
    pub meas: &'a MeasurementSet,
    pub op: &'a AnalysisOperator,
    pub weights: &'a WeightVector,
    pub eta: f64,
}

impl<'a> RecoveryProblem<'a> {
    pub fn new(
        meas: &'a MeasurementSet,
        op: &'a AnalysisOperator,
        weights: &'a WeightVector,
    ) -> Result<Self> {
        if meas.n() != op.n() {
            return Err(Error::Shape(format!(
                "A has {} columns but the operator acts on R^{}",
                meas.n(),
                op.n()
            )));
        }
        if weights.p() != op.p() {
            return Err(Error::Shape(format!(
                "{} weights for {} analysis coefficients",
                weights.p(),
                op.p()
            )));
        }
        Ok(Self {
            meas,
            op,
            weights,
            eta: meas.eta,
        })
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    /// Weighted l1 objective ||O z||_{1,w}.
    pub fn objective(&self, z: &DVector<f64>) -> f64 {
        let c = self.op.apply(z);
        c.iter()
            .zip(self.weights.w().iter())
            .map(|(ci, wi)| wi * ci.abs())
            .sum()
    }

    /// Constraint overshoot ||y - A z||_2 - eta (negative when strictly
    /// feasible).
    pub fn feasibility_gap(&self, z: &DVector<f64>) -> f64 {
        (&self.meas.y - &self.meas.a * z).norm() - self.eta
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Feasibility tolerance, scaled internally by (1 + ||y||_2).
    pub tol_feas: f64,
    /// Relative objective-change tolerance over a 50-iteration window.
    pub tol_obj: f64,
    /// Initial ADMM penalty parameter.
    pub rho: f64,
    /// Rebalance rho from the primal/dual residual ratio every 100 iters.
    pub adapt_rho: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            tol_feas: 1e-6,
            tol_obj: 1e-8,
            rho: 1.0,
            adapt_rho: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryResult {
    pub xhat: DVector<f64>,
    pub iterations: usize,
    /// max(||y - A xhat||_2 - eta, 0).
    pub primal_residual: f64,
    /// ||O xhat||_{1,w}.
    pub objective: f64,
    /// Duality-gap surrogate: relative objective change over the final
    /// 50-iteration window. converged implies primal_residual <= the scaled
    /// feasibility tolerance and gap <= tol_obj.
    pub gap: f64,
    pub converged: bool,
}

/// out_i = sign(v_i) * max(|v_i| - thresh_i, 0).
pub fn weighted_soft_threshold(v: &DVector<f64>, thresh: &DVector<f64>) -> DVector<f64> {
    assert_eq!(v.len(), thresh.len());
    debug_assert!(thresh.iter().all(|&t| t >= 0.0));
    DVector::from_fn(v.len(), |i, _| {
        v[i].signum() * (v[i].abs() - thresh[i]).max(0.0)
    })
}

/// Solves G z = b for G = O^T O + A^T A without forming G when the operator
/// is a tight frame (O^T O = c I) and m < n, via the Woodbury identity
/// (c I + A^T A)^{-1} = (1/c)(I - A^T (c I + A A^T)^{-1} A).
enum GramSolver {
    Direct(Cholesky<f64, Dyn>),
    Woodbury { c: f64, small: Cholesky<f64, Dyn> },
}

impl GramSolver {
    fn build(op: &AnalysisOperator, a: &DMatrix<f64>) -> Result<Self> {
        let (m, n) = a.shape();
        if let Some(c) = op.tight_frame_constant() {
            if m < n {
                let mut aat = a * a.transpose();
                for i in 0..m {
                    aat[(i, i)] += c;
                }
                let small = Cholesky::new(aat).ok_or_else(|| {
                    Error::InvalidArgument("c I + A A^T is not positive definite".into())
                })?;
                return Ok(GramSolver::Woodbury { c, small });
            }
        }
        let gram = op.matrix().tr_mul(op.matrix()) + a.tr_mul(a);
        let chol = Cholesky::new(gram).ok_or_else(|| {
            Error::InvalidArgument("O^T O + A^T A is not positive definite".into())
        })?;
        Ok(GramSolver::Direct(chol))
    }

    fn solve(&self, a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
        match self {
            GramSolver::Direct(chol) => chol.solve(b),
            GramSolver::Woodbury { c, small } => {
                let ab = a * b;
                let corr = a.tr_mul(&small.solve(&ab));
                (b - corr) / *c
            }
        }
    }
}

/// Runs the ADMM iteration and returns the result together with the
/// per-iteration (feasibility overshoot, objective) trace.
pub fn solve_traced(
    problem: &RecoveryProblem<'_>,
    cfg: &SolverConfig,
) -> Result<(RecoveryResult, Vec<(f64, f64)>)> {
    if cfg.max_iters == 0 || !(cfg.rho > 0.0) || !(cfg.tol_feas > 0.0) || !(cfg.tol_obj >= 0.0) {
        return Err(Error::InvalidArgument(
            "solver config needs max_iters >= 1, rho > 0 and positive tolerances".into(),
        ));
    }
    let a = &problem.meas.a;
    let y = &problem.meas.y;
    let eta = problem.eta;
    if !(eta >= 0.0) {
        return Err(Error::InvalidArgument("eta must be >= 0".into()));
    }
    let op = problem.op;
    let w = problem.weights.w();
    let (m, n, p) = (a.nrows(), a.ncols(), op.p());

    let gram = GramSolver::build(op, a)?;
    let tol_feas = cfg.tol_feas * (1.0 + y.norm());

    let mut rho = cfg.rho;
    let mut v = DVector::zeros(p);
    let mut r = y.clone();
    let mut uv = DVector::zeros(p);
    let mut ur = DVector::zeros(m);
    let mut z = DVector::zeros(n);

    let mut trace = Vec::new();
    let mut obj_window: Vec<f64> = Vec::new();
    let mut iterations = cfg.max_iters;
    let mut converged = false;
    let mut gap = f64::INFINITY;

    for k in 0..cfg.max_iters {
        let rhs = op.apply_transpose(&(&v - &uv)) + a.tr_mul(&(&r - &ur));
        z = gram.solve(a, &rhs);
        let cv = op.apply(&z);
        let cr = a * &z;

        let v_old = v;
        let r_old = r;
        let thresh = w / rho;
        v = weighted_soft_threshold(&(&cv + &uv), &thresh);
        let mut rt = &cr + &ur;
        let d = &rt - y;
        let dn = d.norm();
        if dn > eta {
            rt = y + d * (eta / dn.max(f64::MIN_POSITIVE));
        }
        r = rt;
        uv += &cv - &v;
        ur += &cr - &r;

        let feas = (y - &cr).norm() - eta;
        let obj = cv
            .iter()
            .zip(w.iter())
            .map(|(ci, wi)| wi * ci.abs())
            .sum::<f64>();
        trace.push((feas, obj));

        obj_window.push(obj);
        if obj_window.len() > OBJ_WINDOW {
            obj_window.remove(0);
        }
        if obj_window.len() == OBJ_WINDOW {
            let first = obj_window[0];
            gap = (obj - first).abs() / (1.0 + obj.abs());
            if feas <= tol_feas && gap <= cfg.tol_obj {
                iterations = k + 1;
                converged = true;
                break;
            }
        }

        if cfg.adapt_rho && (k + 1) % RHO_PERIOD == 0 && k + 1 <= RHO_ADAPT_CUTOFF {
            let res_p = ((&cv - &v).norm_squared() + (&cr - &r).norm_squared()).sqrt();
            let res_d = rho
                * (op.apply_transpose(&(&v - &v_old)) + a.tr_mul(&(&r - &r_old))).norm();
            if res_p > 10.0 * res_d {
                rho *= 2.0;
                uv /= 2.0;
                ur /= 2.0;
            } else if res_d > 10.0 * res_p {
                rho /= 2.0;
                uv *= 2.0;
                ur *= 2.0;
            }
        }
    }

    let primal_residual = problem.feasibility_gap(&z).max(0.0);
    let objective = problem.objective(&z);
    Ok((
        RecoveryResult {
            xhat: z,
            iterations,
            primal_residual,
            objective,
            gap,
            converged,
        },
        trace,
    ))
}

/// Solves the recovery problem. On iteration exhaustion the best iterate is
/// still returned, with `converged = false`.
pub fn solve(problem: &RecoveryProblem<'_>, cfg: &SolverConfig) -> Result<RecoveryResult> {
    solve_traced(problem, cfg).map(|(res, _)| res)
}

/// KKT residuals of a candidate solution.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    /// max(||y - A xhat||_2 - eta, 0).
    pub feasibility_overshoot: f64,
    /// Distance from -A^T Lambda to O^T times the subdifferential of the
    /// weighted l1 norm at O xhat, minimized over admissible duals.
    pub stationarity_residual: f64,
    /// |mu * (||y - A xhat||_2 - eta)| at the fitted dual magnitude mu.
    pub complementary_slackness: f64,
}

/// Admissible set for the constraint dual in the stationarity fit.
enum DualSet {
    /// Constraint slack: mu = 0.
    Zero,
    /// Active inequality: t * dir with t >= 0 and ||dir|| = 1.
    Ray(DVector<f64>),
    /// Equality constraint (eta = 0): any vector in R^m.
    Free,
}

/// Certifies a candidate solution by fitting the KKT conditions: minimizes
/// ||O^T q + A^T d||_2 over subgradients q (box-constrained, with the sign
/// pinned on the numerical support of O xhat) and admissible duals d, by
/// projected gradient descent.
pub fn certify(problem: &RecoveryProblem<'_>, result: &RecoveryResult) -> CertificateReport {
    let a = &problem.meas.a;
    let y = &problem.meas.y;
    let op = problem.op;
    let w = problem.weights.w();
    let (m, p) = (a.nrows(), op.p());

    let residual_vec = y - a * &result.xhat;
    let res_norm = residual_vec.norm();
    let feas_gap = res_norm - problem.eta;
    let feasibility_overshoot = feas_gap.max(0.0);

    let c = op.apply(&result.xhat);
    let c_tol = 1e-6 * c.amax();

    // box [lo, hi] for the subgradient of ||.||_{1,w} at c
    let mut lo = DVector::zeros(p);
    let mut hi = DVector::zeros(p);
    for i in 0..p {
        if c[i].abs() > c_tol {
            let pinned = w[i] * c[i].signum();
            lo[i] = pinned;
            hi[i] = pinned;
        } else {
            lo[i] = -w[i];
            hi[i] = w[i];
        }
    }

    let dual_set = if problem.eta == 0.0 {
        DualSet::Free
    } else if feas_gap >= -1e-8 * (1.0 + problem.eta) {
        // active inequality; dual points along A^T (A xhat - y) direction
        if res_norm > 0.0 {
            DualSet::Ray(-&residual_vec / res_norm)
        } else {
            DualSet::Zero
        }
    } else {
        DualSet::Zero
    };

    // Lipschitz constant of the gradient of 0.5 ||O^T q + A^T d||^2
    let a_norm = matrix_norm_2(a);
    let lip = (op.op_norm() + a_norm).powi(2).max(f64::MIN_POSITIVE);
    let step = 1.0 / lip;

    let mut q = DVector::from_fn(p, |i, _| 0.5 * (lo[i] + hi[i]));
    let mut t = 0.0_f64;
    let mut dvec = DVector::zeros(m);
    for _ in 0..5000 {
        let dual = match &dual_set {
            DualSet::Zero => DVector::zeros(m),
            DualSet::Ray(dir) => dir * t,
            DualSet::Free => dvec.clone(),
        };
        let grad_src = op.apply_transpose(&q) + a.tr_mul(&dual);
        let gq = op.apply(&grad_src);
        for i in 0..p {
            q[i] = (q[i] - step * gq[i]).clamp(lo[i], hi[i]);
        }
        match &dual_set {
            DualSet::Zero => {}
            DualSet::Ray(dir) => {
                let gt = (a * &grad_src).dot(dir);
                t = (t - step * gt).max(0.0);
            }
            DualSet::Free => {
                dvec -= (a * &grad_src) * step;
            }
        }
    }
    let dual = match &dual_set {
        DualSet::Zero => DVector::zeros(m),
        DualSet::Ray(dir) => dir * t,
        DualSet::Free => dvec,
    };
    let stationarity_residual = (op.apply_transpose(&q) + a.tr_mul(&dual)).norm();
    let complementary_slackness = (dual.norm() * feas_gap).abs();

    CertificateReport {
        feasibility_overshoot,
        stationarity_residual,
        complementary_slackness,
    }
}

/// Spectral norm by power iteration on M^T M.
fn matrix_norm_2(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut norm = 0.0;
    for _ in 0..60 {
        let mv = m.tr_mul(&(m * &v));
        let nn = mv.norm();
        if nn == 0.0 {
            return 0.0;
        }
        v = mv / nn;
        norm = nn;
    }
    norm.sqrt()
}
