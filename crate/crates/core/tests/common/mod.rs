//! Independent numerical oracles shared by the integration tests. Nothing
//! here reuses the library's own numerics beyond basic types: the
//! statistical dimension comes from an FFT density convolution, the
//! shrinkage integral from adaptive quadrature, and the recovery objective
//! from a linear-programming reformulation.

#![allow(dead_code)]

use std::f64::consts::{PI, SQRT_2};

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Composite Simpson rule on uniformly spaced samples (odd count).
pub fn simpson(values: &[f64], h: f64) -> f64 {
    assert!(values.len() >= 3 && values.len() % 2 == 1);
    let mut acc = values[0] + values[values.len() - 1];
    for (i, v) in values.iter().enumerate().skip(1).take(values.len() - 2) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    // seed the recursion with a fixed subdivision so a coincidental
    // agreement on the full interval cannot end refinement early
    let panels = 16;
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for i in 0..panels {
        let (pa, pb) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        let m = 0.5 * (pa + pb);
        let (fa, fm, fb) = (f(pa), f(m), f(pb));
        let whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        acc += recurse(f, pa, pb, fa, fm, fb, whole, tol / panels as f64, 48);
    }
    acc
}

/// The scaled Gaussian shrinkage moment sqrt(2/pi) * int_w^inf (u - w)
/// e^{-u^2/2} du evaluated by adaptive quadrature of the integrand itself
/// (no closed form), truncated where the tail is below 1e-40.
pub fn shrinkage_integral_quad(omega: f64) -> f64 {
    let hi = omega + 14.0;
    let f = |u: f64| (u - omega) * (-0.5 * u * u).exp();
    (2.0 / PI).sqrt() * adaptive_simpson(&f, omega, hi, 1e-14)
}

/// Root of alpha * w = (1 - alpha) * Jq(w) for alpha in (0, 1), where Jq is
/// the quadrature version of the shrinkage moment; plain bisection.
pub fn weight_root_quad(alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0);
    let f = |w: f64| alpha * w - (1.0 - alpha) * shrinkage_integral_quad(w);
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact statistical dimension of the unweighted l1 descent cone at an
/// s-sparse point in R^p, by one-dimensional numerical integration of
///
///     delta = E min_{t >= 0} f(t) = p + 2 * int_0^inf E[ W(t) 1{W(t) < 0} ] dt,
///
/// where f(t) = sum_S (g_i - t)^2 + sum_{S^c} max(|g_i| - t, 0)^2 and
/// W(t) = f'(t)/2 = s t - u - sum Y_i with u ~ N(0, s) and the
/// Y_i = max(|g_i| - t, 0) i.i.d. The density of u + sum Y_i is formed by
/// FFT convolution of the exact binned Y distribution (CDF differences)
/// with the Gaussian characteristic function; the outer integral is a
/// composite Simpson rule over t.
pub fn statdim_oracle(p: usize, s: usize) -> f64 {
    assert!(s >= 1 && s <= p);
    let mut planner = FftPlanner::<f64>::new();
    let nt = 301;
    let t_lo = 1e-6;
    let t_hi = 9.0;
    let h = (t_hi - t_lo) / (nt - 1) as f64;
    let vals: Vec<f64> = (0..nt)
        .map(|i| ew_neg(t_lo + i as f64 * h, p, s, &mut planner))
        .collect();
    p as f64 + 2.0 * simpson(&vals, h)
}

/// E[ W(t) 1{W(t) < 0} ] for W(t) = s t - u - sum_{i=1}^{p-s} Y_i.
fn ew_neg(t: f64, p: usize, s: usize, planner: &mut FftPlanner<f64>) -> f64 {
    let q = p - s;
    let n: usize = 1 << 17;
    let l = 40.0 + q.max(1) as f64 * 6.0;
    let dx = 2.0 * l / n as f64;
    let half = n / 2;

    // Distribution of one Y = max(|g| - t, 0) binned on the centered grid
    // x_i = (i - n/2) dx by exact CDF differences, rotated so that x = 0
    // sits at index 0 before the forward transform.
    let mut fy: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); n];
    if q > 0 {
        let mut prev = 0.0;
        for i in 0..n {
            let x = (i as f64 - half as f64) * dx;
            let edge = x + 0.5 * dx;
            let cdf = if edge >= 0.0 {
                libm::erf((edge + t) / SQRT_2)
            } else {
                0.0
            };
            fy[(i + half) % n] = Complex::new(cdf - prev, 0.0);
            prev = cdf;
        }
        planner.plan_fft_forward(n).process(&mut fy);
    }

    // Multiply by the Gaussian characteristic function of u ~ N(0, s) and
    // raise the Y spectrum to the q-th power, then invert.
    let mut fz: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let freq = if k < half {
                k as f64
            } else {
                k as f64 - n as f64
            } / (n as f64 * dx);
            let om = 2.0 * PI * freq;
            let fu = (-0.5 * s as f64 * om * om).exp();
            let fyq = if q > 0 {
                fy[k].powu(q as u32)
            } else {
                Complex::new(1.0, 0.0)
            };
            fu * fyq
        })
        .collect();
    planner.plan_fft_inverse(n).process(&mut fz);

    let st = s as f64 * t;
    let scale = 1.0 / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let x = (i as f64 - half as f64) * dx;
        let w = st - x;
        if w < 0.0 {
            acc += w * fz[(i + half) % n].re * scale;
        }
    }
    acc
}

/// Linear-programming oracle for the noiseless weighted l1 analysis
/// program: min_z sum_i w_i u_i subject to -u <= Omega z <= u and A z = y,
/// solved by an off-the-shelf simplex implementation. Returns the optimal
/// objective and minimizer.
pub fn lp_weighted_l1_analysis(
    omega: &DMatrix<f64>,
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    w: &DVector<f64>,
) -> (f64, DVector<f64>) {
    let (p, n) = omega.shape();
    assert_eq!(a.ncols(), n);
    assert_eq!(a.nrows(), y.len());
    assert_eq!(w.len(), p);

    let mut prob = Problem::new(OptimizationDirection::Minimize);
    let z: Vec<_> = (0..n)
        .map(|_| prob.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let u: Vec<_> = (0..p).map(|i| prob.add_var(w[i], (0.0, f64::INFINITY))).collect();

    for i in 0..p {
        let mut le = minilp::LinearExpr::empty();
        let mut ge = minilp::LinearExpr::empty();
        for j in 0..n {
            le.add(z[j], omega[(i, j)]);
            ge.add(z[j], -omega[(i, j)]);
        }
        le.add(u[i], -1.0);
        ge.add(u[i], -1.0);
        prob.add_constraint(le, ComparisonOp::Le, 0.0);
        prob.add_constraint(ge, ComparisonOp::Le, 0.0);
    }
    for k in 0..a.nrows() {
        let mut eq = minilp::LinearExpr::empty();
        for j in 0..n {
            eq.add(z[j], a[(k, j)]);
        }
        prob.add_constraint(eq, ComparisonOp::Eq, y[k]);
    }

    let sol = prob.solve().expect("LP oracle must be feasible and bounded");
    let zhat = DVector::from_fn(n, |j, _| sol[z[j]]);
    (sol.objective(), zhat)
}
