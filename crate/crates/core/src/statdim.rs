//! Monte Carlo estimation of the statistical dimension of weighted l1
//! descent cones, via the polar identity
//!
//! ```text
//! delta(C) = E ||P_C(g)||^2 = E dist^2(g, C°),
//! ```
//!
//! with C° = cone(w ⊙ ∂||.||_1 at the analysis coefficients). Membership in
//! C° is parametrized by a single scale t >= 0, which makes the per-sample
//! distance a one-dimensional piecewise-quadratic minimization solved
//! exactly by a breakpoint sweep.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::AnalysisOperator;
use crate::rng::substream;

/// Specifies the polar cone cone(w ⊙ ∂||.||_1(c)) through the support and
/// signs of the coefficient vector c and the weight vector.
#[derive(Debug, Clone)]
pub struct ConeSpec {
    p: usize,
    support: Vec<usize>,
    signs: Vec<f64>,
    weights: DVector<f64>,
}

impl ConeSpec {
    pub fn new(
        p: usize,
        support: Vec<usize>,
        signs: Vec<f64>,
        weights: DVector<f64>,
    ) -> Result<Self> {
        if weights.len() != p {
            return Err(Error::Shape(format!(
                "weights length {} != p = {p}",
                weights.len()
            )));
        }
        if signs.len() != support.len() {
            return Err(Error::Shape(format!(
                "{} signs for {} support indices",
                signs.len(),
                support.len()
            )));
        }
        if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let mut seen = vec![false; p];
        for &i in &support {
            if i >= p {
                return Err(Error::InvalidArgument(format!(
                    "support index {i} out of range"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidArgument(format!(
                    "duplicate support index {i}"
                )));
            }
            seen[i] = true;
        }
        Ok(Self {
            p,
            support,
            signs,
            weights,
        })
    }

    /// Cone of an unweighted s-sparse sign pattern (+1 on the support).
    pub fn unweighted(p: usize, s: usize) -> Result<Self> {
        Self::new(
            p,
            (0..s).collect(),
            vec![1.0; s],
            DVector::from_element(p, 1.0),
        )
    }

    /// Cone for a signal's analysis coefficients under the given weights.
    pub fn from_signal(
        op: &AnalysisOperator,
        signal: &crate::signal::AnalysisSparseSignal,
        weights: DVector<f64>,
    ) -> Result<Self> {
        let c = op.apply(signal.x());
        let signs = signal
            .support()
            .iter()
            .map(|&i| if c[i] >= 0.0 { 1.0 } else { -1.0 })
            .collect();
        Self::new(op.p(), signal.support().to_vec(), signs, weights)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }
}

/// Squared distance from g to the polar cone:
///
///   min_{t >= 0}  sum_{i in S} (g_i - t w_i sign_i)^2
///               + sum_{i not in S} max(|g_i| - t w_i, 0)^2.
///
/// The objective is convex piecewise-quadratic in t; the sweep visits the
/// breakpoints |g_i| / w_i in ascending order maintaining the active-set
/// sums, so the minimum is found exactly.
pub fn dist2_to_cone(g: &DVector<f64>, cone: &ConeSpec) -> f64 {
    assert_eq!(g.len(), cone.p, "sample dimension must match cone");
    let mut in_support = vec![false; cone.p];
    for &i in &cone.support {
        in_support[i] = true;
    }

    // Every term contributes g^2 - 2 t w m + t^2 w^2 while active, where
    // m = sign * g on the support and m = |g| off it. Off-support terms with
    // w > 0 deactivate at t = |g| / w; off-support terms with w = 0 are the
    // constant g^2 (already the m = |g|, w = 0 case).
    let mut sum_w2 = 0.0;
    let mut sum_wm = 0.0;
    let mut sum_g2 = 0.0;
    let mut breakpoints: Vec<(f64, f64, f64, f64)> = Vec::new(); // (b, w2, wm, g2)

    for (idx, &i) in cone.support.iter().enumerate() {
        let w = cone.weights[i];
        let m = cone.signs[idx] * g[i];
        sum_w2 += w * w;
        sum_wm += w * m;
        sum_g2 += g[i] * g[i];
    }
    for i in 0..cone.p {
        if in_support[i] {
            continue;
        }
        let w = cone.weights[i];
        let a = g[i].abs();
        if w > 0.0 {
            if a == 0.0 {
                continue; // active only at t = 0 where the term vanishes
            }
            sum_w2 += w * w;
            sum_wm += w * a;
            sum_g2 += a * a;
            breakpoints.push((a / w, w * w, w * a, a * a));
        } else {
            sum_g2 += a * a;
        }
    }
    breakpoints.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

    let eval = |g2: f64, wm: f64, w2: f64, t: f64| g2 - 2.0 * wm * t + w2 * t * t;
    let mut best = sum_g2; // t = 0
    let mut lo = 0.0;
    for &(b, w2, wm, g2) in &breakpoints {
        if sum_w2 > 0.0 {
            let t = (sum_wm / sum_w2).clamp(lo, b);
            best = best.min(eval(sum_g2, sum_wm, sum_w2, t));
        }
        sum_w2 -= w2;
        sum_wm -= wm;
        sum_g2 -= g2;
        lo = b;
    }
    // final segment [lo, inf)
    if sum_w2 > 0.0 {
        let t = (sum_wm / sum_w2).max(lo);
        best = best.min(eval(sum_g2, sum_wm, sum_w2, t));
    } else {
        best = best.min(sum_g2);
    }
    best.max(0.0)
}

/// Monte Carlo estimate of a statistical dimension.
#[derive(Debug, Clone, Serialize)]
pub struct StatDimEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Averages `dist2_to_cone` over i.i.d. standard normal samples. Trial k
/// draws from substream (seed, k), so the estimate is bit-identical across
/// re-runs and thread counts; the reduction is a compensated sum in trial
/// order.
pub fn estimate_statdim(cone: &ConeSpec, trials: usize, seed: u64) -> Result<StatDimEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let p = cone.p;
    let values: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, &[0x5d, k]);
            let g = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
            dist2_to_cone(&g, cone)
        })
        .collect();
    let mean = neumaier_sum(&values) / trials as f64;
    let var_terms: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let variance = if trials > 1 {
        neumaier_sum(&var_terms) / (trials - 1) as f64
    } else {
        0.0
    };
    Ok(StatDimEstimate {
        mean,
        std_error: (variance / trials as f64).sqrt(),
        trials,
        seed,
    })
}

/// Compensated (Neumaier) summation, deterministic in input order.
pub(crate) fn neumaier_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Measurement-count threshold (kappa sqrt(delta) + t)^2 + 1; exact recovery
/// holds with probability at least 1 - e^{-t^2/2} once m strictly exceeds it.
pub fn measurement_bound(op: &AnalysisOperator, delta: f64, t: f64) -> f64 {
    assert!(delta >= 0.0 && t >= 0.0);
    let root = op.kappa() * delta.sqrt() + t;
    root * root + 1.0
}

/// Stable recovery error bound 2 eta / (sqrt(m-1) - kappa sqrt(delta_ap) - t),
/// infinite when the denominator is not positive.
pub fn error_bound(op: &AnalysisOperator, delta_ap: f64, m: usize, t: f64, eta: f64) -> f64 {
    assert!(m >= 2 && delta_ap >= 0.0 && t >= 0.0 && eta >= 0.0);
    let denom = ((m - 1) as f64).sqrt() - op.kappa() * delta_ap.sqrt() - t;
    if denom > 0.0 {
        2.0 * eta / denom
    } else {
        f64::INFINITY
    }
}
