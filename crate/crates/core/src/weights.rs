//! Optimal block weights for the weighted l1 analysis program.
//!
//! Each partition block with accuracy alpha gets the weight omega* solving
//! the scalar fixed-point equation
//!
//! ```text
//! alpha * omega = (1 - alpha) * J(omega),
//! ```
//!
//! where J(omega) = sqrt(2/pi) * integral_omega^inf (u - omega) e^{-u^2/2} du
//! is the Gaussian shrinkage moment. J has the closed form
//! sqrt(2/pi) e^{-omega^2/2} - omega erfc(omega / sqrt(2)).

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::profile::{PriorProfile, WeightVector};

/// Weight assigned to fully inaccurate (alpha = 0) blocks, where the fixed
/// point diverges. J(20) < 1e-88, so the block is effectively excluded.
pub const OMEGA_CAP: f64 = 20.0;

pub const DEFAULT_TOL: f64 = 1e-12;

/// The shrinkage integral J(omega), strictly decreasing with
/// J(0) = sqrt(2/pi).
pub fn shrinkage_integral(omega: f64) -> f64 {
    (2.0 / PI).sqrt() * (-0.5 * omega * omega).exp() - omega * libm::erfc(omega / SQRT_2)
}

/// Root of alpha * omega = (1 - alpha) * J(omega) on [0, inf), by bracketed
/// bisection; the returned omega has residual at most `tol`.
///
/// alpha = 1 gives omega = 0; alpha = 0 is degenerate and returns
/// [`OMEGA_CAP`].
pub fn solve_block_weight(alpha: f64, tol: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "accuracy must lie in [0, 1], got {alpha}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if alpha >= 1.0 {
        return Ok(0.0);
    }
    if alpha == 0.0 {
        return Ok(OMEGA_CAP);
    }
    let f = |w: f64| alpha * w - (1.0 - alpha) * shrinkage_integral(w);
    // f(0) < 0; grow the bracket until the sign flips
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::InvalidArgument(format!(
                "no bracket found for alpha = {alpha}"
            )));
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..500 {
        mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol {
            break;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Per-block weight solution with residual diagnostics.
#[derive(Debug, Clone)]
pub struct WeightSolution {
    pub block_weights: Vec<f64>,
    pub residuals: Vec<f64>,
    pub capped: Vec<bool>,
}

/// Solves the fixed-point equation for every block of the profile.
pub fn solve_profile_weights(profile: &PriorProfile, tol: f64) -> Result<WeightSolution> {
    let mut block_weights = Vec::with_capacity(profile.num_blocks());
    let mut residuals = Vec::with_capacity(profile.num_blocks());
    let mut capped = Vec::with_capacity(profile.num_blocks());
    for &alpha in profile.accuracies() {
        let omega = solve_block_weight(alpha, tol)?;
        let is_capped = alpha == 0.0;
        let resid = if is_capped {
            0.0
        } else {
            (alpha * omega - (1.0 - alpha) * shrinkage_integral(omega)).abs()
        };
        block_weights.push(omega);
        residuals.push(resid);
        capped.push(is_capped);
    }
    Ok(WeightSolution {
        block_weights,
        residuals,
        capped,
    })
}

/// Expands the per-block solution to a full weight vector constant on blocks.
pub fn weights_from_profile(profile: &PriorProfile, tol: f64) -> Result<WeightVector> {
    let sol = solve_profile_weights(profile, tol)?;
    WeightVector::from_blocks(profile.blocks(), &sol.block_weights, profile.p())
}
