//! Validation of the FFT-convolution statistical-dimension oracle itself,
//! plus a quick Monte Carlo cross-check. The heavyweight experiment-scale
//! comparisons live in the acceptance suite.

mod common;

use common::statdim_oracle;
use wl1a::{estimate_statdim, ConeSpec};

#[test]
fn oracle_matches_closed_form_for_full_support() {
    // with s = p the distance is sum (g_i - t)^2; minimizing over t >= 0
    // gives p - p E[mean(g)^2 1{mean > 0}] = p - 1/2 exactly
    let d5 = statdim_oracle(5, 5);
    let d10 = statdim_oracle(10, 10);
    assert!((d5 - 4.5).abs() < 2e-3, "delta(5,5) = {d5}");
    assert!((d10 - 9.5).abs() < 2e-3, "delta(10,10) = {d10}");
}

#[test]
fn oracle_monotone_in_sparsity() {
    let d2 = statdim_oracle(20, 2);
    let d5 = statdim_oracle(20, 5);
    let d10 = statdim_oracle(20, 10);
    assert!(d2 < d5 && d5 < d10, "{d2} {d5} {d10}");
    assert!(d2 > 0.0 && d10 < 20.0);
}

#[test]
fn monte_carlo_matches_oracle_small_case() {
    let oracle = statdim_oracle(20, 5);
    let cone = ConeSpec::unweighted(20, 5).unwrap();
    let est = estimate_statdim(&cone, 50_000, 7).unwrap();
    let rel = (est.mean - oracle).abs() / oracle;
    assert!(
        rel <= 0.02,
        "MC {} vs oracle {oracle} ({:.2}% off, SE {})",
        est.mean,
        100.0 * rel,
        est.std_error
    );
}
