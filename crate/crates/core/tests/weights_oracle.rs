//! Cross-validation of the closed-form shrinkage moment and the block
//! weight roots against an independent adaptive-quadrature oracle.

mod common;

use common::{shrinkage_integral_quad, weight_root_quad};
use wl1a::solve_block_weight;
use wl1a::weights::shrinkage_integral;

#[test]
fn closed_form_matches_quadrature_on_grid() {
    let mut worst = 0.0f64;
    for i in 0..50 {
        let omega = i as f64 * 0.1;
        let dev = (shrinkage_integral(omega) - shrinkage_integral_quad(omega)).abs();
        worst = worst.max(dev);
    }
    assert!(worst <= 1e-9, "worst closed-form vs quadrature gap {worst:e}");
    // the single point called out explicitly, at a tighter tolerance
    let dev1 = (shrinkage_integral(1.0) - shrinkage_integral_quad(1.0)).abs();
    assert!(dev1 <= 1e-10, "gap at omega = 1: {dev1:e}");
}

#[test]
fn frozen_roots_match_quadrature_bisection() {
    // the regression constants baked into the library's unit tests, plus
    // the accuracies used by the experiments
    let cases = [
        (0.5, 0.436326563794),
        (0.7, 0.246607221357),
        (0.06, 1.332050571868),
        (0.8, 0.161657506746),
        (2.0 / 45.0, 1.440683360358),
    ];
    for (alpha, frozen) in cases {
        let oracle = weight_root_quad(alpha);
        let lib = solve_block_weight(alpha, 1e-12).unwrap();
        assert!(
            (oracle - frozen).abs() <= 1e-8,
            "alpha = {alpha}: oracle {oracle} vs frozen {frozen}"
        );
        assert!(
            (lib - oracle).abs() <= 1e-8,
            "alpha = {alpha}: library {lib} vs oracle {oracle}"
        );
    }
}
