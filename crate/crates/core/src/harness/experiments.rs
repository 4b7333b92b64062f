//! Experiment drivers: phase-transition heatmap, paired success curves,
//! noisy NMSE curves and the wavelet image experiment. Every trial draws
//! from its own deterministic substream, so results are bit-identical across
//! re-runs regardless of thread count.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::{
    check_realizable, ImageConfig, NmseConfig, OperatorSpec, PhaseConfig, SuccessConfig,
};
use crate::harness::phantom::phantom;
use crate::harness::wavelet::{band_ranges, undecimated_haar_frame, NUM_BANDS};
use crate::metrics::{nmse, psnr};
use crate::operator::AnalysisOperator;
use crate::profile::{compute_accuracies, PriorProfile, WeightVector};
use crate::recovery::{solve, MeasurementSet, RecoveryProblem, SolverConfig};
use crate::rng::substream;
use crate::signal::{best_k_term_support, gen_analysis_sparse_signal_with_rng,
    gen_signal_on_support};
use crate::statdim::{estimate_statdim, ConeSpec};
use crate::weights::weights_from_profile;

/// A recovery counts as a success when NMSE <= 1e-4 (for a zero ground
/// truth: when the estimate's norm is below the same threshold).
pub const SUCCESS_NMSE: f64 = 1e-4;

/// Monte Carlo trials used for bound-overlay statistical dimensions.
const BOUND_TRIALS: usize = 20_000;

#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub s: usize,
    pub m: usize,
    pub metric: String,
    pub value: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundPoint {
    pub s: usize,
    pub m_bound: f64,
}

#[derive(Debug, Default)]
pub struct ExperimentOutput {
    pub cells: Vec<CellResult>,
    pub bound: Vec<BoundPoint>,
    /// Named images for `.pgm` output.
    pub images: Vec<(String, DMatrix<f64>)>,
}

pub fn is_success(xhat: &DVector<f64>, x: &DVector<f64>) -> bool {
    if x.norm() == 0.0 {
        xhat.norm() <= SUCCESS_NMSE
    } else {
        nmse(xhat, x).map(|e| e <= SUCCESS_NMSE).unwrap_or(false)
    }
}

fn gaussian_matrix<R: Rng>(m: usize, n: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Draws random disjoint blocks of the given sizes and a support placing
/// exactly round(alpha_i * |P_i|) elements in block i.
pub fn realize_profile_with_rng<R: Rng>(
    p: usize,
    block_sizes: &[usize],
    target_alphas: &[f64],
    support_size: usize,
    rng: &mut R,
) -> Result<(Vec<usize>, PriorProfile)> {
    let counts = check_realizable(block_sizes, target_alphas, support_size, p)?;
    let mut perm: Vec<usize> = (0..p).collect();
    for i in (1..p).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut blocks = Vec::with_capacity(block_sizes.len());
    let mut support = Vec::with_capacity(support_size);
    let mut offset = 0;
    for (&size, &count) in block_sizes.iter().zip(&counts) {
        let mut block = perm[offset..offset + size].to_vec();
        offset += size;
        support.extend_from_slice(&block[..count]);
        block.sort_unstable();
        blocks.push(block);
    }
    support.sort_unstable();
    let profile = compute_accuracies(blocks, &support, p)?;
    Ok((support, profile))
}

pub fn realize_profile(
    p: usize,
    block_sizes: &[usize],
    target_alphas: &[f64],
    support_size: usize,
    seed: u64,
) -> Result<(Vec<usize>, PriorProfile)> {
    realize_profile_with_rng(
        p,
        block_sizes,
        target_alphas,
        support_size,
        &mut substream(seed, &[6]),
    )
}

/// Aggregates per-trial outcomes into cells; errors become a
/// `failed_trials` cell instead of aborting the experiment.
fn push_rate_cell(
    cells: &mut Vec<CellResult>,
    s: usize,
    m: usize,
    metric: &str,
    outcomes: &[Result<f64>],
    seed: u64,
) {
    let ok: Vec<f64> = outcomes.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    let failed = outcomes.len() - ok.len();
    let value = if ok.is_empty() {
        f64::NAN
    } else {
        ok.iter().sum::<f64>() / ok.len() as f64
    };
    cells.push(CellResult {
        s,
        m,
        metric: metric.to_string(),
        value,
        trials: ok.len(),
        seed,
    });
    if failed > 0 {
        cells.push(CellResult {
            s,
            m,
            metric: format!("{metric}_failed_trials"),
            value: failed as f64,
            trials: outcomes.len(),
            seed,
        });
    }
}

/// Unweighted noiseless phase-transition heatmap with the measurement-count
/// bound overlay (t = 0) per sparsity level.
pub fn run_phase_heatmap(cfg: &PhaseConfig) -> Result<ExperimentOutput> {
    crate::harness::config::ExperimentConfig::PhaseHeatmap(cfg.clone()).validate()?;
    let solver = cfg.solver.apply_to(SolverConfig::default());
    let mut out = ExperimentOutput::default();

    for &s in &cfg.s_grid {
        let cone = ConeSpec::unweighted(cfg.p, s)?;
        let est = estimate_statdim(&cone, BOUND_TRIALS, cfg.master_seed)?;
        out.bound.push(BoundPoint {
            s,
            m_bound: (cfg.kappa * est.mean.max(0.0).sqrt()).powi(2) + 1.0,
        });
    }

    for &s in &cfg.s_grid {
        for &m in &cfg.m_grid {
            let outcomes: Vec<Result<f64>> = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|k| {
                    let mut rng =
                        substream(cfg.master_seed, &[1, s as u64, m as u64, k]);
                    let op = AnalysisOperator::random_with_condition(
                        cfg.p, cfg.n, cfg.kappa, &mut rng,
                    )?;
                    let sig = gen_analysis_sparse_signal_with_rng(&op, s, &mut rng)?;
                    let a = gaussian_matrix(m, cfg.n, &mut rng);
                    let y = &a * sig.x();
                    let meas = MeasurementSet::new(a, y, 0.0)?;
                    let w = WeightVector::uniform(cfg.p, 1.0)?;
                    let prob = RecoveryProblem::new(&meas, &op, &w)?;
                    let res = solve(&prob, &solver)?;
                    Ok(if is_success(&res.xhat, sig.x()) { 1.0 } else { 0.0 })
                })
                .collect();
            push_rate_cell(&mut out.cells, s, m, "success_rate", &outcomes, cfg.master_seed);
        }
    }
    Ok(out)
}

/// Paired success curves: unweighted vs profile-weighted recovery on the
/// same signals and measurement matrices per trial.
pub fn run_success_curve(cfg: &SuccessConfig) -> Result<ExperimentOutput> {
    crate::harness::config::ExperimentConfig::SuccessCurve(cfg.clone()).validate()?;
    let solver = cfg.solver.apply_to(SolverConfig::default());
    let mut out = ExperimentOutput::default();

    for &m in &cfg.m_grid {
        let outcomes: Vec<Result<(f64, f64)>> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|k| {
                let mut rng = substream(cfg.master_seed, &[2, m as u64, k]);
                let op = AnalysisOperator::random_with_condition(
                    cfg.p, cfg.n, cfg.kappa, &mut rng,
                )?;
                let (support, profile) = realize_profile_with_rng(
                    cfg.p,
                    &cfg.block_sizes,
                    &cfg.target_alphas,
                    cfg.s,
                    &mut rng,
                )?;
                let sig = gen_signal_on_support(&op, &support, &mut rng)?;
                let a = gaussian_matrix(m, cfg.n, &mut rng);
                let y = &a * sig.x();
                let meas = MeasurementSet::new(a, y, 0.0)?;

                let w_flat = WeightVector::uniform(cfg.p, 1.0)?;
                let res_u = solve(&RecoveryProblem::new(&meas, &op, &w_flat)?, &solver)?;
                let w_opt = weights_from_profile(&profile, 1e-12)?;
                let res_w = solve(&RecoveryProblem::new(&meas, &op, &w_opt)?, &solver)?;
                Ok((
                    if is_success(&res_u.xhat, sig.x()) { 1.0 } else { 0.0 },
                    if is_success(&res_w.xhat, sig.x()) { 1.0 } else { 0.0 },
                ))
            })
            .collect();
        let (un, we): (Vec<Result<f64>>, Vec<Result<f64>>) = split_pairs(outcomes);
        push_rate_cell(&mut out.cells, cfg.s, m, "success_rate_unweighted", &un, cfg.master_seed);
        push_rate_cell(&mut out.cells, cfg.s, m, "success_rate_weighted", &we, cfg.master_seed);
    }
    Ok(out)
}

fn split_pairs(pairs: Vec<Result<(f64, f64)>>) -> (Vec<Result<f64>>, Vec<Result<f64>>) {
    let mut a = Vec::with_capacity(pairs.len());
    let mut b = Vec::with_capacity(pairs.len());
    for r in pairs {
        match r {
            Ok((x, y)) => {
                a.push(Ok(x));
                b.push(Ok(y));
            }
            Err(e) => {
                a.push(Err(e));
                b.push(Err(Error::Partition("paired trial failed".into())));
            }
        }
    }
    (a, b)
}

fn build_operator<R: Rng>(
    spec: &OperatorSpec,
    p: usize,
    n: usize,
    rng: &mut R,
) -> Result<AnalysisOperator> {
    match spec {
        OperatorSpec::RandomCondition { kappa } => {
            AnalysisOperator::random_with_condition(p, n, *kappa, rng)
        }
        OperatorSpec::CosineFrame => AnalysisOperator::cosine_frame(p, n),
    }
}

/// Noisy NMSE-versus-m curves; noise is scaled per trial so that
/// ||A x||^2 / ||e||^2 equals the target SNR and the solver receives the
/// oracle radius eta = ||e||.
pub fn run_nmse_curve(cfg: &NmseConfig) -> Result<ExperimentOutput> {
    crate::harness::config::ExperimentConfig::NmseCurve(cfg.clone()).validate()?;
    let solver = cfg.solver.apply_to(SolverConfig::default());
    let mut out = ExperimentOutput::default();

    for &m in &cfg.m_grid {
        let outcomes: Vec<Result<(f64, f64)>> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|k| {
                let mut rng = substream(cfg.master_seed, &[3, m as u64, k]);
                let op = build_operator(&cfg.operator, cfg.p, cfg.n, &mut rng)?;
                let (support, profile) = realize_profile_with_rng(
                    cfg.p,
                    &cfg.block_sizes,
                    &cfg.target_alphas,
                    cfg.s,
                    &mut rng,
                )?;
                let sig = gen_signal_on_support(&op, &support, &mut rng)?;
                let a = gaussian_matrix(m, cfg.n, &mut rng);
                let ax = &a * sig.x();
                let mut e =
                    DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
                let snr_lin = 10f64.powf(cfg.snr_db / 10.0);
                let target = ax.norm() / snr_lin.sqrt();
                let en = e.norm();
                if en > 0.0 {
                    e *= target / en;
                }
                let eta = e.norm();
                let meas = MeasurementSet::new(a, ax + e, eta)?;

                let w_flat = WeightVector::uniform(cfg.p, 1.0)?;
                let res_u = solve(&RecoveryProblem::new(&meas, &op, &w_flat)?, &solver)?;
                let w_opt = weights_from_profile(&profile, 1e-12)?;
                let res_w = solve(&RecoveryProblem::new(&meas, &op, &w_opt)?, &solver)?;
                Ok((nmse(&res_u.xhat, sig.x())?, nmse(&res_w.xhat, sig.x())?))
            })
            .collect();
        let (un, we) = split_pairs(outcomes);
        push_rate_cell(&mut out.cells, cfg.s, m, "nmse_unweighted", &un, cfg.master_seed);
        push_rate_cell(&mut out.cells, cfg.s, m, "nmse_weighted", &we, cfg.master_seed);
    }
    Ok(out)
}

/// Blocks for the image experiment: the four level-2 sub-bands split into
/// two halves each plus the three level-1 detail bands, giving 11 disjoint
/// estimator blocks grouped by wavelet scale.
fn image_blocks(side: usize) -> Vec<Vec<usize>> {
    let ranges = band_ranges(side);
    let mut blocks = Vec::with_capacity(11);
    for (k, &(lo, hi)) in ranges.iter().enumerate().take(NUM_BANDS) {
        if k < 4 {
            let mid = (lo + hi) / 2;
            blocks.push((lo..mid).collect());
            blocks.push((mid..hi).collect());
        } else {
            blocks.push((lo..hi).collect());
        }
    }
    blocks
}

/// Wavelet-domain image recovery from undersampled noisy Gaussian
/// measurements, unweighted vs weighted; weights come from block accuracies
/// measured against the true top-coefficient support.
pub fn run_image_experiment(cfg: &ImageConfig) -> Result<ExperimentOutput> {
    crate::harness::config::ExperimentConfig::Image(cfg.clone()).validate()?;
    let side = cfg.side;
    let n = side * side;
    let m = ((cfg.m_fraction * n as f64).round() as usize).max(1);

    let img = phantom(side);
    let x = DVector::from_column_slice(img.as_slice());
    let op = undecimated_haar_frame(side)?;
    let p = op.p();

    let coeffs = op.apply(&x);
    let stilde = ((cfg.top_fraction * p as f64).round() as usize).clamp(1, p);
    let support = best_k_term_support(&coeffs, stilde)?;
    let profile = compute_accuracies(image_blocks(side), &support, p)?;
    let w_opt = weights_from_profile(&profile, 1e-12)?;
    let w_flat = WeightVector::uniform(p, 1.0)?;

    let mut rng = substream(cfg.master_seed, &[4]);
    let a = gaussian_matrix(m, n, &mut rng);
    let ax = &a * &x;
    let mut e = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let snr_lin = 10f64.powf(cfg.snr_db / 10.0);
    e *= ax.norm() / (snr_lin.sqrt() * e.norm());
    let eta = e.norm();
    let meas = MeasurementSet::new(a, ax + e, eta)?;

    let solver = cfg.solver.apply_to(SolverConfig {
        max_iters: 600,
        tol_feas: 1e-6,
        tol_obj: 1e-7,
        rho: 1.0,
        adapt_rho: false,
    });

    let res_u = solve(&RecoveryProblem::new(&meas, &op, &w_flat)?, &solver)?;
    let res_w = solve(&RecoveryProblem::new(&meas, &op, &w_opt)?, &solver)?;

    let to_image =
        |v: &DVector<f64>| DMatrix::from_column_slice(side, side, v.as_slice());
    let img_u = to_image(&res_u.xhat);
    let img_w = to_image(&res_w.xhat);

    let mut out = ExperimentOutput::default();
    for (metric, value) in [
        ("psnr_unweighted", psnr(&img_u, &img)),
        ("psnr_weighted", psnr(&img_w, &img)),
    ] {
        out.cells.push(CellResult {
            s: stilde,
            m,
            metric: metric.to_string(),
            value,
            trials: 1,
            seed: cfg.master_seed,
        });
    }
    out.images.push(("truth".to_string(), img));
    out.images.push(("recovered_unweighted".to_string(), img_u));
    out.images.push(("recovered_weighted".to_string(), img_w));
    Ok(out)
}
