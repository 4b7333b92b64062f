//! Experiment configurations, read from JSON. Every field that affects the
//! numbers is in the config, so a run is fully described by its `meta.json`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recovery::SolverConfig;

pub const DEFAULT_SEED: u64 = 42;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Optional per-experiment solver settings; unset fields keep the defaults
/// of the experiment kind.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub max_iters: Option<usize>,
    pub tol_feas: Option<f64>,
    pub tol_obj: Option<f64>,
    pub rho: Option<f64>,
    pub adapt_rho: Option<bool>,
}

impl SolverOverrides {
    pub fn apply_to(&self, mut cfg: SolverConfig) -> SolverConfig {
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.tol_feas {
            cfg.tol_feas = v;
        }
        if let Some(v) = self.tol_obj {
            cfg.tol_obj = v;
        }
        if let Some(v) = self.rho {
            cfg.rho = v;
        }
        if let Some(v) = self.adapt_rho {
            cfg.adapt_rho = v;
        }
        cfg
    }
}

/// How the analysis operator of a trial is built.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// Random frame with a prescribed condition number, fresh per trial.
    RandomCondition { kappa: f64 },
    /// Deterministic p x n section of an orthogonal cosine transform
    /// (tight, kappa = 1).
    CosineFrame,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseConfig {
    pub n: usize,
    pub p: usize,
    pub kappa: f64,
    pub s_grid: Vec<usize>,
    pub m_grid: Vec<usize>,
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub solver: SolverOverrides,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuccessConfig {
    pub n: usize,
    pub p: usize,
    pub kappa: f64,
    pub s: usize,
    pub block_sizes: Vec<usize>,
    pub target_alphas: Vec<f64>,
    pub m_grid: Vec<usize>,
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub solver: SolverOverrides,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NmseConfig {
    pub n: usize,
    pub p: usize,
    pub operator: OperatorSpec,
    pub s: usize,
    pub block_sizes: Vec<usize>,
    pub target_alphas: Vec<f64>,
    pub m_grid: Vec<usize>,
    pub trials: usize,
    pub snr_db: f64,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub solver: SolverOverrides,
}

fn default_side() -> usize {
    64
}
fn default_m_fraction() -> f64 {
    0.4
}
fn default_top_fraction() -> f64 {
    0.1
}
fn default_image_snr() -> f64 {
    10.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageConfig {
    #[serde(default = "default_side")]
    pub side: usize,
    #[serde(default = "default_m_fraction")]
    pub m_fraction: f64,
    #[serde(default = "default_image_snr")]
    pub snr_db: f64,
    /// Fraction of analysis coefficients forming the reference support.
    #[serde(default = "default_top_fraction")]
    pub top_fraction: f64,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub solver: SolverOverrides,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentConfig {
    PhaseHeatmap(PhaseConfig),
    SuccessCurve(SuccessConfig),
    NmseCurve(NmseConfig),
    Image(ImageConfig),
}

fn check_grid<T>(name: &str, grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        Err(Error::InvalidArgument(format!("{name} must be nonempty")))
    } else {
        Ok(())
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        Err(Error::InvalidArgument("trials must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Checks that each target accuracy rounds to an integer in-block support
/// count and that the counts sum to s; returns the per-block counts.
pub fn check_realizable(
    block_sizes: &[usize],
    target_alphas: &[f64],
    s: usize,
    p: usize,
) -> Result<Vec<usize>> {
    if block_sizes.len() != target_alphas.len() {
        return Err(Error::InfeasibleProfile(format!(
            "{} block sizes but {} accuracies",
            block_sizes.len(),
            target_alphas.len()
        )));
    }
    if block_sizes.iter().sum::<usize>() != p {
        return Err(Error::InfeasibleProfile(format!(
            "block sizes sum to {}, not p = {p}",
            block_sizes.iter().sum::<usize>()
        )));
    }
    let mut counts = Vec::with_capacity(block_sizes.len());
    for (&size, &alpha) in block_sizes.iter().zip(target_alphas) {
        if size == 0 {
            return Err(Error::InfeasibleProfile("empty block".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InfeasibleProfile(format!(
                "accuracy {alpha} outside [0, 1]"
            )));
        }
        let exact = alpha * size as f64;
        let k = exact.round();
        if (exact - k).abs() > 1e-9 {
            return Err(Error::InfeasibleProfile(format!(
                "accuracy {alpha} x block size {size} = {exact} is not an integer"
            )));
        }
        counts.push(k as usize);
    }
    let total: usize = counts.iter().sum();
    if total != s {
        return Err(Error::InfeasibleProfile(format!(
            "per-block support counts sum to {total}, not s = {s}"
        )));
    }
    Ok(counts)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::PhaseHeatmap(c) => {
                check_grid("s_grid", &c.s_grid)?;
                check_grid("m_grid", &c.m_grid)?;
                check_trials(c.trials)?;
                if c.p < c.n {
                    return Err(Error::Shape(format!("need p >= n, got {} x {}", c.p, c.n)));
                }
                if c.kappa < 1.0 {
                    return Err(Error::InvalidArgument("kappa must be >= 1".into()));
                }
                Ok(())
            }
            ExperimentConfig::SuccessCurve(c) => {
                check_grid("m_grid", &c.m_grid)?;
                check_trials(c.trials)?;
                if c.kappa < 1.0 {
                    return Err(Error::InvalidArgument("kappa must be >= 1".into()));
                }
                check_realizable(&c.block_sizes, &c.target_alphas, c.s, c.p)?;
                Ok(())
            }
            ExperimentConfig::NmseCurve(c) => {
                check_grid("m_grid", &c.m_grid)?;
                check_trials(c.trials)?;
                if let OperatorSpec::RandomCondition { kappa } = c.operator {
                    if kappa < 1.0 {
                        return Err(Error::InvalidArgument("kappa must be >= 1".into()));
                    }
                }
                check_realizable(&c.block_sizes, &c.target_alphas, c.s, c.p)?;
                Ok(())
            }
            ExperimentConfig::Image(c) => {
                if c.side < 8 || c.side > 64 || !c.side.is_power_of_two() {
                    return Err(Error::InvalidArgument(
                        "image side must be a power of two in [8, 64]".into(),
                    ));
                }
                if !(c.m_fraction > 0.0 && c.m_fraction <= 1.0) {
                    return Err(Error::InvalidArgument("m_fraction must be in (0, 1]".into()));
                }
                if !(c.top_fraction > 0.0 && c.top_fraction < 1.0) {
                    return Err(Error::InvalidArgument(
                        "top_fraction must be in (0, 1)".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::PhaseHeatmap(_) => "phase_heatmap",
            ExperimentConfig::SuccessCurve(_) => "success_curve",
            ExperimentConfig::NmseCurve(_) => "nmse_curve",
            ExperimentConfig::Image(_) => "image",
        }
    }

    pub fn master_seed(&self) -> u64 {
        match self {
            ExperimentConfig::PhaseHeatmap(c) => c.master_seed,
            ExperimentConfig::SuccessCurve(c) => c.master_seed,
            ExperimentConfig::NmseCurve(c) => c.master_seed,
            ExperimentConfig::Image(c) => c.master_seed,
        }
    }
}
