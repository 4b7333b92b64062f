//! Experiment harness: deterministic drivers for the phase-transition,
//! success-curve, NMSE-curve and image experiments, plus their configuration
//! and output plumbing.

pub mod config;
pub mod experiments;
pub mod output;
pub mod phantom;
pub mod wavelet;

pub use config::{ExperimentConfig, ImageConfig, NmseConfig, PhaseConfig, SuccessConfig};
pub use experiments::{
    is_success, realize_profile, run_image_experiment, run_nmse_curve, run_phase_heatmap,
    run_success_curve, CellResult, ExperimentOutput, SUCCESS_NMSE,
};
pub use output::{parse_config, write_outputs};
