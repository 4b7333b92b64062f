//! Recovery of analysis-sparse vectors from underdetermined Gaussian
//! measurements by weighted l1 analysis minimization, with weights tuned
//! from prior support information and guarantees expressed through the
//! statistical dimension of the descent cone.

pub mod error;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod operator;
pub mod profile;
pub mod recovery;
pub mod rng;
pub mod signal;
pub mod statdim;
pub mod weights;

pub use error::{Error, Result};
pub use metrics::{nmse, psnr};
pub use operator::AnalysisOperator;
pub use profile::{compute_accuracies, PriorProfile, WeightVector};
pub use recovery::{
    certify, solve, weighted_soft_threshold, CertificateReport, MeasurementSet, RecoveryProblem,
    RecoveryResult, SolverConfig,
};
pub use signal::{best_k_term_support, gen_analysis_sparse_signal, AnalysisSparseSignal};
pub use statdim::{
    dist2_to_cone, error_bound, estimate_statdim, measurement_bound, ConeSpec, StatDimEstimate,
};
pub use weights::{solve_block_weight, solve_profile_weights, weights_from_profile};
