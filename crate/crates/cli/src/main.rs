//! Command-line driver: weight computation, statistical-dimension
//! estimation, single recoveries and the experiment harness, with fixed
//! deterministic seeding (default 42, never wall-clock).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::DVector;
use serde_json::json;

use wl1a::harness::config::DEFAULT_SEED;
use wl1a::harness::{
    parse_config, run_image_experiment, run_nmse_curve, run_phase_heatmap, run_success_curve,
    write_outputs, ExperimentConfig,
};
use wl1a::io::{read_matrix_csv, read_vector_csv, write_json, write_vector_csv};
use wl1a::recovery::solve;
use wl1a::statdim::ConeSpec;
use wl1a::{
    certify, estimate_statdim, solve_block_weight, AnalysisOperator, Error, MeasurementSet,
    RecoveryProblem, SolverConfig, WeightVector,
};

#[derive(Parser)]
#[command(name = "wl1a", version, about = "Weighted l1-analysis recovery toolkit")]
struct Cli {
    /// Master seed; overrides the config seed when given (default 42).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker thread count (also honors RAYON_NUM_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Verbosity: error, warn, info or debug.
    #[arg(long, global = true, default_value = "info")]
    log_level: String,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the per-block weight equation for given accuracies.
    Weights {
        /// Comma-separated block accuracies in [0, 1].
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Monte Carlo statistical dimension of a weighted l1 descent cone.
    Statdim {
        /// Ambient analysis dimension.
        #[arg(long)]
        p: usize,
        /// CSV file of zero-based support indices.
        #[arg(long)]
        support_file: PathBuf,
        /// CSV file with one nonnegative weight per coefficient (default
        /// uniform 1).
        #[arg(long)]
        weights_file: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Solve one recovery problem from CSV inputs.
    Recover {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        /// CSV weight vector (default uniform 1).
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
    },
    /// Phase-transition heatmap experiment (JSON config).
    Phase { config: PathBuf },
    /// Paired success-curve experiment (JSON config).
    Success { config: PathBuf },
    /// Noisy NMSE-curve experiment (JSON config).
    Nmse { config: PathBuf },
    /// Wavelet image experiment (JSON config).
    Image { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on stdout with success status
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("failed to set thread count: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}

/// Exit 1 for usage/input problems, 2 for numerical failures.
fn classify(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::Parse(_)
        | Error::Json(_)
        | Error::Shape(_)
        | Error::InvalidArgument(_)
        | Error::Partition(_) => 1,
        Error::RankDeficient { .. }
        | Error::InfeasibleSparsity { .. }
        | Error::DegenerateDraw { .. }
        | Error::ZeroReference
        | Error::InfeasibleProfile(_)
        | Error::NotConverged { .. } => 2,
    }
}

fn info(cli: &Cli, msg: &str) {
    if matches!(cli.log_level.as_str(), "info" | "debug") {
        eprintln!("{msg}");
    }
}

fn run(cli: &Cli) -> wl1a::Result<()> {
    match &cli.cmd {
        Command::Weights { alpha, tol } => {
            let weights = alpha
                .iter()
                .map(|&a| solve_block_weight(a, *tol))
                .collect::<wl1a::Result<Vec<f64>>>()?;
            let line = weights
                .iter()
                .map(|w| format!("{w}"))
                .collect::<Vec<_>>()
                .join(",");
            println!("{line}");
            Ok(())
        }
        Command::Statdim {
            p,
            support_file,
            weights_file,
            trials,
        } => {
            let support = read_indices(support_file, *p)?;
            let weights = match weights_file {
                Some(path) => read_vector_csv(path)?,
                None => DVector::from_element(*p, 1.0),
            };
            let signs = vec![1.0; support.len()];
            let cone = ConeSpec::new(*p, support, signs, weights)?;
            let est = estimate_statdim(&cone, *trials, cli.seed.unwrap_or(DEFAULT_SEED))?;
            println!("{}", serde_json::to_string_pretty(&est)?);
            Ok(())
        }
        Command::Recover {
            a,
            y,
            omega,
            weights,
            eta,
        } => {
            let a = read_matrix_csv(a)?;
            let y = read_vector_csv(y)?;
            let omega = read_matrix_csv(omega)?;
            let op = AnalysisOperator::new(omega)?;
            let w = match weights {
                Some(path) => {
                    let v = read_vector_csv(path)?;
                    let blocks: Vec<Vec<usize>> = (0..v.len()).map(|i| vec![i]).collect();
                    WeightVector::from_blocks(&blocks, v.as_slice(), v.len())?
                }
                None => WeightVector::uniform(op.p(), 1.0)?,
            };
            let meas = MeasurementSet::new(a, y, *eta)?;
            let problem = RecoveryProblem::new(&meas, &op, &w)?;
            let result = solve(&problem, &SolverConfig::default())?;
            let cert = certify(&problem, &result);

            std::fs::create_dir_all(&cli.out)?;
            write_vector_csv(&cli.out.join("xhat.csv"), &result.xhat)?;
            write_json(
                &cli.out.join("recover.json"),
                &json!({
                    "iterations": result.iterations,
                    "converged": result.converged,
                    "objective": result.objective,
                    "primal_residual": result.primal_residual,
                    "gap": result.gap,
                    "certificate": cert,
                    "eta": eta,
                }),
            )?;
            info(cli, &format!("wrote {}", cli.out.display()));
            if !result.converged {
                return Err(Error::NotConverged {
                    iterations: result.iterations,
                });
            }
            Ok(())
        }
        Command::Phase { config } => run_experiment(cli, config, "phase_heatmap"),
        Command::Success { config } => run_experiment(cli, config, "success_curve"),
        Command::Nmse { config } => run_experiment(cli, config, "nmse_curve"),
        Command::Image { config } => run_experiment(cli, config, "image"),
    }
}

fn read_indices(path: &Path, p: usize) -> wl1a::Result<Vec<usize>> {
    let v = read_vector_csv(path)?;
    v.iter()
        .map(|&x| {
            if x >= 0.0 && x.fract() == 0.0 && (x as usize) < p {
                Ok(x as usize)
            } else {
                Err(Error::Parse(format!(
                    "support index {x} is not an integer in [0, {p})"
                )))
            }
        })
        .collect()
}

fn run_experiment(cli: &Cli, config_path: &Path, expected_kind: &str) -> wl1a::Result<()> {
    let text = std::fs::read_to_string(config_path)?;
    let mut cfg = parse_config(&text)?;
    if cfg.kind() != expected_kind {
        return Err(Error::InvalidArgument(format!(
            "config is a {} experiment, expected {expected_kind}",
            cfg.kind()
        )));
    }
    if let Some(seed) = cli.seed {
        match &mut cfg {
            ExperimentConfig::PhaseHeatmap(c) => c.master_seed = seed,
            ExperimentConfig::SuccessCurve(c) => c.master_seed = seed,
            ExperimentConfig::NmseCurve(c) => c.master_seed = seed,
            ExperimentConfig::Image(c) => c.master_seed = seed,
        }
    }
    cfg.validate()?;
    let out = match &cfg {
        ExperimentConfig::PhaseHeatmap(c) => run_phase_heatmap(c)?,
        ExperimentConfig::SuccessCurve(c) => run_success_curve(c)?,
        ExperimentConfig::NmseCurve(c) => run_nmse_curve(c)?,
        ExperimentConfig::Image(c) => run_image_experiment(c)?,
    };
    write_outputs(&cli.out, &cfg, &out)?;
    info(cli, &format!("wrote {}", cli.out.display()));
    Ok(())
}
