use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition {P_i} of the analysis indices {0..p-1} with per-block
/// accuracies alpha_i = |P_i ∩ S| / |P_i| and normalized sizes
/// rho_i = |P_i| / p.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriorProfile {
    blocks: Vec<Vec<usize>>,
    accuracies: Vec<f64>,
    sizes: Vec<f64>,
    p: usize,
}

impl PriorProfile {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn accuracies(&self) -> &[f64] {
        &self.accuracies
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

fn check_partition(blocks: &[Vec<usize>], p: usize) -> Result<()> {
    if blocks.is_empty() {
        return Err(Error::Partition("no blocks given".into()));
    }
    let mut seen = vec![false; p];
    for (bi, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::Partition(format!("block {bi} is empty")));
        }
        for &i in block {
            if i >= p {
                return Err(Error::Partition(format!(
                    "block {bi} contains index {i} >= p = {p}"
                )));
            }
            if seen[i] {
                return Err(Error::Partition(format!("index {i} appears in two blocks")));
            }
            seen[i] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::Partition(format!(
            "blocks do not cover index {missing}"
        )));
    }
    Ok(())
}

/// Measures per-block accuracies of a support set against a partition.
pub fn compute_accuracies(
    blocks: Vec<Vec<usize>>,
    support: &[usize],
    p: usize,
) -> Result<PriorProfile> {
    check_partition(&blocks, p)?;
    let mut in_support = vec![false; p];
    for &i in support {
        if i >= p {
            return Err(Error::InvalidArgument(format!(
                "support index {i} >= p = {p}"
            )));
        }
        in_support[i] = true;
    }
    let accuracies = blocks
        .iter()
        .map(|b| b.iter().filter(|&&i| in_support[i]).count() as f64 / b.len() as f64)
        .collect();
    let sizes = blocks.iter().map(|b| b.len() as f64 / p as f64).collect();
    Ok(PriorProfile {
        blocks,
        accuracies,
        sizes,
        p,
    })
}

/// A nonnegative weight vector that is constant on each partition block.
#[derive(Debug, Clone)]
pub struct WeightVector {
    w: DVector<f64>,
    block_weights: Vec<f64>,
}

impl WeightVector {
    /// Uniform weights (the unweighted l1 analysis program uses value 1).
    pub fn uniform(p: usize, value: f64) -> Result<Self> {
        if !(value > 0.0) {
            return Err(Error::InvalidArgument(
                "uniform weight must be positive".into(),
            ));
        }
        Ok(Self {
            w: DVector::from_element(p, value),
            block_weights: vec![value],
        })
    }

    /// Expands per-block scalars to a full p-vector, w = sum_i omega_i 1_{P_i}.
    pub fn from_blocks(blocks: &[Vec<usize>], block_weights: &[f64], p: usize) -> Result<Self> {
        check_partition(blocks, p)?;
        if blocks.len() != block_weights.len() {
            return Err(Error::Shape(format!(
                "{} blocks but {} weights",
                blocks.len(),
                block_weights.len()
            )));
        }
        if block_weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "block weights must be finite and nonnegative".into(),
            ));
        }
        if block_weights.iter().all(|&w| w == 0.0) {
            return Err(Error::InvalidArgument(
                "at least one block weight must be positive".into(),
            ));
        }
        let mut w = DVector::zeros(p);
        for (block, &omega) in blocks.iter().zip(block_weights) {
            for &i in block {
                w[i] = omega;
            }
        }
        Ok(Self {
            w,
            block_weights: block_weights.to_vec(),
        })
    }

    pub fn w(&self) -> &DVector<f64> {
        &self.w
    }

    pub fn block_weights(&self) -> &[f64] {
        &self.block_weights
    }

    pub fn p(&self) -> usize {
        self.w.len()
    }
}
