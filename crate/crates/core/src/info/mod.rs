//! Information-theoretic quantities over a channel matrix and an input
//! prior: mutual information and capacity, the Bhattacharyya matrix and
//! cutoff rate, symbol error rate, and block-code length bounds.

mod coding;
mod cutoff;
mod mutual;

use serde::Serialize;

pub use coding::{decoding_error_bound, required_code_length};
pub use cutoff::{
    bhattacharyya_matrix, cutoff_kkt_residual, cutoff_rate_at, minimize_cutoff_objective, BhattacharyyaMatrix,
};
pub use mutual::{
    capacity_gap, maximize_mutual_information, maximize_mutual_information_capped, mutual_information, output_divergences, DEFAULT_MAX_ITERATIONS,
    DEFAULT_MI_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::receiver::ChannelMatrix;

/// Input distribution over the symbols.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PriorDistribution {
    p: Vec<f64>,
}

impl PriorDistribution {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::domain("prior must have at least one component"));
        }
        if p.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::domain(format!("prior has a negative or non-finite entry: {p:?}")));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::domain(format!("prior sums to {s}")));
        }
        Ok(Self { p })
    }

    pub fn uniform(m: usize) -> Self {
        Self { p: vec![1.0 / m as f64; m] }
    }

    pub fn vertex(m: usize, k: usize) -> Self {
        let mut p = vec![0.0; m];
        p[k] = 1.0;
        Self { p }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.p
    }
}

impl std::ops::Index<usize> for PriorDistribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.p[i]
    }
}

/// Result of a prior optimization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub optimal_prior: PriorDistribution,
    /// Bits for mutual information, nats for the cutoff rate.
    pub value: f64,
    pub iterations: u64,
    /// Certified bound on the distance to the optimum (0 for exact solvers).
    pub optimality_gap: f64,
}

pub(crate) fn check_dims(channel: &ChannelMatrix, prior: &PriorDistribution) -> Result<()> {
    if channel.symbols() != prior.len() {
        return Err(Error::DimensionMismatch { expected: channel.symbols(), found: prior.len() });
    }
    Ok(())
}

/// Symbol error rate `1 − Σ_i p_i·P(i|i)`.
pub fn average_error_rate(channel: &ChannelMatrix, prior: &PriorDistribution) -> Result<f64> {
    check_dims(channel, prior)?;
    let correct: f64 = (0..prior.len()).map(|i| prior[i] * channel.get(i, i)).sum();
    Ok((1.0 - correct).clamp(0.0, 1.0))
}

#[cfg(test)]
pub(crate) mod test_channels {
    use crate::receiver::ChannelMatrix;

    pub fn bsc(e: f64) -> ChannelMatrix {
        ChannelMatrix::from_rows(vec![vec![1.0 - e, e], vec![e, 1.0 - e]], 1e-12).unwrap()
    }

    /// Input 1 flips to 0 with probability `p`.
    pub fn z_channel(p: f64) -> ChannelMatrix {
        ChannelMatrix::from_rows(vec![vec![1.0, 0.0], vec![p, 1.0 - p]], 1e-12).unwrap()
    }

    pub fn constant(m: usize) -> ChannelMatrix {
        ChannelMatrix::from_rows(vec![vec![1.0 / m as f64; m]; m], 1e-12).unwrap()
    }
}
