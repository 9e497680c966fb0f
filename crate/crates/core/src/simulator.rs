//! Seeded Monte-Carlo simulation of single receiver trials.
//!
//! Trial `t` for input `i` reads its variates from a ChaCha8 stream keyed by
//! the seed, on stream `i`, starting at word `t·WORDS_PER_TRIAL`. Every trial
//! therefore sees the same variates however the trials are split across
//! threads, and the counts are bit-for-bit reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::receiver::{
    off_probability, residual_distance_sq, ChannelMatrix, DecisionTree, Outcome, ReceiverConfig, STAGES,
};

/// Uniform variates drawn per trial: one per stage plus one for the leaf.
/// All are drawn even when a stage is skipped or the leaf is deterministic.
pub const VARIATES_PER_TRIAL: usize = STAGES + 1;

// each f64 variate consumes one u64, i.e. two 32-bit ChaCha words
const WORDS_PER_TRIAL: u128 = 2 * VARIATES_PER_TRIAL as u128;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationSpec {
    pub config: ReceiverConfig,
    pub trials_per_input: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    /// `counts[i][j]`: trials with input `i` decided as `j`.
    pub counts: Vec<Vec<u64>>,
    pub empirical: Vec<Vec<f64>>,
    pub seed: u64,
}

/// Runs one trial for `input`, consuming exactly [`VARIATES_PER_TRIAL`]
/// variates from `rng`, and returns the decided symbol.
pub fn simulate_trial<R: Rng + ?Sized>(
    config: &ReceiverConfig,
    tree: &DecisionTree,
    input: usize,
    rng: &mut R,
) -> Result<usize> {
    let fractions = config.stage_fractions();
    let mut u = [0.0f64; VARIATES_PER_TRIAL];
    for v in u.iter_mut() {
        *v = rng.random();
    }
    let mut outcomes = [Outcome::Off; STAGES];
    for k in 0..STAGES {
        // a skipped stage leaves its outcome at Off; both leaves agree
        if let Some(h) = tree.hypothesis(&outcomes[..k]) {
            let d_sq = fractions[k] * residual_distance_sq(input, h, config.m, config.alpha_sq)?;
            let p_off = off_probability(d_sq, config.eta, config.gamma)?;
            if u[k] >= p_off {
                outcomes[k] = Outcome::On;
            }
        }
    }
    Ok(tree.leaf(&outcomes).sample(u[STAGES]))
}

fn stream_for(seed: u64, input: usize, first_trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(input as u64);
    rng.set_word_pos(first_trial as u128 * WORDS_PER_TRIAL);
    rng
}

fn run_chunk(
    config: &ReceiverConfig,
    tree: &DecisionTree,
    seed: u64,
    input: usize,
    start: u64,
    end: u64,
) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; config.m];
    let mut rng = stream_for(seed, input, start);
    for _ in start..end {
        counts[simulate_trial(config, tree, input, &mut rng)?] += 1;
    }
    Ok(counts)
}

/// Estimates the channel matrix from `trials_per_input` trials per input.
pub fn estimate_channel_matrix(spec: &SimulationSpec, tree: &DecisionTree) -> Result<SimulationReport> {
    spec.config.validate()?;
    if spec.trials_per_input == 0 {
        return Err(Error::domain("trials_per_input must be at least 1"));
    }
    let m = spec.config.m;
    if tree.symbols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: tree.symbols() });
    }
    let n = spec.trials_per_input;
    let jobs: Vec<(usize, u64, u64)> = (0..m)
        .flat_map(|i| (0..n.div_ceil(CHUNK)).map(move |c| (i, c * CHUNK, ((c + 1) * CHUNK).min(n))))
        .collect();
    let run = |&(i, s, e): &(usize, u64, u64)| run_chunk(&spec.config, tree, spec.seed, i, s, e).map(|c| (i, c));

    #[cfg(feature = "parallel")]
    let partial: Vec<(usize, Vec<u64>)> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let partial: Vec<(usize, Vec<u64>)> = jobs.iter().map(run).collect::<Result<_>>()?;

    let mut counts = vec![vec![0u64; m]; m];
    for (i, c) in partial {
        for (total, x) in counts[i].iter_mut().zip(c) {
            *total += x;
        }
    }
    let empirical = counts
        .iter()
        .map(|row| row.iter().map(|&c| c as f64 / n as f64).collect())
        .collect();
    Ok(SimulationReport { counts, empirical, seed: spec.seed })
}

/// Deviation of an empirical matrix from the exact one, in binomial
/// standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation {
    pub input: usize,
    pub output: usize,
    pub abs: f64,
    pub sigma: f64,
    /// Entries beyond `threshold` standard deviations.
    pub outliers: usize,
}

/// Scores every entry against `exact` and returns the worst one. An entry
/// with zero variance counts as `inf` unless it matches exactly.
pub fn compare_to_exact(report: &SimulationReport, exact: &ChannelMatrix, trials: u64, threshold: f64) -> Result<Deviation> {
    let m = exact.symbols();
    if report.empirical.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: report.empirical.len() });
    }
    let n = trials as f64;
    let mut worst = Deviation { input: 0, output: 0, abs: 0.0, sigma: 0.0, outliers: 0 };
    for i in 0..m {
        for j in 0..m {
            let p = exact.get(i, j);
            let diff = (report.empirical[i][j] - p).abs();
            let sd = (p * (1.0 - p) / n).sqrt();
            let z = if diff == 0.0 { 0.0 } else if sd == 0.0 { f64::INFINITY } else { diff / sd };
            if z > threshold {
                worst.outliers += 1;
            }
            if z > worst.sigma {
                worst = Deviation { input: i, output: j, abs: diff, sigma: z, outliers: worst.outliers };
            }
        }
    }
    Ok(worst)
}
