use super::{check_dims, OptimizationReport, PriorDistribution};
use crate::error::{Error, Result};
use crate::receiver::ChannelMatrix;

pub const DEFAULT_MI_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: u64 = 1_000_000;

// priors below this are pinned to zero
const UNDERFLOW_FLOOR: f64 = 1e-300;

fn output_distribution(channel: &ChannelMatrix, prior: &[f64]) -> Vec<f64> {
    let m = channel.symbols();
    let mut q = vec![0.0; m];
    for (i, &pi) in prior.iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        for (qj, &pij) in q.iter_mut().zip(channel.row(i)) {
            *qj += pi * pij;
        }
    }
    q
}

fn divergences(channel: &ChannelMatrix, q: &[f64]) -> Vec<f64> {
    (0..channel.symbols())
        .map(|i| {
            channel
                .row(i)
                .iter()
                .zip(q)
                .filter(|(&pij, _)| pij > 0.0)
                .map(|(&pij, &qj)| pij * (pij / qj).log2())
                .sum()
        })
        .collect()
}

/// `D(P(·|i) ‖ q)` in bits for every input `i`, where `q` is the output
/// distribution induced by `prior`.
pub fn output_divergences(channel: &ChannelMatrix, prior: &PriorDistribution) -> Result<Vec<f64>> {
    check_dims(channel, prior)?;
    Ok(divergences(channel, &output_distribution(channel, prior.as_slice())))
}

/// Mutual information `I(X:Y)` in bits.
pub fn mutual_information(channel: &ChannelMatrix, prior: &PriorDistribution) -> Result<f64> {
    let d = output_divergences(channel, prior)?;
    let i: f64 = prior.as_slice().iter().zip(&d).filter(|(p, _)| **p > 0.0).map(|(p, d)| p * d).sum();
    Ok(i.max(0.0))
}

/// `max_i D_i − I`, an upper bound on `capacity − I(prior)`.
pub fn capacity_gap(channel: &ChannelMatrix, prior: &PriorDistribution) -> Result<f64> {
    let d = output_divergences(channel, prior)?;
    let i: f64 = prior.as_slice().iter().zip(&d).filter(|(p, _)| **p > 0.0).map(|(p, d)| p * d).sum();
    let max = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((max - i).max(0.0))
}

/// Capacity and capacity-achieving prior by Blahut-Arimoto iteration,
/// started from the uniform prior. Stops once the certified gap
/// `max_i D_i − I` is at most `tolerance` bits.
pub fn maximize_mutual_information(channel: &ChannelMatrix, tolerance: f64) -> Result<OptimizationReport> {
    maximize_mutual_information_capped(channel, tolerance, DEFAULT_MAX_ITERATIONS)
}

pub fn maximize_mutual_information_capped(
    channel: &ChannelMatrix,
    tolerance: f64,
    max_iterations: u64,
) -> Result<OptimizationReport> {
    if !(tolerance > 0.0) {
        return Err(Error::domain(format!("tolerance must be > 0, got {tolerance}")));
    }
    let m = channel.symbols();
    let mut p = vec![1.0 / m as f64; m];
    let mut iterations = 0;
    loop {
        let q = output_distribution(channel, &p);
        let d = divergences(channel, &q);
        let info: f64 = p.iter().zip(&d).filter(|(pi, _)| **pi > 0.0).map(|(pi, di)| pi * di).sum();
        let max_d = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let gap = (max_d - info).max(0.0);
        if gap <= tolerance || iterations >= max_iterations {
            let report = OptimizationReport {
                optimal_prior: PriorDistribution::new(p.clone())?,
                value: info.max(0.0),
                iterations,
                optimality_gap: gap,
            };
            if gap <= tolerance {
                return Ok(report);
            }
            return Err(Error::NonConvergence { best: Box::new(report) });
        }
        // shift exponents by max_d so the largest factor is exactly 1
        for (pi, di) in p.iter_mut().zip(&d) {
            *pi *= (di - max_d).exp2();
        }
        let s: f64 = p.iter().sum();
        for pi in p.iter_mut() {
            *pi /= s;
            if *pi < UNDERFLOW_FLOOR {
                *pi = 0.0;
            }
        }
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|pi| *pi /= s);
        iterations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_channels::*;
    use super::*;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn mi_examples() {
        let u4 = PriorDistribution::uniform(4);
        assert!((mutual_information(&ChannelMatrix::identity(4), &u4).unwrap() - 2.0).abs() < 1e-15);
        assert!(mutual_information(&constant(4), &u4).unwrap().abs() < 1e-15);
        let skew = PriorDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(mutual_information(&constant(4), &skew).unwrap().abs() < 1e-15);
        let i = mutual_information(&bsc(0.1), &PriorDistribution::uniform(2)).unwrap();
        assert!((i - (1.0 - h2(0.1))).abs() < 1e-15);
        assert!((i - 0.531_004_4).abs() < 1e-7);
    }

    #[test]
    fn mi_dimension_mismatch() {
        assert!(mutual_information(&bsc(0.1), &PriorDistribution::uniform(3)).is_err());
    }

    #[test]
    fn capacity_bsc() {
        let r = maximize_mutual_information(&bsc(0.1), 1e-10).unwrap();
        assert!((r.value - (1.0 - h2(0.1))).abs() < 1e-10);
        assert!((r.optimal_prior[0] - 0.5).abs() < 1e-12);
        assert!(r.optimality_gap <= 1e-10);
    }

    #[test]
    fn capacity_z_channel() {
        // closed form C = log2(1 + (1 − p)·p^(p/(1−p)))
        let p: f64 = 0.5;
        let closed = (1.0 + (1.0 - p) * p.powf(p / (1.0 - p))).log2();
        assert!((closed - 1.25f64.log2()).abs() < 1e-15);
        let r = maximize_mutual_information(&z_channel(p), 1e-10).unwrap();
        assert!((r.value - closed).abs() < 1e-9, "{} vs {closed}", r.value);
        // the optimal Z-channel prior sends the clean symbol 0 with probability 0.6
        assert!((r.optimal_prior[0] - 0.6).abs() < 1e-4);
    }

    #[test]
    fn capacity_identity() {
        let r = maximize_mutual_information(&ChannelMatrix::identity(3), 1e-10).unwrap();
        assert!((r.value - 3f64.log2()).abs() < 1e-12);
        assert_eq!(r.iterations, 0);
        for k in 0..3 {
            assert!((r.optimal_prior[k] - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gap_certificate_recomputes() {
        let ch = z_channel(0.3);
        let r = maximize_mutual_information(&ch, 1e-11).unwrap();
        let gap = capacity_gap(&ch, &r.optimal_prior).unwrap();
        assert!(gap <= 1e-11);
        assert!((mutual_information(&ch, &r.optimal_prior).unwrap() - r.value).abs() < 1e-14);
    }

    #[test]
    fn non_convergence_carries_best_iterate() {
        match maximize_mutual_information_capped(&z_channel(0.5), 1e-14, 3) {
            Err(Error::NonConvergence { best }) => {
                assert_eq!(best.iterations, 3);
                assert!(best.value > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
        assert!(maximize_mutual_information(&bsc(0.2), 0.0).is_err());
    }
}
