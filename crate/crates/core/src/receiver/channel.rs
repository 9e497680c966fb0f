use serde::Serialize;

use super::config::{ReceiverConfig, STAGES};
use super::geometry::{off_probability, residual_distance_sq};
use super::tree::{DecisionTree, LeafDecision, Outcome};
use crate::error::{Error, Result};

/// Row-stochastic table of conditional probabilities, `p[i][j] = P(j|i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ChannelMatrix {
    p: Vec<Vec<f64>>,
}

impl ChannelMatrix {
    /// Default row-sum tolerance for [`ChannelMatrix::from_rows`].
    pub const ROW_SUM_TOL: f64 = 1e-12;

    /// Validates `rows` as a square row-stochastic table whose rows sum to
    /// one within `tol`. Entries may undershoot zero by at most `tol`; such
    /// rounding residue is clamped to zero.
    pub fn from_rows(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::domain("channel matrix must have at least one row"));
        }
        let mut p = rows;
        for (i, row) in p.iter_mut().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: row.len() });
            }
            for x in row.iter_mut() {
                if !x.is_finite() || *x < -tol || *x > 1.0 + tol {
                    return Err(Error::domain(format!("entry {x} of row {i} is not a probability")));
                }
                *x = x.clamp(0.0, 1.0);
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::domain(format!("row {i} sums to {s}")));
            }
        }
        Ok(Self { p })
    }

    pub fn identity(m: usize) -> Self {
        let p = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { p }
    }

    pub fn symbols(&self) -> usize {
        self.p.len()
    }

    #[inline]
    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.p[input][output]
    }

    pub fn row(&self, input: usize) -> &[f64] {
        &self.p[input]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.p
    }

    pub fn max_row_sum_error(&self) -> f64 {
        self.p
            .iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// One detection event along a path through the tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageFactor {
    /// Zero-based stage index.
    pub stage: usize,
    pub outcome: Outcome,
    pub hypothesis: usize,
    /// `|α_i − α_h|² / |α|²`: 0, 2 or 4 for 4-PSK; 0 or 3 for 3-PSK.
    pub residual_multiple: f64,
}

impl StageFactor {
    pub fn probability(&self, config: &ReceiverConfig) -> f64 {
        let f = config.stage_fractions()[self.stage];
        let p_off = (-config.gamma - config.eta * f * self.residual_multiple * config.alpha_sq).exp();
        match self.outcome {
            Outcome::Off => p_off,
            Outcome::On => 1.0 - p_off,
        }
    }
}

/// A complete path for one input symbol: the detection events actually
/// performed and the leaf reached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathTerm {
    pub input: usize,
    pub factors: Vec<StageFactor>,
    pub leaf: LeafDecision,
}

impl PathTerm {
    pub fn probability(&self, config: &ReceiverConfig) -> f64 {
        self.factors.iter().map(|f| f.probability(config)).product()
    }
}

/// Enumerates every path of `tree` for `input`, in lexicographic outcome
/// order. Branches whose next stage is skipped end early.
pub fn path_terms(tree: &DecisionTree, input: usize) -> Result<Vec<PathTerm>> {
    let m = tree.symbols();
    if input >= m {
        return Err(Error::domain(format!("input symbol {input} out of range for M = {m}")));
    }
    let mut out = Vec::with_capacity(1 << STAGES);
    let mut prefix = Vec::with_capacity(STAGES);
    let mut factors = Vec::with_capacity(STAGES);
    walk(tree, input, &mut prefix, &mut factors, &mut out)?;
    Ok(out)
}

fn walk(
    tree: &DecisionTree,
    input: usize,
    prefix: &mut Vec<Outcome>,
    factors: &mut Vec<StageFactor>,
    out: &mut Vec<PathTerm>,
) -> Result<()> {
    let depth = prefix.len();
    let hypothesis = if depth < STAGES { tree.hypothesis(prefix) } else { None };
    let Some(h) = hypothesis else {
        // leaf, or a skipped tail: every completion shares one decision
        let mut full = [Outcome::Off; STAGES];
        full[..depth].copy_from_slice(prefix);
        out.push(PathTerm {
            input,
            factors: factors.clone(),
            leaf: tree.leaf(&full).clone(),
        });
        return Ok(());
    };
    let multiple = residual_distance_sq(input, h, tree.symbols(), 1.0)?;
    for outcome in Outcome::BOTH {
        prefix.push(outcome);
        factors.push(StageFactor {
            stage: depth,
            outcome,
            hypothesis: h,
            residual_multiple: multiple,
        });
        walk(tree, input, prefix, factors, out)?;
        prefix.pop();
        factors.pop();
    }
    Ok(())
}

/// Exact channel matrix of the receiver: for every input, the probability of
/// each path times the leaf's decision weights, summed over all paths.
pub fn exact_channel_matrix(config: &ReceiverConfig, tree: &DecisionTree) -> Result<ChannelMatrix> {
    config.validate()?;
    let m = config.m;
    if tree.symbols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: tree.symbols() });
    }
    let fractions = config.stage_fractions();
    let mut rows = vec![vec![0.0; m]; m];
    for (input, row) in rows.iter_mut().enumerate() {
        for triple in DecisionTree::outcome_triples() {
            let mut prob = 1.0;
            for k in 0..STAGES {
                let Some(h) = tree.hypothesis(&triple[..k]) else {
                    // skipped stage: only count the branch once
                    if triple[k] == Outcome::On {
                        prob = 0.0;
                    }
                    continue;
                };
                let d_sq = fractions[k] * residual_distance_sq(input, h, m, config.alpha_sq)?;
                let p_off = off_probability(d_sq, config.eta, config.gamma)?;
                prob *= match triple[k] {
                    Outcome::Off => p_off,
                    Outcome::On => 1.0 - p_off,
                };
            }
            if prob == 0.0 {
                continue;
            }
            let leaf = tree.leaf(&triple);
            let w = prob / leaf.len() as f64;
            for &j in leaf.symbols() {
                row[j] += w;
            }
        }
    }
    ChannelMatrix::from_rows(rows, ChannelMatrix::ROW_SUM_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::receiver::build_decision_tree;

    fn exact(config: ReceiverConfig) -> ChannelMatrix {
        exact_channel_matrix(&config, &build_decision_tree(config.m).unwrap()).unwrap()
    }

    #[test]
    fn vacuum_decodes_to_zero() {
        for m in [3, 4] {
            let p = exact(ReceiverConfig::new(m, 0.0).with_gamma(0.0));
            for i in 0..m {
                assert_eq!(p.get(i, 0), 1.0);
            }
        }
    }

    #[test]
    fn strong_signal_is_identity() {
        for m in [3, 4] {
            let p = exact(ReceiverConfig::new(m, 50.0).with_gamma(0.0));
            for i in 0..m {
                for j in 0..m {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((p.get(i, j) - want).abs() < 1e-10, "({i},{j}) = {}", p.get(i, j));
                }
            }
        }
    }

    #[test]
    fn path_sum_matches_triple_sum() {
        for m in [3, 4] {
            let tree = build_decision_tree(m).unwrap();
            let config = ReceiverConfig::new(m, 0.8).with_eta(0.7).with_gamma(0.02).with_splitters(0.4, 0.3);
            let p = exact_channel_matrix(&config, &tree).unwrap();
            for i in 0..m {
                let mut row = vec![0.0; m];
                for term in path_terms(&tree, i).unwrap() {
                    let w = term.probability(&config);
                    for j in 0..m {
                        row[j] += w * term.leaf.probability(j);
                    }
                }
                for j in 0..m {
                    assert!((row[j] - p.get(i, j)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn path_counts() {
        let t4 = build_decision_tree(4).unwrap();
        let t3 = build_decision_tree(3).unwrap();
        assert_eq!(path_terms(&t4, 0).unwrap().len(), 8);
        let p3 = path_terms(&t3, 1).unwrap();
        assert_eq!(p3.len(), 7);
        assert_eq!(p3.last().unwrap().factors.len(), 2);
    }

    #[test]
    fn mismatched_tree() {
        let tree = build_decision_tree(3).unwrap();
        assert!(exact_channel_matrix(&ReceiverConfig::new(4, 1.0), &tree).is_err());
    }

    #[test]
    fn from_rows_validation() {
        assert!(ChannelMatrix::from_rows(vec![vec![0.5, 0.5], vec![0.2, 0.7]], 1e-12).is_err());
        assert!(ChannelMatrix::from_rows(vec![vec![1.5, -0.5], vec![0.0, 1.0]], 1e-12).is_err());
        assert!(ChannelMatrix::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0]], 1e-12).is_err());
        let c = ChannelMatrix::from_rows(vec![vec![0.9, 0.1], vec![0.1, 0.9]], 1e-12).unwrap();
        assert_eq!(c.symbols(), 2);
    }
}
