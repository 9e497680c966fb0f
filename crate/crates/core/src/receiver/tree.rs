use serde::Serialize;

use super::config::STAGES;
use crate::error::{Error, Result};

/// Result of one on-off detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Off,
    On,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Off, Outcome::On];

    fn bit(self) -> usize {
        match self {
            Outcome::Off => 0,
            Outcome::On => 1,
        }
    }
}

/// Final guess at a leaf: uniform over `symbols`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafDecision {
    symbols: Vec<usize>,
}

impl LeafDecision {
    fn uniform(symbols: &[usize]) -> Self {
        debug_assert!(!symbols.is_empty());
        Self { symbols: symbols.to_vec() }
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    /// Number of equally likely guesses; every weight is exactly `1/len`.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_randomized(&self) -> bool {
        self.symbols.len() > 1
    }

    pub fn probability(&self, symbol: usize) -> f64 {
        if self.symbols.contains(&symbol) {
            1.0 / self.symbols.len() as f64
        } else {
            0.0
        }
    }

    /// Picks a symbol with a uniform variate `u ∈ [0, 1)`.
    pub fn sample(&self, u: f64) -> usize {
        let k = ((u * self.symbols.len() as f64) as usize).min(self.symbols.len() - 1);
        self.symbols[k]
    }
}

/// The feedforward strategy: which symbol each stage displaces given the
/// outcomes so far, and the final decision for each outcome triple.
///
/// A `None` hypothesis means the stage is skipped on that branch; both leaves
/// below it carry the same decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecisionTree {
    m: usize,
    // heap order: [root, off, on, off-off, off-on, on-off, on-on]
    hypotheses: [Option<usize>; 7],
    // indexed by the outcome triple read as bits, first stage most significant
    leaves: Vec<LeafDecision>,
}

fn prefix_index(prefix: &[Outcome]) -> usize {
    prefix.iter().fold(0, |acc, o| 2 * acc + o.bit()) + (1 << prefix.len()) - 1
}

fn leaf_index(outcomes: &[Outcome; STAGES]) -> usize {
    outcomes.iter().fold(0, |acc, o| 2 * acc + o.bit())
}

impl DecisionTree {
    pub fn symbols(&self) -> usize {
        self.m
    }

    pub fn stage_count(&self) -> usize {
        STAGES
    }

    /// Hypothesis displaced at stage `prefix.len() + 1`.
    pub fn hypothesis(&self, prefix: &[Outcome]) -> Option<usize> {
        assert!(prefix.len() < STAGES, "prefix longer than the tree");
        self.hypotheses[prefix_index(prefix)]
    }

    pub fn leaf(&self, outcomes: &[Outcome; STAGES]) -> &LeafDecision {
        &self.leaves[leaf_index(outcomes)]
    }

    /// All outcome triples in lexicographic order (off before on).
    pub fn outcome_triples() -> impl Iterator<Item = [Outcome; STAGES]> {
        (0..1usize << STAGES).map(|bits| {
            let mut o = [Outcome::Off; STAGES];
            for (k, slot) in o.iter_mut().enumerate() {
                if bits >> (STAGES - 1 - k) & 1 == 1 {
                    *slot = Outcome::On;
                }
            }
            o
        })
    }
}

/// The canonical three-stage tree for `m` ∈ {3, 4}.
///
/// Stage 1 always tests symbol 0. For 4-PSK a click sends stage 2 to the
/// diagonal symbol 2 and two clicks send stage 3 to symbol 1. For 3-PSK two
/// clicks decide symbol 2 outright and stage 3 is skipped.
pub fn build_decision_tree(m: usize) -> Result<DecisionTree> {
    let (hypotheses, leaves): ([Option<usize>; 7], [&[usize]; 8]) = match m {
        4 => (
            [Some(0), Some(0), Some(2), Some(0), Some(2), Some(2), Some(1)],
            [
                &[0],        // off off off
                &[1, 2, 3],  // off off on
                &[2],        // off on off
                &[1, 3],     // off on on
                &[2],        // on off off
                &[1, 3],     // on off on
                &[1],        // on on off
                &[3],        // on on on
            ],
        ),
        3 => (
            [Some(0), Some(0), Some(1), Some(0), Some(1), Some(1), None],
            [
                &[0],
                &[1, 2],
                &[1],
                &[2],
                &[1],
                &[2],
                &[2],
                &[2],
            ],
        ),
        other => return Err(Error::UnsupportedSymbolCount(other)),
    };
    Ok(DecisionTree {
        m,
        hypotheses,
        leaves: leaves.iter().map(|s| LeafDecision::uniform(s)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::Outcome::{Off, On};
    use super::*;

    #[test]
    fn four_psk_structure() {
        let t = build_decision_tree(4).unwrap();
        assert_eq!(t.hypothesis(&[]), Some(0));
        assert_eq!(t.hypothesis(&[Off]), Some(0));
        assert_eq!(t.hypothesis(&[On]), Some(2));
        assert_eq!(t.hypothesis(&[Off, Off]), Some(0));
        assert_eq!(t.hypothesis(&[Off, On]), Some(2));
        assert_eq!(t.hypothesis(&[On, Off]), Some(2));
        assert_eq!(t.hypothesis(&[On, On]), Some(1));
        let leaf = t.leaf(&[Off, Off, On]);
        for j in 1..4 {
            assert_eq!(leaf.probability(j), 1.0 / 3.0);
        }
        assert_eq!(leaf.probability(0), 0.0);
        assert_eq!(t.leaf(&[On, On, On]).symbols(), &[3]);
    }

    #[test]
    fn three_psk_structure() {
        let t = build_decision_tree(3).unwrap();
        assert_eq!(t.hypothesis(&[On]), Some(1));
        assert_eq!(t.hypothesis(&[On, On]), None);
        let leaf = t.leaf(&[Off, Off, On]);
        assert_eq!(leaf.probability(1), 0.5);
        assert_eq!(leaf.probability(2), 0.5);
        assert_eq!(t.leaf(&[On, On, Off]), t.leaf(&[On, On, On]));
    }

    #[test]
    fn leaves_are_distributions() {
        for m in [3, 4] {
            let t = build_decision_tree(m).unwrap();
            for o in DecisionTree::outcome_triples() {
                let leaf = t.leaf(&o);
                // weights are 1/len for each of len distinct symbols
                let mut s = leaf.symbols().to_vec();
                s.dedup();
                assert_eq!(s.len(), leaf.len());
                assert!(s.iter().all(|&j| j < m));
                let total: f64 = (0..m).map(|j| leaf.probability(j)).sum();
                assert!((total - 1.0).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn unsupported_m() {
        assert!(matches!(build_decision_tree(5), Err(Error::UnsupportedSymbolCount(5))));
        assert!(build_decision_tree(2).is_err());
    }

    #[test]
    fn triples_are_ordered() {
        let v: Vec<_> = DecisionTree::outcome_triples().collect();
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], [Off, Off, Off]);
        assert_eq!(v[1], [Off, Off, On]);
        assert_eq!(v[6], [On, On, Off]);
    }

    #[test]
    fn leaf_sampling_covers_symbols() {
        let t = build_decision_tree(4).unwrap();
        let leaf = t.leaf(&[Off, Off, On]);
        assert_eq!(leaf.sample(0.0), 1);
        assert_eq!(leaf.sample(0.5), 2);
        assert_eq!(leaf.sample(0.999_999), 3);
    }
}
