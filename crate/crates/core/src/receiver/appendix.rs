//! Literal transcription of the published closed-form channel matrices and
//! a term-by-term audit against the tree evaluator.
//!
//! The printed expressions are kept exactly as published, typos included.
//! [`audit`] evaluates them, diffs them against [`exact_channel_matrix`] and
//! matches every printed product term to a path through the decision tree,
//! reporting the terms that have no counterpart.

use std::fmt;

use serde::Serialize;

use super::channel::{exact_channel_matrix, path_terms, ChannelMatrix, PathTerm};
use super::config::ReceiverConfig;
use super::tree::{build_decision_tree, Outcome};
use crate::error::{Error, Result};

/// Energy fraction named in a printed exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fraction {
    /// `1 − r1`
    OneMinusR1,
    /// `r1·r2`
    R1R2,
    /// `r1·(1 − r2)`
    R1OneMinusR2,
}

impl Fraction {
    pub fn value(self, config: &ReceiverConfig) -> f64 {
        match self {
            Fraction::OneMinusR1 => 1.0 - config.r1,
            Fraction::R1R2 => config.r1 * config.r2,
            Fraction::R1OneMinusR2 => config.r1 * (1.0 - config.r2),
        }
    }

    fn label(self) -> &'static str {
        match self {
            Fraction::OneMinusR1 => "(1-r1)",
            Fraction::R1R2 => "r1r2",
            Fraction::R1OneMinusR2 => "r1(1-r2)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Table a-1, 4-PSK.
    A1FourPsk,
    /// Table a-2, 3-PSK.
    A2ThreePsk,
}

impl Variant {
    pub fn for_symbols(m: usize) -> Result<Self> {
        match m {
            4 => Ok(Variant::A1FourPsk),
            3 => Ok(Variant::A2ThreePsk),
            other => Err(Error::UnsupportedSymbolCount(other)),
        }
    }

    pub fn symbols(self) -> usize {
        match self {
            Variant::A1FourPsk => 4,
            Variant::A2ThreePsk => 3,
        }
    }

    /// Fraction each stage position carries in this table. The 3-PSK table
    /// writes stage 2 with `r1(1−r2)` and stage 3 with `r1·r2`.
    pub fn stage_labels(self) -> [Fraction; 3] {
        match self {
            Variant::A1FourPsk => [Fraction::OneMinusR1, Fraction::R1R2, Fraction::R1OneMinusR2],
            Variant::A2ThreePsk => [Fraction::OneMinusR1, Fraction::R1OneMinusR2, Fraction::R1R2],
        }
    }
}

/// `e^{−γ − multiple·fraction·η·α²}` (off) or one minus it (on).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrintedFactor {
    pub outcome: Outcome,
    pub multiple: u8,
    pub fraction: Option<Fraction>,
}

impl PrintedFactor {
    pub fn value(&self, config: &ReceiverConfig) -> f64 {
        let f = self.fraction.map_or(0.0, |f| f.value(config));
        let off = (-config.gamma - self.multiple as f64 * f * config.eta * config.alpha_sq).exp();
        match self.outcome {
            Outcome::Off => off,
            Outcome::On => 1.0 - off,
        }
    }
}

impl fmt::Display for PrintedFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exp = match self.fraction {
            Some(fr) if self.multiple > 0 => format!("e^(-g-{}{}a2)", self.multiple, fr.label()),
            _ => "e^(-g)".to_string(),
        };
        match self.outcome {
            Outcome::Off => f.write_str(&exp),
            Outcome::On => write!(f, "(1-{exp})"),
        }
    }
}

/// One printed product term: `factors` multiplied, divided by `divisor`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrintedTerm {
    pub divisor: u8,
    pub factors: Vec<PrintedFactor>,
}

impl PrintedTerm {
    pub fn value(&self, config: &ReceiverConfig) -> f64 {
        self.factors.iter().map(|f| f.value(config)).product::<f64>() / self.divisor as f64
    }
}

impl fmt::Display for PrintedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.divisor != 1 {
            write!(f, "1/{} ", self.divisor)?;
        }
        let parts: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join("*"))
    }
}

const fn off(multiple: u8, fraction: Fraction) -> PrintedFactor {
    PrintedFactor { outcome: Outcome::Off, multiple, fraction: Some(fraction) }
}

const fn on(multiple: u8, fraction: Fraction) -> PrintedFactor {
    PrintedFactor { outcome: Outcome::On, multiple, fraction: Some(fraction) }
}

const E0: PrintedFactor = PrintedFactor { outcome: Outcome::Off, multiple: 0, fraction: None };
const N0: PrintedFactor = PrintedFactor { outcome: Outcome::On, multiple: 0, fraction: None };

fn t(divisor: u8, factors: &[PrintedFactor]) -> PrintedTerm {
    PrintedTerm { divisor, factors: factors.to_vec() }
}

/// Printed terms indexed `[input][output]`.
pub fn printed_terms(variant: Variant) -> Vec<Vec<Vec<PrintedTerm>>> {
    use Fraction::{OneMinusR1 as F1, R1OneMinusR2 as RT, R1R2 as RR};
    match variant {
        Variant::A1FourPsk => {
            let w_thirds = |c| t(3, &[off(c, F1), off(c, RR), on(c, RT)]);
            vec![
                vec![
                    vec![t(1, &[E0, E0, E0])],
                    vec![
                        t(3, &[E0, E0, N0]),
                        t(2, &[E0, N0, on(4, RT)]),
                        t(2, &[N0, off(4, RR), on(4, RT)]),
                        t(1, &[N0, off(4, RR), off(2, RT)]),
                    ],
                    vec![
                        t(3, &[E0, E0, N0]),
                        t(1, &[E0, N0, on(4, RT)]),
                        t(1, &[N0, off(4, RR), off(4, RT)]),
                    ],
                    vec![
                        t(3, &[E0, E0, N0]),
                        t(2, &[E0, N0, on(4, RT)]),
                        t(2, &[N0, off(4, RR), on(4, RT)]),
                        t(1, &[N0, off(4, RR), on(2, RT)]),
                    ],
                ],
                vec![
                    vec![t(1, &[off(2, F1), off(2, RR), off(2, RT)])],
                    vec![
                        w_thirds(2),
                        t(2, &[off(2, F1), on(2, RR), on(2, RT)]),
                        t(2, &[on(2, F1), off(2, RR), on(2, RT)]),
                        t(1, &[on(2, F1), on(2, RR), E0]),
                    ],
                    vec![
                        w_thirds(2),
                        t(1, &[off(2, F1), on(2, RR), off(2, RT)]),
                        t(1, &[on(2, F1), off(2, RR), off(2, RT)]),
                    ],
                    vec![
                        w_thirds(2),
                        t(2, &[off(2, F1), on(2, RR), on(2, RT)]),
                        t(2, &[on(2, F1), off(2, RR), on(2, RT)]),
                        t(1, &[on(2, F1), on(2, RR), N0]),
                    ],
                ],
                vec![
                    vec![t(1, &[off(4, F1), off(4, RR), off(4, RT)])],
                    vec![
                        w_thirds(4),
                        t(2, &[off(4, F1), on(4, RR), N0]),
                        t(2, &[on(4, F1), E0, N0]),
                        t(1, &[on(4, F1), N0, off(2, RT)]),
                    ],
                    vec![
                        w_thirds(4),
                        t(1, &[off(4, F1), on(4, RR), E0]),
                        t(1, &[on(4, F1), E0, E0]),
                    ],
                    vec![
                        w_thirds(4),
                        t(2, &[off(4, F1), on(4, RR), N0]),
                        t(2, &[on(4, F1), E0, N0]),
                        t(1, &[on(4, F1), N0, on(2, RT)]),
                    ],
                ],
                vec![
                    vec![t(1, &[off(2, F1), off(2, RR), off(2, RT)])],
                    vec![
                        w_thirds(2),
                        t(2, &[off(2, F1), on(2, RR), on(2, RT)]),
                        t(2, &[on(2, F1), off(2, RR), on(2, RT)]),
                        t(1, &[on(2, F1), on(2, RR), off(4, RT)]),
                    ],
                    vec![
                        w_thirds(2),
                        t(1, &[off(2, F1), on(2, RR), on(2, RT)]),
                        t(1, &[on(2, F1), off(2, RR), off(2, RT)]),
                    ],
                    vec![
                        w_thirds(2),
                        t(2, &[off(2, F1), on(2, RR), on(2, RT)]),
                        t(2, &[on(2, F1), off(2, RR), on(2, RT)]),
                        t(1, &[on(2, F1), on(2, RR), on(4, RT)]),
                    ],
                ],
            ]
        }
        Variant::A2ThreePsk => {
            let w_halves = || t(2, &[off(3, F1), off(3, RT), on(3, RR)]);
            vec![
                vec![
                    vec![t(1, &[E0, E0, E0])],
                    vec![
                        t(2, &[E0, E0, N0]),
                        t(1, &[E0, N0, off(3, RR)]),
                        t(1, &[N0, off(3, RT), off(3, RR)]),
                    ],
                    vec![
                        t(2, &[E0, E0, N0]),
                        t(1, &[E0, N0, on(3, RR)]),
                        t(1, &[N0, off(3, RT), on(3, RR)]),
                        t(1, &[N0, on(3, RT)]),
                    ],
                ],
                vec![
                    vec![t(1, &[off(3, F1), off(3, RT), off(3, RR)])],
                    vec![
                        w_halves(),
                        t(1, &[off(3, F1), on(3, RT), E0]),
                        t(1, &[on(3, F1), E0, E0]),
                    ],
                    vec![
                        w_halves(),
                        t(1, &[off(3, F1), on(3, RT), N0]),
                        t(1, &[on(3, F1), N0]),
                    ],
                ],
                vec![
                    vec![t(1, &[off(3, F1), off(3, RT), off(3, RR)])],
                    vec![
                        w_halves(),
                        t(1, &[off(3, F1), on(3, RT), off(3, RR)]),
                        t(1, &[on(3, F1), off(3, RT), off(3, RR)]),
                    ],
                    vec![
                        w_halves(),
                        t(1, &[off(3, F1), on(3, RT), on(3, RR)]),
                        t(1, &[on(3, F1), off(3, F1), on(3, RR)]),
                        t(1, &[on(3, F1), on(3, F1)]),
                    ],
                ],
            ]
        }
    }
}

/// Evaluates the printed table. Rows need not sum to one.
pub fn appendix_table(config: &ReceiverConfig, variant: Variant) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    if config.m != variant.symbols() {
        return Err(Error::DimensionMismatch { expected: variant.symbols(), found: config.m });
    }
    Ok(printed_terms(variant)
        .iter()
        .map(|row| row.iter().map(|entry| entry.iter().map(|term| term.value(config)).sum()).collect())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// A printed term differs from its nearest tree path in the listed
    /// stage positions (1-based).
    Substituted {
        printed_term: usize,
        printed: String,
        expected: String,
        positions: Vec<usize>,
    },
    /// A printed term with no tree path of the same weight and length.
    Extra { printed_term: usize, printed: String },
    /// A tree path contributing to this entry that the table omits.
    Missing { expected: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermDiscrepancy {
    pub input: usize,
    pub output: usize,
    #[serde(flatten)]
    pub kind: DiscrepancyKind,
}

impl fmt::Display for TermDiscrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({}|{}): ", self.output, self.input)?;
        match &self.kind {
            DiscrepancyKind::Substituted { printed_term, printed, expected, positions } => write!(
                f,
                "term {printed_term} printed as {printed}, tree gives {expected} (stage {positions:?})"
            ),
            DiscrepancyKind::Extra { printed_term, printed } => {
                write!(f, "term {printed_term} {printed} matches no tree path")
            }
            DiscrepancyKind::Missing { expected } => write!(f, "missing term {expected}"),
        }
    }
}

/// Evaluated transcription, exact matrix, their signed difference
/// (`printed − exact`) and the symbolic term mismatches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixAudit {
    pub variant: Variant,
    pub printed: Vec<Vec<f64>>,
    pub exact: ChannelMatrix,
    pub diff: Vec<Vec<f64>>,
    pub discrepancies: Vec<TermDiscrepancy>,
}

impl AppendixAudit {
    pub fn max_abs_diff(&self) -> f64 {
        self.diff.iter().flatten().fold(0.0, |a, d| a.max(d.abs()))
    }

    pub fn printed_row_sums(&self) -> Vec<f64> {
        self.printed.iter().map(|r| r.iter().sum()).collect()
    }
}

/// Audits the printed table for `variant` at `config` (whose `m` must match).
pub fn audit(config: &ReceiverConfig, variant: Variant) -> Result<AppendixAudit> {
    let printed = appendix_table(config, variant)?;
    let tree = build_decision_tree(config.m)?;
    let exact = exact_channel_matrix(config, &tree)?;
    let diff = printed
        .iter()
        .zip(exact.rows())
        .map(|(p, e)| p.iter().zip(e).map(|(a, b)| a - b).collect())
        .collect();
    let discrepancies = symbolic_discrepancies(variant)?;
    Ok(AppendixAudit { variant, printed, exact, diff, discrepancies })
}

/// Matches printed terms against tree paths. Independent of parameters.
pub fn symbolic_discrepancies(variant: Variant) -> Result<Vec<TermDiscrepancy>> {
    let m = variant.symbols();
    let tree = build_decision_tree(m)?;
    let labels = variant.stage_labels();
    let table = printed_terms(variant);
    let mut out = Vec::new();
    for (input, row) in table.iter().enumerate() {
        let paths = path_terms(&tree, input)?;
        for (output, printed) in row.iter().enumerate() {
            let expected: Vec<&PathTerm> = paths
                .iter()
                .filter(|p| p.leaf.probability(output) > 0.0)
                .collect();
            let mut used = vec![false; expected.len()];
            let mut unmatched = Vec::new();
            for (k, term) in printed.iter().enumerate() {
                let hit = (0..expected.len())
                    .find(|&e| !used[e] && mismatched_positions(term, expected[e], &labels) == Some(vec![]));
                match hit {
                    Some(e) => used[e] = true,
                    None => unmatched.push(k),
                }
            }
            for k in unmatched {
                let term = &printed[k];
                let nearest = (0..expected.len())
                    .filter(|&e| !used[e])
                    .filter_map(|e| mismatched_positions(term, expected[e], &labels).map(|d| (e, d)))
                    .min_by_key(|(_, d)| d.len());
                let kind = match nearest {
                    Some((e, positions)) => {
                        used[e] = true;
                        DiscrepancyKind::Substituted {
                            printed_term: k + 1,
                            printed: term.to_string(),
                            expected: render_path(expected[e], &labels),
                            positions: positions.into_iter().map(|p| p + 1).collect(),
                        }
                    }
                    None => DiscrepancyKind::Extra { printed_term: k + 1, printed: term.to_string() },
                };
                out.push(TermDiscrepancy { input, output, kind });
            }
            for (e, path) in expected.iter().enumerate() {
                if !used[e] {
                    out.push(TermDiscrepancy {
                        input,
                        output,
                        kind: DiscrepancyKind::Missing { expected: render_path(path, &labels) },
                    });
                }
            }
        }
    }
    Ok(out)
}

fn path_as_printed(path: &PathTerm, labels: &[Fraction; 3]) -> PrintedTerm {
    PrintedTerm {
        divisor: path.leaf.len() as u8,
        factors: path
            .factors
            .iter()
            .map(|f| {
                let multiple = f.residual_multiple.round() as u8;
                PrintedFactor {
                    outcome: f.outcome,
                    multiple,
                    fraction: (multiple > 0).then_some(labels[f.stage]),
                }
            })
            .collect(),
    }
}

fn render_path(path: &PathTerm, labels: &[Fraction; 3]) -> String {
    path_as_printed(path, labels).to_string()
}

/// Stage positions where `term` and `path` disagree, or `None` when they
/// cannot correspond (different weight or number of stages).
fn mismatched_positions(term: &PrintedTerm, path: &PathTerm, labels: &[Fraction; 3]) -> Option<Vec<usize>> {
    let canonical = path_as_printed(path, labels);
    if canonical.divisor != term.divisor || canonical.factors.len() != term.factors.len() {
        return None;
    }
    Some(
        term.factors
            .iter()
            .zip(&canonical.factors)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(k, _)| k)
            .collect(),
    )
}
