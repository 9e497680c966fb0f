use serde::Serialize;

use super::{OptimizationReport, PriorDistribution};
use crate::error::{Error, Result};
use crate::receiver::ChannelMatrix;

/// Gram matrix of the square-rooted channel rows,
/// `b[i][k] = Σ_j sqrt(P(j|i)·P(j|k))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BhattacharyyaMatrix {
    b: Vec<Vec<f64>>,
}

impl BhattacharyyaMatrix {
    pub fn symbols(&self) -> usize {
        self.b.len()
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.b[i][k]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.b
    }

    /// `pᵀ b p`.
    pub fn quadratic_form(&self, p: &[f64]) -> f64 {
        self.b
            .iter()
            .zip(p)
            .map(|(row, &pi)| pi * row.iter().zip(p).map(|(b, pk)| b * pk).sum::<f64>())
            .sum()
    }

    fn apply(&self, p: &[f64]) -> Vec<f64> {
        self.b.iter().map(|row| row.iter().zip(p).map(|(b, pk)| b * pk).sum()).collect()
    }
}

pub fn bhattacharyya_matrix(channel: &ChannelMatrix) -> BhattacharyyaMatrix {
    let m = channel.symbols();
    let roots: Vec<Vec<f64>> = channel.rows().iter().map(|r| r.iter().map(|x| x.sqrt()).collect()).collect();
    let mut b = vec![vec![0.0; m]; m];
    for i in 0..m {
        for k in i..m {
            let v: f64 = roots[i].iter().zip(&roots[k]).map(|(a, c)| a * c).sum();
            b[i][k] = v;
            b[k][i] = v;
        }
    }
    BhattacharyyaMatrix { b }
}

// pᵀbp ≤ 1 always; values this close to 1 are rounding residue of a zero rate
const UNIT_FORM_SLACK: f64 = 1e-14;

fn rate_from_form(q: f64) -> f64 {
    if q >= 1.0 - UNIT_FORM_SLACK {
        0.0
    } else {
        -q.ln()
    }
}

/// Cutoff rate `−ln(pᵀ b p)` in nats at a given prior.
pub fn cutoff_rate_at(prior: &PriorDistribution, b: &BhattacharyyaMatrix) -> Result<f64> {
    if prior.len() != b.symbols() {
        return Err(Error::DimensionMismatch { expected: b.symbols(), found: prior.len() });
    }
    let q = b.quadratic_form(prior.as_slice());
    if !(q > 0.0) {
        return Err(Error::Numerical(format!("quadratic form {q} is not positive")));
    }
    Ok(rate_from_form(q))
}

/// Largest violation of the simplex KKT conditions for minimizing `pᵀbp`:
/// `(bp)_i` must equal `pᵀbp` on the support and be no smaller off it.
pub fn cutoff_kkt_residual(b: &BhattacharyyaMatrix, prior: &PriorDistribution) -> f64 {
    let p = prior.as_slice();
    let bp = b.apply(p);
    let lambda = b.quadratic_form(p);
    bp.iter()
        .zip(p)
        .map(|(&g, &pi)| if pi > 0.0 { (g - lambda).abs() } else { (lambda - g).max(0.0) })
        .fold(0.0, f64::max)
}

const PIVOT_TOL: f64 = 1e-13;
const FEASIBILITY_TOL: f64 = 1e-14;
const KKT_TOL: f64 = 1e-10;

/// Solves `a x = 1` by Gaussian elimination with partial pivoting. `None`
/// when `a` is numerically singular.
fn solve_ones(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    let mut rhs = vec![1.0; n];
    let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() <= PIVOT_TOL * scale {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / a[r][r];
    }
    Some(x)
}

/// Nonempty subsets of `0..m` as sorted index lists, in lexicographic order.
fn supports(m: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1..1u32 << m)
        .map(|mask| (0..m).filter(|&i| mask >> i & 1 == 1).collect())
        .collect();
    all.sort();
    all
}

/// Exact minimizer of `pᵀ b p` over the probability simplex by support
/// enumeration; the reported value is the cutoff rate `−ln(min)` in nats.
///
/// Each support `S` contributes the candidate `p_S ∝ b_S⁻¹·1` if it is
/// nonnegative and satisfies the KKT conditions. Ties keep the first
/// candidate in lexicographic support order. When the minimum is 1 the
/// objective is constant on the simplex and the uniform prior is reported.
pub fn minimize_cutoff_objective(b: &BhattacharyyaMatrix) -> Result<OptimizationReport> {
    let m = b.symbols();
    if m == 0 {
        return Err(Error::domain("empty Bhattacharyya matrix"));
    }
    let all = supports(m);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for support in &all {
        let sub = support.iter().map(|&i| support.iter().map(|&k| b.get(i, k)).collect()).collect();
        let Some(x) = solve_ones(sub) else { continue };
        let total: f64 = x.iter().sum();
        if !(total > 0.0) || x.iter().any(|&xi| xi / total < -FEASIBILITY_TOL) {
            continue;
        }
        let mut p = vec![0.0; m];
        for (&i, &xi) in support.iter().zip(&x) {
            p[i] = (xi / total).max(0.0);
        }
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|pi| *pi /= s);
        let candidate = PriorDistribution { p };
        if cutoff_kkt_residual(b, &candidate) > KKT_TOL {
            continue;
        }
        let q = b.quadratic_form(candidate.as_slice());
        if best.as_ref().is_none_or(|(bq, _)| q < *bq) {
            best = Some((q, candidate.into_vec()));
        }
    }
    let (q, p) = match best {
        Some(found) => found,
        None => {
            // no support validated: fall back to the best vertex
            let k = (0..m).min_by(|&i, &k| b.get(i, i).total_cmp(&b.get(k, k))).unwrap();
            (b.get(k, k), PriorDistribution::vertex(m, k).into_vec())
        }
    };
    let (q, p) = if q >= 1.0 - UNIT_FORM_SLACK {
        (1.0, PriorDistribution::uniform(m).into_vec())
    } else {
        (q, p)
    };
    Ok(OptimizationReport {
        optimal_prior: PriorDistribution::new(p)?,
        value: rate_from_form(q),
        iterations: all.len() as u64,
        optimality_gap: 0.0,
    })
}
