//! Parameter sweeps over the mean photon number and their CSV/JSON
//! serialization.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize, Serializer};

use crate::baselines::{heterodyne_channel_matrix, helstrom_error_psk, HeterodyneSpec};
use crate::error::{Error, Result};
use crate::info::{
    average_error_rate, bhattacharyya_matrix, cutoff_rate_at, maximize_mutual_information,
    minimize_cutoff_objective, mutual_information, required_code_length, PriorDistribution,
    DEFAULT_MI_TOLERANCE,
};
use crate::receiver::{
    build_decision_tree, exact_channel_matrix, ChannelMatrix, ReceiverConfig, DEFAULT_ETA, DEFAULT_GAMMA,
    DEFAULT_R1, DEFAULT_R2,
};

pub const CSV_HEADER: &str = "alpha_sq,scheme,mi_bits,error_rate,cutoff_nats,code_length,p0,p1,p2,p3";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Mi,
    Cutoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    DisplacementOptimized,
    DisplacementEqual,
    Heterodyne,
    Helstrom,
}

impl Scheme {
    pub const ALL: [Scheme; 4] =
        [Scheme::DisplacementOptimized, Scheme::DisplacementEqual, Scheme::Heterodyne, Scheme::Helstrom];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::DisplacementOptimized => "displacement_optimized",
            Scheme::DisplacementEqual => "displacement_equal",
            Scheme::Heterodyne => "heterodyne",
            Scheme::Helstrom => "helstrom",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.label() == s)
            .ok_or_else(|| Error::domain(format!("unknown scheme '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub m: usize,
    pub alpha_sq_min: f64,
    pub alpha_sq_max: f64,
    pub steps: usize,
    pub eta: f64,
    pub gamma: f64,
    pub r1: f64,
    pub r2: f64,
    pub objective: Objective,
    pub schemes: Vec<Scheme>,
    pub target_error: f64,
    pub seed: u64,
    pub grid: Grid,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            m: 4,
            alpha_sq_min: 0.0,
            alpha_sq_max: 5.0,
            steps: 101,
            eta: DEFAULT_ETA,
            gamma: DEFAULT_GAMMA,
            r1: DEFAULT_R1,
            r2: DEFAULT_R2,
            objective: Objective::Mi,
            schemes: Scheme::ALL.to_vec(),
            target_error: 1e-9,
            seed: 0,
            grid: Grid::Linear,
        }
    }
}

impl SweepConfig {
    pub fn receiver(&self, alpha_sq: f64) -> ReceiverConfig {
        ReceiverConfig { m: self.m, alpha_sq, eta: self.eta, gamma: self.gamma, r1: self.r1, r2: self.r2 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_sq_min >= 0.0 && self.alpha_sq_min <= self.alpha_sq_max && self.alpha_sq_max.is_finite()) {
            return Err(Error::domain(format!(
                "need 0 <= alpha_sq_min <= alpha_sq_max, got [{}, {}]",
                self.alpha_sq_min, self.alpha_sq_max
            )));
        }
        if self.steps == 0 {
            return Err(Error::domain("steps must be at least 1"));
        }
        if self.grid == Grid::Log && self.alpha_sq_min <= 0.0 {
            return Err(Error::domain("a log grid needs alpha_sq_min > 0"));
        }
        if !(self.target_error > 0.0 && self.target_error < 1.0) {
            return Err(Error::domain(format!("target_error must lie in (0, 1), got {}", self.target_error)));
        }
        if self.schemes.is_empty() {
            return Err(Error::domain("at least one scheme is required"));
        }
        self.receiver(self.alpha_sq_max).validate()
    }

    pub fn grid_points(&self) -> Vec<f64> {
        let (lo, hi, n) = (self.alpha_sq_min, self.alpha_sq_max, self.steps);
        if n == 1 {
            return vec![lo];
        }
        (0..n)
            .map(|k| {
                if k == n - 1 {
                    return hi;
                }
                let t = k as f64 / (n - 1) as f64;
                match self.grid {
                    Grid::Linear => lo + (hi - lo) * t,
                    Grid::Log => lo * (hi / lo).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeLength {
    Finite(u64),
    /// No finite code reaches the target (zero cutoff rate).
    Unachievable,
}

impl Serialize for CodeLength {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CodeLength::Finite(n) => s.serialize_u64(*n),
            CodeLength::Unachievable => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha_sq: f64,
    pub scheme: Scheme,
    pub mi_bits: Option<f64>,
    pub error_rate: Option<f64>,
    pub cutoff_nats: Option<f64>,
    pub code_length: Option<CodeLength>,
    /// Input prior, for displacement schemes only.
    pub prior: Option<Vec<f64>>,
}

fn code_length(rc: f64, target: f64) -> Result<CodeLength> {
    match required_code_length(rc, target) {
        Ok(n) => Ok(CodeLength::Finite(n)),
        Err(Error::Unachievable(_)) => Ok(CodeLength::Unachievable),
        Err(e) => Err(e),
    }
}

fn channel_row(
    alpha_sq: f64,
    scheme: Scheme,
    channel: &ChannelMatrix,
    prior: &PriorDistribution,
    target: f64,
    keep_prior: bool,
) -> Result<SweepRow> {
    let rc = cutoff_rate_at(prior, &bhattacharyya_matrix(channel))?;
    Ok(SweepRow {
        alpha_sq,
        scheme,
        mi_bits: Some(mutual_information(channel, prior)?),
        error_rate: Some(average_error_rate(channel, prior)?),
        cutoff_nats: Some(rc),
        code_length: Some(code_length(rc, target)?),
        prior: keep_prior.then(|| prior.as_slice().to_vec()),
    })
}

/// Rows for one grid point, in the configured scheme order.
pub fn sweep_point(config: &SweepConfig, alpha_sq: f64) -> Result<Vec<SweepRow>> {
    let m = config.m;
    let target = config.target_error;
    let displacement = if config
        .schemes
        .iter()
        .any(|s| matches!(s, Scheme::DisplacementOptimized | Scheme::DisplacementEqual))
    {
        let receiver = config.receiver(alpha_sq);
        Some(exact_channel_matrix(&receiver, &build_decision_tree(m)?)?)
    } else {
        None
    };
    config
        .schemes
        .iter()
        .map(|&scheme| match scheme {
            Scheme::DisplacementOptimized => {
                let channel = displacement.as_ref().expect("displacement matrix computed");
                let prior = match config.objective {
                    Objective::Mi => maximize_mutual_information(channel, DEFAULT_MI_TOLERANCE)?.optimal_prior,
                    Objective::Cutoff => minimize_cutoff_objective(&bhattacharyya_matrix(channel))?.optimal_prior,
                };
                channel_row(alpha_sq, scheme, channel, &prior, target, true)
            }
            Scheme::DisplacementEqual => {
                let channel = displacement.as_ref().expect("displacement matrix computed");
                channel_row(alpha_sq, scheme, channel, &PriorDistribution::uniform(m), target, true)
            }
            Scheme::Heterodyne => {
                let channel = heterodyne_channel_matrix(&HeterodyneSpec::new(m, alpha_sq))?;
                channel_row(alpha_sq, scheme, &channel, &PriorDistribution::uniform(m), target, false)
            }
            Scheme::Helstrom => Ok(SweepRow {
                alpha_sq,
                scheme,
                mi_bits: None,
                error_rate: Some(helstrom_error_psk(m, alpha_sq)?),
                cutoff_nats: None,
                code_length: None,
                prior: None,
            }),
        })
        .collect()
}

/// Evaluates every grid point (in parallel when enabled); rows come back
/// grid-major, then in scheme order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let points = config.grid_points();
    #[cfg(feature = "parallel")]
    let per_point: Vec<Vec<SweepRow>> = {
        use rayon::prelude::*;
        points.par_iter().map(|&a| sweep_point(config, a)).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let per_point: Vec<Vec<SweepRow>> = points.iter().map(|&a| sweep_point(config, a)).collect::<Result<_>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// Fixed 17-significant-digit rendering used in CSV output.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with LF line endings; missing metrics are empty cells.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(128 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
    for r in rows {
        let code = match r.code_length {
            Some(CodeLength::Finite(n)) => n.to_string(),
            Some(CodeLength::Unachievable) => "inf".to_string(),
            None => String::new(),
        };
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            format_float(r.alpha_sq),
            r.scheme.label(),
            opt(r.mi_bits),
            opt(r.error_rate),
            opt(r.cutoff_nats),
            code
        );
        for k in 0..4 {
            out.push(',');
            if let Some(p) = r.prior.as_ref().and_then(|p| p.get(k)) {
                out.push_str(&format_float(*p));
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    config: &'a SweepConfig,
    rows: &'a [SweepRow],
}

pub fn to_json(config: &SweepConfig, rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(&SweepDocument { config, rows }).expect("sweep rows serialize")
}
