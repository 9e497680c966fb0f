//! Browser bindings for the demo page in `www/`. Every exported function
//! returns a JSON string so the page needs no generated type glue.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use ffrx::info::{
    average_error_rate, bhattacharyya_matrix, cutoff_rate_at, maximize_mutual_information, minimize_cutoff_objective,
    mutual_information, DEFAULT_MI_TOLERANCE,
};
use ffrx::receiver::{build_decision_tree, exact_channel_matrix};
use ffrx::sweep::{run_sweep, Objective, Scheme, SweepConfig, SweepRow};
use ffrx::{ChannelMatrix, PriorDistribution, ReceiverConfig};

/// Largest sweep the page may request; keeps a slider drag responsive.
pub const MAX_STEPS: usize = 401;

#[derive(Serialize)]
struct MatrixView<'a> {
    matrix: &'a ChannelMatrix,
    uniform_mi_bits: f64,
    uniform_error_rate: f64,
}

#[derive(Serialize)]
struct PriorView {
    prior: Vec<f64>,
    mi_bits: f64,
    error_rate: f64,
    cutoff_nats: f64,
}

fn receiver(m: usize, alpha_sq: f64, eta: f64, gamma: f64, r1: f64, r2: f64) -> ffrx::Result<(ReceiverConfig, ChannelMatrix)> {
    let config = ReceiverConfig::new(m, alpha_sq).with_eta(eta).with_gamma(gamma).with_splitters(r1, r2);
    config.validate()?;
    let p = exact_channel_matrix(&config, &build_decision_tree(m)?)?;
    Ok((config, p))
}

fn parse_objective(objective: &str) -> ffrx::Result<Objective> {
    match objective {
        "mi" => Ok(Objective::Mi),
        "cutoff" => Ok(Objective::Cutoff),
        other => Err(ffrx::Error::Domain(format!("unknown objective '{other}'"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> ffrx::Result<String> {
    serde_json::to_string(value).map_err(|e| ffrx::Error::Numerical(e.to_string()))
}

pub fn channel_matrix_json(m: usize, alpha_sq: f64, eta: f64, gamma: f64, r1: f64, r2: f64) -> ffrx::Result<String> {
    let (_, p) = receiver(m, alpha_sq, eta, gamma, r1, r2)?;
    let uniform = PriorDistribution::uniform(m);
    to_json(&MatrixView {
        matrix: &p,
        uniform_mi_bits: mutual_information(&p, &uniform)?,
        uniform_error_rate: average_error_rate(&p, &uniform)?,
    })
}

pub fn optimal_prior_json(
    m: usize,
    alpha_sq: f64,
    eta: f64,
    gamma: f64,
    r1: f64,
    r2: f64,
    objective: &str,
) -> ffrx::Result<String> {
    let (_, p) = receiver(m, alpha_sq, eta, gamma, r1, r2)?;
    let b = bhattacharyya_matrix(&p);
    let prior = match parse_objective(objective)? {
        Objective::Mi => maximize_mutual_information(&p, DEFAULT_MI_TOLERANCE)?.optimal_prior,
        Objective::Cutoff => minimize_cutoff_objective(&b)?.optimal_prior,
    };
    to_json(&PriorView {
        mi_bits: mutual_information(&p, &prior)?,
        error_rate: average_error_rate(&p, &prior)?,
        cutoff_nats: cutoff_rate_at(&prior, &b)?,
        prior: prior.into_vec(),
    })
}

pub fn sweep_curves_json(m: usize, alpha_sq_max: f64, steps: usize, objective: &str) -> ffrx::Result<String> {
    if steps > MAX_STEPS {
        return Err(ffrx::Error::Domain(format!("at most {MAX_STEPS} steps, got {steps}")));
    }
    let config = SweepConfig {
        m,
        alpha_sq_max,
        steps,
        objective: parse_objective(objective)?,
        schemes: Scheme::ALL.to_vec(),
        ..SweepConfig::default()
    };
    let rows: Vec<SweepRow> = run_sweep(&config)?;
    to_json(&rows)
}

fn js(r: ffrx::Result<String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

/// Exact channel matrix plus equal-prior metrics.
#[wasm_bindgen]
pub fn channel_matrix(m: usize, alpha_sq: f64, eta: f64, gamma: f64, r1: f64, r2: f64) -> Result<String, JsError> {
    js(channel_matrix_json(m, alpha_sq, eta, gamma, r1, r2))
}

/// Prior maximizing `objective` (`"mi"` or `"cutoff"`) and its metrics.
#[wasm_bindgen]
pub fn optimal_prior(
    m: usize,
    alpha_sq: f64,
    eta: f64,
    gamma: f64,
    r1: f64,
    r2: f64,
    objective: &str,
) -> Result<String, JsError> {
    js(optimal_prior_json(m, alpha_sq, eta, gamma, r1, r2, objective))
}

/// Sweep rows for all schemes on `[0, alpha_sq_max]` at default receiver
/// parameters.
#[wasm_bindgen]
pub fn sweep_curves(m: usize, alpha_sq_max: f64, steps: usize, objective: &str) -> Result<String, JsError> {
    js(sweep_curves_json(m, alpha_sq_max, steps, objective))
}
