use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Squared amplitude left after displacing PSK state `m` by hypothesis `h`:
/// `|α_m − α_h|² = 4·|α|²·sin²(π(m − h)/M)`.
pub fn residual_distance_sq(m: usize, h: usize, symbols: usize, alpha_sq: f64) -> Result<f64> {
    if symbols == 0 || m >= symbols || h >= symbols {
        return Err(Error::domain(format!(
            "symbol indices ({m}, {h}) out of range for M = {symbols}"
        )));
    }
    if !(alpha_sq >= 0.0) {
        return Err(Error::domain(format!("alpha_sq must be >= 0, got {alpha_sq}")));
    }
    if m == h {
        return Ok(0.0);
    }
    // reduce to the shorter way round so symmetric pairs give identical bits
    let k = (m + symbols - h) % symbols;
    let k = k.min(symbols - k);
    let s = (PI * k as f64 / symbols as f64).sin();
    Ok(4.0 * alpha_sq * s * s)
}

/// Probability that an on-off detector stays dark for a coherent input of
/// squared amplitude `d_sq`: `exp(−γ − η·d_sq)`.
pub fn off_probability(d_sq: f64, eta: f64, gamma: f64) -> Result<f64> {
    if !(d_sq >= 0.0) || !(0.0..=1.0).contains(&eta) || !(gamma >= 0.0) {
        return Err(Error::domain(format!(
            "off_probability(d_sq = {d_sq}, eta = {eta}, gamma = {gamma})"
        )));
    }
    Ok((-gamma - eta * d_sq).exp())
}
