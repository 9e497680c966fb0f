use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use crate::error::{Error, Result};
use crate::receiver::ChannelMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeterodyneSpec {
    pub m: usize,
    pub alpha_sq: f64,
    pub quadrature_abs_tol: f64,
}

impl HeterodyneSpec {
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn new(m: usize, alpha_sq: f64) -> Self {
        Self { m, alpha_sq, quadrature_abs_tol: Self::DEFAULT_TOL }
    }
}

/// Angular density of the heterodyne outcome at angle `psi` from the signal
/// phase: the outcome density `exp(−|β − α|²)/π` integrated over the radius.
pub fn heterodyne_sector_density(alpha: f64, psi: f64) -> f64 {
    let c = alpha * psi.cos();
    let s = alpha * psi.sin();
    (-alpha * alpha).exp() / TAU + c * (-s * s).exp() * libm::erfc(-c) / (2.0 * PI.sqrt())
}

/// Ideal heterodyne detection followed by a nearest-phase decision: `P(j|i)`
/// is the outcome probability in the sector of width 2π/M around symbol `j`.
pub fn heterodyne_channel_matrix(spec: &HeterodyneSpec) -> Result<ChannelMatrix> {
    if spec.m < 2 {
        return Err(Error::UnsupportedSymbolCount(spec.m));
    }
    if !(spec.alpha_sq >= 0.0 && spec.alpha_sq.is_finite()) {
        return Err(Error::domain(format!("alpha_sq must be finite and >= 0, got {}", spec.alpha_sq)));
    }
    if !(spec.quadrature_abs_tol > 0.0) {
        return Err(Error::domain("quadrature tolerance must be > 0"));
    }
    let m = spec.m;
    let alpha = spec.alpha_sq.sqrt();
    let width = TAU / m as f64;
    let entry_tol = spec.quadrature_abs_tol / m as f64;
    let mut rows = vec![vec![0.0; m]; m];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, p) in row.iter_mut().enumerate() {
            // sector j seen from signal i, as an offset in [−π, π)
            let k = (j + m - i) % m;
            let centre = if 2 * k > m { (k as f64 - m as f64) * width } else { k as f64 * width };
            let q = integrate(
                |psi| heterodyne_sector_density(alpha, psi),
                centre - width / 2.0,
                centre + width / 2.0,
                entry_tol,
            )?;
            *p = q.value;
        }
    }
    ChannelMatrix::from_rows(rows, 10.0 * spec.quadrature_abs_tol)
}
