use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of feedforward stages.
pub const STAGES: usize = 3;

pub const DEFAULT_ETA: f64 = 1.0;
pub const DEFAULT_GAMMA: f64 = 1e-8;
pub const DEFAULT_R1: f64 = 2.0 / 3.0;
pub const DEFAULT_R2: f64 = 0.5;

/// Physical parameters of the receiver and the PSK signal set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverConfig {
    /// Symbol count, 3 or 4.
    pub m: usize,
    /// Mean photon number |α|² of the received state (α real, ≥ 0).
    pub alpha_sq: f64,
    /// Detection efficiency η.
    pub eta: f64,
    /// Dark-count exponent γ of the off-probability exp(−γ − η|β|²).
    pub gamma: f64,
    /// Reflectance of the first beam splitter.
    pub r1: f64,
    /// Reflectance of the second beam splitter.
    pub r2: f64,
}

impl ReceiverConfig {
    /// A configuration with the default detector and splitters.
    pub fn new(m: usize, alpha_sq: f64) -> Self {
        Self {
            m,
            alpha_sq,
            eta: DEFAULT_ETA,
            gamma: DEFAULT_GAMMA,
            r1: DEFAULT_R1,
            r2: DEFAULT_R2,
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_splitters(mut self, r1: f64, r2: f64) -> Self {
        self.r1 = r1;
        self.r2 = r2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m != 3 && self.m != 4 {
            return Err(Error::UnsupportedSymbolCount(self.m));
        }
        if !(self.alpha_sq >= 0.0 && self.alpha_sq.is_finite()) {
            return Err(Error::domain(format!("alpha_sq must be finite and >= 0, got {}", self.alpha_sq)));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::domain(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::domain(format!("gamma must be finite and >= 0, got {}", self.gamma)));
        }
        for (name, r) in [("r1", self.r1), ("r2", self.r2)] {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0, 1), got {r}")));
            }
        }
        Ok(())
    }

    /// Fractions of the signal energy reaching stages 1, 2 and 3:
    /// `1 − r1`, `r1·r2` and `r1·(1 − r2)`.
    pub fn stage_fractions(&self) -> [f64; STAGES] {
        let f2 = self.r1 * self.r2;
        let f1 = 1.0 - self.r1;
        // f3 is taken as the remainder so the three fractions sum to one exactly.
        [f1, f2, 1.0 - f1 - f2]
    }
}
