use crate::error::{Error, Result};

/// Block decoding error bound `exp(−N·R_c)` for code length `N`.
pub fn decoding_error_bound(rc: f64, code_length: u64) -> f64 {
    (-(code_length as f64) * rc).exp()
}

// a quotient this close above an integer is treated as that integer
const CEIL_SLACK: f64 = 1e-12;

/// Least code length `N` with `exp(−N·R_c) ≤ target_error`, i.e.
/// `⌈ln(1/ε)/R_c⌉` (quotients within 1e-12 relative of an integer round to
/// it, absorbing rounding in `ln`).
pub fn required_code_length(rc: f64, target_error: f64) -> Result<u64> {
    if !(target_error > 0.0 && target_error < 1.0) {
        return Err(Error::domain(format!("target error must lie in (0, 1), got {target_error}")));
    }
    if !(rc > 0.0) || !rc.is_finite() {
        return Err(Error::Unachievable(rc));
    }
    let x = (1.0 / target_error).ln() / rc;
    let n = (x * (1.0 - CEIL_SLACK)).ceil().max(1.0);
    if n > (1u64 << 53) as f64 {
        return Err(Error::Unachievable(rc));
    }
    Ok(n as u64)
}
