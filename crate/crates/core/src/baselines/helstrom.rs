use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

const EIGEN_TOL: f64 = 1e-9;

/// Eigenvalues of the circulant Gram matrix `G[m][n] = ⟨α_m|α_n⟩` of the
/// M-PSK states by direct DFT of its first row,
/// `λ_k = Σ_n G[0][n]·e^{−2πikn/M}`.
pub fn gram_eigenvalues(m: usize, alpha_sq: f64) -> Vec<Complex64> {
    let first_row: Vec<Complex64> = (0..m)
        .map(|n| {
            let u = Complex64::from_polar(1.0, TAU * n as f64 / m as f64);
            (alpha_sq * (u - 1.0)).exp()
        })
        .collect();
    (0..m)
        .map(|k| {
            first_row
                .iter()
                .enumerate()
                .map(|(n, g)| g * Complex64::from_polar(1.0, -TAU * (k * n) as f64 / m as f64))
                .sum()
        })
        .collect()
}

/// The same eigenvalues without cancellation: expanding `e^{α²u^n}` gives
/// `λ_k = M·Pr[N ≡ k (mod M)]` for `N ~ Poisson(α²)`.
fn gram_eigenvalues_series(m: usize, alpha_sq: f64) -> Vec<f64> {
    let mut residues = vec![0.0; m];
    if alpha_sq == 0.0 {
        residues[0] = 1.0;
    } else {
        let last = (alpha_sq + 40.0 * alpha_sq.sqrt() + 60.0).ceil() as usize;
        let ln_a = alpha_sq.ln();
        for n in 0..=last {
            let ln_pmf = -alpha_sq + n as f64 * ln_a - libm::lgamma(n as f64 + 1.0);
            residues[n % m] += ln_pmf.exp();
        }
    }
    residues.into_iter().map(|r| m as f64 * r).collect()
}

/// Minimum error probability for equiprobable M-PSK coherent states, from
/// the square-root measurement: `1 − (Σ_k √λ_k)² / M²`.
pub fn helstrom_error_psk(m: usize, alpha_sq: f64) -> Result<f64> {
    if !(2..=4).contains(&m) {
        return Err(Error::UnsupportedSymbolCount(m));
    }
    if !(alpha_sq >= 0.0 && alpha_sq.is_finite()) {
        return Err(Error::domain(format!("alpha_sq must be finite and >= 0, got {alpha_sq}")));
    }
    for (k, l) in gram_eigenvalues(m, alpha_sq).into_iter().enumerate() {
        if l.im.abs() > EIGEN_TOL || l.re < -EIGEN_TOL {
            return Err(Error::Numerical(format!("Gram eigenvalue {k} = {l} is not real nonnegative")));
        }
    }
    // square roots amplify rounding near zero eigenvalues, so use the series form
    let root_sum: f64 = gram_eigenvalues_series(m, alpha_sq).iter().map(|l| l.sqrt()).sum();
    let mf = m as f64;
    Ok((1.0 - root_sum * root_sum / (mf * mf)).clamp(0.0, 1.0 - 1.0 / mf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum() {
        for m in 2..=4 {
            let e = helstrom_error_psk(m, 0.0).unwrap();
            assert!((e - (1.0 - 1.0 / m as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn binary_closed_form() {
        for a in [0.05f64, 0.1, 0.5, 1.0, 2.0, 3.0] {
            let want = 0.5 * (1.0 - (1.0 - (-4.0 * a).exp()).sqrt());
            assert!((helstrom_error_psk(2, a).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_real_and_conserved() {
        for m in 2..=4 {
            for a in [0.0, 0.3, 1.0, 5.0] {
                let l = gram_eigenvalues(m, a);
                let total: Complex64 = l.iter().sum();
                assert!((total.re - m as f64).abs() < 1e-12);
                assert!(total.im.abs() < 1e-12);
                assert!(l.iter().all(|x| x.im.abs() < 1e-12 && x.re > -1e-12));
                let series = gram_eigenvalues_series(m, a);
                assert!((series.iter().sum::<f64>() - m as f64).abs() < 1e-12);
                for (x, y) in l.iter().zip(&series) {
                    assert!((x.re - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn strong_signal() {
        assert!(helstrom_error_psk(4, 20.0).unwrap() < 1e-6);
        assert!(helstrom_error_psk(3, 400.0).unwrap() < 1e-12);
    }

    #[test]
    fn unsupported() {
        assert!(helstrom_error_psk(5, 1.0).is_err());
        assert!(helstrom_error_psk(4, -1.0).is_err());
    }
}
