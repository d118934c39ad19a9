//! The φ-functions of exponential integrators.
//!
//! φ₀(z) = eᶻ and φₖ(z) = ∫₀¹ e^{(1−θ)z} θ^{k−1}/(k−1)! dθ for k ≥ 1. They satisfy
//! φₖ₊₁(z) = (φₖ(z) − 1/k!)/z and φₖ(0) = 1/k!.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this modulus the truncated Taylor series is used.
pub const SERIES_THRESHOLD: f64 = 1.0;
/// Number of Taylor terms used inside the series region.
pub const SERIES_TERMS: usize = 20;

/// 1/k! for k = 0, 1, 2, ...
pub fn inv_factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc / j as f64)
}

/// Evaluate φₖ(z).
///
/// Uses the Taylor series Σⱼ zʲ/(j+k)! for |z| < 1 and the recurrence
/// from e^z otherwise. Negative `k` is rejected.
pub fn phi_scalar(k: i64, z: Complex64) -> Result<Complex64> {
    if k < 0 {
        return Err(Error::InvalidArgument(format!("phi order must be >= 0, got {k}")));
    }
    let k = k as usize;
    Ok(phi_all(k, z)[k])
}

/// Evaluate φ₀(z), …, φ_{k_max}(z) in one pass.
pub fn phi_all(k_max: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(k_max + 1);
    if z.norm() < SERIES_THRESHOLD {
        for k in 0..=k_max {
            out.push(phi_series(k, z));
        }
        // φ₀ directly from exp keeps row 0 identical to the exponential multiplier.
        out[0] = z.exp();
    } else {
        let mut current = z.exp();
        out.push(current);
        for k in 0..k_max {
            current = (current - inv_factorial(k)) / z;
            out.push(current);
        }
    }
    out
}

fn phi_series(k: usize, z: Complex64) -> Complex64 {
    // Horner on Σⱼ zʲ/(j+k)!, j < SERIES_TERMS.
    let mut coeff = inv_factorial(k + SERIES_TERMS - 1);
    let mut acc = Complex64::new(coeff, 0.0);
    for j in (0..SERIES_TERMS - 1).rev() {
        coeff *= (j + k + 1) as f64;
        acc = acc * z + coeff;
    }
    acc
}
