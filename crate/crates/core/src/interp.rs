//! Polynomial interpolation weights for Adams-type methods.

use crate::error::{Error, Result};

/// Monomial coefficients of the Lagrange basis: `ℓᵢ(s) = Σⱼ c[i][j] sʲ`.
pub fn lagrange_monomials(nodes: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = nodes.len();
    for i in 0..n {
        for j in i + 1..n {
            if nodes[i] == nodes[j] {
                return Err(Error::DuplicateNodes);
            }
        }
    }
    let mut basis = Vec::with_capacity(n);
    for i in 0..n {
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for (m, &sm) in nodes.iter().enumerate() {
            if m == i {
                continue;
            }
            // poly *= (s - sm)
            let mut next = vec![0.0; poly.len() + 1];
            for (d, &c) in poly.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= sm * c;
            }
            poly = next;
            denom *= nodes[i] - sm;
        }
        basis.push(poly.into_iter().map(|c| c / denom).collect());
    }
    Ok(basis)
}

/// Weights of an Adams quadrature over `[t_n, t_next]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamsWeights {
    /// One weight per history node, oldest first.
    pub past: Vec<f64>,
    /// Weight of the forward node `t_next`, if included.
    pub forward: Option<f64>,
}

/// Weights `w` with `∫_{t_n}^{t_next} p = (t_next - t_n) Σ wᵢ f(tᵢ)`, where `p` interpolates
/// `f` at `times` (oldest first, `t_n` last) and optionally at `t_next`.
pub fn adams_weights(times: &[f64], t_next: f64, include_forward: bool) -> Result<AdamsWeights> {
    let &t_n = times
        .last()
        .ok_or(Error::InsufficientHistory { needed: 1, have: 0 })?;
    if times.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateNodes);
    }
    if times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("history times must be increasing".into()));
    }
    if !(t_next > t_n) {
        return Err(Error::InvalidArgument(format!("t_next = {t_next} must exceed last node {t_n}")));
    }
    let span = t_next - t_n;
    let mut nodes: Vec<f64> = times.iter().map(|t| (t - t_n) / span).collect();
    if include_forward {
        nodes.push(1.0);
    }
    let basis = lagrange_monomials(&nodes)?;
    let mut w: Vec<f64> = basis
        .iter()
        .map(|c| c.iter().enumerate().map(|(j, cj)| cj / (j + 1) as f64).sum())
        .collect();
    let forward = if include_forward { w.pop() } else { None };
    Ok(AdamsWeights { past: w, forward })
}

/// Operator-weight coefficients of exponential Adams methods.
///
/// For nodes `sᵢ` (in units of the step) the interpolant integrated against
/// `e^{(h-τ)A}` gives `Ωᵢ(hA) = Σⱼ coef[i][j] φⱼ₊₁(hA)` with `coef[i][j] = j! c[i][j]`.
pub fn exponential_adams_coefficients(nodes: &[f64]) -> Result<Vec<Vec<f64>>> {
    let basis = lagrange_monomials(nodes)?;
    Ok(basis
        .into_iter()
        .map(|c| {
            let mut fact = 1.0;
            c.into_iter()
                .enumerate()
                .map(|(j, cj)| {
                    if j > 0 {
                        fact *= j as f64;
                    }
                    cj * fact
                })
                .collect()
        })
        .collect())
}

/// `∫₀¹ Π_{m=0}^{p-1} (s + m + shift) ds / p!`
fn adams_constant(p: usize, shift: f64) -> f64 {
    let mut poly = vec![1.0];
    for m in 0..p {
        let root = m as f64 + shift;
        let mut next = vec![0.0; poly.len() + 1];
        for (d, &c) in poly.iter().enumerate() {
            next[d + 1] += c;
            next[d] += root * c;
        }
        poly = next;
    }
    let integral: f64 = poly.iter().enumerate().map(|(d, c)| c / (d + 1) as f64).sum();
    integral * crate::phi::inv_factorial(p)
}

/// Local error constant of the order-`p` Adams–Bashforth method (1/2, 5/12, 3/8, …).
pub fn ab_error_constant(p: usize) -> f64 {
    adams_constant(p, 0.0)
}

/// Local error constant of the order-`p` Adams–Moulton method (−1/2, −1/12, −1/24, …).
pub fn am_error_constant(p: usize) -> f64 {
    adams_constant(p, -1.0)
}

/// Milne factor `|C_AM|/(|C_AB| + |C_AM|)` for the order-`k` Adams pair.
pub fn milne_factor(k: usize) -> f64 {
    let cab = ab_error_constant(k).abs();
    let cam = am_error_constant(k).abs();
    cam / (cab + cam)
}
