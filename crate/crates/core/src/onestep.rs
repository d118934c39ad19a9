//! One-step integrators: RK4, splitting compositions, Krogstad exponential RK4, Lawson RK4.

use crate::error::{Error, Result};
use crate::problem::{b_flow_rk4, SemilinearProblem, StateVector};

/// A composition `E_B(b_s h) ∘ E_A(a_s h) ∘ … ∘ E_B(b_1 h) ∘ E_A(a_1 h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionScheme {
    pub name: &'static str,
    /// `(a_j, b_j)`, applied in order `j = 1..s`.
    pub coefficients: Vec<(f64, f64)>,
}

impl CompositionScheme {
    pub fn new(name: &'static str, coefficients: Vec<(f64, f64)>) -> Result<Self> {
        let sa: f64 = coefficients.iter().map(|c| c.0).sum();
        let sb: f64 = coefficients.iter().map(|c| c.1).sum();
        if (sa - 1.0).abs() > 1e-12 || (sb - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "composition '{name}' is inconsistent: sum a = {sa}, sum b = {sb}"
            )));
        }
        Ok(Self { name, coefficients })
    }

    /// Symmetric composition of Strang steps with the given relative step weights.
    fn from_strang_weights(name: &'static str, weights: &[f64]) -> Self {
        let mut coefficients = Vec::with_capacity(weights.len() + 1);
        let mut carry = 0.0;
        for &w in weights {
            coefficients.push((carry + 0.5 * w, w));
            carry = 0.5 * w;
        }
        coefficients.push((carry, 0.0));
        Self::new(name, coefficients).expect("weights sum to one")
    }

    /// Second-order Strang splitting `A(h/2) B(h) A(h/2)`.
    pub fn strang() -> Self {
        Self::from_strang_weights("strang", &[1.0])
    }

    /// Fourth-order Suzuki composition of five Strang steps.
    pub fn suzuki4() -> Self {
        let w = 1.0 / (4.0 - 4f64.powf(1.0 / 3.0));
        Self::from_strang_weights("suzuki4", &[w, w, 1.0 - 4.0 * w, w, w])
    }

    /// Fourth-order Yoshida triple jump.
    pub fn yoshida4() -> Self {
        let g = 1.0 / (2.0 - 2f64.powf(1.0 / 3.0));
        Self::from_strang_weights("yoshida4", &[g, 1.0 - 2.0 * g, g])
    }

    /// Number of B sub-flows per step.
    pub fn b_stages(&self) -> usize {
        self.coefficients.iter().filter(|c| c.1 != 0.0).count()
    }
}

fn finite<S: StateVector>(u: S, t: f64) -> Result<S> {
    if u.is_finite() {
        Ok(u)
    } else {
        Err(Error::BlowUp { t })
    }
}

/// Full right-hand side `𝒜u + 𝒝(t, u)` with 𝒜 applied by spectral multiplication.
fn full_rhs<P: SemilinearProblem>(problem: &P, t: f64, u: &P::State) -> Result<P::State> {
    let mut f = problem.eval_b(t, u)?;
    f.axpy(1.0, &problem.linear_apply(u));
    Ok(f)
}

/// Classical explicit RK4 on the full (stiff) right-hand side.
pub fn rk4_step<P: SemilinearProblem>(problem: &P, t: f64, h: f64, u: &P::State) -> Result<P::State> {
    let k1 = full_rhs(problem, t, u)?;
    let mut y = u.clone();
    y.axpy(0.5 * h, &k1);
    let k2 = full_rhs(problem, t + 0.5 * h, &y)?;
    let mut y = u.clone();
    y.axpy(0.5 * h, &k2);
    let k3 = full_rhs(problem, t + 0.5 * h, &y)?;
    let mut y = u.clone();
    y.axpy(h, &k3);
    let k4 = full_rhs(problem, t + h, &y)?;
    let mut out = u.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    finite(out, t + h)
}

/// One step of a splitting method. Physical time advances with the A-stages.
pub fn splitting_step<P: SemilinearProblem>(
    problem: &P,
    scheme: &CompositionScheme,
    t: f64,
    h: f64,
    u: &P::State,
) -> Result<P::State> {
    let mut state = u.clone();
    let mut time = t;
    for &(a, b) in &scheme.coefficients {
        if a != 0.0 {
            state = problem.apply_exp_a(a * h, &state);
            time += a * h;
        }
        if b != 0.0 {
            state = b_flow_rk4(problem, time, b * h, &state)?;
        }
    }
    Ok(state)
}

/// Krogstad's fourth-order exponential Runge–Kutta method.
pub fn krogstad_step<P: SemilinearProblem>(problem: &P, t: f64, h: f64, u: &P::State) -> Result<P::State> {
    let half = 0.5 * h;
    let phi = |k: usize, step: f64, v: &P::State| problem.phi_apply_a(k, step, v);

    let e_half = problem.apply_exp_a(half, u);
    let e_full = problem.apply_exp_a(h, u);

    let b1 = problem.eval_b(t, u)?;
    let mut u2 = e_half.clone();
    u2.axpy(half, &phi(1, half, &b1));

    let b2 = problem.eval_b(t + half, &u2)?;
    // U₃ = e^{hA/2}u + h[(½φ₁ − φ₂)(hA/2) B₁ + φ₂(hA/2) B₂]
    let mut u3 = e_half;
    u3.axpy(half, &phi(1, half, &b1));
    let mut d21 = b2.clone();
    d21.axpy(-1.0, &b1);
    u3.axpy(h, &phi(2, half, &d21));

    let b3 = problem.eval_b(t + half, &u3)?;
    // U₄ = e^{hA}u + h[(φ₁ − 2φ₂)(hA) B₁ + 2φ₂(hA) B₃]
    let mut u4 = e_full.clone();
    u4.axpy(h, &phi(1, h, &b1));
    let mut d31 = b3.clone();
    d31.axpy(-1.0, &b1);
    u4.axpy(2.0 * h, &phi(2, h, &d31));

    let b4 = problem.eval_b(t + h, &u4)?;
    // u⁺ = e^{hA}u + h[φ₁B₁ + φ₂(−3B₁ + 2B₂ + 2B₃ − B₄) + φ₃(4B₁ − 4B₂ − 4B₃ + 4B₄)]
    let mut c2 = b1.clone();
    c2.scale((-3.0).into());
    c2.axpy(2.0, &b2);
    c2.axpy(2.0, &b3);
    c2.axpy(-1.0, &b4);
    let mut c3 = b1.clone();
    c3.axpy(-1.0, &b2);
    c3.axpy(-1.0, &b3);
    c3.axpy(1.0, &b4);

    let mut out = e_full;
    out.axpy(h, &phi(1, h, &b1));
    out.axpy(h, &phi(2, h, &c2));
    out.axpy(4.0 * h, &phi(3, h, &c3));
    finite(out, t + h)
}

/// Classical RK4 applied to the Lawson-transformed equation with base point `t`.
pub fn lawson_rk4_step<P: SemilinearProblem>(problem: &P, t: f64, h: f64, u: &P::State) -> Result<P::State> {
    let half = 0.5 * h;
    let k1 = problem.eval_b(t, u)?;

    let mut y = u.clone();
    y.axpy(half, &k1);
    let u2 = problem.apply_exp_a(half, &y);
    let k2 = problem.eval_b(t + half, &u2)?;

    let mut u3 = problem.apply_exp_a(half, u);
    u3.axpy(half, &k2);
    let k3 = problem.eval_b(t + half, &u3)?;

    let mut u4 = problem.apply_exp_a(h, u);
    u4.axpy(h, &problem.apply_exp_a(half, &k3));
    let k4 = problem.eval_b(t + h, &u4)?;

    // u⁺ = e^{hA}(u + h/6 k₁) + e^{hA/2}(h/3 (k₂ + k₃)) + h/6 k₄
    let mut full = u.clone();
    full.axpy(h / 6.0, &k1);
    let mut mid = k2;
    mid.axpy(1.0, &k3);
    let mut out = problem.apply_exp_a(h, &full);
    out.axpy(h / 3.0, &problem.apply_exp_a(half, &mid));
    out.axpy(h / 6.0, &k4);
    finite(out, t + h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scheme_consistency_and_stage_counts() {
        assert_eq!(CompositionScheme::strang().b_stages(), 1);
        assert_eq!(CompositionScheme::suzuki4().b_stages(), 5);
        assert_eq!(CompositionScheme::yoshida4().b_stages(), 3);
        let s = CompositionScheme::strang();
        assert_eq!(s.coefficients, vec![(0.5, 1.0), (0.5, 0.0)]);
        assert!(CompositionScheme::new("bad", vec![(0.5, 1.0)]).is_err());
    }

    #[test]
    fn yoshida_weights() {
        let y = CompositionScheme::yoshida4();
        let g = 1.0 / (2.0 - 2f64.powf(1.0 / 3.0));
        assert_relative_eq!(y.coefficients[0].0, g / 2.0);
        assert_relative_eq!(y.coefficients[1].1, 1.0 - 2.0 * g);
        // third-order condition of symmetric compositions of order-2 steps: Σ wᵢ³ = 0
        let cube: f64 = y.coefficients.iter().map(|c| c.1.powi(3)).sum();
        assert!(cube.abs() < 1e-14);
        let s = CompositionScheme::suzuki4();
        let cube: f64 = s.coefficients.iter().map(|c| c.1.powi(3)).sum();
        assert!(cube.abs() < 1e-14);
    }
}
