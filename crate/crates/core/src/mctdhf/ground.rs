//! Ground states by imaginary-time propagation.

use num_complex::Complex64;

use super::model::HeliumModel;
use super::state::MctdhfState;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::problem::{SemilinearProblem, StateVector};

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateOptions {
    /// Initial imaginary time step.
    pub tau: f64,
    /// Stop once `|ΔE| / τ` falls below this value.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Number of times `τ` is halved after convergence. Each halving reduces
    /// the `O(τ)` bias of the Lawson–Euler fixed point.
    pub refinements: usize,
}

/// Energy increase tolerated as round-off; larger increases reject the step and halve `τ`.
pub const ENERGY_JITTER: f64 = 1e-12;

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self { tau: 0.05, tolerance: 1e-10, max_iterations: 200_000, refinements: 6 }
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub state: MctdhfState,
    pub energy: f64,
    pub iterations: usize,
    /// Energy after every accepted iteration.
    pub energy_trace: Vec<f64>,
    /// Steps rejected for raising the energy.
    pub rejected: usize,
    /// Final imaginary time step.
    pub tau: f64,
}

/// One Lawson–Euler step of `∂_τ u = -i(𝒜u + 𝒝(u))` followed by
/// re-orthonormalization, antisymmetrization and renormalization.
///
/// The field term is evaluated at `t = 0`, where `E(0) = 0`.
pub fn imaginary_time_step(model: &HeliumModel, tau: f64, state: &MctdhfState) -> Result<MctdhfState> {
    let b = model.eval_b(0.0, state)?;
    let mut next = state.clone();
    let mut drift = b;
    drift.scale(Complex64::new(0.0, -1.0));
    next.axpy(tau, &drift);
    // e^{-iτ𝒜} on the orbitals: the multiplier e^{-τk²/2}
    let decay: Vec<Complex64> =
        model.grid().wavenumbers().iter().map(|k| Complex64::new((-0.5 * tau * k * k).exp(), 0.0)).collect();
    for o in &mut next.orbitals {
        let values = model.grid().apply_multiplier(&decay, o.values())?;
        *o = GridFunction::new(model.grid().clone(), values)?;
    }
    if !next.is_finite() {
        return Err(Error::BlowUp { t: tau });
    }
    next.orthonormalize()?;
    // the symmetric sector lies lower and would grow from round-off
    next.antisymmetrize();
    next.normalize_coeffs();
    Ok(next)
}

/// Relax `initial` (or the model's initial guess) to the lowest antisymmetric state of `H₀`.
///
/// Weakly occupied orbitals make the explicit step stiff (their equations carry
/// `ρ⁻¹`), so a step that raises the energy is rejected and retried with `τ/2`.
/// This keeps the energy trace monotone.
pub fn ground_state(
    model: &HeliumModel,
    initial: Option<MctdhfState>,
    options: &GroundStateOptions,
) -> Result<GroundState> {
    if model.params().field_amplitude != 0.0 && model.laser_field(0.0) != 0.0 {
        return Err(Error::InvalidArgument("ground states require a vanishing field at t = 0".into()));
    }
    if !(options.tau > 0.0 && options.tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!("invalid ground-state options {options:?}")));
    }
    let mut state = initial.unwrap_or_else(|| model.initial_guess());
    state.orthonormalize()?;
    state.normalize_coeffs();
    let mut energy = model.energy(&state, 0.0);
    let mut trace = vec![energy];
    let mut iterations = 0;
    let mut rejected = 0;
    let mut tau = options.tau;
    for _stage in 0..=options.refinements {
        let mut converged = false;
        let mut residual = f64::INFINITY;
        while iterations < options.max_iterations {
            let next = imaginary_time_step(model, tau, &state)?;
            iterations += 1;
            let e = model.energy(&next, 0.0);
            if e > energy + ENERGY_JITTER {
                rejected += 1;
                tau *= 0.5;
                continue;
            }
            state = next;
            trace.push(e);
            residual = (e - energy).abs() / tau;
            energy = e;
            if residual < options.tolerance {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NotConverged { iterations, residual });
        }
        tau *= 0.5;
    }
    Ok(GroundState { state, energy, iterations, energy_trace: trace, rejected, tau })
}
