//! Fixtures shared by the criterion benchmarks.

use expint::mctdhf::{HeliumModel, HeliumParams, MctdhfState};
use expint::nls::NlsProblem;

/// Driven helium model on the default grid with a normalized initial guess.
///
/// The cost of 𝒝 does not depend on the state, so no relaxation is needed.
pub fn helium(num_orbitals: usize) -> (HeliumModel, MctdhfState) {
    let model = HeliumModel::with_defaults(num_orbitals, HeliumParams::default()).expect("default helium model");
    let mut state = model.initial_guess();
    state.orthonormalize().expect("independent initial orbitals");
    state.normalize_coeffs();
    (model, state)
}

pub fn soliton() -> (NlsProblem, expint::GridFunction) {
    let p = NlsProblem::standard();
    let u0 = p.exact(0.0);
    (p, u0)
}
