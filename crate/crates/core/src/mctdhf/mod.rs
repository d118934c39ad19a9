//! MCTDHF for two electrons in one dimension: a soft-Coulomb helium model.
//!
//! Equations of motion with `Ψ = Σ a_jk φ_j(x) φ_k(y)`, `ψ_j = Σ_k a_jk φ_k`,
//! `ρ = ā aᵀ`:
//!
//! ```text
//! i ȧ_jk = ⟨Φ_jk | W | Ψ⟩
//! i φ̇_j  = T φ_j + (I - P) Σ_ℓk (ρ⁻¹)_jℓ W̄_ℓk φ_k
//! ```
//!
//! The kinetic term is the linear part 𝒜; everything else is 𝒝. Electrons are
//! treated as spinless fermions (antisymmetric `a`).

mod checkpoint;
mod ground;
mod model;
mod state;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_TAG};
pub use ground::{ground_state, imaginary_time_step, GroundState, GroundStateOptions, ENERGY_JITTER};
pub use model::{
    project_out, HeliumModel, HeliumParams, MeanFieldBundle, DEFAULT_HALF_LENGTH, DEFAULT_ORBITALS, DEFAULT_POINTS,
};
pub use state::{norm_drift, MctdhfState};
