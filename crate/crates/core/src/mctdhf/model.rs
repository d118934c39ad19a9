use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::MctdhfState;
use crate::error::{Error, Result};
use crate::grid::{convolve_with_transform, inner_unchecked, kernel_transform, GridFunction, UniformGrid};
use crate::problem::{EvalCounter, Observables, SemilinearProblem};
use crate::propagator::DiagonalPropagator;

pub const DEFAULT_POINTS: usize = 256;
pub const DEFAULT_HALF_LENGTH: f64 = 40.0;
pub const DEFAULT_ORBITALS: usize = 2;

/// Parameters of the soft-Coulomb helium model driven by a laser pulse.
///
/// `W = u(x) + u(y) + V(x - y) + (x + y) E(t)` with `u(x) = -2/√(x² + b²)`,
/// `V(x) = 1/√(x² + b²)` and `E(t) = E₀ g(t) sin(ωt)`,
/// `g(t) = c exp(-w (t - t_c)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeliumParams {
    pub shielding: f64,
    pub field_amplitude: f64,
    pub frequency: f64,
    pub envelope_peak: f64,
    pub envelope_width: f64,
    pub envelope_center: f64,
    /// Regularization `ε` of the density matrix.
    pub regularization: f64,
}

impl Default for HeliumParams {
    fn default() -> Self {
        let frequency = 0.1837;
        Self {
            shielding: 0.7408,
            field_amplitude: 0.1894,
            frequency,
            envelope_peak: 1.2,
            envelope_width: 5e-4,
            envelope_center: 6.0 * PI / frequency,
            regularization: 1e-8,
        }
    }
}

impl HeliumParams {
    /// The field-free Hamiltonian `H₀`.
    pub fn field_free() -> Self {
        Self { field_amplitude: 0.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.shielding, self.frequency, self.envelope_peak, self.envelope_width, self.regularization];
        if positive.iter().all(|&p| p > 0.0 && p.is_finite())
            && self.field_amplitude >= 0.0
            && self.envelope_center.is_finite()
        {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid helium parameters {self:?}")))
        }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.envelope_peak * (-self.envelope_width * (t - self.envelope_center).powi(2)).exp()
    }

    /// `E(t) = E₀ g(t) sin(ωt)`.
    pub fn laser_field(&self, t: f64) -> f64 {
        self.field_amplitude * self.envelope(t) * (self.frequency * t).sin()
    }
}

/// Quantities assembled once per evaluation of the mean-field right-hand side.
#[derive(Debug, Clone)]
pub struct MeanFieldBundle {
    /// `ρ_jℓ = ⟨ψ_j, ψ_ℓ⟩`.
    pub rho: DMatrix<Complex64>,
    /// `(ρ + ε exp(-ρ/ε))⁻¹`.
    pub rho_inv_reg: DMatrix<Complex64>,
    /// Set when an eigenvalue of `ρ` lies below `ε`.
    pub near_singular: bool,
    /// `⟨φ_j | u + xE(t) | φ_l⟩`.
    pub one_body: DMatrix<Complex64>,
    /// `w_mn(x) = ∫ V(x - y) conj(φ_m(y)) φ_n(y) dy`, index `m N + n`.
    pub pair_potentials: Vec<GridFunction>,
    /// `⟨φ_j φ_k | V | φ_l φ_m⟩`, index `((j N + k) N + l) N + m`.
    pub two_body: Vec<Complex64>,
    /// `W̄_ℓk(x) = ⟨ψ_ℓ | W | ψ_k⟩_y`, index `ℓ N + k`.
    pub meanfield_ops: Vec<GridFunction>,
}

impl MeanFieldBundle {
    pub fn two_body_at(&self, n: usize, j: usize, k: usize, l: usize, m: usize) -> Complex64 {
        self.two_body[((j * n + k) * n + l) * n + m]
    }
}

/// The 1D helium MCTDHF problem as `u' = 𝒜u + 𝒝(t, u)`.
///
/// 𝒜 is the free kinetic flow on each orbital (zero on the coefficients); 𝒝
/// collects the potential terms of the coefficient and orbital equations.
pub struct HeliumModel {
    grid: Arc<UniformGrid>,
    params: HeliumParams,
    num_orbitals: usize,
    kinetic: DiagonalPropagator,
    nuclear: Vec<f64>,
    kernel_hat: Vec<Complex64>,
    counter: EvalCounter,
}

impl HeliumModel {
    pub fn new(grid: Arc<UniformGrid>, num_orbitals: usize, params: HeliumParams) -> Result<Self> {
        params.validate()?;
        if num_orbitals < 2 {
            return Err(Error::InvalidArgument(format!(
                "antisymmetric two-electron coefficients need at least two orbitals, got {num_orbitals}"
            )));
        }
        let b2 = params.shielding * params.shielding;
        let nuclear = grid.points().iter().map(|x| -2.0 / (x * x + b2).sqrt()).collect();
        let kernel = GridFunction::from_fn(&grid, |x| Complex64::new(1.0 / (x * x + b2).sqrt(), 0.0));
        let kernel_hat = kernel_transform(&kernel);
        let kinetic = DiagonalPropagator::kinetic(&grid);
        Ok(Self { grid, params, num_orbitals, kinetic, nuclear, kernel_hat, counter: EvalCounter::default() })
    }

    /// Default grid `M = 256`, `L = 40`.
    pub fn with_defaults(num_orbitals: usize, params: HeliumParams) -> Result<Self> {
        Self::new(UniformGrid::new(DEFAULT_POINTS, DEFAULT_HALF_LENGTH)?, num_orbitals, params)
    }

    pub fn grid(&self) -> &Arc<UniformGrid> {
        &self.grid
    }

    pub fn params(&self) -> &HeliumParams {
        &self.params
    }

    pub fn num_orbitals(&self) -> usize {
        self.num_orbitals
    }

    pub fn kinetic(&self) -> &DiagonalPropagator {
        &self.kinetic
    }

    pub fn laser_field(&self, t: f64) -> f64 {
        self.params.laser_field(t)
    }

    /// `u(x) + x E(t)` on the grid.
    pub fn one_body_potential(&self, t: f64) -> Vec<f64> {
        let e = self.laser_field(t);
        self.nuclear.iter().zip(self.grid.points()).map(|(u, x)| u + x * e).collect()
    }

    /// `(ρ + ε exp(-ρ/ε))⁻¹` by Hermitian eigendecomposition; flags eigenvalues below `ε`.
    pub fn regularized_inverse(&self, rho: &DMatrix<Complex64>) -> (DMatrix<Complex64>, bool) {
        let eps = self.params.regularization;
        let hermitian = (rho + rho.adjoint()) * Complex64::from(0.5);
        let eig = hermitian.symmetric_eigen();
        let mut near_singular = false;
        let inv: Vec<Complex64> = eig
            .eigenvalues
            .iter()
            .map(|&mu| {
                if mu < eps {
                    near_singular = true;
                }
                Complex64::from(1.0 / (mu + eps * (-mu / eps).exp()))
            })
            .collect();
        let u = &eig.eigenvectors;
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(inv));
        (u * d * u.adjoint(), near_singular)
    }

    fn check_state(&self, state: &MctdhfState) {
        debug_assert_eq!(state.num_orbitals(), self.num_orbitals);
        debug_assert!(**state.grid() == *self.grid);
    }

    pub fn build_mean_fields(&self, state: &MctdhfState, t: f64) -> MeanFieldBundle {
        self.check_state(state);
        let n = self.num_orbitals;
        let phi = &state.orbitals;
        let a = &state.coeffs;
        let potential = self.one_body_potential(t);

        let rho = state.density_matrix();
        let (rho_inv_reg, near_singular) = self.regularized_inverse(&rho);

        let h1_phi: Vec<GridFunction> = phi
            .iter()
            .map(|f| {
                let mut g = f.clone();
                for (v, u) in g.values_mut().iter_mut().zip(&potential) {
                    *v *= u;
                }
                g
            })
            .collect();
        let one_body = DMatrix::from_fn(n, n, |j, l| inner_unchecked(&phi[j], &h1_phi[l]));

        let mut pair_potentials = vec![GridFunction::zeros(&self.grid); n * n];
        for m in 0..n {
            for q in m..n {
                let density = phi[m].with_values(
                    phi[m].values().iter().zip(phi[q].values()).map(|(x, y)| x.conj() * y).collect(),
                );
                let w = convolve_with_transform(&self.kernel_hat, &density).expect("same grid");
                if q != m {
                    pair_potentials[q * n + m] = w.with_values(w.values().iter().map(|v| v.conj()).collect());
                }
                pair_potentials[m * n + q] = w;
            }
        }

        // ⟨φ_j φ_k | V | φ_l φ_m⟩ = ⟨φ_j, w_km φ_l⟩
        let mut two_body = vec![Complex64::new(0.0, 0.0); n * n * n * n];
        for k in 0..n {
            for m in 0..n {
                let w = pair_potentials[k * n + m].values();
                for l in 0..n {
                    let wl: Vec<Complex64> = w.iter().zip(phi[l].values()).map(|(x, y)| x * y).collect();
                    for j in 0..n {
                        let s: Complex64 = phi[j].values().iter().zip(&wl).map(|(x, y)| x.conj() * y).sum();
                        two_body[((j * n + k) * n + l) * n + m] = s * self.grid.spacing();
                    }
                }
            }
        }

        // W̄_ℓk(x) = ρ_ℓk h1(x) + ⟨ψ_ℓ|h1|ψ_k⟩ + Σ_mn conj(a_ℓm) a_kn w_mn(x)
        let scalar = a.map(|c| c.conj()) * &one_body * a.transpose();
        let mut meanfield_ops = Vec::with_capacity(n * n);
        for l in 0..n {
            for k in 0..n {
                let rho_lk = rho[(l, k)];
                let mut values: Vec<Complex64> = potential.iter().map(|u| rho_lk * u + scalar[(l, k)]).collect();
                for m in 0..n {
                    let alm = a[(l, m)].conj();
                    for q in 0..n {
                        let c = alm * a[(k, q)];
                        if c == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for (v, w) in values.iter_mut().zip(pair_potentials[m * n + q].values()) {
                            *v += c * w;
                        }
                    }
                }
                meanfield_ops.push(GridFunction::new(self.grid.clone(), values).expect("grid length"));
            }
        }

        MeanFieldBundle { rho, rho_inv_reg, near_singular, one_body, pair_potentials, two_body, meanfield_ops }
    }

    /// `Σ_l h_jl a_lk + Σ_m h_km a_jm + Σ_lm V_jklm a_lm`, i.e. `⟨Φ_jk | W | Ψ⟩`.
    pub fn coefficient_action(&self, state: &MctdhfState, bundle: &MeanFieldBundle) -> DMatrix<Complex64> {
        let n = self.num_orbitals;
        let a = &state.coeffs;
        let h = &bundle.one_body;
        let mut out = h * a + a * h.transpose();
        for j in 0..n {
            for k in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    for m in 0..n {
                        s += bundle.two_body_at(n, j, k, l, m) * a[(l, m)];
                    }
                }
                out[(j, k)] += s;
            }
        }
        out
    }

    /// `(I - P) Σ_ℓ (ρ⁻¹)_jℓ Σ_k W̄_ℓk φ_k` for every `j`.
    pub fn orbital_action(&self, state: &MctdhfState, bundle: &MeanFieldBundle) -> Vec<GridFunction> {
        let n = self.num_orbitals;
        let phi = &state.orbitals;
        let g: Vec<GridFunction> = (0..n)
            .map(|l| {
                let mut acc = GridFunction::zeros(&self.grid);
                for k in 0..n {
                    let w = bundle.meanfield_ops[l * n + k].values();
                    for ((a, x), y) in acc.values_mut().iter_mut().zip(w).zip(phi[k].values()) {
                        *a += x * y;
                    }
                }
                acc
            })
            .collect();
        (0..n)
            .map(|j| {
                let mut f = GridFunction::zeros(&self.grid);
                for (l, gl) in g.iter().enumerate() {
                    f.axpy(bundle.rho_inv_reg[(j, l)], gl);
                }
                project_out(phi, &mut f);
                f
            })
            .collect()
    }

    /// 𝒝 without counting: `(-i⟨Φ|W|Ψ⟩, -i(I-P)ρ⁻¹W̄φ)`.
    pub fn potential_tangent(&self, t: f64, state: &MctdhfState) -> MctdhfState {
        let bundle = self.build_mean_fields(state, t);
        let minus_i = Complex64::new(0.0, -1.0);
        let coeffs = self.coefficient_action(state, &bundle) * minus_i;
        let orbitals = self
            .orbital_action(state, &bundle)
            .into_iter()
            .map(|mut f| {
                f.scale(minus_i);
                f
            })
            .collect();
        MctdhfState { coeffs, orbitals }
    }

    /// Kinetic matrix `⟨φ_j, -½∂ₓ² φ_l⟩`, evaluated spectrally.
    pub fn kinetic_matrix(&self, state: &MctdhfState) -> DMatrix<Complex64> {
        let n = self.num_orbitals;
        let spectra: Vec<Vec<Complex64>> = state.orbitals.iter().map(GridFunction::to_frequency).collect();
        let scale = 1.0 / (2.0 * self.grid.half_length());
        let k2: Vec<f64> = self.grid.wavenumbers().iter().map(|k| 0.5 * k * k).collect();
        DMatrix::from_fn(n, n, |j, l| {
            let s: Complex64 =
                spectra[j].iter().zip(&spectra[l]).zip(&k2).map(|((x, y), w)| x.conj() * y * *w).sum();
            s * scale
        })
    }

    /// `⟨Ψ | H(t) | Ψ⟩` including the imaginary round-off residue.
    ///
    /// One-body terms carry the orbital overlap `S`, so the value is exact for
    /// orbitals that have drifted from orthonormality.
    pub fn energy_complex(&self, state: &MctdhfState, t: f64) -> Complex64 {
        let bundle = self.build_mean_fields(state, t);
        let n = self.num_orbitals;
        let a = &state.coeffs;
        let s = state.overlap_matrix();
        let hm = self.kinetic_matrix(state) + &bundle.one_body;
        let mut action = &hm * a * s.transpose() + &s * a * hm.transpose();
        for j in 0..n {
            for k in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    for m in 0..n {
                        acc += bundle.two_body_at(n, j, k, l, m) * a[(l, m)];
                    }
                }
                action[(j, k)] += acc;
            }
        }
        a.iter().zip(action.iter()).map(|(x, y)| x.conj() * y).sum()
    }

    /// Total energy `⟨Ψ | H(t) | Ψ⟩`.
    pub fn energy(&self, state: &MctdhfState, t: f64) -> f64 {
        let e = self.energy_complex(state, t);
        debug_assert!(!(e.im.abs() > 1e-10 * e.re.abs().max(1.0)), "energy has imaginary part {}", e.im);
        e.re
    }

    /// Orbitals `x^j exp(-x²/2)` (orthonormalized) with coefficients dominated by `a_01`.
    pub fn initial_guess(&self) -> MctdhfState {
        let n = self.num_orbitals;
        let orbitals = (0..n)
            .map(|j| GridFunction::from_fn(&self.grid, |x| Complex64::new(x.powi(j as i32) * (-0.5 * x * x).exp(), 0.0)))
            .collect();
        let mut coeffs = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in (j + 1)..n {
                let v = if (j, k) == (0, 1) { 1.0 } else { 0.1 / (j + k) as f64 };
                coeffs[(j, k)] = Complex64::new(v, 0.0);
                coeffs[(k, j)] = Complex64::new(-v, 0.0);
            }
        }
        let mut state = MctdhfState { coeffs, orbitals };
        state.orthonormalize().expect("monomial Gaussians are independent");
        state.normalize_coeffs();
        state
    }
}

/// `f ← f - Σ_i φ_i ⟨φ_i, f⟩`.
pub fn project_out(orbitals: &[GridFunction], f: &mut GridFunction) {
    for o in orbitals {
        let c = inner_unchecked(o, f);
        f.axpy(-c, o);
    }
}

impl SemilinearProblem for HeliumModel {
    type State = MctdhfState;

    fn linear_flow(&self, t: f64, u: &MctdhfState) -> MctdhfState {
        MctdhfState {
            coeffs: u.coeffs.clone(),
            orbitals: u.orbitals.iter().map(|o| self.kinetic.apply_exp(t, o)).collect(),
        }
    }

    fn linear_phi(&self, k: usize, h: f64, u: &MctdhfState) -> MctdhfState {
        MctdhfState {
            coeffs: &u.coeffs * Complex64::from(crate::phi::inv_factorial(k)),
            orbitals: u.orbitals.iter().map(|o| self.kinetic.phi_apply(k, h, o)).collect(),
        }
    }

    fn linear_apply(&self, u: &MctdhfState) -> MctdhfState {
        MctdhfState {
            coeffs: DMatrix::zeros(u.coeffs.nrows(), u.coeffs.ncols()),
            orbitals: u.orbitals.iter().map(|o| self.kinetic.apply_operator(o)).collect(),
        }
    }

    fn nonlinearity(&self, t: f64, u: &MctdhfState) -> MctdhfState {
        self.potential_tangent(t, u)
    }

    fn counter(&self) -> &EvalCounter {
        &self.counter
    }

    /// Norm is `‖a‖`; the energy includes the field at time `t`.
    fn observe(&self, t: f64, u: &MctdhfState, with_energy: bool) -> Observables {
        Observables { norm: u.coeff_norm(), energy: with_energy.then(|| self.energy(u, t)) }
    }
}
