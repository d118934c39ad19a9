use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{inner_unchecked, GridFunction, UniformGrid};
use crate::problem::StateVector;

/// Two-electron MCTDHF state: antisymmetric coefficients `a_jk` and orbitals `φ_j`.
///
/// The wave function is `Ψ(x, y) = Σ_jk a_jk φ_j(x) φ_k(y)`.
#[derive(Debug, Clone)]
pub struct MctdhfState {
    pub coeffs: DMatrix<Complex64>,
    pub orbitals: Vec<GridFunction>,
}

impl MctdhfState {
    /// Checks shapes and grids; antisymmetry is checked to `1e-12` relative.
    pub fn new(coeffs: DMatrix<Complex64>, orbitals: Vec<GridFunction>) -> Result<Self> {
        let n = orbitals.len();
        if n < 2 {
            return Err(Error::InvalidArgument(format!("at least two orbitals are needed, got {n}")));
        }
        if coeffs.nrows() != n || coeffs.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "coefficient matrix is {}x{}, expected {n}x{n}",
                coeffs.nrows(),
                coeffs.ncols()
            )));
        }
        let grid = orbitals[0].grid();
        if orbitals.iter().any(|o| **o.grid() != **grid) {
            return Err(Error::GridMismatch);
        }
        let state = Self { coeffs, orbitals };
        if state.antisymmetry_defect() > 1e-12 * state.coeffs.norm().max(1e-300) {
            return Err(Error::InvalidArgument("coefficients are not antisymmetric".into()));
        }
        Ok(state)
    }

    pub fn num_orbitals(&self) -> usize {
        self.orbitals.len()
    }

    pub fn grid(&self) -> &Arc<UniformGrid> {
        self.orbitals[0].grid()
    }

    /// `‖a‖` (Frobenius).
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// `max |a_jk + a_kj|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.coeffs.nrows();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                worst = worst.max((self.coeffs[(j, k)] + self.coeffs[(k, j)]).norm());
            }
        }
        worst
    }

    /// Orbital overlap matrix `S_ij = ⟨φ_i, φ_j⟩`.
    pub fn overlap_matrix(&self) -> DMatrix<Complex64> {
        let n = self.num_orbitals();
        DMatrix::from_fn(n, n, |i, j| inner_unchecked(&self.orbitals[i], &self.orbitals[j]))
    }

    /// `max |⟨φ_i, φ_j⟩ - δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let s = self.overlap_matrix();
        let n = s.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Single-hole functions `ψ_j = Σ_k a_jk φ_k`.
    pub fn single_hole(&self) -> Vec<GridFunction> {
        let n = self.num_orbitals();
        (0..n)
            .map(|j| {
                let mut psi = GridFunction::zeros(self.grid());
                for k in 0..n {
                    psi.axpy(self.coeffs[(j, k)], &self.orbitals[k]);
                }
                psi
            })
            .collect()
    }

    /// Reduced density matrix `ρ_jℓ = ⟨ψ_j, ψ_ℓ⟩ = (ā aᵀ)_jℓ` for orthonormal orbitals.
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        self.coeffs.map(|c| c.conj()) * self.coeffs.transpose()
    }

    /// Re-orthonormalize the orbitals by modified Gram–Schmidt, carrying the
    /// transformation into the coefficients so that `Ψ` is unchanged.
    pub fn orthonormalize(&mut self) -> Result<()> {
        let n = self.num_orbitals();
        let mut r = DMatrix::<Complex64>::zeros(n, n);
        for j in 0..n {
            for i in 0..j {
                let rij = inner_unchecked(&self.orbitals[i], &self.orbitals[j]);
                r[(i, j)] = rij;
                let qi = self.orbitals[i].clone();
                self.orbitals[j].axpy(-rij, &qi);
            }
            let nrm = self.orbitals[j].norm();
            if !(nrm > 1e-300) || !nrm.is_finite() {
                return Err(Error::InvalidArgument(format!("orbital {j} is linearly dependent")));
            }
            r[(j, j)] = nrm.into();
            self.orbitals[j].scale((1.0 / nrm).into());
        }
        // φ_j = Σ_i q_i R_ij  ⇒  a' = R a Rᵀ
        self.coeffs = &r * &self.coeffs * r.transpose();
        Ok(())
    }

    /// Replace `a` by its antisymmetric part `(a - aᵀ)/2`.
    pub fn antisymmetrize(&mut self) {
        self.coeffs = (&self.coeffs - self.coeffs.transpose()) * Complex64::from(0.5);
    }

    /// Scale the coefficients to `‖a‖ = 1`.
    pub fn normalize_coeffs(&mut self) {
        let nrm = self.coeffs.norm();
        if nrm > 0.0 {
            self.coeffs /= Complex64::from(nrm);
        }
    }

    /// `⟨Ψ, Ψ'⟩ = Σ conj(a_jk) (S a' Sᵀ)_jk` with `S_jl = ⟨φ_j, φ'_l⟩`.
    pub fn overlap(&self, other: &MctdhfState) -> Result<Complex64> {
        if **self.grid() != **other.grid() {
            return Err(Error::GridMismatch);
        }
        let s = DMatrix::from_fn(self.num_orbitals(), other.num_orbitals(), |j, l| {
            inner_unchecked(&self.orbitals[j], &other.orbitals[l])
        });
        let projected = &s * &other.coeffs * s.transpose();
        Ok(self.coeffs.iter().zip(projected.iter()).map(|(a, p)| a.conj() * p).sum())
    }

    /// `Ψ(x_i, y_j)` on the full two-dimensional grid, row-major in `x`.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let m = self.grid().num_points();
        let n = self.num_orbitals();
        let mut out = vec![Complex64::new(0.0, 0.0); m * m];
        for j in 0..n {
            for k in 0..n {
                let a = self.coeffs[(j, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let fj = self.orbitals[j].values();
                let fk = self.orbitals[k].values();
                for x in 0..m {
                    let ax = a * fj[x];
                    for y in 0..m {
                        out[x * m + y] += ax * fk[y];
                    }
                }
            }
        }
        out
    }
}

/// `| ‖a‖ - ‖a₀‖ |`.
pub fn norm_drift(state: &MctdhfState, reference: &MctdhfState) -> f64 {
    (state.coeff_norm() - reference.coeff_norm()).abs()
}

impl StateVector for MctdhfState {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        self.coeffs.zip_apply(&x.coeffs, |a, b| *a += b * alpha);
        for (o, xo) in self.orbitals.iter_mut().zip(&x.orbitals) {
            o.axpy(alpha.into(), xo);
        }
    }

    fn scale(&mut self, alpha: Complex64) {
        self.coeffs *= alpha;
        for o in &mut self.orbitals {
            o.scale(alpha);
        }
    }

    /// `sqrt(‖a‖² + Σ_j ‖φ_j‖²)`.
    fn norm(&self) -> f64 {
        (self.coeffs.norm_squared() + self.orbitals.iter().map(GridFunction::norm_sqr).sum::<f64>()).sqrt()
    }

    fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
            && self.orbitals.iter().all(|o| o.values().iter().all(|v| v.is_finite()))
    }

    fn zeros_like(&self) -> Self {
        let n = self.num_orbitals();
        Self {
            coeffs: DMatrix::zeros(n, n),
            orbitals: self.orbitals.iter().map(|o| GridFunction::zeros(o.grid())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MctdhfState {
        let grid = UniformGrid::new(64, 8.0).unwrap();
        let orbitals = (0..3)
            .map(|j| {
                GridFunction::from_fn(&grid, |x| {
                    Complex64::new(x.powi(j) * (-0.5 * x * x).exp(), 0.1 * j as f64 * x * (-x * x).exp())
                })
            })
            .collect();
        let mut a = DMatrix::zeros(3, 3);
        for (j, k, v) in [(0, 1, Complex64::new(0.8, 0.1)), (0, 2, Complex64::new(0.0, 0.3)), (1, 2, Complex64::new(-0.2, 0.0))]
        {
            a[(j, k)] = v;
            a[(k, j)] = -v;
        }
        MctdhfState { coeffs: a, orbitals }
    }

    #[test]
    fn rejects_symmetric_coefficients() {
        let s = sample();
        let mut a = s.coeffs.clone();
        a[(1, 0)] = a[(0, 1)];
        assert!(MctdhfState::new(a, s.orbitals.clone()).is_err());
        assert!(MctdhfState::new(s.coeffs.clone(), s.orbitals[..1].to_vec()).is_err());
        assert!(MctdhfState::new(s.coeffs, s.orbitals).is_ok());
    }

    #[test]
    fn single_hole_of_the_unit_pair() {
        let mut s = sample();
        s.orbitals.truncate(2);
        s.coeffs = DMatrix::from_row_slice(2, 2, &[0.0.into(), 1.0.into(), (-1.0).into(), 0.0.into()]);
        let psi = s.single_hole();
        let mut d0 = psi[0].clone();
        d0.axpy((-1.0).into(), &s.orbitals[1]);
        let mut d1 = psi[1].clone();
        d1.axpy(1.0.into(), &s.orbitals[0]);
        assert_eq!(d0.norm(), 0.0);
        assert_eq!(d1.norm(), 0.0);
    }

    #[test]
    fn orthonormalize_preserves_the_wave_function() {
        let mut s = sample();
        let before = s.reconstruct();
        s.orthonormalize().unwrap();
        assert!(s.orthonormality_defect() < 1e-13);
        assert!(s.antisymmetry_defect() < 1e-14);
        let after = s.reconstruct();
        let scale = before.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let worst = before.iter().zip(&after).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-13 * scale, "{worst}");
    }

    #[test]
    fn density_matrix_is_hermitian_with_unit_trace() {
        let mut s = sample();
        s.orthonormalize().unwrap();
        s.normalize_coeffs();
        let rho = s.density_matrix();
        assert!((rho.trace() - Complex64::from(1.0)).norm() < 1e-14);
        assert!((&rho - rho.adjoint()).norm() < 1e-15);
        // ρ_jℓ = ⟨ψ_j, ψ_ℓ⟩ for orthonormal orbitals
        let psi = s.single_hole();
        for j in 0..3 {
            for l in 0..3 {
                assert!((rho[(j, l)] - inner_unchecked(&psi[j], &psi[l])).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn overlap_is_the_full_grid_inner_product() {
        let mut s = sample();
        s.orthonormalize().unwrap();
        let mut other = sample();
        other.coeffs *= Complex64::new(0.3, -0.4);
        other.orbitals[1].scale(Complex64::new(0.0, 2.0));
        let dx = s.grid().spacing();
        let brute: Complex64 =
            s.reconstruct().iter().zip(&other.reconstruct()).map(|(x, y)| x.conj() * y).sum::<Complex64>() * dx * dx;
        assert!((s.overlap(&other).unwrap() - brute).norm() < 1e-13 * brute.norm());
    }

    #[test]
    fn norm_drift_examples() {
        let s = sample();
        assert_eq!(norm_drift(&s, &s), 0.0);
        let mut t = s.clone();
        t.coeffs *= Complex64::from(2.0);
        assert!((norm_drift(&t, &s) - s.coeff_norm()).abs() < 1e-15);
        let mut p = s.clone();
        p.coeffs *= Complex64::from_polar(1.0, 0.7);
        assert!(norm_drift(&p, &s) < 1e-15);
    }

    #[test]
    fn antisymmetrize_projects() {
        let mut s = sample();
        s.coeffs[(0, 0)] = Complex64::new(0.5, 0.5);
        s.coeffs[(2, 1)] += Complex64::from(0.1);
        s.antisymmetrize();
        assert_eq!(s.antisymmetry_defect(), 0.0);
        let once = s.coeffs.clone();
        s.antisymmetrize();
        assert_eq!(s.coeffs, once);
    }
}
