//! Brute-force MCTDHF right-hand sides and energy on the full 2D grid.

use super::c;
use expint::mctdhf::{HeliumModel, MctdhfState};
use expint::Complex64;
use nalgebra::DMatrix;

/// `W(x_i, y_j)` with the interaction at the periodic displacement.
pub fn potential_2d(model: &HeliumModel, t: f64) -> Vec<f64> {
    let grid = model.grid();
    let l = grid.half_length();
    let b2 = model.params().shielding.powi(2);
    let h1 = model.one_body_potential(t);
    let m = grid.num_points();
    let x = grid.points();
    let mut w = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let mut d = x[i] - x[j];
            if d >= l {
                d -= 2.0 * l;
            }
            if d < -l {
                d += 2.0 * l;
            }
            w[i * m + j] = h1[i] + h1[j] + 1.0 / (d * d + b2).sqrt();
        }
    }
    w
}

pub struct Brute {
    pub coeffs: DMatrix<Complex64>,
    pub orbitals: Vec<Vec<Complex64>>,
    pub energy: f64,
}

pub fn brute_force(model: &HeliumModel, s: &MctdhfState, t: f64) -> Brute {
    let n = s.num_orbitals();
    let grid = model.grid();
    let m = grid.num_points();
    let dx = grid.spacing();
    let psi = s.reconstruct();
    let w = potential_2d(model, t);
    let wpsi: Vec<Complex64> = psi.iter().zip(&w).map(|(p, v)| p * v).collect();
    let phi: Vec<&[Complex64]> = s.orbitals.iter().map(|o| o.values()).collect();

    // -i ⟨φ_j φ_k | W | Ψ⟩
    let coeffs = DMatrix::from_fn(n, n, |j, k| {
        let mut acc = c(0.0, 0.0);
        for x in 0..m {
            for y in 0..m {
                acc += (phi[j][x] * phi[k][y]).conj() * wpsi[x * m + y];
            }
        }
        c(0.0, -1.0) * acc * dx * dx
    });

    // -i (I - P) Σ_ℓ (ρ⁻¹)_jℓ ∫ conj(ψ_ℓ(y)) (WΨ)(x, y) dy
    let holes: Vec<Vec<Complex64>> = s.single_hole().into_iter().map(|h| h.into_values()).collect();
    let rho = DMatrix::from_fn(n, n, |j, l| holes[j].iter().zip(&holes[l]).map(|(a, b)| a.conj() * b).sum::<Complex64>() * dx);
    let rho_inv = rho.try_inverse().unwrap();
    let g: Vec<Vec<Complex64>> = (0..n)
        .map(|l| (0..m).map(|x| (0..m).map(|y| holes[l][y].conj() * wpsi[x * m + y]).sum::<Complex64>() * dx).collect())
        .collect();
    let orbitals = (0..n)
        .map(|j| {
            let mut f: Vec<Complex64> = (0..m).map(|x| (0..n).map(|l| rho_inv[(j, l)] * g[l][x]).sum()).collect();
            for o in &phi {
                let p: Complex64 = o.iter().zip(&f).map(|(a, b)| a.conj() * b).sum::<Complex64>() * dx;
                for (fx, ox) in f.iter_mut().zip(o.iter()) {
                    *fx -= p * ox;
                }
            }
            f.iter().map(|v| c(0.0, -1.0) * v).collect()
        })
        .collect();

    // ⟨Ψ | T_x + T_y + W | Ψ⟩ with spectral kinetic energy along both axes
    let half_k2: Vec<Complex64> = grid.wavenumbers().iter().map(|k| c(0.5 * k * k, 0.0)).collect();
    let mut tpsi = vec![c(0.0, 0.0); m * m];
    for x in 0..m {
        let row: Vec<Complex64> = psi[x * m..(x + 1) * m].to_vec();
        let t_row = grid.apply_multiplier(&half_k2, &row).unwrap();
        for y in 0..m {
            tpsi[x * m + y] += t_row[y];
        }
    }
    for y in 0..m {
        let col: Vec<Complex64> = (0..m).map(|x| psi[x * m + y]).collect();
        let t_col = grid.apply_multiplier(&half_k2, &col).unwrap();
        for x in 0..m {
            tpsi[x * m + y] += t_col[x];
        }
    }
    let energy: Complex64 =
        psi.iter().zip(tpsi.iter().zip(&wpsi)).map(|(p, (a, b))| p.conj() * (a + b)).sum::<Complex64>() * dx * dx;
    Brute { coeffs, orbitals, energy: energy.re }
}
