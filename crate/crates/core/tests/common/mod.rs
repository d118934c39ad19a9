#![allow(dead_code)]

pub mod brute;
pub mod classical;

use expint::phi::inv_factorial;
use expint::mctdhf::{HeliumModel, MctdhfState};
use expint::{Complex64, GridFunction, UniformGrid};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    num / den.max(1e-300)
}

const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

fn kronrod15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = f(mid) * GK_WEIGHTS[7];
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        acc += (f(mid - dx) + f(mid + dx)) * GK_WEIGHTS[i];
    }
    acc * half
}

/// Composite 15-point Kronrod rule (degree 23) on `panels` equal panels.
///
/// For an entire integrand varying on scale `1/r`, panels of width `≤ 1/r` give
/// errors far below round-off.
pub fn integrate_panels(f: impl Fn(f64) -> Complex64, a: f64, b: f64, panels: usize) -> Complex64 {
    let w = (b - a) / panels as f64;
    (0..panels).map(|p| kronrod15(&f, a + p as f64 * w, a + (p + 1) as f64 * w)).sum()
}

/// Smooth random orbitals under a Gaussian window, orthonormalized, with random antisymmetric `a`.
pub fn random_state(model: &HeliumModel, rng: &mut ChaCha8Rng) -> MctdhfState {
    let grid = model.grid().clone();
    let n = model.num_orbitals();
    let width = 0.25 * grid.half_length();
    let orbitals = (0..n).map(|_| random_orbital(&grid, width, rng)).collect();
    let mut coeffs = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in (j + 1)..n {
            let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            coeffs[(j, k)] = v;
            coeffs[(k, j)] = -v;
        }
    }
    let mut state = MctdhfState::new(coeffs, orbitals).unwrap();
    state.orthonormalize().unwrap();
    state.normalize_coeffs();
    state
}

pub fn random_orbital(grid: &Arc<UniformGrid>, width: f64, rng: &mut ChaCha8Rng) -> GridFunction {
    let modes: Vec<(f64, Complex64)> =
        (0..4).map(|_| (rng.gen_range(-2.0..2.0), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect();
    let shift = rng.gen_range(-0.2..0.2) * width;
    GridFunction::from_fn(grid, |x| {
        let window = (-((x - shift) / width).powi(2)).exp();
        modes.iter().map(|(k, a)| a * Complex64::from_polar(1.0, k * x)).sum::<Complex64>() * window
    })
}

/// Classical Adams–Bashforth weights, newest value first.
pub fn ab_weights(k: usize) -> Vec<f64> {
    let (num, den): (&[f64], f64) = match k {
        1 => (&[1.0], 1.0),
        2 => (&[3.0, -1.0], 2.0),
        3 => (&[23.0, -16.0, 5.0], 12.0),
        4 => (&[55.0, -59.0, 37.0, -9.0], 24.0),
        5 => (&[1901.0, -2774.0, 2616.0, -1274.0, 251.0], 720.0),
        _ => panic!("no table for k = {k}"),
    };
    num.iter().map(|v| v / den).collect()
}

/// Classical Adams–Moulton weights of order `k + 1`: forward value first, then newest to oldest.
pub fn am_weights(k: usize) -> Vec<f64> {
    let (num, den): (&[f64], f64) = match k {
        1 => (&[1.0, 1.0], 2.0),
        2 => (&[5.0, 8.0, -1.0], 12.0),
        3 => (&[9.0, 19.0, -5.0, 1.0], 24.0),
        4 => (&[251.0, 646.0, -264.0, 106.0, -19.0], 720.0),
        5 => (&[475.0, 1427.0, -798.0, 482.0, -173.0, 27.0], 1440.0),
        _ => panic!("no table for k = {k}"),
    };
    num.iter().map(|v| v / den).collect()
}

/// `φ_k(z) = ∫₀¹ e^{(1-θ)z} θ^{k-1}/(k-1)! dθ`.
pub fn phi_quadrature(k: usize, z: Complex64) -> Complex64 {
    if k == 0 {
        return z.exp();
    }
    let w = inv_factorial(k - 1);
    let panels = 4 + z.norm().ceil() as usize;
    integrate_panels(|s| (z * (1.0 - s)).exp() * s.powi(k as i32 - 1) * w, 0.0, 1.0, panels)
}
