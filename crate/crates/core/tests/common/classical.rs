//! Random small systems and the classical RK4 / Adams reference integrators.

use super::{ab_weights, am_weights, c};
use expint::{Complex64, DiagonalProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rhs = Box<dyn Fn(f64, &[Complex64]) -> Vec<Complex64>>;

/// `f(t, u) = M u + 0.3 u∘u + cos(t) d` with random `M` and `d` in four dimensions.
pub fn random_system(seed: u64, eigenvalues: Vec<Complex64>) -> (DiagonalProblem<Rhs>, Vec<Complex64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = || c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
    let m: Vec<Vec<Complex64>> = (0..4).map(|_| (0..4).map(|_| r()).collect()).collect();
    let d: Vec<Complex64> = (0..4).map(|_| r()).collect();
    let u0: Vec<Complex64> = (0..4).map(|_| r()).collect();
    let rhs: Rhs = Box::new(move |t, u| {
        (0..4).map(|i| (0..4).map(|j| m[i][j] * u[j]).sum::<Complex64>() + 0.3 * u[i] * u[i] + t.cos() * d[i]).collect()
    });
    (DiagonalProblem::new(eigenvalues, rhs), u0)
}

pub fn zero_a() -> Vec<Complex64> {
    vec![c(0.0, 0.0); 4]
}

pub fn eval(p: &DiagonalProblem<Rhs>, t: f64, u: &[Complex64]) -> Vec<Complex64> {
    use expint::SemilinearProblem;
    p.eval_b(t, &u.to_vec()).unwrap()
}

pub fn add_scaled(u: &[Complex64], terms: &[(f64, &Vec<Complex64>)]) -> Vec<Complex64> {
    let mut out = u.to_vec();
    for (w, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += x * *w;
        }
    }
    out
}

pub fn classical_rk4(p: &DiagonalProblem<Rhs>, t: f64, h: f64, u: &[Complex64]) -> Vec<Complex64> {
    let k1 = eval(p, t, u);
    let k2 = eval(p, t + h / 2.0, &add_scaled(u, &[(h / 2.0, &k1)]));
    let k3 = eval(p, t + h / 2.0, &add_scaled(u, &[(h / 2.0, &k2)]));
    let k4 = eval(p, t + h, &add_scaled(u, &[(h, &k3)]));
    add_scaled(u, &[(h / 6.0, &k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)])
}

/// Classical AB-k (optionally PECE with the AM corrector) from the driver's own startup values.
pub fn classical_multistep(
    p: &DiagonalProblem<Rhs>,
    k: usize,
    pece: bool,
    h: f64,
    steps: usize,
    start: &[(f64, Vec<Complex64>)],
) -> Vec<Complex64> {
    let mut f: Vec<Vec<Complex64>> = start.iter().map(|(t, u)| eval(p, *t, u)).collect();
    let (mut t, mut u) = start.last().cloned().unwrap();
    let ab = ab_weights(k);
    let am = am_weights(k);
    for _ in start.len()..=steps {
        let newest: Vec<&Vec<Complex64>> = f.iter().rev().take(k).collect();
        let pred_terms: Vec<(f64, &Vec<Complex64>)> = ab.iter().map(|w| h * w).zip(newest.iter().copied()).collect();
        let predicted = add_scaled(&u, &pred_terms);
        let next = if pece {
            let fp = eval(p, t + h, &predicted);
            let mut terms = vec![(h * am[0], &fp)];
            terms.extend(am[1..].iter().map(|w| h * w).zip(newest.iter().copied()));
            add_scaled(&u, &terms)
        } else {
            predicted
        };
        t += h;
        u = next;
        f.push(eval(p, t, &u));
    }
    u
}
