//! The semilinear problem contract `u' = 𝒜u + 𝒝(t, u)`.
//!
//! All integrators work in real-time form: for `i∂ₜu = Au + B(u)` the operators
//! are `𝒜 = -iA` and `𝒝 = -iB`. Every evaluation of 𝒝 goes through
//! [`SemilinearProblem::eval_b`], which counts it; this count is the cost metric
//! used throughout the harness.

use std::cell::Cell;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::propagator::DiagonalPropagator;

/// Vector-space operations needed by the integrators.
pub trait StateVector: Clone {
    /// `self += alpha * x`
    fn axpy(&mut self, alpha: f64, x: &Self);
    fn scale(&mut self, alpha: Complex64);
    /// Composite L² norm.
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;
    fn zeros_like(&self) -> Self;
}

/// `Σ cᵢ xᵢ`; panics on an empty term list.
pub fn linear_combination<S: StateVector>(terms: &[(f64, &S)]) -> S {
    let (c0, x0) = terms[0];
    let mut out = (*x0).clone();
    if c0 != 1.0 {
        out.scale(Complex64::new(c0, 0.0));
    }
    for &(c, x) in &terms[1..] {
        out.axpy(c, x);
    }
    out
}

impl StateVector for Vec<Complex64> {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        for (a, b) in self.iter_mut().zip(x) {
            *a += b * alpha;
        }
    }

    fn scale(&mut self, alpha: Complex64) {
        for a in self.iter_mut() {
            *a *= alpha;
        }
    }

    fn norm(&self) -> f64 {
        self.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }

    fn zeros_like(&self) -> Self {
        vec![Complex64::new(0.0, 0.0); self.len()]
    }
}

impl StateVector for GridFunction {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        GridFunction::axpy(self, Complex64::new(alpha, 0.0), x);
    }

    fn scale(&mut self, alpha: Complex64) {
        GridFunction::scale(self, alpha);
    }

    fn norm(&self) -> f64 {
        GridFunction::norm(self)
    }

    fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }

    fn zeros_like(&self) -> Self {
        GridFunction::zeros(self.grid())
    }
}

/// Evaluation counters of one problem instance.
#[derive(Debug, Default)]
pub struct EvalCounter {
    b_evals: Cell<u64>,
    exp_applications: Cell<u64>,
}

impl EvalCounter {
    pub fn b_evals(&self) -> u64 {
        self.b_evals.get()
    }

    pub fn exp_applications(&self) -> u64 {
        self.exp_applications.get()
    }

    pub fn reset(&self) {
        self.b_evals.set(0);
        self.exp_applications.set(0);
    }

    fn bump_b(&self) {
        self.b_evals.set(self.b_evals.get() + 1);
    }

    fn bump_exp(&self) {
        self.exp_applications.set(self.exp_applications.get() + 1);
    }
}

/// Quantities monitored along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub norm: f64,
    pub energy: Option<f64>,
}

/// A problem `u' = 𝒜u + 𝒝(t, u)` with a diagonalizable, exactly propagated 𝒜.
///
/// Implementors supply the raw operators; integrators call the provided
/// `apply_exp_a`, `phi_apply_a` and `eval_b`, which do the bookkeeping.
pub trait SemilinearProblem {
    type State: StateVector;

    /// `e^{t𝒜} u`.
    fn linear_flow(&self, t: f64, u: &Self::State) -> Self::State;
    /// `φₖ(h𝒜) u`.
    fn linear_phi(&self, k: usize, h: f64, u: &Self::State) -> Self::State;
    /// `𝒜 u`, used by methods that treat 𝒜 explicitly.
    fn linear_apply(&self, u: &Self::State) -> Self::State;
    /// `𝒝(t, u)`, uncounted.
    fn nonlinearity(&self, t: f64, u: &Self::State) -> Self::State;

    fn counter(&self) -> &EvalCounter;

    /// Monitored quantities; the default reports the composite norm only.
    fn observe(&self, _t: f64, u: &Self::State, _with_energy: bool) -> Observables {
        Observables { norm: u.norm(), energy: None }
    }

    fn apply_exp_a(&self, t: f64, u: &Self::State) -> Self::State {
        self.counter().bump_exp();
        self.linear_flow(t, u)
    }

    fn phi_apply_a(&self, k: usize, h: f64, u: &Self::State) -> Self::State {
        self.linear_phi(k, h, u)
    }

    /// Counted, blow-up checked evaluation of 𝒝.
    fn eval_b(&self, t: f64, u: &Self::State) -> Result<Self::State> {
        self.counter().bump_b();
        if !u.is_finite() {
            return Err(Error::BlowUp { t });
        }
        let b = self.nonlinearity(t, u);
        if !b.is_finite() {
            return Err(Error::BlowUp { t });
        }
        Ok(b)
    }
}

/// One classical RK4 step of the B-flow `u' = 𝒝(t, u)` with time frozen at `t`.
///
/// Explicit time dependence is carried by the A-stages in splitting methods,
/// so the B sub-flow is autonomous. Costs four evaluations of 𝒝.
pub fn b_flow_rk4<P: SemilinearProblem>(problem: &P, t: f64, h: f64, u: &P::State) -> Result<P::State> {
    let k1 = problem.eval_b(t, u)?;
    let mut y = u.clone();
    y.axpy(0.5 * h, &k1);
    let k2 = problem.eval_b(t, &y)?;
    let mut y = u.clone();
    y.axpy(0.5 * h, &k2);
    let k3 = problem.eval_b(t, &y)?;
    let mut y = u.clone();
    y.axpy(h, &k3);
    let k4 = problem.eval_b(t, &y)?;
    let mut out = u.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    if !out.is_finite() {
        return Err(Error::BlowUp { t: t + h });
    }
    Ok(out)
}

/// A small dense test problem: diagonal 𝒜 on `Cⁿ` and an arbitrary 𝒝.
pub struct DiagonalProblem<F> {
    propagator: DiagonalPropagator,
    rhs: F,
    counter: EvalCounter,
}

impl<F> DiagonalProblem<F>
where
    F: Fn(f64, &[Complex64]) -> Vec<Complex64>,
{
    pub fn new(eigenvalues: Vec<Complex64>, rhs: F) -> Self {
        Self { propagator: DiagonalPropagator::new(eigenvalues), rhs, counter: EvalCounter::default() }
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        self.propagator.eigenvalues()
    }
}

impl<F> SemilinearProblem for DiagonalProblem<F>
where
    F: Fn(f64, &[Complex64]) -> Vec<Complex64>,
{
    type State = Vec<Complex64>;

    fn linear_flow(&self, t: f64, u: &Self::State) -> Self::State {
        let m = self.propagator.exp_multiplier(t);
        u.iter().zip(m.iter()).map(|(a, b)| a * b).collect()
    }

    fn linear_phi(&self, k: usize, h: f64, u: &Self::State) -> Self::State {
        let table = self.propagator.phi_table(k, h);
        u.iter().zip(table.row(k)).map(|(a, b)| a * b).collect()
    }

    fn linear_apply(&self, u: &Self::State) -> Self::State {
        u.iter().zip(self.propagator.eigenvalues()).map(|(a, b)| a * b).collect()
    }

    fn nonlinearity(&self, t: f64, u: &Self::State) -> Self::State {
        (self.rhs)(t, u)
    }

    fn counter(&self) -> &EvalCounter {
        &self.counter
    }
}
