//! Focusing cubic NLS `i∂ₜu = -½∂ₓ²u - |u|²u` with its exact bright soliton.
//!
//! In real-time form `𝒜 = i½∂ₓ²` (the kinetic propagator) and `𝒝(u) = i|u|²u`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, UniformGrid};
use crate::problem::{EvalCounter, Observables, SemilinearProblem, StateVector};
use crate::propagator::DiagonalPropagator;

pub const DEFAULT_POINTS: usize = 512;
pub const DEFAULT_HALF_LENGTH: f64 = 30.0;

/// `a sech(a(x - vt)) exp(i(vx - (v² - a²)t/2))`.
pub fn soliton_exact(amplitude: f64, velocity: f64, x: f64, t: f64) -> Complex64 {
    let envelope = amplitude / (amplitude * (x - velocity * t)).cosh();
    let phase = velocity * x - 0.5 * (velocity * velocity - amplitude * amplitude) * t;
    Complex64::from_polar(envelope, phase)
}

pub struct NlsProblem {
    grid: Arc<UniformGrid>,
    propagator: DiagonalPropagator,
    amplitude: f64,
    velocity: f64,
    counter: EvalCounter,
}

impl NlsProblem {
    pub fn new(grid: Arc<UniformGrid>, amplitude: f64, velocity: f64) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite() && velocity.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "soliton needs positive amplitude and finite velocity, got a = {amplitude}, v = {velocity}"
            )));
        }
        let propagator = DiagonalPropagator::kinetic(&grid);
        Ok(Self { grid, propagator, amplitude, velocity, counter: EvalCounter::default() })
    }

    /// `a = 1`, `v = 1` on `M = 512`, `L = 30`.
    pub fn standard() -> Self {
        let grid = UniformGrid::new(DEFAULT_POINTS, DEFAULT_HALF_LENGTH).expect("valid default grid");
        Self::new(grid, 1.0, 1.0).expect("valid default soliton")
    }

    pub fn grid(&self) -> &Arc<UniformGrid> {
        &self.grid
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    /// The soliton sampled at time `t`.
    pub fn exact(&self, t: f64) -> GridFunction {
        GridFunction::from_fn(&self.grid, |x| soliton_exact(self.amplitude, self.velocity, x, t))
    }

    /// Largest soliton amplitude on the two boundary points over `[0, t_end]`.
    pub fn boundary_amplitude(&self, t_end: f64) -> f64 {
        let l = self.grid.half_length();
        let far = (l - self.velocity.abs() * t_end).max(0.0);
        self.amplitude / (self.amplitude * far).cosh()
    }

    /// `½‖∂ₓu‖² - ½∫|u|⁴`.
    pub fn energy(&self, u: &GridFunction) -> f64 {
        let coeffs = u.to_frequency();
        let scale = 1.0 / (2.0 * self.grid.half_length());
        let kinetic: f64 =
            coeffs.iter().zip(self.grid.wavenumbers()).map(|(c, k)| k * k * c.norm_sqr()).sum::<f64>() * scale;
        let quartic: f64 = u.values().iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() * self.grid.spacing();
        0.5 * kinetic - 0.5 * quartic
    }

    /// Mass `‖u‖²`.
    pub fn mass(&self, u: &GridFunction) -> f64 {
        u.norm_sqr()
    }
}

impl SemilinearProblem for NlsProblem {
    type State = GridFunction;

    fn linear_flow(&self, t: f64, u: &GridFunction) -> GridFunction {
        self.propagator.apply_exp(t, u)
    }

    fn linear_phi(&self, k: usize, h: f64, u: &GridFunction) -> GridFunction {
        self.propagator.phi_apply(k, h, u)
    }

    fn linear_apply(&self, u: &GridFunction) -> GridFunction {
        self.propagator.apply_operator(u)
    }

    fn nonlinearity(&self, _t: f64, u: &GridFunction) -> GridFunction {
        let mut out = u.clone();
        for v in out.values_mut() {
            *v *= Complex64::new(0.0, v.norm_sqr());
        }
        out
    }

    fn counter(&self) -> &EvalCounter {
        &self.counter
    }

    fn observe(&self, _t: f64, u: &GridFunction, with_energy: bool) -> Observables {
        Observables { norm: u.norm(), energy: with_energy.then(|| self.energy(u)) }
    }
}

/// Error `‖u - u_exact(t)‖` at time `t`.
pub fn soliton_error(problem: &NlsProblem, t: f64, u: &GridFunction) -> f64 {
    let mut d = u.clone();
    StateVector::axpy(&mut d, -1.0, &problem.exact(t));
    d.norm()
}
