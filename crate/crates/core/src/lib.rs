//! Exponential-type time integrators for semilinear Schrödinger equations
//! `i∂ₜu = Au + B(u)`.
//!
//! Integrators are written in real-time form `u' = 𝒜u + 𝒝(t, u)` against the
//! [`SemilinearProblem`] contract. The two bundled problems are a cubic NLS
//! soliton ([`nls`]) and a 1D helium model treated with MCTDHF ([`mctdhf`]).

pub mod adaptive;
pub mod analysis;
pub mod error;
pub mod grid;
pub mod interp;
pub mod mctdhf;
pub mod method;
pub mod nls;
pub mod multistep;
pub mod onestep;
pub mod phi;
pub mod problem;
pub mod propagator;

pub use adaptive::{integrate, ControllerConfig, Run, RunOptions, RunReport, StepMode, StepRecord};
pub use error::{Error, Result};
pub use grid::{inner, GridFunction, UniformGrid};
pub use method::Method;
pub use multistep::MultistepHistory;
pub use problem::{DiagonalProblem, EvalCounter, Observables, SemilinearProblem, StateVector};
pub use propagator::{kinetic_propagator, DiagonalPropagator, PhiTable};

pub use num_complex::Complex64;
