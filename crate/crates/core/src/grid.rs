//! Uniform periodic 1D grids, grid functions and their Fourier transforms.
//!
//! The domain is `[-L, L)` sampled at `x_n = -L + n dx`, `dx = 2L/M`. The
//! frequency coefficients are normalized as
//!
//! ```text
//! ĉ_m = Σ_n f_n exp(-i k_m x_n) dx,      f_n = (1/2L) Σ_m ĉ_m exp(i k_m x_n),
//! ```
//!
//! so that Parseval reads `‖f‖² = (1/2L) Σ |ĉ_m|²`. Wavenumbers `k_m = π m / L`
//! are stored in FFT order (`m = 0, 1, …, M/2-1, -M/2, …, -1`).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub struct UniformGrid {
    num_points: usize,
    half_length: f64,
    spacing: f64,
    points: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for UniformGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UniformGrid")
            .field("num_points", &self.num_points)
            .field("half_length", &self.half_length)
            .finish()
    }
}

impl PartialEq for UniformGrid {
    fn eq(&self, other: &Self) -> bool {
        self.num_points == other.num_points && self.half_length == other.half_length
    }
}

impl UniformGrid {
    /// Build a grid of `num_points` (a power of two, at least 8) on `[-half_length, half_length)`.
    pub fn new(num_points: usize, half_length: f64) -> Result<Arc<Self>> {
        if num_points < 8 || !num_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "number of points must be a power of two >= 8, got {num_points}"
            )));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!("half length must be positive, got {half_length}")));
        }
        let spacing = 2.0 * half_length / num_points as f64;
        let points = (0..num_points).map(|n| -half_length + n as f64 * spacing).collect();
        let half = num_points as i64 / 2;
        let wavenumbers = (0..num_points as i64)
            .map(|j| {
                let m = if j < half { j } else { j - num_points as i64 };
                std::f64::consts::PI * m as f64 / half_length
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(num_points);
        let inverse = planner.plan_fft_inverse(num_points);
        Ok(Arc::new(Self {
            num_points,
            half_length,
            spacing,
            points,
            wavenumbers,
            forward,
            inverse,
        }))
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Sample positions `x_n`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Signed mode index of FFT slot `j`.
    fn mode_index(&self, j: usize) -> i64 {
        let half = self.num_points / 2;
        if j < half {
            j as i64
        } else {
            j as i64 - self.num_points as i64
        }
    }

    /// Forward transform with the normalization documented at module level.
    pub fn to_frequency(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(values.len())?;
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        // exp(-i k_m x_0) = exp(i π m) = (-1)^m
        for (j, c) in buf.iter_mut().enumerate() {
            let sign = if self.mode_index(j) % 2 == 0 { 1.0 } else { -1.0 };
            *c *= sign * self.spacing;
        }
        Ok(buf)
    }

    /// Inverse of [`UniformGrid::to_frequency`].
    pub fn to_space_values(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(coeffs.len())?;
        let scale = 1.0 / (2.0 * self.half_length);
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let sign = if self.mode_index(j) % 2 == 0 { 1.0 } else { -1.0 };
                c * (sign * scale)
            })
            .collect();
        self.inverse.process(&mut buf);
        Ok(buf)
    }

    /// Multiply the Fourier coefficients of `values` by `multiplier` and transform back.
    pub fn apply_multiplier(&self, multiplier: &[Complex64], values: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(multiplier.len())?;
        let mut coeffs = self.to_frequency(values)?;
        for (c, m) in coeffs.iter_mut().zip(multiplier) {
            *c *= m;
        }
        self.to_space_values(&coeffs)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_points {
            return Err(Error::LengthMismatch { expected: self.num_points, got: len });
        }
        Ok(())
    }
}

/// A complex function sampled on a [`UniformGrid`].
#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Arc<UniformGrid>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Arc<UniformGrid>, values: Vec<Complex64>) -> Result<Self> {
        grid.check_len(values.len())?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Arc<UniformGrid>) -> Self {
        Self { grid: grid.clone(), values: vec![Complex64::new(0.0, 0.0); grid.num_points()] }
    }

    /// Sample `f(x)` at the grid points.
    pub fn from_fn(grid: &Arc<UniformGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Arc<UniformGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Replace values, keeping the grid. Used internally where lengths are known to match.
    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { grid: self.grid.clone(), values }
    }

    /// `dx Σ |f|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.grid.spacing() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        same_grid(self, other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect()))
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: Complex64, other: &GridFunction) {
        debug_assert!(*self.grid == *other.grid);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: Complex64) {
        for v in &mut self.values {
            *v *= alpha;
        }
    }

    pub fn to_frequency(&self) -> Vec<Complex64> {
        self.grid.to_frequency(&self.values).expect("length checked at construction")
    }

    pub fn to_space(grid: &Arc<UniformGrid>, coeffs: &[Complex64]) -> Result<GridFunction> {
        let values = grid.to_space_values(coeffs)?;
        Ok(GridFunction { grid: grid.clone(), values })
    }
}

fn same_grid(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if Arc::ptr_eq(&f.grid, &g.grid) || *f.grid == *g.grid {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Discrete L² inner product `dx Σ conj(f) g`, conjugate-linear in `f`.
pub fn inner(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    same_grid(f, g)?;
    Ok(inner_unchecked(f, g))
}

pub(crate) fn inner_unchecked(f: &GridFunction, g: &GridFunction) -> Complex64 {
    let s: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum();
    s * f.grid.spacing()
}

/// Fourier transform of a convolution kernel sampled as `V(x_m)` on the grid.
///
/// The sample at `x_m` is read as the value at displacement `x_m`, so the kernel is
/// periodized over `[-L, L)`.
pub fn kernel_transform(kernel: &GridFunction) -> Vec<Complex64> {
    kernel.to_frequency()
}

/// `g(x_m) = Σ_n V(x_m - y_n) ρ(y_n) dx` with periodic wrap-around, by frequency-space multiplication.
pub fn convolve_potential(
    grid: &Arc<UniformGrid>,
    kernel: &GridFunction,
    density: &GridFunction,
) -> Result<GridFunction> {
    if *kernel.grid != **grid {
        return Err(Error::GridMismatch);
    }
    convolve_with_transform(&kernel_transform(kernel), density)
}

/// Convolution with a precomputed kernel transform (see [`kernel_transform`]).
pub fn convolve_with_transform(kernel_hat: &[Complex64], density: &GridFunction) -> Result<GridFunction> {
    density.grid.apply_multiplier(kernel_hat, &density.values).map(|v| density.with_values(v))
}
