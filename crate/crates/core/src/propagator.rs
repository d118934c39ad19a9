//! Diagonal linear operators: e^{tA} and φₖ(hA) as Fourier multipliers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::grid::{GridFunction, UniformGrid};
use crate::phi::phi_all;

/// Bound on the number of cached tables before the cache is flushed.
const CACHE_LIMIT: usize = 256;

/// Rows φ₀(hλ_m), …, φ_{k_max}(hλ_m) for one step `h`.
#[derive(Debug, Clone)]
pub struct PhiTable {
    step: f64,
    rows: Vec<Vec<Complex64>>,
}

impl PhiTable {
    pub fn new(eigenvalues: &[Complex64], step: f64, order: usize) -> Self {
        let mut rows = vec![Vec::with_capacity(eigenvalues.len()); order + 1];
        for &lambda in eigenvalues {
            for (k, v) in phi_all(order, lambda * step).into_iter().enumerate() {
                rows[k].push(v);
            }
        }
        Self { step, rows }
    }

    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        &self.rows[k]
    }
}

/// Spectrum `λ_m` of a linear operator that is diagonal in the chosen basis.
#[derive(Debug)]
pub struct DiagonalPropagator {
    eigenvalues: Vec<Complex64>,
    exp_cache: Mutex<HashMap<u64, Arc<Vec<Complex64>>>>,
    phi_cache: Mutex<HashMap<u64, Arc<PhiTable>>>,
}

impl Clone for DiagonalPropagator {
    fn clone(&self) -> Self {
        Self::new(self.eigenvalues.clone())
    }
}

impl DiagonalPropagator {
    pub fn new(eigenvalues: Vec<Complex64>) -> Self {
        Self {
            eigenvalues,
            exp_cache: Mutex::new(HashMap::new()),
            phi_cache: Mutex::new(HashMap::new()),
        }
    }

    /// The free kinetic operator: `λ_m = -i k_m²/2`, the flow of `i∂ₜφ = -½∂ₓ²φ`.
    pub fn kinetic(grid: &UniformGrid) -> Self {
        Self::new(grid.wavenumbers().iter().map(|k| Complex64::new(0.0, -0.5 * k * k)).collect())
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `e^{tλ_m}`, cached by the bit pattern of `t`.
    pub fn exp_multiplier(&self, t: f64) -> Arc<Vec<Complex64>> {
        let key = t.to_bits();
        let mut cache = self.exp_cache.lock().unwrap();
        if let Some(m) = cache.get(&key) {
            return m.clone();
        }
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        let m = Arc::new(self.eigenvalues.iter().map(|l| (l * t).exp()).collect::<Vec<_>>());
        cache.insert(key, m.clone());
        m
    }

    /// Table of φ₀..φ_{order} at step `h`, cached by the bit pattern of `h`.
    pub fn phi_table(&self, order: usize, h: f64) -> Arc<PhiTable> {
        let key = h.to_bits();
        let mut cache = self.phi_cache.lock().unwrap();
        if let Some(t) = cache.get(&key) {
            if t.order() >= order {
                return t.clone();
            }
        }
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        // Build a few orders ahead so that multistep methods hit the cache.
        let table = Arc::new(PhiTable::new(&self.eigenvalues, h, order.max(8)));
        cache.insert(key, table.clone());
        table
    }

    /// `φₖ(hλ_m)` as a multiplier row.
    pub fn phi_multiplier(&self, k: usize, h: f64) -> Vec<Complex64> {
        self.phi_table(k, h).row(k).to_vec()
    }

    /// `e^{tA} f` for a grid function whose spectrum is indexed like the grid's FFT order.
    pub fn apply_exp(&self, t: f64, f: &GridFunction) -> GridFunction {
        if t == 0.0 {
            return f.clone();
        }
        let m = self.exp_multiplier(t);
        let values = f.grid().apply_multiplier(&m, f.values()).expect("propagator matches grid");
        f.with_values(values)
    }

    /// `φₖ(hA) f`.
    pub fn phi_apply(&self, k: usize, h: f64, f: &GridFunction) -> GridFunction {
        let table = self.phi_table(k, h);
        let values = f.grid().apply_multiplier(table.row(k), f.values()).expect("propagator matches grid");
        f.with_values(values)
    }

    /// `A f` (spectral multiplication by λ).
    pub fn apply_operator(&self, f: &GridFunction) -> GridFunction {
        let values = f.grid().apply_multiplier(&self.eigenvalues, f.values()).expect("propagator matches grid");
        f.with_values(values)
    }
}

/// Shorthand for [`DiagonalPropagator::kinetic`].
pub fn kinetic_propagator(grid: &UniformGrid) -> DiagonalPropagator {
    DiagonalPropagator::kinetic(grid)
}
