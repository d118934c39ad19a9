//! Exponential Adams and Adams–Lawson multistep methods, with PECE mode.
//!
//! A history holds `(tᵢ, 𝒝ᵢ)` for the `k` most recent accepted steps. The step
//! functions here are pure: they never touch the history. After a step is
//! accepted the caller evaluates 𝒝 at the accepted state and pushes it
//! ([`MultistepHistory::push`]), which is the final "E" of PECE.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::interp::{adams_weights, exponential_adams_coefficients, milne_factor};
use crate::onestep::krogstad_step;
use crate::problem::{SemilinearProblem, StateVector};

pub const MAX_STEPS: usize = 8;
/// Krogstad sub-steps per macro step during startup.
pub const STARTUP_SUBSTEPS: usize = 50;

#[derive(Debug, Clone)]
pub struct MultistepHistory<S> {
    entries: VecDeque<(f64, S)>,
    order: usize,
}

impl<S: StateVector> MultistepHistory<S> {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_STEPS {
            return Err(Error::InvalidArgument(format!("step number must be in 1..={MAX_STEPS}, got {order}")));
        }
        Ok(Self { entries: VecDeque::with_capacity(order + 1), order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() == self.order
    }

    /// Append an accepted evaluation; the oldest entry is dropped once `k` are stored.
    pub fn push(&mut self, t: f64, b: S) -> Result<()> {
        if let Some(&(last, _)) = self.entries.back() {
            if !(t > last) {
                return Err(Error::InvalidArgument(format!("history time {t} does not exceed {last}")));
            }
        }
        self.entries.push_back((t, b));
        if self.entries.len() > self.order {
            self.entries.pop_front();
        }
        Ok(())
    }

    /// Node times, oldest first.
    pub fn times(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn latest_time(&self) -> Option<f64> {
        self.entries.back().map(|e| e.0)
    }

    /// Entries oldest first.
    pub fn entries(&self) -> impl DoubleEndedIterator<Item = &(f64, S)> {
        self.entries.iter()
    }

    fn require_full(&self, t: f64) -> Result<()> {
        if !self.is_full() {
            return Err(Error::InsufficientHistory { needed: self.order, have: self.entries.len() });
        }
        let last = self.latest_time().unwrap();
        if (last - t).abs() > 1e-12 * t.abs().max(1.0) {
            return Err(Error::InvalidArgument(format!("history ends at {last}, step starts at {t}")));
        }
        Ok(())
    }

    /// Check equal spacing `h` between all nodes (required for exponential Adams).
    fn require_equidistant(&self, h: f64) -> Result<()> {
        let times = self.times();
        for w in times.windows(2) {
            let spacing = w[1] - w[0];
            if (spacing - h).abs() > 1e-9 * h.abs() {
                return Err(Error::NonEquidistantHistory { spacing, step: h });
            }
        }
        Ok(())
    }
}

/// `Σⱼ φⱼ₊₁(hA) [Σᵢ coef[i][j] vᵢ]` for states `vᵢ`.
fn exponential_quadrature<P: SemilinearProblem>(
    problem: &P,
    h: f64,
    coef: &[Vec<f64>],
    values: &[&P::State],
) -> P::State {
    let degree = coef.iter().map(|c| c.len()).max().unwrap_or(0);
    let mut acc: Option<P::State> = None;
    for j in 0..degree {
        let mut combo: Option<P::State> = None;
        for (i, v) in values.iter().enumerate() {
            let c = coef[i].get(j).copied().unwrap_or(0.0);
            if c == 0.0 {
                continue;
            }
            match combo.as_mut() {
                Some(s) => s.axpy(c, v),
                None => {
                    let mut s = (*v).clone();
                    s.scale(c.into());
                    combo = Some(s);
                }
            }
        }
        if let Some(combo) = combo {
            let term = problem.phi_apply_a(j + 1, h, &combo);
            match acc.as_mut() {
                Some(a) => a.axpy(1.0, &term),
                None => acc = Some(term),
            }
        }
    }
    acc.unwrap_or_else(|| values[0].zeros_like())
}

/// Explicit exponential Adams–Bashforth step (constant step sizes only).
pub fn exp_ab_step<P: SemilinearProblem>(
    problem: &P,
    history: &MultistepHistory<P::State>,
    t: f64,
    h: f64,
    u: &P::State,
) -> Result<P::State> {
    history.require_full(t)?;
    history.require_equidistant(h)?;
    let k = history.order();
    // newest first: s = 0, -1, ..., -(k-1)
    let nodes: Vec<f64> = (0..k).map(|i| -(i as f64)).collect();
    let coef = exponential_adams_coefficients(&nodes)?;
    let values: Vec<&P::State> = history.entries().rev().map(|e| &e.1).collect();
    let mut out = problem.apply_exp_a(h, u);
    out.axpy(h, &exponential_quadrature(problem, h, &coef, &values));
    finite(out, t + h)
}

/// Exponential AB predictor, evaluation, exponential AM corrector (order k+1).
pub fn exp_pece_step<P: SemilinearProblem>(
    problem: &P,
    history: &MultistepHistory<P::State>,
    t: f64,
    h: f64,
    u: &P::State,
) -> Result<(P::State, f64)> {
    let predicted = exp_ab_step(problem, history, t, h, u)?;
    let b_pred = problem.eval_b(t + h, &predicted)?;
    let k = history.order();
    let mut nodes = vec![1.0];
    nodes.extend((0..k).map(|i| -(i as f64)));
    let coef = exponential_adams_coefficients(&nodes)?;
    let mut values: Vec<&P::State> = vec![&b_pred];
    values.extend(history.entries().rev().map(|e| &e.1));
    let mut corrected = problem.apply_exp_a(h, u);
    corrected.axpy(h, &exponential_quadrature(problem, h, &coef, &values));
    let corrected = finite(corrected, t + h)?;
    let estimate = milne_estimate(k, &corrected, &predicted);
    Ok((corrected, estimate))
}

fn milne_estimate<S: StateVector>(k: usize, corrected: &S, predicted: &S) -> f64 {
    let mut diff = corrected.clone();
    diff.axpy(-1.0, predicted);
    milne_factor(k) * diff.norm()
}

/// `Σᵢ wᵢ e^{(t_next - tᵢ)A} 𝒝ᵢ` over the history.
fn lawson_sum<P: SemilinearProblem>(
    problem: &P,
    history: &MultistepHistory<P::State>,
    weights: &[f64],
    t_next: f64,
) -> P::State {
    let mut acc: Option<P::State> = None;
    for ((ti, bi), &w) in history.entries().zip(weights) {
        let mut term = problem.apply_exp_a(t_next - ti, bi);
        term.scale(w.into());
        match acc.as_mut() {
            Some(a) => a.axpy(1.0, &term),
            None => acc = Some(term),
        }
    }
    acc.expect("history is non-empty")
}

/// Adams–Lawson explicit step; nodes may be non-equidistant.
pub fn lawson_ab_step<P: SemilinearProblem>(
    problem: &P,
    history: &MultistepHistory<P::State>,
    t: f64,
    h: f64,
    u: &P::State,
) -> Result<P::State> {
    history.require_full(t)?;
    let t_next = t + h;
    let w = adams_weights(&history.times(), t_next, false)?;
    let mut out = problem.apply_exp_a(h, u);
    out.axpy(h, &lawson_sum(problem, history, &w.past, t_next));
    finite(out, t_next)
}

/// Adams–Lawson PECE step: AB-k predictor, AM corrector through the forward node.
pub fn lawson_pece_step<P: SemilinearProblem>(
    problem: &P,
    history: &MultistepHistory<P::State>,
    t: f64,
    h: f64,
    u: &P::State,
) -> Result<(P::State, f64)> {
    let predicted = lawson_ab_step(problem, history, t, h, u)?;
    let t_next = t + h;
    let b_pred = problem.eval_b(t_next, &predicted)?;
    let w = adams_weights(&history.times(), t_next, true)?;
    let mut corrected = problem.apply_exp_a(h, u);
    corrected.axpy(h, &lawson_sum(problem, history, &w.past, t_next));
    corrected.axpy(h * w.forward.unwrap(), &b_pred);
    let corrected = finite(corrected, t_next)?;
    let estimate = milne_estimate(history.order(), &corrected, &predicted);
    Ok((corrected, estimate))
}

fn finite<S: StateVector>(u: S, t: f64) -> Result<S> {
    if u.is_finite() {
        Ok(u)
    } else {
        Err(Error::BlowUp { t })
    }
}

/// Result of [`startup`]: a filled history and the state at its newest node.
#[derive(Debug, Clone)]
pub struct Startup<S> {
    pub history: MultistepHistory<S>,
    pub t: f64,
    pub state: S,
    /// States at the generated nodes `t₁, …, t_{k-1}`.
    pub nodes: Vec<(f64, S)>,
}

/// Fill a `k`-step history by Krogstad sub-stepping with step `h/50`.
pub fn startup<P: SemilinearProblem>(
    problem: &P,
    t0: f64,
    h: f64,
    u0: &P::State,
    k: usize,
) -> Result<Startup<P::State>> {
    let mut history = MultistepHistory::new(k)?;
    history.push(t0, problem.eval_b(t0, u0)?)?;
    let mut state = u0.clone();
    let mut t = t0;
    let sub = h / STARTUP_SUBSTEPS as f64;
    let mut nodes = Vec::with_capacity(k.saturating_sub(1));
    for i in 1..k {
        let t_start = t0 + (i - 1) as f64 * h;
        for j in 0..STARTUP_SUBSTEPS {
            state = krogstad_step(problem, t_start + j as f64 * sub, sub, &state)?;
        }
        t = t0 + i as f64 * h;
        history.push(t, problem.eval_b(t, &state)?)?;
        nodes.push((t, state.clone()));
    }
    Ok(Startup { history, t, state, nodes })
}
