//! Step-size control and the integration driver.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::method::Method;
use crate::multistep::{
    exp_ab_step, exp_pece_step, lawson_ab_step, lawson_pece_step, startup, MultistepHistory,
};
use crate::onestep::{krogstad_step, lawson_rk4_step, rk4_step, splitting_step, CompositionScheme};
use crate::problem::{SemilinearProblem, StateVector};

/// Consecutive rejections after which the multistep history is rebuilt.
pub const RESTART_AFTER_REJECTIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    /// Absolute local tolerance on the composite norm.
    pub tol: f64,
    pub safety: f64,
    pub fac_min: f64,
    pub fac_max: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Initial step; chosen automatically when `None`.
    pub h0: Option<f64>,
}

impl ControllerConfig {
    pub fn new(tol: f64) -> Self {
        Self { tol, safety: 0.9, fac_min: 0.2, fac_max: 5.0, h_min: 1e-10, h_max: f64::INFINITY, h0: None }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.tol > 0.0
            && 0.0 < self.fac_min
            && self.fac_min < 1.0
            && self.fac_max > 1.0
            && self.safety > 0.0
            && self.h_min >= 0.0
            && self.h_max > self.h_min
            && self.h0.is_none_or(|h| h > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid controller configuration {self:?}")))
        }
    }

    /// Step-size factor `clamp(safety (tol/err)^{1/(p+1)}, fac_min, fac_max)`.
    pub fn factor(&self, err: f64, order: usize) -> f64 {
        if err <= 0.0 {
            return self.fac_max;
        }
        let raw = self.safety * (self.tol / err).powf(1.0 / (order as f64 + 1.0));
        raw.clamp(self.fac_min, self.fac_max)
    }
}

/// Per-step telemetry.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// Time reached (accepted) or attempted target time (rejected).
    pub t: f64,
    pub h: f64,
    /// NaN when the step has no estimate.
    pub err_est: f64,
    pub accepted: bool,
    pub b_evals_cum: u64,
    pub norm_drift: f64,
    pub energy: Option<f64>,
    pub wall_ns: u128,
}

#[derive(Debug, Clone)]
pub enum StepMode {
    Fixed { steps: usize },
    Adaptive(ControllerConfig),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Evaluate the energy at every accepted step.
    pub record_energy: bool,
    /// Keep every accepted state in [`Run::trajectory`].
    pub keep_states: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub records: Vec<StepRecord>,
    pub b_evals: u64,
    pub exp_applications: u64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub restarts: usize,
}

impl RunReport {
    pub fn max_norm_drift(&self) -> f64 {
        self.records.iter().filter(|r| r.accepted).map(|r| r.norm_drift).fold(0.0, f64::max)
    }

    pub fn accepted(&self) -> impl Iterator<Item = &StepRecord> {
        self.records.iter().filter(|r| r.accepted)
    }
}

/// Outcome of [`integrate`]: the last good state, the report, and the failure if any.
#[derive(Debug, Clone)]
pub struct Run<S> {
    pub t: f64,
    pub state: S,
    pub report: RunReport,
    pub failure: Option<Error>,
    /// Accepted `(t, u)` including the initial state; empty unless requested.
    pub trajectory: Vec<(f64, S)>,
}

impl<S> Run<S> {
    pub fn into_result(self) -> Result<(S, RunReport)> {
        match self.failure {
            Some(e) => Err(e),
            None => Ok((self.state, self.report)),
        }
    }
}

/// One step of a one-step method.
pub fn one_step<P: SemilinearProblem>(
    problem: &P,
    method: Method,
    t: f64,
    h: f64,
    u: &P::State,
) -> Result<P::State> {
    match method {
        Method::Rk4 => rk4_step(problem, t, h, u),
        Method::Krogstad => krogstad_step(problem, t, h, u),
        Method::LawsonRk4 => lawson_rk4_step(problem, t, h, u),
        Method::Strang | Method::Suzuki4 | Method::Yoshida4 => {
            let scheme: CompositionScheme = method.composition().unwrap();
            splitting_step(problem, &scheme, t, h, u)
        }
        m => Err(Error::InvalidArgument(format!("{m} is a multistep method"))),
    }
}

/// A multistep method bound to its history.
pub struct MultistepStepper<S> {
    method: Method,
    history: MultistepHistory<S>,
}

/// An attempted multistep step awaiting accept/reject.
#[derive(Debug, Clone)]
pub struct Attempt<S> {
    pub h: f64,
    pub state: S,
    pub err_est: Option<f64>,
}

impl<S: StateVector> MultistepStepper<S> {
    /// Run the startup procedure from `(t0, u0)` with macro step `h`.
    ///
    /// Returns the stepper and the generated nodes `(tᵢ, uᵢ)`, `i = 1..k-1`.
    pub fn start<P: SemilinearProblem<State = S>>(
        problem: &P,
        method: Method,
        t0: f64,
        h: f64,
        u0: &S,
    ) -> Result<(Self, Vec<(f64, S)>)> {
        let k = method
            .steps()
            .ok_or_else(|| Error::InvalidArgument(format!("{method} is not a multistep method")))?;
        let s = startup(problem, t0, h, u0, k)?;
        Ok((Self { method, history: s.history }, s.nodes))
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn history(&self) -> &MultistepHistory<S> {
        &self.history
    }

    /// Compute a step without changing the history.
    pub fn attempt<P: SemilinearProblem<State = S>>(&self, problem: &P, t: f64, h: f64, u: &S) -> Result<Attempt<S>> {
        let (state, err_est) = match self.method {
            Method::ExpAb(_) => (exp_ab_step(problem, &self.history, t, h, u)?, None),
            Method::LawsonAb(_) => (lawson_ab_step(problem, &self.history, t, h, u)?, None),
            Method::ExpPece(_) => {
                let (s, e) = exp_pece_step(problem, &self.history, t, h, u)?;
                (s, Some(e))
            }
            Method::LawsonPece(_) => {
                let (s, e) = lawson_pece_step(problem, &self.history, t, h, u)?;
                (s, Some(e))
            }
            m => return Err(Error::InvalidArgument(format!("{m} is not a multistep method"))),
        };
        Ok(Attempt { h, state, err_est })
    }

    /// Accept a step ending at `t_new`: evaluate 𝒝 there and push it.
    pub fn accept<P: SemilinearProblem<State = S>>(&mut self, problem: &P, t_new: f64, state: &S) -> Result<()> {
        let b = problem.eval_b(t_new, state)?;
        self.history.push(t_new, b)
    }
}

/// Controller state carried between steps.
#[derive(Debug, Clone)]
pub struct Controller {
    pub config: ControllerConfig,
    pub h: f64,
    /// Order `p` in the exponent `1/(p+1)`.
    pub order: usize,
    pub consecutive_rejections: usize,
}

impl Controller {
    pub fn new(config: ControllerConfig, h: f64, order: usize) -> Result<Self> {
        config.validate()?;
        Ok(Self { h: h.min(config.h_max), config, order, consecutive_rejections: 0 })
    }
}

/// Result of [`controlled_step`].
#[derive(Debug, Clone)]
pub enum Control<S> {
    Accepted(Attempt<S>),
    /// Too many consecutive rejections; the history must be rebuilt.
    RestartRequired,
}

/// A rejected attempt: target time, step and estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rejection {
    pub t: f64,
    pub h: f64,
    pub err_est: f64,
}

fn lands_on(t: f64, t_end: f64) -> bool {
    (t_end - t).abs() <= 1e-12 * t_end.abs().max(1.0)
}

/// Attempt steps from `(t, u)` until one is accepted, updating the controller.
///
/// Accept iff `err_est <= tol`. The history is never modified here; the caller
/// accepts through [`MultistepStepper::accept`].
pub fn controlled_step<P: SemilinearProblem>(
    problem: &P,
    stepper: &MultistepStepper<P::State>,
    controller: &mut Controller,
    t: f64,
    u: &P::State,
    t_end: f64,
    rejections: &mut Vec<Rejection>,
) -> Result<Control<P::State>> {
    loop {
        let mut h = controller.h;
        let clipped = t + h >= t_end || lands_on(t + h, t_end);
        if clipped {
            h = t_end - t;
        }
        if h < controller.config.h_min && !clipped {
            return Err(Error::ToleranceUnattainable { t, h, h_min: controller.config.h_min });
        }
        let attempt = stepper.attempt(problem, t, h, u)?;
        let err = attempt.err_est.ok_or_else(|| Error::NoErrorEstimator(stepper.method().to_string()))?;
        let h_next = (h * controller.config.factor(err, controller.order)).min(controller.config.h_max);
        if err <= controller.config.tol {
            controller.consecutive_rejections = 0;
            // a clipped final step says nothing about the natural step size
            if !clipped || h_next < controller.h {
                controller.h = h_next;
            }
            return Ok(Control::Accepted(attempt));
        }
        rejections.push(Rejection { t: t + h, h, err_est: err });
        controller.consecutive_rejections += 1;
        controller.h = h_next;
        if controller.h < controller.config.h_min {
            return Err(Error::ToleranceUnattainable { t, h: controller.h, h_min: controller.config.h_min });
        }
        if controller.consecutive_rejections >= RESTART_AFTER_REJECTIONS {
            controller.consecutive_rejections = 0;
            return Ok(Control::RestartRequired);
        }
    }
}

struct Recorder<'a, P: SemilinearProblem> {
    problem: &'a P,
    norm0: f64,
    options: RunOptions,
    clock: Instant,
    report: RunReport,
    trajectory: Vec<(f64, P::State)>,
}

impl<'a, P: SemilinearProblem> Recorder<'a, P> {
    fn new(problem: &'a P, t0: f64, u0: &P::State, options: RunOptions) -> Self {
        let obs = problem.observe(t0, u0, options.record_energy);
        let b0 = problem.counter().b_evals();
        let trajectory = if options.keep_states { vec![(t0, u0.clone())] } else { Vec::new() };
        let mut rec = Self {
            problem,
            norm0: obs.norm,
            options,
            clock: Instant::now(),
            report: RunReport::default(),
            trajectory,
        };
        rec.report.records.push(StepRecord {
            step: 0,
            t: t0,
            h: 0.0,
            err_est: f64::NAN,
            accepted: true,
            b_evals_cum: b0,
            norm_drift: 0.0,
            energy: obs.energy,
            wall_ns: 0,
        });
        rec
    }

    fn accepted(&mut self, t: f64, h: f64, err: Option<f64>, u: &P::State) {
        let obs = self.problem.observe(t, u, self.options.record_energy);
        self.report.accepted_steps += 1;
        let record = StepRecord {
            step: self.report.accepted_steps,
            t,
            h,
            err_est: err.unwrap_or(f64::NAN),
            accepted: true,
            b_evals_cum: self.problem.counter().b_evals(),
            norm_drift: (obs.norm - self.norm0).abs(),
            energy: obs.energy,
            wall_ns: self.clock.elapsed().as_nanos(),
        };
        self.report.records.push(record);
        if self.options.keep_states {
            self.trajectory.push((t, u.clone()));
        }
    }

    fn rejected(&mut self, r: Rejection) {
        self.report.rejected_steps += 1;
        let record = StepRecord {
            step: self.report.accepted_steps,
            t: r.t,
            h: r.h,
            err_est: r.err_est,
            accepted: false,
            b_evals_cum: self.problem.counter().b_evals(),
            norm_drift: f64::NAN,
            energy: None,
            wall_ns: self.clock.elapsed().as_nanos(),
        };
        self.report.records.push(record);
    }

    fn finish(mut self) -> (RunReport, Vec<(f64, P::State)>) {
        self.report.b_evals = self.problem.counter().b_evals();
        self.report.exp_applications = self.problem.counter().exp_applications();
        (self.report, self.trajectory)
    }
}

/// Integrate from `t0` to `t_end` with fixed or adaptive steps.
///
/// Fixed mode uses `h = (t_end - t0)/steps` and lands on `t_end` exactly.
/// Adaptive mode requires a method with an error estimate and clips the last step.
/// Multistep methods are started with [`startup`].
pub fn integrate<P: SemilinearProblem>(
    problem: &P,
    method: Method,
    t0: f64,
    t_end: f64,
    u0: &P::State,
    mode: &StepMode,
    options: RunOptions,
) -> Run<P::State> {
    let mut rec = Recorder::new(problem, t0, u0, options);
    let mut t = t0;
    let mut state = u0.clone();
    let outcome = match mode {
        StepMode::Fixed { steps } => fixed_loop(problem, method, t_end, *steps, &mut t, &mut state, &mut rec),
        StepMode::Adaptive(cfg) => adaptive_loop(problem, method, t_end, cfg, &mut t, &mut state, &mut rec),
    };
    let (report, trajectory) = rec.finish();
    Run { t, state, report, failure: outcome.err(), trajectory }
}

fn fixed_loop<P: SemilinearProblem>(
    problem: &P,
    method: Method,
    t_end: f64,
    steps: usize,
    t: &mut f64,
    state: &mut P::State,
    rec: &mut Recorder<'_, P>,
) -> Result<()> {
    let t0 = *t;
    if t_end < t0 {
        return Err(Error::InvalidArgument(format!("t_end = {t_end} precedes t0 = {t0}")));
    }
    if steps == 0 || t_end == t0 {
        return Ok(());
    }
    let h = (t_end - t0) / steps as f64;
    let time_at = |n: usize| if n == steps { t_end } else { t0 + n as f64 * h };

    if !method.is_multistep() {
        for n in 1..=steps {
            *state = one_step(problem, method, *t, h, state)?;
            *t = time_at(n);
            rec.accepted(*t, h, None, state);
        }
        return Ok(());
    }

    let k = method.steps().unwrap();
    if k > steps + 1 {
        return Err(Error::InvalidArgument(format!("{steps} steps are too few for {method}")));
    }
    let (mut stepper, nodes) = MultistepStepper::start(problem, method, t0, h, state)?;
    for (tn, un) in nodes {
        rec.accepted(tn, h, None, &un);
        *t = tn;
        *state = un;
    }
    for n in k..=steps {
        let attempt = stepper.attempt(problem, *t, h, state)?;
        let t_new = time_at(n);
        stepper.accept(problem, t_new, &attempt.state)?;
        *t = t_new;
        *state = attempt.state;
        rec.accepted(*t, h, attempt.err_est, state);
    }
    Ok(())
}

/// Automatic initial step from the Lawson-frame derivative (Hairer–Wanner style).
///
/// Costs two evaluations of 𝒝.
pub fn initial_step<P: SemilinearProblem>(
    problem: &P,
    t0: f64,
    u0: &P::State,
    order: usize,
    tol: f64,
    h_max: f64,
) -> Result<f64> {
    let f0 = problem.eval_b(t0, u0)?;
    let d0 = u0.norm() / tol;
    let d1 = f0.norm() / tol;
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(h_max);
    let mut v1 = u0.clone();
    v1.axpy(h0, &f0);
    let u1 = problem.apply_exp_a(h0, &v1);
    let f1 = problem.apply_exp_a(-h0, &problem.eval_b(t0 + h0, &u1)?);
    let mut df = f1;
    df.axpy(-1.0, &f0);
    let d2 = df.norm() / tol / h0;
    let d12 = d1.max(d2);
    let h1 = if d12 <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d12).powf(1.0 / (order as f64 + 1.0)) };
    Ok((100.0 * h0).min(h1).min(h_max))
}

fn adaptive_loop<P: SemilinearProblem>(
    problem: &P,
    method: Method,
    t_end: f64,
    config: &ControllerConfig,
    t: &mut f64,
    state: &mut P::State,
    rec: &mut Recorder<'_, P>,
) -> Result<()> {
    config.validate()?;
    if !method.has_error_estimate() {
        return Err(Error::NoErrorEstimator(method.to_string()));
    }
    if !method.supports_variable_steps() {
        return Err(Error::InvalidArgument(format!("{method} requires constant step sizes")));
    }
    if t_end < *t {
        return Err(Error::InvalidArgument(format!("t_end = {t_end} precedes t0 = {}", *t)));
    }
    if t_end == *t {
        return Ok(());
    }
    let order = method.nominal_order();
    let h0 = match config.h0 {
        Some(h) => h,
        None => initial_step(problem, *t, state, order, config.tol, config.h_max)?,
    };
    let mut controller = Controller::new(config.clone(), h0, order)?;
    let mut stepper = restart(problem, method, t, state, t_end, &mut controller, rec)?;
    let mut rejections = Vec::new();
    while *t < t_end {
        rejections.clear();
        let control = controlled_step(problem, &stepper, &mut controller, *t, state, t_end, &mut rejections);
        for r in rejections.drain(..) {
            rec.rejected(r);
        }
        match control? {
            Control::Accepted(attempt) => {
                let t_new = if lands_on(*t + attempt.h, t_end) { t_end } else { *t + attempt.h };
                stepper.accept(problem, t_new, &attempt.state)?;
                *t = t_new;
                *state = attempt.state;
                rec.accepted(*t, attempt.h, attempt.err_est, state);
            }
            Control::RestartRequired => {
                rec.report.restarts += 1;
                stepper = restart(problem, method, t, state, t_end, &mut controller, rec)?;
            }
        }
    }
    Ok(())
}

/// Rebuild the history from `(t, state)` at the controller's current step.
fn restart<P: SemilinearProblem>(
    problem: &P,
    method: Method,
    t: &mut f64,
    state: &mut P::State,
    t_end: f64,
    controller: &mut Controller,
    rec: &mut Recorder<'_, P>,
) -> Result<MultistepStepper<P::State>> {
    let k = method.steps().unwrap();
    // leave room for at least one controlled step after startup
    let h = controller.h.min((t_end - *t) / k as f64);
    if h < controller.config.h_min {
        return Err(Error::ToleranceUnattainable { t: *t, h, h_min: controller.config.h_min });
    }
    controller.h = h;
    let (stepper, nodes) = MultistepStepper::start(problem, method, *t, h, state)?;
    for (tn, un) in nodes {
        rec.accepted(tn, h, None, &un);
        *t = tn;
        *state = un;
    }
    Ok(stepper)
}
