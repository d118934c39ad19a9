//! The harness commands. Each builds its tables and summary; [`Outcome::write`] stores them.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, ensure, Result};
use expint::analysis::fit_order;
use expint::mctdhf::{HeliumModel, MctdhfState};
use expint::nls::{soliton_error, NlsProblem};
use expint::{integrate, Error, Method, Run, RunOptions, RunReport, SemilinearProblem, StepMode};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ProblemKind, RunConfig};
use crate::output::{float, step_table, Summary, Table};
use crate::problems::{
    compute_ground_state, helium_model, initial_state, load_reference, nls_problem, save_state, state_distance,
};

/// Files produced by one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Option<(PathBuf, Table)>,
    pub summary_path: PathBuf,
    pub summary: Summary,
}

impl Outcome {
    pub fn write(&self) -> Result<()> {
        if let Some((path, table)) = &self.table {
            table.write(path)?;
        }
        self.summary.write(&self.summary_path)
    }

    /// Diagnostic for a nonzero exit, if the command failed.
    pub fn failure(&self) -> Option<&str> {
        self.summary.failure.as_deref()
    }
}

fn outcome(cfg: &RunConfig, command: &str, table: Table, summary: Summary) -> Outcome {
    let csv = cfg.out.clone().unwrap_or_else(|| PathBuf::from(format!("{command}.csv")));
    let summary_path = csv.with_extension("json");
    Outcome { table: Some((csv, table)), summary_path, summary }
}

fn base_summary(cfg: &RunConfig, command: &str, t_end: f64) -> Summary {
    Summary {
        command: command.into(),
        problem: cfg.problem.to_string(),
        t_end,
        grid: cfg.grid,
        domain: cfg.domain,
        orbitals: (cfg.problem == ProblemKind::Helium).then_some(cfg.orbitals),
        seed: cfg.seed,
        ..Default::default()
    }
}

fn fill_report(summary: &mut Summary, report: &RunReport) {
    summary.accepted_steps = report.accepted_steps;
    summary.rejected_steps = report.rejected_steps;
    summary.restarts = report.restarts;
    summary.b_evals = report.b_evals;
    summary.exp_applications = report.exp_applications;
    summary.max_norm_drift = Some(report.max_norm_drift());
    summary.max_energy_drift = max_energy_drift(report);
}

/// `max |E(t) - E(0)|` over accepted steps, when energies were recorded.
pub fn max_energy_drift(report: &RunReport) -> Option<f64> {
    let mut energies = report.accepted().filter_map(|r| r.energy);
    let e0 = energies.next()?;
    Some(energies.fold(0.0, |m, e| m.max((e - e0).abs())))
}

/// Run `f` on the configured number of threads (`0` uses the global pool).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(f))
}

fn with_energy() -> RunOptions {
    RunOptions { record_energy: true, ..Default::default() }
}

/// One integration with per-step CSV output.
pub fn cmd_run(cfg: &RunConfig) -> Result<Outcome> {
    let method = cfg.method_or(Method::LawsonPece(4));
    let t_end = cfg.t_end_or(80.0);
    let mode = cfg.step_mode()?;
    let mut summary = base_summary(cfg, "run", t_end);
    summary.method = Some(method.to_string());
    summary.steps = cfg.steps;
    summary.tol = cfg.tol;
    let clock = Instant::now();
    let report = match cfg.problem {
        ProblemKind::Nls => {
            let p = nls_problem(cfg)?;
            let run = integrate(&p, method, 0.0, t_end, &p.exact(0.0), &mode, with_energy());
            summary.final_error = Some(soliton_error(&p, run.t, &run.state));
            finish(&mut summary, run)
        }
        ProblemKind::Helium => {
            let u0 = initial_state(cfg)?;
            let model = helium_model(cfg)?;
            let run = integrate(&model, method, 0.0, t_end, &u0, &mode, with_energy());
            if cfg.reference.is_some() && run.failure.is_none() {
                summary.final_error = Some(state_distance(&run.state, &load_reference(cfg, t_end)?));
            }
            finish(&mut summary, run)
        }
    };
    summary.wall_seconds = clock.elapsed().as_secs_f64();
    Ok(outcome(cfg, "run", step_table(&report.records), summary))
}

fn finish<S>(summary: &mut Summary, run: Run<S>) -> RunReport {
    fill_report(summary, &run.report);
    summary.failure = run.failure.map(|e| e.to_string());
    run.report
}

/// One `(method, n)` entry of a stability scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub method: Method,
    pub steps: usize,
    /// `∞` on blow-up.
    pub max_norm_drift: f64,
    pub final_norm_drift: f64,
    pub b_evals: u64,
    pub blew_up: bool,
}

pub const SCAN_HEADER: &str = "method,steps,max_norm_drift,final_norm_drift,b_evals,status";

/// Every module identifier at its default step number.
pub const SCAN_METHODS: [Method; 10] = [
    Method::Rk4,
    Method::Strang,
    Method::Suzuki4,
    Method::Yoshida4,
    Method::Krogstad,
    Method::LawsonRk4,
    Method::ExpAb(4),
    Method::ExpPece(4),
    Method::LawsonAb(4),
    Method::LawsonPece(4),
];

pub fn scan_ladder() -> Vec<usize> {
    (1..=12).map(|i| 1000 * i).collect()
}

/// Fixed-step propagation of `u0` for every `(method, n)`, in parallel, sorted by key.
pub fn stability_scan(
    cfg: &RunConfig,
    u0: &MctdhfState,
    methods: &[Method],
    ladder: &[usize],
    t_end: f64,
) -> Result<Vec<ScanRow>> {
    let jobs: Vec<(Method, usize)> = methods.iter().flat_map(|&m| ladder.iter().map(move |&n| (m, n))).collect();
    let mut rows = with_threads(cfg.threads, || {
        jobs.par_iter()
            .map(|&(method, steps)| -> Result<ScanRow> {
                let model = helium_model(cfg)?;
                let run = integrate(&model, method, 0.0, t_end, u0, &StepMode::Fixed { steps }, RunOptions::default());
                let blew_up = match run.failure {
                    Some(Error::BlowUp { .. }) => true,
                    Some(e) => bail!("{method}, n = {steps}: {e}"),
                    None => false,
                };
                let last = run.report.records.last().map_or(0.0, |r| r.norm_drift);
                let (max, last) = if blew_up { (f64::INFINITY, f64::INFINITY) } else { (run.report.max_norm_drift(), last) };
                Ok(ScanRow {
                    method,
                    steps,
                    max_norm_drift: max,
                    final_norm_drift: last,
                    b_evals: run.report.b_evals,
                    blew_up,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    rows.sort_by_key(|r| (r.method, r.steps));
    Ok(rows)
}

pub fn cmd_stability_scan(cfg: &RunConfig) -> Result<Outcome> {
    ensure!(cfg.problem == ProblemKind::Helium, "stability-scan propagates the helium ground state");
    let t_end = cfg.t_end_or(100.0);
    let methods = cfg.methods_or(&SCAN_METHODS);
    let ladder = cfg.step_list_or(&scan_ladder());
    let clock = Instant::now();
    let u0 = initial_state(cfg)?;
    // the ground state of H₀ is propagated without the field
    let cfg = RunConfig { field_amplitude: 0.0, ..cfg.clone() };
    let rows = stability_scan(&cfg, &u0, &methods, &ladder, t_end)?;
    let mut table = Table::new(SCAN_HEADER);
    for r in &rows {
        table.row(&[
            r.method.to_string(),
            r.steps.to_string(),
            float(r.max_norm_drift),
            float(r.final_norm_drift),
            r.b_evals.to_string(),
            if r.blew_up { "blow-up" } else { "ok" }.to_string(),
        ]);
    }
    let mut summary = base_summary(&cfg, "stability-scan", t_end);
    summary.b_evals = rows.iter().map(|r| r.b_evals).sum();
    summary.wall_seconds = clock.elapsed().as_secs_f64();
    summary.details.insert("runs".into(), json!(rows.len()));
    summary.details.insert("blow_ups".into(), json!(rows.iter().filter(|r| r.blew_up).count()));
    Ok(outcome(&cfg, "stability-scan", table, summary))
}

/// One `(method, n)` entry of a work/precision ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkRow {
    pub method: Method,
    pub steps: usize,
    pub b_evals: u64,
    /// `∞` on blow-up.
    pub error: f64,
    pub wall_ns: u128,
}

pub const WORK_HEADER: &str = "method,steps,b_evals,error,wall_ns,status";

pub const WORK_METHODS: [Method; 8] = [
    Method::Strang,
    Method::Yoshida4,
    Method::Suzuki4,
    Method::Krogstad,
    Method::LawsonRk4,
    Method::ExpPece(4),
    Method::LawsonPece(4),
    Method::LawsonPece(5),
];

pub fn work_ladder() -> Vec<usize> {
    vec![1000, 2000, 4000, 8000, 16000]
}

/// Final errors against `reference` at `t_end` for every `(method, n)`, sorted by key.
pub fn work_precision(
    cfg: &RunConfig,
    u0: &MctdhfState,
    reference: &MctdhfState,
    methods: &[Method],
    ladder: &[usize],
    t_end: f64,
) -> Result<Vec<WorkRow>> {
    let jobs: Vec<(Method, usize)> = methods.iter().flat_map(|&m| ladder.iter().map(move |&n| (m, n))).collect();
    let mut rows = with_threads(cfg.threads, || {
        jobs.par_iter()
            .map(|&(method, steps)| -> Result<WorkRow> {
                let model = helium_model(cfg)?;
                let clock = Instant::now();
                let run = integrate(&model, method, 0.0, t_end, u0, &StepMode::Fixed { steps }, RunOptions::default());
                let wall_ns = clock.elapsed().as_nanos();
                let error = match run.failure {
                    Some(Error::BlowUp { .. }) => f64::INFINITY,
                    Some(e) => bail!("{method}, n = {steps}: {e}"),
                    None => state_distance(&run.state, reference),
                };
                Ok(WorkRow { method, steps, b_evals: run.report.b_evals, error, wall_ns })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    rows.sort_by_key(|r| (r.method, r.steps));
    Ok(rows)
}

fn nls_work_precision(cfg: &RunConfig, methods: &[Method], ladder: &[usize], t_end: f64) -> Result<Vec<WorkRow>> {
    let jobs: Vec<(Method, usize)> = methods.iter().flat_map(|&m| ladder.iter().map(move |&n| (m, n))).collect();
    let mut rows = with_threads(cfg.threads, || {
        jobs.par_iter()
            .map(|&(method, steps)| -> Result<WorkRow> {
                let p = nls_problem(cfg)?;
                let clock = Instant::now();
                let run = integrate(&p, method, 0.0, t_end, &p.exact(0.0), &StepMode::Fixed { steps }, RunOptions::default());
                let wall_ns = clock.elapsed().as_nanos();
                let error = match run.failure {
                    Some(Error::BlowUp { .. }) => f64::INFINITY,
                    Some(e) => bail!("{method}, n = {steps}: {e}"),
                    None => soliton_error(&p, t_end, &run.state),
                };
                Ok(WorkRow { method, steps, b_evals: run.report.b_evals, error, wall_ns })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    rows.sort_by_key(|r| (r.method, r.steps));
    Ok(rows)
}

pub fn cmd_work_precision(cfg: &RunConfig) -> Result<Outcome> {
    let t_end = cfg.t_end_or(80.0);
    let methods = cfg.methods_or(&WORK_METHODS);
    let ladder = cfg.step_list_or(&work_ladder());
    let clock = Instant::now();
    let rows = match cfg.problem {
        ProblemKind::Nls => nls_work_precision(cfg, &methods, &ladder, t_end)?,
        ProblemKind::Helium => {
            // fail early, before any expensive ground-state work
            let reference = load_reference(cfg, t_end)?;
            let u0 = initial_state(cfg)?;
            work_precision(cfg, &u0, &reference, &methods, &ladder, t_end)?
        }
    };
    let mut table = Table::new(WORK_HEADER);
    for r in &rows {
        table.row(&[
            r.method.to_string(),
            r.steps.to_string(),
            r.b_evals.to_string(),
            float(r.error),
            r.wall_ns.to_string(),
            if r.error.is_finite() { "ok" } else { "blow-up" }.to_string(),
        ]);
    }
    let mut summary = base_summary(cfg, "work-precision", t_end);
    summary.b_evals = rows.iter().map(|r| r.b_evals).sum();
    summary.wall_seconds = clock.elapsed().as_secs_f64();
    Ok(outcome(cfg, "work-precision", table, summary))
}

pub const REFERENCE_METHOD: Method = Method::LawsonPece(7);

/// `lawson-pece:7` at `reference_factor` times the finest ladder point.
pub fn reference_solution(cfg: &RunConfig, u0: &MctdhfState, steps: usize, t_end: f64) -> Result<(MctdhfState, RunReport)> {
    let model = helium_model(cfg)?;
    let run = integrate(&model, REFERENCE_METHOD, 0.0, t_end, u0, &StepMode::Fixed { steps }, RunOptions::default());
    Ok(run.into_result()?)
}

pub fn cmd_make_reference(cfg: &RunConfig) -> Result<Outcome> {
    ensure!(cfg.problem == ProblemKind::Helium, "references are stored for the helium problem only");
    let t_end = cfg.t_end_or(80.0);
    let finest = cfg.step_list_or(&work_ladder()).into_iter().max().unwrap_or(0);
    let steps = cfg.steps.unwrap_or(cfg.reference_factor * finest);
    ensure!(steps > 0, "reference needs a positive step count");
    let clock = Instant::now();
    let u0 = initial_state(cfg)?;
    let (state, report) = reference_solution(cfg, &u0, steps, t_end)?;
    let path = cfg.reference.clone().unwrap_or_else(|| PathBuf::from("reference.ckpt"));
    save_state(&path, &state, t_end)?;
    let mut summary = base_summary(cfg, "make-reference", t_end);
    summary.method = Some(REFERENCE_METHOD.to_string());
    summary.steps = Some(steps);
    fill_report(&mut summary, &report);
    summary.wall_seconds = clock.elapsed().as_secs_f64();
    summary.details.insert("checkpoint".into(), json!(path.display().to_string()));
    Ok(Outcome { table: None, summary_path: path.with_extension("json"), summary })
}

/// Fitted order of one method on a dyadic ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub method: Method,
    pub steps: Vec<usize>,
    pub errors: Vec<f64>,
    pub b_evals: Vec<u64>,
    pub slope: f64,
    pub nominal: usize,
}

impl OrderFit {
    pub const TOLERANCE: f64 = 0.25;

    pub fn passes(&self) -> bool {
        (self.slope - self.nominal as f64).abs() <= Self::TOLERANCE
    }
}

pub const ORDER_METHODS: [Method; 12] = [
    Method::Strang,
    Method::Suzuki4,
    Method::Yoshida4,
    Method::Krogstad,
    Method::LawsonRk4,
    Method::LawsonPece(2),
    Method::LawsonPece(3),
    Method::LawsonPece(4),
    Method::ExpAb(1),
    Method::ExpAb(2),
    Method::ExpAb(3),
    Method::ExpAb(4),
];

/// A six-level dyadic ladder inside the asymptotic range and above the round-off floor.
pub fn order_ladder(method: Method) -> Vec<usize> {
    let (first, levels) = match method {
        Method::LawsonPece(2) | Method::ExpPece(2) => (32, 6),
        Method::LawsonPece(3) => (16, 6),
        Method::LawsonPece(k) | Method::ExpPece(k) if k >= 5 => (16, 5),
        _ => (8, 6),
    };
    (0..levels).map(|i| first << i).collect()
}

/// Least-squares order of every method on the soliton testbed.
pub fn order_study(cfg: &RunConfig, methods: &[Method], ladder: Option<&[usize]>) -> Result<Vec<OrderFit>> {
    let t_end = cfg.t_end_or(1.0);
    let jobs: Vec<(Method, Vec<usize>)> =
        methods.iter().map(|&m| (m, ladder.map_or_else(|| order_ladder(m), <[usize]>::to_vec))).collect();
    if let Some((m, l)) = jobs.iter().find(|(_, l)| l.len() < 2) {
        bail!("order study of {m} needs at least two step counts, got {l:?}");
    }
    with_threads(cfg.threads, || {
        jobs.par_iter()
            .map(|(method, steps)| -> Result<OrderFit> {
                let mut errors = Vec::with_capacity(steps.len());
                let mut b_evals = Vec::with_capacity(steps.len());
                for &n in steps {
                    let p: NlsProblem = nls_problem(cfg)?;
                    let run = integrate(&p, *method, 0.0, t_end, &p.exact(0.0), &StepMode::Fixed { steps: n }, RunOptions::default());
                    if let Some(e) = run.failure {
                        bail!("{method}, n = {n}: {e}");
                    }
                    errors.push(soliton_error(&p, t_end, &run.state));
                    b_evals.push(run.report.b_evals);
                }
                let slope = fit_order(steps, &errors);
                Ok(OrderFit { method: *method, steps: steps.clone(), errors, b_evals, slope, nominal: method.nominal_order() })
            })
            .collect()
    })?
}

pub fn cmd_order_study(cfg: &RunConfig) -> Result<Outcome> {
    ensure!(cfg.problem == ProblemKind::Nls, "the order study runs on the soliton testbed (problem = nls)");
    let methods = cfg.methods_or(&ORDER_METHODS);
    let ladder = (!cfg.step_list.is_empty()).then_some(cfg.step_list.as_slice());
    let clock = Instant::now();
    let fits = order_study(cfg, &methods, ladder)?;
    let mut table = Table::new("method,steps,error,b_evals");
    for f in &fits {
        for ((n, e), b) in f.steps.iter().zip(&f.errors).zip(&f.b_evals) {
            table.row(&[f.method.to_string(), n.to_string(), float(*e), b.to_string()]);
        }
    }
    let mut summary = base_summary(cfg, "order-study", cfg.t_end_or(1.0));
    summary.wall_seconds = clock.elapsed().as_secs_f64();
    summary.b_evals = fits.iter().flat_map(|f| &f.b_evals).sum();
    let orders: Vec<Value> = fits
        .iter()
        .map(|f| json!({ "method": f.method.to_string(), "slope": f.slope, "nominal": f.nominal, "pass": f.passes() }))
        .collect();
    summary.details.insert("orders".into(), Value::Array(orders));
    let failing: Vec<String> =
        fits.iter().filter(|f| !f.passes()).map(|f| format!("{} slope {:.3} (nominal {})", f.method, f.slope, f.nominal)).collect();
    if !failing.is_empty() {
        summary.failure = Some(format!("observed orders off by more than {}: {}", OrderFit::TOLERANCE, failing.join("; ")));
    }
    Ok(outcome(cfg, "order-study", table, summary))
}

pub const TRACE_HEADER: &str = "step,t,h,field,energy,err_est,accepted,b_evals_cum";

/// Adaptive helium run with a per-attempt trace; the run keeps its accepted states.
pub fn adaptive_trace(cfg: &RunConfig, u0: &MctdhfState) -> Result<(HeliumModel, Run<MctdhfState>)> {
    let method = cfg.method_or(Method::LawsonPece(5));
    let cfg_tol = cfg.tol.unwrap_or(1e-5);
    let controller = cfg.controller(cfg_tol)?;
    let model = helium_model(cfg)?;
    let run = integrate(
        &model,
        method,
        0.0,
        cfg.t_end_or(80.0),
        u0,
        &StepMode::Adaptive(controller),
        RunOptions { record_energy: true, keep_states: true },
    );
    Ok((model, run))
}

/// `(t, h)` of the smallest accepted step, excluding the clipped final step.
pub fn min_accepted_step(report: &RunReport) -> Option<(f64, f64)> {
    let accepted: Vec<_> = report.accepted().filter(|r| !r.err_est.is_nan()).collect();
    let interior = &accepted[..accepted.len().saturating_sub(1)];
    interior.iter().map(|r| (r.t - r.h, r.h)).min_by(|a, b| a.1.total_cmp(&b.1))
}

pub fn cmd_adaptive_trace(cfg: &RunConfig) -> Result<Outcome> {
    ensure!(cfg.problem == ProblemKind::Helium, "adaptive-trace runs the driven helium problem");
    ensure!(cfg.steps.is_none(), "adaptive-trace is adaptive; set tol instead of steps");
    let t_end = cfg.t_end_or(80.0);
    let clock = Instant::now();
    let u0 = initial_state(cfg)?;
    let (model, run) = adaptive_trace(cfg, &u0)?;
    let mut table = Table::new(TRACE_HEADER);
    for r in &run.report.records {
        table.row(&[
            r.step.to_string(),
            float(r.t),
            float(r.h),
            float(model.laser_field(r.t)),
            float(r.energy.unwrap_or(f64::NAN)),
            float(r.err_est),
            u8::from(r.accepted).to_string(),
            r.b_evals_cum.to_string(),
        ]);
    }
    let mut summary = base_summary(cfg, "adaptive-trace", t_end);
    summary.method = Some(cfg.method_or(Method::LawsonPece(5)).to_string());
    summary.tol = Some(cfg.tol.unwrap_or(1e-5));
    fill_report(&mut summary, &run.report);
    if let Some((t, h)) = min_accepted_step(&run.report) {
        summary.details.insert("min_step".into(), json!({ "t": t, "h": h }));
    }
    if cfg.reference.is_some() && run.failure.is_none() {
        summary.final_error = Some(state_distance(&run.state, &load_reference(cfg, t_end)?));
    }
    summary.failure = run.failure.map(|e| e.to_string());
    summary.wall_seconds = clock.elapsed().as_secs_f64();
    Ok(outcome(cfg, "adaptive-trace", table, summary))
}

pub fn cmd_ground_state(cfg: &RunConfig) -> Result<Outcome> {
    ensure!(cfg.problem == ProblemKind::Helium, "ground states are computed for the helium problem");
    let clock = Instant::now();
    let gs = compute_ground_state(cfg)?;
    let path = cfg.ground.clone().unwrap_or_else(|| PathBuf::from("ground.ckpt"));
    save_state(&path, &gs.state, 0.0)?;
    let mut table = Table::new("iteration,energy");
    for (i, e) in gs.energy_trace.iter().enumerate() {
        table.row(&[i.to_string(), float(*e)]);
    }
    let occupations: Vec<f64> = gs.state.density_matrix().symmetric_eigen().eigenvalues.iter().copied().collect();
    let mut summary = base_summary(cfg, "ground-state", 0.0);
    summary.wall_seconds = clock.elapsed().as_secs_f64();
    summary.details.insert("energy".into(), json!(gs.energy));
    summary.details.insert("iterations".into(), json!(gs.iterations));
    summary.details.insert("rejected".into(), json!(gs.rejected));
    summary.details.insert("final_tau".into(), json!(gs.tau));
    summary.details.insert("occupations".into(), json!(occupations));
    summary.details.insert("checkpoint".into(), json!(path.display().to_string()));
    let csv = cfg.out.clone().unwrap_or_else(|| path.with_extension("csv"));
    Ok(Outcome { summary_path: csv.with_extension("json"), table: Some((csv, table)), summary })
}

/// Counter audit: B-evaluations per step after startup, measured on `problem`.
pub fn measured_b_evals_per_step<P: SemilinearProblem>(problem: &P, method: Method, u0: &P::State, h: f64) -> Result<f64> {
    let short = 2 * method.steps().unwrap_or(1).max(1);
    let long = short + 10;
    let count = |steps: usize| -> Result<u64> {
        problem.counter().reset();
        let run = integrate(problem, method, 0.0, h * steps as f64, u0, &StepMode::Fixed { steps }, RunOptions::default());
        run.into_result()?;
        Ok(problem.counter().b_evals())
    };
    let (a, b) = (count(short)?, count(long)?);
    Ok((b - a) as f64 / (long - short) as f64)
}

/// `err_est / true local error` for every `stride`-th estimated step.
///
/// The true local error restarts from the stored pre-step state with
/// `substeps` steps of lawson-rk4 over the same interval.
pub fn estimator_ratios<P: SemilinearProblem>(
    problem: &P,
    run: &Run<P::State>,
    substeps: usize,
    stride: usize,
) -> Result<Vec<f64>> {
    use expint::StateVector;
    let accepted: Vec<_> = run.report.accepted().collect();
    ensure!(accepted.len() == run.trajectory.len(), "the run must keep its accepted states");
    let mut ratios = Vec::new();
    for i in (1..accepted.len()).filter(|i| i % stride.max(1) == 0) {
        let est = accepted[i].err_est;
        if est.is_nan() {
            continue;
        }
        let (t0, u0) = &run.trajectory[i - 1];
        let (t1, u1) = &run.trajectory[i];
        let exact = integrate(problem, Method::LawsonRk4, *t0, *t1, u0, &StepMode::Fixed { steps: substeps }, RunOptions::default())
            .into_result()?
            .0;
        let mut d = u1.clone();
        d.axpy(-1.0, &exact);
        ratios.push(est / d.norm());
    }
    Ok(ratios)
}
