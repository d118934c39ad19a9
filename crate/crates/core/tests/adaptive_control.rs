mod common;

use common::c;
use expint::adaptive::one_step;
use expint::analysis::median;
use expint::multistep::STARTUP_SUBSTEPS;
use expint::nls::{soliton_error, NlsProblem};
use expint::{
    integrate, Complex64, ControllerConfig, DiagonalProblem, Error, GridFunction, Method, RunOptions, SemilinearProblem,
    StateVector, StepMode,
};

fn adaptive_nls(method: Method, tol: f64) -> (NlsProblem, expint::Run<GridFunction>) {
    let p = NlsProblem::standard();
    let u0 = p.exact(0.0);
    let run = integrate(
        &p,
        method,
        0.0,
        1.0,
        &u0,
        &StepMode::Adaptive(ControllerConfig::new(tol)),
        RunOptions { keep_states: true, ..Default::default() },
    );
    assert!(run.failure.is_none(), "{method} tol={tol}: {:?}", run.failure);
    (p, run)
}

#[test]
fn adaptive_error_is_within_ten_tolerances() {
    for method in [Method::LawsonPece(3), Method::LawsonPece(4), Method::LawsonPece(5)] {
        for tol in [1e-4, 1e-5, 1e-6, 1e-7] {
            let (p, run) = adaptive_nls(method, tol);
            let err = soliton_error(&p, 1.0, &run.state);
            assert!(err <= 10.0 * tol, "{method} tol={tol}: error {err:e}");
        }
    }
}

#[test]
fn tightening_the_tolerance_never_increases_the_error() {
    for method in [Method::LawsonPece(2), Method::LawsonPece(4)] {
        let errors: Vec<f64> = [1e-3, 1e-4, 1e-5, 1e-6]
            .iter()
            .map(|&tol| {
                let (p, run) = adaptive_nls(method, tol);
                soliton_error(&p, 1.0, &run.state)
            })
            .collect();
        assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{method}: {errors:?}");
    }
}

#[test]
fn accepted_estimates_respect_the_tolerance_and_the_last_step_lands() {
    let tol = 1e-6;
    let (_, run) = adaptive_nls(Method::LawsonPece(4), tol);
    let accepted: Vec<_> = run.report.accepted().collect();
    assert!(accepted.iter().filter(|r| !r.err_est.is_nan()).all(|r| r.err_est <= tol));
    assert!(run.report.records.iter().filter(|r| !r.accepted).all(|r| r.err_est > tol));
    assert_eq!(run.t, 1.0);
    assert!((accepted.last().unwrap().t - 1.0).abs() <= 1e-12);
    let total: f64 = accepted.iter().map(|r| r.h).sum();
    assert!((total - 1.0).abs() <= 1e-12);
}

#[test]
fn estimator_tracks_the_true_local_error() {
    let (p, run) = adaptive_nls(Method::LawsonPece(4), 1e-7);
    let records: Vec<_> = run.report.accepted().collect();
    let mut ratios = Vec::new();
    for i in 1..records.len() {
        if records[i].err_est.is_nan() {
            continue;
        }
        let (t0, ref u) = run.trajectory[i - 1];
        let h = records[i].h;
        let mut local = u.clone();
        for s in 0..100 {
            local = one_step(&p, Method::LawsonRk4, t0 + s as f64 * h / 100.0, h / 100.0, &local).unwrap();
        }
        StateVector::axpy(&mut local, -1.0, &run.trajectory[i].1);
        ratios.push(records[i].err_est / local.norm());
    }
    let m = median(&ratios);
    assert!((0.1..=10.0).contains(&m), "median estimate/true = {m}");
}

fn linear_only() -> DiagonalProblem<impl Fn(f64, &[Complex64]) -> Vec<Complex64>> {
    DiagonalProblem::new(vec![c(0.0, -1.0), c(0.0, 2.0)], |_, u: &[Complex64]| vec![c(0.0, 0.0); u.len()])
}

#[test]
fn vanishing_estimate_grows_the_step_by_the_cap() {
    let p = linear_only();
    let mut cfg = ControllerConfig::new(1e-8);
    cfg.h0 = Some(1e-3);
    let run = integrate(&p, Method::LawsonPece(2), 0.0, 10.0, &vec![c(1.0, 0.0), c(0.0, 1.0)], &StepMode::Adaptive(cfg), RunOptions::default());
    assert!(run.failure.is_none());
    let hs: Vec<f64> = run.report.accepted().filter(|r| !r.err_est.is_nan()).map(|r| r.h).collect();
    assert_eq!(hs[0], 1e-3);
    // each unclipped controlled step is five times the previous one
    assert!((hs[1] / hs[0] - 5.0).abs() < 1e-12);
    assert!((hs[2] / hs[1] - 5.0).abs() < 1e-12);
}

#[test]
fn tolerance_unattainable_is_reported() {
    let p = NlsProblem::standard();
    let mut cfg = ControllerConfig::new(1e-12);
    cfg.h_min = 1e-2;
    cfg.h0 = Some(0.05);
    let run = integrate(&p, Method::LawsonPece(3), 0.0, 1.0, &p.exact(0.0), &StepMode::Adaptive(cfg), RunOptions::default());
    assert!(matches!(run.failure, Some(Error::ToleranceUnattainable { .. })), "{:?}", run.failure);
}

#[test]
fn methods_without_estimates_are_rejected() {
    let p = NlsProblem::standard();
    for method in [Method::Strang, Method::ExpAb(3), Method::LawsonAb(3)] {
        let run = integrate(&p, method, 0.0, 1.0, &p.exact(0.0), &StepMode::Adaptive(ControllerConfig::new(1e-6)), RunOptions::default());
        assert!(matches!(run.failure, Some(Error::NoErrorEstimator(_))), "{method}");
    }
    // plain exponential Adams weights assume constant steps
    let run = integrate(&p, Method::ExpPece(3), 0.0, 1.0, &p.exact(0.0), &StepMode::Adaptive(ControllerConfig::new(1e-6)), RunOptions::default());
    assert!(matches!(run.failure, Some(Error::InvalidArgument(_))));
}

#[test]
fn zero_length_interval_returns_the_initial_state() {
    let p = NlsProblem::standard();
    let u0 = p.exact(0.0);
    for mode in [StepMode::Fixed { steps: 10 }, StepMode::Adaptive(ControllerConfig::new(1e-6))] {
        let run = integrate(&p, Method::LawsonPece(3), 0.0, 0.0, &u0, &mode, RunOptions::default());
        assert!(run.failure.is_none());
        assert_eq!(run.state.values(), u0.values());
        assert_eq!(p.counter().b_evals(), 0);
    }
}

#[test]
fn blow_up_is_detected_and_the_last_good_state_kept() {
    // classical RK4 well beyond its stability boundary on a stiff linear part
    let p = DiagonalProblem::new(vec![c(0.0, -400.0)], |_, u: &[Complex64]| u.iter().map(|v| c(0.0, 1.0) * v).collect());
    let run = integrate(&p, Method::Rk4, 0.0, 100.0, &vec![c(1.0, 0.0)], &StepMode::Fixed { steps: 100 }, RunOptions::default());
    assert!(matches!(run.failure, Some(Error::BlowUp { .. })));
    assert!(run.state.is_finite());
    assert!(run.t < 100.0);
}

#[test]
fn evaluation_counts_match_the_cost_table() {
    let steps = 40;
    let table = [
        ("rk4", 4),
        ("strang", 4),
        ("suzuki4", 20),
        ("yoshida4", 12),
        ("etdrk4-krogstad", 4),
        ("lawson-rk4", 4),
        ("exp-ab:3", 1),
        ("lawson-ab:4", 1),
        ("exp-pece:3", 2),
        ("lawson-pece:2", 2),
        ("lawson-pece:5", 2),
    ];
    for (name, per_step) in table {
        let method: Method = name.parse().unwrap();
        assert_eq!(method.b_evals_per_step(), per_step, "{name}");
        // mild enough for classical RK4
        let p = DiagonalProblem::new(vec![c(0.0, -1.0), c(0.0, 2.0)], |_, u: &[Complex64]| {
            u.iter().map(|v| c(0.0, v.norm_sqr()) * v).collect()
        });
        let u0 = vec![c(1.0, 0.0), c(0.5, 0.5)];
        let run = integrate(&p, method, 0.0, 0.5, &u0, &StepMode::Fixed { steps }, RunOptions::default());
        assert!(run.failure.is_none());
        let total = run.report.b_evals;
        let expected = match method.steps() {
            None => per_step * steps as u64,
            // one evaluation at t₀, then Krogstad sub-steps and one evaluation per startup node
            Some(k) => {
                let startup = 1 + (k as u64 - 1) * (4 * STARTUP_SUBSTEPS as u64 + 1);
                startup + per_step * (steps + 1 - k) as u64
            }
        };
        assert_eq!(total, expected, "{name}");
    }
}
