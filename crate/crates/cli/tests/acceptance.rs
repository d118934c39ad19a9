//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test --release -p expint-cli --test acceptance`; pass criterion
//! ids (e.g. `A6 A8`) after `--` to run a subset.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use common::brute::brute_force;
use common::classical::{classical_multistep, classical_rk4, random_system, zero_a};
use common::{c, phi_quadrature, random_state, rel_diff};
use expint::adaptive::one_step;
use expint::analysis::{loglog_interpolate, median};
use expint::mctdhf::{HeliumModel, HeliumParams, MctdhfState};
use expint::nls::NlsProblem;
use expint::phi::{inv_factorial, phi_all, phi_scalar};
use expint::{integrate, Complex64, Method, RunOptions, SemilinearProblem, StepMode, UniformGrid};
use expint_cli::commands::{
    adaptive_trace, estimator_ratios, max_energy_drift, measured_b_evals_per_step, min_accepted_step,
    order_study, reference_solution, stability_scan, work_precision, ORDER_METHODS,
};
use expint_cli::problems::{compute_ground_state, helium_model, state_distance};
use expint_cli::{RunConfig, Settings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn helium_config(extra: &str) -> RunConfig {
    RunConfig::from_settings(&Settings::parse(&format!("problem = helium\n{extra}")).unwrap()).unwrap()
}

/// Ground state of H₀ on the default grid with N = 2, shared by A4, A5, A7 and A8.
fn ground() -> &'static MctdhfState {
    static GROUND: OnceLock<MctdhfState> = OnceLock::new();
    GROUND.get_or_init(|| compute_ground_state(&helium_config("")).expect("ground state").state)
}

fn log_spaced(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn a1() -> Verdict {
    let mut worst: f64 = 0.0;
    for (i, y) in log_spaced(200, 1e-3, 1e3).into_iter().enumerate() {
        let z = c(0.0, if i % 2 == 0 { y } else { -y });
        for k in 0..=6 {
            let exact = phi_quadrature(k, z);
            worst = worst.max((phi_scalar(k as i64, z).unwrap() - exact).norm() / exact.norm());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut residual: f64 = 0.0;
    for _ in 0..2000 {
        let z = Complex64::from_polar(rng.gen_range(0.5..50.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let all = phi_all(7, z);
        for k in 0..=6 {
            let r = (all[k + 1] - (all[k] - inv_factorial(k)) / z).norm() / all[k + 1].norm().max(1.0);
            residual = residual.max(r);
        }
    }
    verdict(
        worst <= 1e-11 && residual <= 1e-13,
        format!("quadrature error {worst:.2e} (≤ 1e-11), recurrence residual {residual:.2e} (≤ 1e-13)"),
    )
}

fn a2() -> Verdict {
    const H: f64 = 0.05;
    const STEPS: usize = 20;
    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let (p, u0) = random_system(seed, zero_a());
        for method in [Method::Krogstad, Method::LawsonRk4] {
            let (mut u, mut reference) = (u0.clone(), u0.clone());
            for n in 0..STEPS {
                let t = n as f64 * H;
                u = one_step(&p, method, t, H, &u).unwrap();
                reference = classical_rk4(&p, t, H, &reference);
                worst = worst.max(rel_diff(&u, &reference));
            }
        }
        for k in 1..=5 {
            for method in [Method::ExpAb(k), Method::LawsonAb(k), Method::ExpPece(k), Method::LawsonPece(k)] {
                let (p, u0) = random_system(seed, zero_a());
                let opts = RunOptions { keep_states: true, ..Default::default() };
                let run = integrate(&p, method, 0.0, STEPS as f64 * H, &u0, &StepMode::Fixed { steps: STEPS }, opts);
                if run.failure.is_some() {
                    return verdict(false, format!("{method} failed: {:?}", run.failure));
                }
                let (q, _) = random_system(seed, zero_a());
                let reference = classical_multistep(&q, k, method.has_error_estimate(), H, STEPS, &run.trajectory[..k]);
                worst = worst.max(rel_diff(&run.state, &reference));
            }
        }
    }
    verdict(worst <= 1e-12, format!("worst relative deviation from classical RK4/AB/PECE {worst:.2e} (≤ 1e-12)"))
}

fn a3() -> Verdict {
    const T: f64 = 95.0;
    let model = HeliumModel::new(UniformGrid::new(32, 10.0).unwrap(), 2, HeliumParams::default()).unwrap();
    let (mut coeff, mut orb, mut energy): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for seed in 0..20 {
        let s = random_state(&model, &mut ChaCha8Rng::seed_from_u64(seed));
        let brute = brute_force(&model, &s, T);
        let b = model.nonlinearity(T, &s);
        coeff = coeff.max(rel_diff(b.coeffs.as_slice(), brute.coeffs.as_slice()));
        for (got, want) in b.orbitals.iter().zip(&brute.orbitals) {
            orb = orb.max(rel_diff(got.values(), want));
        }
        energy = energy.max((model.energy(&s, T) - brute.energy).abs() / brute.energy.abs());
    }
    verdict(
        coeff.max(orb).max(energy) <= 1e-10,
        format!("coefficients {coeff:.2e}, orbitals {orb:.2e}, energy {energy:.2e} (all ≤ 1e-10)"),
    )
}

fn a4() -> Verdict {
    let cfg = helium_config("laser = off");
    let model = helium_model(&cfg).unwrap();
    let opts = RunOptions { record_energy: true, ..Default::default() };
    let run = integrate(&model, Method::LawsonPece(4), 0.0, 100.0, ground(), &StepMode::Fixed { steps: 2000 }, opts);
    if let Some(e) = run.failure {
        return verdict(false, format!("run failed: {e}"));
    }
    let norm = run.report.max_norm_drift();
    let energy = max_energy_drift(&run.report).unwrap();
    verdict(
        norm <= 1e-8 && energy <= 1e-6,
        format!("lawson-pece:4, n = 2000, t = 100: norm drift {norm:.2e} (≤ 1e-8), energy drift {energy:.2e} (≤ 1e-6)"),
    )
}

fn a5() -> Verdict {
    let cfg = helium_config("laser = off");
    let ladder: Vec<usize> = (1..=12).map(|i| 1000 * i).collect();
    let rows = stability_scan(&cfg, ground(), &[Method::Rk4, Method::LawsonPece(4)], &ladder, 100.0).unwrap();
    let drift = |m: Method, n: usize| rows.iter().find(|r| r.method == m && r.steps == n).unwrap().max_norm_drift;
    let witness = ladder.iter().find(|&&n| drift(Method::Rk4, n) > 1e-2 && drift(Method::LawsonPece(4), n) <= 1e-6);
    let table: Vec<String> = ladder
        .iter()
        .map(|&n| format!("{n}: {:.1e}/{:.1e}", drift(Method::Rk4, n), drift(Method::LawsonPece(4), n)))
        .collect();
    verdict(
        witness.is_some(),
        format!("witness n = {witness:?}; rk4/lawson-pece:4 drift by n: {}", table.join(", ")),
    )
}

fn a6() -> Verdict {
    let cfg = RunConfig::from_settings(&Settings::parse("problem = nls").unwrap()).unwrap();
    let fits = order_study(&cfg, &ORDER_METHODS, None).unwrap();
    let detail: Vec<String> = fits
        .iter()
        .map(|f| format!("{} {:.2}/{}{}", f.method, f.slope, f.nominal, if f.passes() { "" } else { " ✗" }))
        .collect();
    verdict(fits.iter().all(|f| f.passes()), format!("slope/nominal: {}", detail.join(", ")))
}

/// The laser envelope is at least a tenth of its peak.
fn pulse_active(params: &HeliumParams, t: f64) -> bool {
    params.envelope(t) >= 0.1 * params.envelope_peak
}

fn a7() -> Verdict {
    let cfg = helium_config("tol = 1e-5");
    let clock = Instant::now();
    let (model, run) = adaptive_trace(&cfg, ground()).unwrap();
    let run_time = clock.elapsed().as_secs_f64();
    if let Some(e) = &run.failure {
        return verdict(false, format!("adaptive run failed: {e}"));
    }
    let n = run.report.accepted_steps;
    let (reference, _) = reference_solution(&cfg, ground(), 20 * n, 80.0).unwrap();
    let error = state_distance(&run.state, &reference);
    let (t_min, h_min) = min_accepted_step(&run.report).unwrap();
    let inside = pulse_active(model.params(), t_min);
    let stride = (n / 200).max(1);
    let ratios = estimator_ratios(&model, &run, 100, stride).unwrap();
    let quality = median(&ratios);
    let (lo, hi) = (
        run.report.accepted().skip(1).map(|r| r.h).fold(f64::MAX, f64::min),
        run.report.accepted().map(|r| r.h).fold(0.0, f64::max),
    );
    verdict(
        error <= 1e-4 && inside && (0.1..=10.0).contains(&quality),
        format!(
            "completed in {run_time:.1} s with {n} steps ({} rejected, h in [{lo:.3e}, {hi:.3e}]); \
             error vs 20× reference {error:.2e} (≤ 1e-4); min step {h_min:.3e} at t = {t_min:.2} \
             ({} the pulse window); median est/true {quality:.3} over {} steps (in [0.1, 10])",
            run.report.rejected_steps,
            if inside { "inside" } else { "outside" },
            ratios.len()
        ),
    )
}

fn a8() -> Verdict {
    let expected = [
        (Method::Strang, 4.0),
        (Method::Suzuki4, 20.0),
        (Method::Yoshida4, 12.0),
        (Method::Krogstad, 4.0),
        (Method::LawsonRk4, 4.0),
        (Method::Rk4, 4.0),
        (Method::ExpAb(3), 1.0),
        (Method::LawsonAb(4), 1.0),
        (Method::ExpPece(3), 2.0),
        (Method::LawsonPece(5), 2.0),
    ];
    let p = NlsProblem::standard();
    let mismatched: Vec<String> = expected
        .iter()
        .filter_map(|&(m, want)| {
            let got = measured_b_evals_per_step(&p, m, &p.exact(0.0), 1e-3).unwrap();
            (got != want || m.b_evals_per_step() as f64 != want).then(|| format!("{m}: {got} ≠ {want}"))
        })
        .collect();

    let cfg = helium_config("");
    let ladder = [1000, 2000, 4000, 8000, 16000];
    let (reference, _) = reference_solution(&cfg, ground(), 20 * 16000, 80.0).unwrap();
    let rows = work_precision(&cfg, ground(), &reference, &[Method::Strang, Method::LawsonPece(5)], &ladder, 80.0).unwrap();
    let strang: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.method == Method::Strang).map(|r| (r.b_evals as f64, r.error)).collect();
    let mut compared = Vec::new();
    let mut ok = true;
    for r in rows.iter().filter(|r| r.method == Method::LawsonPece(5) && (1e-8..=1e-3).contains(&r.error)) {
        let s = loglog_interpolate(&strang, r.b_evals as f64);
        ok &= r.error <= s;
        compared.push(format!("{} evals: {:.2e} vs strang {:.2e}", r.b_evals, r.error, s));
    }
    verdict(
        mismatched.is_empty() && ok && !compared.is_empty(),
        format!(
            "cost audit {}; lawson-pece:5 vs strang at equal B-evals: {}",
            if mismatched.is_empty() { "matches the table".to_string() } else { mismatched.join(", ") },
            compared.join("; ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Verdict); 8] = [
        ("A1", "phi-functions", a1),
        ("A2", "classical reduction", a2),
        ("A3", "MCTDHF oracle", a3),
        ("A4", "conservation", a4),
        ("A5", "stability contrast", a5),
        ("A6", "orders", a6),
        ("A7", "adaptivity", a7),
        ("A8", "cost model", a8),
    ];
    let selected: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !selected.is_empty() && !selected.iter().any(|s| s == id) {
            continue;
        }
        let clock = Instant::now();
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!v.pass);
        println!("{id} {status} {name} ({:.1} s): {}", clock.elapsed().as_secs_f64(), v.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
