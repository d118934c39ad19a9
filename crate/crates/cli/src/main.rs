use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use expint_cli::commands;
use expint_cli::{Outcome, RunConfig, Settings};

/// Exponential integrators for semilinear Schrödinger equations: experiment harness.
#[derive(Parser)]
#[command(name = "expint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One integration with a per-step CSV.
    Run(Flags),
    /// Long-time norm drift of the H₀ ground state over a step ladder.
    StabilityScan(Flags),
    /// Final error against the stored reference versus B-evaluations.
    WorkPrecision(Flags),
    /// Observed orders on the NLS soliton.
    OrderStudy(Flags),
    /// Adaptive driven helium run with step-size trace.
    AdaptiveTrace(Flags),
    /// Compute and checkpoint the work/precision reference solution.
    MakeReference(Flags),
    /// Relax and checkpoint the helium ground state.
    GroundState(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// nls | helium
    #[arg(long)]
    problem: Option<String>,
    /// Integrator identifier, e.g. lawson-pece:5.
    #[arg(long)]
    method: Option<String>,
    /// Comma-separated identifiers for scans.
    #[arg(long)]
    methods: Option<String>,
    /// Fixed number of steps.
    #[arg(long)]
    steps: Option<String>,
    /// Comma-separated step counts for scans.
    #[arg(long)]
    step_list: Option<String>,
    /// Adaptive tolerance.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    t_end: Option<String>,
    /// Number of grid points M.
    #[arg(long)]
    grid: Option<String>,
    /// Half-length L of the domain [-L, L).
    #[arg(long)]
    domain: Option<String>,
    /// Number of orbitals N.
    #[arg(long)]
    orbitals: Option<String>,
    /// Output CSV path; the JSON summary goes next to it.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads for scans (0 = all cores).
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    h0: Option<String>,
    #[arg(long)]
    h_min: Option<String>,
    #[arg(long)]
    h_max: Option<String>,
    #[arg(long)]
    safety: Option<String>,
    /// Reference checkpoint path.
    #[arg(long)]
    reference: Option<String>,
    /// Ground-state checkpoint path.
    #[arg(long)]
    ground: Option<String>,
    /// Laser on | off.
    #[arg(long)]
    laser: Option<String>,
    /// Any other configuration key, as key=value; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Flags {
    fn settings(&self, default_problem: &str) -> Result<Settings> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        if s.get("problem").is_none() {
            s.set("problem", default_problem)?;
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| anyhow::anyhow!("--set expects KEY=VALUE, got '{kv}'"))?;
            s.set(k.trim(), v.trim())?;
        }
        let flags = [
            ("problem", &self.problem),
            ("method", &self.method),
            ("methods", &self.methods),
            ("steps", &self.steps),
            ("step_list", &self.step_list),
            ("tol", &self.tol),
            ("t_end", &self.t_end),
            ("grid", &self.grid),
            ("domain", &self.domain),
            ("orbitals", &self.orbitals),
            ("out", &self.out),
            ("threads", &self.threads),
            ("h0", &self.h0),
            ("h_min", &self.h_min),
            ("h_max", &self.h_max),
            ("safety", &self.safety),
            ("reference", &self.reference),
            ("ground", &self.ground),
            ("laser", &self.laser),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, v.as_str())?;
            }
        }
        Ok(s)
    }
}

fn execute(command: Command) -> Result<Outcome> {
    let (flags, default_problem, run): (Flags, &str, fn(&RunConfig) -> Result<Outcome>) = match command {
        Command::Run(f) => (f, "helium", commands::cmd_run),
        Command::StabilityScan(f) => (f, "helium", commands::cmd_stability_scan),
        Command::WorkPrecision(f) => (f, "helium", commands::cmd_work_precision),
        Command::OrderStudy(f) => (f, "nls", commands::cmd_order_study),
        Command::AdaptiveTrace(f) => (f, "helium", commands::cmd_adaptive_trace),
        Command::MakeReference(f) => (f, "helium", commands::cmd_make_reference),
        Command::GroundState(f) => (f, "helium", commands::cmd_ground_state),
    };
    let cfg = RunConfig::from_settings(&flags.settings(default_problem)?)?;
    let outcome = run(&cfg)?;
    outcome.write()?;
    Ok(outcome)
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(outcome) => match outcome.failure() {
            None => ExitCode::SUCCESS,
            Some(why) => {
                eprintln!("expint: {why}");
                ExitCode::FAILURE
            }
        },
        Err(e) => {
            eprintln!("expint: {e:#}");
            ExitCode::FAILURE
        }
    }
}
