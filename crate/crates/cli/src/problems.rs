//! Problem construction and initial states from a configuration.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use expint::mctdhf::{self, GroundState, HeliumModel, HeliumParams, MctdhfState};
use expint::nls::NlsProblem;
use expint::UniformGrid;

use crate::config::RunConfig;

pub fn nls_problem(cfg: &RunConfig) -> Result<NlsProblem> {
    Ok(NlsProblem::new(UniformGrid::new(cfg.grid, cfg.domain)?, 1.0, 1.0)?)
}

pub fn helium_model(cfg: &RunConfig) -> Result<HeliumModel> {
    helium_model_with(cfg, cfg.helium_params())
}

fn helium_model_with(cfg: &RunConfig, params: HeliumParams) -> Result<HeliumModel> {
    Ok(HeliumModel::new(UniformGrid::new(cfg.grid, cfg.domain)?, cfg.orbitals, params)?)
}

/// Ground state of `H₀` on the configured grid.
pub fn compute_ground_state(cfg: &RunConfig) -> Result<GroundState> {
    let params = HeliumParams { field_amplitude: 0.0, ..cfg.helium_params() };
    let model = helium_model_with(cfg, params)?;
    mctdhf::ground_state(&model, None, &cfg.ground_options()).context("imaginary-time relaxation failed")
}

/// The `ground` checkpoint when it exists, otherwise a freshly relaxed ground state.
pub fn initial_state(cfg: &RunConfig) -> Result<MctdhfState> {
    match &cfg.ground {
        Some(path) if path.exists() => load_state(cfg, path).map(|(s, _)| s),
        _ => Ok(compute_ground_state(cfg)?.state),
    }
}

/// Read a checkpoint and check that it matches the configured discretization.
pub fn load_state(cfg: &RunConfig, path: &Path) -> Result<(MctdhfState, f64)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading checkpoint {}", path.display()))?;
    let (state, t) = mctdhf::read_checkpoint(&text).with_context(|| format!("parsing {}", path.display()))?;
    let grid = state.grid();
    if state.num_orbitals() != cfg.orbitals || grid.num_points() != cfg.grid || grid.half_length() != cfg.domain {
        bail!(
            "checkpoint {} holds N = {}, M = {}, L = {}; the configuration asks for N = {}, M = {}, L = {}",
            path.display(),
            state.num_orbitals(),
            grid.num_points(),
            grid.half_length(),
            cfg.orbitals,
            cfg.grid,
            cfg.domain
        );
    }
    Ok((state, t))
}

pub fn save_state(path: &Path, state: &MctdhfState, t: f64) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, mctdhf::write_checkpoint(state, t)).with_context(|| format!("writing {}", path.display()))
}

/// The stored reference at `t_end`, with an instructive error when it is missing.
pub fn load_reference(cfg: &RunConfig, t_end: f64) -> Result<MctdhfState> {
    let path = cfg.reference.clone().unwrap_or_else(|| "reference.ckpt".into());
    if !path.exists() {
        bail!(
            "reference checkpoint {} not found; create it first with `expint make-reference` \
             (same grid, orbitals and t_end) or point --reference at an existing file",
            path.display()
        );
    }
    let (state, t) = load_state(cfg, &path)?;
    ensure!(
        (t - t_end).abs() <= 1e-12 * t_end.abs().max(1.0),
        "reference {} is at t = {t}, the runs end at t = {t_end}",
        path.display()
    );
    Ok(state)
}

/// `‖u - v‖` in the composite (coefficient, orbital) norm.
pub fn state_distance(u: &MctdhfState, v: &MctdhfState) -> f64 {
    use expint::StateVector;
    let mut d = u.clone();
    d.axpy(-1.0, v);
    d.norm()
}
