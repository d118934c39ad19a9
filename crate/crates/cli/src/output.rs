//! CSV streams and JSON run summaries.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use expint::StepRecord;
use serde::Serialize;

/// Column order of per-step streams.
pub const STEP_HEADER: &str = "step,t,h,norm_drift,energy,err_est,b_evals_cum,wall_ns";

/// Round-trip formatting with 17 significant digits; `NaN` marks absent values.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// A CSV table built in memory, written in one go.
#[derive(Debug, Clone)]
pub struct Table {
    text: String,
    width: usize,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Self { text: format!("{header}\n"), width: header.split(',').count() }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.width, "row width differs from the header");
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        std::fs::write(path, &self.text).with_context(|| format!("writing {}", path.display()))
    }
}

/// Accepted steps only; rejected attempts carry no state.
pub fn step_table<'a>(records: impl IntoIterator<Item = &'a StepRecord>) -> Table {
    let mut table = Table::new(STEP_HEADER);
    for r in records.into_iter().filter(|r| r.accepted) {
        table.row(&[
            r.step.to_string(),
            float(r.t),
            float(r.h),
            float(r.norm_drift),
            float(r.energy.unwrap_or(f64::NAN)),
            float(r.err_est),
            r.b_evals_cum.to_string(),
            r.wall_ns.to_string(),
        ]);
    }
    table
}

/// Summary emitted next to every CSV.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Summary {
    pub command: String,
    pub problem: String,
    pub method: Option<String>,
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    pub t_end: f64,
    pub grid: usize,
    pub domain: f64,
    pub orbitals: Option<usize>,
    pub seed: u64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub restarts: usize,
    pub b_evals: u64,
    pub exp_applications: u64,
    pub max_norm_drift: Option<f64>,
    pub max_energy_drift: Option<f64>,
    /// Distance to the exact solution or stored reference at `t_end`, when available.
    pub final_error: Option<f64>,
    pub wall_seconds: f64,
    pub failure: Option<String>,
    /// Command-specific extras.
    pub details: serde_json::Map<String, serde_json::Value>,
}

impl Summary {
    pub fn to_json(&self) -> String {
        // non-finite numbers have no JSON form and become null
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

/// Drops the trailing `wall_ns` column, for comparisons that ignore timing.
pub fn without_timing(csv: &str) -> String {
    let mut out = String::new();
    for line in csv.lines() {
        let kept = line.rsplit_once(',').map_or(line, |(head, _)| head);
        let _ = writeln!(out, "{kept}");
    }
    out
}
