//! Run configuration: flat `key = value` files overridden by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use expint::{mctdhf, nls, ControllerConfig, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Nls,
    Helium,
}

impl FromStr for ProblemKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nls" => Ok(ProblemKind::Nls),
            "helium" | "mctdhf" => Ok(ProblemKind::Helium),
            _ => bail!("unknown problem '{s}' (expected nls or helium)"),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Nls => "nls",
            ProblemKind::Helium => "helium",
        })
    }
}

/// Every recognised key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("problem", "nls | helium"),
    ("method", "integrator identifier, e.g. lawson-pece:4"),
    ("methods", "comma-separated identifiers for scans"),
    ("steps", "fixed step count"),
    ("step_list", "comma-separated step counts for scans"),
    ("tol", "adaptive tolerance"),
    ("t_end", "final time"),
    ("grid", "number of grid points M"),
    ("domain", "half-length L of [-L, L)"),
    ("orbitals", "number of orbitals N"),
    ("laser", "on | off"),
    ("field_amplitude", "laser amplitude"),
    ("regularization", "density-matrix regularization"),
    ("out", "output CSV path"),
    ("reference", "reference checkpoint path"),
    ("ground", "ground-state checkpoint path (computed if absent)"),
    ("ground_tol", "ground-state convergence tolerance"),
    ("ground_refinements", "ground-state step halvings"),
    ("reference_factor", "reference refinement over the finest ladder point"),
    ("threads", "worker threads for scans (0 = all)"),
    ("seed", "seed recorded for randomized runs"),
    ("h0", "initial step"),
    ("h_min", "minimum step"),
    ("h_max", "maximum step"),
    ("safety", "controller safety factor"),
];

/// Raw key/value settings; later insertions win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            s.set(k.trim(), v.trim()).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let key = key.replace('-', "_");
        if !KEYS.iter().any(|(k, _)| *k == key) {
            bail!("unknown configuration key '{key}'");
        }
        self.0.insert(key, value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("invalid value '{v}' for {key}: {e}")))
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<T>().map_err(|e| anyhow!("invalid entry '{s}' in {key}: {e}")))
                    .collect()
            })
            .transpose()
    }
}

/// A fully resolved configuration. Exactly one of `steps` and `tol` is set for a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub method: Option<Method>,
    pub methods: Option<Vec<Method>>,
    pub steps: Option<usize>,
    pub step_list: Vec<usize>,
    pub tol: Option<f64>,
    pub t_end: Option<f64>,
    pub grid: usize,
    pub domain: f64,
    pub orbitals: usize,
    pub field_amplitude: f64,
    pub regularization: f64,
    pub out: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    pub ground: Option<PathBuf>,
    pub ground_tol: f64,
    pub ground_refinements: usize,
    pub reference_factor: usize,
    pub threads: usize,
    pub seed: u64,
    pub h0: Option<f64>,
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
    pub safety: Option<f64>,
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let problem: ProblemKind = s.parsed("problem")?.unwrap_or(ProblemKind::Helium);
        let (grid, domain) = match problem {
            ProblemKind::Nls => (nls::DEFAULT_POINTS, nls::DEFAULT_HALF_LENGTH),
            ProblemKind::Helium => (mctdhf::DEFAULT_POINTS, mctdhf::DEFAULT_HALF_LENGTH),
        };
        let defaults = mctdhf::HeliumParams::default();
        let laser_on = match s.get("laser") {
            None | Some("on") => true,
            Some("off") => false,
            Some(v) => bail!("invalid value '{v}' for laser (expected on or off)"),
        };
        let amplitude = s.parsed("field_amplitude")?.unwrap_or(defaults.field_amplitude);
        let cfg = RunConfig {
            problem,
            method: s.parsed("method")?,
            methods: s.list("methods")?,
            steps: s.parsed("steps")?,
            step_list: s.list("step_list")?.unwrap_or_default(),
            tol: s.parsed("tol")?,
            t_end: s.parsed("t_end")?,
            grid: s.parsed("grid")?.unwrap_or(grid),
            domain: s.parsed("domain")?.unwrap_or(domain),
            orbitals: s.parsed("orbitals")?.unwrap_or(mctdhf::DEFAULT_ORBITALS),
            field_amplitude: if laser_on { amplitude } else { 0.0 },
            regularization: s.parsed("regularization")?.unwrap_or(defaults.regularization),
            out: s.get("out").map(PathBuf::from),
            reference: s.get("reference").map(PathBuf::from),
            ground: s.get("ground").map(PathBuf::from),
            ground_tol: s.parsed("ground_tol")?.unwrap_or(expint::mctdhf::GroundStateOptions::default().tolerance),
            ground_refinements: s
                .parsed("ground_refinements")?
                .unwrap_or(expint::mctdhf::GroundStateOptions::default().refinements),
            reference_factor: s.parsed("reference_factor")?.unwrap_or(20),
            threads: s.parsed("threads")?.unwrap_or(0),
            seed: s.parsed("seed")?.unwrap_or(0),
            h0: s.parsed("h0")?,
            h_min: s.parsed("h_min")?,
            h_max: s.parsed("h_max")?,
            safety: s.parsed("safety")?,
        };
        if let Some(t) = cfg.t_end.filter(|t| !(t.is_finite() && *t >= 0.0)) {
            bail!("t_end must be finite and non-negative, got {t}");
        }
        Ok(cfg)
    }

    /// Final time, defaulting to the problem's standard horizon.
    pub fn t_end_or(&self, helium: f64) -> f64 {
        self.t_end.unwrap_or(match self.problem {
            ProblemKind::Nls => 1.0,
            ProblemKind::Helium => helium,
        })
    }

    pub fn method_or(&self, default: Method) -> Method {
        self.method.unwrap_or(default)
    }

    /// `methods`, else the single `method`, else `default`.
    pub fn methods_or(&self, default: &[Method]) -> Vec<Method> {
        match (&self.methods, self.method) {
            (Some(m), _) => m.clone(),
            (None, Some(m)) => vec![m],
            (None, None) => default.to_vec(),
        }
    }

    pub fn step_list_or(&self, default: &[usize]) -> Vec<usize> {
        if self.step_list.is_empty() {
            default.to_vec()
        } else {
            self.step_list.clone()
        }
    }

    /// Settings for one run: the step count or the controller, never both.
    pub fn step_mode(&self) -> Result<expint::StepMode> {
        match (self.steps, self.tol) {
            (Some(steps), None) => Ok(expint::StepMode::Fixed { steps }),
            (None, Some(tol)) => Ok(expint::StepMode::Adaptive(self.controller(tol)?)),
            (Some(_), Some(_)) => bail!("set either steps or tol, not both"),
            (None, None) => bail!("set steps (fixed step) or tol (adaptive)"),
        }
    }

    pub fn controller(&self, tol: f64) -> Result<ControllerConfig> {
        let mut c = ControllerConfig::new(tol);
        c.h0 = self.h0;
        if let Some(v) = self.h_min {
            c.h_min = v;
        }
        if let Some(v) = self.h_max {
            c.h_max = v;
        }
        if let Some(v) = self.safety {
            c.safety = v;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn helium_params(&self) -> mctdhf::HeliumParams {
        mctdhf::HeliumParams {
            field_amplitude: self.field_amplitude,
            regularization: self.regularization,
            ..mctdhf::HeliumParams::default()
        }
    }

    pub fn ground_options(&self) -> mctdhf::GroundStateOptions {
        mctdhf::GroundStateOptions {
            tolerance: self.ground_tol,
            refinements: self.ground_refinements,
            ..Default::default()
        }
    }

    /// `out` with its extension replaced, or `default` when no output path is set.
    pub fn sibling(&self, extension: &str, default: &str) -> PathBuf {
        match &self.out {
            Some(p) => p.with_extension(extension),
            None => PathBuf::from(default),
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_settings(&Settings::default()).expect("defaults are valid")
    }
}
