//! Text checkpoints of MCTDHF states.
//!
//! Layout (one record per line, whitespace separated, floats in shortest
//! round-trip form):
//!
//! ```text
//! expint-mctdhf v1
//! N M L t
//! re im            # N² coefficient lines, row-major a_jk
//! re im            # N·M orbital lines, orbital-major
//! ```

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::MctdhfState;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, UniformGrid};

pub const CHECKPOINT_TAG: &str = "expint-mctdhf v1";

/// Serialize `state` at time `t`.
pub fn write_checkpoint(state: &MctdhfState, t: f64) -> String {
    let n = state.num_orbitals();
    let grid = state.grid();
    let mut out = String::new();
    let _ = writeln!(out, "{CHECKPOINT_TAG}");
    let _ = writeln!(out, "{n} {} {:?} {t:?}", grid.num_points(), grid.half_length());
    for j in 0..n {
        for k in 0..n {
            let c = state.coeffs[(j, k)];
            let _ = writeln!(out, "{:?} {:?}", c.re, c.im);
        }
    }
    for o in &state.orbitals {
        for c in o.values() {
            let _ = writeln!(out, "{:?} {:?}", c.re, c.im);
        }
    }
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

fn parse_pair(line: Option<&str>) -> Result<Complex64> {
    let line = line.ok_or_else(|| bad("unexpected end of file"))?;
    let mut it = line.split_whitespace();
    let mut next = || -> Result<f64> {
        it.next().ok_or_else(|| bad(format!("malformed line '{line}'")))?.parse().map_err(|e| bad(format!("{e}")))
    };
    Ok(Complex64::new(next()?, next()?))
}

/// Parse a checkpoint; returns the state and its time.
pub fn read_checkpoint(text: &str) -> Result<(MctdhfState, f64)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(tag) if tag.trim() == CHECKPOINT_TAG => {}
        Some(tag) => return Err(bad(format!("unsupported checkpoint tag '{tag}'"))),
        None => return Err(bad("empty checkpoint")),
    }
    let header = lines.next().ok_or_else(|| bad("missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(bad(format!("malformed header '{header}'")));
    }
    let n: usize = fields[0].parse().map_err(|_| bad("bad orbital count"))?;
    let m: usize = fields[1].parse().map_err(|_| bad("bad point count"))?;
    let l: f64 = fields[2].parse().map_err(|_| bad("bad half length"))?;
    let t: f64 = fields[3].parse().map_err(|_| bad("bad time"))?;
    let grid = UniformGrid::new(m, l)?;
    let mut coeffs = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            coeffs[(j, k)] = parse_pair(lines.next())?;
        }
    }
    let mut orbitals = Vec::with_capacity(n);
    for _ in 0..n {
        let values = (0..m).map(|_| parse_pair(lines.next())).collect::<Result<Vec<_>>>()?;
        orbitals.push(GridFunction::new(grid.clone(), values)?);
    }
    if lines.next().is_some() {
        return Err(bad("trailing data"));
    }
    Ok((MctdhfState::new(coeffs, orbitals)?, t))
}
