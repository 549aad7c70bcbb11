//! Plain-text solution checkpoints: a `key value` header followed by the
//! coefficient vector, one entry per line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::case::FlowCase;
use super::ns::{Diagnostics, SolutionState};
use crate::error::{Error, Result};
use crate::fem::{Field, FunctionSpace};

const MAGIC: &str = "# nozzlebench checkpoint v1";

pub fn checkpoint_to_string(case: &FlowCase, state: &SolutionState) -> String {
    let f = &state.field;
    let d = &state.diagnostics;
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "re_throat {:e}", case.re_throat);
    let _ = writeln!(s, "rho {:e}", case.rho);
    let _ = writeln!(s, "mu {:e}", case.mu);
    let _ = writeln!(s, "dt {:e}", case.dt);
    let _ = writeln!(s, "order {}", f.space().order());
    let _ = writeln!(s, "step {}", state.step);
    let _ = writeln!(s, "time {:e}", state.time);
    let _ = writeln!(s, "divergence {:e}", d.divergence);
    let _ = writeln!(s, "nonlinear_iterations {}", d.nonlinear_iterations);
    let _ = writeln!(s, "linear_iterations {}", d.linear_iterations);
    let _ = writeln!(s, "n_velocity {}", f.space().n_velocity());
    let _ = writeln!(s, "n_pressure {}", f.space().n_pressure());
    let _ = writeln!(s, "coefficients {}", f.coeffs.len());
    for c in &f.coeffs {
        let _ = writeln!(s, "{c:e}");
    }
    s
}

pub fn write_checkpoint(path: &Path, case: &FlowCase, state: &SolutionState) -> Result<()> {
    std::fs::write(path, checkpoint_to_string(case, state)).map_err(|e| Error::io(path, e))
}

/// Parses a checkpoint written for `space`; the order and dof counts must
/// match it.
pub fn checkpoint_from_str(text: &str, space: Arc<FunctionSpace>, path: &Path) -> Result<SolutionState> {
    let perr = |line: usize, message: String| Error::Parse {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, l)) if l == MAGIC => {}
        _ => return Err(perr(1, "not a checkpoint file".into())),
    }
    let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut count = None;
    for (n, l) in lines.by_ref() {
        let (key, value) = l.split_once(' ').ok_or_else(|| perr(n, format!("expected 'key value', got '{l}'")))?;
        if key == "coefficients" {
            count = Some(value.trim().parse::<usize>().map_err(|e| perr(n, format!("bad count: {e}")))?);
            break;
        }
        header.insert(key.to_string(), (n, value.trim().to_string()));
    }
    let total = count.ok_or_else(|| perr(0, "missing 'coefficients' line".into()))?;
    let get = |key: &str| -> Result<(usize, f64)> {
        let (n, v) = header.get(key).ok_or_else(|| perr(0, format!("missing header key '{key}'")))?;
        v.parse::<f64>().map(|x| (*n, x)).map_err(|e| perr(*n, format!("bad value for '{key}': {e}")))
    };
    let (n, order) = get("order")?;
    if order as usize != space.order() {
        return Err(perr(n, format!("checkpoint order {order} does not match space order {}", space.order())));
    }
    let (n, nv) = get("n_velocity")?;
    let (_, np) = get("n_pressure")?;
    if nv as usize != space.n_velocity() || np as usize != space.n_pressure() || total != space.n_total() {
        return Err(perr(n, "dof counts do not match the function space".into()));
    }
    let mut coeffs = Vec::with_capacity(total);
    for (n, l) in lines {
        if l.is_empty() {
            continue;
        }
        coeffs.push(l.parse::<f64>().map_err(|e| perr(n, format!("bad coefficient '{l}': {e}")))?);
    }
    if coeffs.len() != total {
        return Err(perr(0, format!("expected {total} coefficients, found {}", coeffs.len())));
    }
    let diagnostics = Diagnostics {
        divergence: get("divergence").map(|v| v.1).unwrap_or(0.0),
        nonlinear_iterations: get("nonlinear_iterations").map(|v| v.1 as usize).unwrap_or(0),
        linear_iterations: get("linear_iterations").map(|v| v.1 as usize).unwrap_or(0),
    };
    Ok(SolutionState {
        field: Field::new(space, coeffs)?,
        time: get("time")?.1,
        step: get("step")?.1 as usize,
        diagnostics,
    })
}

pub fn read_checkpoint(path: &Path, space: Arc<FunctionSpace>) -> Result<SolutionState> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    checkpoint_from_str(&text, space, path)
}
