//! JSON circuit/clock files.
//!
//! ```json
//! {
//!   "qubits": 2,
//!   "steps": 6,
//!   "gates": [{"t": 5, "targets": [0], "matrix": [[0,0],[1,0],[1,0],[0,0]]}],
//!   "ancillas": [0],
//!   "output": 0,
//!   "clock": {"t_init": 1}
//! }
//! ```
//!
//! `steps` is the number of clock states on the valid path. A gate at step
//! `t` (`1 ≤ t < steps`) drives the transition from clock state `t−1` to
//! `t`. Matrices are flat row-major lists of `[re, im]` pairs. See the
//! README for the optional `clock` fields.

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Deserialize;

use super::circuit::{CircuitSpec, Gate, UNITARITY_TOL};
use super::clock::ClockSpec;
use super::complex::CMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    qubits: usize,
    steps: usize,
    #[serde(default)]
    gates: Vec<RawGate>,
    #[serde(default)]
    ancillas: Vec<usize>,
    #[serde(default)]
    output: Option<usize>,
    #[serde(default)]
    clock: RawClock,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGate {
    t: usize,
    targets: Vec<usize>,
    matrix: Vec<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClock {
    labels: Option<Vec<String>>,
    rules: Option<Vec<[String; 2]>>,
    #[serde(default)]
    illegal: Vec<String>,
    #[serde(default)]
    t_init: usize,
    #[serde(default)]
    input_penalties: Vec<RawPenalty>,
    reach: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPenalty {
    t: usize,
    matrix: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub circuit: CircuitSpec,
    pub clock: ClockSpec,
}

fn schema(path: impl Into<String>, message: impl ToString) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.to_string(),
    }
}

fn square_matrix(path: &str, entries: &[[f64; 2]]) -> Result<CMatrix> {
    let n = (entries.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != entries.len() {
        return Err(schema(
            path,
            format!("{} entries do not form a square matrix", entries.len()),
        ));
    }
    CMatrix::new(
        n,
        entries.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
    )
    .map_err(|e| schema(path, e))
}

pub fn parse(text: &str) -> Result<ProblemSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner())
    })?;
    build(raw)
}

pub fn load(path: &Path) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| schema(path.display().to_string(), e))?;
    parse(&text)
}

fn build(raw: RawSpec) -> Result<ProblemSpec> {
    let mut gates = Vec::with_capacity(raw.gates.len());
    for (i, g) in raw.gates.iter().enumerate() {
        let path = format!("gates[{i}].matrix");
        let m = square_matrix(&path, &g.matrix)?;
        if m.dim() != 1 << g.targets.len() {
            return Err(schema(
                path,
                format!(
                    "dimension {} does not match {} target qubit(s)",
                    m.dim(),
                    g.targets.len()
                ),
            ));
        }
        let defect = m.unitarity_defect();
        if defect > UNITARITY_TOL {
            return Err(schema(path, format!("not unitary (defect {defect:e})")));
        }
        gates.push(Gate {
            step: g.t,
            targets: g.targets.clone(),
            matrix: m,
        });
    }
    let circuit = CircuitSpec::new(raw.qubits, raw.steps, gates, raw.ancillas, raw.output)
        .map_err(|e| schema("gates", e))?;

    let rc = raw.clock;
    let labels = rc
        .labels
        .unwrap_or_else(|| (0..raw.steps).map(|i| i.to_string()).collect());
    let index = |name: &str, path: String| {
        labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| schema(path, format!("unknown label {name:?}")))
    };
    let rules = match &rc.rules {
        Some(rs) => rs
            .iter()
            .enumerate()
            .map(|(i, [a, b])| {
                Ok((
                    index(a, format!("clock.rules[{i}][0]"))?,
                    index(b, format!("clock.rules[{i}][1]"))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?,
        None => (0..raw.steps.min(labels.len()).saturating_sub(1))
            .map(|i| (i, i + 1))
            .collect(),
    };
    let illegal = rc
        .illegal
        .iter()
        .enumerate()
        .map(|(i, name)| index(name, format!("clock.illegal[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let mut penalties = Vec::with_capacity(rc.input_penalties.len());
    for (i, p) in rc.input_penalties.iter().enumerate() {
        let path = format!("clock.input_penalties[{i}].matrix");
        let m = square_matrix(&path, &p.matrix)?;
        if m.dim() != circuit.register_dim() {
            return Err(schema(
                path,
                format!(
                    "dimension {} does not match register dimension {}",
                    m.dim(),
                    circuit.register_dim()
                ),
            ));
        }
        penalties.push((p.t, m));
    }
    let clock = ClockSpec::new(labels, rules, &illegal, rc.t_init, penalties, rc.reach)
        .map_err(|e| schema("clock", e))?;
    if clock.steps() != circuit.steps() {
        return Err(schema(
            "steps",
            format!(
                "valid clock path has {} states but steps = {}",
                clock.steps(),
                circuit.steps()
            ),
        ));
    }
    Ok(ProblemSpec { circuit, clock })
}
