//! Text formats for combs and plugging maps.
//!
//! A comb is its CNOT circuit followed by a holes trailer:
//!
//! ```text
//! qreg q[3];
//! cx q[0],q[1];
//! // holes: (1,2)
//! ```
//!
//! A plugging map has one `(q1,q2)=label(params)` line per hole.

use qcomb_core::comb::{Comb, CombError, Hole, Plug, PluggingMap};
use thiserror::Error;

use crate::qasm::{self, ParseError};

#[derive(Debug, Error)]
pub enum CombIoError {
    #[error(transparent)]
    Circuit(#[from] ParseError),
    #[error(transparent)]
    Comb(#[from] CombError),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

const HOLES_PREFIX: &str = "// holes:";

fn syntax(line: usize, msg: impl Into<String>) -> CombIoError {
    CombIoError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_hole(s: &str) -> Option<(Hole, &str)> {
    let s = s.trim_start().strip_prefix('(')?;
    let (inner, rest) = s.split_once(')')?;
    let (a, b) = inner.split_once(',')?;
    Some(((a.trim().parse().ok()?, b.trim().parse().ok()?), rest))
}

pub fn write_comb(comb: &Comb) -> String {
    let mut s = qasm::write_circuit(comb.circuit());
    s.push_str(HOLES_PREFIX);
    for (a, b) in comb.holes() {
        s.push_str(&format!(" ({a},{b})"));
    }
    s.push('\n');
    s
}

pub fn parse_comb(text: &str) -> Result<Comb, CombIoError> {
    let circuit = qasm::parse_circuit(text)?;
    let mut holes = Vec::new();
    let mut seen = false;
    for (i, line) in text.lines().enumerate() {
        let Some(mut rest) = line.trim().strip_prefix(HOLES_PREFIX) else {
            continue;
        };
        seen = true;
        while !rest.trim().is_empty() {
            let (h, tail) = parse_hole(rest).ok_or_else(|| syntax(i + 1, "expected `(a,b)`"))?;
            holes.push(h);
            rest = tail;
        }
    }
    if !seen {
        return Err(syntax(text.lines().count(), "missing `// holes:` trailer"));
    }
    Ok(Comb::new(circuit, holes)?)
}

pub fn write_plugging(map: &PluggingMap) -> String {
    let mut s = String::new();
    for ((a, b), plug) in map.iter() {
        let gate = qcomb_core::circuit::Gate::single(plug.label.clone(), &plug.params, 0);
        let mut text = String::new();
        qasm::write_gate(&mut text, &gate).expect("writing to a String");
        let head = text
            .strip_suffix(" q[0];")
            .expect("single gate ends in its operand");
        s.push_str(&format!("({a},{b})={head}\n"));
    }
    s
}

pub fn parse_plugging(text: &str) -> Result<PluggingMap, CombIoError> {
    let mut map = PluggingMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || syntax(i + 1, "expected `(a,b)=label` or `(a,b)=label(params)`");
        let (hole, rest) = parse_hole(line).ok_or_else(bad)?;
        let gate = rest.trim_start().strip_prefix('=').ok_or_else(bad)?;
        // reuse the circuit parser for the label and parameter expressions
        let c = qasm::parse_circuit(&format!("qreg q[1];\n{} q[0];", gate.trim()))
            .map_err(|e| syntax(i + 1, e.kind.to_string()))?;
        match c.gates() {
            [qcomb_core::circuit::Gate::Single { label, params, .. }] => {
                if map.insert(hole, Plug::new(label.clone(), params)).is_some() {
                    return Err(syntax(i + 1, format!("hole {hole:?} plugged twice")));
                }
            }
            _ => return Err(bad()),
        }
    }
    Ok(map)
}
