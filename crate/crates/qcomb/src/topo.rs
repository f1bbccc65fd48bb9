//! Topology JSON files and the builtin architectures.

use std::path::Path;

use qcomb_core::topology::{Topology, TopologyError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TopoIoError {
    #[error("invalid topology JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid topology: {0}")]
    Topology(#[from] TopologyError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("unknown architecture `{0}`")]
    Unknown(String),
}

/// On-disk form: `{"name": ..., "num_qubits": ..., "edges": [[a, b], ...]}`.
/// Unknown keys such as `_comment` are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyFile {
    pub name: String,
    pub num_qubits: usize,
    pub edges: Vec<(usize, usize)>,
}

impl From<&Topology> for TopologyFile {
    fn from(t: &Topology) -> Self {
        TopologyFile {
            name: t.name().to_string(),
            num_qubits: t.n_vertices(),
            edges: t.edges().to_vec(),
        }
    }
}

pub fn parse_topology(json: &str) -> Result<Topology, TopoIoError> {
    let f: TopologyFile = serde_json::from_str(json)?;
    Ok(Topology::new(f.name, f.num_qubits, &f.edges)?)
}

pub fn topology_to_json(t: &Topology) -> String {
    serde_json::to_string_pretty(&TopologyFile::from(t)).expect("plain data serializes")
}

const BUILTINS: [(&str, &str); 5] = [
    ("9q-square", include_str!("../data/9q-square.json")),
    ("16q-square", include_str!("../data/16q-square.json")),
    (
        "rigetti-16q-aspen",
        include_str!("../data/rigetti-16q-aspen.json"),
    ),
    ("ibm-qx5", include_str!("../data/ibm-qx5.json")),
    ("ibm-q20-tokyo", include_str!("../data/ibm-q20-tokyo.json")),
];

/// Names of the shipped architectures, in a fixed order.
pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

pub fn builtin(name: &str) -> Option<Topology> {
    BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| parse_topology(json).expect("builtin topology data is valid"))
}

fn parse_dims(s: &str) -> Option<(usize, usize)> {
    let (r, c) = s.split_once('x')?;
    Some((r.parse().ok()?, c.parse().ok()?))
}

/// Resolves a builtin name, `complete-N`, `line-N`, `grid-RxC`, or a path to
/// a topology JSON file.
pub fn resolve_architecture(spec: &str) -> Result<Topology, TopoIoError> {
    if let Some(t) = builtin(spec) {
        return Ok(t);
    }
    let sized = |prefix: &str| {
        spec.strip_prefix(prefix)
            .and_then(|n| n.parse::<usize>().ok())
    };
    if let Some(n) = sized("complete-").filter(|&n| n > 0) {
        return Ok(Topology::complete(n));
    }
    if let Some(n) = sized("line-").filter(|&n| n > 0) {
        return Ok(Topology::line(n));
    }
    if let Some((r, c)) = spec
        .strip_prefix("grid-")
        .and_then(parse_dims)
        .filter(|&(r, c)| r > 0 && c > 0)
    {
        return Ok(Topology::grid(r, c));
    }
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| TopoIoError::Io {
            path: spec.to_string(),
            source,
        })?;
        return parse_topology(&text);
    }
    Err(TopoIoError::Unknown(spec.to_string()))
}
