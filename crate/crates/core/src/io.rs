//! JSON, CSV and JSONL exchange formats. Every external index is 1-based.
//! Floats are written with Rust's shortest round-trip formatting, so output
//! is byte-for-byte reproducible.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dynamics::{DynamicsError, EventKind, OpinionState, Trajectory};
use crate::graph::Graph;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("edge #{index} [{a}, {b}]: {reason}")]
    BadEdge { index: usize, a: usize, b: usize, reason: &'static str },
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error(transparent)]
    State(#[from] DynamicsError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Parses `{"n": .., "edges": [[i, j], ..]}`. Loops are implied and must not
/// be listed; each pair may appear once in either orientation.
pub fn parse_graph_json(text: &str) -> Result<Graph, IoError> {
    let file: GraphFile = serde_json::from_str(text)?;
    if file.n == 0 {
        return Err(IoError::EmptyGraph);
    }
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::with_capacity(file.edges.len());
    for (index, &[a, b]) in file.edges.iter().enumerate() {
        let bad = |reason| IoError::BadEdge { index: index + 1, a, b, reason };
        if a == 0 || b == 0 || a > file.n || b > file.n {
            return Err(bad("vertex out of range"));
        }
        if a == b {
            return Err(bad("self-loops are implied and must not be listed"));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(bad("duplicate edge"));
        }
        edges.push((a - 1, b - 1));
    }
    Ok(Graph::new(file.n, edges).expect("edges validated above"))
}

pub fn graph_to_json(g: &Graph) -> String {
    let file = GraphFile { n: g.n(), edges: g.edges().iter().map(|&(a, b)| [a + 1, b + 1]).collect() };
    serde_json::to_string(&file).expect("graph serializes")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    #[serde(rename = "R")]
    r: f64,
    opinions: Vec<f64>,
}

pub fn parse_state_json(text: &str) -> Result<OpinionState, IoError> {
    let file: StateFile = serde_json::from_str(text)?;
    Ok(OpinionState::new(file.opinions, file.r)?)
}

pub fn state_to_json(s: &OpinionState) -> String {
    serde_json::to_string(&StateFile { r: s.r(), opinions: s.opinions().to_vec() }).expect("state serializes")
}

/// `k,x_1,…,x_n` for every recorded state.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &Trajectory) -> io::Result<()> {
    let n = traj.graph().n();
    write!(w, "k")?;
    for i in 1..=n {
        write!(w, ",x_{i}")?;
    }
    writeln!(w)?;
    for (k, x) in traj.states().iter().enumerate() {
        write!(w, "{k}")?;
        for v in x {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_energy_csv<W: Write>(mut w: W, traj: &Trajectory) -> io::Result<()> {
    writeln!(w, "k,E,E_act")?;
    for (k, e) in traj.energy().iter().enumerate() {
        writeln!(w, "{k},{},{}", e.e, e.e_act)?;
    }
    Ok(())
}

pub fn event_json(k: usize, kind: &EventKind) -> serde_json::Value {
    let one = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
    match kind {
        EventKind::LinkBreak { i, j } | EventKind::LinkForm { i, j } => {
            json!({"k": k, "kind": kind.name(), "i": i + 1, "j": j + 1})
        }
        EventKind::Merge { a, b, via } => {
            json!({"k": k, "kind": "Merge", "a": one(a), "b": one(b), "via": [via.0 + 1, via.1 + 1]})
        }
        EventKind::Lock | EventKind::Termination => json!({"k": k, "kind": kind.name()}),
    }
}

pub fn write_events_jsonl<W: Write>(mut w: W, traj: &Trajectory) -> io::Result<()> {
    for e in traj.events() {
        writeln!(w, "{}", event_json(e.k, &e.kind))?;
    }
    Ok(())
}

/// Writes through a temporary sibling file and renames it into place, so
/// readers never see a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}
