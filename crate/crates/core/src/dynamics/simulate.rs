use serde::{Deserialize, Serialize};

use super::steady::{lock_holds_for, ModalBasis};
use super::{average, energy_of, influence_of, DynamicsError, Energy, InfluenceGraph, OpinionState};
use crate::graph::Graph;

pub const DEFAULT_HISTORY_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopOn {
    /// Stop at the first locked state.
    Lock,
    /// Stop when the state reproduces itself bitwise.
    Termination,
    /// Stop once locked and the remaining modal mass is below `ε`.
    EpsConv(f64),
    /// Run the full step budget.
    Horizon,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub max_steps: usize,
    pub stop_on: StopOn,
    /// Number of states kept in the history; later states are dropped but
    /// energies and events are always kept.
    pub history_cap: usize,
    /// Widens the neighbour test to `|xᵢ − xⱼ| ≤ R + tol`.
    pub neighbor_tol: Option<f64>,
}

impl Limits {
    pub fn new(max_steps: usize, stop_on: StopOn) -> Self {
        Limits { max_steps, stop_on, history_cap: DEFAULT_HISTORY_CAP, neighbor_tol: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum EventKind {
    LinkBreak { i: usize, j: usize },
    LinkForm { i: usize, j: usize },
    /// A new link `via` joins component `a` (containing `via.0`) and `b` of
    /// the previous influence graph.
    Merge { a: Vec<usize>, b: Vec<usize>, via: (usize, usize) },
    Lock,
    Termination,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::LinkBreak { .. } => "LinkBreak",
            EventKind::LinkForm { .. } => "LinkForm",
            EventKind::Merge { .. } => "Merge",
            EventKind::Lock => "Lock",
            EventKind::Termination => "Termination",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub k: usize,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    Lock,
    Termination,
    EpsConv,
    Horizon,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    graph: Graph,
    r: f64,
    neighbor_tol: f64,
    states: Vec<Vec<f64>>,
    final_state: Vec<f64>,
    last_step: usize,
    initial_edges: Vec<(usize, usize)>,
    energy: Vec<Energy>,
    events: Vec<Event>,
    lock_step: Option<usize>,
    lock_state: Option<Vec<f64>>,
    termination_step: Option<usize>,
    stop: StopReason,
}

impl Trajectory {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn neighbor_tol(&self) -> f64 {
        self.neighbor_tol
    }

    /// Recorded states `x[0], x[1], …` (possibly truncated by the history cap).
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn state(&self, k: usize) -> Option<&[f64]> {
        self.states.get(k).map(Vec::as_slice)
    }

    pub fn history_complete(&self) -> bool {
        self.states.len() == self.last_step + 1
    }

    pub fn final_state(&self) -> &[f64] {
        &self.final_state
    }

    /// Index of the last state reached.
    pub fn last_step(&self) -> usize {
        self.last_step
    }

    /// `E[k]`, `E_act[k]` for every `k ≤ last_step`.
    pub fn energy(&self) -> &[Energy] {
        &self.energy
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn lock_step(&self) -> Option<usize> {
        self.lock_step
    }

    pub fn lock_state(&self) -> Option<&[f64]> {
        self.lock_state.as_deref()
    }

    pub fn termination_step(&self) -> Option<usize> {
        self.termination_step
    }

    pub fn stop_reason(&self) -> StopReason {
        self.stop
    }

    /// Non-loop edges of the initial influence graph; later graphs follow
    /// from the break/form events.
    pub fn initial_edges(&self) -> &[(usize, usize)] {
        &self.initial_edges
    }

    pub fn merge_times(&self) -> Vec<usize> {
        self.events.iter().filter(|e| matches!(e.kind, EventKind::Merge { .. })).map(|e| e.k).collect()
    }

    pub fn count(&self, name: &str) -> usize {
        self.events.iter().filter(|e| e.kind.name() == name).count()
    }

    /// Influence graph at step `k`, recomputed from the recorded state.
    pub fn influence_at(&self, k: usize) -> Option<InfluenceGraph> {
        self.state(k).map(|x| influence_of(&self.graph, x, self.r, self.neighbor_tol))
    }
}

pub fn simulate(gph: &Graph, s0: &OpinionState, limits: Limits) -> Result<Trajectory, DynamicsError> {
    s0.check(gph)?;
    if limits.max_steps == 0 {
        return Err(DynamicsError::ZeroBudget);
    }
    let r = s0.r();
    let tol = limits.neighbor_tol.unwrap_or(0.0);
    let mut x = s0.opinions().to_vec();
    let mut t = influence_of(gph, &x, r, tol);
    let mut traj = Trajectory {
        graph: gph.clone(),
        r,
        neighbor_tol: tol,
        states: vec![x.clone()],
        final_state: Vec::new(),
        last_step: 0,
        initial_edges: t.edges().to_vec(),
        energy: vec![energy_of(&t, &x, r)],
        events: Vec::new(),
        lock_step: None,
        lock_state: None,
        termination_step: None,
        stop: StopReason::Horizon,
    };
    let mut prev: Option<InfluenceGraph> = None;
    let mut modes: Option<ModalBasis> = None;
    let mut k = 0;

    let stop = loop {
        if let Some(p) = &prev {
            log_structure(&mut traj.events, k, p, &t);
        }
        if traj.lock_step.is_none() && lock_holds_for(gph, &t, &x, r + tol) {
            traj.lock_step = Some(k);
            traj.lock_state = Some(x.clone());
            traj.events.push(Event { k, kind: EventKind::Lock });
        }
        match limits.stop_on {
            StopOn::Lock if traj.lock_step.is_some() => break StopReason::Lock,
            StopOn::EpsConv(eps) if traj.lock_step.is_some() => {
                let basis = match &mut modes {
                    Some(b) => b,
                    None => modes.insert(ModalBasis::new(&t)?),
                };
                if basis.tail(&x).mass() < eps {
                    break StopReason::EpsConv;
                }
            }
            _ => {}
        }
        let next = average(&t, &x);
        if next.iter().zip(&x).all(|(a, b)| a.to_bits() == b.to_bits()) {
            traj.termination_step = Some(k);
            traj.events.push(Event { k, kind: EventKind::Termination });
            break StopReason::Termination;
        }
        if k == limits.max_steps {
            break if limits.stop_on == StopOn::Horizon { StopReason::Horizon } else { StopReason::BudgetExhausted };
        }
        x = next;
        k += 1;
        let t_next = influence_of(gph, &x, r, tol);
        prev = Some(std::mem::replace(&mut t, t_next));
        traj.energy.push(energy_of(&t, &x, r));
        if traj.states.len() < limits.history_cap {
            traj.states.push(x.clone());
        }
    };

    traj.last_step = k;
    traj.final_state = x;
    traj.stop = stop;
    if stop == StopReason::BudgetExhausted {
        return Err(DynamicsError::BudgetExhausted(Box::new(traj)));
    }
    Ok(traj)
}

/// Appends the breaks, formations and merges between consecutive influence
/// graphs, in that order.
fn log_structure(events: &mut Vec<Event>, k: usize, prev: &InfluenceGraph, cur: &InfluenceGraph) {
    let (old, new) = (prev.edges(), cur.edges());
    let (mut a, mut b) = (0, 0);
    let mut broken = Vec::new();
    let mut formed = Vec::new();
    while a < old.len() || b < new.len() {
        match (old.get(a), new.get(b)) {
            (Some(x), Some(y)) if x == y => {
                a += 1;
                b += 1;
            }
            (Some(x), Some(y)) if x < y => {
                broken.push(*x);
                a += 1;
            }
            (Some(x), None) => {
                broken.push(*x);
                a += 1;
            }
            (_, Some(y)) => {
                formed.push(*y);
                b += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    events.extend(broken.iter().map(|&(i, j)| Event { k, kind: EventKind::LinkBreak { i, j } }));
    events.extend(formed.iter().map(|&(i, j)| Event { k, kind: EventKind::LinkForm { i, j } }));
    let mut joined: Vec<(usize, usize)> = Vec::new();
    for &(i, j) in &formed {
        let (ci, cj) = (prev.component_of(i), prev.component_of(j));
        if ci == cj {
            continue;
        }
        let key = (ci.min(cj), ci.max(cj));
        if joined.contains(&key) {
            continue;
        }
        joined.push(key);
        events.push(Event {
            k,
            kind: EventKind::Merge {
                a: prev.components()[ci].clone(),
                b: prev.components()[cj].clone(),
                via: (i, j),
            },
        });
    }
}
