//! Social Hegselmann-Krause dynamics: every agent moves to the mean opinion of
//! its physical neighbours that lie within the confidence bound.

mod certificates;
mod exact;
mod simulate;
mod steady;

pub use certificates::{verify_energy_certificates, CertificateFailure, EnergyClause, EnergyReport};
pub use exact::{ExactRunReport, ExactSimulation};
pub use simulate::{simulate, Event, EventKind, Limits, StopOn, StopReason, Trajectory, DEFAULT_HISTORY_CAP};
pub use steady::{eps_convergence_time, lock_holds, steady_state, SteadyState};

use serde::Serialize;

use crate::graph::{Graph, GraphError};
use crate::spectral::SpectralError;

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("state has {got} entries, graph has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("opinion {0} is not finite")]
    NonFinite(usize),
    #[error("confidence bound must be positive and finite, got {0}")]
    InvalidBound(f64),
    #[error("step budget must be at least 1")]
    ZeroBudget,
    #[error("step budget of {} exhausted before the stop condition", .0.last_step())]
    BudgetExhausted(Box<Trajectory>),
    #[error("trajectory never reached a locked configuration")]
    NotLocked,
    #[error("epsilon must be positive, got {0}")]
    EpsTooSmall(f64),
    #[error("state history was truncated at {recorded} states; {needed} are needed")]
    HistoryTruncated { needed: usize, recorded: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Opinions of all agents together with the confidence bound `R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpinionState {
    opinions: Vec<f64>,
    #[serde(rename = "R")]
    r: f64,
}

impl OpinionState {
    pub fn new(opinions: Vec<f64>, r: f64) -> Result<Self, DynamicsError> {
        if !(r.is_finite() && r > 0.0) {
            return Err(DynamicsError::InvalidBound(r));
        }
        if let Some(i) = opinions.iter().position(|x| !x.is_finite()) {
            return Err(DynamicsError::NonFinite(i));
        }
        Ok(OpinionState { opinions, r })
    }

    pub fn opinions(&self) -> &[f64] {
        &self.opinions
    }

    pub fn into_opinions(self) -> Vec<f64> {
        self.opinions
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.opinions.len()
    }

    pub fn spread(&self) -> f64 {
        spread(&self.opinions)
    }

    fn check(&self, g: &Graph) -> Result<(), DynamicsError> {
        if self.n() != g.n() {
            return Err(DynamicsError::DimensionMismatch { expected: g.n(), got: self.n() });
        }
        Ok(())
    }
}

pub(crate) fn spread(x: &[f64]) -> f64 {
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if x.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// `G_ph` restricted to pairs whose opinions differ by at most `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceGraph {
    graph: Graph,
    labels: Vec<usize>,
    components: Vec<Vec<usize>>,
}

impl InfluenceGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Non-loop edges `(i, j)`, `i < j`, ascending.
    pub fn edges(&self) -> &[(usize, usize)] {
        self.graph.edges()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        self.graph.neighbors(i)
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

pub fn influence_graph(gph: &Graph, s: &OpinionState) -> Result<InfluenceGraph, DynamicsError> {
    s.check(gph)?;
    Ok(influence_of(gph, &s.opinions, s.r, 0.0))
}

/// Like [`influence_graph`] but links pairs within `R + tol`.
pub fn influence_graph_with_tol(gph: &Graph, s: &OpinionState, tol: f64) -> Result<InfluenceGraph, DynamicsError> {
    s.check(gph)?;
    Ok(influence_of(gph, &s.opinions, s.r, tol))
}

pub(crate) fn influence_of(gph: &Graph, x: &[f64], r: f64, tol: f64) -> InfluenceGraph {
    let bound = r + tol;
    let edges: Vec<(usize, usize)> =
        gph.edges().iter().copied().filter(|&(i, j)| (x[i] - x[j]).abs() <= bound).collect();
    let graph = Graph::from_sorted_edges(gph.n(), edges);
    let labels = graph.component_labels();
    let components = graph.components();
    InfluenceGraph { graph, labels, components }
}

/// One synchronous update over the influence graph of `s`.
pub fn step(gph: &Graph, s: &OpinionState) -> Result<OpinionState, DynamicsError> {
    let t = influence_graph(gph, s)?;
    Ok(OpinionState { opinions: average(&t, &s.opinions), r: s.r })
}

pub(crate) fn average(t: &InfluenceGraph, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let nb = t.neighbors(i);
            nb.iter().map(|&j| x[j]).sum::<f64>() / nb.len() as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Energy {
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E_act")]
    pub e_act: f64,
}

/// Squared gaps over ordered linked pairs plus `R²` for each ordered unlinked
/// pair.
pub fn energy(t: &InfluenceGraph, s: &OpinionState) -> Energy {
    energy_of(t, &s.opinions, s.r)
}

pub(crate) fn energy_of(t: &InfluenceGraph, x: &[f64], r: f64) -> Energy {
    let n = x.len();
    let e_act = 2.0 * t.edges().iter().map(|&(i, j)| (x[i] - x[j]).powi(2)).sum::<f64>();
    let unlinked = n * n - t.graph.ordered_pair_count();
    Energy { e: e_act + r * r * unlinked as f64, e_act }
}
