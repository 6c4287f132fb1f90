use serde::Serialize;

use super::{influence_of, DynamicsError, InfluenceGraph, Trajectory};
use crate::graph::Graph;
use crate::spectral::{decompose, SpectralDecomposition};

/// Lock test on a state and its influence graph: every component spans at
/// most `bound`, and any two components joined by a physical edge are more
/// than `bound` apart. Averaging only shrinks component hulls, so from such a
/// state the influence graph never changes again. Components with no
/// physical edge between them can never link, so their distance is
/// irrelevant.
pub(crate) fn lock_holds_for(gph: &Graph, t: &InfluenceGraph, x: &[f64], bound: f64) -> bool {
    let comps = t.components();
    let mut lo = vec![f64::INFINITY; comps.len()];
    let mut hi = vec![f64::NEG_INFINITY; comps.len()];
    for (i, &xi) in x.iter().enumerate() {
        let c = t.component_of(i);
        lo[c] = lo[c].min(xi);
        hi[c] = hi[c].max(xi);
    }
    if (0..comps.len()).any(|c| hi[c] - lo[c] > bound) {
        return false;
    }
    gph.edges().iter().all(|&(p, q)| {
        let (a, b) = (t.component_of(p), t.component_of(q));
        a == b || (lo[b] - hi[a]).max(lo[a] - hi[b]) > bound
    })
}

/// Public form of the lock test for a raw state.
pub fn lock_holds(gph: &Graph, x: &[f64], r: f64) -> bool {
    lock_holds_for(gph, &influence_of(gph, x, r, 0.0), x, r)
}

/// Per-component eigen-expansions of a frozen influence graph.
#[derive(Debug, Clone)]
pub(crate) struct ModalBasis {
    parts: Vec<(Vec<usize>, SpectralDecomposition)>,
}

/// `‖x[K+m] − x∞‖ ≤ Σ |cᵢ| |λᵢ|ᵐ` over the non-top modes of every component.
#[derive(Debug, Clone)]
pub(crate) struct ModalTail {
    terms: Vec<(f64, f64)>,
}

impl ModalBasis {
    pub(crate) fn new(t: &InfluenceGraph) -> Result<Self, DynamicsError> {
        let mut parts = Vec::new();
        for comp in t.components() {
            if comp.len() < 2 {
                continue;
            }
            let (sub, _) = t.graph().induced_subgraph(comp)?;
            parts.push((comp.clone(), decompose(&sub)?));
        }
        Ok(ModalBasis { parts })
    }

    pub(crate) fn tail(&self, x: &[f64]) -> ModalTail {
        let mut terms = Vec::new();
        for (comp, dec) in &self.parts {
            let local: Vec<f64> = comp.iter().map(|&i| x[i]).collect();
            let c = dec.coefficients(&local);
            // Index 0 is the simple eigenvalue 1 of a connected component.
            for i in 1..c.len() {
                terms.push((c[i].abs(), dec.eigenvalues()[i].abs()));
            }
        }
        ModalTail { terms }
    }
}

impl ModalTail {
    pub(crate) fn mass(&self) -> f64 {
        self.terms.iter().map(|t| t.0).sum()
    }

    pub(crate) fn bound(&self, m: usize) -> f64 {
        self.terms.iter().map(|&(c, l)| c * l.powi(m.min(i32::MAX as usize) as i32)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyState {
    /// `x∞` per vertex.
    pub values: Vec<f64>,
    pub lock_step: usize,
    pub components: Vec<Vec<usize>>,
    /// Consensus value of each component, aligned with `components`.
    pub component_values: Vec<f64>,
}

/// Each locked component converges to its degree-weighted mean, which every
/// averaging step over a fixed connected graph preserves.
pub fn steady_state(traj: &Trajectory) -> Result<SteadyState, DynamicsError> {
    let (Some(k), Some(x)) = (traj.lock_step(), traj.lock_state()) else {
        return Err(DynamicsError::NotLocked);
    };
    let t = influence_of(traj.graph(), x, traj.r(), traj.neighbor_tol());
    let mut values = vec![0.0; x.len()];
    let mut component_values = Vec::new();
    for comp in t.components() {
        let (num, den) = comp.iter().fold((0.0, 0.0), |(s, w), &i| {
            let d = t.neighbors(i).len() as f64;
            (s + d * x[i], w + d)
        });
        let v = num / den;
        comp.iter().for_each(|&i| values[i] = v);
        component_values.push(v);
    }
    Ok(SteadyState { values, lock_step: k, components: t.components().to_vec(), component_values })
}

/// Smallest `N` with `‖x[k] − x∞‖ < ε` for every `k ≥ N`. Recorded states give
/// exact distances; beyond the last recorded state the modal tail bound is
/// used.
pub fn eps_convergence_time(traj: &Trajectory, ss: &SteadyState, eps: f64) -> Result<usize, DynamicsError> {
    if !(eps > 0.0) {
        return Err(DynamicsError::EpsTooSmall(eps));
    }
    let lock = traj.lock_step().ok_or(DynamicsError::NotLocked)?;
    let states = traj.states();
    if states.len() <= lock {
        return Err(DynamicsError::HistoryTruncated { needed: lock + 1, recorded: states.len() });
    }
    let last = states.len() - 1;
    let dist = |x: &[f64]| x.iter().zip(&ss.values).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();

    let t = influence_of(traj.graph(), &states[last], traj.r(), traj.neighbor_tol());
    let tail = ModalBasis::new(&t)?.tail(&states[last]);
    let mut m = 1;
    while tail.bound(m) >= eps {
        m += 1;
        if m > 100_000_000 {
            return Err(DynamicsError::EpsTooSmall(eps));
        }
    }
    if m > 1 {
        return Ok(last + m);
    }
    Ok(states.iter().rposition(|x| dist(x) >= eps).map_or(0, |k| k + 1))
}
