//! When can two influence components take arbitrarily long to merge?
//!
//! A split `(V_P, V_Q)` names two vertex sets that will form separate
//! components. The sufficient check looks for an eigenvector of the `V_P`
//! block that is strictly one-signed on the vertices touching `V_Q`; such a
//! state can be made to merge at any prescribed time. The necessary check
//! looks for a one-signed vector in the eigenspaces restricted to the
//! boundary edges; when none exists the merge time is bounded.

mod elimination;
mod sign;

pub use elimination::{eliminate, modal_sum, EliminationResult, MERGE_TOL};
pub use sign::{gamma_floor, phi_ratio, sign_lemma_check, GammaFloor, PhiRatio, SignLemmaReport};

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{DynamicsError, OpinionState};
use crate::graph::{Graph, GraphError, PartiteSpec};
use crate::linalg::{orthonormal_basis, LinearProgram, LpOutcome, PivotLimit, Relation};
use crate::spectral::{decompose, SpectralError, CLUSTER_TOL};

/// Eigenvalues within this distance of 0 or 1 are outside the open interval.
pub const INTERVAL_TOL: f64 = 1e-9;
/// Smallest LP margin accepted as a strict sign.
pub const MARGIN_TOL: f64 = 1e-9;
/// Default vertex cap for exhaustive split enumeration.
pub const DEFAULT_MAX_N: usize = 8;
/// Witness entries are rounded to multiples of this before scaling.
const WITNESS_GRID: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Debug, thiserror::Error)]
pub enum SlowMergeError {
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("the subgraph induced on V_P is disconnected")]
    DisconnectedP,
    #[error("no physical edge joins V_P and V_Q")]
    NoBoundary,
    #[error("verdict does not carry a sufficient-condition witness")]
    NotSufficient,
    #[error("delta {delta} must be below v0 = {v0}")]
    DeltaTooLarge { delta: f64, v0: f64 },
    #[error("delta must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("delta {delta} must lie in (0, R/2) for R = {r}")]
    DeltaOutOfRange { delta: f64, r: f64 },
    #[error("vertices {0:?} outside the split touch V_P")]
    SpilloverVertices(Vec<usize>),
    #[error("vector is zero on the window")]
    ZeroOnWindow,
    #[error("window of length {l} does not fit vectors of length {len}")]
    InvalidWindow { l: usize, len: usize },
    #[error("{lambdas} eigenvalues but {vectors} vectors")]
    LengthMismatch { lambdas: usize, vectors: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("split enumeration is limited to n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },
    #[error(transparent)]
    Lp(#[from] PivotLimit),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Two disjoint vertex sets and the physical edges between them. Vertex
/// indices are 0-based and both sets are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitSpec {
    vp: Vec<usize>,
    vq: Vec<usize>,
    boundary_edges: Vec<(usize, usize)>,
    boundary_adjacent: Vec<usize>,
}

impl SplitSpec {
    pub fn new(g: &Graph, vp: &[usize], vq: &[usize]) -> Result<Self, SlowMergeError> {
        let n = g.n();
        let mut member = vec![0u8; n];
        for (set, tag) in [(vp, 1u8), (vq, 2u8)] {
            if set.is_empty() {
                return Err(SlowMergeError::InvalidSplit("both sides must be nonempty".into()));
            }
            for &v in set {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange(v, n).into());
                }
                if member[v] != 0 {
                    return Err(SlowMergeError::InvalidSplit(format!("vertex {v} is listed twice")));
                }
                member[v] = tag;
            }
        }
        let vp: Vec<usize> = (0..n).filter(|&v| member[v] == 1).collect();
        let vq: Vec<usize> = (0..n).filter(|&v| member[v] == 2).collect();
        let mut boundary_edges = Vec::new();
        for &i in &vp {
            for &j in g.neighbors(i) {
                if member[j] == 2 {
                    boundary_edges.push((i, j));
                }
            }
        }
        boundary_edges.sort_unstable();
        let mut boundary_adjacent: Vec<usize> = boundary_edges.iter().map(|e| e.0).collect();
        boundary_adjacent.dedup();
        Ok(SplitSpec { vp, vq, boundary_edges, boundary_adjacent })
    }

    pub fn vp(&self) -> &[usize] {
        &self.vp
    }

    pub fn vq(&self) -> &[usize] {
        &self.vq
    }

    /// `(i, j)` with `i ∈ V_P`, `j ∈ V_Q`, in lexicographic order.
    pub fn boundary_edges(&self) -> &[(usize, usize)] {
        &self.boundary_edges
    }

    /// The distinct `V_P` endpoints of boundary edges, ascending.
    pub fn boundary_adjacent(&self) -> &[usize] {
        &self.boundary_adjacent
    }

    pub fn l(&self) -> usize {
        self.boundary_adjacent.len()
    }

    pub fn b(&self) -> usize {
        self.boundary_edges.len()
    }
}

/// Position of `v` inside a sorted vertex set.
fn local(set: &[usize], v: usize) -> usize {
    set.binary_search(&v).expect("vertex belongs to the set")
}

fn in_open_interval(lambda: f64) -> bool {
    lambda > INTERVAL_TOL && lambda < 1.0 - INTERVAL_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    SufficientHolds,
    SufficientFails,
    NecessaryHolds,
    NecessaryFails,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub lambda: f64,
    /// For the sufficient check a vector over `V_P` (ascending), negative on
    /// the boundary-adjacent vertices, max-abs entry 1. For the necessary
    /// check a vector over the boundary edges, nonnegative, max entry 1.
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RecordReason {
    OutsideOpenInterval,
    /// The eigenspace restricts to `{0}` on the relevant coordinates.
    ZeroRestriction,
    NoOneSignedVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaRecord {
    pub lambda: f64,
    pub dimension: usize,
    pub reason: RecordReason,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeVerdict {
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
    /// One record per eigenvalue examined without success.
    pub certificate: Vec<LambdaRecord>,
    /// Strict-sign margin of the sufficient witness.
    pub margin: Option<f64>,
}

impl MergeVerdict {
    pub fn holds(&self) -> bool {
        matches!(self.kind, VerdictKind::SufficientHolds | VerdictKind::NecessaryHolds)
    }
}

/// A linear program over a free coefficient vector `c` (split as `p − q`)
/// followed by `extra` nonnegative variables.
pub(crate) struct FreeLp {
    dim: usize,
    lp: LinearProgram,
}

pub(crate) fn free_lp(dim: usize, extra: usize, objective: &[f64]) -> FreeLp {
    let mut obj = vec![0.0; 2 * dim];
    obj.extend_from_slice(objective);
    obj.resize(2 * dim + extra, 0.0);
    FreeLp { dim, lp: LinearProgram::new(2 * dim + extra).maximize(obj) }
}

impl FreeLp {
    pub(crate) fn add(&mut self, c: &[f64], extra: &[f64], rel: Relation, rhs: f64) {
        let mut row: Vec<f64> = c.to_vec();
        row.extend(c.iter().map(|x| -x));
        row.extend_from_slice(extra);
        self.lp.constraint(row, rel, rhs);
    }

    pub(crate) fn bound_coefficients(&mut self, cap: f64) {
        let width = 2 * self.dim + self.lp_extra();
        for j in 0..2 * self.dim {
            let mut row = vec![0.0; width];
            row[j] = 1.0;
            self.lp.constraint(row, Relation::Le, cap);
        }
    }

    fn lp_extra(&self) -> usize {
        self.lp.n_vars() - 2 * self.dim
    }

    pub(crate) fn solve(&self) -> Result<LpOutcome, SlowMergeError> {
        Ok(self.lp.solve()?)
    }

    pub(crate) fn coefficients(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|j| x[j] - x[self.dim + j]).collect()
    }
}

fn combine(vectors: &[Vec<f64>], c: &[f64]) -> Vec<f64> {
    let len = vectors.first().map_or(0, Vec::len);
    let mut out = vec![0.0; len];
    for (v, cj) in vectors.iter().zip(c) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += cj * x;
        }
    }
    out
}

fn rows_of(vectors: &[Vec<f64>], len: usize) -> Vec<Vec<f64>> {
    (0..len).map(|e| vectors.iter().map(|v| v[e]).collect()).collect()
}

/// A nonzero nonnegative vector in `span(vectors)` scaled to entry sum 1,
/// if one exists. The span is closed under negation, so this also decides
/// whether a nonpositive one exists.
pub fn nonnegative_combination(vectors: &[Vec<f64>]) -> Result<Option<Vec<f64>>, SlowMergeError> {
    let Some(len) = vectors.first().map(Vec::len) else {
        return Ok(None);
    };
    let dim = vectors.len();
    let rows = rows_of(vectors, len);
    let mut lp = free_lp(dim, 0, &[]);
    for r in &rows {
        lp.add(r, &[], Relation::Ge, 0.0);
    }
    let sums: Vec<f64> = (0..dim).map(|j| rows.iter().map(|r| r[j]).sum()).collect();
    lp.add(&sums, &[], Relation::Eq, 1.0);
    Ok(match lp.solve()? {
        LpOutcome::Optimal { x, .. } => {
            let w = combine(vectors, &lp.coefficients(&x));
            Some(w.into_iter().map(|v| v.max(0.0)).collect())
        }
        _ => None,
    })
}

/// Largest `t` such that some `c` with `‖c‖_∞ ≤ 1` makes every listed row of
/// `span(vectors)` at most `−t`. Returns `(t, c)` when `t > MARGIN_TOL`.
fn negative_margin(vectors: &[Vec<f64>], rows: &[usize]) -> Result<Option<(f64, Vec<f64>)>, SlowMergeError> {
    let dim = vectors.len();
    let mut lp = free_lp(dim, 1, &[1.0]);
    for &e in rows {
        let r: Vec<f64> = vectors.iter().map(|v| v[e]).collect();
        lp.add(&r, &[1.0], Relation::Le, 0.0);
    }
    lp.bound_coefficients(1.0);
    Ok(match lp.solve()? {
        LpOutcome::Optimal { x, value } if value > MARGIN_TOL => Some((value, lp.coefficients(&x))),
        _ => None,
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Looks for an eigenvalue `λ ∈ (0, 1)` of the `V_P` block whose eigenspace
/// holds a vector strictly one-signed on the boundary-adjacent vertices.
pub fn sufficient_check(gph: &Graph, split: &SplitSpec) -> Result<MergeVerdict, SlowMergeError> {
    if split.b() == 0 {
        return Err(SlowMergeError::NoBoundary);
    }
    let (gp, _) = gph.induced_subgraph(&split.vp)?;
    if !gp.is_connected() {
        return Err(SlowMergeError::DisconnectedP);
    }
    let dec = decompose(&gp)?;
    let rows: Vec<usize> = split.boundary_adjacent.iter().map(|&v| local(&split.vp, v)).collect();
    let mut certificate = Vec::new();
    for cluster in dec.clusters() {
        let dimension = cluster.indices.len();
        if !in_open_interval(cluster.value) {
            if (cluster.value - 1.0).abs() > CLUSTER_TOL {
                certificate.push(LambdaRecord {
                    lambda: cluster.value,
                    dimension,
                    reason: RecordReason::OutsideOpenInterval,
                });
            }
            continue;
        }
        let basis = dec.cluster_vectors(cluster);
        if let Some((t, c)) = negative_margin(&basis, &rows)? {
            let mut v = combine(&basis, &c);
            let m = max_abs(&v);
            v.iter_mut().for_each(|x| *x /= m);
            return Ok(MergeVerdict {
                kind: VerdictKind::SufficientHolds,
                witness: Some(Witness { lambda: cluster.value, vector: v }),
                certificate,
                margin: Some(t),
            });
        }
        certificate.push(LambdaRecord { lambda: cluster.value, dimension, reason: RecordReason::NoOneSignedVector });
    }
    Ok(MergeVerdict { kind: VerdictKind::SufficientFails, witness: None, certificate, margin: None })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlowState {
    pub state: OpinionState,
    pub lambda: f64,
    pub v0: f64,
    pub delta: f64,
    /// First step at which a `V_P`-`V_Q` link forms.
    pub predicted_merge: usize,
}

/// `⌈x⌉`, except that values within `1e-9` of an integer snap to it.
fn snapped_ceil(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 {
        r.max(0.0) as usize
    } else {
        x.ceil().max(0.0) as usize
    }
}

/// Builds the state whose `V_P` block is the sufficient witness scaled to
/// spread `R`, with `V_Q` parked at `R − δ`. The `V_P` block then decays
/// as `λᵏ` and the first link across forms once `v₀ λᵏ ≤ δ`.
pub fn construct_slow_state(
    gph: &Graph,
    split: &SplitSpec,
    verdict: &MergeVerdict,
    delta: f64,
    r: f64,
) -> Result<SlowState, SlowMergeError> {
    let witness = match (&verdict.kind, &verdict.witness) {
        (VerdictKind::SufficientHolds, Some(w)) if w.vector.len() == split.vp.len() => w,
        _ => return Err(SlowMergeError::NotSufficient),
    };
    if !(r.is_finite() && r > 0.0) {
        return Err(DynamicsError::InvalidBound(r).into());
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(SlowMergeError::InvalidDelta(delta));
    }
    let rows: Vec<usize> = split.boundary_adjacent.iter().map(|&v| local(&split.vp, v)).collect();

    // Rounding to a binary grid removes solver noise, so exact eigenvectors
    // such as [1, 0, −1] stay exact under averaging.
    let m = max_abs(&witness.vector);
    let mut v: Vec<f64> = witness.vector.iter().map(|x| (x / m / WITNESS_GRID).round() * WITNESS_GRID).collect();
    if rows.iter().any(|&i| v[i] > 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    if rows.iter().any(|&i| v[i] >= 0.0) {
        return Err(SlowMergeError::PreconditionViolated("witness is not strictly negative on the boundary".into()));
    }
    let spread = crate::dynamics::spread(&v);
    v.iter_mut().for_each(|x| *x *= r / spread);
    let v0 = -rows.iter().map(|&i| v[i]).fold(f64::NEG_INFINITY, f64::max);
    if delta >= v0 {
        return Err(SlowMergeError::DeltaTooLarge { delta, v0 });
    }

    let n = gph.n();
    let mut x = vec![r - delta; n];
    for (&p, &val) in split.vp.iter().zip(&v) {
        x[p] = val;
    }
    let mut in_p = vec![false; n];
    split.vp.iter().for_each(|&p| in_p[p] = true);
    let spill: Vec<usize> = (0..n)
        .filter(|&i| !in_p[i] && split.vq.binary_search(&i).is_err())
        .filter(|&i| gph.neighbors(i).iter().any(|&j| in_p[j]))
        .collect();
    if !spill.is_empty() {
        return Err(SlowMergeError::SpilloverVertices(spill));
    }
    let lambda = witness.lambda;
    let predicted_merge = snapped_ceil((v0 / delta).ln() / (1.0 / lambda).ln());
    Ok(SlowState { state: OpinionState::new(x, r)?, lambda, v0, delta, predicted_merge })
}

/// `[−R, 0, R, −(R−δ)]` on the four-vertex path and its merge time
/// `⌈log₂(R/δ)⌉`.
pub fn four_path_family(delta: f64, r: f64) -> Result<(OpinionState, usize), SlowMergeError> {
    if !(r.is_finite() && r > 0.0 && delta > 0.0 && delta < r / 2.0) {
        return Err(SlowMergeError::DeltaOutOfRange { delta, r });
    }
    let s = OpinionState::new(vec![-r, 0.0, r, -(r - delta)], r)?;
    Ok((s, snapped_ceil((r / delta).log2())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryEigenspace {
    pub eigenvalue: f64,
    /// Orthonormal basis of the restricted space; each vector has one entry
    /// per boundary edge. Empty when the space is `{0}`.
    pub basis: Vec<Vec<f64>>,
    /// Multiplicity of the eigenvalue in the `V_P` and `V_Q` blocks.
    pub p_multiplicity: usize,
    pub q_multiplicity: usize,
}

/// For every eigenvalue `≠ 1` of either block, the span of its eigenvectors
/// restricted to the boundary edges (`V_P` side at `i_e`, `V_Q` side at
/// `j_e`). Ordered by eigenvalue descending.
pub fn boundary_eigenspaces(gph: &Graph, split: &SplitSpec) -> Result<Vec<BoundaryEigenspace>, SlowMergeError> {
    if split.b() == 0 {
        return Err(SlowMergeError::NoBoundary);
    }
    // (value, is_p, restricted vectors)
    let mut pieces: Vec<(f64, bool, Vec<Vec<f64>>)> = Vec::new();
    for (set, is_p) in [(&split.vp, true), (&split.vq, false)] {
        let (sub, _) = gph.induced_subgraph(set)?;
        let dec = decompose(&sub)?;
        let rows: Vec<usize> = split
            .boundary_edges
            .iter()
            .map(|&(i, j)| local(set, if is_p { i } else { j }))
            .collect();
        for cluster in dec.clusters() {
            if (cluster.value - 1.0).abs() <= CLUSTER_TOL {
                continue;
            }
            let vs = dec.cluster_vectors(cluster).iter().map(|v| rows.iter().map(|&i| v[i]).collect()).collect();
            pieces.push((cluster.value, is_p, vs));
        }
    }
    pieces.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut out: Vec<(Vec<f64>, usize, usize, Vec<Vec<f64>>)> = Vec::new();
    let mut prev = f64::NAN;
    for (value, is_p, vs) in pieces {
        let mult = vs.len();
        let (pm, qm) = if is_p { (mult, 0) } else { (0, mult) };
        match out.last_mut() {
            Some(g) if prev - value <= CLUSTER_TOL => {
                g.0.push(value);
                g.1 += pm;
                g.2 += qm;
                g.3.extend(vs);
            }
            _ => out.push((vec![value], pm, qm, vs)),
        }
        prev = value;
    }
    Ok(out
        .into_iter()
        .map(|(values, p_multiplicity, q_multiplicity, vs)| BoundaryEigenspace {
            eigenvalue: values.iter().sum::<f64>() / values.len() as f64,
            basis: orthonormal_basis(&vs, 1e-9),
            p_multiplicity,
            q_multiplicity,
        })
        .collect())
}

/// Looks for an eigenvalue `λ ∈ (0, 1)` whose boundary-restricted eigenspace
/// holds a nonzero vector with all entries of one sign. When none exists the
/// two sides cannot take arbitrarily long to merge.
pub fn necessary_check(gph: &Graph, split: &SplitSpec) -> Result<MergeVerdict, SlowMergeError> {
    let spaces = boundary_eigenspaces(gph, split)?;
    let mut certificate = Vec::new();
    for space in spaces {
        let dimension = space.basis.len();
        let reason = if !in_open_interval(space.eigenvalue) {
            RecordReason::OutsideOpenInterval
        } else if space.basis.is_empty() {
            RecordReason::ZeroRestriction
        } else if let Some(w) = nonnegative_combination(&space.basis)? {
            let m = w.iter().copied().fold(0.0, f64::max);
            return Ok(MergeVerdict {
                kind: VerdictKind::NecessaryHolds,
                witness: Some(Witness { lambda: space.eigenvalue, vector: w.iter().map(|x| x / m).collect() }),
                certificate,
                margin: None,
            });
        } else {
            RecordReason::NoOneSignedVector
        };
        certificate.push(LambdaRecord { lambda: space.eigenvalue, dimension, reason });
    }
    Ok(MergeVerdict { kind: VerdictKind::NecessaryFails, witness: None, certificate, margin: None })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitOutcome {
    pub split: SplitSpec,
    pub verdict: MergeVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitScan {
    pub n: usize,
    /// Ordered pairs of disjoint nonempty vertex sets.
    pub pairs_enumerated: usize,
    /// Those with at least one boundary edge; each got a necessary check.
    pub pairs_checked: usize,
    /// Splits on which the necessary condition holds.
    pub holding: Vec<SplitOutcome>,
}

impl SplitScan {
    /// No split admits arbitrarily slow merging.
    pub fn all_fail(&self) -> bool {
        self.holding.is_empty()
    }
}

/// Runs the necessary check on every ordered split of `gph` with a boundary.
pub fn scan_splits(gph: &Graph, max_n: usize) -> Result<SplitScan, SlowMergeError> {
    let n = gph.n();
    if n > max_n {
        return Err(SlowMergeError::TooLarge { n, max: max_n });
    }
    let total = 3usize.pow(n as u32);
    let mut splits = Vec::new();
    let mut pairs_enumerated = 0;
    for code in 0..total {
        let (mut vp, mut vq, mut c) = (Vec::new(), Vec::new(), code);
        for v in 0..n {
            match c % 3 {
                1 => vp.push(v),
                2 => vq.push(v),
                _ => {}
            }
            c /= 3;
        }
        if vp.is_empty() || vq.is_empty() {
            continue;
        }
        pairs_enumerated += 1;
        let split = SplitSpec::new(gph, &vp, &vq)?;
        if split.b() > 0 {
            splits.push(split);
        }
    }
    let pairs_checked = splits.len();
    let outcomes: Vec<SplitOutcome> = splits
        .into_par_iter()
        .map(|split| necessary_check(gph, &split).map(|verdict| SplitOutcome { split, verdict }))
        .collect::<Result<_, _>>()?;
    let mut holding: Vec<SplitOutcome> = outcomes.into_iter().filter(|o| o.verdict.holds()).collect();
    holding.sort_by(|a, b| (&a.split.vp, &a.split.vq).cmp(&(&b.split.vp, &b.split.vq)));
    Ok(SplitScan { n, pairs_enumerated, pairs_checked, holding })
}

/// Exhaustive necessary-condition scan of a complete r-partite graph; every
/// split is expected to fail.
pub fn rpartite_no_slow_merge(spec: &PartiteSpec, max_n: usize) -> Result<SplitScan, SlowMergeError> {
    if spec.n() > max_n {
        return Err(SlowMergeError::TooLarge { n: spec.n(), max: max_n });
    }
    scan_splits(&Graph::complete_r_partite(spec), max_n)
}
