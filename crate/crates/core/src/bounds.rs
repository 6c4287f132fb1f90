//! Closed-form convergence-time bounds and the states that witness them.
//! Logarithms are natural; every bound is a ratio of logs, so the base
//! cancels.

use serde::Serialize;

use crate::dynamics::{DynamicsError, OpinionState};
use crate::graph::{Graph, GraphError};
use crate::spectral::{decompose, SpectralError};

#[derive(Debug, thiserror::Error)]
pub enum BoundsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("graph is complete; every non-top eigenvalue is zero")]
    CompleteGraph,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    ConductanceLower,
    ConditionalUpper,
    LinkBreakBudget,
    Lambda2Diameter,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: f64,
    /// Set when the inputs sit outside the range where the bound says
    /// anything; `value` is then 0.
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
}

impl BoundReport {
    fn new(kind: BoundKind, value: f64) -> Self {
        BoundReport { kind, value, degenerate: false, n: None, r: None, eps: None, phi: None, d: None }
    }
}

fn positive(name: &str, v: f64) -> Result<(), BoundsError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(BoundsError::InvalidInput(format!("{name} must be positive, got {v}")))
    }
}

/// `ln(ε√2/R) / ln(1 − 2φ)`: no state can ε-converge faster on a graph of
/// conductance `φ`.
pub fn conductance_lower_bound(phi: f64, eps: f64, r: f64) -> Result<BoundReport, BoundsError> {
    positive("phi", phi)?;
    positive("eps", eps)?;
    positive("R", r)?;
    let mut rep = BoundReport::new(BoundKind::ConductanceLower, 0.0);
    rep.phi = Some(phi);
    rep.eps = Some(eps);
    rep.r = Some(r);
    let ratio = eps * std::f64::consts::SQRT_2 / r;
    if phi >= 0.5 || ratio >= 1.0 {
        rep.degenerate = true;
        return Ok(rep);
    }
    rep.value = ratio.ln() / (1.0 - 2.0 * phi).ln();
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalBound {
    pub kappa_eps: f64,
    pub kappa_r_half: f64,
    /// `min(⌈κ(ε)⌉, κ(R/2))`.
    pub bound: f64,
    /// `1 − 1/(n² d)`, the ceiling on `|λ₂|` the bound rests on.
    pub lambda2_ceiling: f64,
}

fn kappa(n: usize, d: usize, eps: f64, r: f64) -> f64 {
    let n2 = (n * n) as f64;
    (eps / (n2 * r)).ln() / (1.0 - 1.0 / (n2 * d as f64)).ln()
}

/// Upper bound on the ε-convergence time when the influence graph never
/// changes; `d` is the diameter of the physical graph.
pub fn conditional_upper_bound(n: usize, d: usize, eps: f64, r: f64) -> Result<ConditionalBound, BoundsError> {
    if n < 2 || d < 1 {
        return Err(BoundsError::InvalidInput(format!("need n >= 2 and d >= 1, got n = {n}, d = {d}")));
    }
    positive("eps", eps)?;
    positive("R", r)?;
    let kappa_eps = kappa(n, d, eps, r);
    let kappa_r_half = kappa(n, d, r / 2.0, r);
    Ok(ConditionalBound {
        kappa_eps,
        kappa_r_half,
        bound: kappa_eps.ceil().min(kappa_r_half),
        lambda2_ceiling: lambda2_ceiling(n, d),
    })
}

impl ConditionalBound {
    pub fn report(&self, n: usize, d: usize, eps: f64, r: f64) -> BoundReport {
        let mut rep = BoundReport::new(BoundKind::ConditionalUpper, self.bound);
        rep.n = Some(n);
        rep.d = Some(d);
        rep.eps = Some(eps);
        rep.r = Some(r);
        rep
    }
}

pub fn lambda2_ceiling(n: usize, d: usize) -> f64 {
    1.0 - 1.0 / ((n * n) as f64 * d as f64)
}

pub fn lambda2_report(n: usize, d: usize) -> BoundReport {
    let mut rep = BoundReport::new(BoundKind::Lambda2Diameter, lambda2_ceiling(n, d));
    rep.n = Some(n);
    rep.d = Some(d);
    rep
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreakBudget {
    pub per_break_decrement: f64,
    pub initial_energy_cap: f64,
    pub max_breaks: u128,
}

/// Energy starts below `n²R²` and every link break releases at least
/// `R²/(2n³)`, so at most `2n⁵` breaks can ever happen.
pub fn link_break_budget(n: usize, r: f64) -> Result<BreakBudget, BoundsError> {
    if n == 0 {
        return Err(BoundsError::InvalidInput("n must be at least 1".into()));
    }
    positive("R", r)?;
    let nf = n as f64;
    Ok(BreakBudget {
        per_break_decrement: r * r / (2.0 * nf * nf * nf),
        initial_energy_cap: nf * nf * r * r,
        max_breaks: 2 * (n as u128).pow(5),
    })
}

impl BreakBudget {
    pub fn report(&self, n: usize, r: f64) -> BoundReport {
        let mut rep = BoundReport::new(BoundKind::LinkBreakBudget, self.max_breaks as f64);
        rep.n = Some(n);
        rep.r = Some(r);
        rep
    }
}

/// A second eigenvector scaled to spread `scale · R`. With `scale < 1` the
/// influence graph is the whole physical graph forever and the distance to
/// consensus shrinks by exactly `|λ₂|` per step.
pub fn witness_lower_bound(gph: &Graph, r: f64, scale: f64) -> Result<OpinionState, BoundsError> {
    positive("R", r)?;
    if !(scale > 0.0 && scale < 1.0) {
        return Err(BoundsError::InvalidInput(format!("scale must lie in (0, 1), got {scale}")));
    }
    if !gph.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    if gph.is_complete() {
        return Err(BoundsError::CompleteGraph);
    }
    let v = decompose(gph)?.eigenvector(1);
    let spread = crate::dynamics::spread(&v);
    let x = v.iter().map(|a| a * scale * r / spread).collect();
    Ok(OpinionState::new(x, r)?)
}
