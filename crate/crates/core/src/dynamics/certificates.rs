//! Step-by-step checks of the energy inequalities along a trajectory.

use std::collections::HashMap;

use serde::Serialize;

use super::{influence_of, DynamicsError, EventKind, Trajectory};
use crate::spectral::decompose;

const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EnergyClause {
    /// `E[k+1] ≤ E[k]`.
    NonIncreasing,
    /// `E[k] − E[k+1] ≥ (1 − λ_k²) E_act[k]`.
    SpectralDecrement,
    /// `1 − λ_k² ≥ 3 / (2 n² d_eff)`.
    GapFloor,
    /// A step with a link break releases at least `R² / (2n³)`.
    BreakDecrement,
    /// Before a break the active energy exceeds `R² / 3`.
    BreakActiveEnergy,
    /// A breaking pair has neighbours more than `R` apart.
    BreakWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateFailure {
    pub k: usize,
    pub clause: EnergyClause,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub steps_checked: usize,
    pub break_steps: usize,
    pub breaks: usize,
    /// Smallest `(1 − λ_k²) − 3/(2n² d_eff)` seen; `None` when no step had an
    /// edge.
    pub min_gap_margin: Option<f64>,
    pub failures: Vec<CertificateFailure>,
}

impl EnergyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_energy_certificates(traj: &Trajectory) -> Result<EnergyReport, DynamicsError> {
    if !traj.history_complete() {
        return Err(DynamicsError::HistoryTruncated { needed: traj.last_step() + 1, recorded: traj.states().len() });
    }
    let g = traj.graph();
    let n = g.n() as f64;
    let r2 = traj.r() * traj.r();
    let energy = traj.energy();
    let states = traj.states();

    let mut breaks_at: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for e in traj.events() {
        if let EventKind::LinkBreak { i, j } = e.kind {
            breaks_at.entry(e.k).or_default().push((i, j));
        }
    }

    // λ_k depends only on the influence graph, which changes rarely.
    let mut lambda_cache: HashMap<Vec<(usize, usize)>, f64> = HashMap::new();
    let mut report =
        EnergyReport { steps_checked: 0, break_steps: 0, breaks: 0, min_gap_margin: None, failures: Vec::new() };
    let mut failures = Vec::new();

    for k in 0..traj.last_step() {
        let x = &states[k];
        let t = influence_of(g, x, traj.r(), traj.neighbor_tol());
        let (e0, e1) = (energy[k].e, energy[k + 1].e);
        let drop = e0 - e1;
        let e_act = energy[k].e_act;

        if e1 > e0 + SLACK {
            failures.push(fail(k, EnergyClause::NonIncreasing, e1, e0));
        }

        let lambda = match lambda_cache.get(t.edges()) {
            Some(&l) => l,
            None => {
                let mut l: f64 = 0.0;
                for comp in t.components() {
                    if comp.len() > 1 {
                        let (sub, _) = t.graph().induced_subgraph(comp)?;
                        l = l.max(decompose(&sub)?.max_abs_nontop());
                    }
                }
                lambda_cache.insert(t.edges().to_vec(), l);
                l
            }
        };
        let gap = 1.0 - lambda * lambda;
        if drop < gap * e_act - SLACK {
            failures.push(fail(k, EnergyClause::SpectralDecrement, drop, gap * e_act));
        }
        let d_eff = t.graph().effective_diameter();
        if d_eff > 0 {
            let floor = 3.0 / (2.0 * n * n * d_eff as f64);
            report.min_gap_margin = Some(report.min_gap_margin.map_or(gap - floor, |m: f64| m.min(gap - floor)));
            if gap < floor - SLACK {
                failures.push(fail(k, EnergyClause::GapFloor, gap, floor));
            }
        }

        if let Some(pairs) = breaks_at.get(&(k + 1)) {
            report.break_steps += 1;
            report.breaks += pairs.len();
            let need = r2 / (2.0 * n * n * n);
            if drop < need - SLACK {
                failures.push(fail(k, EnergyClause::BreakDecrement, drop, need));
            }
            if e_act <= r2 / 3.0 - SLACK {
                failures.push(fail(k, EnergyClause::BreakActiveEnergy, e_act, r2 / 3.0));
            }
            for &(i, j) in pairs {
                let spread = t
                    .neighbors(i)
                    .iter()
                    .flat_map(|&p| t.neighbors(j).iter().map(move |&q| (x[p] - x[q]).abs()))
                    .fold(0.0, f64::max);
                if spread <= traj.r() {
                    failures.push(fail(k, EnergyClause::BreakWitness, spread, traj.r()));
                }
            }
        }
        report.steps_checked += 1;
    }
    report.failures = failures;
    Ok(report)
}

fn fail(k: usize, clause: EnergyClause, lhs: f64, rhs: f64) -> CertificateFailure {
    CertificateFailure { k, clause, lhs, rhs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, Limits, OpinionState, StopOn};
    use crate::graph::Graph;

    fn run(g: &Graph, x: &[f64], steps: usize) -> Trajectory {
        simulate(g, &OpinionState::new(x.to_vec(), 1.0).unwrap(), Limits::new(steps, StopOn::Horizon)).unwrap()
    }

    #[test]
    fn four_path_passes_without_breaks() {
        let t = run(&Graph::path(4).unwrap(), &[-1.0, 0.0, 1.0, -0.75], 30);
        let rep = verify_energy_certificates(&t).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.breaks, 0);
        assert_eq!(rep.steps_checked, 30);
    }

    #[test]
    fn break_steps_are_checked() {
        // Each triangle pulls its bridge end inward and the bridge snaps at
        // the first step.
        let t = run(&Graph::dumbbell(6).unwrap(), &[0.06, 0.18, 0.57, 1.57, 2.23, 2.27], 40);
        assert_eq!(t.events()[0].kind, EventKind::LinkBreak { i: 2, j: 3 });
        assert_eq!(t.events()[0].k, 1);
        let rep = verify_energy_certificates(&t).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.breaks, 1);
    }

    #[test]
    fn consensus_is_tight() {
        let t = run(&Graph::star(4).unwrap(), &[0.5; 4], 3);
        let rep = verify_energy_certificates(&t).unwrap();
        assert!(rep.passed());
        // Only the missing pairs contribute: R²(n² − (n + 2m)) = 16 − 10.
        assert!(t.energy().iter().all(|e| e.e == 6.0 && e.e_act == 0.0));
    }
}
