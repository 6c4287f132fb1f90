//! Exact rational simulation.
//!
//! Floating-point averaging reaches a bitwise fixed point after a few dozen
//! to a few thousand steps even when the real-arithmetic trajectory never
//! stops moving. This engine keeps every opinion as `Nᵢ / (2^E · Lᵏ)` with
//! integer `Nᵢ` and `L = lcm(1..=max degree)`, so one step is
//! `Nᵢ' = (L / |Nᵢ|) Σ_{j∈Nᵢ} N_j` and no rounding ever happens. Inputs are
//! converted from `f64` exactly.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{DynamicsError, OpinionState};
use crate::graph::Graph;

#[derive(Debug, Clone)]
pub struct ExactSimulation {
    graph: Graph,
    nums: Vec<BigInt>,
    scale: BigInt,
    threshold: BigInt,
    l: u64,
    k: usize,
    terminated_at: Option<usize>,
}

/// `x = m · 2^e` exactly.
fn dyadic(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let sign = if bits >> 63 == 1 { Sign::Minus } else { Sign::Plus };
    (BigInt::from_biguint(sign, m.into()), e)
}

fn ln_abs(v: &BigInt) -> f64 {
    let bits = v.bits();
    let shift = bits.saturating_sub(64);
    let top = (v.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl ExactSimulation {
    pub fn new(g: &Graph, s0: &OpinionState) -> Result<Self, DynamicsError> {
        s0.check(g)?;
        let parts: Vec<(BigInt, i64)> = s0.opinions().iter().map(|&x| dyadic(x)).collect();
        let (rm, re) = dyadic(s0.r());
        let e = parts.iter().map(|p| -p.1).chain([0, -re]).max().unwrap_or(0);
        let nums = parts.into_iter().map(|(m, pe)| m << (e + pe) as usize).collect();
        let l = (1..=g.degrees().into_iter().max().unwrap_or(1) as u64).fold(1u64, |a, d| a.lcm(&d));
        Ok(ExactSimulation {
            graph: g.clone(),
            nums,
            scale: BigInt::from(1) << e as usize,
            threshold: rm << (e + re) as usize,
            l,
            k: 0,
            terminated_at: None,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terminated_at(&self) -> Option<usize> {
        self.terminated_at
    }

    fn neighborhoods(&self) -> Vec<Vec<usize>> {
        let n = self.graph.n();
        let mut nb: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for &(i, j) in self.graph.edges() {
            if (&self.nums[i] - &self.nums[j]).abs() <= self.threshold {
                nb[i].push(j);
                nb[j].push(i);
            }
        }
        nb
    }

    /// Advances one step. Returns `true` when `x[k+1] = x[k]` exactly, in
    /// which case the state is left unchanged and `k` does not advance.
    pub fn step(&mut self) -> bool {
        if self.terminated_at.is_some() {
            return true;
        }
        let nb = self.neighborhoods();
        let next: Vec<BigInt> = nb
            .iter()
            .map(|set| {
                let mut sum = BigInt::zero();
                for &j in set {
                    sum += &self.nums[j];
                }
                sum * (self.l / set.len() as u64)
            })
            .collect();
        if next.iter().zip(&self.nums).all(|(a, b)| *a == b * self.l) {
            self.terminated_at = Some(self.k);
            return true;
        }
        self.nums = next;
        self.scale *= self.l;
        self.threshold *= self.l;
        self.k += 1;
        false
    }

    /// Opinions rounded to `f64`.
    pub fn to_f64(&self) -> Vec<f64> {
        self.nums
            .iter()
            .map(|v| ((v << 80usize) / &self.scale).to_f64().unwrap_or(f64::NAN) / 2f64.powi(80))
            .collect()
    }

    /// `ln ‖x − x̄‖` where `x̄` is the degree-weighted mean over each component
    /// of the current influence graph; `None` when the distance is exactly 0.
    pub fn ln_distance_to_limit(&self) -> Option<f64> {
        let nb = self.neighborhoods();
        let edges = self.graph.edges().iter().copied().filter(|&(i, j)| nb[i].contains(&j)).collect();
        let t = Graph::from_sorted_edges(self.graph.n(), edges);
        let mut logs = Vec::new();
        for comp in t.components() {
            let d: Vec<u64> = comp.iter().map(|&i| nb[i].len() as u64).collect();
            let total: u64 = d.iter().sum();
            let weighted: BigInt = comp.iter().zip(&d).map(|(&i, &di)| &self.nums[i] * di).sum();
            let q: BigInt = comp
                .iter()
                .map(|&i| {
                    let dev = &self.nums[i] * total - &weighted;
                    &dev * &dev
                })
                .sum();
            if !q.is_zero() {
                logs.push(ln_abs(&q) - 2.0 * (total as f64).ln());
            }
        }
        if logs.is_empty() {
            return None;
        }
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = top + logs.iter().map(|v| (v - top).exp()).sum::<f64>().ln();
        Some(0.5 * lse - ln_abs(&self.scale))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactRunReport {
    pub steps: usize,
    pub termination_step: Option<usize>,
    /// Geometric mean per-step contraction of the distance to the limit over
    /// the final `window` steps.
    pub decay_ratio: Option<f64>,
    pub final_ln_distance: Option<f64>,
}

impl ExactSimulation {
    /// Runs `steps` exact steps (or until termination) and measures the decay
    /// ratio over the last `window` of them.
    pub fn run(g: &Graph, s0: &OpinionState, steps: usize, window: usize) -> Result<ExactRunReport, DynamicsError> {
        let mut sim = ExactSimulation::new(g, s0)?;
        let start = steps.saturating_sub(window);
        let mut ln_start = None;
        for k in 0..steps {
            if k == start {
                ln_start = sim.ln_distance_to_limit();
            }
            if sim.step() {
                break;
            }
        }
        let ln_end = sim.ln_distance_to_limit();
        let decay_ratio = match (sim.terminated_at, ln_start, ln_end) {
            (None, Some(a), Some(b)) if window > 0 => Some(((b - a) / window as f64).exp()),
            _ => None,
        };
        Ok(ExactRunReport {
            steps: sim.k,
            termination_step: sim.terminated_at,
            decay_ratio,
            final_ln_distance: ln_end,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, Limits, StopOn};

    #[test]
    fn dyadic_is_exact() {
        for x in [0.1, -3.75, 1e-300, 5e-324, 123456.789] {
            let (m, e) = dyadic(x);
            let back = m.to_f64().unwrap() * 2f64.powi(e as i32);
            // Subnormal scaling can underflow in the check itself.
            if x.abs() > 1e-290 {
                assert_eq!(back, x);
            }
        }
    }

    #[test]
    fn matches_float_engine_early_on() {
        let g = Graph::path(4).unwrap();
        let s = OpinionState::new(vec![-1.0, 0.0, 1.0, -0.75], 1.0).unwrap();
        let t = simulate(&g, &s, Limits::new(12, StopOn::Horizon)).unwrap();
        let mut ex = ExactSimulation::new(&g, &s).unwrap();
        for k in 1..=12 {
            assert!(!ex.step());
            for (a, b) in ex.to_f64().iter().zip(t.state(k).unwrap()) {
                assert!((a - b).abs() < 1e-12, "step {k}");
            }
        }
    }

    #[test]
    fn p3_pure_mode_never_terminates() {
        let g = Graph::path(3).unwrap();
        let s = OpinionState::new(vec![0.1, 0.0, -0.1], 1.0).unwrap();
        // The float engine reaches a fixed point; the exact one halves forever.
        let float = simulate(&g, &s, Limits::new(5000, StopOn::Termination)).unwrap();
        assert!(float.termination_step().is_some());
        let rep = ExactSimulation::run(&g, &s, 3000, 50).unwrap();
        assert_eq!(rep.termination_step, None);
        assert!((rep.decay_ratio.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn consensus_terminates_at_zero() {
        let g = Graph::complete(3).unwrap();
        let s = OpinionState::new(vec![0.3; 3], 1.0).unwrap();
        let rep = ExactSimulation::run(&g, &s, 10, 5).unwrap();
        assert_eq!(rep.termination_step, Some(0));
        assert_eq!(rep.final_ln_distance, None);
    }
}
