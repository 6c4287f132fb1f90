//! Regrouping a modal sum `Σ λᵢᵏ uᵢ` by `|λ|` so that even and odd steps
//! each become a sum of positive geometric terms.

use serde::Serialize;

use super::SlowMergeError;

/// Signed eigenvalues within this distance are the same eigenvalue.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EliminationResult {
    pub l: usize,
    /// Distinct `|λ|`, strictly descending and positive.
    pub mu: Vec<f64>,
    pub alpha: Vec<f64>,
    pub zeta: Vec<f64>,
    /// `(u⁺ + u⁻)/α`, max-abs entry 1, or zero when `α = 0`.
    pub even_vectors: Vec<Vec<f64>>,
    /// `(u⁺ − u⁻)/ζ`, likewise.
    pub odd_vectors: Vec<Vec<f64>>,
    /// Contribution of `λ = 0`, which only appears at step 0.
    pub null_vector: Vec<f64>,
}

impl EliminationResult {
    /// `Σ αᵢ μᵢᵏ vᵢ` for even `k`, `Σ ζᵢ μᵢᵏ zᵢ` for odd `k`.
    pub fn reconstruct(&self, k: u32) -> Vec<f64> {
        let (w, vs) = if k.is_multiple_of(2) { (&self.alpha, &self.even_vectors) } else { (&self.zeta, &self.odd_vectors) };
        let mut out = if k == 0 { self.null_vector.clone() } else { vec![0.0; self.l] };
        for ((m, a), v) in self.mu.iter().zip(w).zip(vs) {
            let c = a * m.powi(k as i32);
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
        out
    }
}

/// `Σ λᵢᵏ uᵢ` on the first `l` coordinates.
pub fn modal_sum(lambdas: &[f64], us: &[Vec<f64>], l: usize, k: u32) -> Vec<f64> {
    let mut out = vec![0.0; l];
    for (lam, u) in lambdas.iter().zip(us) {
        let c = lam.powi(k as i32);
        for (o, x) in out.iter_mut().zip(u) {
            *o += c * x;
        }
    }
    out
}

pub fn eliminate(lambdas: &[f64], us: &[Vec<f64>], l: usize) -> Result<EliminationResult, SlowMergeError> {
    if lambdas.len() != us.len() {
        return Err(SlowMergeError::LengthMismatch { lambdas: lambdas.len(), vectors: us.len() });
    }
    if let Some(u) = us.iter().find(|u| u.len() < l) {
        return Err(SlowMergeError::InvalidWindow { l, len: u.len() });
    }
    if lambdas.iter().chain(us.iter().flatten()).any(|x| !x.is_finite()) {
        return Err(SlowMergeError::PreconditionViolated("non-finite input".into()));
    }

    // Repeated signed eigenvalues are summed into one term.
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| lambdas[b].total_cmp(&lambdas[a]));
    let mut terms: Vec<(f64, Vec<f64>)> = Vec::new();
    for i in order {
        let u = &us[i][..l];
        match terms.last_mut() {
            Some((lam, acc)) if (*lam - lambdas[i]).abs() <= MERGE_TOL => add(acc, u, 1.0),
            _ => terms.push((lambdas[i], u.to_vec())),
        }
    }

    let mut null_vector = vec![0.0; l];
    let mut pos: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut neg: Vec<(f64, Vec<f64>)> = Vec::new();
    for (lam, u) in terms {
        if lam.abs() <= MERGE_TOL {
            add(&mut null_vector, &u, 1.0);
        } else if lam > 0.0 {
            pos.push((lam, u));
        } else {
            neg.push((-lam, u));
        }
    }

    let mut mus: Vec<f64> = pos.iter().chain(&neg).map(|t| t.0).collect();
    mus.sort_by(|a, b| b.total_cmp(a));
    mus.dedup_by(|a, b| (*a - *b).abs() <= MERGE_TOL);

    let find = |side: &[(f64, Vec<f64>)], m: f64| {
        side.iter().find(|t| (t.0 - m).abs() <= MERGE_TOL).map_or(vec![0.0; l], |t| t.1.clone())
    };
    let mut res = EliminationResult {
        l,
        mu: Vec::new(),
        alpha: Vec::new(),
        zeta: Vec::new(),
        even_vectors: Vec::new(),
        odd_vectors: Vec::new(),
        null_vector,
    };
    for m in mus {
        let (up, um) = (find(&pos, m), find(&neg, m));
        let mut even = up.clone();
        add(&mut even, &um, 1.0);
        let mut odd = up;
        add(&mut odd, &um, -1.0);
        let (a, v) = normalized(even);
        let (z, w) = normalized(odd);
        if a == 0.0 && z == 0.0 {
            continue;
        }
        res.mu.push(m);
        res.alpha.push(a);
        res.zeta.push(z);
        res.even_vectors.push(v);
        res.odd_vectors.push(w);
    }
    Ok(res)
}

fn add(acc: &mut [f64], u: &[f64], sign: f64) {
    for (a, x) in acc.iter_mut().zip(u) {
        *a += sign * x;
    }
}

fn normalized(mut v: Vec<f64>) -> (f64, Vec<f64>) {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m > 0.0 {
        v.iter_mut().for_each(|x| *x /= m);
    }
    (m, v)
}
