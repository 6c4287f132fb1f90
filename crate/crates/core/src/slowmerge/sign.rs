//! Sign-balance ratios of vectors on a window of leading coordinates.

use serde::Serialize;

use super::{free_lp, nonnegative_combination, SlowMergeError};
use crate::linalg::{orthonormal_basis, LpOutcome, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiRatio {
    pub value: f64,
    /// No strictly mixed signs on the window; `value` is then 0.
    pub same_sign: bool,
}

/// `min(|min v / max v|, |max v / min v|)` over `v[..l]`.
pub fn phi_ratio(v: &[f64], l: usize) -> Result<PhiRatio, SlowMergeError> {
    if l == 0 || l > v.len() {
        return Err(SlowMergeError::InvalidWindow { l, len: v.len() });
    }
    let w = &v[..l];
    if w.iter().all(|&x| x == 0.0) {
        return Err(SlowMergeError::ZeroOnWindow);
    }
    let mx = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mn = w.iter().copied().fold(f64::INFINITY, f64::min);
    if mx <= 0.0 || mn >= 0.0 {
        return Ok(PhiRatio { value: 0.0, same_sign: true });
    }
    Ok(PhiRatio { value: (mn / mx).abs().min((mx / mn).abs()), same_sign: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GammaFloor {
    /// The exact infimum of `phi_ratio` over nonzero vectors of the space.
    Exact(f64),
    /// Some nonzero vector of the space is one-signed on the window.
    SameSignExists,
    /// Some nonzero vector of the space vanishes on the window.
    ZeroOnWindow,
}

/// Smallest `phi_ratio(w, l)` over nonzero `w` in `span(basis)`.
///
/// `phi` is scale-free and `phi(w) = min(ρ(w), ρ(−w))` with
/// `ρ(w) = max w / |min w|`, so the floor is `min ρ` over the space. Fixing
/// `min w = −1` at coordinate `q` turns that into a linear program per `q`.
pub fn gamma_floor(basis: &[Vec<f64>], l: usize) -> Result<GammaFloor, SlowMergeError> {
    let len = basis.first().map_or(0, Vec::len);
    if l == 0 || l > len || basis.iter().any(|b| b.len() != len) {
        return Err(SlowMergeError::InvalidWindow { l, len });
    }
    let restricted: Vec<Vec<f64>> = basis.iter().map(|b| b[..l].to_vec()).collect();
    if orthonormal_basis(&restricted, 1e-9).len() < orthonormal_basis(basis, 1e-9).len() {
        return Ok(GammaFloor::ZeroOnWindow);
    }
    if nonnegative_combination(&restricted)?.is_some() {
        return Ok(GammaFloor::SameSignExists);
    }
    let dim = basis.len();
    let row = |e: usize| -> Vec<f64> { restricted.iter().map(|b| b[e]).collect() };
    let mut best = f64::INFINITY;
    for q in 0..l {
        let rq = row(q);
        if rq.iter().all(|&x| x == 0.0) {
            continue;
        }
        let mut lp = free_lp(dim, 1, &[-1.0]);
        for e in 0..l {
            let re = row(e);
            lp.add(&re, &[0.0], Relation::Ge, -1.0);
            lp.add(&re, &[-1.0], Relation::Le, 0.0);
        }
        lp.add(&rq, &[0.0], Relation::Eq, -1.0);
        if let LpOutcome::Optimal { value, .. } = lp.solve()? {
            best = best.min(-value);
        }
    }
    if best.is_finite() {
        Ok(GammaFloor::Exact(best))
    } else {
        Ok(GammaFloor::SameSignExists)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignLemmaReport {
    pub gamma_prime: f64,
    /// `max(v+u) > 0` and `|max(v+u) / min(v+u)| ≥ γ′`.
    pub plus_holds: bool,
    /// The same for `v − u`.
    pub minus_holds: bool,
    /// The lower bound on `max(v+u)`, checked only when the plus statement
    /// holds and `min(v−u) < 0`.
    pub plus_bound: Option<bool>,
}

impl SignLemmaReport {
    pub fn holds(&self) -> bool {
        (self.plus_holds || self.minus_holds) && self.plus_bound != Some(false)
    }
}

const SIGN_SLACK: f64 = 1e-12;

/// For `v` with mixed signs and `0 < γ ≤ |max v / min v|`, adding or
/// subtracting any `u` keeps one of `v ± u` positive somewhere with its
/// sign ratio at least `γ/(γ+2)`.
pub fn sign_lemma_check(v: &[f64], u: &[f64], gamma: f64) -> Result<SignLemmaReport, SlowMergeError> {
    let bad = |m: String| Err(SlowMergeError::PreconditionViolated(m));
    if v.is_empty() || v.len() != u.len() {
        return bad(format!("v and u must be nonempty and equal length, got {} and {}", v.len(), u.len()));
    }
    if v.iter().chain(u).any(|x| !x.is_finite()) || !gamma.is_finite() {
        return bad("entries and gamma must be finite".into());
    }
    let (vmax, vmin) = extremes(v);
    if !(vmax > 0.0 && vmin < 0.0) {
        return bad("v must have mixed signs".into());
    }
    let ceiling = (vmax / vmin).abs();
    if !(gamma > 0.0 && gamma <= ceiling * (1.0 + SIGN_SLACK)) {
        return bad(format!("gamma must lie in (0, {ceiling}], got {gamma}"));
    }
    let gp = gamma / (gamma + 2.0);
    let plus: Vec<f64> = v.iter().zip(u).map(|(a, b)| a + b).collect();
    let minus: Vec<f64> = v.iter().zip(u).map(|(a, b)| a - b).collect();
    let statement = |w: &[f64]| {
        let (mx, mn) = extremes(w);
        mx > 0.0 && (mn >= 0.0 || (mx / mn).abs() >= gp * (1.0 - SIGN_SLACK))
    };
    let plus_holds = statement(&plus);
    let minus_holds = statement(&minus);
    let (pmax, _) = extremes(&plus);
    let (mmax, mmin) = extremes(&minus);
    let plus_bound = (plus_holds && mmin < 0.0).then(|| {
        let rhs = (gamma * mmin.abs() - mmax.max(0.0)) / (gamma + 1.0);
        let scale = v.iter().chain(u).fold(1.0f64, |m, x| m.max(x.abs()));
        pmax >= rhs - SIGN_SLACK * scale
    });
    Ok(SignLemmaReport { gamma_prime: gp, plus_holds, minus_holds, plus_bound })
}

fn extremes(w: &[f64]) -> (f64, f64) {
    w.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(mx, mn), &x| (mx.max(x), mn.min(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::CounterRng;

    #[test]
    fn phi_examples() {
        assert_eq!(phi_ratio(&[1.0, 0.0, -2.0], 3).unwrap().value, 0.5);
        assert_eq!(phi_ratio(&[1.0, -1.0], 2).unwrap().value, 1.0);
        let p = phi_ratio(&[3.0, 1.0], 2).unwrap();
        assert!(p.same_sign && p.value == 0.0);
        assert!(matches!(phi_ratio(&[0.0, 0.0, 5.0], 2), Err(SlowMergeError::ZeroOnWindow)));
        assert!(matches!(phi_ratio(&[1.0], 2), Err(SlowMergeError::InvalidWindow { .. })));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_floor(&[vec![1.0, 0.0, -1.0]], 3).unwrap(), GammaFloor::Exact(1.0));
        match gamma_floor(&[vec![1.0, 0.0, -2.0]], 3).unwrap() {
            GammaFloor::Exact(g) => assert!((g - 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let space = [vec![1.0, 0.0, -1.0], vec![0.0, 1.0, 1.0]];
        assert_eq!(gamma_floor(&space, 3).unwrap(), GammaFloor::SameSignExists);
        assert_eq!(gamma_floor(&[vec![0.0, 0.0, 1.0]], 2).unwrap(), GammaFloor::ZeroOnWindow);
    }

    #[test]
    fn gamma_in_two_dimensions() {
        // The space is {[a, b, −(a+b)]}; the ratio bottoms out at a = b.
        let space = [vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]];
        match gamma_floor(&space, 3).unwrap() {
            GammaFloor::Exact(g) => assert!((g - 0.5).abs() < 1e-9, "{g}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sign_lemma_examples() {
        let r = sign_lemma_check(&[1.0, -1.0], &[0.0, 0.0], 1.0).unwrap();
        assert!(r.plus_holds && r.holds());
        assert!((r.gamma_prime - 1.0 / 3.0).abs() < 1e-15);
        let r = sign_lemma_check(&[1.0, -1.0], &[-1.0, 1.0], 1.0).unwrap();
        assert!(r.minus_holds && r.holds());
        assert!(sign_lemma_check(&[1.0, 1.0], &[0.0, 0.0], 1.0).is_err());
        assert!(sign_lemma_check(&[1.0, -2.0], &[0.0, 0.0], 0.6).is_err());
    }

    #[test]
    fn sign_lemma_random() {
        let mut rng = CounterRng::new(7).unwrap();
        let mut checked = 0;
        while checked < 2000 {
            let n = 2 + rng.below(5) as usize;
            let v: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
            let (mx, mn) = extremes(&v);
            if !(mx > 0.0 && mn < 0.0) {
                continue;
            }
            let s = [0.1, 1.0, 10.0][rng.below(3) as usize];
            let u: Vec<f64> = (0..n).map(|_| s * rng.normal()).collect();
            let gamma = rng.uniform_in(1e-3, 1.0) * (mx / mn).abs();
            assert!(sign_lemma_check(&v, &u, gamma).unwrap().holds(), "{v:?} {u:?} {gamma}");
            checked += 1;
        }
    }
}
