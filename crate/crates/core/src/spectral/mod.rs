//! Spectra of normalized adjacency matrices.
//!
//! `A = D⁻¹A_adj` is not symmetric, but `M = D^{1/2} A D^{-1/2}` is, so the
//! eigenpairs come from a symmetric solver and are mapped back through
//! `D^{-1/2}`. The orthonormal eigenvectors of `M` are kept to expand states
//! without inverting the (non-orthogonal) eigenvector matrix of `A`.

mod rpartite;

pub use rpartite::{rpartite_eigenbasis, verify_rpartite_basis, RPartiteReport, LocalVector, RPartiteEigenbasis};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::graph::Graph;
use crate::linalg::{dot, symmetric_eigen, NoConvergence};

/// Eigenvalues closer than this are treated as one repeated eigenvalue.
pub const CLUSTER_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error(transparent)]
    NoConvergence(#[from] NoConvergence),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("initial spread {spread} is not below the confidence bound {r}")]
    SpreadTooLarge { spread: f64, r: f64 },
    #[error("state has {got} entries, graph has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub value: f64,
    /// Positions in the `|λ|`-descending ordering.
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    sym_vectors: DMatrix<f64>,
    scales: Vec<f64>,
    sqrt_deg: Vec<f64>,
    clusters: Vec<Cluster>,
}

pub fn decompose(g: &Graph) -> Result<SpectralDecomposition, SpectralError> {
    let n = g.n();
    let sqrt_deg: Vec<f64> = g.degrees().iter().map(|&d| (d as f64).sqrt()).collect();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for &j in g.neighbors(i) {
            m[(i, j)] = 1.0 / (sqrt_deg[i] * sqrt_deg[j]);
        }
    }
    let (vals, vecs) = symmetric_eigen(&m)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].abs().total_cmp(&vals[a].abs()).then(vals[b].total_cmp(&vals[a])));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = DMatrix::<f64>::zeros(n, n);
    let mut sym_vectors = DMatrix::<f64>::zeros(n, n);
    let mut scales = Vec::with_capacity(n);
    for (pos, &k) in order.iter().enumerate() {
        eigenvalues.push(vals[k]);
        let mut u: Vec<f64> = vecs.column(k).iter().copied().collect();
        let mut v: Vec<f64> = u.iter().zip(&sqrt_deg).map(|(x, s)| x / s).collect();
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= s);
        if v.iter().find(|x| x.abs() > 1e-12).is_some_and(|&x| x < 0.0) {
            v.iter_mut().for_each(|x| *x = -*x);
            u.iter_mut().for_each(|x| *x = -*x);
        }
        eigenvectors.set_column(pos, &nalgebra::DVector::from_vec(v));
        sym_vectors.set_column(pos, &nalgebra::DVector::from_vec(u));
        scales.push(s);
    }
    let clusters = cluster_values(&eigenvalues, CLUSTER_TOL);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors, sym_vectors, scales, sqrt_deg, clusters })
}

/// Groups values equal within `tol` (single linkage over the sorted values),
/// ordered by value descending.
fn cluster_values(values: &[f64], tol: f64) -> Vec<Cluster> {
    let mut by_value: Vec<usize> = (0..values.len()).collect();
    by_value.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut prev = f64::NAN;
    for &i in &by_value {
        match clusters.last_mut() {
            Some(c) if prev - values[i] <= tol => c.indices.push(i),
            _ => clusters.push(Cluster { value: 0.0, indices: vec![i] }),
        }
        prev = values[i];
    }
    for c in &mut clusters {
        c.value = c.indices.iter().map(|&i| values[i]).sum::<f64>() / c.indices.len() as f64;
        c.indices.sort_unstable();
    }
    clusters
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Sorted by `|λ|` descending, ties by value descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unit-norm eigenvectors of `A` as columns, matching `eigenvalues()`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }

    /// Eigenvalue clusters ordered by value descending.
    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    /// Indices ordered by eigenvalue descending (the second ordering).
    pub fn order_by_value(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n()).collect();
        idx.sort_by(|&a, &b| self.eigenvalues[b].total_cmp(&self.eigenvalues[a]).then(a.cmp(&b)));
        idx
    }

    /// Second eigenvalue in the `|λ|` ordering; 0 for a single vertex.
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues.get(1).copied().unwrap_or(0.0)
    }

    /// Largest `|λ|` outside the cluster(s) at 1.
    pub fn max_abs_nontop(&self) -> f64 {
        self.eigenvalues.iter().filter(|l| (*l - 1.0).abs() > CLUSTER_TOL).fold(0.0, |m, l| m.max(l.abs()))
    }

    /// Coefficients `c` with `x = Σ cᵢ vᵢ` in the `eigenvectors()` basis.
    pub fn coefficients(&self, x: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = x.iter().zip(&self.sqrt_deg).map(|(a, s)| a * s).collect();
        (0..self.n())
            .map(|i| {
                let u = self.sym_vectors.column(i);
                self.scales[i] * u.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect()
    }

    /// The eigenvector matrix inverse, from the orthonormal symmetric basis.
    pub fn inverse_eigenvectors(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.scales[i] * self.sym_vectors[(j, i)] * self.sqrt_deg[j])
    }

    /// Orthonormal eigenvectors of the symmetrized matrix.
    pub fn symmetric_eigenvectors(&self) -> &DMatrix<f64> {
        &self.sym_vectors
    }

    /// Eigenvectors (unit norm) of one cluster.
    pub fn cluster_vectors(&self, c: &Cluster) -> Vec<Vec<f64>> {
        c.indices.iter().map(|&i| self.eigenvector(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectrumShape {
    pub lambda1_is_1_simple: bool,
    pub abs_lambda2_positive: bool,
    pub has_positive_nontop: bool,
}

impl SpectrumShape {
    pub fn all(&self) -> bool {
        self.lambda1_is_1_simple && self.abs_lambda2_positive && self.has_positive_nontop
    }
}

pub fn check_spectrum_shape(g: &Graph, dec: &SpectralDecomposition) -> Result<SpectrumShape, SpectralError> {
    if g.is_complete() {
        return Err(SpectralError::PreconditionViolated("graph is complete".into()));
    }
    if !g.is_connected() {
        return Err(SpectralError::PreconditionViolated("graph is disconnected".into()));
    }
    let ev = dec.eigenvalues();
    let tol = CLUSTER_TOL;
    Ok(SpectrumShape {
        lambda1_is_1_simple: (ev[0] - 1.0).abs() <= tol && ev.iter().skip(1).all(|l| (l - 1.0).abs() > tol),
        abs_lambda2_positive: ev.len() > 1 && ev[1].abs() > tol,
        has_positive_nontop: ev.iter().skip(1).any(|&l| l > tol),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonterminationCertificate {
    pub certified: bool,
    pub lambda2: f64,
    /// Norm of the coefficients on every eigenvalue with `|λ| = |λ₂|`.
    pub c2_magnitude: f64,
}

/// With spread below `r` the influence graph is `g` forever, so the state is
/// `Σ cᵢ λᵢᵏ vᵢ` and any nonzero component on the slowest modes keeps it from
/// ever reaching its limit exactly.
pub fn nontermination_certificate(g: &Graph, x0: &[f64], r: f64) -> Result<NonterminationCertificate, SpectralError> {
    if x0.len() != g.n() {
        return Err(SpectralError::DimensionMismatch { expected: g.n(), got: x0.len() });
    }
    if g.is_complete() || !g.is_connected() {
        return Err(SpectralError::PreconditionViolated("graph must be connected and incomplete".into()));
    }
    let (lo, hi) = x0.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if hi - lo >= r {
        return Err(SpectralError::SpreadTooLarge { spread: hi - lo, r });
    }
    let dec = decompose(g)?;
    let l2 = dec.lambda2().abs();
    let c = dec.coefficients(x0);
    let mag = (1..dec.n())
        .filter(|&i| (dec.eigenvalues()[i].abs() - l2).abs() <= CLUSTER_TOL)
        .map(|i| c[i] * c[i])
        .sum::<f64>()
        .sqrt();
    Ok(NonterminationCertificate { certified: mag > 1e-9, lambda2: dec.lambda2(), c2_magnitude: mag })
}

/// Largest eigen-residual `‖Av − λv‖` over all pairs.
pub fn max_residual(g: &Graph, dec: &SpectralDecomposition) -> f64 {
    let a = g.normalized_adjacency();
    (0..dec.n())
        .map(|i| {
            let v = dec.eigenvectors().column(i);
            (&a * v - v * dec.eigenvalues()[i]).norm()
        })
        .fold(0.0, f64::max)
}

pub(crate) fn unit(v: &[f64]) -> Vec<f64> {
    let n = dot(v, v).sqrt();
    v.iter().map(|x| x / n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(v: &[f64]) -> Vec<f64> {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    #[test]
    fn p3_spectrum() {
        let g = Graph::path(3).unwrap();
        let dec = decompose(&g).unwrap();
        let ev = dec.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 0.5).abs() < 1e-12);
        assert!((ev[2] + 1.0 / 6.0).abs() < 1e-12);
        let v = dec.eigenvector(1);
        let s = 1.0 / 2f64.sqrt();
        assert!((v[0] - s).abs() < 1e-12 && v[1].abs() < 1e-12 && (v[2] + s).abs() < 1e-12);
        assert!(max_residual(&g, &dec) < 1e-12);
    }

    #[test]
    fn p4_and_complete_spectra() {
        let dec = decompose(&Graph::path(4).unwrap()).unwrap();
        let ev = sorted(dec.eigenvalues());
        for (a, b) in ev.iter().zip([1.0, 0.7287135538781691, 1.0 / 6.0, -0.22871355387816908]) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        let dec = decompose(&Graph::complete(4).unwrap()).unwrap();
        assert!((dec.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!(dec.eigenvalues()[1..].iter().all(|l| l.abs() < 1e-12));
        assert_eq!(dec.clusters().len(), 2);
        assert_eq!(dec.clusters()[1].indices, vec![1, 2, 3]);
    }

    #[test]
    fn coefficients_reconstruct_state() {
        let g = Graph::dumbbell(7).unwrap();
        let dec = decompose(&g).unwrap();
        let x = [0.3, -1.0, 2.0, 0.5, 0.0, 1.25, -0.7];
        let c = dec.coefficients(&x);
        let back = dec.eigenvectors() * nalgebra::DVector::from_vec(c);
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
        let vinv = dec.inverse_eigenvectors();
        let id = dec.eigenvectors() * vinv;
        assert!((id - DMatrix::<f64>::identity(7, 7)).amax() < 1e-12);
    }

    #[test]
    fn spectrum_shape_flags() {
        for g in [Graph::path(3).unwrap(), Graph::path(4).unwrap()] {
            let r = check_spectrum_shape(&g, &decompose(&g).unwrap()).unwrap();
            assert!(r.all());
        }
        let k3 = Graph::complete(3).unwrap();
        assert!(matches!(check_spectrum_shape(&k3, &decompose(&k3).unwrap()), Err(SpectralError::PreconditionViolated(_))));
    }

    #[test]
    fn certificate_examples() {
        let p3 = Graph::path(3).unwrap();
        assert!(nontermination_certificate(&p3, &[0.1, 0.0, -0.1], 1.0).unwrap().certified);
        assert!(!nontermination_certificate(&p3, &[0.4; 3], 1.0).unwrap().certified);
        let p4 = Graph::path(4).unwrap();
        assert!(nontermination_certificate(&p4, &[0.0, 0.1, 0.2, 0.3], 1.0).unwrap().certified);
        assert!(matches!(
            nontermination_certificate(&p3, &[0.0, 0.0, 1.0], 1.0),
            Err(SpectralError::SpreadTooLarge { .. })
        ));
    }

    #[test]
    fn value_ordering_is_exposed() {
        let dec = decompose(&Graph::path(4).unwrap()).unwrap();
        let by_value: Vec<f64> = dec.order_by_value().iter().map(|&i| dec.eigenvalues()[i]).collect();
        assert!(by_value.windows(2).all(|w| w[0] >= w[1]));
        // |λ| ordering puts −0.2287 ahead of 1/6.
        assert!(dec.eigenvalues()[2] < 0.0);
    }
}
