//! Closed-form eigenstructure of complete r-partite graphs with self-loops.
//!
//! Differences of two vertices inside one part are eigenvectors with
//! eigenvalue `1/(n − nᵢ + 1)`. The remaining `r` eigenvectors are constant on
//! parts and come from the `r × r` matrix `B` with `B_ii = 1/(n−nᵢ+1)` and
//! `B_ij = n_j/(n−nᵢ+1)`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{decompose, unit, SpectralError};
use crate::graph::{Graph, PartiteSpec};
use crate::linalg::{dot, symmetric_eigen};

#[derive(Debug, Clone, Serialize)]
pub struct LocalVector {
    pub part: usize,
    /// Position inside the part (1-based, ≥ 2) paired against the first vertex.
    pub t: usize,
    pub eigenvalue: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RPartiteEigenbasis {
    pub part_sizes: Vec<usize>,
    pub local_vectors: Vec<LocalVector>,
    pub b_matrix: Vec<Vec<f64>>,
    pub b_eigenvalues: Vec<f64>,
    /// Eigenvectors `w` of `B`, one per entry of `b_eigenvalues`.
    pub b_eigenvectors: Vec<Vec<f64>>,
    /// `w` lifted to `ℝⁿ` (constant on parts), unit norm.
    pub lifted_vectors: Vec<Vec<f64>>,
}

impl RPartiteEigenbasis {
    /// Every eigenvalue with multiplicity, local ones first.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.local_vectors.iter().map(|v| v.eigenvalue).chain(self.b_eigenvalues.iter().copied()).collect()
    }

    /// Eigenpairs in the same order as `eigenvalues()`.
    pub fn eigenpairs(&self) -> Vec<(f64, Vec<f64>)> {
        self.local_vectors
            .iter()
            .map(|v| (v.eigenvalue, v.vector.clone()))
            .chain(self.b_eigenvalues.iter().copied().zip(self.lifted_vectors.iter().cloned()))
            .collect()
    }
}

pub fn rpartite_eigenbasis(spec: &PartiteSpec) -> Result<RPartiteEigenbasis, SpectralError> {
    let sizes = spec.part_sizes();
    let n = spec.n();
    let r = spec.r();
    let offsets = spec.offsets();
    let deg: Vec<f64> = sizes.iter().map(|&ni| (n - ni + 1) as f64).collect();

    let mut local_vectors = Vec::new();
    for (i, &ni) in sizes.iter().enumerate() {
        for t in 2..=ni {
            let mut v = vec![0.0; n];
            v[offsets[i]] = 1.0;
            v[offsets[i] + t - 1] = -1.0;
            local_vectors.push(LocalVector { part: i + 1, t, eigenvalue: 1.0 / deg[i], vector: v });
        }
    }

    let b = DMatrix::from_fn(r, r, |i, j| if i == j { 1.0 / deg[i] } else { sizes[j] as f64 / deg[i] });
    // B = X⁻¹ M X with X = diag(√(nᵢ degᵢ)) and M = D_B S D_B symmetric, where
    // S_ij = 1 off the diagonal, S_ii = 1/nᵢ and D_B = diag(√(nᵢ/degᵢ)).
    let db: Vec<f64> = sizes.iter().zip(&deg).map(|(&ni, d)| (ni as f64 / d).sqrt()).collect();
    let m = DMatrix::from_fn(r, r, |i, j| {
        let s = if i == j { 1.0 / sizes[i] as f64 } else { 1.0 };
        db[i] * s * db[j]
    });
    let (vals, vecs) = symmetric_eigen(&m)?;
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &c| vals[c].total_cmp(&vals[a]));

    let x: Vec<f64> = sizes.iter().zip(&deg).map(|(&ni, d)| (ni as f64 * d).sqrt()).collect();
    let mut b_eigenvalues = Vec::with_capacity(r);
    let mut b_eigenvectors = Vec::with_capacity(r);
    let mut lifted_vectors = Vec::with_capacity(r);
    for &k in &order {
        let mut w: Vec<f64> = (0..r).map(|i| vecs[(i, k)] / x[i]).collect();
        if w.iter().find(|v| v.abs() > 1e-12).is_some_and(|&v| v < 0.0) {
            w.iter_mut().for_each(|v| *v = -*v);
        }
        let mut lifted = vec![0.0; n];
        for (i, &ni) in sizes.iter().enumerate() {
            lifted[offsets[i]..offsets[i] + ni].fill(w[i]);
        }
        b_eigenvalues.push(vals[k]);
        b_eigenvectors.push(w);
        lifted_vectors.push(unit(&lifted));
    }

    Ok(RPartiteEigenbasis {
        part_sizes: sizes.to_vec(),
        local_vectors,
        b_matrix: (0..r).map(|i| b.row(i).iter().copied().collect()).collect(),
        b_eigenvalues,
        b_eigenvectors,
        lifted_vectors,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RPartiteReport {
    pub max_residual: f64,
    pub residuals_ok: bool,
    /// Largest B-eigenvalue that is not 1.
    pub max_nonunit_b_eigenvalue: Option<f64>,
    pub nonunit_nonpositive: bool,
    pub rank: usize,
    pub full_rank: bool,
    pub max_cross_dot: f64,
    pub orthogonal: bool,
    /// `decompose` on the same graph, compared as multisets.
    pub max_spectrum_gap: f64,
}

impl RPartiteReport {
    pub fn failed_clauses(&self) -> Vec<&'static str> {
        let mut f = Vec::new();
        if !self.residuals_ok {
            f.push("eigenpair residual");
        }
        if !self.nonunit_nonpositive {
            f.push("positive non-unit B eigenvalue");
        }
        if !self.full_rank {
            f.push("rank deficient");
        }
        if !self.orthogonal {
            f.push("lifted vectors not orthogonal to local vectors");
        }
        f
    }

    pub fn passed(&self) -> bool {
        self.failed_clauses().is_empty()
    }
}

pub fn verify_rpartite_basis(spec: &PartiteSpec, basis: &RPartiteEigenbasis) -> Result<RPartiteReport, SpectralError> {
    let n = spec.n();
    if n < 2 {
        return Err(SpectralError::PreconditionViolated("need at least two vertices".into()));
    }
    let g = Graph::complete_r_partite(spec);
    let a = g.normalized_adjacency();
    let pairs = basis.eigenpairs();

    let max_residual = pairs
        .iter()
        .map(|(l, v)| {
            let v = nalgebra::DVector::from_column_slice(v);
            (&a * &v - &v * *l).norm()
        })
        .fold(0.0, f64::max);

    let nonunit: Vec<f64> = basis.b_eigenvalues.iter().copied().filter(|l| (l - 1.0).abs() > 1e-9).collect();
    let max_nonunit = nonunit.iter().copied().reduce(f64::max);

    let mat = DMatrix::from_fn(n, pairs.len(), |i, j| pairs[j].1[i]);
    let sv = mat.svd(false, false).singular_values;
    let rank = sv.iter().filter(|&&s| s > 1e-9).count();

    let max_cross_dot = basis
        .lifted_vectors
        .iter()
        .flat_map(|w| basis.local_vectors.iter().map(move |v| dot(w, &v.vector).abs()))
        .fold(0.0, f64::max);

    let mut ours = basis.eigenvalues();
    let mut generic = decompose(&g)?.eigenvalues().to_vec();
    ours.sort_by(f64::total_cmp);
    generic.sort_by(f64::total_cmp);
    let max_spectrum_gap = ours.iter().zip(&generic).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    Ok(RPartiteReport {
        max_residual,
        residuals_ok: max_residual <= 1e-9,
        max_nonunit_b_eigenvalue: max_nonunit,
        nonunit_nonpositive: nonunit.iter().all(|&l| l <= 1e-9),
        rank,
        full_rank: rank == n && pairs.len() == n,
        max_cross_dot,
        orthogonal: max_cross_dot <= 1e-9,
        max_spectrum_gap,
    })
}
