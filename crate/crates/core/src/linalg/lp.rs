//! Dense two-phase simplex with Bland's rule.
//!
//! Problems are `maximize cᵀx` subject to linear rows with `≤`, `=` or `≥` and
//! `x ≥ 0`. Sizes in this crate are tiny (a few dozen columns), so the full
//! tableau is kept in memory.

pub const PIVOT_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    n_vars: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    /// Phase one could not drive the artificial variables below the pivot
    /// tolerance; `residual` is the smallest sum of artificials reached.
    Infeasible { residual: f64 },
    Unbounded,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("simplex exceeded {0} pivots")]
pub struct PivotLimit(pub usize);

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram { n_vars, objective: vec![0.0; n_vars], rows: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), self.n_vars);
        self.objective = objective;
        self
    }

    pub fn constraint(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.n_vars);
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn solve(&self) -> Result<LpOutcome, PivotLimit> {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; last column is rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_struct: usize,
    first_artificial: usize,
    n_cols: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n_slack = lp.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let normalized: Vec<(Vec<f64>, Relation, f64)> = lp
            .rows
            .iter()
            .map(|(a, rel, b)| {
                if *b < 0.0 {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (a.iter().map(|v| -v).collect(), flipped, -b)
                } else {
                    (a.clone(), *rel, *b)
                }
            })
            .collect();
        let n_art = normalized.iter().filter(|r| r.1 != Relation::Le).count();
        let first_artificial = lp.n_vars + n_slack;
        let n_cols = first_artificial + n_art;
        let mut t = vec![vec![0.0; n_cols + 1]; m + 1];
        let mut basis = vec![0; m];
        let mut slack = lp.n_vars;
        let mut art = first_artificial;
        for (i, (a, rel, b)) in normalized.iter().enumerate() {
            t[i][..lp.n_vars].copy_from_slice(a);
            t[i][n_cols] = *b;
            match rel {
                Relation::Le => {
                    t[i][slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    t[i][slack] = -1.0;
                    slack += 1;
                    t[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    t[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        Tableau { t, basis, n_struct: lp.n_vars, first_artificial, n_cols }
    }

    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex on the current objective row over columns `< allowed`.
    /// Returns `false` when unbounded.
    fn optimize(&mut self, allowed: usize, pivots: &mut usize) -> Result<bool, PivotLimit> {
        let m = self.m();
        let rhs = self.n_cols;
        loop {
            let Some(col) = (0..allowed).find(|&j| self.t[m][j] < -PIVOT_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.t[i][rhs] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Ok(false);
            };
            self.pivot(row, col);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(PivotLimit(MAX_PIVOTS));
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpOutcome, PivotLimit> {
        let m = self.m();
        let rhs = self.n_cols;
        let mut pivots = 0;

        if self.first_artificial < self.n_cols {
            // Phase one: maximize −Σ artificials.
            let mut obj = vec![0.0; self.n_cols + 1];
            for v in obj.iter_mut().take(self.n_cols).skip(self.first_artificial) {
                *v = 1.0;
            }
            for i in 0..m {
                if self.basis[i] >= self.first_artificial {
                    for (o, v) in obj.iter_mut().zip(&self.t[i]) {
                        *o -= v;
                    }
                }
            }
            self.t[m] = obj;
            self.optimize(self.n_cols, &mut pivots)?;
            let residual = -self.t[m][rhs];
            if residual > PIVOT_TOL {
                return Ok(LpOutcome::Infeasible { residual });
            }
            // Drive remaining (zero-valued) artificials out of the basis.
            for i in 0..m {
                if self.basis[i] >= self.first_artificial {
                    if let Some(j) = (0..self.first_artificial).find(|&j| self.t[i][j].abs() > PIVOT_TOL) {
                        self.pivot(i, j);
                    }
                }
            }
        }

        let mut obj = vec![0.0; self.n_cols + 1];
        for (o, c) in obj.iter_mut().zip(&lp.objective) {
            *o = -c;
        }
        for i in 0..m {
            let b = self.basis[i];
            let f = obj[b];
            if f != 0.0 {
                for (o, v) in obj.iter_mut().zip(&self.t[i]) {
                    *o -= f * v;
                }
            }
        }
        self.t[m] = obj;
        if !self.optimize(self.first_artificial, &mut pivots)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![0.0; self.n_struct];
        for i in 0..m {
            if self.basis[i] < self.n_struct {
                x[self.basis[i]] = self.t[i][rhs];
            }
        }
        let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36.
        let mut lp = LinearProgram::new(2).maximize(vec![3.0, 5.0]);
        lp.constraint(vec![1.0, 0.0], Relation::Le, 4.0);
        lp.constraint(vec![0.0, 2.0], Relation::Le, 12.0);
        lp.constraint(vec![3.0, 2.0], Relation::Le, 18.0);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert!((value - 36.0).abs() < 1e-9);
                assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y (= max −x − y) with x + y = 2, x ≥ 0.5.
        let mut lp = LinearProgram::new(2).maximize(vec![-1.0, -1.0]);
        lp.constraint(vec![1.0, 1.0], Relation::Eq, 2.0);
        lp.constraint(vec![1.0, 0.0], Relation::Ge, 0.5);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert!((value + 2.0).abs() < 1e-9);
                assert!(x[0] >= 0.5 - 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.constraint(vec![1.0], Relation::Ge, 2.0);
        lp.constraint(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Infeasible { .. }));

        let mut lp = LinearProgram::new(2).maximize(vec![1.0, 0.0]);
        lp.constraint(vec![-1.0, 1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // −x ≤ −3 ⇔ x ≥ 3; min x.
        let mut lp = LinearProgram::new(1).maximize(vec![-1.0]);
        lp.constraint(vec![-1.0], Relation::Le, -3.0);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { x, .. } => assert!((x[0] - 3.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_redundant_equalities() {
        let mut lp = LinearProgram::new(3).maximize(vec![1.0, 1.0, 1.0]);
        lp.constraint(vec![1.0, 1.0, 0.0], Relation::Eq, 1.0);
        lp.constraint(vec![2.0, 2.0, 0.0], Relation::Eq, 2.0);
        lp.constraint(vec![0.0, 0.0, 1.0], Relation::Le, 0.0);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }
}
