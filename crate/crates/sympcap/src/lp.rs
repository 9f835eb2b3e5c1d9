//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Every linear program in this crate is desk scale (at most a few hundred
//! variables and ~64 constraints), so a dense tableau is simpler and easier
//! to make deterministic than a revised method. Bland's rule (smallest
//! eligible index enters, smallest basic index leaves on ties) guarantees
//! termination even on the degenerate programs that show up when polytope
//! facets meet at lower-dimensional faces.

use nalgebra::DVector;

use crate::error::{Error, Result};

const EPS: f64 = 1e-9;
const MAX_ITERS: usize = 50_000;

#[derive(Debug, Clone)]
pub struct LpSolution {
    /// Values of the problem variables (not slacks).
    pub x: DVector<f64>,
    pub value: f64,
}

/// A linear program: maximize ⟨c, x⟩ subject to ⟨aᵢ, x⟩ ≤ bᵢ and ⟨eⱼ, x⟩ = fⱼ.
///
/// Variables are free by default; `nonneg()` restricts them to x ≥ 0 (used by
/// the convex-combination programs, where the variables are hull weights).
#[derive(Debug, Clone)]
pub struct Problem {
    n_vars: usize,
    objective: DVector<f64>,
    ineqs: Vec<(DVector<f64>, f64)>,
    eqs: Vec<(DVector<f64>, f64)>,
    nonneg: bool,
}

impl Problem {
    pub fn maximize(objective: DVector<f64>) -> Self {
        Self {
            n_vars: objective.len(),
            objective,
            ineqs: Vec::new(),
            eqs: Vec::new(),
            nonneg: false,
        }
    }

    pub fn nonneg(mut self) -> Self {
        self.nonneg = true;
        self
    }

    pub fn add_le(&mut self, a: DVector<f64>, b: f64) -> &mut Self {
        assert_eq!(a.len(), self.n_vars);
        self.ineqs.push((a, b));
        self
    }

    pub fn add_eq(&mut self, a: DVector<f64>, b: f64) -> &mut Self {
        assert_eq!(a.len(), self.n_vars);
        self.eqs.push((a, b));
        self
    }

    /// Solves by conversion to standard form: free variables are split as
    /// x = x⁺ − x⁻, inequalities get slack variables, and a phase-1 program
    /// with artificial variables finds the initial basis.
    pub fn solve(&self) -> Result<LpSolution> {
        let split = if self.nonneg { 1 } else { 2 };
        let n_x = self.n_vars * split;
        let n_slack = self.ineqs.len();
        let m = self.ineqs.len() + self.eqs.len();
        let n_art = m;
        let n_total = n_x + n_slack + n_art;

        // Tableau rows: [coeffs | rhs], with rhs kept non-negative.
        let mut t = vec![vec![0.0; n_total + 1]; m + 1];
        let mut basis = vec![0usize; m];

        let fill_row = |row: &mut [f64], a: &DVector<f64>| {
            for j in 0..self.n_vars {
                row[split * j] = a[j];
                if split == 2 {
                    row[split * j + 1] = -a[j];
                }
            }
        };
        for (i, (a, b)) in self.ineqs.iter().enumerate() {
            fill_row(&mut t[i], a);
            t[i][n_x + i] = 1.0;
            t[i][n_total] = *b;
        }
        for (i, (a, b)) in self.eqs.iter().enumerate() {
            let r = self.ineqs.len() + i;
            fill_row(&mut t[r], a);
            t[r][n_total] = *b;
        }
        for i in 0..m {
            if t[i][n_total] < 0.0 {
                for v in t[i].iter_mut() {
                    *v = -*v;
                }
            }
            t[i][n_x + n_slack + i] = 1.0;
            basis[i] = n_x + n_slack + i;
        }

        // Phase 1: maximize −Σ artificials.
        for j in 0..n_art {
            t[m][n_x + n_slack + j] = 1.0;
        }
        t[m][n_total] = 0.0;
        for (i, &b) in basis.iter().enumerate() {
            reduce_objective(&mut t, i, b, n_total);
        }
        run_simplex(&mut t, &mut basis, n_total, usize::MAX)?;
        if t[m][n_total].abs() > EPS * 10.0 {
            return Err(Error::LpInfeasible);
        }

        // Drive basic artificials out where possible; leftover rows are
        // redundant and stay inert at zero.
        for i in 0..m {
            if basis[i] >= n_x + n_slack {
                if let Some(j) = (0..n_x + n_slack).find(|&j| t[i][j].abs() > EPS) {
                    pivot(&mut t, i, j, n_total);
                    basis[i] = j;
                }
            }
        }

        // Phase 2: real objective, artificials blocked.
        t[m][..=n_total].fill(0.0);
        for j in 0..self.n_vars {
            t[m][split * j] = -self.objective[j];
            if split == 2 {
                t[m][split * j + 1] = self.objective[j];
            }
        }
        for (i, &b) in basis.iter().enumerate() {
            reduce_objective(&mut t, i, b, n_total);
        }
        run_simplex(&mut t, &mut basis, n_total, n_x + n_slack)?;

        let mut x = DVector::zeros(self.n_vars);
        for i in 0..m {
            let j = basis[i];
            if j < n_x {
                let var = j / split;
                let sgn = if split == 2 && j % 2 == 1 { -1.0 } else { 1.0 };
                x[var] += sgn * t[i][n_total];
            }
        }
        Ok(LpSolution {
            value: self.objective.dot(&x),
            x,
        })
    }
}

/// Eliminates row `i`'s basic column from the objective row. Rows are kept
/// normalized (unit pivot) so a single subtraction suffices.
fn reduce_objective(t: &mut [Vec<f64>], i: usize, basis_col: usize, n_total: usize) {
    let m = t.len() - 1;
    let factor = t[m][basis_col];
    if factor != 0.0 {
        let (rows, tail) = t.split_at_mut(m);
        let obj = &mut tail[0];
        for (o, &v) in obj.iter_mut().zip(&rows[i]).take(n_total + 1) {
            *o -= factor * v;
        }
    }
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize, n_total: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let (before, rest) = t.split_at_mut(row);
    let (prow, after) = rest.split_first_mut().expect("pivot row exists");
    for r in before.iter_mut().chain(after.iter_mut()) {
        let f = r[col];
        if f != 0.0 {
            for (x, &pv) in r.iter_mut().zip(prow.iter()).take(n_total + 1) {
                *x -= f * pv;
            }
        }
    }
}

/// Bland's rule simplex on a tableau whose last row is the objective.
/// Columns at `block_from` and beyond may not enter the basis.
fn run_simplex(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    n_total: usize,
    block_from: usize,
) -> Result<()> {
    let m = t.len() - 1;
    for _ in 0..MAX_ITERS {
        // Entering: smallest index with negative reduced cost.
        let Some(col) = (0..n_total.min(block_from)).find(|&j| t[m][j] < -EPS) else {
            return Ok(());
        };
        // Leaving: lexicographic Bland tie-break on the minimum ratio.
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..m {
            if t[i][col] > EPS {
                let ratio = t[i][n_total] / t[i][col];
                let cand = (ratio, basis[i], i);
                best = match best {
                    None => Some(cand),
                    Some(cur) => {
                        if ratio < cur.0 - EPS || (ratio < cur.0 + EPS && basis[i] < cur.1) {
                            Some(cand)
                        } else {
                            Some(cur)
                        }
                    }
                };
            }
        }
        let Some((_, _, row)) = best else {
            return Err(Error::LpUnbounded);
        };
        pivot(t, row, col, n_total);
        basis[row] = col;
    }
    Err(Error::LpStalled)
}
