//! Small dense two-phase primal simplex.
//!
//! Sized for the dominance problems in this crate (tens of variables, a few
//! hundred constraints). All variables are nonnegative. Bland's rule is used
//! throughout, so degenerate problems (the dominance LPs are highly
//! degenerate: most right-hand sides are zero) cannot cycle.

use thiserror::Error;

const PIVOT_EPS: f64 = 1e-12;
const COST_EPS: f64 = 1e-11;
/// Phase-one objective above this means the constraints are infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex iteration limit reached")]
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        LinearProgram {
            sense,
            objective,
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.objective.len(), "constraint width");
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    /// m rows of [columns..., rhs]
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_orig: usize,
    n_cols: usize,
    artificial_start: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n = lp.num_vars();
        let m = lp.rows.len();
        // normalise to b >= 0
        let rows: Vec<(Vec<f64>, Relation, f64)> = lp
            .rows
            .iter()
            .map(|(c, r, b)| {
                if *b < 0.0 {
                    let flipped = match r {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.iter().map(|v| -v).collect(), flipped, -b)
                } else {
                    (c.clone(), *r, *b)
                }
            })
            .collect();
        let n_slack = rows.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let n_art = rows.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let artificial_start = n + n_slack;
        let n_cols = artificial_start + n_art;
        let mut a = vec![vec![0.0; n_cols + 1]; m];
        let mut basis = vec![0; m];
        let (mut s, mut art) = (n, artificial_start);
        for (i, (coeffs, rel, b)) in rows.iter().enumerate() {
            a[i][..n].copy_from_slice(coeffs);
            a[i][n_cols] = *b;
            match rel {
                Relation::Le => {
                    a[i][s] = 1.0;
                    basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    a[i][s] = -1.0;
                    s += 1;
                    a[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    a[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        Tableau {
            a,
            basis,
            n_orig: n,
            n_cols,
            artificial_start,
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.a[row].clone();
        for (i, r) in self.a.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, p) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Maximise `cost · x` over the current basis, considering only columns
    /// below `col_limit` as entering candidates.
    fn optimize(&mut self, cost: &[f64], col_limit: usize) -> Result<(), LpError> {
        let m = self.a.len();
        let max_iter = 50_000 + 100 * (m + self.n_cols);
        for _ in 0..max_iter {
            // reduced costs r_j = c_j - c_B · column_j
            let mut entering = None;
            for j in 0..col_limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    r -= cost[b] * self.a[i][j];
                }
                if r > COST_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            let rhs = self.n_cols;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let coef = self.a[i][col];
                if coef > PIVOT_EPS {
                    let ratio = self.a[i][rhs] / coef;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - 1e-15
                                || (ratio <= best + 1e-15 && self.basis[i] < self.basis[k])
                            {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(LpError::IterationLimit)
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        let rhs = self.n_cols;
        if self.artificial_start < self.n_cols {
            let mut phase1 = vec![0.0; self.n_cols];
            for c in phase1[self.artificial_start..].iter_mut() {
                *c = -1.0;
            }
            self.optimize(&phase1, self.n_cols)?;
            let infeasibility: f64 = self
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= self.artificial_start)
                .map(|(i, _)| self.a[i][rhs])
                .sum();
            if infeasibility > FEASIBILITY_TOL {
                return Err(LpError::Infeasible);
            }
            // drive zero-level artificials out of the basis
            for i in 0..self.a.len() {
                if self.basis[i] >= self.artificial_start {
                    if let Some(j) = (0..self.artificial_start)
                        .find(|&j| self.a[i][j].abs() > PIVOT_EPS && !self.basis.contains(&j))
                    {
                        self.pivot(i, j);
                    }
                }
            }
        }
        let sign = match lp.sense {
            Sense::Maximize => 1.0,
            Sense::Minimize => -1.0,
        };
        let mut cost = vec![0.0; self.n_cols];
        for (c, o) in cost.iter_mut().zip(&lp.objective) {
            *c = sign * o;
        }
        self.optimize(&cost, self.artificial_start)?;
        let mut x = vec![0.0; self.n_orig];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_orig {
                x[b] = self.a[i][rhs].max(0.0);
            }
        }
        let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { x, objective })
    }
}
