//! Fixed points of column-stochastic matrices (the Blum–Mansour step).

use crate::error::{invalid, Error, Result};
use crate::game::MixedStrategy;

const POWER_ITERATIONS: usize = 100;
const SUM_TOL: f64 = 1e-12;

/// `P[a][b]` is the probability of moving to `a` from `b`; every column
/// sums to one and every entry is positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnStochastic {
    n: usize,
    /// Column-major: column `b` occupies `data[b*n .. (b+1)*n]`.
    data: Vec<f64>,
}

impl ColumnStochastic {
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(invalid("empty matrix"));
        }
        let mut data = Vec::with_capacity(n * n);
        for (b, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(invalid(format!("column {b} has {} entries, expected {n}", col.len())));
            }
            if let Some(x) = col.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(invalid(format!("column {b} has nonpositive entry {x}")));
            }
            let s: f64 = col.iter().sum();
            if (s - 1.0).abs() > SUM_TOL {
                return Err(invalid(format!("column {b} sums to {s}")));
            }
            data.extend_from_slice(col);
        }
        Ok(ColumnStochastic { n, data })
    }

    /// Rows given as `rows[a][b]`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|b| rows.iter().map(|r| r.get(b).copied().unwrap_or(f64::NAN)).collect())
            .collect();
        Self::from_columns(&cols)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[b * self.n + a]
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (b, &xb) in x.iter().enumerate() {
            let col = &self.data[b * self.n..(b + 1) * self.n];
            for (o, &p) in out.iter_mut().zip(col) {
                *o += p * xb;
            }
        }
    }

    /// `‖Px − x‖₁`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.apply(x, &mut y);
        y.iter().zip(x).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// The unique `θ` with `Pθ = θ`, together with its residual `‖Pθ − θ‖₁`.
///
/// Power iteration from `warm_start`; if that has not reached `tol` after a
/// fixed number of steps, the Grassmann–Taksar–Heyman elimination (exact up
/// to rounding and free of cancellation) takes over.
pub fn stationary_distribution(
    matrix: &ColumnStochastic,
    warm_start: &MixedStrategy,
    tol: f64,
) -> Result<(MixedStrategy, f64)> {
    let n = matrix.len();
    if warm_start.len() != n {
        return Err(invalid(format!(
            "warm start has {} entries for a {n}x{n} matrix",
            warm_start.len()
        )));
    }
    if n == 1 {
        return Ok((MixedStrategy::pure(1, 0), 0.0));
    }
    let mut x = warm_start.probs().to_vec();
    let mut y = vec![0.0; n];
    for _ in 0..POWER_ITERATIONS {
        matrix.apply(&x, &mut y);
        let s: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= s);
        let step: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut y);
        if step <= tol * 0.25 {
            break;
        }
    }
    let mut r = matrix.residual(&x);
    if r > tol {
        let g = gth(matrix);
        let rg = matrix.residual(&g);
        if rg < r {
            x = g;
            r = rg;
        }
    }
    let theta = MixedStrategy::from_weights(x)
        .map_err(|e| Error::Internal(format!("stationary distribution: {e}")))?;
    Ok((theta, r))
}

fn gth(matrix: &ColumnStochastic) -> Vec<f64> {
    let n = matrix.len();
    // row-stochastic transition matrix t[b][a] = P(b -> a)
    let mut t: Vec<Vec<f64>> = (0..n).map(|b| (0..n).map(|a| matrix.get(a, b)).collect()).collect();
    for k in (1..n).rev() {
        let s: f64 = t[k][..k].iter().sum();
        for row in t.iter_mut().take(k) {
            row[k] /= s;
        }
        for i in 0..k {
            let tik = t[i][k];
            if tik == 0.0 {
                continue;
            }
            for j in 0..k {
                let add = tik * t[k][j];
                t[i][j] += add;
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        pi[k] = (0..k).map(|i| pi[i] * t[i][k]).sum();
    }
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= s);
    pi
}
