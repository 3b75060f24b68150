//! Independent brute-force oracles. Nothing here calls the crate's LP code.
#![allow(dead_code)]

use ratl::game::ProfileIter;
use ratl::NormalFormGame;

pub const ORACLE_TOL: f64 = 1e-9;

/// Solve a small dense system by Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// All subsets of `0..n` with exactly `k` elements.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `d[p][k] = u_i(k, p) - u_i(action, p)` over admissible opponent profiles.
pub fn advantages(game: &NormalFormGame, player: usize, action: usize, admissible: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let sizes: Vec<usize> = (0..game.num_players())
        .map(|j| if j == player { 1 } else { admissible[j].len() })
        .collect();
    ProfileIter::new(&sizes)
        .map(|local| {
            let mut prof: Vec<usize> = local
                .iter()
                .enumerate()
                .map(|(j, &k)| if j == player { 0 } else { admissible[j][k] })
                .collect();
            prof[player] = action;
            let own = game.utility_at(player, &prof);
            (0..game.num_actions(player))
                .map(|k| {
                    prof[player] = k;
                    game.utility_at(player, &prof)
                })
                .map(|u| u - own)
                .collect()
        })
        .collect()
}

pub fn replay(rows: &[Vec<f64>], x: &[f64]) -> f64 {
    rows.iter()
        .map(|d| d.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Exact maximin `max_x min_p Σ_k x_k d_k(p)` by enumerating the vertices of
/// `{(x, m): x ∈ simplex, m ≤ Σ_k x_k d_k(p) ∀p}`: pick a support `S` and
/// `|S|` tight profiles, solve the square system, keep feasible points.
pub fn maximin_by_vertices(rows: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let k = rows[0].len();
    let mut best = (f64::NEG_INFINITY, vec![0.0; k]);
    for s in 1..=k {
        for support in subsets_of_size(k, s) {
            for tight in subsets_of_size(rows.len(), s) {
                // unknowns: x_S (s of them) and m
                let mut a = Vec::with_capacity(s + 1);
                let mut b = Vec::with_capacity(s + 1);
                let mut ones: Vec<f64> = vec![1.0; s];
                ones.push(0.0);
                a.push(ones);
                b.push(1.0);
                for &p in &tight {
                    let mut row: Vec<f64> = support.iter().map(|&c| rows[p][c]).collect();
                    row.push(-1.0);
                    a.push(row);
                    b.push(0.0);
                }
                let Some(sol) = solve_dense(a, b) else { continue };
                if sol[..s].iter().any(|&v| v < -1e-12) {
                    continue;
                }
                let mut x = vec![0.0; k];
                for (&c, &v) in support.iter().zip(&sol) {
                    x[c] = v.max(0.0);
                }
                let total: f64 = x.iter().sum();
                x.iter_mut().for_each(|v| *v /= total);
                let m = replay(rows, &x);
                if m > best.0 {
                    best = (m, x);
                }
            }
        }
    }
    best
}

/// Best margin over a uniform grid on the simplex with `steps` subdivisions.
pub fn maximin_by_grid(rows: &[Vec<f64>], steps: usize) -> f64 {
    let k = rows[0].len();
    let mut best = f64::NEG_INFINITY;
    let mut counts = vec![0usize; k];
    fn rec(i: usize, left: usize, counts: &mut Vec<usize>, steps: usize, rows: &[Vec<f64>], best: &mut f64) {
        let k = counts.len();
        if i == k - 1 {
            counts[i] = left;
            let x: Vec<f64> = counts.iter().map(|&c| c as f64 / steps as f64).collect();
            *best = best.max(replay(rows, &x));
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            rec(i + 1, left - c, counts, steps, rows, best);
        }
    }
    rec(0, steps, &mut counts, steps, rows, &mut best);
    best
}

/// Grid resolution used for each own-action count.
pub fn grid_steps(k: usize) -> usize {
    match k {
        0..=2 => 1000,
        3 => 100,
        _ => 30,
    }
}

/// Δ-elimination ladder driven by the vertex oracle; returns survivors.
pub fn oracle_survivors(game: &NormalFormGame, delta: f64) -> Vec<Vec<usize>> {
    let mut alive: Vec<Vec<usize>> = game.action_counts().iter().map(|&c| (0..c).collect()).collect();
    loop {
        let mut removed = Vec::new();
        for i in 0..game.num_players() {
            if alive[i].len() <= 1 {
                continue;
            }
            for &a in &alive[i] {
                let rows = advantages(game, i, a, &alive);
                let (m, x) = maximin_by_vertices(&rows);
                assert!((replay(&rows, &x) - m).abs() < 1e-12, "certificate replay");
                if m > ORACLE_TOL && m >= delta - ORACLE_TOL {
                    removed.push((i, a));
                }
            }
        }
        if removed.is_empty() {
            return alive;
        }
        for (i, a) in removed {
            alive[i].retain(|&b| b != a);
        }
    }
}

/// All Nash equilibria of a nondegenerate bimatrix game by support
/// enumeration over equal-size support pairs.
pub fn bimatrix_nash(game: &NormalFormGame) -> Vec<(Vec<f64>, Vec<f64>)> {
    assert_eq!(game.num_players(), 2);
    let (m, n) = (game.num_actions(0), game.num_actions(1));
    let u = |i: usize, a: usize, b: usize| game.utility_at(i, &[a, b]);
    // mix over `own` (player `mixer`) that makes the other player indifferent on `other`
    let indifference = |mixer: usize, own: &[usize], other: &[usize]| -> Option<Vec<f64>> {
        let s = own.len();
        let mut a = vec![{
            let mut r = vec![1.0; s];
            r.push(0.0);
            r
        }];
        let mut b = vec![1.0];
        for &o in other {
            let mut row: Vec<f64> = own
                .iter()
                .map(|&k| if mixer == 0 { u(1, k, o) } else { u(0, o, k) })
                .collect();
            row.push(-1.0);
            a.push(row);
            b.push(0.0);
        }
        let sol = solve_dense(a, b)?;
        if sol[..s].iter().any(|&v| v < -1e-12) {
            return None;
        }
        let size = if mixer == 0 { m } else { n };
        let mut x = vec![0.0; size];
        for (&k, &v) in own.iter().zip(&sol) {
            x[k] = v.max(0.0);
        }
        Some(x)
    };
    let mut out = Vec::new();
    for s in 1..=m.min(n) {
        for s1 in subsets_of_size(m, s) {
            for s2 in subsets_of_size(n, s) {
                let (Some(x), Some(y)) = (indifference(0, &s1, &s2), indifference(1, &s2, &s1)) else {
                    continue;
                };
                let row_vals: Vec<f64> = (0..m).map(|a| (0..n).map(|b| y[b] * u(0, a, b)).sum()).collect();
                let col_vals: Vec<f64> = (0..n).map(|b| (0..m).map(|a| x[a] * u(1, a, b)).sum()).collect();
                let rv: f64 = (0..m).map(|a| x[a] * row_vals[a]).sum();
                let cv: f64 = (0..n).map(|b| y[b] * col_vals[b]).sum();
                if row_vals.iter().all(|&v| v <= rv + 1e-10) && col_vals.iter().all(|&v| v <= cv + 1e-10) {
                    out.push((x, y));
                }
            }
        }
    }
    out
}
