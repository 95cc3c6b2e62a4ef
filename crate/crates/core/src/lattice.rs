//! LLL reduction and Fincke–Pohst enumeration for small real lattices.
//!
//! Bases are row vectors in `f64`. The reduction tracks the unimodular
//! transform so callers can recompute the reduced rows from exact data and
//! map enumerated points back to integer coefficient vectors.

use std::ops::ControlFlow;

/// Reduced basis together with the transform `reduced = transform · original`.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub rows: Vec<Vec<f64>>,
    pub transform: Vec<Vec<i64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram–Schmidt data: `mu[i][j]` for `j < i` and squared norms of `b*_i`.
#[derive(Debug, Clone)]
pub struct GramSchmidt {
    pub mu: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
}

pub fn gram_schmidt(rows: &[Vec<f64>]) -> GramSchmidt {
    let n = rows.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut norms = vec![0.0; n];
    for i in 0..n {
        let mut v = rows[i].clone();
        for j in 0..i {
            let m = if norms[j] > 0.0 { dot(&rows[i], &star[j]) / norms[j] } else { 0.0 };
            mu[i][j] = m;
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= m * sk;
            }
        }
        norms[i] = dot(&v, &v);
        star.push(v);
    }
    GramSchmidt { mu, norms }
}

/// LLL with Lovász parameter `delta` in (1/4, 1).
pub fn lll(rows: &[Vec<f64>], delta: f64) -> Reduction {
    let n = rows.len();
    let mut b = rows.to_vec();
    let mut u: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    if n < 2 {
        return Reduction { rows: b, transform: u };
    }
    let mut gs = gram_schmidt(&b);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 100_000 {
            // float trouble; the basis is still valid, only less reduced
            break;
        }
        for j in (0..k).rev() {
            let r = gs.mu[k][j].round();
            if r != 0.0 && gs.mu[k][j].abs() > 0.5 {
                let ri = r as i64;
                let (bj, uj) = (b[j].clone(), u[j].clone());
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= r * y;
                }
                for (x, y) in u[k].iter_mut().zip(&uj) {
                    *x -= ri * y;
                }
                for l in 0..j {
                    gs.mu[k][l] -= r * gs.mu[j][l];
                }
                gs.mu[k][j] -= r;
            }
        }
        let m = gs.mu[k][k - 1];
        if gs.norms[k] >= (delta - m * m) * gs.norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            gs = gram_schmidt(&b);
            k = (k - 1).max(1);
        }
    }
    Reduction { rows: b, transform: u }
}

/// Visits every nonzero integer combination `y` with `|Σ y_i b_i|² ≤ radius_sq`.
///
/// `rows` should be reduced; the search is exhaustive for any basis but its
/// cost grows with the basis skew.
pub fn enumerate_short<F>(rows: &[Vec<f64>], radius_sq: f64, mut visit: F)
where
    F: FnMut(&[i64]) -> ControlFlow<()>,
{
    let n = rows.len();
    if n == 0 {
        return;
    }
    let gs = gram_schmidt(rows);
    let mut y = vec![0i64; n];
    let _ = descend(&gs, n - 1, radius_sq, &mut y, &mut visit);
}

fn descend<F>(
    gs: &GramSchmidt,
    level: usize,
    budget: f64,
    y: &mut [i64],
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[i64]) -> ControlFlow<()>,
{
    let n = y.len();
    let center: f64 = -((level + 1)..n).map(|j| gs.mu[j][level] * y[j] as f64).sum::<f64>();
    let norm = gs.norms[level];
    if norm <= 0.0 {
        return ControlFlow::Continue(());
    }
    let half_width = (budget.max(0.0) / norm).sqrt();
    let lo = (center - half_width).ceil() as i64;
    let hi = (center + half_width).floor() as i64;
    for v in lo..=hi {
        let d = v as f64 - center;
        let rest = budget - norm * d * d;
        if rest < 0.0 {
            continue;
        }
        y[level] = v;
        if level == 0 {
            if y.iter().any(|&c| c != 0) {
                visit(y)?;
            }
        } else {
            descend(gs, level - 1, rest, y, visit)?;
        }
    }
    y[level] = 0;
    ControlFlow::Continue(())
}

/// `Σ y_i · transform_i`, the coefficient vector of an enumerated point in
/// terms of the original basis.
pub fn combine(y: &[i64], transform: &[Vec<i64>]) -> Vec<i64> {
    let n = transform.first().map_or(0, Vec::len);
    let mut out = vec![0i64; n];
    for (yi, row) in y.iter().zip(transform) {
        if *yi != 0 {
            for (o, r) in out.iter_mut().zip(row) {
                *o += yi * r;
            }
        }
    }
    out
}
