//! Row-stochastic matrices: stationary distributions and mixing.

use rand::Rng;

use crate::error::{Error, Result};

/// Required stationarity residual.
pub const STATIONARY_TOLERANCE: f64 = 1e-12;
pub const POWER_ITERATION_CAP: usize = 1_000_000;

/// `max_j |(p^T Q)_j - p_j|`
pub fn stationarity_residual(q: &[Vec<f64>], p: &[f64]) -> f64 {
    let k = p.len();
    (0..k)
        .map(|j| {
            let s: f64 = (0..k).map(|i| p[i] * q[i][j]).sum();
            (s - p[j]).abs()
        })
        .fold(0.0, f64::max)
}

/// Solves `(Q^T - I) x = 0`, `1·x = 1` by Gaussian elimination with partial
/// pivoting; `None` when the system is singular.
fn direct_solve(q: &[Vec<f64>]) -> Option<Vec<f64>> {
    let k = q.len();
    let mut a: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut row: Vec<f64> = (0..k).map(|j| q[j][i] - if i == j { 1.0 } else { 0.0 }).collect();
            row.push(0.0);
            row
        })
        .collect();
    // The equations sum to zero; replace the last by the normalization.
    a[k - 1] = vec![1.0; k + 1];
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..k {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let x: Vec<f64> = (0..k).map(|i| (a[i][k] / a[i][i]).max(0.0)).collect();
    let s: f64 = x.iter().sum();
    if !(s.is_finite() && s > 0.0) {
        return None;
    }
    Some(x.into_iter().map(|v| v / s).collect())
}

fn power_iteration(q: &[Vec<f64>], cap: usize) -> (Vec<f64>, usize, f64) {
    let k = q.len();
    let mut p = vec![1.0 / k as f64; k];
    let mut residual = f64::INFINITY;
    for it in 0..cap {
        let mut next = vec![0.0; k];
        for i in 0..k {
            for j in 0..k {
                next[j] += p[i] * q[i][j];
            }
        }
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= s);
        p = next;
        residual = stationarity_residual(q, &p);
        if residual <= STATIONARY_TOLERANCE {
            return (p, it + 1, residual);
        }
    }
    (p, cap, residual)
}

/// Stationary distribution of a row-stochastic matrix. Direct solve first,
/// power iteration when the direct answer misses the tolerance.
pub fn stationary_distribution(q: &[Vec<f64>]) -> Result<Vec<f64>> {
    if q.is_empty() || q.iter().any(|r| r.len() != q.len()) {
        return Err(Error::InvalidParameter("transition matrix must be square and nonempty".into()));
    }
    if let Some(p) = direct_solve(q) {
        if stationarity_residual(q, &p) <= STATIONARY_TOLERANCE {
            return Ok(p);
        }
    }
    let (p, iterations, residual) = power_iteration(q, POWER_ITERATION_CAP);
    if residual <= STATIONARY_TOLERANCE {
        Ok(p)
    } else {
        Err(Error::Convergence { iterations, residual })
    }
}

/// `(1 - gamma) p + gamma / K`.
pub fn mix(p_tilde: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Probability(gamma));
    }
    let u = gamma / p_tilde.len() as f64;
    Ok(p_tilde.iter().map(|&x| (1.0 - gamma) * x + u).collect())
}

/// Inverse-CDF draw from `p` in index order.
pub fn sample<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen::<f64>() * p.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i;
        }
    }
    // rounding at the top end: last index with positive mass
    p.iter().rposition(|&x| x > 0.0).unwrap_or(p.len() - 1)
}

pub fn mix_and_sample<R: Rng + ?Sized>(p_tilde: &[f64], gamma: f64, rng: &mut R) -> Result<(Vec<f64>, usize)> {
    let p = mix(p_tilde, gamma)?;
    let a = sample(&p, rng);
    Ok((p, a))
}
