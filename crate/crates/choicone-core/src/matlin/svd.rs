//! Singular value decomposition by one-sided (Hestenes) Jacobi.
//!
//! The one-sided form orthogonalizes the columns of the matrix itself, so
//! small singular values keep full accuracy instead of being squared away,
//! which the rank-one tests downstream rely on.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::matlin::{vec_dot, vec_norm, ComplexMatrix};
use crate::C64;

const MAX_SWEEPS: usize = 60;

/// Thin SVD `A = U diag(s) V^†` with `k = min(rows, cols)` columns.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    /// Singular values, nonnegative and descending.
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.s.len();
        let scaled = ComplexMatrix::from_fn(self.u.rows(), k, |i, j| {
            self.u.get(i, j) * self.s[j]
        });
        &scaled * &self.v.adjoint()
    }

    /// `s_min / s_max`, zero for a zero matrix.
    pub fn rcond(&self) -> f64 {
        match (self.s.first(), self.s.last()) {
            (Some(&max), Some(&min)) if max > 0.0 => min / max,
            _ => 0.0,
        }
    }

    /// Number of singular values above `tol · s_max`.
    pub fn rank(&self, tol: f64) -> usize {
        match self.s.first() {
            Some(&max) if max > 0.0 => self.s.iter().filter(|&&x| x > tol * max).count(),
            _ => 0,
        }
    }
}

pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if a.rows() < a.cols() {
        let t = svd(&a.adjoint())?;
        return Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }
    let (rows, cols) = (a.rows(), a.cols());
    let mut w: Vec<Vec<C64>> = (0..cols).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..cols)
        .map(|j| {
            let mut e = alloc::vec![C64::new(0.0, 0.0); cols];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();

    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols.saturating_sub(1) {
            for q in p + 1..cols {
                if orthogonalize_pair(&mut w, &mut v, p, q) {
                    rotated = true;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = w.iter().map(|c| vec_norm(c)).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let s_max = s.first().copied().unwrap_or(0.0);
    let cutoff = s_max * 1e-13;

    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for (rank_pos, &j) in order.iter().enumerate() {
        if s[rank_pos] > cutoff && s[rank_pos] > 0.0 {
            u_cols.push(w[j].iter().map(|&z| z / s[rank_pos]).collect());
        } else {
            u_cols.push(complete_column(&u_cols, rows));
        }
    }

    let u = ComplexMatrix::from_fn(rows, cols, |i, j| u_cols[j][i]);
    let vm = ComplexMatrix::from_fn(cols, cols, |i, j| v[order[j]][i]);
    Ok(Svd { u, s, v: vm })
}

/// Jacobi rotation making columns `p` and `q` orthogonal; returns whether
/// a rotation was applied.
fn orthogonalize_pair(w: &mut [Vec<C64>], v: &mut [Vec<C64>], p: usize, q: usize) -> bool {
    let alpha = w[p].iter().map(|z| z.norm_sqr()).sum::<f64>();
    let gamma = w[q].iter().map(|z| z.norm_sqr()).sum::<f64>();
    if alpha <= 1e-300 || gamma <= 1e-300 {
        return false;
    }
    let beta = vec_dot(&w[p], &w[q]);
    let b = beta.norm();
    if b <= 1e-15 * (alpha * gamma).sqrt() {
        return false;
    }
    let phase = beta / b;
    let tau = (gamma - alpha) / (2.0 * b);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let phase_c = phase.conj();

    rotate_columns(w, p, q, c, s, phase_c);
    rotate_columns(v, p, q, c, s, phase_c);
    true
}

fn rotate_columns(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, phase_c: C64) {
    let len = cols[p].len();
    for h in 0..len {
        let xp = cols[p][h];
        let xq = cols[q][h];
        cols[p][h] = xp * c - xq * (phase_c * s);
        cols[q][h] = xp * s + xq * (phase_c * c);
    }
}

/// Fills a column of `U` orthonormal to the ones built so far.
fn complete_column(existing: &[Vec<C64>], rows: usize) -> Vec<C64> {
    let mut best: Option<(f64, Vec<C64>)> = None;
    for cand in 0..rows {
        let mut r = alloc::vec![C64::new(0.0, 0.0); rows];
        r[cand] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for u in existing {
                let proj = vec_dot(u, &r);
                for (ri, ui) in r.iter_mut().zip(u) {
                    *ri -= proj * ui;
                }
            }
        }
        let n = vec_norm(&r);
        if n > 0.5 {
            for z in &mut r {
                *z /= n;
            }
            return r;
        }
        if best.as_ref().map_or(true, |(bn, _)| n > *bn) {
            best = Some((n, r));
        }
    }
    let (n, mut r) = best.expect("at least one candidate");
    if n > 0.0 {
        for z in &mut r {
            *z /= n;
        }
    }
    r
}
