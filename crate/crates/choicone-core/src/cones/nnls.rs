//! Nonnegative least squares (Lawson-Hanson active set), used to project a
//! Hermitian matrix onto the cone generated by a frame of rank-one
//! projectors.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::matlin::{ComplexMatrix, LuFactors};
use crate::C64;

/// Isometric real vectorization of a Hermitian `d×d` matrix: diagonal
/// entries, then `√2·Re` and `√2·Im` of the upper triangle.
pub fn hermitian_vec(h: &ComplexMatrix) -> Vec<f64> {
    let d = h.rows();
    let mut out = Vec::with_capacity(d * d);
    for r in 0..d {
        out.push(h.get(r, r).re);
    }
    let s = 2.0f64.sqrt();
    for r in 0..d {
        for c in r + 1..d {
            out.push(s * h.get(r, c).re);
            out.push(s * h.get(r, c).im);
        }
    }
    out
}

/// Minimizes `‖A x − b‖₂` subject to `x ≥ 0` over a column dictionary.
///
/// `columns[j]` is the j-th column of `A`. Returns the weight vector.
pub fn nnls(columns: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let ncols = columns.len();
    let len = b.len();
    let mut x = vec![0.0f64; ncols];
    if ncols == 0 {
        return x;
    }
    let mut passive = vec![false; ncols];
    let mut residual: Vec<f64> = b.to_vec();
    let gradient_tol = 1e-12 * dot(b, b).sqrt().max(1.0);

    for _outer in 0..3 * len.max(ncols) {
        // Gradient of ½‖Ax − b‖² is −Aᵀ·residual; pick the steepest
        // admissible coordinate.
        let mut best = (usize::MAX, gradient_tol);
        for j in 0..ncols {
            if passive[j] {
                continue;
            }
            let g = dot(&columns[j], &residual);
            if g > best.1 {
                best = (j, g);
            }
        }
        if best.0 == usize::MAX {
            break;
        }
        passive[best.0] = true;

        for _inner in 0..200 {
            let active: Vec<usize> = (0..ncols).filter(|&j| passive[j]).collect();
            let z = solve_ls(columns, b, &active);
            if z.iter().all(|&v| v > 1e-14) {
                for (slot, &j) in active.iter().enumerate() {
                    x[j] = z[slot];
                }
                break;
            }
            // Step toward z until the first coordinate hits zero.
            let mut alpha = 1.0f64;
            for (slot, &j) in active.iter().enumerate() {
                if z[slot] <= 1e-14 {
                    let denom = x[j] - z[slot];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            for (slot, &j) in active.iter().enumerate() {
                x[j] += alpha * (z[slot] - x[j]);
                if x[j] <= 1e-12 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }

        residual = b.to_vec();
        for (j, &w) in x.iter().enumerate() {
            if w != 0.0 {
                for (ri, ci) in residual.iter_mut().zip(&columns[j]) {
                    *ri -= w * ci;
                }
            }
        }
    }
    x
}

/// Unconstrained least squares on the selected columns via ridged normal
/// equations.
fn solve_ls(columns: &[Vec<f64>], b: &[f64], active: &[usize]) -> Vec<f64> {
    let p = active.len();
    if p == 0 {
        return Vec::new();
    }
    let mut gram = ComplexMatrix::zeros(p, p);
    let mut rhs = vec![C64::new(0.0, 0.0); p];
    for (r, &jr) in active.iter().enumerate() {
        rhs[r] = C64::new(dot(&columns[jr], b), 0.0);
        for (c, &jc) in active.iter().enumerate().skip(r) {
            let g = dot(&columns[jr], &columns[jc]);
            let ridge = if r == c { 1e-12 } else { 0.0 };
            gram.set(r, c, C64::new(g + ridge, 0.0));
            gram.set(c, r, C64::new(g + ridge, 0.0));
        }
    }
    match LuFactors::factor(&gram).and_then(|f| f.solve_vec(&rhs)) {
        Ok(sol) => sol.iter().map(|z| z.re).collect(),
        Err(_) => vec![0.0; p],
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
