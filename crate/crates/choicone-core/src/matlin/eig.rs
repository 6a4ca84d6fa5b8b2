//! Cyclic Jacobi eigendecomposition for Hermitian matrices.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::matlin::ComplexMatrix;
use crate::C64;

const MAX_SWEEPS: usize = 40;

/// Eigendecomposition `H = V diag(λ) V^†` of a Hermitian matrix.
///
/// Returns eigenvalues in descending order with matching eigenvector
/// columns. The input must satisfy `‖H - H^†‖_max ≤ tol`; it is
/// symmetrized internally before the sweeps.
pub fn hermitian_eig(h: &ComplexMatrix, tol: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::DimMismatch {
            context: "eigendecomposition needs a square matrix",
        });
    }
    let deviation = h.hermitian_deviation();
    if !(deviation <= tol) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = h.rows();
    let mut a = (h + &h.adjoint()).scale_re(0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n <= 1 || scale == 0.0 {
        let lam = (0..n).map(|i| a.get(i, i).re).collect();
        return Ok((lam, v));
    }
    let target = 1e-14 * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).re.total_cmp(&a.get(i, i).re));
    let lam = order.iter().map(|&i| a.get(i, i).re).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok((lam, vecs))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                acc += a.get(p, q).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation annihilating the `(p, q)` entry: `A ← J^† A J`,
/// `V ← V J`, with `J` the complex plane rotation on indices `p, q`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let beta = apq.norm();
    if beta <= 1e-300 {
        return;
    }
    let phase = apq / beta; // e^{iφ}
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * beta);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.rows();
    let phase_c = phase.conj();

    // A ← A·J
    for h in 0..n {
        let xp = a.get(h, p);
        let xq = a.get(h, q);
        a.set(h, p, xp * c - xq * (phase_c * s));
        a.set(h, q, xp * s + xq * (phase_c * c));
    }
    // A ← J^†·A
    for h in 0..n {
        let xp = a.get(p, h);
        let xq = a.get(q, h);
        a.set(p, h, xp * c - xq * (phase * s));
        a.set(q, h, xp * s + xq * (phase * c));
    }
    // V ← V·J
    for h in 0..n {
        let xp = v.get(h, p);
        let xq = v.get(h, q);
        v.set(h, p, xp * c - xq * (phase_c * s));
        v.set(h, q, xp * s + xq * (phase_c * c));
    }

    a.set(p, q, C64::new(0.0, 0.0));
    a.set(q, p, C64::new(0.0, 0.0));
    let dp = a.get(p, p);
    let dq = a.get(q, q);
    a.set(p, p, C64::new(dp.re, 0.0));
    a.set(q, q, C64::new(dq.re, 0.0));
}
