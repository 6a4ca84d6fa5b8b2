//! LU factorization with partial pivoting, for solves and explicit
//! inverses of superoperator matrices.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::matlin::ComplexMatrix;
use crate::C64;

/// `P A = L U` held packed in a single matrix.
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    rcond_estimate: f64,
}

impl LuFactors {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimMismatch {
                context: "LU factorization needs a square matrix",
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = lu.get(k, k).norm();
            for i in k + 1..n {
                let mag = lu.get(i, k).norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = i;
                }
            }
            if pivot_mag <= 1e-300 {
                return Ok(LuFactors {
                    lu,
                    perm,
                    rcond_estimate: 0.0,
                });
            }
            if pivot_row != k {
                perm.swap(k, pivot_row);
                for j in 0..n {
                    let a = lu.get(k, j);
                    let b = lu.get(pivot_row, j);
                    lu.set(k, j, b);
                    lu.set(pivot_row, j, a);
                }
            }
            let pivot = lu.get(k, k);
            for i in k + 1..n {
                let factor = lu.get(i, k) / pivot;
                lu.set(i, k, factor);
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let v = lu.get(i, j) - factor * lu.get(k, j);
                    lu.set(i, j, v);
                }
            }
        }

        let mut umin = f64::infinity();
        let mut umax: f64 = 0.0;
        for k in 0..n {
            let d = lu.get(k, k).norm();
            umin = umin.min(d);
            umax = umax.max(d);
        }
        let rcond_estimate = if umax > 0.0 { umin / umax } else { 0.0 };
        Ok(LuFactors {
            lu,
            perm,
            rcond_estimate,
        })
    }

    /// Quick reciprocal condition estimate from the `U` diagonal.
    pub fn rcond_estimate(&self) -> f64 {
        self.rcond_estimate
    }

    pub fn solve_vec(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.lu.rows();
        if b.len() != n {
            return Err(Error::DimMismatch {
                context: "right-hand side length must match",
            });
        }
        if self.rcond_estimate == 0.0 {
            return Err(Error::SingularTheta { rcond: 0.0 });
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        // Forward substitution with unit lower triangle.
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu.get(i, j) * x[j];
            }
            x[i] = acc;
        }
        // Back substitution.
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu.get(i, j) * x[j];
            }
            x[i] = acc / self.lu.get(i, i);
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        let n = self.lu.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve_vec(&e)?;
            e[j] = C64::new(0.0, 0.0);
            for i in 0..n {
                out.set(i, j, col[i]);
            }
        }
        Ok(out)
    }
}
