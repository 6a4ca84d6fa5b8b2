//! Elements of `M_m ⊗ M_n`: partial traces, partial transposes, the swap
//! operator.

use crate::error::{Error, Result};
use crate::matlin::{kron, ComplexMatrix};
use crate::C64;

/// Tensor factor selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
    /// Both factors; only meaningful for the partial transpose, where it
    /// equals the full transpose.
    Both,
}

/// Element of `M_m ⊗ M_n` carrying its factor dimensions.
///
/// The composite index is `(i, k) ↦ i·n + k`, factor-1 major.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorMatrix {
    m: usize,
    n: usize,
    mat: ComplexMatrix,
}

impl TensorMatrix {
    pub fn new(m: usize, n: usize, mat: ComplexMatrix) -> Result<Self> {
        if mat.rows() != m * n || mat.cols() != m * n {
            return Err(Error::BadDims {
                context: "tensor matrix must be (m·n)×(m·n)",
            });
        }
        Ok(TensorMatrix { m, n, mat })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        TensorMatrix {
            m,
            n,
            mat: ComplexMatrix::zeros(m * n, m * n),
        }
    }

    /// `x ⊗ y` for `x` of size `m×m` and `y` of size `n×n`.
    pub fn from_kron(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<Self> {
        if !x.is_square() || !y.is_square() {
            return Err(Error::BadDims {
                context: "tensor factors must be square",
            });
        }
        Ok(TensorMatrix {
            m: x.rows(),
            n: y.rows(),
            mat: kron(x, y),
        })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    #[inline]
    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize, j: usize, l: usize) -> C64 {
        self.mat.get(i * self.n + k, j * self.n + l)
    }

    pub fn scale_re(&self, a: f64) -> Self {
        TensorMatrix {
            m: self.m,
            n: self.n,
            mat: self.mat.scale_re(a),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.m, self.n), (other.m, other.n));
        TensorMatrix {
            m: self.m,
            n: self.n,
            mat: &self.mat + &other.mat,
        }
    }

    /// Traces out one factor.
    ///
    /// `Second`: `out[i,j] = Σ_k z[(i,k),(j,k)]`; `First`:
    /// `out[k,l] = Σ_i z[(i,k),(i,l)]`. `Side::Both` gives the 1×1 matrix
    /// holding the full trace.
    pub fn partial_trace(&self, side: Side) -> ComplexMatrix {
        match side {
            Side::Second => ComplexMatrix::from_fn(self.m, self.m, |i, j| {
                (0..self.n).map(|k| self.get(i, k, j, k)).sum()
            }),
            Side::First => ComplexMatrix::from_fn(self.n, self.n, |k, l| {
                (0..self.m).map(|i| self.get(i, k, i, l)).sum()
            }),
            Side::Both => {
                ComplexMatrix::from_fn(1, 1, |_, _| self.mat.trace())
            }
        }
    }

    /// Index-level transpose on the chosen factor; `Both` is the full
    /// transpose.
    pub fn partial_transpose(&self, side: Side) -> TensorMatrix {
        let n = self.n;
        let mat = match side {
            Side::First => ComplexMatrix::from_fn(self.dim(), self.dim(), |r, c| {
                let (i, k) = (r / n, r % n);
                let (j, l) = (c / n, c % n);
                self.get(j, k, i, l)
            }),
            Side::Second => ComplexMatrix::from_fn(self.dim(), self.dim(), |r, c| {
                let (i, k) = (r / n, r % n);
                let (j, l) = (c / n, c % n);
                self.get(i, l, j, k)
            }),
            Side::Both => self.mat.transpose(),
        };
        TensorMatrix {
            m: self.m,
            n: self.n,
            mat,
        }
    }
}

/// The swap operator `F` on `C^n ⊗ C^n`: `F(ξ ⊗ η) = η ⊗ ξ`, i.e.
/// `F[(a,b),(c,d)] = δ_{ad} δ_{bc}`.
pub fn swap_operator(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        let (a, b) = (r / n, r % n);
        let (cc, d) = (c / n, c % n);
        if a == d && b == cc {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `Σ_{ij} e_ij ⊗ e_ij` on `M_d ⊗ M_d`, the unnormalized maximally
/// entangled projector `|ω⟩⟨ω|` with `ω = Σ_i e_i ⊗ e_i`.
pub fn max_entangled(d: usize) -> TensorMatrix {
    let mut mat = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            mat.set(i * d + i, j * d + j, C64::new(1.0, 0.0));
        }
    }
    TensorMatrix { m: d, n: d, mat }
}
