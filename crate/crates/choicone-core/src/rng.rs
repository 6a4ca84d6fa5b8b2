//! Deterministic random streams.
//!
//! Every randomized procedure in the crate draws from a [`Stream`] derived
//! from a `(seed, stream id)` pair, so restarts and samples can run in any
//! order (or concurrently) and still reproduce bit for bit.

use alloc::vec::Vec;

use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matlin::{vec_norm, ComplexMatrix};
use crate::C64;

/// A seeded ChaCha stream with Gaussian sampling.
pub struct Stream {
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Stream {
            rng,
            spare_normal: None,
        }
    }

    /// Uniform in `(0, 1]`.
    pub fn uniform(&mut self) -> f64 {
        (((self.rng.next_u64() >> 11) + 1) as f64) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let th = 2.0 * core::f64::consts::PI * u2;
        self.spare_normal = Some(r * th.sin());
        r * th.cos()
    }

    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }

    pub fn gaussian_vector(&mut self, len: usize) -> Vec<C64> {
        (0..len).map(|_| self.complex_normal()).collect()
    }

    /// Gaussian vector normalized to unit Euclidean norm.
    pub fn unit_vector(&mut self, len: usize) -> Vec<C64> {
        loop {
            let mut v = self.gaussian_vector(len);
            let n = vec_norm(&v);
            if n > 1e-6 {
                for z in &mut v {
                    *z /= n;
                }
                return v;
            }
        }
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }

    /// Gaussian matrix redrawn until comfortably nonsingular.
    pub fn nonsingular_matrix(&mut self, n: usize) -> ComplexMatrix {
        loop {
            let m = self.gaussian_matrix(n, n);
            if let Ok(s) = crate::matlin::svd(&m) {
                if s.rcond() > 1e-4 {
                    return m;
                }
            }
        }
    }

    /// Haar-distributed unitary via Gram-Schmidt on a Gaussian matrix.
    pub fn haar_unitary(&mut self, n: usize) -> ComplexMatrix {
        loop {
            let g = self.gaussian_matrix(n, n);
            if let Some(q) = orthonormalize_columns(&g) {
                return q;
            }
        }
    }

    /// Random Hermitian matrix `(G + G^†)/2`.
    pub fn hermitian_matrix(&mut self, n: usize) -> ComplexMatrix {
        let g = self.gaussian_matrix(n, n);
        (&g + &g.adjoint()).scale_re(0.5)
    }
}

/// Modified Gram-Schmidt; `None` when a column degenerates.
fn orthonormalize_columns(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = a.column(j);
        for _ in 0..2 {
            for u in &q {
                let proj = crate::matlin::vec_dot(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let n = vec_norm(&v);
        if n < 1e-10 {
            return None;
        }
        for z in &mut v {
            *z /= n;
        }
        q.push(v);
    }
    Some(ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i]))
}
