//! Linear maps `φ: M_m → M_n` as first-class values.
//!
//! A map is held in Choi-canonical form: its standard Choi matrix
//! `C_φ = Σ_{ij} e_ij ⊗ φ(e_ij)` over the matrix units. Application,
//! composition, the involution `φ† : v ↦ φ(v*)*`, Kraus conversion in both
//! directions, and the pairing dual all operate on that representation.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::matlin::{hermitian_eig, ComplexMatrix, TensorMatrix};

/// A linear map `φ: M_m → M_n` stored via its standard Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    m: usize,
    n: usize,
    choi: TensorMatrix,
}

impl LinearMap {
    /// Wraps an existing Choi matrix.
    pub fn from_choi(choi: TensorMatrix) -> Self {
        LinearMap {
            m: choi.m(),
            n: choi.n(),
            choi,
        }
    }

    /// Builds the map from its action on matrix units.
    pub fn from_action(m: usize, n: usize, mut phi: impl FnMut(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let mut mat = ComplexMatrix::zeros(m * n, m * n);
        for i in 0..m {
            for j in 0..m {
                let out = phi(&ComplexMatrix::unit(m, i, j));
                debug_assert_eq!((out.rows(), out.cols()), (n, n));
                for k in 0..n {
                    for l in 0..n {
                        mat.set(i * n + k, j * n + l, out.get(k, l));
                    }
                }
            }
        }
        LinearMap {
            m,
            n,
            choi: TensorMatrix::new(m, n, mat).expect("square by construction"),
        }
    }

    pub fn identity(m: usize) -> Self {
        Self::from_action(m, m, |x| x.clone())
    }

    /// The transpose map on `M_m`.
    pub fn transpose_map(m: usize) -> Self {
        Self::from_action(m, m, |x| x.transpose())
    }

    /// `ad_s : x ↦ s^† x s` for `s` of size `m×n`.
    pub fn ad(s: &ComplexMatrix) -> Self {
        let sa = s.adjoint();
        Self::from_action(s.rows(), s.cols(), |x| &(&sa * x) * s)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// The standard Choi matrix `C_φ`.
    #[inline]
    pub fn choi(&self) -> &TensorMatrix {
        &self.choi
    }

    /// Applies the map: `φ(x) = tr₁[(x^t ⊗ I_n)·C_φ]`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.m || x.cols() != self.m {
            return Err(Error::DimMismatch {
                context: "map argument must be m×m",
            });
        }
        let mut out = ComplexMatrix::zeros(self.n, self.n);
        for i in 0..self.m {
            for j in 0..self.m {
                let coeff = x.get(i, j);
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..self.n {
                    for l in 0..self.n {
                        out.add_assign_at(k, l, coeff * self.choi.get(i, k, j, l));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The involution `φ†(v) = φ(v*)*`; its Choi matrix is `(C_φ)^†`.
    pub fn involution(&self) -> Self {
        LinearMap {
            m: self.m,
            n: self.n,
            choi: TensorMatrix::new(self.m, self.n, self.choi.mat().adjoint())
                .expect("adjoint keeps shape"),
        }
    }

    /// A map is Hermiticity preserving exactly when its Choi matrix is
    /// Hermitian.
    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.choi.mat().is_hermitian(tol)
    }

    /// The pairing dual `φ^*` with `⟨φ(x), y⟩ = ⟨x, φ^*(y)⟩` under the
    /// bilinear form `⟨x, y⟩ = tr(x y^t)`; its matrix over matrix units is
    /// the transpose of the matrix of `φ`.
    pub fn pairing_dual(&self) -> Self {
        Self::from_matrix_rep(self.n, self.m, &self.matrix_rep().transpose())
            .expect("transpose keeps consistency")
    }

    /// The `n²×m²` matrix of the map over matrix-unit bases:
    /// `M[(k,l),(i,j)] = φ(e_ij)[k,l]`.
    pub fn matrix_rep(&self) -> ComplexMatrix {
        let (m, n) = (self.m, self.n);
        ComplexMatrix::from_fn(n * n, m * m, |rc, ij| {
            let (k, l) = (rc / n, rc % n);
            let (i, j) = (ij / m, ij % m);
            self.choi.get(i, k, j, l)
        })
    }

    /// Inverse of [`matrix_rep`](Self::matrix_rep); `rep` is `n²×m²` for a
    /// map `M_m → M_n`.
    pub fn from_matrix_rep(m: usize, n: usize, rep: &ComplexMatrix) -> Result<Self> {
        if rep.rows() != n * n || rep.cols() != m * m {
            return Err(Error::DimMismatch {
                context: "map matrix must be n²×m²",
            });
        }
        let mut mat = ComplexMatrix::zeros(m * n, m * n);
        for i in 0..m {
            for j in 0..m {
                for k in 0..n {
                    for l in 0..n {
                        mat.set(i * n + k, j * n + l, rep.get(k * n + l, i * m + j));
                    }
                }
            }
        }
        Ok(LinearMap {
            m,
            n,
            choi: TensorMatrix::new(m, n, mat)?,
        })
    }
}

/// Assembles the Choi matrix of `x ↦ Σ_a K_a x K_a^†` from Kraus operators
/// of size `n×m`.
pub fn kraus_to_choi(kraus: &[ComplexMatrix]) -> Result<LinearMap> {
    let first = kraus.first().ok_or(Error::BadDims {
        context: "at least one Kraus operator is required",
    })?;
    let (n, m) = (first.rows(), first.cols());
    if kraus.iter().any(|k| k.rows() != n || k.cols() != m) {
        return Err(Error::DimMismatch {
            context: "all Kraus operators must share one shape",
        });
    }
    // C_φ[(i,k),(j,l)] = Σ_a K_a[k,i]·conj(K_a[l,j]).
    let mut mat = ComplexMatrix::zeros(m * n, m * n);
    for k_op in kraus {
        for i in 0..m {
            for k in 0..n {
                let a = k_op.get(k, i);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..m {
                    for l in 0..n {
                        mat.add_assign_at(i * n + k, j * n + l, a * k_op.get(l, j).conj());
                    }
                }
            }
        }
    }
    Ok(LinearMap {
        m,
        n,
        choi: TensorMatrix::new(m, n, mat)?,
    })
}

/// Extracts Kraus operators from a map whose Choi matrix is positive
/// semidefinite within `tol`; eigenvalues in `[-tol, 0]` are clipped to
/// zero and the Kraus count equals the rank at that tolerance.
pub fn choi_to_kraus(phi: &LinearMap, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let (m, n) = (phi.m(), phi.n());
    let (lam, vecs) = hermitian_eig(phi.choi().mat(), tol.max(1e-9))?;
    if let Some(&min) = lam.last() {
        if min < -tol {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: min,
            });
        }
    }
    let mut out = Vec::new();
    for (idx, &l) in lam.iter().enumerate() {
        if l <= tol {
            continue;
        }
        let w = l.sqrt();
        let col = vecs.column(idx);
        // Composite index (i,k) ↦ K[k,i].
        out.push(ComplexMatrix::from_fn(n, m, |k, i| col[i * n + k] * w));
    }
    Ok(out)
}

/// Composition `τ ∘ φ ∘ σ`; any factor may be an identity map.
pub fn compose(tau: &LinearMap, phi: &LinearMap, sigma: &LinearMap) -> Result<LinearMap> {
    if sigma.n() != phi.m() || phi.n() != tau.m() {
        return Err(Error::DimMismatch {
            context: "inner dimensions of the composition must agree",
        });
    }
    let m = sigma.m();
    let n = tau.n();
    let mut mat = ComplexMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..m {
            let mid = phi.apply(&sigma.apply(&ComplexMatrix::unit(m, i, j))?)?;
            let out = tau.apply(&mid)?;
            for k in 0..n {
                for l in 0..n {
                    mat.set(i * n + k, j * n + l, out.get(k, l));
                }
            }
        }
    }
    Ok(LinearMap {
        m,
        n,
        choi: TensorMatrix::new(m, n, mat)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::{max_entangled, swap_operator};
    use crate::rng::Stream;
    use crate::C64;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_map_applies() {
        let id = LinearMap::identity(2);
        let e12 = ComplexMatrix::unit(2, 0, 1);
        assert!(id.apply(&e12).unwrap().max_diff(&e12) < 1e-14);
    }

    #[test]
    fn transpose_map_applies() {
        let t = LinearMap::transpose_map(2);
        let e12 = ComplexMatrix::unit(2, 0, 1);
        let e21 = ComplexMatrix::unit(2, 1, 0);
        assert!(t.apply(&e12).unwrap().max_diff(&e21) < 1e-14);
    }

    #[test]
    fn ad_map_matches_direct_congruence() {
        let mut rng = Stream::new(21, 0);
        let s = rng.gaussian_matrix(3, 3);
        let phi = LinearMap::ad(&s);
        for _ in 0..5 {
            let x = rng.gaussian_matrix(3, 3);
            // Oracle: direct computation of s^† x s.
            let direct = &(&s.adjoint() * &x) * &s;
            assert!(phi.apply(&x).unwrap().max_diff(&direct) < 1e-10);
        }
    }

    #[test]
    fn involution_fixes_transpose_and_ad() {
        let t = LinearMap::transpose_map(2);
        assert!(t.involution().choi().mat().max_diff(t.choi().mat()) < 1e-14);
        let mut rng = Stream::new(22, 0);
        let s = rng.gaussian_matrix(2, 2);
        let phi = LinearMap::ad(&s);
        assert!(phi.involution().choi().mat().max_diff(phi.choi().mat()) < 1e-12);
    }

    #[test]
    fn involution_choi_is_adjoint_and_involutive() {
        let mut rng = Stream::new(23, 0);
        // Random map with arbitrary (non-Hermitian) Choi matrix.
        let phi = LinearMap::from_choi(TensorMatrix::new(2, 3, rng.gaussian_matrix(6, 6)).unwrap());
        let dag = phi.involution();
        // Oracle: entrywise conjugated transpose of C_φ.
        assert!(dag.choi().mat().max_diff(&phi.choi().mat().adjoint()) < 1e-14);
        assert_eq!(dag.involution().choi().mat(), phi.choi().mat());
        // Pointwise: φ†(x) = φ(x*)*.
        let x = rng.gaussian_matrix(2, 2);
        let lhs = dag.apply(&x).unwrap();
        let rhs = phi.apply(&x.adjoint()).unwrap().adjoint();
        assert!(lhs.max_diff(&rhs) < 1e-12);
    }

    #[test]
    fn hermiticity_preservation() {
        let mut rng = Stream::new(24, 0);
        let s = rng.gaussian_matrix(2, 2);
        assert!(LinearMap::ad(&s).is_hermiticity_preserving(1e-10));
        // φ(x) = i·tr(x)·I is not Hermiticity preserving.
        let bad = LinearMap::from_action(2, 2, |x| {
            ComplexMatrix::identity(2).scale(x.trace() * C64::new(0.0, 1.0))
        });
        assert!(!bad.is_hermiticity_preserving(1e-10));
        // A random Hermitian Choi matrix gives a Hermiticity preserving map.
        let h = rng.hermitian_matrix(4);
        let phi = LinearMap::from_choi(TensorMatrix::new(2, 2, h).unwrap());
        assert!(phi.is_hermiticity_preserving(1e-10));
    }

    #[test]
    fn kraus_identity_round_trip() {
        let phi = kraus_to_choi(&[ComplexMatrix::identity(2)]).unwrap();
        assert!(phi.choi().mat().max_diff(max_entangled(2).mat()) < 1e-14);
        let kraus = choi_to_kraus(&phi, 1e-9).unwrap();
        assert_eq!(kraus.len(), 1);
        let back = kraus_to_choi(&kraus).unwrap();
        assert!(back.choi().mat().max_diff(phi.choi().mat()) < 1e-9);
    }

    #[test]
    fn pinching_choi_is_diagonal() {
        // Kraus {e11, e22} gives the pinching map with Choi diag(1,0,0,1).
        let kraus = vec![ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 1, 1)];
        let phi = kraus_to_choi(&kraus).unwrap();
        // Oracle: direct assembly Σ e_ij ⊗ φ(e_ij).
        let direct = LinearMap::from_action(2, 2, |x| {
            ComplexMatrix::diag(&[x.get(0, 0), x.get(1, 1)])
        });
        assert!(phi.choi().mat().max_diff(direct.choi().mat()) < 1e-14);
        let expect = ComplexMatrix::diag(&[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ]);
        assert!(phi.choi().mat().max_diff(&expect) < 1e-14);
    }

    #[test]
    fn transpose_map_is_not_completely_positive() {
        // Choi of the transpose is the swap, with eigenvalue -1.
        let t = LinearMap::transpose_map(2);
        assert!(t.choi().mat().max_diff(&swap_operator(2)) < 1e-14);
        match choi_to_kraus(&t, 1e-9) {
            Err(Error::NotCompletelyPositive { min_eigenvalue }) => {
                assert_abs_diff_eq!(min_eigenvalue, -1.0, epsilon = 1e-10);
            }
            other => panic!("expected NotCompletelyPositive, got {other:?}"),
        }
    }

    #[test]
    fn kraus_round_trip_random_psd_choi() {
        let mut rng = Stream::new(25, 0);
        for _ in 0..20 {
            let g = rng.gaussian_matrix(6, 6);
            let psd = &g * &g.adjoint();
            let phi = LinearMap::from_choi(TensorMatrix::new(2, 3, psd).unwrap());
            let kraus = choi_to_kraus(&phi, 1e-9).unwrap();
            let back = kraus_to_choi(&kraus).unwrap();
            let scale = phi.choi().mat().frobenius_norm().max(1.0);
            assert!(back.choi().mat().max_diff(phi.choi().mat()) < 1e-9 * scale);
        }
    }

    #[test]
    fn compose_identities_and_transposes() {
        let phi = LinearMap::ad(&ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap());
        let id = LinearMap::identity(2);
        let same = compose(&id, &phi, &id).unwrap();
        assert!(same.choi().mat().max_diff(phi.choi().mat()) < 1e-12);
        let t3 = LinearMap::transpose_map(3);
        let tt = compose(&t3, &t3, &LinearMap::identity(3)).unwrap();
        assert!(tt.choi().mat().max_diff(LinearMap::identity(3).choi().mat()) < 1e-12);
    }

    #[test]
    fn compose_matches_pointwise_evaluation() {
        let mut rng = Stream::new(26, 0);
        let sigma = LinearMap::from_choi(TensorMatrix::new(3, 3, rng.gaussian_matrix(9, 9)).unwrap());
        let phi = LinearMap::from_choi(TensorMatrix::new(3, 3, rng.gaussian_matrix(9, 9)).unwrap());
        let tau = LinearMap::from_choi(TensorMatrix::new(3, 3, rng.gaussian_matrix(9, 9)).unwrap());
        let comp = compose(&tau, &phi, &sigma).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let x = ComplexMatrix::unit(3, i, j);
                let direct = tau
                    .apply(&phi.apply(&sigma.apply(&x).unwrap()).unwrap())
                    .unwrap();
                assert!(comp.apply(&x).unwrap().max_diff(&direct) < 1e-10);
            }
        }
    }

    #[test]
    fn matrix_rep_round_trip_and_dual() {
        let mut rng = Stream::new(27, 0);
        let phi = LinearMap::from_choi(TensorMatrix::new(2, 3, rng.gaussian_matrix(6, 6)).unwrap());
        let back = LinearMap::from_matrix_rep(2, 3, &phi.matrix_rep()).unwrap();
        assert_eq!(back.choi().mat(), phi.choi().mat());
        // ⟨φ(x), y⟩ = ⟨x, φ*(y)⟩ under tr(x y^t).
        let dual = phi.pairing_dual();
        for _ in 0..5 {
            let x = rng.gaussian_matrix(2, 2);
            let y = rng.gaussian_matrix(3, 3);
            let lhs = (&phi.apply(&x).unwrap() * &y.transpose()).trace();
            let rhs = (&x * &dual.apply(&y).unwrap().transpose()).trace();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }
}
