//! The Choi isomorphism `Γ`, its basis-driven generalization, the named
//! variants `C^Θ_φ = Θ(C_φ)`, and the decision procedure recovering `σ`
//! from `Θ = σ ⊗ id`.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::mapspace::LinearMap;
use crate::matlin::{svd, ComplexMatrix, LuFactors, TensorMatrix};
use crate::transforms::SuperOp;
use crate::C64;

/// A pair of bases of `M_m`. Together they determine the bilinear form on
/// the domain under which they are dual, and through it a Choi-style
/// isomorphism `φ ↦ Σ_i e_i ⊗ φ(f_i)`.
///
/// The canonical pairs for the form `⟨x, y⟩ = tr(x y^t)` are built by
/// [`BasisPair::from_left_basis`], which inverts the Gram matrix to find
/// the unique dual basis; a Hermitian left basis then yields a Hermitian
/// dual basis.
#[derive(Debug, Clone)]
pub struct BasisPair {
    e: Vec<ComplexMatrix>,
    f: Vec<ComplexMatrix>,
    m: usize,
}

impl BasisPair {
    /// Validates that both lists are bases of `M_m` (length `m²`, square
    /// shape, linearly independent).
    pub fn new(e: Vec<ComplexMatrix>, f: Vec<ComplexMatrix>) -> Result<Self> {
        let m = match e.first() {
            Some(first) if first.is_square() => first.rows(),
            _ => {
                return Err(Error::BadDims {
                    context: "basis elements must be square",
                })
            }
        };
        if e.len() != m * m || f.len() != m * m {
            return Err(Error::BadDims {
                context: "basis lists must have length m²",
            });
        }
        if e.iter().chain(f.iter()).any(|x| x.rows() != m || x.cols() != m) {
            return Err(Error::DimMismatch {
                context: "basis elements must share one shape",
            });
        }
        for list in [&e, &f] {
            let coeff = stack_as_columns(list);
            let rcond = svd(&coeff)?.rcond();
            if rcond < 1e-10 {
                return Err(Error::NotDualPair { deviation: rcond });
            }
        }
        Ok(BasisPair { e, f, m })
    }

    /// The Eq-style dual pair for `⟨x, y⟩ = tr(x y^t)`: given a basis
    /// `{e_i}`, finds the unique `{f_i}` with `tr(e_i f_j^t) = δ_ij`.
    pub fn from_left_basis(e: Vec<ComplexMatrix>) -> Result<Self> {
        let pre = Self::new(e.clone(), e)?;
        let m = pre.m;
        // Coefficients of f over matrix units solve M·F = I with
        // M[i, (r,c)] = tr(e_i e_rc^t) = e_i[r, c].
        let coeff = ComplexMatrix::from_fn(m * m, m * m, |i, rc| {
            pre.e[i].get(rc / m, rc % m)
        });
        let lu = LuFactors::factor(&coeff)?;
        if lu.rcond_estimate() == 0.0 {
            return Err(Error::NotDualPair { deviation: 0.0 });
        }
        let inv = lu.inverse()?;
        let f = (0..m * m)
            .map(|j| ComplexMatrix::from_fn(m, m, |r, c| inv.get(r * m + c, j)))
            .collect();
        Ok(BasisPair { e: pre.e, f, m })
    }

    /// Matrix units paired with themselves; the canonical pair of the
    /// `tr(x y^t)` form.
    pub fn standard(m: usize) -> Self {
        let units: Vec<ComplexMatrix> = (0..m * m)
            .map(|a| ComplexMatrix::unit(m, a / m, a % m))
            .collect();
        BasisPair {
            e: units.clone(),
            f: units,
            m,
        }
    }

    /// Matrix units paired with their transposes; the canonical pair of
    /// the `tr(x y)` form.
    pub fn transposed_units(m: usize) -> Self {
        let e: Vec<ComplexMatrix> = (0..m * m)
            .map(|a| ComplexMatrix::unit(m, a / m, a % m))
            .collect();
        let f = e.iter().map(|x| x.transpose()).collect();
        BasisPair { e, f, m }
    }

    /// The 2×2 Hermitian Weyl basis, self-dual under `tr(x y^t)`.
    pub fn weyl_2() -> Self {
        let r = 0.5f64.sqrt();
        let mats = [
            ComplexMatrix::from_real(2, 2, &[r, 0.0, 0.0, r]).unwrap(),
            ComplexMatrix::from_real(2, 2, &[r, 0.0, 0.0, -r]).unwrap(),
            ComplexMatrix::from_real(2, 2, &[0.0, r, r, 0.0]).unwrap(),
            ComplexMatrix::from_real(2, 2, &[0.0, -r, r, 0.0]).unwrap(),
        ];
        BasisPair {
            e: mats.to_vec(),
            f: mats.to_vec(),
            m: 2,
        }
    }

    /// The 2×2 Pauli basis (scaled by `1/√2`), self-dual under `tr(x y)`.
    pub fn pauli_2() -> Self {
        let r = 0.5f64.sqrt();
        let zero = C64::new(0.0, 0.0);
        let mats = [
            ComplexMatrix::from_real(2, 2, &[r, 0.0, 0.0, r]).unwrap(),
            ComplexMatrix::from_real(2, 2, &[r, 0.0, 0.0, -r]).unwrap(),
            ComplexMatrix::from_real(2, 2, &[0.0, r, r, 0.0]).unwrap(),
            ComplexMatrix::new(2, 2, alloc::vec![zero, C64::new(0.0, -r), C64::new(0.0, r), zero])
                .unwrap(),
        ];
        BasisPair {
            e: mats.to_vec(),
            f: mats.to_vec(),
            m: 2,
        }
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn left(&self) -> &[ComplexMatrix] {
        &self.e
    }

    #[inline]
    pub fn right(&self) -> &[ComplexMatrix] {
        &self.f
    }

    /// Gram matrix `G[i, j] = tr(e_i f_j^t)` of the pair under the
    /// standard form; the identity exactly for its canonical pairs.
    pub fn gram(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.m * self.m, self.m * self.m, |i, j| {
            (&self.e[i] * &self.f[j].transpose()).trace()
        })
    }

    /// Deviation of the Gram matrix from the identity.
    pub fn duality_deviation(&self) -> f64 {
        self.gram().max_diff(&ComplexMatrix::identity(self.m * self.m))
    }

    /// Checks duality under `tr(x y^t)` within `tol`.
    pub fn check_standard_dual(&self, tol: f64) -> Result<()> {
        let deviation = self.duality_deviation();
        if deviation > tol {
            return Err(Error::NotDualPair { deviation });
        }
        Ok(())
    }

    /// Worst Hermiticity deviation over both lists.
    pub fn hermitian_deviation(&self) -> f64 {
        self.e
            .iter()
            .chain(self.f.iter())
            .map(|x| x.hermitian_deviation())
            .fold(0.0, f64::max)
    }

    /// A new pair inducing the same bilinear form: `e'_i = Σ_a T[a,i] e_a`
    /// and `f'_j = Σ_b (T^{-t})[b,j] f_b` for invertible `T`.
    pub fn change_basis(&self, t: &ComplexMatrix) -> Result<Self> {
        let d = self.m * self.m;
        if t.rows() != d || t.cols() != d {
            return Err(Error::BadDims {
                context: "change of basis must be m²×m²",
            });
        }
        let lu = LuFactors::factor(t)?;
        if lu.rcond_estimate() < 1e-12 {
            return Err(Error::NotDualPair {
                deviation: lu.rcond_estimate(),
            });
        }
        let t_inv_t = lu.inverse()?.transpose();
        let combine = |coeff: &ComplexMatrix, basis: &[ComplexMatrix]| -> Vec<ComplexMatrix> {
            (0..d)
                .map(|j| {
                    let mut acc = ComplexMatrix::zeros(self.m, self.m);
                    for (a, b) in basis.iter().enumerate() {
                        let w = coeff.get(a, j);
                        if w.norm_sqr() > 0.0 {
                            acc = &acc + &b.scale(w);
                        }
                    }
                    acc
                })
                .collect()
        };
        Ok(BasisPair {
            e: combine(t, &self.e),
            f: combine(&t_inv_t, &self.f),
            m: self.m,
        })
    }
}

fn stack_as_columns(list: &[ComplexMatrix]) -> ComplexMatrix {
    let m = list[0].rows();
    ComplexMatrix::from_fn(m * m, list.len(), |rc, j| list[j].get(rc / m, rc % m))
}

/// The standard Choi matrix of a map (its stored canonical form).
pub fn choi(phi: &LinearMap) -> TensorMatrix {
    phi.choi().clone()
}

/// `Σ_i e_i ⊗ φ(f_i)` over a basis pair. Pairs inducing the same bilinear
/// form on the domain produce the same output.
pub fn choi_from_basis(bp: &BasisPair, phi: &LinearMap) -> Result<TensorMatrix> {
    if bp.m() != phi.m() {
        return Err(Error::DimMismatch {
            context: "basis dimension must match the map domain",
        });
    }
    let (m, n) = (phi.m(), phi.n());
    let mut mat = ComplexMatrix::zeros(m * n, m * n);
    for (e_i, f_i) in bp.left().iter().zip(bp.right()) {
        let img = phi.apply(f_i)?;
        for i in 0..m {
            for j in 0..m {
                let a = e_i.get(i, j);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        mat.add_assign_at(i * n + k, j * n + l, a * img.get(k, l));
                    }
                }
            }
        }
    }
    TensorMatrix::new(m, n, mat)
}

/// The Choi variant `C^Θ_φ = Θ(C_φ)`.
pub fn choi_theta(theta: &SuperOp, phi: &LinearMap) -> Result<TensorMatrix> {
    if theta.m() != phi.m() || theta.n() != phi.n() {
        return Err(Error::DimMismatch {
            context: "superoperator dimensions must match the map",
        });
    }
    theta.apply(phi.choi())
}

/// Recovers `σ` when `Θ = σ ⊗ id`, and reports absence otherwise.
///
/// `Θ`, regrouped as an element of `L(M_m) ⊗ L(M_n)`, is a simple tensor
/// exactly when the regrouped matrix has rank one; the second factor is
/// then compared against the identity map, whose coefficient fixes the
/// normalization of `σ`.
pub fn detect_left_simple(theta: &SuperOp, tol: f64) -> Option<LinearMap> {
    let (m, n) = (theta.m(), theta.n());
    let d = m * n;
    let (m2, n2) = (m * m, n * n);
    // R[(ij, i'j'), (kl, k'l')] = Θmat[(i'k'),(j'l') ; (ik),(jl)].
    let r = ComplexMatrix::from_fn(m2 * m2, n2 * n2, |a, b| {
        let (ij, ipjp) = (a / m2, a % m2);
        let (i, j) = (ij / m, ij % m);
        let (ip, jp) = (ipjp / m, ipjp % m);
        let (kl, kplp) = (b / n2, b % n2);
        let (k, l) = (kl / n, kl % n);
        let (kp, lp) = (kplp / n, kplp % n);
        let row = (jp * n + lp) * d + (ip * n + kp);
        let col = (j * n + l) * d + (i * n + k);
        theta.mat().get(row, col)
    });
    let dec = svd(&r).ok()?;
    let s0 = *dec.s.first()?;
    if s0 <= 0.0 {
        return None;
    }
    if dec.s.len() > 1 && dec.s[1] > tol * s0 {
        return None;
    }
    // R = p q^T with p = s₀·u₀ and q = conj(v₀).
    let p: Vec<C64> = dec.u.column(0).iter().map(|&z| z * s0).collect();
    let q: Vec<C64> = dec.v.column(0).iter().map(|z| z.conj()).collect();
    let tau_mat = ComplexMatrix::from_fn(n2, n2, |row, col| q[col * n2 + row]);
    let c = tau_mat.trace() / (n2 as f64);
    let c_norm = c.norm();
    if c_norm <= tol * tau_mat.max_norm().max(1e-300) {
        return None;
    }
    let id_residual = tau_mat.max_diff(&ComplexMatrix::identity(n2).scale(c));
    if id_residual > tol * tau_mat.max_norm().max(c_norm) {
        return None;
    }
    let sigma_rep = ComplexMatrix::from_fn(m2, m2, |row, col| p[col * m2 + row] * c);
    LinearMap::from_matrix_rep(m, m, &sigma_rep).ok()
}
