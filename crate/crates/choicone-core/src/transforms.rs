//! Superoperators on `M_m ⊗ M_n`: the atom catalog (`ad_s ⊗ ad_t`,
//! one-sided transposes, the flip, global `Ad_V`), compilation to
//! `(mn)²×(mn)²` matrices, and sampled cone-preservation testing.
//!
//! The matrix acts on column-stacked coordinates: `vec(z)[c·mn + r] =
//! z[r, c]`, with the composite row index `(i, k) ↦ i·n + k` shared with
//! [`crate::matlin`].

use alloc::vec;
use alloc::vec::Vec;

use crate::cones::{
    block_positivity_refutation, schmidt_refutation, Certificate, ConeFamily, ConeId, Verdict,
};
use crate::error::{Error, Result};
use crate::mapspace::LinearMap;
use crate::matlin::{svd, ComplexMatrix, LuFactors, Side, TensorMatrix};
use crate::rng::Stream;
use crate::C64;

/// One step of a [`TransformSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum TransformAtom {
    /// `z ↦ (s ⊗ t)^† z (s ⊗ t)` with nonsingular local factors.
    AdLocal { s: ComplexMatrix, t: ComplexMatrix },
    TransposeLeft,
    TransposeRight,
    /// `x ⊗ y ↦ y ⊗ x`, extended linearly; requires `m = n`.
    Flip,
    /// `z ↦ V^† z V` with nonsingular `V` on the full tensor space.
    AdGlobal { v: ComplexMatrix },
}

/// An ordered list of atoms, applied first-to-last.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSpec {
    pub m: usize,
    pub n: usize,
    pub atoms: Vec<TransformAtom>,
}

/// A linear map on `M_m ⊗ M_n` held as its matrix over matrix units.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOp {
    m: usize,
    n: usize,
    mat: ComplexMatrix,
}

#[inline]
fn vec_index(dim: usize, r: usize, c: usize) -> usize {
    c * dim + r
}

impl SuperOp {
    pub fn new(m: usize, n: usize, mat: ComplexMatrix) -> Result<Self> {
        let d2 = (m * n) * (m * n);
        if mat.rows() != d2 || mat.cols() != d2 {
            return Err(Error::BadDims {
                context: "superoperator matrix must be (mn)²×(mn)²",
            });
        }
        Ok(SuperOp { m, n, mat })
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

    /// Builds the matrix column by column from the action on matrix units.
    pub fn from_action(
        m: usize,
        n: usize,
        mut f: impl FnMut(&TensorMatrix) -> TensorMatrix,
    ) -> Self {
        let d = m * n;
        let mut mat = ComplexMatrix::zeros(d * d, d * d);
        for r in 0..d {
            for c in 0..d {
                let unit = TensorMatrix::new(m, n, ComplexMatrix::unit(d, r, c))
                    .expect("unit is square");
                let img = f(&unit);
                let col = vec_index(d, r, c);
                for rr in 0..d {
                    for cc in 0..d {
                        mat.set(vec_index(d, rr, cc), col, img.mat().get(rr, cc));
                    }
                }
            }
        }
        SuperOp { m, n, mat }
    }

    pub fn identity(m: usize, n: usize) -> Self {
        let d2 = (m * n) * (m * n);
        SuperOp {
            m,
            n,
            mat: ComplexMatrix::identity(d2),
        }
    }

    pub fn transpose_left(m: usize, n: usize) -> Self {
        Self::from_action(m, n, |z| z.partial_transpose(Side::First))
    }

    pub fn transpose_right(m: usize, n: usize) -> Self {
        Self::from_action(m, n, |z| z.partial_transpose(Side::Second))
    }

    pub fn transpose_both(m: usize, n: usize) -> Self {
        Self::from_action(m, n, |z| z.partial_transpose(Side::Both))
    }

    pub fn flip(n: usize) -> Self {
        let f = crate::matlin::swap_operator(n);
        Self::from_action(n, n, |z| {
            TensorMatrix::new(n, n, &(&f * z.mat()) * &f).expect("square")
        })
    }

    pub fn ad_local(s: &ComplexMatrix, t: &ComplexMatrix) -> Result<Self> {
        if !s.is_square() || !t.is_square() {
            return Err(Error::BadDims {
                context: "Ad factors must be square",
            });
        }
        check_nonsingular(s)?;
        check_nonsingular(t)?;
        let w = crate::matlin::kron(s, t);
        Self::ad_global_checked(s.rows(), t.rows(), &w, false)
    }

    pub fn ad_global(m: usize, n: usize, v: &ComplexMatrix) -> Result<Self> {
        if v.rows() != m * n || v.cols() != m * n {
            return Err(Error::BadDims {
                context: "global Ad factor must be mn×mn",
            });
        }
        Self::ad_global_checked(m, n, v, true)
    }

    fn ad_global_checked(m: usize, n: usize, v: &ComplexMatrix, check: bool) -> Result<Self> {
        if check {
            check_nonsingular(v)?;
        }
        let va = v.adjoint();
        Ok(Self::from_action(m, n, |z| {
            TensorMatrix::new(m, n, &(&va * z.mat()) * v).expect("square")
        }))
    }

    /// `(σ ⊗ τ)(x ⊗ y) = σ(x) ⊗ τ(y)` for maps `σ` on `M_m`, `τ` on `M_n`.
    pub fn tensor_of_maps(sigma: &LinearMap, tau: &LinearMap) -> Result<Self> {
        if sigma.m() != sigma.n() || tau.m() != tau.n() {
            return Err(Error::BadDims {
                context: "tensor factors must be endomorphisms",
            });
        }
        let m = sigma.m();
        let n = tau.m();
        let d = m * n;
        let mut mat = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..m {
            for j in 0..m {
                for k in 0..n {
                    for l in 0..n {
                        let col = vec_index(d, i * n + k, j * n + l);
                        for ip in 0..m {
                            for jp in 0..m {
                                let a = sigma.choi().get(i, ip, j, jp);
                                if a.norm_sqr() == 0.0 {
                                    continue;
                                }
                                for kp in 0..n {
                                    for lp in 0..n {
                                        let b = tau.choi().get(k, kp, l, lp);
                                        if b.norm_sqr() == 0.0 {
                                            continue;
                                        }
                                        mat.set(
                                            vec_index(d, ip * n + kp, jp * n + lp),
                                            col,
                                            a * b,
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(SuperOp { m, n, mat })
    }

    /// Applies the superoperator to an element of `M_m ⊗ M_n`.
    pub fn apply(&self, z: &TensorMatrix) -> Result<TensorMatrix> {
        if z.m() != self.m || z.n() != self.n {
            return Err(Error::DimMismatch {
                context: "tensor dimensions must match the superoperator",
            });
        }
        let d = self.dim();
        let mut v = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                v[vec_index(d, r, c)] = z.mat().get(r, c);
            }
        }
        let out = self.mat.mat_vec(&v);
        let mat = ComplexMatrix::from_fn(d, d, |r, c| out[vec_index(d, r, c)]);
        TensorMatrix::new(self.m, self.n, mat)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SuperOp) -> Result<Self> {
        if self.m != other.m || self.n != other.n {
            return Err(Error::DimMismatch {
                context: "composed superoperators must share dimensions",
            });
        }
        Ok(SuperOp {
            m: self.m,
            n: self.n,
            mat: &self.mat * &other.mat,
        })
    }

    /// Inverse superoperator via LU; `SingularTheta` below the rcond floor.
    pub fn inverse(&self, rcond_floor: f64) -> Result<Self> {
        let lu = LuFactors::factor(&self.mat)?;
        let rcond = lu.rcond_estimate();
        if rcond < rcond_floor {
            return Err(Error::SingularTheta { rcond });
        }
        Ok(SuperOp {
            m: self.m,
            n: self.n,
            mat: lu.inverse()?,
        })
    }

    /// Transpose of the matrix; the dual superoperator under the bilinear
    /// tensor pairing (see [`crate::pairing::superop_dual`]).
    pub(crate) fn transpose_matrix(&self) -> Self {
        SuperOp {
            m: self.m,
            n: self.n,
            mat: self.mat.transpose(),
        }
    }

    pub fn max_diff(&self, other: &SuperOp) -> f64 {
        self.mat.max_diff(&other.mat)
    }

    /// `Θ(H)* = Θ(H)` for a Hermitian basis of `M_m ⊗ M_n`, within `tol`.
    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Worst Hermiticity deviation of the images of a Hermitian basis.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        let mut check = |h: ComplexMatrix| {
            let img = self
                .apply(&TensorMatrix::new(self.m, self.n, h).expect("square"))
                .expect("dims match");
            worst = worst.max(img.mat().hermitian_deviation());
        };
        for r in 0..d {
            for c in r..d {
                if r == c {
                    check(ComplexMatrix::unit(d, r, r));
                } else {
                    let mut sym = ComplexMatrix::zeros(d, d);
                    sym.set(r, c, C64::new(1.0, 0.0));
                    sym.set(c, r, C64::new(1.0, 0.0));
                    check(sym);
                    let mut skew = ComplexMatrix::zeros(d, d);
                    skew.set(r, c, C64::new(0.0, 1.0));
                    skew.set(c, r, C64::new(0.0, -1.0));
                    check(skew);
                }
            }
        }
        worst
    }
}

fn check_nonsingular(a: &ComplexMatrix) -> Result<()> {
    let rcond = svd(a)?.rcond();
    if rcond < 1e-10 {
        return Err(Error::SingularAd { rcond });
    }
    Ok(())
}

/// Compiles a spec to its superoperator; atoms compose in application
/// order, so `compile(s₁ ++ s₂) = compile(s₂) ∘ compile(s₁)`.
pub fn compile(spec: &TransformSpec) -> Result<SuperOp> {
    let (m, n) = (spec.m, spec.n);
    let mut acc = SuperOp::identity(m, n);
    for atom in &spec.atoms {
        let step = compile_atom(m, n, atom)?;
        acc = step.compose(&acc)?;
    }
    Ok(acc)
}

fn compile_atom(m: usize, n: usize, atom: &TransformAtom) -> Result<SuperOp> {
    match atom {
        TransformAtom::AdLocal { s, t } => {
            if s.rows() != m || t.rows() != n {
                return Err(Error::DimMismatch {
                    context: "AdLocal factors must be m×m and n×n",
                });
            }
            SuperOp::ad_local(s, t)
        }
        TransformAtom::TransposeLeft => Ok(SuperOp::transpose_left(m, n)),
        TransformAtom::TransposeRight => Ok(SuperOp::transpose_right(m, n)),
        TransformAtom::Flip => {
            if m != n {
                return Err(Error::BadDims {
                    context: "flip needs m = n",
                });
            }
            Ok(SuperOp::flip(n))
        }
        TransformAtom::AdGlobal { v } => SuperOp::ad_global(m, n, v),
    }
}

/// Applies a compiled transform to a tensor element.
pub fn apply_transform(theta: &SuperOp, z: &TensorMatrix) -> Result<TensorMatrix> {
    theta.apply(z)
}

/// Outcome of sampled cone-preservation testing. One-sided by design:
/// `NoCounterexample` is evidence, not proof.
#[derive(Debug, Clone)]
pub enum PreservationReport {
    NoCounterexample {
        samples: usize,
        /// Most negative membership margin observed on the images.
        worst_margin: f64,
    },
    Counterexample {
        /// The cone member whose image escapes the cone.
        input: TensorMatrix,
        /// Membership evidence for the input.
        input_cert: Certificate,
        /// Refutation evidence for the image.
        image_cert: Certificate,
    },
}

impl PreservationReport {
    pub fn is_no_counterexample(&self) -> bool {
        matches!(self, PreservationReport::NoCounterexample { .. })
    }
}

/// Draws certified members of the cone, pushes them through `Θ`, and tries
/// to refute membership of the images.
///
/// Members of `S_k` come from the generator family (plus the structured
/// `|ω_k⟩⟨ω_k|` ray); members of `BP_k` are positive combinations of PSD
/// matrices and locally rotated `k·I − |ω⟩⟨ω|` witnesses. The map cones
/// `P_k` and `SP_k` delegate to `BP_k` and `S_k` through the Choi
/// correspondence, so the same matrices are drawn.
pub fn preserves_cone_sampled(
    theta: &SuperOp,
    cone: ConeId,
    samples: usize,
    seed: u64,
) -> Result<PreservationReport> {
    let (m, n) = (theta.m(), theta.n());
    cone.validate(m, n)?;
    let k = cone.k;
    // Sampling-mode budgets, lighter than the standalone certify defaults
    // so a 200-sample run stays in the seconds range.
    let witness_budget = 40;
    let seesaw_restarts = 10;
    let mut worst = f64::INFINITY;

    for idx in 0..samples {
        let (z, input_cert) = match cone.family {
            ConeFamily::SchmidtNumber | ConeFamily::KSuperpositive => {
                draw_schmidt_member(m, n, k, seed, idx as u64)
            }
            ConeFamily::BlockPositive | ConeFamily::KPositive => {
                draw_block_positive_member(m, n, k, seed, idx as u64)
            }
        };
        let image = theta.apply(&z)?;
        let refutation = match cone.family {
            ConeFamily::SchmidtNumber | ConeFamily::KSuperpositive => {
                schmidt_refutation(&image, k, witness_budget, seed ^ 0x5eed_0001, idx as u64)?
            }
            ConeFamily::BlockPositive | ConeFamily::KPositive => {
                block_positivity_refutation(&image, k, seesaw_restarts, seed ^ 0x5eed_0002, idx as u64)?
            }
        };
        match refutation.verdict {
            Verdict::Refuted => {
                return Ok(PreservationReport::Counterexample {
                    input: z,
                    input_cert,
                    image_cert: refutation,
                });
            }
            _ => {
                if let Some(v) = refutation.value {
                    worst = worst.min(v);
                }
            }
        }
    }
    Ok(PreservationReport::NoCounterexample {
        samples,
        worst_margin: if worst.is_finite() { worst } else { 0.0 },
    })
}

/// Structured first draws (`|ω_k⟩⟨ω_k|` and friends), then generator output.
fn draw_schmidt_member(
    m: usize,
    n: usize,
    k: usize,
    seed: u64,
    idx: u64,
) -> (TensorMatrix, Certificate) {
    if idx == 0 {
        return crate::cones::truncated_max_entangled_state(m, n, k, seed);
    }
    let terms = 1 + (idx as usize % 3);
    crate::cones::gen_sk_state(m, n, k, terms, seed.wrapping_add(idx))
        .expect("validated dims")
}

fn draw_block_positive_member(
    m: usize,
    n: usize,
    k: usize,
    seed: u64,
    idx: u64,
) -> (TensorMatrix, Certificate) {
    crate::cones::gen_bp_member(m, n, k, seed.wrapping_add(idx), idx)
}

/// Haar-random nonsingular pair for local rotations in tests.
pub fn random_local_pair(m: usize, n: usize, seed: u64, stream: u64) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = Stream::new(seed, stream);
    (rng.nonsingular_matrix(m), rng.nonsingular_matrix(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::max_entangled;
    use approx::assert_abs_diff_eq;

    #[test]
    fn flip_swaps_product_factors() {
        let e11 = ComplexMatrix::unit(2, 0, 0);
        let e22 = ComplexMatrix::unit(2, 1, 1);
        let z = TensorMatrix::from_kron(&e11, &e22).unwrap();
        let fl = SuperOp::flip(2);
        let out = fl.apply(&z).unwrap();
        let expect = TensorMatrix::from_kron(&e22, &e11).unwrap();
        assert!(out.mat().max_diff(expect.mat()) < 1e-14);
    }

    #[test]
    fn ad_local_acts_factorwise() {
        let mut rng = Stream::new(71, 0);
        let s = rng.nonsingular_matrix(2);
        let t = rng.nonsingular_matrix(3);
        let theta = SuperOp::ad_local(&s, &t).unwrap();
        for _ in 0..5 {
            let x = rng.gaussian_matrix(2, 2);
            let y = rng.gaussian_matrix(3, 3);
            let z = TensorMatrix::from_kron(&x, &y).unwrap();
            let out = theta.apply(&z).unwrap();
            // Oracle: apply the congruence to each factor separately.
            let fx = &(&s.adjoint() * &x) * &s;
            let fy = &(&t.adjoint() * &y) * &t;
            let expect = TensorMatrix::from_kron(&fx, &fy).unwrap();
            assert!(out.mat().max_diff(expect.mat()) < 1e-10);
        }
    }

    #[test]
    fn transpose_left_is_involutive() {
        let tl = SuperOp::transpose_left(2, 3);
        let twice = tl.compose(&tl).unwrap();
        assert_eq!(twice.mat(), SuperOp::identity(2, 3).mat());
    }

    #[test]
    fn compile_is_a_monoid_homomorphism() {
        let mut rng = Stream::new(72, 0);
        let s = rng.nonsingular_matrix(2);
        let t = rng.nonsingular_matrix(2);
        let spec1 = TransformSpec {
            m: 2,
            n: 2,
            atoms: alloc::vec![TransformAtom::TransposeLeft, TransformAtom::Flip],
        };
        let spec2 = TransformSpec {
            m: 2,
            n: 2,
            atoms: alloc::vec![TransformAtom::AdLocal { s, t }],
        };
        let mut joined = spec1.atoms.clone();
        joined.extend(spec2.atoms.clone());
        let spec12 = TransformSpec { m: 2, n: 2, atoms: joined };
        let lhs = compile(&spec12).unwrap();
        let rhs = compile(&spec2).unwrap().compose(&compile(&spec1).unwrap()).unwrap();
        assert!(lhs.max_diff(&rhs) < 1e-10);
    }

    #[test]
    fn compiled_specs_preserve_hermiticity() {
        let mut rng = Stream::new(73, 0);
        let s = rng.nonsingular_matrix(2);
        let t = rng.nonsingular_matrix(2);
        let spec = TransformSpec {
            m: 2,
            n: 2,
            atoms: alloc::vec![
                TransformAtom::Flip,
                TransformAtom::AdLocal { s, t },
                TransformAtom::TransposeRight,
            ],
        };
        let theta = compile(&spec).unwrap();
        assert!(theta.is_hermiticity_preserving(1e-10));

        // Multiplying a coordinate by i breaks Hermiticity preservation.
        let mut bad_mat = ComplexMatrix::identity(16);
        bad_mat.set(1, 1, C64::new(0.0, 1.0));
        let bad = SuperOp::new(2, 2, bad_mat).unwrap();
        assert!(!bad.is_hermiticity_preserving(1e-10));

        // Real combinations of Hermiticity preserving atoms stay so.
        let combo_mat = &theta.mat().scale_re(0.3) + &SuperOp::flip(2).mat().scale_re(0.7);
        let combo = SuperOp::new(2, 2, combo_mat).unwrap();
        assert!(combo.is_hermiticity_preserving(1e-10));
    }

    #[test]
    fn singular_ad_is_rejected() {
        let singular = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let ok = ComplexMatrix::identity(2);
        assert!(matches!(
            SuperOp::ad_local(&singular, &ok),
            Err(Error::SingularAd { .. })
        ));
        let spec = TransformSpec {
            m: 2,
            n: 3,
            atoms: alloc::vec![TransformAtom::Flip],
        };
        assert!(matches!(compile(&spec), Err(Error::BadDims { .. })));
    }

    #[test]
    fn transpose_left_breaks_s2_but_not_s1() {
        let tl = SuperOp::transpose_left(2, 2);
        // S₂ at 2⊗2 is the PSD cone; the maximally entangled projector is
        // the first structured draw and its partial transpose is the swap
        // with eigenvalue −1.
        let report = preserves_cone_sampled(&tl, ConeId::new(ConeFamily::SchmidtNumber, 2), 5, 7)
            .unwrap();
        match report {
            PreservationReport::Counterexample { input, input_cert, image_cert } => {
                assert!(input.mat().max_diff(max_entangled(2).mat()) < 1e-12);
                assert_eq!(input_cert.verdict, Verdict::InCone);
                assert_eq!(image_cert.verdict, Verdict::Refuted);
                assert_abs_diff_eq!(image_cert.value.unwrap(), -1.0, epsilon = 1e-12);
            }
            other => panic!("expected Counterexample, got {other:?}"),
        }
        // Separability is preserved: partial transposes of separable
        // states stay separable.
        let report = preserves_cone_sampled(&tl, ConeId::new(ConeFamily::SchmidtNumber, 1), 25, 7)
            .unwrap();
        assert!(report.is_no_counterexample());
    }

    #[test]
    fn transpose_both_preserves_schmidt_cones() {
        let tt = SuperOp::transpose_both(2, 2);
        for k in 1..=2 {
            let report =
                preserves_cone_sampled(&tt, ConeId::new(ConeFamily::SchmidtNumber, k), 25, 3)
                    .unwrap();
            assert!(report.is_no_counterexample(), "k = {k}");
        }
    }

    #[test]
    fn ad_local_preserves_block_positivity_sampled() {
        let (s, t) = random_local_pair(2, 2, 5, 1);
        let theta = SuperOp::ad_local(&s, &t).unwrap();
        for k in 1..=2 {
            let report =
                preserves_cone_sampled(&theta, ConeId::new(ConeFamily::BlockPositive, k), 15, 3)
                    .unwrap();
            assert!(report.is_no_counterexample(), "k = {k}");
        }
    }
}
