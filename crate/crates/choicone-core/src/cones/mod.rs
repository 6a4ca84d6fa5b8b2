//! Certificate-based membership for the four cone families: `S_k`
//! (Schmidt number), `BP_k` (block positivity), `P_k` (k-positivity) and
//! `SP_k` (k-superpositivity), plus generators producing certified
//! members.
//!
//! Membership is deliberately three-valued. The exactly decidable regimes
//! are `k = m∧n` (an eigenvalue problem) and `k = 1` at 2⊗2 and 2⊗3,
//! where the positive partial transpose criterion is exact. Everywhere
//! else a verdict is only issued when constructive evidence exists: an
//! explicit decomposition for `InCone`, an explicit witness with negative
//! pairing for `Refuted`, and `Unknown` otherwise — soundness over
//! completeness.

mod nnls;
mod seesaw;

pub use seesaw::seesaw_min;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mapspace::{kraus_to_choi, LinearMap};
use crate::matlin::{hermitian_eig, vec_norm, ComplexMatrix, Side, TensorMatrix};
use crate::pairing::trace_pair;
use crate::rng::Stream;
use crate::C64;

const CONE_MARGIN: f64 = 1e-10;
const STRUCTURAL_TOL: f64 = 1e-8;
const HERMITIAN_TOL: f64 = 1e-8;
const RECONSTRUCTION_TOL: f64 = 1e-8;

/// The four cone families of the correspondence diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeFamily {
    /// `S_k`: unnormalized states of Schmidt number ≤ k.
    SchmidtNumber,
    /// `BP_k`: Hermitian `z` with `⟨ζ|z|ζ⟩ ≥ 0` for all `SR(ζ) ≤ k`.
    BlockPositive,
    /// `P_k`: maps whose Choi matrix is k-block-positive.
    KPositive,
    /// `SP_k`: maps whose Choi matrix has Schmidt number ≤ k.
    KSuperpositive,
}

/// A cone family at a level `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeId {
    pub family: ConeFamily,
    pub k: usize,
}

impl ConeId {
    pub fn new(family: ConeFamily, k: usize) -> Self {
        ConeId { family, k }
    }

    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        if self.k == 0 || self.k > m.min(n) {
            return Err(Error::BadDims {
                context: "cone level k must satisfy 1 ≤ k ≤ min(m, n)",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    InCone,
    Refuted,
    Unknown,
}

/// One term `w·|ζ⟩⟨ζ|` of a constructive decomposition; `zeta` is unit.
#[derive(Debug, Clone)]
pub struct DecompTerm {
    pub weight: f64,
    pub zeta: Vec<C64>,
}

/// Constructive refutation evidence.
#[derive(Debug, Clone)]
pub enum Witness {
    /// Unit `ζ` with `SR(ζ) ≤ k` and `⟨ζ|z|ζ⟩ = value < 0`; refutes
    /// k-block-positivity.
    SchmidtVector { zeta: Vec<C64>, value: f64 },
    /// k-block-positive `w` with `⟨z, w⟩ = value < 0` under the bilinear
    /// trace form; refutes Schmidt number ≤ k.
    BlockPositive { witness: TensorMatrix, value: f64 },
}

impl Witness {
    pub fn value(&self) -> f64 {
        match self {
            Witness::SchmidtVector { value, .. } => *value,
            Witness::BlockPositive { value, .. } => *value,
        }
    }
}

/// A three-valued verdict with its numeric evidence.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub verdict: Verdict,
    pub decomposition: Option<Vec<DecompTerm>>,
    pub witness: Option<Witness>,
    /// Best (most adverse) membership margin observed.
    pub value: Option<f64>,
    pub samples_used: usize,
    pub seed: u64,
}

impl Certificate {
    fn unknown(value: Option<f64>, samples: usize, seed: u64) -> Self {
        Certificate {
            verdict: Verdict::Unknown,
            decomposition: None,
            witness: None,
            value,
            samples_used: samples,
            seed,
        }
    }

    fn in_cone(decomposition: Vec<DecompTerm>, value: Option<f64>, samples: usize, seed: u64) -> Self {
        Certificate {
            verdict: Verdict::InCone,
            decomposition: Some(decomposition),
            witness: None,
            value,
            samples_used: samples,
            seed,
        }
    }

    fn refuted(witness: Witness, samples: usize, seed: u64) -> Self {
        let value = witness.value();
        Certificate {
            verdict: Verdict::Refuted,
            decomposition: None,
            witness: Some(witness),
            value: Some(value),
            samples_used: samples,
            seed,
        }
    }

    /// Re-checks the certificate against the matrix it talks about:
    /// `InCone` decompositions must reassemble within `1e-8` with Schmidt
    /// ranks ≤ k (ranks are not constrained for the block-positive
    /// families, where a PSD decomposition proves membership at every k);
    /// `Refuted` witnesses must re-evaluate to a value ≤ −1e-10.
    pub fn validate(&self, z: &TensorMatrix, cone: ConeId) -> Result<()> {
        match self.verdict {
            Verdict::InCone => {
                let terms = self.decomposition.as_ref().ok_or(Error::BadDims {
                    context: "InCone certificate must carry a decomposition",
                })?;
                let d = z.dim();
                let mut acc = ComplexMatrix::zeros(d, d);
                for term in terms {
                    if term.weight < 0.0 {
                        return Err(Error::BadDims {
                            context: "decomposition weights must be nonnegative",
                        });
                    }
                    let limit_rank = matches!(
                        cone.family,
                        ConeFamily::SchmidtNumber | ConeFamily::KSuperpositive
                    );
                    if limit_rank {
                        let sr = schmidt_rank(&term.zeta, z.m(), z.n(), STRUCTURAL_TOL)?;
                        if sr > cone.k {
                            return Err(Error::BadDims {
                                context: "decomposition vector exceeds the Schmidt rank bound",
                            });
                        }
                    }
                    let p = ComplexMatrix::outer(&term.zeta, &term.zeta);
                    acc = &acc + &p.scale_re(term.weight);
                }
                let residual = acc.max_diff(z.mat());
                let scale = z.mat().max_norm().max(1.0);
                if residual > RECONSTRUCTION_TOL * scale {
                    return Err(Error::BadDims {
                        context: "decomposition does not reassemble the matrix",
                    });
                }
                Ok(())
            }
            Verdict::Refuted => {
                let witness = self.witness.as_ref().ok_or(Error::BadDims {
                    context: "Refuted certificate must carry a witness",
                })?;
                let recomputed = match witness {
                    Witness::SchmidtVector { zeta, .. } => {
                        let sr = schmidt_rank(zeta, z.m(), z.n(), STRUCTURAL_TOL)?;
                        if sr > cone.k {
                            return Err(Error::BadDims {
                                context: "witness vector exceeds the Schmidt rank bound",
                            });
                        }
                        let norm = vec_norm(zeta);
                        z.mat().quadratic_form(zeta).re / (norm * norm)
                    }
                    Witness::BlockPositive { witness, .. } => {
                        trace_pair(z.mat(), witness.mat())?.re
                    }
                };
                if recomputed > -CONE_MARGIN {
                    return Err(Error::BadDims {
                        context: "witness does not re-evaluate negative",
                    });
                }
                Ok(())
            }
            Verdict::Unknown => Ok(()),
        }
    }
}

/// Number of singular values of the `m×n` matricization exceeding
/// `tol · s_max`.
pub fn schmidt_rank(zeta: &[C64], m: usize, n: usize, tol: f64) -> Result<usize> {
    if zeta.len() != m * n {
        return Err(Error::DimMismatch {
            context: "vector length must be m·n",
        });
    }
    if vec_norm(zeta) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mat = ComplexMatrix::from_fn(m, n, |i, j| zeta[i * n + j]);
    let dec = crate::matlin::svd(&mat)?;
    Ok(dec.rank(tol))
}

fn check_hermitian(z: &TensorMatrix) -> Result<()> {
    let deviation = z.mat().hermitian_deviation();
    let scale = z.mat().max_norm().max(1.0);
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

fn symmetrized(z: &TensorMatrix) -> TensorMatrix {
    TensorMatrix::new(z.m(), z.n(), (&(z.mat() + &z.mat().adjoint())).scale_re(0.5))
        .expect("shape preserved")
}

/// Eigendecomposition terms with eigenvalues in `[-margin, 0]` clipped to
/// zero; `None` when an eigenvalue is below `-margin`.
fn psd_decomposition(z: &TensorMatrix) -> Result<Option<(Vec<DecompTerm>, f64)>> {
    let (lam, vecs) = hermitian_eig(z.mat(), HERMITIAN_TOL * z.mat().max_norm().max(1.0))?;
    let min = lam.last().copied().unwrap_or(0.0);
    let scale = lam.first().copied().unwrap_or(0.0).abs().max(1.0);
    if min < -CONE_MARGIN * scale {
        return Ok(None);
    }
    let mut terms = Vec::new();
    for (i, &l) in lam.iter().enumerate() {
        if l > 0.0 {
            terms.push(DecompTerm {
                weight: l,
                zeta: vecs.column(i),
            });
        }
    }
    Ok(Some((terms, min)))
}

fn negative_eigenpair(z: &TensorMatrix) -> Result<(f64, Vec<C64>)> {
    let (lam, vecs) = hermitian_eig(z.mat(), HERMITIAN_TOL * z.mat().max_norm().max(1.0))?;
    let idx = lam.len() - 1;
    Ok((lam[idx], vecs.column(idx)))
}

/// PSD refutation witness for `S_k` at any level: `w = conj(|v⟩⟨v|)`
/// pairs to the eigenvalue, and is PSD hence k-block-positive.
fn psd_witness(z: &TensorMatrix, value: f64, v: &[C64]) -> Witness {
    let conj_v: Vec<C64> = v.iter().map(|x| x.conj()).collect();
    let w = ComplexMatrix::outer(&conj_v, &conj_v);
    let witness = TensorMatrix::new(z.m(), z.n(), w).expect("projector shape");
    Witness::BlockPositive { witness, value }
}

/// Partial-transpose witness for `S_1`: with `v` the most negative
/// eigenvector of `z^{Γ₁}`, the matrix `(|v⟩⟨v|)^{Γ₂}` is 1-block-positive
/// and pairs with `z` to that eigenvalue.
fn ppt_witness(z: &TensorMatrix, value: f64, v: &[C64]) -> Witness {
    let p = ComplexMatrix::outer(v, v);
    let pt = TensorMatrix::new(z.m(), z.n(), p)
        .expect("projector shape")
        .partial_transpose(Side::Second);
    Witness::BlockPositive {
        witness: pt,
        value,
    }
}

/// Whether the positive partial transpose criterion is exact: 2⊗2, 2⊗3,
/// 3⊗2.
pub fn ppt_is_exact(m: usize, n: usize) -> bool {
    matches!((m, n), (2, 2) | (2, 3) | (3, 2))
}

/// Certifies membership of `ρ` in `S_k`.
pub fn schmidt_number_certify(
    rho: &TensorMatrix,
    k: usize,
    budget: usize,
    seed: u64,
) -> Result<Certificate> {
    check_hermitian(rho)?;
    ConeId::new(ConeFamily::SchmidtNumber, k).validate(rho.m(), rho.n())?;
    let z = symmetrized(rho);
    let min_dim = z.m().min(z.n());

    // S_k ⊆ PSD for every k, and S_{m∧n} = PSD exactly.
    match psd_decomposition(&z)? {
        None => {
            let (value, v) = negative_eigenpair(&z)?;
            return Ok(Certificate::refuted(psd_witness(&z, value, &v), 0, seed));
        }
        Some((terms, min)) if k == min_dim => {
            return Ok(Certificate::in_cone(terms, Some(min), 0, seed));
        }
        Some(_) => {}
    }

    let mut worst = f64::INFINITY;
    if k == 1 {
        let gamma = z.partial_transpose(Side::First);
        let (value, v) = negative_eigenpair(&gamma)?;
        worst = worst.min(value);
        if value < -CONE_MARGIN * gamma.mat().max_norm().max(1.0) {
            return Ok(Certificate::refuted(ppt_witness(&z, value, &v), 0, seed));
        }
    }

    // Constructive decomposition attempt.
    if let Some(terms) = find_decomposition(&z, k, budget, seed) {
        let samples = terms.len();
        return Ok(Certificate::in_cone(terms, Some(worst.min(0.0).max(-1.0)), samples, seed));
    }

    // One-sided witness sampling; pointless where PPT already decided.
    if !(k == 1 && ppt_is_exact(z.m(), z.n())) {
        if let Some(cert) = witness_family_refutation(&z, k, budget, seed, &mut worst)? {
            return Ok(cert);
        }
    }

    Ok(Certificate::unknown(
        if worst.is_finite() { Some(worst) } else { None },
        budget,
        seed,
    ))
}

/// Refutation-only Schmidt test (no decomposition search); used by the
/// sampled cone-preservation driver.
pub fn schmidt_refutation(
    z: &TensorMatrix,
    k: usize,
    budget: usize,
    seed: u64,
    stream: u64,
) -> Result<Certificate> {
    let z = symmetrized(z);
    ConeId::new(ConeFamily::SchmidtNumber, k).validate(z.m(), z.n())?;
    let mut worst = f64::INFINITY;

    let scale = z.mat().max_norm().max(1.0);
    let (value, v) = negative_eigenpair(&z)?;
    worst = worst.min(value);
    if value < -CONE_MARGIN * scale {
        return Ok(Certificate::refuted(psd_witness(&z, value, &v), 0, seed));
    }
    if k == 1 {
        let gamma = z.partial_transpose(Side::First);
        let (value, v) = negative_eigenpair(&gamma)?;
        worst = worst.min(value);
        if value < -CONE_MARGIN * scale {
            return Ok(Certificate::refuted(ppt_witness(&z, value, &v), 0, seed));
        }
    }
    if k < z.m().min(z.n()) && !(k == 1 && ppt_is_exact(z.m(), z.n())) {
        if let Some(cert) =
            witness_family_refutation(&z, k, budget, seed.wrapping_add(stream), &mut worst)?
        {
            return Ok(cert);
        }
    }
    Ok(Certificate::unknown(Some(worst), budget, seed))
}

/// Pairs `z` against locally rotated copies of the canonical k-positive
/// witness; a negative pairing refutes `z ∈ S_k`.
fn witness_family_refutation(
    z: &TensorMatrix,
    k: usize,
    budget: usize,
    seed: u64,
    worst: &mut f64,
) -> Result<Option<Certificate>> {
    let (m, n) = (z.m(), z.n());
    let base = gen_kpos_witness(m, n, k)?.choi().clone();
    let scale = z.mat().max_norm().max(1.0);
    for draw in 0..budget.max(1) {
        let w = if draw == 0 {
            base.clone()
        } else {
            let mut rng = Stream::new(seed, 0x77ee_0000 + draw as u64);
            let u = rng.haar_unitary(m);
            let v = rng.haar_unitary(n);
            let loc = crate::matlin::kron(&u, &v);
            TensorMatrix::new(m, n, &(&loc * base.mat()) * &loc.adjoint())?
        };
        let value = trace_pair(z.mat(), w.mat())?.re;
        *worst = worst.min(value);
        if value < -CONE_MARGIN * scale {
            return Ok(Some(Certificate::refuted(
                Witness::BlockPositive { witness: w, value },
                draw + 1,
                seed,
            )));
        }
    }
    Ok(None)
}

/// Certifies membership of `z` in `BP_k`.
pub fn block_positivity_certify(
    z: &TensorMatrix,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<Certificate> {
    check_hermitian(z)?;
    ConeId::new(ConeFamily::BlockPositive, k).validate(z.m(), z.n())?;
    let z = symmetrized(z);
    block_positivity_refutation(&z, k, restarts, seed, 0)
        .map(|cert| finish_block_positive(&z, k, cert, seed))?
}

/// Refutation-only block positivity test via see-saw (exact eigenvalue
/// test at `k = m∧n`).
pub fn block_positivity_refutation(
    z: &TensorMatrix,
    k: usize,
    restarts: usize,
    seed: u64,
    stream: u64,
) -> Result<Certificate> {
    let z = symmetrized(z);
    ConeId::new(ConeFamily::BlockPositive, k).validate(z.m(), z.n())?;
    let scale = z.mat().max_norm().max(1.0);
    if k == z.m().min(z.n()) {
        let (value, v) = negative_eigenpair(&z)?;
        if value < -CONE_MARGIN * scale {
            let norm = vec_norm(&v);
            let zeta: Vec<C64> = v.iter().map(|&x| x / norm).collect();
            return Ok(Certificate::refuted(
                Witness::SchmidtVector { zeta, value },
                0,
                seed,
            ));
        }
        return Ok(Certificate::unknown(Some(value), 0, seed));
    }
    let (value, zeta) = seesaw_min(&z, k, restarts, seed, stream);
    if value < -CONE_MARGIN * scale && !zeta.is_empty() {
        return Ok(Certificate::refuted(
            Witness::SchmidtVector { zeta, value },
            restarts,
            seed,
        ));
    }
    Ok(Certificate::unknown(Some(value), restarts, seed))
}

/// Upgrades a non-refuted verdict to `InCone` where that is exact
/// (`k = m∧n` and the matrix is PSD).
fn finish_block_positive(
    z: &TensorMatrix,
    k: usize,
    cert: Certificate,
    seed: u64,
) -> Result<Certificate> {
    if cert.verdict == Verdict::Refuted || k != z.m().min(z.n()) {
        return Ok(cert);
    }
    match psd_decomposition(z)? {
        Some((terms, min)) => Ok(Certificate::in_cone(terms, Some(min), cert.samples_used, seed)),
        None => Ok(cert),
    }
}

/// `P_k` membership of a map: block positivity of its Choi matrix.
pub fn k_positive_certify(
    phi: &LinearMap,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<Certificate> {
    block_positivity_certify(phi.choi(), k, restarts, seed)
}

/// `SP_k` membership of a map: Schmidt number of its Choi matrix.
pub fn k_superpositive_certify(
    phi: &LinearMap,
    k: usize,
    budget: usize,
    seed: u64,
) -> Result<Certificate> {
    schmidt_number_certify(phi.choi(), k, budget, seed)
}

/// Searches for a decomposition of `z` into projectors of Schmidt rank
/// ≤ k: first the eigen-ensemble (exact when every eigenvector already
/// has rank ≤ k), then nonnegative least squares over a frame of
/// rank-≤k projectors that grows by matching pursuit — each round adds
/// the rank-≤k direction that best aligns with the current residual,
/// found by see-saw. Failure returns `None`, never a false decomposition.
fn find_decomposition(
    z: &TensorMatrix,
    k: usize,
    budget: usize,
    seed: u64,
) -> Option<Vec<DecompTerm>> {
    let (m, n) = (z.m(), z.n());
    let scale = z.mat().max_norm().max(1.0);
    let gate = 0.5 * RECONSTRUCTION_TOL * scale;
    let (lam, vecs) = hermitian_eig(z.mat(), HERMITIAN_TOL * scale).ok()?;

    // Eigen-ensemble: the eigendecomposition itself may already qualify.
    let significant: Vec<usize> = (0..lam.len())
        .filter(|&i| lam[i] > STRUCTURAL_TOL * scale)
        .collect();
    let all_low_rank = significant.iter().all(|&i| {
        schmidt_rank(&vecs.column(i), m, n, STRUCTURAL_TOL).map_or(false, |r| r <= k)
    });
    if all_low_rank {
        let mut terms = Vec::new();
        let mut acc = ComplexMatrix::zeros(z.dim(), z.dim());
        for (i, &l) in lam.iter().enumerate() {
            if l > 0.0 {
                let zeta = vecs.column(i);
                acc = &acc + &ComplexMatrix::outer(&zeta, &zeta).scale_re(l);
                terms.push(DecompTerm { weight: l, zeta });
            }
        }
        if acc.max_diff(z.mat()) <= RECONSTRUCTION_TOL * scale {
            return Some(terms);
        }
    }

    // Structured starting frame: truncated eigenvectors, their pairwise
    // combinations, and (for k = 1) the computational products.
    let mut frame: Vec<Vec<C64>> = Vec::new();
    let truncate = |v: &[C64]| {
        seesaw::schmidt_factors(v, m, n, k).and_then(|(a, b)| {
            let t = seesaw::assemble(&a, &b);
            let norm = vec_norm(&t);
            if norm > 1e-9 {
                Some(t.iter().map(|&x| x / norm).collect::<Vec<C64>>())
            } else {
                None
            }
        })
    };
    for &i in &significant {
        if let Some(t) = truncate(&vecs.column(i)) {
            frame.push(t);
        }
    }
    for (a_pos, &i) in significant.iter().take(4).enumerate() {
        for &j in significant.iter().skip(a_pos + 1).take(3) {
            let vi = vecs.column(i);
            let vj = vecs.column(j);
            let phases = [
                C64::new(1.0, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
            ];
            for phase in phases {
                let combo: Vec<C64> = vi.iter().zip(&vj).map(|(x, y)| x + phase * y).collect();
                if let Some(t) = truncate(&combo) {
                    frame.push(t);
                }
            }
        }
    }
    if k == 1 {
        for i in 0..m {
            for j in 0..n {
                let mut v = alloc::vec![C64::new(0.0, 0.0); m * n];
                v[i * n + j] = C64::new(1.0, 0.0);
                frame.push(v);
            }
        }
    }

    let target = nnls::hermitian_vec(z.mat());
    let mut columns: Vec<Vec<f64>> = frame
        .iter()
        .map(|v| nnls::hermitian_vec(&ComplexMatrix::outer(v, v)))
        .collect();

    let rounds = budget.clamp(60, 300);
    let mut weights = nnls::nnls(&columns, &target);
    for round in 0..rounds {
        let mut acc = ComplexMatrix::zeros(z.dim(), z.dim());
        for (j, &w) in weights.iter().enumerate() {
            if w > 1e-14 {
                acc = &acc + &ComplexMatrix::outer(&frame[j], &frame[j]).scale_re(w);
            }
        }
        let residual_mat = z.mat() - &acc;
        if residual_mat.max_norm() <= gate {
            break;
        }
        // Most aligned rank-≤k direction: maximize ⟨ζ|R|ζ⟩.
        let neg = TensorMatrix::new(m, n, -&residual_mat).ok()?;
        let (val, zeta) = seesaw::seesaw_min(&neg, k, 4, seed, 0xf9a0_0000 + round as u64);
        if -val <= 1e-14 * scale || zeta.is_empty() {
            break;
        }
        columns.push(nnls::hermitian_vec(&ComplexMatrix::outer(&zeta, &zeta)));
        frame.push(zeta);
        weights = nnls::nnls(&columns, &target);
    }

    let mut terms = Vec::new();
    let mut acc = ComplexMatrix::zeros(z.dim(), z.dim());
    for (j, &w) in weights.iter().enumerate() {
        if w > 1e-12 {
            acc = &acc + &ComplexMatrix::outer(&frame[j], &frame[j]).scale_re(w);
            terms.push(DecompTerm {
                weight: w,
                zeta: frame[j].clone(),
            });
        }
    }
    if terms.is_empty() || acc.max_diff(z.mat()) > RECONSTRUCTION_TOL * scale {
        return None;
    }
    Some(terms)
}

/// Random certified member of `S_k`: a positive combination of `terms`
/// projectors onto Schmidt rank ≤ k vectors.
pub fn gen_sk_state(
    m: usize,
    n: usize,
    k: usize,
    terms: usize,
    seed: u64,
) -> Result<(TensorMatrix, Certificate)> {
    if terms == 0 {
        return Err(Error::BadDims {
            context: "at least one term is required",
        });
    }
    ConeId::new(ConeFamily::SchmidtNumber, k).validate(m, n)?;
    let mut rng = Stream::new(seed, 0x5000_0001);
    let d = m * n;
    let mut mat = ComplexMatrix::zeros(d, d);
    let mut decomposition = Vec::with_capacity(terms);
    for _ in 0..terms {
        let a = rng.gaussian_matrix(m, k);
        let b = rng.gaussian_matrix(n, k);
        let zeta = seesaw::assemble(&a, &b);
        let norm = vec_norm(&zeta);
        if norm < 1e-9 {
            continue;
        }
        let unit: Vec<C64> = zeta.iter().map(|&x| x / norm).collect();
        let weight = 0.25 + rng.uniform();
        mat = &mat + &ComplexMatrix::outer(&unit, &unit).scale_re(weight);
        decomposition.push(DecompTerm { weight, zeta: unit });
    }
    let state = TensorMatrix::new(m, n, mat)?;
    let samples = decomposition.len();
    Ok((
        state,
        Certificate::in_cone(decomposition, None, samples, seed),
    ))
}

/// The extreme ray `|ω_k⟩⟨ω_k|` with `ω_k = Σ_{i<k} e_i ⊗ e_i`.
pub fn truncated_max_entangled_state(
    m: usize,
    n: usize,
    k: usize,
    seed: u64,
) -> (TensorMatrix, Certificate) {
    let d = m * n;
    let mut zeta = alloc::vec![C64::new(0.0, 0.0); d];
    let kk = k.min(m).min(n);
    for i in 0..kk {
        zeta[i * n + i] = C64::new(1.0, 0.0);
    }
    let norm = vec_norm(&zeta);
    let unit: Vec<C64> = zeta.iter().map(|&x| x / norm).collect();
    let weight = norm * norm;
    let mat = ComplexMatrix::outer(&unit, &unit).scale_re(weight);
    let state = TensorMatrix::new(m, n, mat).expect("square");
    (
        state,
        Certificate::in_cone(alloc::vec![DecompTerm { weight, zeta: unit }], None, 1, seed),
    )
}

/// The canonical k-positive, not (k+1)-positive witness map: its Choi
/// matrix is `k·I − |ω⟩⟨ω|` with `ω = Σ_{i<m∧n} e_i ⊗ e_i`.
pub fn gen_kpos_witness(m: usize, n: usize, k: usize) -> Result<LinearMap> {
    ConeId::new(ConeFamily::KPositive, k).validate(m, n)?;
    let d = m * n;
    let mut mat = ComplexMatrix::identity(d).scale_re(k as f64);
    let md = m.min(n);
    for i in 0..md {
        for j in 0..md {
            mat.add_assign_at(i * n + i, j * n + j, C64::new(-1.0, 0.0));
        }
    }
    Ok(LinearMap::from_choi(TensorMatrix::new(m, n, mat)?))
}

/// Random completely positive map from `rank` Gaussian Kraus operators.
pub fn gen_cp_map(m: usize, n: usize, rank: usize, seed: u64) -> Result<LinearMap> {
    if rank == 0 {
        return Err(Error::BadDims {
            context: "Kraus rank must be at least one",
        });
    }
    let mut rng = Stream::new(seed, 0x5000_0002);
    let kraus: Vec<ComplexMatrix> = (0..rank).map(|_| rng.gaussian_matrix(n, m)).collect();
    kraus_to_choi(&kraus)
}

/// Random member of `BP_k`: a PSD matrix, a locally rotated canonical
/// witness, or a positive combination of the two. PSD draws carry genuine
/// decomposition certificates (PSD ⊂ BP_k); witness draws are members by
/// construction and carry an `Unknown` certificate.
pub fn gen_bp_member(m: usize, n: usize, k: usize, seed: u64, variant: u64) -> (TensorMatrix, Certificate) {
    let mut rng = Stream::new(seed, 0x5000_0003 ^ variant);
    let d = m * n;
    let psd_part = |rng: &mut Stream| {
        let g = rng.gaussian_matrix(d, d);
        &g * &g.adjoint()
    };
    let witness_part = |rng: &mut Stream| {
        let base = gen_kpos_witness(m, n, k).expect("valid dims").choi().clone();
        let u = rng.haar_unitary(m);
        let v = rng.haar_unitary(n);
        let loc = crate::matlin::kron(&u, &v);
        &(&loc * base.mat()) * &loc.adjoint()
    };
    match variant % 3 {
        0 => {
            let mat = psd_part(&mut rng).scale_re(1.0 / d as f64);
            let z = TensorMatrix::new(m, n, mat).expect("square");
            let cert = match psd_decomposition(&z) {
                Ok(Some((terms, min))) => Certificate::in_cone(terms, Some(min), 0, seed),
                _ => Certificate::unknown(None, 0, seed),
            };
            (z, cert)
        }
        1 => {
            let z = TensorMatrix::new(m, n, witness_part(&mut rng)).expect("square");
            (z, Certificate::unknown(None, 0, seed))
        }
        _ => {
            let mat = &witness_part(&mut rng).scale_re(0.4)
                + &psd_part(&mut rng).scale_re(0.6 / d as f64);
            let z = TensorMatrix::new(m, n, mat).expect("square");
            (z, Certificate::unknown(None, 0, seed))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::{max_entangled, swap_operator};
    use approx::assert_abs_diff_eq;

    fn cone(f: ConeFamily, k: usize) -> ConeId {
        ConeId::new(f, k)
    }

    #[test]
    fn schmidt_rank_basics() {
        // Product vector.
        let mut v = alloc::vec![C64::new(0.0, 0.0); 4];
        v[0] = C64::new(1.0, 0.0);
        assert_eq!(schmidt_rank(&v, 2, 2, 1e-8).unwrap(), 1);
        // Maximally entangled.
        let mut w = alloc::vec![C64::new(0.0, 0.0); 6];
        w[0] = C64::new(1.0, 0.0);
        w[4] = C64::new(1.0, 0.0);
        assert_eq!(schmidt_rank(&w, 2, 3, 1e-8).unwrap(), 2);
        // Zero vector errors.
        let z = alloc::vec![C64::new(0.0, 0.0); 4];
        assert!(matches!(schmidt_rank(&z, 2, 2, 1e-8), Err(Error::ZeroVector)));
    }

    #[test]
    fn schmidt_rank_is_local_unitary_invariant() {
        let mut rng = Stream::new(61, 0);
        for k in 1..=2 {
            let a = rng.gaussian_matrix(2, k);
            let b = rng.gaussian_matrix(3, k);
            let zeta = seesaw::assemble(&a, &b);
            let r0 = schmidt_rank(&zeta, 2, 3, 1e-8).unwrap();
            let u = rng.haar_unitary(2);
            let v = rng.haar_unitary(3);
            let loc = crate::matlin::kron(&u, &v);
            let rotated = loc.mat_vec(&zeta);
            assert_eq!(schmidt_rank(&rotated, 2, 3, 1e-8).unwrap(), r0);
        }
    }

    #[test]
    fn diag_separable_state_is_separable() {
        // Σ_i e_ii ⊗ e_ii on 2⊗2: InCone at k = 1 with a 2-term
        // decomposition.
        let mut mat = ComplexMatrix::zeros(4, 4);
        mat.set(0, 0, C64::new(1.0, 0.0));
        mat.set(3, 3, C64::new(1.0, 0.0));
        let rho = TensorMatrix::new(2, 2, mat).unwrap();
        let cert = schmidt_number_certify(&rho, 1, 100, 7).unwrap();
        assert_eq!(cert.verdict, Verdict::InCone);
        assert_eq!(cert.decomposition.as_ref().unwrap().len(), 2);
        cert.validate(&rho, cone(ConeFamily::SchmidtNumber, 1)).unwrap();
    }

    #[test]
    fn max_entangled_is_refuted_at_k1_and_accepted_at_k2() {
        let e = max_entangled(2);
        let cert = schmidt_number_certify(&e, 1, 50, 7).unwrap();
        assert_eq!(cert.verdict, Verdict::Refuted);
        // PPT witness value: the swap eigenvalue −1.
        assert_abs_diff_eq!(cert.witness.as_ref().unwrap().value(), -1.0, epsilon = 1e-10);
        cert.validate(&e, cone(ConeFamily::SchmidtNumber, 1)).unwrap();

        let cert2 = schmidt_number_certify(&e, 2, 50, 7).unwrap();
        assert_eq!(cert2.verdict, Verdict::InCone);
        cert2.validate(&e, cone(ConeFamily::SchmidtNumber, 2)).unwrap();
    }

    #[test]
    fn block_positivity_of_swap() {
        let f = TensorMatrix::new(2, 2, swap_operator(2)).unwrap();
        // k = 1: the transpose map is positive; never refuted.
        let cert = block_positivity_certify(&f, 1, 50, 7).unwrap();
        assert_ne!(cert.verdict, Verdict::Refuted);
        assert!(cert.value.unwrap() >= -1e-8);
        // k = 2: refuted by the singlet with value −1.
        let cert2 = block_positivity_certify(&f, 2, 10, 7).unwrap();
        assert_eq!(cert2.verdict, Verdict::Refuted);
        assert_abs_diff_eq!(cert2.witness.as_ref().unwrap().value(), -1.0, epsilon = 1e-9);
        cert2.validate(&f, cone(ConeFamily::BlockPositive, 2)).unwrap();
    }

    #[test]
    fn psd_matrices_are_block_positive() {
        let mut rng = Stream::new(62, 0);
        let g = rng.gaussian_matrix(4, 4);
        let z = TensorMatrix::new(2, 2, &g * &g.adjoint()).unwrap();
        for k in 1..=2 {
            let cert = block_positivity_certify(&z, k, 20, 3).unwrap();
            assert_ne!(cert.verdict, Verdict::Refuted);
            if k == 2 {
                assert_eq!(cert.verdict, Verdict::InCone);
                cert.validate(&z, cone(ConeFamily::BlockPositive, 2)).unwrap();
            }
        }
    }

    #[test]
    fn k_positive_witness_map_levels() {
        // tr(x)I − x on M₃: 1-positive, not 2-positive.
        let w = gen_kpos_witness(3, 3, 1).unwrap();
        let cert1 = k_positive_certify(&w, 1, 50, 7).unwrap();
        assert_ne!(cert1.verdict, Verdict::Refuted);
        let cert2 = k_positive_certify(&w, 2, 50, 7).unwrap();
        assert_eq!(cert2.verdict, Verdict::Refuted);
        // The analytic value on ζ = (e₁⊗e₁ + e₂⊗e₂)/√2 is −1.
        assert!(cert2.witness.as_ref().unwrap().value() <= -1.0 + 1e-8);
        cert2
            .validate(w.choi(), cone(ConeFamily::BlockPositive, 2))
            .unwrap();
    }

    #[test]
    fn superpositivity_of_depolarizing_and_identity() {
        // φ(x) = tr(x)·I has Choi I⊗I, separable.
        let depol = LinearMap::from_action(2, 2, |x| {
            ComplexMatrix::identity(2).scale(x.trace())
        });
        let cert = k_superpositive_certify(&depol, 1, 100, 7).unwrap();
        assert_eq!(cert.verdict, Verdict::InCone);
        cert.validate(depol.choi(), cone(ConeFamily::SchmidtNumber, 1))
            .unwrap();

        // The identity map is not entanglement breaking.
        let id = LinearMap::identity(2);
        let cert = k_superpositive_certify(&id, 1, 50, 7).unwrap();
        assert_eq!(cert.verdict, Verdict::Refuted);
        // Any CP map is k-superpositive at k = m∧n.
        let cp = gen_cp_map(2, 2, 2, 5).unwrap();
        let cert = k_superpositive_certify(&cp, 2, 50, 7).unwrap();
        assert_eq!(cert.verdict, Verdict::InCone);
    }

    #[test]
    fn generated_sk_states_verify() {
        let (rho, cert) = gen_sk_state(2, 2, 1, 3, 42).unwrap();
        assert_eq!(cert.verdict, Verdict::InCone);
        cert.validate(&rho, cone(ConeFamily::SchmidtNumber, 1)).unwrap();
        // PPT holds for separable outputs.
        let gamma = rho.partial_transpose(Side::First);
        let (lam, _) = hermitian_eig(gamma.mat(), 1e-8).unwrap();
        assert!(lam.last().unwrap() > &-1e-10);
    }

    #[test]
    fn cp_choi_is_psd() {
        let phi = gen_cp_map(2, 3, 2, 9).unwrap();
        let (lam, _) = hermitian_eig(phi.choi().mat(), 1e-8).unwrap();
        assert!(lam.last().unwrap() > &-1e-10);
    }

    #[test]
    fn nesting_in_cone_certificates() {
        // An InCone certificate at level k passes re-validation at k + 1.
        let (rho, cert) = gen_sk_state(3, 3, 1, 4, 11).unwrap();
        cert.validate(&rho, cone(ConeFamily::SchmidtNumber, 1)).unwrap();
        cert.validate(&rho, cone(ConeFamily::SchmidtNumber, 2)).unwrap();
    }

    #[test]
    fn certificates_are_reproducible() {
        let e = max_entangled(2);
        let a = schmidt_number_certify(&e, 1, 50, 123).unwrap();
        let b = schmidt_number_certify(&e, 1, 50, 123).unwrap();
        assert_eq!(a.verdict, b.verdict);
        match (a.witness.unwrap(), b.witness.unwrap()) {
            (
                Witness::BlockPositive { witness: w1, value: v1 },
                Witness::BlockPositive { witness: w2, value: v2 },
            ) => {
                assert_eq!(v1.to_bits(), v2.to_bits());
                assert_eq!(w1.mat(), w2.mat());
            }
            _ => panic!("expected matching witnesses"),
        }
    }

    #[test]
    fn duality_of_generated_families() {
        // Pairing any generated witness against any generated S_k member
        // stays nonnegative.
        for k in 1..=2 {
            let w = gen_kpos_witness(2, 3, k).unwrap();
            for seed in 0..10 {
                let (rho, _) = gen_sk_state(2, 3, k, 2, seed).unwrap();
                let v = trace_pair(w.choi().mat(), rho.mat()).unwrap().re;
                assert!(v >= -1e-10, "k={k} seed={seed}: {v}");
            }
        }
    }
}
