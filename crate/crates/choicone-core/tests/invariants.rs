//! Cross-module invariants: the correspondence and duality structure that
//! ties maps, Choi matrices, pairings and cones together.

use choicone_core::choivar;
use choicone_core::cones::{
    self, block_positivity_refutation, gen_kpos_witness, gen_sk_state, schmidt_refutation,
    ConeFamily, ConeId, Verdict,
};
use choicone_core::mapspace::{compose, LinearMap};
use choicone_core::matlin::{hermitian_eig, max_entangled, ComplexMatrix, Side, TensorMatrix};
use choicone_core::pairing::{map_state_pair, superop_dual, trace_pair};
use choicone_core::rng::Stream;
use choicone_core::transforms::{SuperOp, TransformAtom, TransformSpec};

fn random_map(rng: &mut Stream, m: usize, n: usize) -> LinearMap {
    LinearMap::from_choi(TensorMatrix::new(m, n, rng.gaussian_matrix(m * n, m * n)).unwrap())
}

#[test]
fn composition_identity_superop_vs_map_composition() {
    // (σ ⊗ τ)(C_φ) = C_{τ∘φ∘σ*} over random triples.
    let mut rng = Stream::new(101, 0);
    for trial in 0..25 {
        let sigma = random_map(&mut rng, 3, 3);
        let tau = random_map(&mut rng, 3, 3);
        let phi = random_map(&mut rng, 3, 3);
        let theta = SuperOp::tensor_of_maps(&sigma, &tau).unwrap();
        let lhs = theta.apply(phi.choi()).unwrap();
        let rhs = compose(&tau, &phi, &sigma.pairing_dual()).unwrap();
        let diff = lhs.mat().max_diff(rhs.choi().mat());
        let scale = lhs.mat().max_norm().max(1.0);
        assert!(diff < 1e-10 * scale, "trial {trial}: diff {diff}");
    }
}

#[test]
fn choi_is_a_bijection_with_explicit_inverse() {
    // Injectivity on a spanning set plus round-trip through apply.
    let mut rng = Stream::new(102, 0);
    for _ in 0..10 {
        let phi = random_map(&mut rng, 2, 3);
        let rebuilt = LinearMap::from_action(2, 3, |x| phi.apply(x).unwrap());
        assert!(rebuilt.choi().mat().max_diff(phi.choi().mat()) < 1e-10);
    }
}

#[test]
fn twisted_choi_matches_basis_expression_for_left_simple() {
    // For Θ = σ⊗id the variant C^Θ_φ is Σ e_k ⊗ φ(f_k) over the bases
    // encoded by σ.
    let mut rng = Stream::new(103, 0);
    let sigma = random_map(&mut rng, 2, 2);
    let theta = SuperOp::tensor_of_maps(&sigma, &LinearMap::identity(2)).unwrap();
    let phi = random_map(&mut rng, 2, 2);
    let lhs = choivar::choi_theta(&theta, &phi).unwrap();
    // Bases: e_k = σ(e_ij), f_k = e_ij over matrix units.
    let mut rhs = TensorMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let unit = ComplexMatrix::unit(2, i, j);
            let e_k = sigma.apply(&unit).unwrap();
            let img = phi.apply(&unit).unwrap();
            rhs = rhs.add(&TensorMatrix::from_kron(&e_k, &img).unwrap());
        }
    }
    assert!(lhs.mat().max_diff(rhs.mat()) < 1e-10);
}

#[test]
fn dual_cone_invariance_under_catalog_transforms() {
    // For each catalog Θ with Θ(S₁) = S₁: membership of z in S₁ is
    // PPT-equivalent to membership of Θ(z), and constructed dual-cone
    // members w keep Θ*(w) unrefuted by see-saw.
    let mut rng = Stream::new(104, 0);
    let (s, t) = (rng.nonsingular_matrix(2), rng.nonsingular_matrix(2));
    let catalog = vec![
        SuperOp::ad_local(&s, &t).unwrap(),
        SuperOp::transpose_both(2, 2),
        SuperOp::flip(2),
    ];
    let ppt_ok = |z: &TensorMatrix| {
        let gamma = z.partial_transpose(Side::First);
        let (lam, _) = hermitian_eig(gamma.mat(), 1e-8 * gamma.mat().max_norm().max(1.0)).unwrap();
        *lam.last().unwrap() >= -1e-8
    };
    for (ti, theta) in catalog.iter().enumerate() {
        // Separable members stay PPT; entangled members stay non-PPT.
        for seed in 0..5 {
            let (rho, _) = gen_sk_state(2, 2, 1, 2, 500 + seed).unwrap();
            let image = theta.apply(&rho).unwrap();
            assert!(ppt_ok(&rho) && ppt_ok(&image), "theta {ti} seed {seed}");
        }
        let ent = max_entangled(2);
        let image = theta.apply(&ent).unwrap();
        assert!(!ppt_ok(&ent) && !ppt_ok(&image), "theta {ti}: entangled image turned PPT");

        // Dual-cone members: Θ*(w) stays 1-block-positive under see-saw.
        let dual = superop_dual(theta);
        for seed in 0..3 {
            let w = gen_kpos_witness(2, 2, 1).unwrap();
            let mut local = Stream::new(600 + seed, ti as u64);
            let u = local.haar_unitary(2);
            let v = local.haar_unitary(2);
            let loc = choicone_core::matlin::kron(&u, &v);
            let rotated = TensorMatrix::new(2, 2, &(&loc * w.choi().mat()) * &loc.adjoint()).unwrap();
            let image = dual.apply(&rotated).unwrap();
            let cert = block_positivity_refutation(&image, 1, 25, 700 + seed, ti as u64).unwrap();
            assert_ne!(cert.verdict, Verdict::Refuted, "theta {ti} seed {seed}");
            assert!(cert.value.unwrap() >= -1e-8);
        }
    }
}

#[test]
fn diagram_duality_via_pairing() {
    // Witness maps against S_k members: always nonnegative pairing.
    let mut count = 0;
    for (m, n) in [(2, 2), (2, 3), (3, 3)] {
        for k in 1..=m.min(n) {
            let w = gen_kpos_witness(m, n, k).unwrap();
            for seed in 0..8 {
                let (rho, _) = gen_sk_state(m, n, k, 1 + (seed as usize % 3), seed).unwrap();
                let v = map_state_pair(&w, &rho).unwrap().re;
                assert!(v >= -1e-10, "({m},{n}) k={k} seed={seed}: {v}");
                count += 1;
            }
        }
    }
    assert!(count > 50);
}

#[test]
fn witness_map_levels_are_sharp() {
    // k·tr − embed is k-positive but not (k+1)-positive.
    for (m, n, k) in [(2, 2, 1), (3, 3, 1), (3, 3, 2), (2, 3, 1)] {
        let w = gen_kpos_witness(m, n, k).unwrap();
        let at_k = block_positivity_refutation(w.choi(), k, 50, 7, 0).unwrap();
        assert_ne!(at_k.verdict, Verdict::Refuted, "({m},{n}) k={k}");
        if k + 1 <= m.min(n) {
            let above = block_positivity_refutation(w.choi(), k + 1, 50, 7, 0).unwrap();
            assert_eq!(above.verdict, Verdict::Refuted, "({m},{n}) k+1={}", k + 1);
        }
    }
}

#[test]
fn refutations_recompute_independently() {
    // Every Refuted certificate re-evaluates negative by a single pass.
    let ent = max_entangled(2);
    let cert = schmidt_refutation(&ent, 1, 50, 11, 0).unwrap();
    assert_eq!(cert.verdict, Verdict::Refuted);
    cert.validate(&ent, ConeId::new(ConeFamily::SchmidtNumber, 1))
        .unwrap();

    let swap = TensorMatrix::new(2, 2, choicone_core::matlin::swap_operator(2)).unwrap();
    let cert = block_positivity_refutation(&swap, 2, 20, 11, 0).unwrap();
    assert_eq!(cert.verdict, Verdict::Refuted);
    cert.validate(&swap, ConeId::new(ConeFamily::BlockPositive, 2))
        .unwrap();
}

#[test]
fn certificate_reproducibility_bit_for_bit() {
    let (rho, _) = gen_sk_state(2, 3, 1, 3, 31).unwrap();
    let a = cones::schmidt_number_certify(&rho, 1, 80, 17).unwrap();
    let b = cones::schmidt_number_certify(&rho, 1, 80, 17).unwrap();
    assert_eq!(a.verdict, b.verdict);
    let (da, db) = (a.decomposition.unwrap(), b.decomposition.unwrap());
    assert_eq!(da.len(), db.len());
    for (x, y) in da.iter().zip(&db) {
        assert_eq!(x.weight.to_bits(), y.weight.to_bits());
        for (p, q) in x.zeta.iter().zip(&y.zeta) {
            assert_eq!(p.re.to_bits(), q.re.to_bits());
            assert_eq!(p.im.to_bits(), q.im.to_bits());
        }
    }
}

#[test]
fn horodecki_reduction_inside_catalog() {
    // ⟨C^{t⊗id}_φ, z⟩_{t⊗t} = ⟨φ(x), y⟩_t on products, the reduced id⊗t
    // form.
    let mut rng = Stream::new(105, 0);
    let phi = random_map(&mut rng, 2, 2);
    let tl = SuperOp::transpose_left(2, 2);
    let tt = SuperOp::transpose_both(2, 2);
    for _ in 0..10 {
        let x = rng.gaussian_matrix(2, 2);
        let y = rng.gaussian_matrix(2, 2);
        let z = TensorMatrix::from_kron(&x, &y).unwrap();
        // Left side: pair the de-Pillis-style variant against z under t⊗t.
        let variant = choivar::choi_theta(&tl, &phi).unwrap();
        let twisted = tt.apply(&z).unwrap(); // (t⊗t)⁻¹ = t⊗t
        let lhs = trace_pair(variant.mat(), twisted.mat()).unwrap();
        // Right side: tr(φ(x)·y), the transpose-twisted range form.
        let rhs = (&phi.apply(&x).unwrap() * &y).trace();
        assert!((lhs - rhs).norm() < 1e-10);
    }
}

#[test]
fn compiled_spec_application_matches_sequential_atoms() {
    let mut rng = Stream::new(106, 0);
    let (s, t) = (rng.nonsingular_matrix(2), rng.nonsingular_matrix(3));
    let spec = TransformSpec {
        m: 2,
        n: 3,
        atoms: vec![
            TransformAtom::TransposeLeft,
            TransformAtom::AdLocal { s: s.clone(), t: t.clone() },
            TransformAtom::TransposeRight,
        ],
    };
    let theta = choicone_core::transforms::compile(&spec).unwrap();
    let z = TensorMatrix::new(2, 3, rng.gaussian_matrix(6, 6)).unwrap();
    let via_matrix = theta.apply(&z).unwrap();
    // Sequential application oracle.
    let step1 = z.partial_transpose(Side::First);
    let w = choicone_core::matlin::kron(&s, &t);
    let step2 = TensorMatrix::new(2, 3, &(&w.adjoint() * step1.mat()) * &w).unwrap();
    let step3 = step2.partial_transpose(Side::Second);
    assert!(via_matrix.mat().max_diff(step3.mat()) < 1e-10);
}
