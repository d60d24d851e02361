use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vessel_core::charfun;
use vessel_core::colligation::{self, Colligation};
use vessel_core::indefinite::{self, IndefiniteSpace};
use vessel_core::kernels::{self, Region, SamplePlan};
use vessel_core::linalg::{self, c, CMatrix, C64};
use vessel_core::realization;
use vessel_core::synth;
use vessel_core::vessel::{self, Side, Vessel};
use vessel_core::DEFAULT_TOL;

fn gap(a: &CMatrix, b: &CMatrix) -> f64 {
    linalg::rel(linalg::norm(&(a - b)), linalg::norm(a).max(linalg::norm(b)))
}

fn signature(p: usize, q: usize) -> CMatrix {
    let d: Vec<f64> = (0..p).map(|_| 1.0).chain((0..q).map(|_| -1.0)).collect();
    linalg::real_diag(&d)
}

/// Invertible S with moderate condition number.
fn near_identity(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    linalg::eye(n) + synth::random_matrix(rng, n, n) * c(0.3, 0.0)
}

fn random_colligation(rng: &mut ChaCha8Rng, kappa: usize) -> Colligation {
    let schur = realization::random_schur_realization(rng, 2, 2, 0.7);
    let zeros: Vec<C64> = (0..kappa).map(|_| c(rng.random_range(-1.5..1.5), rng.random_range(0.3..1.5))).collect();
    realization::realize_junitary(&schur, &zeros, &signature(1, 1), DEFAULT_TOL).unwrap().colligation
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>(), n in 1usize..6, k in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = k.min(n);
        let dom = IndefiniteSpace::new(synth::random_gram(&mut rng, n, k), DEFAULT_TOL).unwrap();
        let cod = IndefiniteSpace::new(synth::random_gram(&mut rng, n, n - k), DEFAULT_TOL).unwrap();
        let a = synth::random_matrix(&mut rng, n, n);
        let adj = indefinite::indefinite_adjoint(&a, &dom, &cod).unwrap();
        let back = indefinite::indefinite_adjoint(&adj, &cod, &dom).unwrap();
        prop_assert!(linalg::norm(&(back - &a)) <= 1e-12 * linalg::norm(&a).max(1.0) * 10.0);
    }

    #[test]
    fn sylvester_inertia(seed in any::<u64>(), n in 1usize..7, k in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = k.min(n);
        let g = synth::random_gram(&mut rng, n, k);
        let s = near_identity(&mut rng, n);
        let moved = linalg::hermitian_part(&(s.adjoint() * &g * &s));
        prop_assert_eq!(indefinite::neg_index(&g, 1e-9).unwrap(), k);
        prop_assert_eq!(indefinite::neg_index(&moved, 1e-9).unwrap(), k);
    }

    #[test]
    fn adjoint_of_contraction_is_contraction(seed in any::<u64>(), p in 1usize..4, q in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = p + q;
        let j = signature(p, q);
        // X = diag(contraction, expansion) is a J-contraction
        let mut x = linalg::zeros(n, n);
        let xp = synth::random_matrix(&mut rng, p, p);
        let xp = &xp * c(0.9 / linalg::sigma_max(&xp), 0.0);
        x.view_mut((0, 0), (p, p)).copy_from(&xp);
        if q > 0 {
            let xm = synth::random_unitary(&mut rng, q) * c(1.0 + rng.random_range(0.0..0.5), 0.0);
            x.view_mut((p, p), (q, q)).copy_from(&xm);
        }
        let sd = near_identity(&mut rng, n);
        let sc = near_identity(&mut rng, n);
        let dom = IndefiniteSpace::new(linalg::hermitian_part(&(sd.adjoint() * &j * &sd)), DEFAULT_TOL).unwrap();
        let cod = IndefiniteSpace::new(linalg::hermitian_part(&(sc.adjoint() * &j * &sc)), DEFAULT_TOL).unwrap();
        let a = linalg::inverse(&sc).unwrap() * x * sd;
        let class = indefinite::classify_operator(&a, &dom, &cod, 1e-9).unwrap();
        prop_assert!(class.contraction);
        let adj = indefinite::indefinite_adjoint(&a, &dom, &cod).unwrap();
        prop_assert!(indefinite::classify_operator(&adj, &cod, &dom, 1e-9).unwrap().contraction);
    }

    #[test]
    fn subspace_index_bounded_by_ambient(seed in any::<u64>(), n in 1usize..7, k in 0usize..7, r in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = k.min(n);
        let r = r.min(n);
        let space = IndefiniteSpace::new(synth::random_gram(&mut rng, n, k), DEFAULT_TOL).unwrap();
        let b = synth::random_matrix(&mut rng, n, r);
        if let Ok(st) = indefinite::subspace_status(&space, &b, 1e-9) {
            prop_assert!(st.neg_index <= space.neg_index());
        }
    }

    #[test]
    fn pg_round_trip(seed in any::<u64>(), p in 0usize..4, q in 0usize..4) {
        prop_assume!(p + q > 0 && p + q <= 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = signature(p, q);
        let s = synth::random_matrix(&mut rng, p + q, p + q) * c(0.5, 0.0);
        let sig = realization::pg_transform(&s, &j).unwrap();
        let back = realization::pg_inverse(&sig, &j).unwrap();
        prop_assert!(gap(&back, &s) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gram_is_hermitian_and_monotone(seed in any::<u64>(), kappa in 0usize..4, n in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coll = random_colligation(&mut rng, kappa);
        let k = colligation::schur_kernel(&coll).unwrap();
        let plan = SamplePlan::random(2, n, &Region::default(), seed);
        let g = kernels::gram_matrix(&k, &plan).unwrap();
        prop_assert!(linalg::hermitian_defect(&g) <= 1e-10);
        let mut prev = 0;
        for cut in 1..=n {
            let neg = kernels::count_negative(&kernels::gram_matrix(&k, &plan.prefix(cut)).unwrap(), DEFAULT_TOL);
            prop_assert!(neg >= prev);
            prev = neg;
        }
        prop_assert!(prev <= coll.state.neg_index());
    }

    #[test]
    fn realization_outputs_satisfy_identity(seed in any::<u64>(), kappa in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coll = random_colligation(&mut rng, kappa);
        prop_assert!(colligation::check_colligation(&coll, 1e-10).pass);
        prop_assert_eq!(coll.state.neg_index(), kappa);
        for x in [-3.0, -0.5, 0.7, 2.5] {
            let s = colligation::char_fn_eval(&coll, c(x, 0.0)).unwrap();
            let d = s.adjoint() * &coll.sigma * &s - &coll.sigma;
            prop_assert!(linalg::norm(&d) <= 1e-9 * linalg::norm(&s).powi(2));
        }
    }

    #[test]
    fn generated_vessels_have_equal_discriminants(seed in any::<u64>(), m in 2usize..5, n in 1usize..5, k in 0usize..5) {
        let n = n.min(m);
        let k = k.min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = synth::random_vessel_direct(&mut rng, m, n, k).unwrap();
        prop_assert!(vessel::check_vessel(&v, DEFAULT_TOL).pass);
        let pi = vessel::discriminant_polynomial(&v, Side::Input).unwrap();
        let po = vessel::discriminant_polynomial(&v, Side::Output).unwrap();
        prop_assert!(pi.relative_distance(&po) <= 1e-8);
    }

    #[test]
    fn alpha_transform_invariants(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0, t in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = synth::random_vessel_direct(&mut rng, 3, 2, 1).unwrap();
        // unimodular α = [[1, t], [0, 1]]·[[1, 0], [a, 1]] rotated by b
        let (cb, sb) = (b.cos(), b.sin());
        let l = [[1.0 + t * a, t], [a, 1.0]];
        let alpha = [
            [l[0][0] * cb - l[0][1] * sb, l[0][0] * sb + l[0][1] * cb],
            [l[1][0] * cb - l[1][1] * sb, l[1][0] * sb + l[1][1] * cb],
        ];
        let w = vessel::alpha_transform(&v, alpha, 1e-9).unwrap();
        prop_assert!(vessel::check_vessel(&w, DEFAULT_TOL).pass);
        let p = vessel::discriminant_polynomial(&v, Side::Input).unwrap();
        let q = vessel::discriminant_polynomial(&w, Side::Input).unwrap();
        let xi = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let z = c(rng.random_range(-2.0..2.0), rng.random_range(0.5..2.0));
        let (z1, z2) = (c(0.3, -0.4), c(-1.1, 0.2));
        let moved = p.eval(z1 * alpha[1][1] - z2 * alpha[0][1], z2 * alpha[0][0] - z1 * alpha[1][0]);
        prop_assert!((q.eval(z1, z2) - moved).norm() <= 1e-9 * q.term_scale(z1, z2).max(1.0));
        let ww = charfun::ccf_eval(&w, c(xi.0, 0.0), c(xi.1, 0.0), z);
        let xt = (alpha[0][0] * xi.0 + alpha[1][0] * xi.1, alpha[0][1] * xi.0 + alpha[1][1] * xi.1);
        let wv = charfun::ccf_eval(&v, c(xt.0, 0.0), c(xt.1, 0.0), z);
        if let (Ok(ww), Ok(wv)) = (ww, wv) {
            prop_assert!(gap(&ww, &wv) <= 1e-10);
        }
    }

    #[test]
    fn input_condition_follows_from_the_others(seed in any::<u64>(), eps in 1e-4f64..1e-1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = synth::random_vessel_direct(&mut rng, 3, 2, 1).unwrap();
        let mut w = v.clone();
        w.gamma = &v.gamma + synth::random_hermitian(&mut rng, 3) * c(eps, 0.0);
        w.gamma_tilde = &w.gamma + vessel::linkage_term(&w.phi, &w.phi_adj(), &w.sigma1, &w.sigma2);
        let e_in = &w.gamma * &w.phi - (&w.sigma1 * &w.phi * w.adj(&w.a2) - &w.sigma2 * &w.phi * w.adj(&w.a1));
        let e_out = &w.gamma_tilde * &w.phi - (&w.sigma1 * &w.phi * &w.a2 - &w.sigma2 * &w.phi * &w.a1);
        prop_assert!(linalg::norm(&(e_in - &e_out)) <= 1e-10 * linalg::norm(&e_out));
    }
}

#[test]
fn selfadjoint_remainder_after_similarity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let v = synth::random_vessel_direct(&mut rng, 3, 2, 1).unwrap();
    let sa = Vessel::new(
        linalg::real_diag(&[0.5, -1.0]),
        linalg::real_diag(&[2.0, 0.25]),
        IndefiniteSpace::signature(1, 1),
        linalg::zeros(3, 2),
        v.sigma1.clone(),
        v.sigma2.clone(),
        v.gamma_tilde.clone(),
        v.gamma_tilde.clone(),
    )
    .unwrap();
    let both = vessel_core::coupling::couple(&v, &sa, DEFAULT_TOL).unwrap();
    let t = near_identity(&mut rng, 4);
    let ti = linalg::inverse(&t).unwrap();
    let moved = Vessel::new(
        &ti * &both.a1 * &t,
        &ti * &both.a2 * &t,
        IndefiniteSpace::new(linalg::hermitian_part(&(t.adjoint() * both.state.gram() * &t)), DEFAULT_TOL).unwrap(),
        &both.phi * &t,
        both.sigma1.clone(),
        both.sigma2.clone(),
        both.gamma.clone(),
        both.gamma_tilde.clone(),
    )
    .unwrap();
    assert!(vessel::check_vessel(&moved, DEFAULT_TOL).pass);
    let ps = vessel::principal_subspace_joint(&moved, DEFAULT_TOL).unwrap();
    assert_eq!(ps.basis.ncols(), 2);
    assert!(!ps.irreducible);
    assert!(vessel::selfadjoint_remainder_residual(&moved, DEFAULT_TOL).unwrap() <= 1e-9);
    assert_eq!(vessel::neg_index(&moved), 2);
}

#[test]
fn characteristic_function_tends_to_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let coll = random_colligation(&mut rng, 2);
    let scaled: Vec<f64> = [1e2, 1e3, 1e4, 1e5]
        .iter()
        .map(|&r| {
            let s = colligation::char_fn_eval(&coll, c(0.0, r)).unwrap();
            r * linalg::norm(&(s - linalg::eye(2)))
        })
        .collect();
    for w in scaled.windows(2) {
        assert!((w[1] / w[0] - 1.0).abs() < 0.05, "{scaled:?}");
    }
}

#[test]
fn coupled_colligations_multiply() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let c1 = random_colligation(&mut rng, 1);
    let c2 = random_colligation(&mut rng, 2);
    let both = colligation::couple_colligations(&c1, &c2).unwrap();
    assert!(colligation::check_colligation(&both, 1e-10).pass);
    for z in [c(0.3, 1.0), c(-2.0, 0.5), c(1.0, -3.0)] {
        let s = colligation::char_fn_eval(&both, z).unwrap();
        let s1 = colligation::char_fn_eval(&c1, z).unwrap();
        let s2 = colligation::char_fn_eval(&c2, z).unwrap();
        assert!(gap(&s, &(s2 * s1)) <= 1e-10);
    }
}

/// Hilbert-space base followed by κ point vessels with Gram −1.
fn negative_tail_chain(rng: &mut ChaCha8Rng, kappa: usize) -> Vessel {
    let mut cur = synth::random_vessel_direct(rng, 2, 1, 0).unwrap();
    let mut added = 0;
    for _ in 0..200 {
        if added == kappa {
            break;
        }
        let Ok(pv) = synth::random_point_vessel(rng, &cur) else { continue };
        if pv.state.neg_index() == 1 {
            cur = vessel_core::coupling::couple(&cur, &pv, DEFAULT_TOL).unwrap();
            added += 1;
        }
    }
    assert_eq!(added, kappa, "could not draw enough negative point vessels");
    cur
}

#[test]
fn maximal_negative_invariant_subspace_splits_the_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for kappa in [1, 2] {
        for _ in 0..3 {
            let v = negative_tail_chain(&mut rng, kappa);
            let n = v.state_dim();
            assert_eq!(v.state.neg_index(), kappa);
            let basis = vessel_core::coupling::trailing_block(n, kappa);
            assert!(vessel_core::coupling::invariance_residual(&v, &basis) < 1e-12);
            let st = indefinite::subspace_status(&v.state, &basis, DEFAULT_TOL).unwrap();
            assert!(st.nondegenerate && st.neg_index == kappa);
            let d = vessel_core::coupling::decompose(&v, &basis, DEFAULT_TOL).unwrap();
            assert_eq!(d.v1.state.neg_index(), 0);
            assert_eq!(d.v2.state.neg_index(), kappa);
            for part in [&d.v1, &d.v2] {
                assert!(vessel::check_vessel(part, DEFAULT_TOL).pass);
            }
        }
    }
}
