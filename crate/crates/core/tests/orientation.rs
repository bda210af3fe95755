use proptest::prelude::*;
use qtime_core::linmap::{Domain, LinearMapOnAlgebra};
use qtime_core::mat::{commutator, pauli, random_density, random_hermitian, random_unitary};
use qtime_core::orientation::{
    check_cstar_hom, check_jordan_star_hom, check_orientation_preservation, is_time_oriented_state, orientation_derivative,
    orientation_difference_quotient, orientation_flow, thm6_report, DilationKind, Sign, TimeOrientation,
};
use qtime_core::states::{max_entangled_vector, random_separable};
use qtime_core::{BipartiteState, ComplexMatrix, RngStream, Verdict, C64};

/// `a ↦ a ⊕ aᵀ`: a Jordan *-homomorphism that is not multiplicative.
fn rep_plus_antirep(d: usize) -> LinearMapOnAlgebra {
    LinearMapOnAlgebra::from_fn(d, 2 * d, |a| {
        let t = a.transpose();
        ComplexMatrix::from_fn(2 * d, 2 * d, |i, j| match (i < d, j < d) {
            (true, true) => a[(i, j)],
            (false, false) => t[(i - d, j - d)],
            _ => C64::new(0.0, 0.0),
        })
    })
    .unwrap()
}

fn amplification(d: usize, r: usize) -> LinearMapOnAlgebra {
    LinearMapOnAlgebra::from_fn(d, r * d, |a| qtime_core::mat::kron(&ComplexMatrix::identity(r), a)).unwrap()
}

fn depolarizing(d: usize, lambda: f64) -> LinearMapOnAlgebra {
    LinearMapOnAlgebra::from_fn(d, d, |a| {
        &a.scale_real(lambda) + &ComplexMatrix::identity(d).scale(a.trace() / d as f64).scale_real(1.0 - lambda)
    })
    .unwrap()
}

fn orient(phi: &LinearMapOnAlgebra, a: Sign, b: Sign, samples: usize, seed: u64) -> qtime_core::OrientationReport {
    let mut rng = RngStream::new(seed, 0);
    let o_a = TimeOrientation { sign: a, dim: phi.d_in() };
    let o_b = TimeOrientation { sign: b, dim: phi.d_out() };
    check_orientation_preservation(phi, o_a, o_b, samples, &mut rng).unwrap()
}

#[test]
fn commutator_preservation_matches_multiplicativity() {
    let mut rng = RngStream::new(1, 0);
    let u = random_unitary(&mut rng, 3);
    let maps = [
        (LinearMapOnAlgebra::unitary_conjugation(&u).unwrap(), true),
        (amplification(2, 3), true),
        (LinearMapOnAlgebra::zero(2, 2), true),
        (LinearMapOnAlgebra::transpose_map(3), false),
        (rep_plus_antirep(2), false),
        (depolarizing(2, 0.5), false),
    ];
    for (phi, is_hom) in maps {
        let preserves = orient(&phi, Sign::Plus, Sign::Plus, 0, 2).same_orientation_residual <= 1e-10;
        let multiplicative = check_cstar_hom(&phi, 8, &mut rng).unwrap() <= 1e-9;
        assert_eq!(preserves, multiplicative);
        assert_eq!(multiplicative, is_hom);
    }
}

#[test]
fn jordan_homs_pass_jordan_check() {
    let mut rng = RngStream::new(3, 0);
    for phi in [rep_plus_antirep(3), LinearMapOnAlgebra::transpose_map(2), amplification(2, 2)] {
        assert!(check_jordan_star_hom(&phi, 16, &mut rng).unwrap().max() <= 1e-12);
    }
}

#[test]
fn diagonal_compression_acts_only_on_the_diagonal() {
    let d = 3;
    let mut rng = RngStream::new(4, 0);
    let full = LinearMapOnAlgebra::from_fn(d, d, |a| {
        ComplexMatrix::from_fn(d, d, |i, j| if i == j { a[(i, i)] } else { C64::new(0.0, 0.0) })
    })
    .unwrap();
    let on_v = full.clone().with_domain(Domain::Diagonal);
    assert!(check_cstar_hom(&on_v, 8, &mut rng).unwrap() <= 1e-12);
    assert!(check_cstar_hom(&on_v.star(), 8, &mut rng).unwrap() <= 1e-12);
    assert_eq!(orient(&on_v, Sign::Plus, Sign::Plus, 8, 5).image_commutator, 0.0);
    // Off-diagonal units and commutators [E_kk, c] are orthogonal to V.
    for i in 0..d {
        for j in 0..d {
            if i != j {
                assert_eq!(full.apply(&ComplexMatrix::unit(d, i, j)).frob_norm(), 0.0);
            }
        }
    }
    for k in 0..d {
        let c = random_hermitian(&mut rng, d);
        let comm = commutator(&ComplexMatrix::unit(d, k, k), &c).unwrap();
        assert!(full.apply(&comm).frob_norm() <= 1e-15);
    }
}

#[test]
fn identity_representation_adjoint_is_not_multiplicative() {
    let mut rng = RngStream::new(6, 0);
    let id = LinearMapOnAlgebra::identity(2);
    assert!(check_cstar_hom(&id, 0, &mut rng).unwrap() <= 1e-15);
    assert!(check_cstar_hom(&id.star(), 0, &mut rng).unwrap() >= 1.0);
    assert!(orient(&id, Sign::Plus, Sign::Plus, 0, 6).image_commutator >= 1.0);
}

#[test]
fn finite_differences_converge_quadratically() {
    let phi = LinearMapOnAlgebra::transpose_map(2);
    let (o_a, o_b) = (TimeOrientation::canonical(2), TimeOrientation::canonical(2));
    let (a, b) = (pauli::x(), pauli::y());
    let exact = orientation_derivative(&phi, o_a, o_b, &a, &b).unwrap();
    assert!((exact.frob_norm() - 4.0 * 2f64.sqrt()).abs() < 1e-12);
    let err = |h: f64| (&orientation_difference_quotient(&phi, o_a, o_b, &a, &b, h).unwrap() - &exact).frob_norm();
    let ratio = err(0.05) / err(0.025);
    assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    assert!(err(1e-5) / exact.frob_norm() < 1e-3);
}

#[test]
fn bell_state_fails_reverse_orientation() {
    let mut rng = RngStream::new(7, 0);
    let bell = BipartiteState::from_pure(&max_entangled_vector(2), 2, 2).unwrap();
    let plus = is_time_oriented_state(&bell, Sign::Plus, 16, &mut rng).unwrap();
    let minus = is_time_oriented_state(&bell, Sign::Minus, 16, &mut rng).unwrap();
    assert!(plus.oriented && !minus.oriented);
    assert_eq!(plus.multiplicity, 1);
}

#[test]
fn separable_states_pass_both_orientations() {
    let mut rng = RngStream::new(8, 0);
    let (rho, _) = random_separable(&mut rng, 2, 2, 3).unwrap();
    let dual = thm6_report(&rho, 2000, 16, &mut rng).unwrap();
    assert_eq!(dual.verdict(), Verdict::Separable);
    assert_eq!(dual.dilation, Some(DilationKind::Commutative));
    assert!(dual.both_pass() && dual.consistent);
    assert!(dual.forward.unwrap().fd_agrees() && dual.reverse.unwrap().fd_agrees());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn report_depends_on_sign_product_only(seed in any::<u64>(), d in 2usize..=3, lambda in 0.0f64..1.0) {
        let phi = depolarizing(d, lambda);
        let pp = orient(&phi, Sign::Plus, Sign::Plus, 4, seed);
        let mm = orient(&phi, Sign::Minus, Sign::Minus, 4, seed);
        let pm = orient(&phi, Sign::Plus, Sign::Minus, 4, seed);
        let mp = orient(&phi, Sign::Minus, Sign::Plus, 4, seed);
        prop_assert_eq!(pp.residual(), mm.residual());
        prop_assert_eq!(pm.residual(), mp.residual());
        prop_assert!((pp.fd_residual - mm.fd_residual).abs() <= 1e-12);
        prop_assert!((pm.fd_residual - mp.fd_residual).abs() <= 1e-12);
        prop_assert!(pp.fd_agrees() && pm.fd_agrees());
    }

    #[test]
    fn both_orientations_bound_the_image_commutator(seed in any::<u64>(), d_a in 1usize..=3, d_b in 1usize..=3, rank in 1usize..=9) {
        let mut rng = RngStream::new(seed, 1);
        let n = d_a * d_b;
        let rho = BipartiteState::new(random_density(&mut rng, n, rank.min(n)), d_a, d_b).unwrap();
        let r = is_time_oriented_state(&rho, Sign::Minus, 4, &mut rng).unwrap().report;
        prop_assert!(r.image_commutator <= 0.5 * (r.same_orientation_residual + r.opposite_orientation_residual) + 1e-12);
        let forward = is_time_oriented_state(&rho, Sign::Plus, 4, &mut rng).unwrap();
        prop_assert!(forward.oriented);
    }

    #[test]
    fn flows_form_a_group(seed in any::<u64>(), d in 1usize..=4, s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let mut rng = RngStream::new(seed, 2);
        let a = random_hermitian(&mut rng, d);
        let b = random_hermitian(&mut rng, d);
        for o in [TimeOrientation::canonical(d), TimeOrientation::reverse(d)] {
            let composed = orientation_flow(o, s, &a, &orientation_flow(o, t, &a, &b).unwrap()).unwrap();
            let direct = orientation_flow(o, s + t, &a, &b).unwrap();
            prop_assert!(composed.approx_eq(&direct, 1e-9));
            let back = orientation_flow(o, -t, &a, &orientation_flow(o, t, &a, &b).unwrap()).unwrap();
            prop_assert!(back.approx_eq(&b, 1e-9));
        }
    }
}
