use proptest::prelude::*;
use qtime_core::mat::{eigvalsh, kron, partial_transpose, random_density, random_unitary};
use qtime_core::separability::{ppt_test, separability_verdict, PptVerdict};
use qtime_core::states::{max_entangled_vector, schmidt_decompose, werner_state};
use qtime_core::{BipartiteState, ComplexMatrix, RngStream, Subsystem, Verdict, C64};

/// `Σ_i α_i (U e_i) ⊗ (V e_i)` with the given (unnormalized) coefficients.
fn schmidt_vector(rng: &mut RngStream, alphas: &[f64], d_a: usize, d_b: usize) -> (ComplexMatrix, Vec<f64>) {
    let norm = alphas.iter().map(|a| a * a).sum::<f64>().sqrt();
    let alphas: Vec<f64> = alphas.iter().map(|a| a / norm).collect();
    let u = random_unitary(rng, d_a);
    let v = random_unitary(rng, d_b);
    let mut psi = ComplexMatrix::zeros(d_a * d_b, 1);
    for (i, &a) in alphas.iter().enumerate() {
        let term = kron(&u.col(i), &v.col(i)).scale_real(a);
        psi = &psi + &term;
    }
    (psi, alphas)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pure_state_partial_transpose_spectrum(seed in any::<u64>(), d_a in 2usize..=4, d_b in 2usize..=4, raw in prop::collection::vec(0.05f64..1.0, 4)) {
        let mut rng = RngStream::new(seed, 0);
        let rank = d_a.min(d_b);
        let (psi, alphas) = schmidt_vector(&mut rng, &raw[..rank], d_a, d_b);
        let rho = BipartiteState::from_pure(&psi, d_a, d_b).unwrap();
        let mut predicted: Vec<f64> = alphas.iter().map(|a| a * a).collect();
        for i in 0..rank {
            for j in i + 1..rank {
                predicted.push(alphas[i] * alphas[j]);
                predicted.push(-alphas[i] * alphas[j]);
            }
        }
        predicted.resize(d_a * d_b, 0.0);
        let predicted = sorted(predicted);
        let observed = eigvalsh(&rho.partial_transpose(Subsystem::A)).unwrap();
        for (p, o) in predicted.iter().zip(&observed) {
            prop_assert!((p - o).abs() <= 1e-9, "{predicted:?} vs {observed:?}");
        }
        let schmidt = schmidt_decompose(&psi, d_a, d_b).unwrap();
        prop_assert_eq!(schmidt.rank(), rank);
        prop_assert_eq!(ppt_test(&rho).unwrap().verdict, PptVerdict::Entangled);
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>(), d_a in 1usize..=3, d_b in 1usize..=3) {
        let mut rng = RngStream::new(seed, 1);
        let n = d_a * d_b;
        let m = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_normal());
        for which in [Subsystem::A, Subsystem::B] {
            let twice = partial_transpose(&partial_transpose(&m, d_a, d_b, which).unwrap(), d_a, d_b, which).unwrap();
            prop_assert_eq!(&twice, &m);
        }
        let both = partial_transpose(&partial_transpose(&m, d_a, d_b, Subsystem::A).unwrap(), d_a, d_b, Subsystem::B).unwrap();
        prop_assert_eq!(both, m.transpose());
    }

    #[test]
    fn partial_transposes_share_spectrum(seed in any::<u64>(), d_a in 2usize..=3, d_b in 2usize..=3) {
        let mut rng = RngStream::new(seed, 2);
        let n = d_a * d_b;
        let rho = BipartiteState::new(random_density(&mut rng, n, n), d_a, d_b).unwrap();
        let a = eigvalsh(&rho.partial_transpose(Subsystem::A)).unwrap();
        let b = eigvalsh(&rho.partial_transpose(Subsystem::B)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn werner_minimum_eigenvalue_matches_closed_form() {
    for k in 0..=100 {
        let p = k as f64 / 100.0;
        let min = ppt_test(&werner_state(2, p).unwrap()).unwrap().min_eigenvalue;
        assert!((min - (1.0 - 3.0 * p) / 4.0).abs() <= 1e-10, "p={p}: {min}");
    }
}

#[test]
fn bell_state_partial_transpose() {
    let bell = BipartiteState::from_pure(&max_entangled_vector(2), 2, 2).unwrap();
    let report = ppt_test(&bell).unwrap();
    assert!((report.min_eigenvalue + 0.5).abs() < 1e-12);
    assert!(report.decisive);
}

#[test]
fn product_pure_state_is_separable() {
    let mut rng = RngStream::new(11, 0);
    let (psi, _) = schmidt_vector(&mut rng, &[1.0], 2, 3);
    let rho = BipartiteState::from_pure(&psi, 2, 3).unwrap();
    let report = separability_verdict(&rho, 100, &mut rng).unwrap();
    assert_eq!(report.verdict, Verdict::Separable);
    assert!(report.certificate.is_some());
}

#[test]
fn state_validation_rejects_bad_input() {
    let not_psd = ComplexMatrix::diag_real(&[1.5, -0.5]);
    assert!(BipartiteState::new(not_psd, 1, 2).is_err());
    let bad_trace = ComplexMatrix::diag_real(&[0.5, 0.2]);
    assert!(BipartiteState::new(bad_trace, 1, 2).is_err());
    let mut non_herm = ComplexMatrix::diag_real(&[0.5, 0.5]);
    non_herm[(0, 1)] = C64::new(0.1, 0.0);
    assert!(BipartiteState::new(non_herm, 1, 2).is_err());
    assert!(BipartiteState::new(ComplexMatrix::identity(4).scale_real(0.25), 3, 2).is_err());
}
