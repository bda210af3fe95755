//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use qtime_cli::ensemble::{run_ensemble, to_csv, EnsembleSpec, Family};
use qtime_cli::qmat::{parse_qmat, write_qmat, write_state, QmatContent};
use qtime_core::channels::{adjoint_channel, channel_from_state};
use qtime_core::linmap::LinearMapOnAlgebra;
use qtime_core::mat::{eigvalsh, kron, partial_transpose, pauli, random_density, random_haar_vector, random_hermitian, random_unitary};
use qtime_core::orientation::{
    check_orientation_preservation, orientation_derivative, orientation_difference_quotient, thm6_report, DilationKind,
    Sign, TimeOrientation,
};
use qtime_core::separability::{
    build_separability_certificate, decomposability_test, fw_separable_search_with, ppt_test, prop2_transfer,
    separability_verdict, FwOptions, PptVerdict, DECOMPOSABLE_RESIDUAL, PPT_TOL,
};
use qtime_core::states::{random_separable, schmidt_decompose, tiles_upb_state, werner_state};
use qtime_core::{BipartiteState, ComplexMatrix, OrientationReport, RngStream, Subsystem, Verdict, C64};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn decisive_dimensions() -> Outcome {
    let mut summary = Vec::new();
    for (d_a, d_b) in [(2, 2), (2, 3)] {
        let spec = EnsembleSpec {
            family: Family::Mixed,
            params: Vec::new(),
            d_a,
            d_b,
            samples: 500,
            seed: 2024,
            budget: 5000,
            decomp_budget: 200,
            timing: false,
        };
        let start = Instant::now();
        let rows = run_ensemble(&spec).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        let mut worst_pass: f64 = 0.0;
        let mut best_fail = f64::INFINITY;
        for r in &rows {
            if r.ppt_min_eig >= -PPT_TOL {
                worst_pass = worst_pass.max(r.fw_residual);
                ensure(r.fw_residual <= 1e-4, || format!("{d_a}x{d_b} {}: PPT passes, residual {:e}", r.params, r.fw_residual))?;
            } else {
                best_fail = best_fail.min(r.fw_residual);
                ensure(r.fw_residual >= 1e-6, || format!("{d_a}x{d_b} {}: PPT fails, residual {:e}", r.params, r.fw_residual))?;
            }
        }
        ensure(secs <= 120.0, || format!("{d_a}x{d_b} took {secs:.1}s"))?;
        summary.push(format!(
            "{d_a}x{d_b}: {:.1}s, max residual on PPT {:.2e}, min residual on NPT {:.2e}",
            secs, worst_pass, best_fail
        ));
    }
    Ok(summary.join("; "))
}

fn werner_threshold() -> Outcome {
    let min_eig = |p: f64| -> Result<f64, String> {
        let rho = werner_state(2, p).map_err(|e| e.to_string())?;
        Ok(ppt_test(&rho).map_err(|e| e.to_string())?.min_eigenvalue)
    };
    let mut worst: f64 = 0.0;
    for i in 0..=100 {
        let p = i as f64 / 100.0;
        let expected = (1.0 - 3.0 * p) / 4.0;
        let got = min_eig(p)?;
        worst = worst.max((got - expected).abs());
    }
    ensure(worst <= 1e-10, || format!("grid deviation {worst:e}"))?;
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if min_eig(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    ensure((p - 1.0 / 3.0).abs() <= 1e-6, || format!("threshold at {p}"))?;
    Ok(format!("grid deviation {worst:.1e}, threshold p = {p:.9}"))
}

fn pure_state_spectra() -> Outcome {
    let mut rng = RngStream::new(11, 0);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for d_a in 2..=4 {
        for d_b in 2..=4 {
            for _ in 0..200 {
                let rank = 1 + rng.below(d_a.min(d_b));
                let raw: Vec<f64> = (0..rank).map(|_| 0.05 + rng.uniform()).collect();
                let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
                let alphas: Vec<f64> = raw.iter().map(|a| a / norm).collect();
                let (u, v) = (random_unitary(&mut rng, d_a), random_unitary(&mut rng, d_b));
                let mut psi = ComplexMatrix::zeros(d_a * d_b, 1);
                for (i, &a) in alphas.iter().enumerate() {
                    psi = &psi + &kron(&u.col(i), &v.col(i)).scale_real(a);
                }
                let mut predicted: Vec<f64> = alphas.iter().map(|a| a * a).collect();
                for i in 0..rank {
                    for j in i + 1..rank {
                        predicted.push(alphas[i] * alphas[j]);
                        predicted.push(-alphas[i] * alphas[j]);
                    }
                }
                predicted.resize(d_a * d_b, 0.0);
                let rho = BipartiteState::from_pure(&psi, d_a, d_b).map_err(|e| e.to_string())?;
                let observed = eigvalsh(&rho.partial_transpose(Subsystem::A)).map_err(|e| e.to_string())?;
                worst = worst.max(max_abs_diff(&sorted(predicted), &observed));
                let schmidt = schmidt_decompose(&psi, d_a, d_b).map_err(|e| e.to_string())?;
                let verdict = separability_verdict(&rho, 100, &mut rng).map_err(|e| e.to_string())?.verdict;
                let ppt = ppt_test(&rho).map_err(|e| e.to_string())?.verdict;
                let entangled = rank >= 2;
                ensure(schmidt.rank() == rank, || format!("{d_a}x{d_b}: Schmidt rank {} != {rank}", schmidt.rank()))?;
                ensure((verdict == Verdict::Entangled) == entangled, || format!("{d_a}x{d_b} rank {rank}: {verdict:?}"))?;
                ensure((ppt == PptVerdict::Entangled) == entangled, || format!("{d_a}x{d_b} rank {rank}: PPT {ppt:?}"))?;
                cases += 1;
            }
        }
    }
    ensure(worst <= 1e-9, || format!("spectrum deviation {worst:e}"))?;
    Ok(format!("{cases} states, spectrum deviation {worst:.1e}, no verdict exceptions"))
}

fn adjoint_is_partial_transpose() -> Outcome {
    let mut rng = RngStream::new(12, 0);
    let mut worst: f64 = 0.0;
    for d_a in 1..=4 {
        for d_b in 1..=4 {
            for _ in 0..100 {
                let n = d_a * d_b;
                let k = 1 + rng.below(n);
                let rho = BipartiteState::new(random_density(&mut rng, n, k), d_a, d_b).map_err(|e| e.to_string())?;
                let star = adjoint_channel(&channel_from_state(&rho));
                let pt = partial_transpose(rho.rho(), d_a, d_b, Subsystem::A).map_err(|e| e.to_string())?;
                worst = worst.max((star.choi() - &pt).frob_norm());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("deviation {worst:e}"))?;
    Ok(format!("1600 states, max Frobenius deviation {worst:.1e}"))
}

fn separable_certificates() -> Outcome {
    let mut rng = RngStream::new(13, 0);
    let mut worst = [0.0f64; 4];
    for _ in 0..200 {
        let (d_a, d_b) = (1 + rng.below(4), 1 + rng.below(4));
        let m = 1 + rng.below(6);
        let (rho, dec) = random_separable(&mut rng, d_a, d_b, m).map_err(|e| e.to_string())?;
        let cert = build_separability_certificate(&rho, &dec).map_err(|e| e.to_string())?;
        let c = cert.dilation.certificate();
        let stages = [cert.holevo_residual, cert.naimark_povm_defect, c.image_commutator, c.homomorphism.max(c.star)];
        for (w, s) in worst.iter_mut().zip(stages) {
            *w = w.max(s);
        }
    }
    let limits = [1e-9, 1e-10, 1e-12, 1e-10];
    ensure(worst.iter().zip(limits).all(|(w, l)| *w <= l), || format!("stage maxima {worst:?}"))?;
    Ok(format!(
        "200 certificates, holevo {:.1e}, naimark {:.1e}, image commutator {:.1e}, homomorphism {:.1e}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn decomposition_transfer() -> Outcome {
    let mut rng = RngStream::new(14, 0);
    let (mut worst_gap, mut worst_eig): (f64, f64) = (0.0, 0.0);
    for i in 0..100 {
        let (d_a, d_b) = if i % 2 == 0 { (2, 2) } else { (2, 3) };
        let n = d_a * d_b;
        // Rank-one pairs meet the PSD cones only at the boundary, where
        // alternating projections converge sublinearly.
        let (kp, kq) = (2 + rng.below(n - 1), 2 + rng.below(n - 1));
        let p0 = random_density(&mut rng, n, kp);
        let q0 = random_density(&mut rng, n, kq);
        let c = &p0 + &partial_transpose(&q0, d_a, d_b, Subsystem::B).map_err(|e| e.to_string())?;
        let cert = decomposability_test(&c, d_a, d_b, 2000).map_err(|e| e.to_string())?;
        ensure(cert.residual <= DECOMPOSABLE_RESIDUAL, || format!("instance {i} not solved: {:e}", cert.residual))?;
        let moved = prop2_transfer(&cert, &c);
        let (mp, mq) = moved.min_eigenvalues().map_err(|e| e.to_string())?;
        worst_gap = worst_gap.max((moved.residual - cert.residual).abs());
        worst_eig = worst_eig.min(mp.min(mq));
    }
    ensure(worst_gap <= 1e-12 && worst_eig >= -1e-10, || format!("gap {worst_gap:e}, min eig {worst_eig:e}"))?;
    Ok(format!("100 instances, residual gap {worst_gap:.1e}, min eigenvalue {worst_eig:.1e}"))
}

fn report(phi: &LinearMapOnAlgebra, a: Sign, b: Sign, samples: usize, rng: &mut RngStream) -> Result<OrientationReport, String> {
    let o_a = TimeOrientation { sign: a, dim: phi.d_in() };
    let o_b = TimeOrientation { sign: b, dim: phi.d_out() };
    check_orientation_preservation(phi, o_a, o_b, samples, rng).map_err(|e| e.to_string())
}

fn orientation_calculus() -> Outcome {
    let mut rng = RngStream::new(15, 0);
    let mut unitary_worst: f64 = 0.0;
    let mut fd_worst: f64 = 0.0;
    for d in 1..=4 {
        let u = random_unitary(&mut rng, d);
        let phi = LinearMapOnAlgebra::unitary_conjugation(&u).map_err(|e| e.to_string())?;
        for (a, b) in [(Sign::Plus, Sign::Plus), (Sign::Minus, Sign::Minus)] {
            let r = report(&phi, a, b, 16, &mut rng)?;
            unitary_worst = unitary_worst.max(r.same_orientation_residual);
            fd_worst = fd_worst.max(r.fd_discrepancy);
        }
    }
    ensure(unitary_worst <= 1e-10, || format!("unitary same-orientation residual {unitary_worst:e}"))?;

    let transpose = LinearMapOnAlgebra::transpose_map(2);
    let t = report(&transpose, Sign::Plus, Sign::Plus, 0, &mut rng)?;
    ensure(t.opposite_orientation_residual <= 1e-10, || format!("transpose opposite residual {:e}", t.opposite_orientation_residual))?;
    ensure(t.same_orientation_residual >= 1.0, || format!("transpose same residual {:e}", t.same_orientation_residual))?;
    fd_worst = fd_worst.max(t.fd_discrepancy);
    for d in 2..=3 {
        let r = report(&LinearMapOnAlgebra::transpose_map(d), Sign::Plus, Sign::Minus, 16, &mut rng)?;
        fd_worst = fd_worst.max(r.fd_discrepancy);
    }
    ensure(fd_worst <= 1e-3, || format!("finite-difference discrepancy {fd_worst:e}"))?;

    let (o, p) = (TimeOrientation::canonical(2), TimeOrientation::canonical(2));
    let paulis = [pauli::x(), pauli::y(), pauli::z()];
    let mut ratios = Vec::new();
    for (i, a) in paulis.iter().enumerate() {
        for b in paulis.iter().skip(i + 1) {
            let exact = orientation_derivative(&transpose, o, p, a, b).map_err(|e| e.to_string())?;
            let err = |h: f64| -> Result<f64, String> {
                let q = orientation_difference_quotient(&transpose, o, p, a, b, h).map_err(|e| e.to_string())?;
                Ok((&q - &exact).frob_norm())
            };
            ratios.push(err(0.05)? / err(0.025)?);
        }
    }
    let a = random_hermitian(&mut rng, 3);
    let b = random_hermitian(&mut rng, 3);
    let phi = LinearMapOnAlgebra::transpose_map(3);
    let (o3, p3) = (TimeOrientation::canonical(3), TimeOrientation::canonical(3));
    let exact = orientation_derivative(&phi, o3, p3, &a, &b).map_err(|e| e.to_string())?;
    let err = |h: f64| -> Result<f64, String> {
        let q = orientation_difference_quotient(&phi, o3, p3, &a, &b, h).map_err(|e| e.to_string())?;
        Ok((&q - &exact).frob_norm())
    };
    ratios.push(err(0.02)? / err(0.01)?);
    ensure(ratios.iter().all(|r| (r - 4.0).abs() <= 0.25), || format!("halving ratios {ratios:?}"))?;
    Ok(format!(
        "unitary residual {unitary_worst:.1e}, transpose same {:.1} / opposite {:.1e}, FD discrepancy {fd_worst:.1e}, halving ratios {:.3}..{:.3}",
        t.same_orientation_residual,
        t.opposite_orientation_residual,
        ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        ratios.iter().cloned().fold(0.0, f64::max)
    ))
}

fn dual_orientation_suite() -> Outcome {
    let mut rng = RngStream::new(16, 0);
    let mut triangle_checked = 0;
    let check_triangle = |r: &OrientationReport| -> Result<(), String> {
        let bound = 0.5 * (r.same_orientation_residual + r.opposite_orientation_residual) + 1e-12;
        ensure(r.image_commutator <= bound, || format!("image commutator {:e} above {:e}", r.image_commutator, bound))
    };
    let mut sep_worst: f64 = 0.0;
    for _ in 0..40 {
        let (d_a, d_b) = (1 + rng.below(3), 1 + rng.below(3));
        let m = 1 + rng.below(5);
        let (rho, _) = random_separable(&mut rng, d_a, d_b, m).map_err(|e| e.to_string())?;
        let dual = thm6_report(&rho, 5000, 8, &mut rng).map_err(|e| e.to_string())?;
        if dual.verdict() != Verdict::Separable {
            continue;
        }
        ensure(dual.dilation == Some(DilationKind::Commutative), || "separable sample without commutative dilation".into())?;
        for r in [&dual.forward, &dual.reverse].into_iter().flatten() {
            sep_worst = sep_worst.max(r.residual());
            check_triangle(r)?;
            triangle_checked += 1;
        }
        ensure(dual.both_pass(), || format!("orientation residuals {:e}", sep_worst))?;
    }
    ensure(sep_worst <= 1e-8, || format!("separable orientation residual {sep_worst:e}"))?;

    let mut ent_min = f64::INFINITY;
    for _ in 0..40 {
        let (d_a, d_b) = (2 + rng.below(2), 2 + rng.below(2));
        let psi = random_haar_vector(&mut rng, d_a * d_b);
        let rho = BipartiteState::from_pure(&psi, d_a, d_b).map_err(|e| e.to_string())?;
        let dual = thm6_report(&rho, 5000, 8, &mut rng).map_err(|e| e.to_string())?;
        ensure(dual.verdict() == Verdict::Entangled, || "Haar pure state not entangled".into())?;
        ent_min = ent_min.min(dual.image_commutator().unwrap_or(0.0));
        for r in [&dual.forward, &dual.reverse].into_iter().flatten() {
            check_triangle(r)?;
            triangle_checked += 1;
        }
    }
    ensure(ent_min >= 1e-2, || format!("pure entangled image commutator {ent_min:e}"))?;

    for _ in 0..40 {
        let (d_a, d_b) = (1 + rng.below(3), 1 + rng.below(3));
        let n = d_a * d_b;
        let k = 1 + rng.below(n);
        let rho = BipartiteState::new(random_density(&mut rng, n, k), d_a, d_b).map_err(|e| e.to_string())?;
        let dual = thm6_report(&rho, 1000, 8, &mut rng).map_err(|e| e.to_string())?;
        for r in [&dual.forward, &dual.reverse].into_iter().flatten() {
            check_triangle(r)?;
            triangle_checked += 1;
        }
    }
    Ok(format!(
        "separable residual {sep_worst:.1e}, pure entangled image commutator >= {ent_min:.3}, triangle bound on {triangle_checked} reports"
    ))
}

fn ppt_insufficiency() -> Outcome {
    let rho = tiles_upb_state();
    let ppt = ppt_test(&rho).map_err(|e| e.to_string())?;
    ensure(ppt.min_eigenvalue >= -1e-10, || format!("min eigenvalue {:e}", ppt.min_eigenvalue))?;
    let opts = FwOptions {
        early_exit: false,
        ..FwOptions::default()
    };
    let fw = fw_separable_search_with(&rho, &opts, &mut RngStream::new(17, 0)).map_err(|e| e.to_string())?;
    ensure(fw.residual >= 1e-3, || format!("search residual {:e}", fw.residual))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("tiles.qmat");
    std::fs::write(&path, write_state(&rho)).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_qtime"))
        .args(["sep", "--in", &path.display().to_string(), "--seed", "17"])
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    let verdicts: Vec<&str> = text.lines().filter(|l| l.starts_with("VERDICT")).collect();
    ensure(out.status.code() == Some(0) && verdicts == ["VERDICT UNDECIDED"], || format!("CLI printed {verdicts:?}"))?;
    ensure(text.contains("indicative"), || "no indicative-only note".into())?;
    Ok(format!(
        "min eigenvalue {:.1e}, residual {:.4} after {} iterations (lower bound {:.4}), CLI UNDECIDED",
        ppt.min_eigenvalue, fw.residual, fw.iterations, fw.lower_bound
    ))
}

fn special_value(rng: &mut RngStream) -> f64 {
    match rng.below(8) {
        0 => f64::from_bits(1 + rng.below(1 << 20) as u64),
        1 => f64::MAX * (rng.uniform() - 0.5),
        2 => -0.0,
        3 => 0.1 + rng.below(1000) as f64 * 1e-3,
        4 => (rng.normal() * 1e300).clamp(-f64::MAX, f64::MAX),
        _ => rng.normal() * 10f64.powi(rng.below(40) as i32 - 20),
    }
}

fn determinism_and_io() -> Outcome {
    let spec = EnsembleSpec {
        family: Family::Mixed,
        params: Vec::new(),
        d_a: 2,
        d_b: 3,
        samples: 30,
        seed: 99,
        budget: 5000,
        decomp_budget: 200,
        timing: false,
    };
    let first = to_csv(&run_ensemble(&spec).map_err(|e| e.to_string())?);
    let second = to_csv(&run_ensemble(&spec).map_err(|e| e.to_string())?);
    ensure(first.as_bytes() == second.as_bytes(), || "library ensemble output differs".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_qtime"))
            .args(["ensemble", "--family", "werner", "--param", "pmin=0", "--param", "pmax=1", "--samples", "21", "--seed", "5"])
            .arg("--out")
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.success(), || "CLI ensemble failed".into())?;
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(files[0] == files[1], || "CLI ensemble output differs".into())?;

    let mut rng = RngStream::new(18, 0);
    for i in 0..1000 {
        let (r, c) = (1 + rng.below(6), 1 + rng.below(6));
        let m = ComplexMatrix::from_fn(r, c, |_, _| C64::new(special_value(&mut rng), special_value(&mut rng)));
        let back = match parse_qmat(&write_qmat(&m, None)).map_err(|e| e.to_string())? {
            QmatContent::Matrix(b) => b,
            QmatContent::State(_) => return Err("matrix read back as a state".into()),
        };
        let same = back.dims() == m.dims()
            && back.data().iter().zip(m.data()).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
        ensure(same, || format!("matrix {i} did not round-trip"))?;
    }
    Ok(format!("ensemble CSVs byte-identical ({} bytes), 1000 matrices bit-exact", first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("decisive dimensions", decisive_dimensions),
        ("werner threshold", werner_threshold),
        ("pure-state spectra", pure_state_spectra),
        ("adjoint channel is partial transpose", adjoint_is_partial_transpose),
        ("separable certificates", separable_certificates),
        ("decomposition transfer", decomposition_transfer),
        ("orientation calculus", orientation_calculus),
        ("dual orientation suite", dual_orientation_suite),
        ("ppt insufficiency", ppt_insufficiency),
        ("determinism and i/o", determinism_and_io),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
