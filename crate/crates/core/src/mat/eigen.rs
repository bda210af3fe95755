//! Hermitian eigensolver (cyclic complex Jacobi) and spectral functions.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{QtError, Result};

/// Convergence threshold on the off-diagonal Frobenius norm, relative to
/// `max(1, ‖m‖_F)`.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Largest Hermiticity defect (relative) that is silently symmetrized.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigendecomposition `m = U diag(λ) U†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermEigen {
    pub values: Vec<f64>,
    /// Unitary; column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    /// `U diag(f(λ)) U†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.vectors;
        let fl: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .filter(|&k| fl[k] != ZERO)
                .map(|k| u[(i, k)] * fl[k] * u[(j, k)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| C64::new(l, 0.0))
    }
}

fn off_diagonal_norm(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Inputs whose Hermiticity defect is at most `1e-10·max(1, ‖m‖_F)` are
/// replaced by `(m + m†)/2`; larger defects are rejected.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEigen> {
    let n = m.check_square("herm_eig")?;
    if !m.is_finite() {
        return Err(QtError::NumericalFailure {
            context: "herm_eig input",
            residual: f64::NAN,
        });
    }
    let scale = m.frob_norm().max(1.0);
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(QtError::NotHermitian { defect });
    }
    jacobi(m.hermitian_part(), n, scale)
}

fn jacobi(m: ComplexMatrix, n: usize, scale: f64) -> Result<HermEigen> {
    let mut a = m.into_data();
    let mut v = ComplexMatrix::identity(n).into_data();
    let tol = JACOBI_TOL * scale;

    let mut off = off_diagonal_norm(&a, n);
    let mut sweeps = 0;
    while off >= tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(QtError::NumericalFailure {
                context: "herm_eig did not converge",
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let abs = apq.norm();
                if abs == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let phase = apq / abs;
                let theta = (aqq - app) / (2.0 * abs);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Plane rotation U = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]]; A ← U†AU, V ← VU.
                let u_pq = phase * s;
                let u_qp = -phase.conj() * s;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c + akq * u_qp;
                    a[k * n + q] = akp * u_pq + akq * c;
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c + vkq * u_qp;
                    v[k * n + q] = vkp * u_pq + vkq * c;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c + aqk * u_qp.conj();
                    a[q * n + k] = apk * u_pq.conj() + aqk * c;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = C64::new(a[q * n + q].re, 0.0);
            }
        }
        off = off_diagonal_norm(&a, n);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&k| a[k * n + k].re).collect();
    let v = ComplexMatrix::from_vec_unchecked(n, n, v);
    Ok(HermEigen {
        values,
        vectors: v.select_cols(&order),
    })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(herm_eig(m)?.values)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(m)?.min())
}

/// Spectral norm `sqrt(λ_max(x† x))`.
pub fn op_norm(x: &ComplexMatrix) -> f64 {
    let f = x.frob_norm();
    if f == 0.0 || x.rows() == 1 || x.cols() == 1 {
        return f;
    }
    let gram = x.adjoint_mul(x);
    match herm_eig(&gram) {
        Ok(e) => e.max().max(0.0).sqrt(),
        // Gram matrices are Hermitian up to rounding; Frobenius is a valid bound.
        Err(_) => f,
    }
}

fn symmetrize_checked(m: &ComplexMatrix, tol: f64, what: &str) -> Result<ComplexMatrix> {
    m.check_square(what)?;
    let defect = m.hermiticity_defect();
    if defect > tol * m.frob_norm().max(1.0) {
        return Err(QtError::NotHermitian { defect });
    }
    Ok(m.hermitian_part())
}

/// Nearest PSD matrix in Frobenius norm: clamp negative eigenvalues to zero.
pub fn psd_project(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = symmetrize_checked(m, 1e-8, "psd_project")?;
    let e = herm_eig(&h)?;
    if e.min() >= 0.0 {
        return Ok(h);
    }
    Ok(e.reconstruct_with(|l| C64::new(l.max(0.0), 0.0)).hermitian_part())
}

/// Principal square root of a PSD matrix (negative eigenvalues clamped).
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = symmetrize_checked(m, 1e-8, "sqrt_psd")?;
    let e = herm_eig(&h)?;
    Ok(e.reconstruct_with(|l| C64::new(l.max(0.0).sqrt(), 0.0)).hermitian_part())
}

/// Cached eigensystem of a Hermitian generator `a`, giving the flow
/// `t ↦ e^{ita} b e^{−ita}` without re-diagonalizing.
#[derive(Debug, Clone)]
pub struct HermFlow {
    eig: HermEigen,
}

impl HermFlow {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        Ok(Self { eig: herm_eig(a)? })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    /// `e^{ita}`.
    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        self.eig.reconstruct_with(|l| C64::from_polar(1.0, t * l))
    }

    /// `e^{ita} b e^{−ita}`.
    pub fn conjugate(&self, t: f64, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        b.check_square("herm_exp_conjugate")?;
        if b.rows() != self.dim() {
            return Err(QtError::InvalidDimensions(format!(
                "herm_exp_conjugate: generator is {0}x{0}, operand is {1}x{1}",
                self.dim(),
                b.rows()
            )));
        }
        if t == 0.0 {
            return Ok(b.clone());
        }
        let w = self.unitary(t);
        Ok(w.matmul(b).matmul(&w.adjoint()))
    }
}

/// `e^{ita} b e^{−ita}` for Hermitian `a`.
pub fn herm_exp_conjugate(a: &ComplexMatrix, t: f64, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    HermFlow::new(a)?.conjugate(t, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::ops::{commutator, pauli};
    use crate::mat::random::{random_ginibre, random_hermitian, RngStream};

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn eigen_examples() {
        assert_close(&eigvalsh(&ComplexMatrix::diag_real(&[3.0, 1.0, 2.0])).unwrap(), &[1.0, 2.0, 3.0], 0.0);
        assert_close(&eigvalsh(&pauli::x()).unwrap(), &[-1.0, 1.0], 1e-15);
        let m = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert_close(&eigvalsh(&m).unwrap(), &[1.0, 3.0], 1e-14);
    }

    #[test]
    fn reconstruction_unitarity_and_trace() {
        let mut rng = RngStream::new(11, 0);
        for n in [1, 2, 3, 5, 8, 16] {
            let m = random_hermitian(&mut rng, n);
            let e = herm_eig(&m).unwrap();
            let scale = m.frob_norm().max(1.0);
            assert!((&e.reconstruct() - &m).frob_norm() <= 1e-10 * scale);
            let u = &e.vectors;
            assert!((&u.adjoint_mul(u) - &ComplexMatrix::identity(n)).frob_norm() <= 1e-10);
            let tr: f64 = e.values.iter().sum();
            assert!((tr - m.trace().re).abs() <= 1e-10 * m.trace().re.abs().max(1.0));
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(herm_eig(&m), Err(QtError::NotHermitian { .. })));
    }

    #[test]
    fn symmetrizes_tiny_defect() {
        let mut m = pauli::x();
        m[(0, 1)] += C64::new(1e-13, 0.0);
        assert_close(&eigvalsh(&m).unwrap(), &[-1.0, 1.0], 1e-12);
    }

    #[test]
    fn psd_projection_examples() {
        let p = psd_project(&ComplexMatrix::diag_real(&[1.0, -1.0])).unwrap();
        assert!(p.approx_eq(&ComplexMatrix::diag_real(&[1.0, 0.0]), 1e-15));
        let expected = (&pauli::x() + &ComplexMatrix::identity(2)).scale_real(0.5);
        assert!(psd_project(&pauli::x()).unwrap().approx_eq(&expected, 1e-14));
        let mut rng = RngStream::new(3, 0);
        let g = random_ginibre(&mut rng, 4, 4);
        let psd = g.matmul(&g.adjoint());
        assert!(psd_project(&psd).unwrap().approx_eq(&psd, 1e-10 * psd.frob_norm()));
    }

    #[test]
    fn exp_conjugate_examples() {
        let (x, z) = (pauli::x(), pauli::z());
        assert_eq!(herm_exp_conjugate(&z, 0.0, &x).unwrap(), x);
        let flipped = herm_exp_conjugate(&z, std::f64::consts::FRAC_PI_2, &x).unwrap();
        assert!(flipped.approx_eq(&x.scale_real(-1.0), 1e-14));
        let mut rng = RngStream::new(5, 0);
        let a = random_hermitian(&mut rng, 3);
        let id = ComplexMatrix::identity(3);
        assert!(herm_exp_conjugate(&a, 0.7, &id).unwrap().approx_eq(&id, 1e-14));
    }

    #[test]
    fn flow_derivative_is_commutator() {
        let mut rng = RngStream::new(9, 1);
        let a = random_hermitian(&mut rng, 3);
        let b = random_hermitian(&mut rng, 3);
        let flow = HermFlow::new(&a).unwrap();
        let h = 1e-5;
        let fd = (&flow.conjugate(h, &b).unwrap() - &flow.conjugate(-h, &b).unwrap()).scale_real(0.5 / h);
        let exact = commutator(&a, &b).unwrap().scale(C64::new(0.0, 1.0));
        assert!((&fd - &exact).frob_norm() <= 1e-3 * exact.frob_norm());
    }

    #[test]
    fn op_norm_of_pauli_commutator() {
        let c = commutator(&pauli::x(), &pauli::y()).unwrap();
        assert!((op_norm(&c) - 2.0).abs() < 1e-14);
        assert!((c.frob_norm() - 2.0 * 2f64.sqrt()).abs() < 1e-14);
    }
}
