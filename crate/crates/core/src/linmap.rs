//! Linear maps between matrix algebras, stored by their values on matrix units.

use crate::error::{QtError, Result};
use crate::mat::{ComplexMatrix, C64, ZERO};

/// Which part of the input algebra a map is meant to be tested on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// All of `M_{dIn}(C)`.
    Full,
    /// The diagonal (maximal commutative) subalgebra.
    Diagonal,
}

/// Linear map `M_{dIn}(C) → M_{dOut}(C)`, `Φ(a) = Σ_ij a_ij Φ(E_ij)`.
#[derive(Debug, Clone)]
pub struct LinearMapOnAlgebra {
    d_in: usize,
    d_out: usize,
    values: Vec<ComplexMatrix>,
    domain: Domain,
}

impl LinearMapOnAlgebra {
    /// `values[i·dIn + j] = Φ(E_ij)`.
    pub fn new(d_in: usize, d_out: usize, values: Vec<ComplexMatrix>) -> Result<Self> {
        if d_in == 0 || d_out == 0 {
            return Err(QtError::InvalidDimensions("map dimensions must be positive".into()));
        }
        if values.len() != d_in * d_in {
            return Err(QtError::InvalidDimensions(format!(
                "map on M_{d_in} needs {} basis values, got {}",
                d_in * d_in,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| v.dims() != (d_out, d_out)) {
            return Err(QtError::InvalidDimensions(format!(
                "basis value is {}x{}, expected {d_out}x{d_out}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self {
            d_in,
            d_out,
            values,
            domain: Domain::Full,
        })
    }

    /// Tabulates `f` on the matrix units.
    pub fn from_fn(d_in: usize, d_out: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let mut values = Vec::with_capacity(d_in * d_in);
        for i in 0..d_in {
            for j in 0..d_in {
                values.push(f(&ComplexMatrix::unit(d_in, i, j)));
            }
        }
        Self::new(d_in, d_out, values)
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, d, |a| a.clone()).expect("valid dims")
    }

    pub fn transpose_map(d: usize) -> Self {
        Self::from_fn(d, d, |a| a.transpose()).expect("valid dims")
    }

    /// `a ↦ U a U†`.
    pub fn unitary_conjugation(u: &ComplexMatrix) -> Result<Self> {
        let d = u.check_square("unitary_conjugation")?;
        let ud = u.adjoint();
        Self::from_fn(d, d, |a| u.matmul(a).matmul(&ud))
    }

    pub fn zero(d_in: usize, d_out: usize) -> Self {
        Self::from_fn(d_in, d_out, |_| ComplexMatrix::zeros(d_out, d_out)).expect("valid dims")
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn basis_value(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.values[i * self.d_in + j]
    }

    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(a.dims(), (self.d_in, self.d_in), "map input dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for (coef, value) in a.data().iter().zip(&self.values) {
            if *coef == ZERO {
                continue;
            }
            for (o, v) in out.data_mut().iter_mut().zip(value.data()) {
                *o += coef * v;
            }
        }
        out
    }

    /// `Φ*` as the linear map with `Φ*(E_ij) = Φ(E_ij)†`.
    pub fn star(&self) -> Self {
        Self {
            d_in: self.d_in,
            d_out: self.d_out,
            values: self.values.iter().map(ComplexMatrix::adjoint).collect(),
            domain: self.domain,
        }
    }

    /// `a ↦ Φ(a^T)`.
    pub fn precompose_transpose(&self) -> Self {
        let d = self.d_in;
        let values = (0..d * d).map(|k| self.values[(k % d) * d + k / d].clone()).collect();
        Self {
            d_in: d,
            d_out: self.d_out,
            values,
            domain: self.domain,
        }
    }

    /// `max_ij ‖Φ(E_ij†) − Φ(E_ij)†‖_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.d_in;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                if self.domain == Domain::Diagonal && i != j {
                    continue;
                }
                let lhs = self.basis_value(j, i);
                let rhs = self.basis_value(i, j).adjoint();
                worst = worst.max((lhs - &rhs).frob_norm());
            }
        }
        worst
    }

    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Hermitian basis of the domain: `E_ii`, `E_ij + E_ji`, `i(E_ij − E_ji)`.
    pub fn hermitian_basis(&self) -> Vec<ComplexMatrix> {
        hermitian_basis(self.d_in, self.domain)
    }
}

pub fn hermitian_basis(d: usize, domain: Domain) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(ComplexMatrix::unit(d, i, i));
    }
    if domain == Domain::Full {
        for i in 0..d {
            for j in i + 1..d {
                let mut s = ComplexMatrix::zeros(d, d);
                s[(i, j)] = C64::new(1.0, 0.0);
                s[(j, i)] = C64::new(1.0, 0.0);
                out.push(s);
                let mut a = ComplexMatrix::zeros(d, d);
                a[(i, j)] = C64::new(0.0, 1.0);
                a[(j, i)] = C64::new(0.0, -1.0);
                out.push(a);
            }
        }
    }
    out
}
