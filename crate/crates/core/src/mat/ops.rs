//! Tensor-product structure and algebraic products.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{QtError, Result};

/// Tensor factor of a bipartite space `H_A ⊗ H_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Kronecker product with `(a⊗b)[i·rb+k, j·cb+l] = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.dims();
    let (rb, cb) = b.dims();
    let mut data = vec![ZERO; ra * rb * ca * cb];
    let cols = ca * cb;
    for i in 0..ra {
        for j in 0..ca {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    data[(i * rb + k) * cols + j * cb + l] = x * b[(k, l)];
                }
            }
        }
    }
    ComplexMatrix::from_vec_unchecked(ra * rb, cols, data)
}

fn check_bipartite(m: &ComplexMatrix, d_a: usize, d_b: usize, what: &str) -> Result<()> {
    let n = d_a * d_b;
    if d_a == 0 || d_b == 0 || m.dims() != (n, n) {
        return Err(QtError::InvalidDimensions(format!(
            "{what}: expected {n}x{n} for dA={d_a}, dB={d_b}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Trace over the named factor of a `(dA·dB)`-square matrix.
pub fn partial_trace(m: &ComplexMatrix, d_a: usize, d_b: usize, which: Subsystem) -> Result<ComplexMatrix> {
    check_bipartite(m, d_a, d_b, "partial_trace")?;
    Ok(match which {
        Subsystem::A => ComplexMatrix::from_fn(d_b, d_b, |k, l| {
            (0..d_a).map(|i| m[(i * d_b + k, i * d_b + l)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(d_a, d_a, |i, j| {
            (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum()
        }),
    })
}

/// Transposition of the named factor in the computational basis.
///
/// For `A` the `(i, j)` block moves to `(j, i)`; for `B` every block is
/// transposed in place. Entries are permuted, never recomputed, so applying
/// the map twice returns the input bit-for-bit.
pub fn partial_transpose(m: &ComplexMatrix, d_a: usize, d_b: usize, which: Subsystem) -> Result<ComplexMatrix> {
    check_bipartite(m, d_a, d_b, "partial_transpose")?;
    Ok(partial_transpose_unchecked(m, d_a, d_b, which))
}

pub(crate) fn partial_transpose_unchecked(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    which: Subsystem,
) -> ComplexMatrix {
    let n = d_a * d_b;
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / d_b, r % d_b);
        let (j, l) = (c / d_b, c % d_b);
        match which {
            Subsystem::A => m[(j * d_b + k, i * d_b + l)],
            Subsystem::B => m[(i * d_b + l, j * d_b + k)],
        }
    })
}

fn check_square_pair(a: &ComplexMatrix, b: &ComplexMatrix, what: &str) -> Result<()> {
    a.check_square(what)?;
    a.check_same_dims(b, what)
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square_pair(a, b, "commutator")?;
    Ok(&a.matmul(b) - &b.matmul(a))
}

/// `{a, b} = ab + ba` (no factor ½).
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square_pair(a, b, "anticommutator")?;
    Ok(&a.matmul(b) + &b.matmul(a))
}

/// Hilbert–Schmidt inner product `(a, b) = tr[b† a]`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    a.check_same_dims(b, "hs_inner")?;
    Ok(a.data().iter().zip(b.data()).map(|(x, y)| y.conj() * x).sum())
}

pub fn frob_norm(a: &ComplexMatrix) -> f64 {
    a.frob_norm()
}

/// Pauli matrices, handy for examples and tests.
pub mod pauli {
    use super::super::matrix::{ComplexMatrix, C64, ONE, ZERO};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
    }

    pub fn y() -> ComplexMatrix {
        let i = C64::new(0.0, 1.0);
        ComplexMatrix::from_rows(&[&[ZERO, -i], &[i, ZERO]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]])
    }
}
