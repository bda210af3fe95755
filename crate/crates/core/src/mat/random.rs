//! Seeded random ensembles.
//!
//! The generator is ChaCha20 (a counter-based stream cipher) seeded from a
//! 64-bit seed; the stream index selects an independent ChaCha stream, so
//! ensemble workers with distinct indices never share samples.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::matrix::{ComplexMatrix, C64};

/// Reproducible random source identified by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform on `(0, 1]`.
    fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Complex standard normal (real and imaginary parts i.i.d. N(0,1)),
    /// from one Box–Muller pair.
    pub fn complex_normal(&mut self) -> C64 {
        let r = (-2.0 * self.uniform_open0().ln()).sqrt();
        let theta = TAU * self.uniform();
        C64::new(r * theta.cos(), r * theta.sin())
    }

    /// Real standard normal.
    pub fn normal(&mut self) -> f64 {
        self.complex_normal().re
    }

    /// Standard exponential variate.
    pub fn exponential(&mut self) -> f64 {
        -self.uniform_open0().ln()
    }

    /// Uniform point on the probability simplex (flat Dirichlet).
    pub fn dirichlet_uniform(&mut self, n: usize) -> Vec<f64> {
        let mut w: Vec<f64> = (0..n).map(|_| self.exponential()).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        w
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

/// Matrix of i.i.d. complex standard normals.
pub fn random_ginibre(rng: &mut RngStream, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| rng.complex_normal()).collect();
    ComplexMatrix::from_vec_unchecked(rows, cols, data)
}

/// Haar-random unit vector in `C^d` (normalized Ginibre column).
pub fn random_haar_vector(rng: &mut RngStream, d: usize) -> ComplexMatrix {
    let g = random_ginibre(rng, d, 1);
    let n = g.norm();
    g.scale_real(1.0 / n)
}

/// Hermitian matrix `(G + G†)/2`.
pub fn random_hermitian(rng: &mut RngStream, d: usize) -> ComplexMatrix {
    random_ginibre(rng, d, d).hermitian_part()
}

/// Density matrix `G G† / tr(G G†)` with `G` of size `d x k`.
pub fn random_density(rng: &mut RngStream, d: usize, k: usize) -> ComplexMatrix {
    let g = random_ginibre(rng, d, k);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m.scale_real(1.0 / tr).hermitian_part()
}

/// Haar-random unitary: Gram–Schmidt on a Ginibre matrix, phases fixed by
/// the positive diagonal of R.
pub fn random_unitary(rng: &mut RngStream, d: usize) -> ComplexMatrix {
    let g = random_ginibre(rng, d, d);
    let mut q = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let mut col: Vec<C64> = (0..d).map(|i| g[(i, j)]).collect();
        for _ in 0..2 {
            for k in 0..j {
                let proj: C64 = (0..d).map(|i| q[(i, k)].conj() * col[i]).sum();
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= proj * q[(i, k)];
                }
            }
        }
        let n = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (i, c) in col.iter().enumerate() {
            q[(i, j)] = c / n;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_stream_reproduce_bits() {
        let a = random_ginibre(&mut RngStream::new(42, 0), 3, 4);
        let b = random_ginibre(&mut RngStream::new(42, 0), 3, 4);
        let bits = |m: &ComplexMatrix| -> Vec<(u64, u64)> {
            m.data().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
        };
        assert_eq!(bits(&a), bits(&b));
        let c = random_ginibre(&mut RngStream::new(42, 1), 3, 4);
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn haar_vector_is_normalized() {
        let mut rng = RngStream::new(1, 0);
        for d in [1, 2, 7, 30] {
            assert!((random_haar_vector(&mut rng, d).norm() - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn ginibre_second_moment() {
        let mut rng = RngStream::new(2024, 0);
        let n = 100_000;
        let m = random_ginibre(&mut rng, n, 1);
        let mean = m.data().iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean - 2.0).abs() <= 0.05 * 2.0, "mean |z|^2 = {mean}");
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = RngStream::new(8, 0);
        let u = random_unitary(&mut rng, 5);
        assert!(u.adjoint_mul(&u).approx_eq(&ComplexMatrix::identity(5), 1e-13));
    }

    #[test]
    fn dirichlet_weights_sum_to_one() {
        let mut rng = RngStream::new(4, 2);
        let w = rng.dirichlet_uniform(6);
        assert!(w.iter().all(|&x| x > 0.0));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
