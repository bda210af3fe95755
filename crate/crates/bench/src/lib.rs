//! Seeded inputs shared by the benchmarks.

use qtime_core::mat::{random_density, random_hermitian};
use qtime_core::states::random_separable;
use qtime_core::{BipartiteState, ComplexMatrix, RngStream};

pub fn hermitian(d: usize) -> ComplexMatrix {
    random_hermitian(&mut RngStream::new(1, d as u64), d)
}

/// Full-rank random state on `d_a ⊗ d_b`.
pub fn mixed_state(d_a: usize, d_b: usize) -> BipartiteState {
    let n = d_a * d_b;
    BipartiteState::new(random_density(&mut RngStream::new(2, n as u64), n, n), d_a, d_b).expect("valid state")
}

pub fn separable_state(d_a: usize, d_b: usize, terms: usize) -> BipartiteState {
    random_separable(&mut RngStream::new(3, (d_a * d_b) as u64), d_a, d_b, terms)
        .expect("valid decomposition")
        .0
}
