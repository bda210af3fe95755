//! Bipartite density matrices, Schmidt decomposition, purification, and the
//! state families used in experiments.

use crate::error::{QtError, Result};
use crate::mat::{
    herm_eig, kron, partial_trace, partial_transpose, random_density, random_haar_vector, ComplexMatrix, RngStream,
    Subsystem, C64, ZERO,
};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Positivity slack absorbing eigensolver noise.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Schmidt coefficients at or below this are treated as zero.
pub const SCHMIDT_RANK_TOL: f64 = 1e-10;

/// Density matrix on `C^{dA} ⊗ C^{dB}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    d_a: usize,
    d_b: usize,
    rho: ComplexMatrix,
}

/// Checks the density-matrix invariants, returning the Hermitian part.
pub(crate) fn validate_density(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.check_square("density matrix")?;
    let scale = m.frob_norm().max(1.0);
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(QtError::NotHermitian { defect });
    }
    let h = m.hermitian_part();
    let trace = h.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(QtError::TraceViolation { trace });
    }
    let min_eig = herm_eig(&h)?.min();
    if min_eig < -POSITIVITY_TOL {
        return Err(QtError::PositivityViolation { min_eig });
    }
    Ok(h)
}

impl BipartiteState {
    /// Validates Hermiticity, unit trace, and positivity.
    pub fn new(rho: ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        let n = d_a * d_b;
        if d_a == 0 || d_b == 0 || rho.dims() != (n, n) {
            return Err(QtError::InvalidDimensions(format!(
                "state for dA={d_a}, dB={d_b} must be {n}x{n}, got {}x{}",
                rho.rows(),
                rho.cols()
            )));
        }
        let rho = validate_density(&rho)?;
        Ok(Self { d_a, d_b, rho })
    }

    pub fn from_pure(psi: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        check_unit_vector(psi, d_a * d_b)?;
        Self::new(ComplexMatrix::outer(psi), d_a, d_b)
    }

    pub fn product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        let a = validate_density(a)?;
        let b = validate_density(b)?;
        Self::new(kron(&a, &b), a.rows(), b.rows())
    }

    pub fn maximally_mixed(d_a: usize, d_b: usize) -> Self {
        let n = d_a * d_b;
        Self {
            d_a,
            d_b,
            rho: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
        }
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_rho(self) -> ComplexMatrix {
        self.rho
    }

    /// `ρ^{T_A}` (or `ρ^{T_B}`).
    pub fn partial_transpose(&self, which: Subsystem) -> ComplexMatrix {
        partial_transpose(&self.rho, self.d_a, self.d_b, which).expect("dimensions validated")
    }

    /// Reduced state on the factor that is kept when `traced` is removed.
    pub fn reduced(&self, traced: Subsystem) -> ComplexMatrix {
        partial_trace(&self.rho, self.d_a, self.d_b, traced).expect("dimensions validated")
    }

    /// Numerical rank: eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        herm_eig(&self.rho).map_or(0, |e| e.values.iter().filter(|&&l| l > tol).count())
    }

    /// Leading eigenvector when the state is pure within `tol`.
    pub fn pure_vector(&self, tol: f64) -> Option<ComplexMatrix> {
        let e = herm_eig(&self.rho).ok()?;
        let n = e.dim();
        if e.max() < 1.0 - tol {
            return None;
        }
        Some(e.vectors.col(n - 1))
    }
}

fn check_unit_vector(psi: &ComplexMatrix, len: usize) -> Result<()> {
    if psi.cols() != 1 || psi.rows() != len {
        return Err(QtError::InvalidDimensions(format!(
            "expected a column vector of length {len}, got {}x{}",
            psi.rows(),
            psi.cols()
        )));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(QtError::NotUnitVector { norm });
    }
    Ok(())
}

/// `|ψ⟩ = Σ_i α_i |u_i⟩ ⊗ |w_i⟩` with `α` descending and strictly positive.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub d_a: usize,
    pub d_b: usize,
    pub coefficients: Vec<f64>,
    /// `dA x rank`, orthonormal columns.
    pub left: ComplexMatrix,
    /// `dB x rank`, orthonormal columns.
    pub right: ComplexMatrix,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut psi = ComplexMatrix::zeros(self.d_a * self.d_b, 1);
        for (k, &alpha) in self.coefficients.iter().enumerate() {
            psi += &kron(&self.left.col(k), &self.right.col(k)).scale_real(alpha);
        }
        psi
    }
}

/// Schmidt decomposition of a unit vector on `C^{dA} ⊗ C^{dB}`.
///
/// The coefficient matrix `M[i,k] = ψ[i·dB + k]` is diagonalized through its
/// Hermitian dilation `[[0, M], [M†, 0]]`, whose spectrum is `±α_i` plus
/// zeros. Coefficients then carry absolute accuracy near machine epsilon,
/// which a square root of the reduced-state spectrum cannot offer.
pub fn schmidt_decompose(psi: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<SchmidtDecomposition> {
    if d_a == 0 || d_b == 0 {
        return Err(QtError::InvalidDimensions("factor dimensions must be positive".into()));
    }
    check_unit_vector(psi, d_a * d_b)?;
    let n = d_a + d_b;
    let dilation = ComplexMatrix::from_fn(n, n, |r, c| match (r < d_a, c < d_a) {
        (true, false) => psi[(r * d_b + (c - d_a), 0)],
        (false, true) => psi[(c * d_b + (r - d_a), 0)].conj(),
        _ => ZERO,
    });
    let eig = herm_eig(&dilation)?;

    // Eigen order is ascending; sort descending with a stable sort so equal
    // coefficients keep the lower eigen index first.
    let mut order: Vec<usize> = (0..n).filter(|&k| eig.values[k] > SCHMIDT_RANK_TOL).collect();
    order.sort_by(|&i, &j| eig.values[j].total_cmp(&eig.values[i]));

    let rank = order.len();
    let sqrt2 = std::f64::consts::SQRT_2;
    let left = ComplexMatrix::from_fn(d_a, rank, |i, k| eig.vectors[(i, order[k])] * sqrt2);
    // Eigenvector (x; y) satisfies M y = α x, so ψ = Σ α x ⊗ conj(y) after rescaling.
    let right = ComplexMatrix::from_fn(d_b, rank, |i, k| eig.vectors[(d_a + i, order[k])].conj() * sqrt2);
    let coefficients = order.iter().map(|&k| eig.values[k]).collect();
    Ok(SchmidtDecomposition {
        d_a,
        d_b,
        coefficients,
        left,
        right,
    })
}

/// Predicted nonzero spectrum of `(|ψ⟩⟨ψ|)^{T_A}`: `α_i²` and `±α_i α_j`
/// (`i < j`), ascending.
pub fn pure_ppt_spectrum(schmidt: &SchmidtDecomposition) -> Vec<f64> {
    let a = &schmidt.coefficients;
    let mut out: Vec<f64> = a.iter().map(|x| x * x).collect();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            out.push(a[i] * a[j]);
            out.push(-a[i] * a[j]);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Pads a spectrum with zeros to `dim` entries, ascending.
pub fn pad_spectrum(values: &[f64], dim: usize) -> Vec<f64> {
    let mut out = values.to_vec();
    out.resize(dim.max(values.len()), 0.0);
    out.sort_by(f64::total_cmp);
    out
}

/// Purification `|ψ⟩ = Σ_i √λ_i |v_i⟩ ⊗ |i⟩` on `C^d ⊗ C^d`.
pub fn purify(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rho = validate_density(rho)?;
    let d = rho.rows();
    let eig = herm_eig(&rho)?;
    let mut psi = ComplexMatrix::zeros(d * d, 1);
    // Largest eigenvalue first, so a pure |v⟩⟨v| purifies to |v⟩⊗|0⟩.
    for (i, k) in (0..d).rev().enumerate() {
        let w = eig.values[k].max(0.0).sqrt();
        for a in 0..d {
            psi[(a * d + i, 0)] = eig.vectors[(a, k)] * w;
        }
    }
    let n = psi.norm();
    Ok(psi.scale_real(1.0 / n))
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QtError::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Two-qubit Werner state `p|ψ⁻⟩⟨ψ⁻| + (1−p) I/4`, `|ψ⁻⟩ = (|01⟩ − |10⟩)/√2`.
pub fn werner_state(d: usize, p: f64) -> Result<BipartiteState> {
    if d != 2 {
        return Err(QtError::InvalidParameter(format!("werner_state supports d = 2 only, got {d}")));
    }
    check_probability(p)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = ComplexMatrix::column(&[ZERO, C64::new(s, 0.0), C64::new(-s, 0.0), ZERO]);
    let rho = &ComplexMatrix::outer(&singlet).scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    BipartiteState::new(rho, 2, 2)
}

/// Maximally entangled vector `Σ_i |ii⟩ / √d`.
pub fn max_entangled_vector(d: usize) -> ComplexMatrix {
    let s = 1.0 / (d as f64).sqrt();
    let mut v = ComplexMatrix::zeros(d * d, 1);
    for i in 0..d {
        v[(i * d + i, 0)] = C64::new(s, 0.0);
    }
    v
}

/// Isotropic state `p|Φ⟩⟨Φ| + (1−p) I/d²`.
pub fn isotropic_state(d: usize, p: f64) -> Result<BipartiteState> {
    if d == 0 {
        return Err(QtError::InvalidParameter("d must be positive".into()));
    }
    check_probability(p)?;
    let n = d * d;
    let rho = &ComplexMatrix::outer(&max_entangled_vector(d)).scale_real(p)
        + &ComplexMatrix::identity(n).scale_real((1.0 - p) / n as f64);
    BipartiteState::new(rho, d, d)
}

/// Reduced state of a Haar vector on `C^{dA} ⊗ C^{dB} ⊗ C^k`.
pub fn random_induced_state(rng: &mut RngStream, d_a: usize, d_b: usize, k: usize) -> Result<BipartiteState> {
    if d_a == 0 || d_b == 0 || k == 0 {
        return Err(QtError::InvalidParameter("dimensions and k must be positive".into()));
    }
    let n = d_a * d_b;
    let psi = random_haar_vector(rng, n * k);
    let rho = partial_trace(&ComplexMatrix::outer(&psi), n, k, Subsystem::B)?;
    BipartiteState::new(rho.hermitian_part(), d_a, d_b)
}

/// Convex combination `Σ_k p_k a_k ⊗ b_k` of product states.
#[derive(Debug, Clone)]
pub struct SeparableDecomposition {
    pub d_a: usize,
    pub d_b: usize,
    pub weights: Vec<f64>,
    pub a_factors: Vec<ComplexMatrix>,
    pub b_factors: Vec<ComplexMatrix>,
    /// Frobenius distance between the mixture and the state it stands for.
    pub residual: f64,
}

impl SeparableDecomposition {
    /// Validates weights and factors; `residual` is measured against `target`.
    pub fn new(
        weights: Vec<f64>,
        a_factors: Vec<ComplexMatrix>,
        b_factors: Vec<ComplexMatrix>,
        target: &ComplexMatrix,
    ) -> Result<Self> {
        let m = weights.len();
        if m == 0 || a_factors.len() != m || b_factors.len() != m {
            return Err(QtError::InvalidParameter(
                "decomposition needs equally many weights and factors".into(),
            ));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(QtError::InvalidParameter("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(QtError::InvalidParameter(format!("weights sum to {total}, expected 1")));
        }
        let d_a = a_factors[0].rows();
        let d_b = b_factors[0].rows();
        for (a, b) in a_factors.iter().zip(&b_factors) {
            if a.dims() != (d_a, d_a) || b.dims() != (d_b, d_b) {
                return Err(QtError::InvalidDimensions("factor dimensions differ".into()));
            }
        }
        let mut dec = Self {
            d_a,
            d_b,
            weights,
            a_factors,
            b_factors,
            residual: 0.0,
        };
        target.check_same_dims(&ComplexMatrix::zeros(d_a * d_b, d_a * d_b), "decomposition target")?;
        dec.residual = (&dec.mixture() - target).frob_norm();
        Ok(dec)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mixture(&self) -> ComplexMatrix {
        let n = self.d_a * self.d_b;
        let mut sigma = ComplexMatrix::zeros(n, n);
        for ((w, a), b) in self.weights.iter().zip(&self.a_factors).zip(&self.b_factors) {
            sigma += &kron(a, b).scale_real(*w);
        }
        sigma
    }

    pub fn residual_to(&self, rho: &ComplexMatrix) -> f64 {
        (&self.mixture() - rho).frob_norm()
    }
}

/// Separable state with `m` terms: flat-Dirichlet weights and factors drawn
/// from the Hilbert–Schmidt (square Ginibre) ensemble.
pub fn random_separable(
    rng: &mut RngStream,
    d_a: usize,
    d_b: usize,
    m: usize,
) -> Result<(BipartiteState, SeparableDecomposition)> {
    if d_a == 0 || d_b == 0 || m == 0 {
        return Err(QtError::InvalidParameter("dimensions and m must be positive".into()));
    }
    let weights = rng.dirichlet_uniform(m);
    let mut a_factors = Vec::with_capacity(m);
    let mut b_factors = Vec::with_capacity(m);
    for _ in 0..m {
        a_factors.push(random_density(rng, d_a, d_a));
        b_factors.push(random_density(rng, d_b, d_b));
    }
    let n = d_a * d_b;
    let mut dec = SeparableDecomposition::new(weights, a_factors, b_factors, &ComplexMatrix::zeros(n, n))?;
    let state = BipartiteState::new(dec.mixture().hermitian_part(), d_a, d_b)?;
    dec.residual = dec.residual_to(state.rho());
    Ok((state, dec))
}

/// 3x3 bound-entangled state `(I − Σ_k |w_k⟩⟨w_k|)/4` from the five-member
/// "tiles" unextendible product basis.
pub fn tiles_upb_state() -> BipartiteState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |v: [f64; 3]| ComplexMatrix::column(&v.map(|x| C64::new(x, 0.0)));
    let third = 1.0 / 3f64.sqrt();
    let pairs = [
        (ket([1.0, 0.0, 0.0]), ket([s, -s, 0.0])),
        (ket([s, -s, 0.0]), ket([0.0, 0.0, 1.0])),
        (ket([0.0, 0.0, 1.0]), ket([0.0, s, -s])),
        (ket([0.0, s, -s]), ket([1.0, 0.0, 0.0])),
        (ket([third; 3]), ket([third; 3])),
    ];
    let mut rho = ComplexMatrix::identity(9);
    for (a, b) in &pairs {
        rho -= &ComplexMatrix::outer(&kron(a, b));
    }
    BipartiteState::new(rho.scale_real(0.25).hermitian_part(), 3, 3).expect("tiles state is a valid state")
}
