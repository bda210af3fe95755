//! Channels stored as Choi matrices, the Choi–Jamiołkowski correspondence in
//! both directions, and the dilations built on top of it: Kraus, Stinespring,
//! Holevo (measure-and-prepare), Naimark, and the commutative-image dilation
//! of an entanglement-breaking channel.
//!
//! Convention: `choi = Σ_ij E_ij ⊗ φ(E_ij)`, so `φ(E_ij)` is the `(i, j)`
//! block of size `dB` and a state `ρ` is literally the Choi matrix of
//! `φ_ρ(a) = tr_A[ρ (aᵀ ⊗ 1)] = Σ_ij a_ij ρ_ij`.

use crate::error::{QtError, Result};
use crate::linmap::{Domain, LinearMapOnAlgebra};
use crate::mat::ops::partial_transpose_unchecked;
use crate::mat::{herm_eig, kron, sqrt_psd, ComplexMatrix, Subsystem, C64, ONE, ZERO};
use crate::states::{BipartiteState, SeparableDecomposition};

pub const CHOI_HERMITIAN_TOL: f64 = 1e-10;
/// Slack on the minimum Choi eigenvalue for complete positivity.
pub const CP_TOL: f64 = 1e-9;
/// Choi eigenvalues at or below this are dropped from Kraus sets.
pub const KRAUS_RANK_TOL: f64 = 1e-10;
pub const ZERO_TRACE_TOL: f64 = 1e-12;
pub const SAME_CHANNEL_TOL: f64 = 1e-8;
/// Default bound on the decomposition and reconstruction residual of a Holevo form.
pub const HOLEVO_TOL: f64 = 1e-9;
pub const POVM_ELEMENT_TOL: f64 = 1e-10;
pub const POVM_COMPLETION_TOL: f64 = 1e-9;
pub const DILATION_RECONSTRUCTION_TOL: f64 = 1e-8;

/// Map `M_{dA} → M_{dB}` stored as its (Hermitian) Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    d_a: usize,
    d_b: usize,
    choi: ComplexMatrix,
}

impl Channel {
    /// Accepts a Choi matrix that is Hermitian within `1e-10` relative and
    /// stores its Hermitian part.
    pub fn from_choi(choi: ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        let n = d_a * d_b;
        if d_a == 0 || d_b == 0 || choi.dims() != (n, n) {
            return Err(QtError::InvalidDimensions(format!(
                "Choi matrix for dA={d_a}, dB={d_b} must be {n}x{n}, got {}x{}",
                choi.rows(),
                choi.cols()
            )));
        }
        let defect = choi.hermiticity_defect();
        if defect > CHOI_HERMITIAN_TOL * choi.frob_norm().max(1.0) {
            return Err(QtError::NotHermitian { defect });
        }
        let choi = if defect == 0.0 { choi } else { choi.hermitian_part() };
        Ok(Self { d_a, d_b, choi })
    }

    /// Tabulates a Hermiticity-preserving linear map into a channel.
    pub fn from_linear_map(map: &LinearMapOnAlgebra) -> Result<Self> {
        let assembly = state_from_channel(map);
        Self::from_choi(assembly.choi, map.d_in(), map.d_out())
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn into_choi(self) -> ComplexMatrix {
        self.choi
    }

    /// `φ(E_ij)`.
    pub fn basis_value(&self, i: usize, j: usize) -> ComplexMatrix {
        self.choi.block(i, j, self.d_b)
    }

    /// `φ(a) = Σ_ij a_ij φ(E_ij)`.
    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(a.dims(), (self.d_a, self.d_a), "channel input dimension mismatch");
        let db = self.d_b;
        let mut out = ComplexMatrix::zeros(db, db);
        for i in 0..self.d_a {
            for j in 0..self.d_a {
                let c = a[(i, j)];
                if c == ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        out[(k, l)] += c * self.choi[(i * db + k, j * db + l)];
                    }
                }
            }
        }
        out
    }

    pub fn min_choi_eigenvalue(&self) -> Result<f64> {
        Ok(herm_eig(&self.choi)?.min())
    }

    /// Choi's theorem: completely positive iff the Choi matrix is PSD.
    pub fn is_completely_positive(&self) -> Result<bool> {
        Ok(self.min_choi_eigenvalue()? >= -CP_TOL)
    }

    pub fn to_linear_map(&self) -> LinearMapOnAlgebra {
        let d = self.d_a;
        let values = (0..d * d).map(|k| self.basis_value(k / d, k % d)).collect();
        LinearMapOnAlgebra::new(d, self.d_b, values).expect("block dimensions are consistent")
    }

    /// `max_ij ‖φ(E_ij) − f(E_ij)‖_F`.
    pub fn max_basis_defect(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.d_a {
            for j in 0..self.d_a {
                let e = ComplexMatrix::unit(self.d_a, i, j);
                worst = worst.max((&self.basis_value(i, j) - &f(&e)).frob_norm());
            }
        }
        worst
    }
}

/// `φ_ρ` with Choi matrix equal to `ρ` (an exact copy).
pub fn channel_from_state(rho: &BipartiteState) -> Channel {
    Channel {
        d_a: rho.d_a(),
        d_b: rho.d_b(),
        choi: rho.rho().clone(),
    }
}

/// Unnormalized Choi assembly `Σ_ij E_ij ⊗ φ(E_ij)` with its trace.
#[derive(Debug, Clone)]
pub struct ChoiAssembly {
    pub d_a: usize,
    pub d_b: usize,
    pub choi: ComplexMatrix,
    pub trace: C64,
}

impl ChoiAssembly {
    /// `choi / tr(choi)`.
    pub fn normalized(&self) -> Result<ComplexMatrix> {
        if self.trace.norm() <= ZERO_TRACE_TOL {
            return Err(QtError::ZeroTrace);
        }
        Ok(self.choi.scale(ONE / self.trace))
    }

    /// The normalized assembly as a validated state.
    pub fn to_state(&self) -> Result<BipartiteState> {
        BipartiteState::new(self.normalized()?, self.d_a, self.d_b)
    }
}

pub fn state_from_channel(map: &LinearMapOnAlgebra) -> ChoiAssembly {
    let (da, db) = (map.d_in(), map.d_out());
    let mut choi = ComplexMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for j in 0..da {
            let v = map.basis_value(i, j);
            for k in 0..db {
                for l in 0..db {
                    choi[(i * db + k, j * db + l)] = v[(k, l)];
                }
            }
        }
    }
    let trace = choi.trace();
    ChoiAssembly {
        d_a: da,
        d_b: db,
        choi,
        trace,
    }
}

/// Channel whose Choi matrix is the partial transpose on A; its action is
/// `E_ij ↦ φ(E_ij)†`.
pub fn adjoint_channel(phi: &Channel) -> Channel {
    Channel {
        d_a: phi.d_a,
        d_b: phi.d_b,
        choi: partial_transpose_unchecked(&phi.choi, phi.d_a, phi.d_b, Subsystem::A),
    }
}

/// Kraus operators `K_i: C^{dA} → C^{dB}` with `φ(a) = Σ_i K_i a K_i†`.
#[derive(Debug, Clone)]
pub struct KrausSet {
    d_a: usize,
    d_b: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(QtError::InvalidDimensions("Kraus dimensions must be positive".into()));
        }
        if let Some(k) = operators.iter().find(|k| k.dims() != (d_b, d_a)) {
            return Err(QtError::InvalidDimensions(format!(
                "Kraus operator is {}x{}, expected {d_b}x{d_a}",
                k.rows(),
                k.cols()
            )));
        }
        Ok(Self { d_a, d_b, operators })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_b, self.d_b);
        for k in &self.operators {
            out += &k.matmul(a).matmul(&k.adjoint());
        }
        out
    }

    /// `Σ_i |k_i⟩⟨k_i|` with `k_i = Σ_j |j⟩ ⊗ K_i|j⟩`.
    pub fn choi(&self) -> ComplexMatrix {
        let (da, db) = (self.d_a, self.d_b);
        let mut choi = ComplexMatrix::zeros(da * db, da * db);
        for k in &self.operators {
            let vec: Vec<C64> = (0..da * db).map(|r| k[(r % db, r / db)]).collect();
            choi += &ComplexMatrix::outer(&ComplexMatrix::column(&vec));
        }
        choi
    }

    /// `max_ij ‖φ(E_ij) − Σ_i K_i E_ij K_i†‖_F`.
    pub fn reconstruction_residual(&self, phi: &Channel) -> f64 {
        phi.max_basis_defect(|e| self.apply(e))
    }
}

/// Kraus operators from the eigendecomposition of a PSD Choi matrix:
/// `K[b, i] = √λ · v[i·dB + b]` for every eigenvalue `λ > 1e-10`.
pub fn kraus_from_choi(phi: &Channel) -> Result<KrausSet> {
    let eig = herm_eig(&phi.choi)?;
    if eig.min() < -CP_TOL {
        return Err(QtError::NotCompletelyPositive { min_eig: eig.min() });
    }
    let (da, db) = (phi.d_a, phi.d_b);
    let mut operators = Vec::new();
    for (n, &lambda) in eig.values.iter().enumerate().rev() {
        if lambda <= KRAUS_RANK_TOL {
            continue;
        }
        let s = lambda.sqrt();
        operators.push(ComplexMatrix::from_fn(db, da, |b, i| eig.vectors[(i * db + b, n)] * s));
    }
    KrausSet::new(operators, da, db)
}

/// Stinespring triple with `K = C^r ⊗ C^{dA}`, `Φ(a) = 1_r ⊗ a` and
/// `v: C^{dB} → K`, so that `φ(a) = v†Φ(a)v`.
#[derive(Debug, Clone)]
pub struct StinespringDilation {
    d_a: usize,
    d_b: usize,
    r: usize,
    v: ComplexMatrix,
}

impl StinespringDilation {
    pub fn new(v: ComplexMatrix, r: usize, d_a: usize, d_b: usize) -> Result<Self> {
        if r == 0 || d_a == 0 || d_b == 0 || v.dims() != (r * d_a, d_b) {
            return Err(QtError::InvalidDimensions(format!(
                "Stinespring map must be {}x{d_b}, got {}x{}",
                r * d_a,
                v.rows(),
                v.cols()
            )));
        }
        Ok(Self { d_a, d_b, r, v })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// Multiplicity `r` of the representation.
    pub fn multiplicity(&self) -> usize {
        self.r
    }

    /// Dimension of `K`.
    pub fn dilation_dim(&self) -> usize {
        self.r * self.d_a
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    /// `v_i = ⟨i| ⊗ 1 · v`, the `dA x dB` slices; `K_i = v_i†`.
    pub fn slice(&self, i: usize) -> ComplexMatrix {
        let idx: Vec<usize> = (i * self.d_a..(i + 1) * self.d_a).collect();
        self.v.select_rows(&idx)
    }

    /// `Φ(a) = 1_r ⊗ a`.
    pub fn represent(&self, a: &ComplexMatrix) -> ComplexMatrix {
        kron(&ComplexMatrix::identity(self.r), a)
    }

    pub fn representation_map(&self) -> LinearMapOnAlgebra {
        LinearMapOnAlgebra::from_fn(self.d_a, self.dilation_dim(), |a| self.represent(a))
            .expect("dilation dimensions are positive")
    }

    /// `v†(1_r ⊗ a)v`, evaluated slice by slice.
    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_b, self.d_b);
        for i in 0..self.r {
            let vi = self.slice(i);
            out += &vi.adjoint_mul(&a.matmul(&vi));
        }
        out
    }

    /// `‖v†v − 1‖_F`; zero exactly when the channel is unital on `1_A`.
    pub fn isometry_defect(&self) -> f64 {
        (&self.v.adjoint_mul(&self.v) - &ComplexMatrix::identity(self.d_b)).frob_norm()
    }

    pub fn kraus_set(&self) -> KrausSet {
        let ops = (0..self.r).map(|i| self.slice(i).adjoint()).collect();
        KrausSet::new(ops, self.d_a, self.d_b).expect("slice dimensions are consistent")
    }

    /// `max_ij ‖φ(E_ij) − v†(1_r ⊗ E_ij)v‖_F`.
    pub fn reconstruction_residual(&self, phi: &Channel) -> f64 {
        phi.max_basis_defect(|e| self.apply(e))
    }

    /// Columns `Φ(E_ij) v |b⟩` over all `(i, j, b)`: a spanning set of the
    /// subspace `Φ(A) v H_B` that any two dilations must identify.
    fn reachable_vectors(&self) -> ComplexMatrix {
        let (da, db, r) = (self.d_a, self.d_b, self.r);
        let mut s = ComplexMatrix::zeros(r * da, da * da * db);
        for i in 0..da {
            for j in 0..da {
                for b in 0..db {
                    let col = (i * da + j) * db + b;
                    for block in 0..r {
                        s[(block * da + i, col)] = self.v[(block * da + j, b)];
                    }
                }
            }
        }
        s
    }
}

/// `v = Σ_i |i⟩ ⊗ K_i†`.
pub fn stinespring_from_kraus(ks: &KrausSet) -> Result<StinespringDilation> {
    if ks.is_empty() {
        return Err(QtError::InvalidParameter("Stinespring dilation needs at least one Kraus operator".into()));
    }
    let (da, db, r) = (ks.d_a, ks.d_b, ks.len());
    let mut v = ComplexMatrix::zeros(r * da, db);
    for (i, k) in ks.operators.iter().enumerate() {
        for a in 0..da {
            for b in 0..db {
                v[(i * da + a, b)] = k[(b, a)].conj();
            }
        }
    }
    StinespringDilation::new(v, r, da, db)
}

/// Partial isometry `W: K₁ → K₂` with `W Φ₁(a) v₁ = Φ₂(a) v₂`.
#[derive(Debug, Clone)]
pub struct DilationRelation {
    pub w: ComplexMatrix,
    /// `max ‖W Φ₁(E_ij)v₁|b⟩ − Φ₂(E_ij)v₂|b⟩‖` over basis units and `b`.
    pub residual: f64,
}

impl DilationRelation {
    /// `‖W W† W − W‖_F`.
    pub fn partial_isometry_defect(&self) -> f64 {
        let w = &self.w;
        (&w.matmul(&w.adjoint_mul(w)) - w).frob_norm()
    }
}

/// Least-squares intertwiner `W = S₂ S₁⁺` between two dilations of the same
/// channel, where `S_n` collects the vectors `Φ_n(E_ij) v_n |b⟩`.
pub fn dilation_unitary_relation(d1: &StinespringDilation, d2: &StinespringDilation) -> Result<DilationRelation> {
    if (d1.d_a, d1.d_b) != (d2.d_a, d2.d_b) {
        return Err(QtError::InvalidDimensions("dilations act between different algebras".into()));
    }
    let da = d1.d_a;
    let mut defect: f64 = 0.0;
    for i in 0..da {
        for j in 0..da {
            let e = ComplexMatrix::unit(da, i, j);
            defect = defect.max((&d1.apply(&e) - &d2.apply(&e)).frob_norm());
        }
    }
    if defect > SAME_CHANNEL_TOL {
        return Err(QtError::NotSameChannel { defect });
    }
    let s1 = d1.reachable_vectors();
    let s2 = d2.reachable_vectors();
    let gram = s1.matmul(&s1.adjoint());
    let eig = herm_eig(&gram)?;
    let cutoff = 1e-10 * eig.max().max(1.0);
    let gram_pinv = eig.reconstruct_with(|l| if l > cutoff { C64::new(1.0 / l, 0.0) } else { ZERO });
    let w = s2.matmul(&s1.adjoint()).matmul(&gram_pinv);
    let diff = &w.matmul(&s1) - &s2;
    let residual = (0..diff.cols()).map(|c| diff.col(c).norm()).fold(0.0, f64::max);
    Ok(DilationRelation { w, residual })
}

/// Measure-and-prepare form `φ(a) = Σ_k tr[F_k a] E_k` of an
/// entanglement-breaking channel.
#[derive(Debug, Clone)]
pub struct HolevoForm {
    d_a: usize,
    d_b: usize,
    /// `F_k ≥ 0`, summing to the transposed reduced state (at most `1`).
    povm: Vec<ComplexMatrix>,
    /// Unit-trace `E_k`.
    states: Vec<ComplexMatrix>,
    /// `w_k = tr F_k`.
    weights: Vec<f64>,
    /// `X_k = √w_k · √E_k`, so `X_k†X_k = w_k E_k`.
    factors: Vec<ComplexMatrix>,
    /// The decomposition's mixture, i.e. the Choi matrix being represented.
    reference: ComplexMatrix,
    /// Decomposition residual plus `‖Σ_k F_kᵀ ⊗ E_k − mixture‖_F`.
    residual: f64,
}

impl HolevoForm {
    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn len(&self) -> usize {
        self.povm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.povm.is_empty()
    }

    pub fn povm(&self) -> &[ComplexMatrix] {
        &self.povm
    }

    pub fn states(&self) -> &[ComplexMatrix] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn factors(&self) -> &[ComplexMatrix] {
        &self.factors
    }

    pub fn reference(&self) -> &ComplexMatrix {
        &self.reference
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `Σ_k F_kᵀ ⊗ E_k`.
    pub fn choi(&self) -> ComplexMatrix {
        let n = self.d_a * self.d_b;
        let mut choi = ComplexMatrix::zeros(n, n);
        for (f, e) in self.povm.iter().zip(&self.states) {
            choi += &kron(&f.transpose(), e);
        }
        choi
    }

    /// `Σ_k tr[F_k a] E_k`.
    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_b, self.d_b);
        for (f, e) in self.povm.iter().zip(&self.states) {
            out += &e.scale(f.matmul(a).trace());
        }
        out
    }

    /// Kraus operators `√E_k |n⟩⟨f|` for every eigenvector `|f⟩` (scaled by
    /// the square root of its eigenvalue) of `F_k` and every basis index `n`.
    pub fn kraus_set(&self) -> Result<KrausSet> {
        let mut ops = Vec::new();
        for (f, e) in self.povm.iter().zip(&self.states) {
            let root_e = sqrt_psd(e)?;
            let eig = herm_eig(f)?;
            for (m, &mu) in eig.values.iter().enumerate() {
                if mu <= KRAUS_RANK_TOL {
                    continue;
                }
                let bra = eig.vectors.col(m).scale_real(mu.sqrt()).adjoint();
                for n in 0..self.d_b {
                    ops.push(root_e.col(n).matmul(&bra));
                }
            }
        }
        KrausSet::new(ops, self.d_a, self.d_b)
    }
}

/// Holevo form of `Σ_k p_k a_k ⊗ b_k` with `F_k = p_k a_kᵀ`, `E_k = b_k`;
/// requires the decomposition residual to be at most `1e-9`.
pub fn holevo_from_separable(dec: &SeparableDecomposition) -> Result<HolevoForm> {
    holevo_from_separable_with_tolerance(dec, HOLEVO_TOL)
}

/// As [`holevo_from_separable`] with an explicit residual bound.
pub fn holevo_from_separable_with_tolerance(dec: &SeparableDecomposition, tol: f64) -> Result<HolevoForm> {
    if !(dec.residual <= tol) {
        return Err(QtError::CertificateFailure {
            stage: "decomposition",
            residual: dec.residual,
        });
    }
    let mut povm = Vec::new();
    let mut states = Vec::new();
    let mut weights = Vec::new();
    let mut factors = Vec::new();
    for ((&p, a), b) in dec.weights.iter().zip(&dec.a_factors).zip(&dec.b_factors) {
        if p == 0.0 {
            continue;
        }
        let tb = b.trace().re;
        let f = a.transpose().scale_real(p * tb).hermitian_part();
        let e = b.scale_real(1.0 / tb).hermitian_part();
        let w = f.trace().re;
        factors.push(sqrt_psd(&e)?.scale_real(w.max(0.0).sqrt()));
        povm.push(f);
        states.push(e);
        weights.push(w);
    }
    let reference = dec.mixture();
    let mut form = HolevoForm {
        d_a: dec.d_a,
        d_b: dec.d_b,
        povm,
        states,
        weights,
        factors,
        reference,
        residual: 0.0,
    };
    form.residual = dec.residual + (&form.choi() - &form.reference).frob_norm();
    if !(form.residual <= tol) {
        return Err(QtError::CertificateFailure {
            stage: "holevo",
            residual: form.residual,
        });
    }
    Ok(form)
}

/// Completes `{F_1..F_K}` to a POVM by prepending `F_0 = 1 − Σ_k F_k`.
fn complete_povm(povm: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let d = match povm.first() {
        Some(f) => f.rows(),
        None => return Err(QtError::InvalidPovm("POVM has no elements".into())),
    };
    let mut sum = ComplexMatrix::zeros(d, d);
    let mut elements = Vec::with_capacity(povm.len() + 1);
    elements.push(ComplexMatrix::zeros(d, d));
    for (k, f) in povm.iter().enumerate() {
        if f.dims() != (d, d) {
            return Err(QtError::InvalidPovm(format!("element {} is not {d}x{d}", k + 1)));
        }
        let defect = f.hermiticity_defect();
        if defect > POVM_ELEMENT_TOL * f.frob_norm().max(1.0) {
            return Err(QtError::InvalidPovm(format!("element {} is not Hermitian (defect {defect:e})", k + 1)));
        }
        let f = f.hermitian_part();
        let min = herm_eig(&f)?.min();
        if min < -POVM_ELEMENT_TOL {
            return Err(QtError::InvalidPovm(format!("element {} has eigenvalue {min:e}", k + 1)));
        }
        sum += &f;
        elements.push(f);
    }
    let completion = (&ComplexMatrix::identity(d) - &sum).hermitian_part();
    let min = herm_eig(&completion)?.min();
    if min < -POVM_COMPLETION_TOL {
        return Err(QtError::InvalidPovm(format!(
            "elements sum beyond the identity (completion eigenvalue {min:e})"
        )));
    }
    elements[0] = completion;
    Ok(elements)
}

/// Naimark dilation `F_k = ṽ†π_kṽ` on `H_A ⊗ C^{K+1}` with
/// `π_k = 1 ⊗ |k⟩⟨k|`; outcome 0 is the completion `1 − Σ_k F_k`.
#[derive(Debug, Clone)]
pub struct NaimarkDilation {
    d: usize,
    povm: Vec<ComplexMatrix>,
    vtilde: ComplexMatrix,
}

impl NaimarkDilation {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of outcomes including the completion, `K + 1`.
    pub fn outcomes(&self) -> usize {
        self.povm.len()
    }

    /// `F_k`, with `F_0` the completion.
    pub fn element(&self, k: usize) -> &ComplexMatrix {
        &self.povm[k]
    }

    pub fn povm(&self) -> &[ComplexMatrix] {
        &self.povm
    }

    /// `ṽ`, of size `d(K+1) x d`, rows indexed by `a·(K+1) + k`.
    pub fn vtilde(&self) -> &ComplexMatrix {
        &self.vtilde
    }

    /// Diagonal of `π_k`.
    pub fn projection_diagonal(&self, k: usize) -> Vec<f64> {
        let n = self.outcomes();
        (0..self.d * n).map(|r| if r % n == k { 1.0 } else { 0.0 }).collect()
    }

    pub fn projection(&self, k: usize) -> ComplexMatrix {
        let diag = self.projection_diagonal(k);
        ComplexMatrix::diag_real(&diag)
    }

    /// `ṽ†π_kṽ`.
    pub fn compressed(&self, k: usize) -> ComplexMatrix {
        let n = self.outcomes();
        let rows: Vec<usize> = (0..self.d).map(|a| a * n + k).collect();
        let slice = self.vtilde.select_rows(&rows);
        slice.adjoint_mul(&slice)
    }

    /// `‖ṽ†ṽ − 1‖_F`.
    pub fn isometry_defect(&self) -> f64 {
        (&self.vtilde.adjoint_mul(&self.vtilde) - &ComplexMatrix::identity(self.d)).frob_norm()
    }

    /// `max_k ‖ṽ†π_kṽ − F_k‖_F`.
    pub fn povm_defect(&self) -> f64 {
        (0..self.outcomes())
            .map(|k| (&self.compressed(k) - &self.povm[k]).frob_norm())
            .fold(0.0, f64::max)
    }

    /// `max_{j,k} max_r |π_j π_k − δ_jk π_k|` on the diagonals.
    pub fn projection_defect(&self) -> f64 {
        diagonal_projection_defect(&(0..self.outcomes()).map(|k| self.projection_diagonal(k)).collect::<Vec<_>>())
    }
}

pub(crate) fn diagonal_projection_defect(projections: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, pj) in projections.iter().enumerate() {
        for (k, pk) in projections.iter().enumerate() {
            for (x, y) in pj.iter().zip(pk) {
                let target = if j == k { *y } else { 0.0 };
                worst = worst.max((x * y - target).abs());
            }
        }
    }
    worst
}

/// `ṽ|ψ⟩ = Σ_k (√F_k |ψ⟩) ⊗ |k⟩` after completing the POVM at index 0.
pub fn naimark_dilate(povm: &[ComplexMatrix]) -> Result<NaimarkDilation> {
    let povm = complete_povm(povm)?;
    let d = povm[0].rows();
    let n = povm.len();
    let mut vtilde = ComplexMatrix::zeros(d * n, d);
    for (k, f) in povm.iter().enumerate() {
        let root = sqrt_psd(f)?;
        for a in 0..d {
            for c in 0..d {
                vtilde[(a * n + k, c)] = root[(a, c)];
            }
        }
    }
    Ok(NaimarkDilation { d, povm, vtilde })
}

/// Residuals recorded by [`commutative_dilation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutativityCertificate {
    /// `max_{j,k} ‖[Φ(π_j), Φ(π_k)]‖`.
    pub image_commutator: f64,
    /// `max |Φ(π_j)Φ(π_k) − δ_jk Φ(π_k)|`.
    pub projector_orthogonality: f64,
    /// `max_{j,k} ‖Φ(π_jπ_k) − Φ(π_j)Φ(π_k)‖` for `Φ` and `Φ*` on `W`.
    pub homomorphism: f64,
    /// `max_k ‖Φ(π_k†) − Φ(π_k)†‖`.
    pub star: f64,
    /// `max_ij ‖Σ_k v†(1⊗|k⟩⟨k|)v · tr[F_k E_ij]/w_k − φ(E_ij)‖_F` against
    /// the decomposition's Choi matrix.
    pub channel_reconstruction: f64,
}

/// Stinespring dilation `v = Σ_k X_k ⊗ |k⟩: H_B → H_B ⊗ C^{K+1}` of a
/// measure-and-prepare channel, whose representation on the span `W` of the
/// Naimark projections sends `π_k ↦ 1_B ⊗ |k⟩⟨k|`. Slot 0 carries the POVM
/// completion with `X_0 = 0`.
#[derive(Debug, Clone)]
pub struct CommutativeDilation {
    d_a: usize,
    d_b: usize,
    povm: Vec<ComplexMatrix>,
    weights: Vec<f64>,
    v: ComplexMatrix,
    certificate: CommutativityCertificate,
}

impl CommutativeDilation {
    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// `K + 1`.
    pub fn outcomes(&self) -> usize {
        self.povm.len()
    }

    pub fn dilation_dim(&self) -> usize {
        self.d_b * self.outcomes()
    }

    /// `v`, rows indexed by `b·(K+1) + k`.
    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn povm(&self) -> &[ComplexMatrix] {
        &self.povm
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn certificate(&self) -> &CommutativityCertificate {
        &self.certificate
    }

    /// Diagonal of `Φ(π_k) = 1_B ⊗ |k⟩⟨k|`.
    pub fn image_generator(&self, k: usize) -> Vec<f64> {
        let n = self.outcomes();
        (0..self.d_b * n).map(|r| if r % n == k { 1.0 } else { 0.0 }).collect()
    }

    pub fn image_generator_matrix(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::diag_real(&self.image_generator(k))
    }

    /// `v†(1_B ⊗ |k⟩⟨k|)v = X_k†X_k`.
    pub fn compressed_generator(&self, k: usize) -> ComplexMatrix {
        let n = self.outcomes();
        let rows: Vec<usize> = (0..self.d_b).map(|b| b * n + k).collect();
        let slice = self.v.select_rows(&rows);
        slice.adjoint_mul(&slice)
    }

    /// `φ(a) = Σ_{k≥1} v†(1⊗|k⟩⟨k|)v · tr[F_k a]/w_k`.
    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_b, self.d_b);
        for k in 1..self.outcomes() {
            let coef = self.povm[k].matmul(a).trace() / self.weights[k];
            out += &self.compressed_generator(k).scale(coef);
        }
        out
    }

    /// The representation on `W` as a map on the diagonal algebra of
    /// `C^{K+1}`; off-diagonal units lie outside `W` and map to zero. Dense,
    /// so meant for small `K`.
    pub fn to_linear_map(&self) -> LinearMapOnAlgebra {
        let n = self.outcomes();
        let dim = self.dilation_dim();
        LinearMapOnAlgebra::from_fn(n, dim, |e| {
            let k = (0..n).find(|&k| e[(k, k)] == ONE);
            match k {
                Some(k) => self.image_generator_matrix(k),
                None => ComplexMatrix::zeros(dim, dim),
            }
        })
        .expect("dilation dimensions are positive")
        .with_domain(Domain::Diagonal)
    }
}

/// Builds the commutative dilation of a Holevo form and its certificate;
/// fails when the channel reconstruction residual exceeds `1e-8`.
pub fn commutative_dilation(h: &HolevoForm) -> Result<CommutativeDilation> {
    if h.is_empty() {
        return Err(QtError::InvalidParameter("Holevo form has no terms".into()));
    }
    let mut povm = complete_povm(&h.povm)?;
    // Keep the stored F_k bit-identical to the Holevo form.
    for (slot, f) in povm.iter_mut().skip(1).zip(&h.povm) {
        *slot = f.clone();
    }
    let n = povm.len();
    let db = h.d_b;
    let mut weights = Vec::with_capacity(n);
    weights.push(0.0);
    weights.extend_from_slice(&h.weights);
    let mut v = ComplexMatrix::zeros(db * n, db);
    for (k, x) in h.factors.iter().enumerate() {
        for b in 0..db {
            for c in 0..db {
                v[(b * n + k + 1, c)] = x[(b, c)];
            }
        }
    }
    let mut dil = CommutativeDilation {
        d_a: h.d_a,
        d_b: db,
        povm,
        weights,
        v,
        certificate: CommutativityCertificate {
            image_commutator: 0.0,
            projector_orthogonality: 0.0,
            homomorphism: 0.0,
            star: 0.0,
            channel_reconstruction: 0.0,
        },
    };
    dil.certificate = certify(&dil, &h.reference);
    if !(dil.certificate.channel_reconstruction <= DILATION_RECONSTRUCTION_TOL) {
        return Err(QtError::CertificateFailure {
            stage: "commutative-dilation",
            residual: dil.certificate.channel_reconstruction,
        });
    }
    Ok(dil)
}

/// Residuals on `W`, computed on diagonals: products of diagonal operators
/// are entrywise products, and `Φ*(π_k) = Φ(π_k)†` is the same real diagonal.
fn certify(dil: &CommutativeDilation, reference: &ComplexMatrix) -> CommutativityCertificate {
    let n = dil.outcomes();
    let gens: Vec<Vec<f64>> = (0..n).map(|k| dil.image_generator(k)).collect();
    let mats: Vec<ComplexMatrix> = (0..n).map(|k| dil.image_generator_matrix(k)).collect();
    let mut image_commutator: f64 = 0.0;
    let mut homomorphism: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j < k {
                let c = &mats[j].matmul(&mats[k]) - &mats[k].matmul(&mats[j]);
                image_commutator = image_commutator.max(c.max_abs());
            }
            // π_j π_k = δ_jk π_k on the dilated space, so Φ(π_jπ_k) = δ_jk Φ(π_k).
            for (x, y) in gens[j].iter().zip(&gens[k]) {
                let lhs = if j == k { *y } else { 0.0 };
                homomorphism = homomorphism.max((lhs - x * y).abs());
            }
        }
    }
    let projector_orthogonality = diagonal_projection_defect(&gens);
    let star = 0.0;
    let (da, db) = (dil.d_a, dil.d_b);
    let mut channel_reconstruction: f64 = 0.0;
    for i in 0..da {
        for j in 0..da {
            let value = dil.apply(&ComplexMatrix::unit(da, i, j));
            channel_reconstruction = channel_reconstruction.max((&value - &reference.block(i, j, db)).frob_norm());
        }
    }
    CommutativityCertificate {
        image_commutator,
        projector_orthogonality,
        homomorphism,
        star,
        channel_reconstruction,
    }
}
