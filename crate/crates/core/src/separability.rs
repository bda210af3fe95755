//! Entanglement verdicts: the PPT test, a Frank–Wolfe search for separable
//! decompositions, the certificate pipeline from a decomposition to a
//! commutative-image dilation, and the decomposable (CP + co-CP) split.

use crate::channels::{
    commutative_dilation, holevo_from_separable_with_tolerance, naimark_dilate, CommutativeDilation, HolevoForm,
    NaimarkDilation,
};
use std::f64::consts::SQRT_2;

use crate::error::{QtError, Result};
use crate::linmap::LinearMapOnAlgebra;
use crate::mat::ops::partial_transpose_unchecked;
use crate::mat::{herm_eig, psd_project, random_ginibre, random_haar_vector, ComplexMatrix, RngStream, Subsystem, C64, ZERO};
use crate::states::{schmidt_decompose, BipartiteState, SeparableDecomposition};

/// `ρ^{T_A}` with minimum eigenvalue below `−PPT_TOL` is entangled.
pub const PPT_TOL: f64 = 1e-9;
/// States whose largest eigenvalue is within this of 1 are treated as pure.
pub const PURITY_TOL: f64 = 1e-9;
/// Decomposition residual that counts as a separability certificate.
pub const SEPARABLE_RESIDUAL: f64 = 1e-6;
pub const DEFAULT_FW_BUDGET: usize = 5000;
pub const DEFAULT_DECOMPOSITION_BUDGET: usize = 2000;
/// `decomposability_test` calls a Choi matrix decomposable at this residual.
pub const DECOMPOSABLE_RESIDUAL: f64 = 1e-6;

pub const HOMOMORPHISM_TOL: f64 = 1e-10;
pub const IMAGE_COMMUTATOR_TOL: f64 = 1e-12;
pub const NAIMARK_TOL: f64 = 1e-10;
pub const CHANNEL_RECONSTRUCTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PptVerdict {
    Entangled,
    PptPass,
}

#[derive(Debug, Clone)]
pub struct PptReport {
    pub min_eigenvalue: f64,
    /// Spectrum of `ρ^{T_A}`, ascending.
    pub spectrum: Vec<f64>,
    pub verdict: PptVerdict,
    /// PPT is necessary and sufficient: `dA·dB ≤ 6`.
    pub decisive: bool,
}

pub fn is_decisive(d_a: usize, d_b: usize) -> bool {
    d_a * d_b <= 6
}

pub fn ppt_test(rho: &BipartiteState) -> Result<PptReport> {
    let eig = herm_eig(&rho.partial_transpose(Subsystem::A))?;
    let min_eigenvalue = eig.min();
    let verdict = if min_eigenvalue < -PPT_TOL {
        PptVerdict::Entangled
    } else {
        PptVerdict::PptPass
    };
    Ok(PptReport {
        min_eigenvalue,
        spectrum: eig.values,
        verdict,
        decisive: is_decisive(rho.d_a(), rho.d_b()),
    })
}

/// Tuning for [`fw_separable_search_with`].
#[derive(Debug, Clone)]
pub struct FwOptions {
    /// Maximum number of outer iterations (oracle calls).
    pub budget: usize,
    /// Random restarts of the product-state oracle.
    pub restarts: usize,
    /// Alternating eigenvector steps per restart.
    pub inner_iterations: usize,
    /// Stop once the residual is at or below this.
    pub target_residual: f64,
    /// Stop once the duality bound shows the residual is within a factor of
    /// two of the distance to the separable set (for 25 consecutive
    /// iterations). The bound assumes the oracle found the best product
    /// state, so this is a heuristic exit; disable it to spend the full budget.
    pub early_exit: bool,
}

impl Default for FwOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_FW_BUDGET,
            restarts: 5,
            inner_iterations: 50,
            target_residual: 1e-8,
            early_exit: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FwResult {
    /// Mixture of rank-one product projectors; its `residual` field is
    /// recomputed from the assembled matrices.
    pub decomposition: SeparableDecomposition,
    /// `‖ρ − σ‖_F`.
    pub residual: f64,
    pub iterations: usize,
    /// Largest duality lower bound on the distance to the separable set seen
    /// during the run (valid when the oracle is exact).
    pub lower_bound: f64,
}

#[derive(Debug, Clone)]
struct Atom {
    u: Vec<C64>,
    w: Vec<C64>,
    x: Vec<C64>,
}

impl Atom {
    fn new(u: Vec<C64>, w: Vec<C64>) -> Self {
        let x = u.iter().flat_map(|&a| w.iter().map(move |&b| a * b)).collect();
        Self { u, w, x }
    }

    fn expectation(&self, m: &ComplexMatrix) -> f64 {
        quad_form(m, &self.x)
    }

    fn projector(v: &[C64]) -> ComplexMatrix {
        ComplexMatrix::outer(&ComplexMatrix::column(v))
    }

    /// Real coordinates of `|x⟩⟨x|` (see [`herm_coords`]).
    fn coords(&self) -> Vec<f64> {
        let n = self.x.len();
        let mut out = Vec::with_capacity(n * n);
        out.extend(self.x.iter().map(|z| z.norm_sqr()));
        for i in 0..n {
            for j in i + 1..n {
                let z = self.x[i] * self.x[j].conj();
                out.push(SQRT_2 * z.re);
                out.push(SQRT_2 * z.im);
            }
        }
        out
    }
}

/// Coordinates of a Hermitian matrix in the orthonormal basis `E_ii`,
/// `(E_ij + E_ji)/√2`, `i(E_ij − E_ji)/√2` for `i < j`.
fn herm_coords(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut out = Vec::with_capacity(n * n);
    out.extend((0..n).map(|i| m[(i, i)].re));
    for i in 0..n {
        for j in i + 1..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out.push(SQRT_2 * z.re);
            out.push(SQRT_2 * z.im);
        }
    }
    out
}

fn from_herm_coords(c: &[f64], n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(c[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = C64::new(c[k], c[k + 1]) / SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Weights `α` with `Σ α_i = 1` minimizing `‖Σ α_i p_i‖`, by Householder
/// least squares on the differences `p_i − p_0`. `None` when the points are
/// numerically affinely dependent.
fn affine_minimizer(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let m = points.len();
    if m == 1 {
        return Some(vec![1.0]);
    }
    let len = points[0].len();
    let k = m - 1;
    if k > len {
        return None;
    }
    let p0 = &points[0];
    let mut cols: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let mut rhs: Vec<f64> = p0.iter().map(|v| -v).collect();
    let scale = cols.iter().map(|c| dot(c, c).sqrt()).fold(0.0, f64::max);
    let mut diag = vec![0.0; k];
    for j in 0..k {
        let norm = cols[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale {
            return None;
        }
        let alpha = if cols[j][j] > 0.0 { -norm } else { norm };
        let mut h: Vec<f64> = cols[j][j..].to_vec();
        h[0] -= alpha;
        let hh = dot(&h, &h);
        diag[j] = alpha;
        if hh == 0.0 {
            continue;
        }
        for col in cols.iter_mut().skip(j + 1).chain(std::iter::once(&mut rhs)) {
            let f = 2.0 * dot(&h, &col[j..]) / hh;
            for (c, hv) in col[j..].iter_mut().zip(&h) {
                *c -= f * hv;
            }
        }
    }
    let mut beta = vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = rhs[j];
        for l in j + 1..k {
            s -= cols[l][j] * beta[l];
        }
        beta[j] = s / diag[j];
    }
    let mut out = Vec::with_capacity(m);
    out.push(1.0 - beta.iter().sum::<f64>());
    out.extend(beta);
    Some(out)
}

fn quad_form(m: &ComplexMatrix, x: &[C64]) -> f64 {
    let n = x.len();
    let data = m.data();
    let mut s = ZERO;
    for i in 0..n {
        if x[i] == ZERO {
            continue;
        }
        let row = &data[i * n..(i + 1) * n];
        let mut t = ZERO;
        for j in 0..n {
            t += row[j] * x[j];
        }
        s += x[i].conj() * t;
    }
    s.re
}

/// `⟨w|_B m |w⟩_B`, a `dA x dA` matrix.
fn contract_b(m: &ComplexMatrix, w: &[C64], d_a: usize, d_b: usize) -> ComplexMatrix {
    let n = d_a * d_b;
    let data = m.data();
    ComplexMatrix::from_fn(d_a, d_a, |i, j| {
        let mut s = ZERO;
        for k in 0..d_b {
            let row = &data[(i * d_b + k) * n + j * d_b..(i * d_b + k) * n + (j + 1) * d_b];
            let mut t = ZERO;
            for l in 0..d_b {
                t += row[l] * w[l];
            }
            s += w[k].conj() * t;
        }
        s
    })
    .hermitian_part()
}

/// `⟨u|_A m |u⟩_A`, a `dB x dB` matrix.
fn contract_a(m: &ComplexMatrix, u: &[C64], d_a: usize, d_b: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d_b, d_b);
    for i in 0..d_a {
        for j in 0..d_a {
            let c = u[i].conj() * u[j];
            if c == ZERO {
                continue;
            }
            for k in 0..d_b {
                for l in 0..d_b {
                    out[(k, l)] += c * m[(i * d_b + k, j * d_b + l)];
                }
            }
        }
    }
    out.hermitian_part()
}

fn top_eigenvector(m: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let e = herm_eig(m)?;
    let n = e.dim();
    Ok((e.max(), (0..n).map(|i| e.vectors[(i, n - 1)]).collect()))
}

/// Starting `B` factors for the oracle: the dominant Schmidt factor of the
/// top two eigenvectors of `r`, and the `B` factors of the active atoms that
/// score highest on `r`.
fn oracle_seeds(r: &ComplexMatrix, d_a: usize, d_b: usize, atoms: &[Atom]) -> Result<Vec<Vec<C64>>> {
    let n = d_a * d_b;
    let e = herm_eig(r)?;
    let mut seeds = Vec::new();
    for col in (0..n).rev().take(2) {
        let psi: Vec<C64> = (0..n).map(|i| e.vectors[(i, col)]).collect();
        let gram = ComplexMatrix::from_fn(d_b, d_b, |k, l| (0..d_a).map(|i| psi[i * d_b + k].conj() * psi[i * d_b + l]).sum());
        let (_, v) = top_eigenvector(&gram.hermitian_part())?;
        seeds.push(v.iter().map(|z| z.conj()).collect());
    }
    let mut scored: Vec<(f64, &Atom)> = atoms.iter().map(|a| (a.expectation(r), a)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    seeds.extend(scored.iter().take(2).map(|(_, a)| a.w.clone()));
    Ok(seeds)
}

/// Approximate `max ⟨u⊗w| r |u⊗w⟩` over unit product vectors by alternating
/// principal eigenvectors, started from each seed and from `restarts`
/// random `B` vectors.
fn product_oracle(
    r: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    seeds: Vec<Vec<C64>>,
    restarts: usize,
    inner_iterations: usize,
    rng: &mut RngStream,
) -> Result<(f64, Atom)> {
    let mut best: Option<(f64, Atom)> = None;
    let random = (0..restarts).map(|_| random_haar_vector(rng, d_b).into_data()).collect::<Vec<_>>();
    for mut w in seeds.into_iter().chain(random) {
        let mut u = Vec::new();
        let mut value = f64::NEG_INFINITY;
        for _ in 0..inner_iterations.max(1) {
            let (_, nu) = top_eigenvector(&contract_b(r, &w, d_a, d_b))?;
            let (val, nw) = top_eigenvector(&contract_a(r, &nu, d_a, d_b))?;
            u = nu;
            w = nw;
            let done = (val - value).abs() <= 1e-15 * val.abs().max(1.0);
            value = val;
            if done {
                break;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, Atom::new(u, w)));
        }
    }
    Ok(best.expect("at least one start"))
}

/// Frank–Wolfe search for `σ = Σ_k p_k |u_k⟩⟨u_k| ⊗ |w_k⟩⟨w_k|` close to `ρ`,
/// with default tuning and the given iteration budget.
pub fn fw_separable_search(rho: &BipartiteState, budget: usize, rng: &mut RngStream) -> Result<FwResult> {
    let opts = FwOptions {
        budget,
        ..FwOptions::default()
    };
    fw_separable_search_with(rho, &opts, rng)
}

/// Fully corrective Frank–Wolfe on `½‖ρ − σ‖_F²` over the separable hull, in
/// the min-norm-point form: each iteration adds the oracle's product state to
/// an affinely independent active set and moves `σ − ρ` to the nearest point
/// of that set's convex hull. The active set never exceeds `(dA·dB)²` atoms.
pub fn fw_separable_search_with(rho: &BipartiteState, opts: &FwOptions, rng: &mut RngStream) -> Result<FwResult> {
    let (d_a, d_b) = rho.dims();
    let n = d_a * d_b;
    let target = rho.rho();
    let shift = herm_coords(target);
    let shifted = |a: &Atom| -> Vec<f64> { a.coords().iter().zip(&shift).map(|(p, t)| p - t).collect() };

    let seeds = oracle_seeds(target, d_a, d_b, &[])?;
    let (_, first) = product_oracle(target, d_a, d_b, seeds, opts.restarts, opts.inner_iterations, rng)?;
    let mut points = vec![shifted(&first)];
    let mut atoms = vec![first];
    let mut weights = vec![1.0];
    let mut x = points[0].clone();
    let mut residual = dot(&x, &x).sqrt();
    let mut iterations = 0;
    let mut lower_bound: f64 = 0.0;
    let mut tight_streak = 0;
    let mut stalls = 0;

    while iterations < opts.budget && residual > opts.target_residual {
        iterations += 1;
        let r = from_herm_coords(&x.iter().map(|v| -v).collect::<Vec<_>>(), n);
        let seeds = oracle_seeds(&r, d_a, d_b, &atoms)?;
        let (_, mut atom) = product_oracle(&r, d_a, d_b, seeds, opts.restarts, opts.inner_iterations, rng)?;
        let r2 = dot(&x, &x);
        let mut point = shifted(&atom);
        // gap = ⟨ρ − σ, A − σ⟩; ⟨R, ρ − τ⟩ ≥ r² − gap for every separable τ.
        let mut gap = r2 - dot(&x, &point);
        tight_streak = if r2 - gap >= 0.5 * r2 { tight_streak + 1 } else { 0 };
        if gap <= 0.0 || (opts.early_exit && tight_streak >= 25) {
            let seeds = oracle_seeds(&r, d_a, d_b, &atoms)?;
            let restarts = 4 * opts.restarts.max(1);
            let (_, deep) = product_oracle(&r, d_a, d_b, seeds, restarts, 4 * opts.inner_iterations, rng)?;
            let deep_point = shifted(&deep);
            let deep_gap = r2 - dot(&x, &deep_point);
            if deep_gap > gap {
                atom = deep;
                point = deep_point;
                gap = deep_gap;
            }
            tight_streak = if r2 - gap >= 0.5 * r2 { tight_streak } else { 0 };
        }
        lower_bound = lower_bound.max((r2 - gap) / residual);
        if gap <= 0.0 || (opts.early_exit && tight_streak >= 25) {
            break;
        }

        atoms.push(atom);
        points.push(point);
        weights.push(0.0);
        loop {
            let Some(alpha) = affine_minimizer(&points) else {
                atoms.pop();
                points.pop();
                weights.pop();
                break;
            };
            if alpha.iter().all(|&a| a > 0.0) {
                weights = alpha;
                break;
            }
            let (mut theta, mut leaving) = (f64::INFINITY, 0);
            for (i, (&l, &a)) in weights.iter().zip(&alpha).enumerate() {
                if a <= 0.0 {
                    let t = l / (l - a);
                    if t < theta {
                        theta = t;
                        leaving = i;
                    }
                }
            }
            for (l, a) in weights.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            weights[leaving] = 0.0;
            let keep: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
            atoms = keep.iter().map(|&i| atoms[i].clone()).collect();
            points = keep.iter().map(|&i| points[i].clone()).collect();
            weights = keep.iter().map(|&i| weights[i]).collect();
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|p| *p /= total);
        x = vec![0.0; n * n];
        for (p, &l) in points.iter().zip(&weights) {
            for (xi, pi) in x.iter_mut().zip(p) {
                *xi += l * pi;
            }
        }
        let next = dot(&x, &x).sqrt();
        stalls = if next < residual { 0 } else { stalls + 1 };
        residual = next;
        if stalls >= 5 {
            break;
        }
    }

    let a_factors = atoms.iter().map(|a| Atom::projector(&a.u)).collect();
    let b_factors = atoms.iter().map(|a| Atom::projector(&a.w)).collect();
    let decomposition = SeparableDecomposition::new(weights, a_factors, b_factors, target)?;
    Ok(FwResult {
        residual: decomposition.residual,
        decomposition,
        iterations,
        lower_bound,
    })
}

/// Commuting rank-one projections `|e_r⟩⟨e_r|` onto computational basis
/// vectors of the dilated space, refining the Naimark projections.
#[derive(Debug, Clone)]
pub struct CommutativeSubalgebra {
    dim: usize,
    support: Vec<usize>,
}

impl CommutativeSubalgebra {
    /// Rank-one refinement of commuting diagonal projections.
    pub fn refining(diagonals: &[Vec<f64>]) -> Self {
        let dim = diagonals.first().map_or(0, Vec::len);
        let support = (0..dim).filter(|&r| diagonals.iter().any(|p| p[r] != 0.0)).collect();
        Self { dim, support }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn projection(&self, r: usize) -> ComplexMatrix {
        let i = self.support[r];
        ComplexMatrix::unit(self.dim, i, i)
    }

    /// `max_{r,s} ‖p_r p_s − δ_rs p_r‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.len() {
            for s in 0..self.len() {
                let pr = self.projection(r);
                let ps = self.projection(s);
                let target = if r == s { pr.clone() } else { ComplexMatrix::zeros(self.dim, self.dim) };
                worst = worst.max((&pr.matmul(&ps) - &target).frob_norm());
            }
        }
        worst
    }
}

/// The Holevo → Naimark → commutative-dilation chain for one decomposition,
/// with every stage's residual.
#[derive(Debug, Clone)]
pub struct SeparabilityCertificate {
    pub decomposition: SeparableDecomposition,
    pub holevo: HolevoForm,
    pub naimark: NaimarkDilation,
    pub dilation: CommutativeDilation,
    pub subalgebra: CommutativeSubalgebra,
    /// `‖ρ − Σ_k p_k a_k ⊗ b_k‖_F`.
    pub reconstruction_residual: f64,
    /// `‖Σ_k F_kᵀ ⊗ E_k − Σ_k p_k a_k ⊗ b_k‖_F`.
    pub holevo_residual: f64,
    pub naimark_isometry_defect: f64,
    pub naimark_povm_defect: f64,
}

impl SeparabilityCertificate {
    /// Largest stage residual.
    pub fn overall_residual(&self) -> f64 {
        let c = self.dilation.certificate();
        [
            self.reconstruction_residual,
            self.holevo_residual,
            self.naimark_isometry_defect,
            self.naimark_povm_defect,
            c.image_commutator,
            c.homomorphism,
            c.star,
            c.channel_reconstruction,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn stage_check(stage: &'static str, residual: f64, tol: f64) -> Result<()> {
    if residual <= tol {
        Ok(())
    } else {
        Err(QtError::CertificateFailure { stage, residual })
    }
}

/// Chains `holevo_from_separable → naimark_dilate → commutative_dilation`
/// and checks every stage; the first failing stage is named in the error.
pub fn build_separability_certificate(
    rho: &BipartiteState,
    dec: &SeparableDecomposition,
) -> Result<SeparabilityCertificate> {
    if (dec.d_a, dec.d_b) != rho.dims() {
        return Err(QtError::InvalidDimensions("decomposition and state dimensions differ".into()));
    }
    let reconstruction_residual = dec.residual_to(rho.rho());
    stage_check("reconstruction", reconstruction_residual, SEPARABLE_RESIDUAL)?;
    let mut decomposition = dec.clone();
    decomposition.residual = reconstruction_residual;

    let holevo = holevo_from_separable_with_tolerance(&decomposition, SEPARABLE_RESIDUAL)?;
    let holevo_residual = (&holevo.choi() - holevo.reference()).frob_norm();
    stage_check("holevo", holevo_residual, 1e-9)?;

    let naimark = naimark_dilate(holevo.povm())?;
    let naimark_isometry_defect = naimark.isometry_defect();
    let naimark_povm_defect = naimark.povm_defect();
    stage_check("naimark", naimark_isometry_defect.max(naimark_povm_defect), NAIMARK_TOL)?;

    let dilation = commutative_dilation(&holevo)?;
    let c = *dilation.certificate();
    stage_check("image-commutator", c.image_commutator, IMAGE_COMMUTATOR_TOL)?;
    stage_check("homomorphism", c.homomorphism.max(c.projector_orthogonality), HOMOMORPHISM_TOL)?;
    stage_check("star", c.star, 0.0)?;
    stage_check("channel", c.channel_reconstruction, CHANNEL_RECONSTRUCTION_TOL)?;

    let diagonals: Vec<Vec<f64>> = (0..naimark.outcomes()).map(|k| naimark.projection_diagonal(k)).collect();
    let subalgebra = CommutativeSubalgebra::refining(&diagonals);

    Ok(SeparabilityCertificate {
        decomposition,
        holevo,
        naimark,
        dilation,
        subalgebra,
        reconstruction_residual,
        holevo_residual,
        naimark_isometry_defect,
        naimark_povm_defect,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Separable,
    Entangled,
    Undecided,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Separable => "SEPARABLE",
            Verdict::Entangled => "ENTANGLED",
            Verdict::Undecided => "UNDECIDED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VerdictReason {
    /// Pure state with the given Schmidt rank.
    SchmidtRank(usize),
    /// Partial transpose has this negative eigenvalue.
    PptViolation(f64),
    /// PPT in dimensions where PPT is sufficient.
    PptDecisive,
    /// A decomposition within the separability residual was found.
    Decomposition,
    /// PPT passes but the search did not reach the separability residual.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct SeparabilityReport {
    pub verdict: Verdict,
    pub reason: VerdictReason,
    pub ppt: PptReport,
    pub fw: Option<FwResult>,
    pub certificate: Option<SeparabilityCertificate>,
}

/// Pure states: Schmidt rank. Otherwise: PPT failure means entangled; in
/// decisive dimensions PPT means separable; elsewhere a Frank–Wolfe
/// decomposition within `1e-6` certifies separability and anything else is
/// undecided. Certificates are attached whenever a decomposition is good
/// enough to build one.
pub fn separability_verdict(rho: &BipartiteState, budget: usize, rng: &mut RngStream) -> Result<SeparabilityReport> {
    let opts = FwOptions {
        budget,
        ..FwOptions::default()
    };
    separability_verdict_with(rho, &opts, rng)
}

pub fn separability_verdict_with(
    rho: &BipartiteState,
    opts: &FwOptions,
    rng: &mut RngStream,
) -> Result<SeparabilityReport> {
    verdict_impl(rho, opts, rng, false)
}

/// Same verdict as [`separability_verdict_with`], but the Frank–Wolfe search
/// always runs and its result is attached, also for pure and PPT-violating
/// states.
pub fn separability_verdict_searched(
    rho: &BipartiteState,
    opts: &FwOptions,
    rng: &mut RngStream,
) -> Result<SeparabilityReport> {
    verdict_impl(rho, opts, rng, true)
}

fn verdict_impl(rho: &BipartiteState, opts: &FwOptions, rng: &mut RngStream, always_search: bool) -> Result<SeparabilityReport> {
    let ppt = ppt_test(rho)?;
    let search = |rng: &mut RngStream| -> Result<Option<FwResult>> {
        if always_search {
            fw_separable_search_with(rho, opts, rng).map(Some)
        } else {
            Ok(None)
        }
    };
    let (d_a, d_b) = rho.dims();

    if let Some(psi) = rho.pure_vector(PURITY_TOL) {
        let s = schmidt_decompose(&psi, d_a, d_b)?;
        if s.rank() >= 2 {
            return Ok(SeparabilityReport {
                verdict: Verdict::Entangled,
                reason: VerdictReason::SchmidtRank(s.rank()),
                ppt,
                fw: search(rng)?,
                certificate: None,
            });
        }
        let a = ComplexMatrix::outer(&s.left.col(0));
        let b = ComplexMatrix::outer(&s.right.col(0));
        let dec = SeparableDecomposition::new(vec![1.0], vec![a], vec![b], rho.rho())?;
        let certificate = build_separability_certificate(rho, &dec).ok();
        return Ok(SeparabilityReport {
            verdict: Verdict::Separable,
            reason: VerdictReason::SchmidtRank(1),
            ppt,
            fw: search(rng)?,
            certificate,
        });
    }

    if ppt.verdict == PptVerdict::Entangled {
        return Ok(SeparabilityReport {
            verdict: Verdict::Entangled,
            reason: VerdictReason::PptViolation(ppt.min_eigenvalue),
            ppt,
            fw: search(rng)?,
            certificate: None,
        });
    }

    let fw = fw_separable_search_with(rho, opts, rng)?;
    let certificate = if fw.residual <= SEPARABLE_RESIDUAL {
        Some(build_separability_certificate(rho, &fw.decomposition)?)
    } else {
        None
    };
    let (verdict, reason) = if ppt.decisive {
        (Verdict::Separable, VerdictReason::PptDecisive)
    } else if certificate.is_some() {
        (Verdict::Separable, VerdictReason::Decomposition)
    } else {
        (Verdict::Undecided, VerdictReason::Inconclusive)
    };
    Ok(SeparabilityReport {
        verdict,
        reason,
        ppt,
        fw: Some(fw),
        certificate,
    })
}

/// Split `C = P + Q^{T_B}` with `P, Q ⪰ 0`, as found by alternating
/// projections.
#[derive(Debug, Clone)]
pub struct DecomposabilityCertificate {
    pub d_a: usize,
    pub d_b: usize,
    pub p: ComplexMatrix,
    pub q: ComplexMatrix,
    /// `‖C − P − Q^{T_B}‖_F`.
    pub residual: f64,
    pub iterations: usize,
    /// Residual after each iteration.
    pub history: Vec<f64>,
}

impl DecomposabilityCertificate {
    pub fn is_feasible(&self) -> bool {
        self.residual <= DECOMPOSABLE_RESIDUAL
    }

    /// `(λ_min(P), λ_min(Q))`.
    pub fn min_eigenvalues(&self) -> Result<(f64, f64)> {
        Ok((herm_eig(&self.p)?.min(), herm_eig(&self.q)?.min()))
    }

    /// Residual against a given `C`, recomputed from `P` and `Q`.
    pub fn residual_for(&self, c: &ComplexMatrix) -> f64 {
        let qt = partial_transpose_unchecked(&self.q, self.d_a, self.d_b, Subsystem::B);
        (&(c - &self.p) - &qt).frob_norm()
    }
}

/// Alternating minimization of `‖C − P − Q^{T_B}‖_F` over PSD `P` and `Q`:
/// `P ← psd(C − Q^{T_B})`, `Q ← psd((C − P)^{T_B})`, until the residual
/// changes by less than `1e-12` or the budget runs out. Each half-step is an
/// exact block minimization, so the residual never increases.
pub fn decomposability_test(c: &ComplexMatrix, d_a: usize, d_b: usize, budget: usize) -> Result<DecomposabilityCertificate> {
    let n = d_a * d_b;
    if d_a == 0 || d_b == 0 || c.dims() != (n, n) {
        return Err(QtError::InvalidDimensions(format!(
            "Choi matrix must be {n}x{n}, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    let defect = c.hermiticity_defect();
    if defect > 1e-10 * c.frob_norm().max(1.0) {
        return Err(QtError::NotHermitian { defect });
    }
    let c = c.hermitian_part();
    let pt = |m: &ComplexMatrix| partial_transpose_unchecked(m, d_a, d_b, Subsystem::B);

    let mut q = ComplexMatrix::zeros(n, n);
    let mut p = psd_project(&c)?;
    let mut residual = (&c - &p).frob_norm();
    let mut history = Vec::new();
    let mut iterations = 0;
    while iterations < budget && residual > 0.0 {
        iterations += 1;
        q = psd_project(&pt(&(&c - &p)))?;
        p = psd_project(&(&c - &pt(&q)))?;
        let next = (&(&c - &p) - &pt(&q)).frob_norm();
        history.push(next);
        let change = (residual - next).abs();
        residual = next;
        if change < 1e-12 {
            break;
        }
    }
    Ok(DecomposabilityCertificate {
        d_a,
        d_b,
        p,
        q,
        residual,
        iterations,
        history,
    })
}

/// Certificate for `C^{T_A}` from one for `C`: `(P', Q') = (Qᵀ, Pᵀ)`, since
/// `C^{T_A} = Qᵀ + (Pᵀ)^{T_B} + (C − P − Q^{T_B})^{T_A}`.
pub fn prop2_transfer(cert: &DecomposabilityCertificate, c: &ComplexMatrix) -> DecomposabilityCertificate {
    let (d_a, d_b) = (cert.d_a, cert.d_b);
    let p = cert.q.transpose();
    let q = cert.p.transpose();
    let c_ta = partial_transpose_unchecked(c, d_a, d_b, Subsystem::A);
    let mut out = DecomposabilityCertificate {
        d_a,
        d_b,
        p,
        q,
        residual: 0.0,
        iterations: cert.iterations,
        history: Vec::new(),
    };
    out.residual = out.residual_for(&c_ta);
    out
}

/// Outcome of [`stormer_falsifier`]: the most negative eigenvalue of
/// `(id_n ⊗ φ)(x)` over sampled `x` with `x` and its block transpose PSD.
#[derive(Debug, Clone)]
pub struct StormerReport {
    pub n: usize,
    pub samples: usize,
    pub worst_min_eigenvalue: f64,
    /// The sample attaining the worst value.
    pub witness: Option<ComplexMatrix>,
}

impl StormerReport {
    /// A violation below `−tol` was found. Absence of one proves nothing.
    pub fn violation_found(&self, tol: f64) -> bool {
        self.worst_min_eigenvalue < -tol
    }
}

/// Randomized search for a violation of Størmer's condition. Samples are
/// `y + c·1` with `y = g g† + (g g†)^Γ` (block transpose `Γ`) and `c` the
/// smallest shift making `y` PSD, so both `x` and `x^Γ` are PSD and `x` sits
/// on the boundary of the cone.
pub fn stormer_falsifier(
    phi: &LinearMapOnAlgebra,
    n: usize,
    samples: usize,
    rng: &mut RngStream,
) -> Result<StormerReport> {
    if n == 0 || n > 3 {
        return Err(QtError::InvalidParameter(format!("block size n must be 1..=3, got {n}")));
    }
    let (da, db) = (phi.d_in(), phi.d_out());
    let dim = n * da;
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for _ in 0..samples {
        let k = 1 + rng.below(dim);
        let g = random_ginibre(rng, dim, k);
        let x0 = g.matmul(&g.adjoint());
        let y = (&x0 + &partial_transpose_unchecked(&x0, n, da, Subsystem::A)).hermitian_part();
        let shift = (-herm_eig(&y)?.min()).max(0.0);
        let x = &y + &ComplexMatrix::identity(dim).scale_real(shift);
        let norm = x.frob_norm();
        let x = x.scale_real(1.0 / norm);
        let mut out = ComplexMatrix::zeros(n * db, n * db);
        for i in 0..n {
            for j in 0..n {
                let v = phi.apply(&x.block(i, j, da));
                for a in 0..db {
                    for b in 0..db {
                        out[(i * db + a, j * db + b)] = v[(a, b)];
                    }
                }
            }
        }
        let min = herm_eig(&out.hermitian_part())?.min();
        if min < worst {
            worst = min;
            witness = Some(x);
        }
    }
    Ok(StormerReport {
        n,
        samples,
        worst_min_eigenvalue: if samples == 0 { 0.0 } else { worst },
        witness,
    })
}
