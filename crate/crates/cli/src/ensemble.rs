//! Seeded ensemble experiments written as CSV, one row per sample.
//!
//! Sample `i` draws from `RngStream(seed, i)`, so rows do not depend on each
//! other and the file is a pure function of the spec.

use std::fmt::Write as _;
use std::time::Instant;

use qtime_core::mat::partial_transpose;
use qtime_core::orientation::is_time_oriented_state;
use qtime_core::separability::{decomposability_test, separability_verdict_searched, FwOptions};
use qtime_core::states::{isotropic_state, random_induced_state, random_separable, tiles_upb_state, werner_state};
use qtime_core::{BipartiteState, RngStream, Sign, Subsystem};

use crate::error::CliError;

pub const CSV_HEADER: &str =
    "seed,family,params,ppt_min_eig,fw_residual,fw_iters,verdict,image_comm_residual,decomp_residual,wall_ms";
pub const SCHEMA_LINE: &str = "# qtime ensemble schema 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Werner,
    Isotropic,
    Induced,
    Separable,
    Tiles,
    /// Induced states, random separable states and convex mixtures of the
    /// two, cycling by row index.
    Mixed,
}

impl Family {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        Ok(match name {
            "werner" => Family::Werner,
            "isotropic" => Family::Isotropic,
            "induced" => Family::Induced,
            "separable" => Family::Separable,
            "tiles" => Family::Tiles,
            "mixed" => Family::Mixed,
            other => {
                return Err(CliError::Input(format!(
                    "unknown family `{other}` (werner, isotropic, induced, separable, tiles, mixed)"
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Werner => "werner",
            Family::Isotropic => "isotropic",
            Family::Induced => "induced",
            Family::Separable => "separable",
            Family::Tiles => "tiles",
            Family::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub family: Family,
    /// `key=value` family parameters.
    pub params: Vec<(String, String)>,
    pub d_a: usize,
    pub d_b: usize,
    pub samples: usize,
    pub seed: u64,
    pub budget: usize,
    pub decomp_budget: usize,
    /// Fill the `wall_ms` column; off by default so output stays byte-stable.
    pub timing: bool,
}

impl EnsembleSpec {
    fn param(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.params.iter().rev().find(|(k, _)| k == key) {
            None => Ok(None),
            Some((_, v)) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| CliError::Input(format!("parameter {key}={v} is not a number"))),
        }
    }

    fn count_param(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.param(key)? {
            None => Ok(None),
            Some(v) if v >= 1.0 && v.fract() == 0.0 => Ok(Some(v as usize)),
            Some(v) => Err(CliError::Input(format!("parameter {key}={v} must be a positive integer"))),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        const KNOWN: [&str; 6] = ["p", "pmin", "pmax", "k", "m", "d"];
        if let Some((k, _)) = self.params.iter().find(|(k, _)| !KNOWN.contains(&k.as_str())) {
            return Err(CliError::Input(format!("unknown parameter `{k}`")));
        }
        if self.samples == 0 {
            return Err(CliError::Input("samples must be positive".into()));
        }
        if self.d_a == 0 || self.d_b == 0 {
            return Err(CliError::Input("dimensions must be positive".into()));
        }
        Ok(())
    }

    /// `p` for row `i`: the fixed `p`, or a linear sweep from `pmin` to `pmax`.
    fn sweep(&self, i: usize) -> Result<f64, CliError> {
        if let Some(p) = self.param("p")? {
            return Ok(p);
        }
        let lo = self.param("pmin")?.unwrap_or(0.0);
        let hi = self.param("pmax")?.unwrap_or(1.0);
        if self.samples == 1 {
            return Ok(lo);
        }
        Ok(lo + (hi - lo) * i as f64 / (self.samples - 1) as f64)
    }
}

/// Draws sample `i` and describes its parameters.
pub fn draw_sample(spec: &EnsembleSpec, i: usize, rng: &mut RngStream) -> Result<(BipartiteState, String), CliError> {
    let (d_a, d_b) = (spec.d_a, spec.d_b);
    let n = d_a * d_b;
    let out = match spec.family {
        Family::Werner => {
            let d = spec.count_param("d")?.unwrap_or(2);
            let p = spec.sweep(i)?;
            (werner_state(d, p)?, format!("d={d};p={p}"))
        }
        Family::Isotropic => {
            let d = spec.count_param("d")?.unwrap_or(d_a);
            let p = spec.sweep(i)?;
            (isotropic_state(d, p)?, format!("d={d};p={p}"))
        }
        Family::Induced => {
            let k = spec.count_param("k")?.unwrap_or(n);
            (random_induced_state(rng, d_a, d_b, k)?, format!("k={k}"))
        }
        Family::Separable => {
            let m = match spec.count_param("m")? {
                Some(m) => m,
                None => 1 + rng.below(8),
            };
            (random_separable(rng, d_a, d_b, m)?.0, format!("m={m}"))
        }
        Family::Tiles => (tiles_upb_state(), String::new()),
        Family::Mixed => mixed_sample(i, rng, d_a, d_b)?,
    };
    Ok(out)
}

/// Row `i` of the mixed family: `i mod 3` picks an induced state with
/// `k ∈ [2, 2n]`, a separable state with `m ∈ [1, 8]`, or a mixture
/// `λ·induced + (1−λ)·separable`.
pub fn mixed_sample(i: usize, rng: &mut RngStream, d_a: usize, d_b: usize) -> Result<(BipartiteState, String), CliError> {
    let n = d_a * d_b;
    Ok(match i % 3 {
        0 => {
            let k = 2 + rng.below(2 * n - 1);
            (random_induced_state(rng, d_a, d_b, k)?, format!("kind=induced;k={k}"))
        }
        1 => {
            let m = 1 + rng.below(8);
            (random_separable(rng, d_a, d_b, m)?.0, format!("kind=separable;m={m}"))
        }
        _ => {
            let k = 2 + rng.below(2 * n - 1);
            let a = random_induced_state(rng, d_a, d_b, k)?;
            let m = 1 + rng.below(8);
            let b = random_separable(rng, d_a, d_b, m)?.0;
            let l = rng.uniform();
            let rho = (&a.rho().scale_real(l) + &b.rho().scale_real(1.0 - l)).hermitian_part();
            (BipartiteState::new(rho, d_a, d_b)?, format!("kind=mixture;k={k};m={m};lambda={l}"))
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRow {
    pub seed: u64,
    pub family: &'static str,
    pub params: String,
    pub ppt_min_eig: f64,
    pub fw_residual: f64,
    pub fw_iters: usize,
    pub verdict: &'static str,
    pub image_comm_residual: f64,
    pub decomp_residual: f64,
    pub wall_ms: Option<f64>,
}

impl EnsembleRow {
    pub fn to_csv(&self) -> String {
        let wall = self.wall_ms.map(|w| format!("{w:.3}")).unwrap_or_default();
        format!(
            "{},{},{},{:.16e},{:.16e},{},{},{:.16e},{:.16e},{}",
            self.seed,
            self.family,
            self.params,
            self.ppt_min_eig,
            self.fw_residual,
            self.fw_iters,
            self.verdict,
            self.image_comm_residual,
            self.decomp_residual,
            wall
        )
    }
}

pub fn run_row(spec: &EnsembleSpec, i: usize) -> Result<EnsembleRow, CliError> {
    let mut rng = RngStream::new(spec.seed, i as u64);
    let (rho, params) = draw_sample(spec, i, &mut rng)?;
    let params = if params.is_empty() { format!("row={i}") } else { format!("row={i};{params}") };
    let start = Instant::now();
    let opts = FwOptions {
        budget: spec.budget,
        ..FwOptions::default()
    };
    let report = separability_verdict_searched(&rho, &opts, &mut rng)?;
    let fw = report.fw.as_ref().expect("searched verdict attaches the search");
    let image_comm_residual = match &report.certificate {
        Some(cert) => cert.dilation.certificate().image_commutator,
        None => is_time_oriented_state(&rho, Sign::Minus, 0, &mut rng)?.report.image_commutator,
    };
    let (d_a, d_b) = rho.dims();
    let c = partial_transpose(rho.rho(), d_a, d_b, Subsystem::A)?;
    let decomp = decomposability_test(&c, d_a, d_b, spec.decomp_budget)?;
    let wall_ms = spec.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(EnsembleRow {
        seed: spec.seed,
        family: spec.family.name(),
        params,
        ppt_min_eig: report.ppt.min_eigenvalue,
        fw_residual: fw.residual,
        fw_iters: fw.iterations,
        verdict: report.verdict.label(),
        image_comm_residual,
        decomp_residual: decomp.residual,
        wall_ms,
    })
}

/// Rows are computed on all available cores; each row owns its random
/// stream, so the result does not depend on the thread count.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<Vec<EnsembleRow>, CliError> {
    spec.validate()?;
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(spec.samples);
    let mut slots: Vec<Option<Result<EnsembleRow, CliError>>> = (0..spec.samples).map(|_| None).collect();
    std::thread::scope(|scope| {
        let workers: Vec<_> = (0..threads)
            .map(|t| {
                scope.spawn(move || {
                    (t..spec.samples)
                        .step_by(threads)
                        .map(|i| (i, run_row(spec, i)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for w in workers {
            for (i, row) in w.join().expect("ensemble worker panicked") {
                slots[i] = Some(row);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every row is computed")).collect()
}

pub fn to_csv(rows: &[EnsembleRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{SCHEMA_LINE}").unwrap();
    writeln!(out, "{CSV_HEADER}").unwrap();
    for r in rows {
        writeln!(out, "{}", r.to_csv()).unwrap();
    }
    out
}
