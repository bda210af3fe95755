//! Subcommands. Each one writes a human-readable report; verdict commands
//! end it with a single `VERDICT` line taken from the core verdict.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtime_core::channels::{adjoint_channel, channel_from_state, kraus_from_choi, naimark_dilate, stinespring_from_kraus};
use qtime_core::orientation::{is_time_oriented_state, thm6_report, DEFAULT_SAMPLES, ORIENTATION_TOL};
use qtime_core::separability::{
    decomposability_test, ppt_test, prop2_transfer, separability_verdict, PptVerdict, VerdictReason,
    DEFAULT_DECOMPOSITION_BUDGET, DEFAULT_FW_BUDGET, NAIMARK_TOL, SEPARABLE_RESIDUAL,
};
use qtime_core::states::{pad_spectrum, pure_ppt_spectrum, schmidt_decompose};
use qtime_core::{BipartiteState, ComplexMatrix, OrientationReport, RngStream, Sign, Subsystem, Verdict};

use crate::ensemble::{run_ensemble, to_csv, EnsembleSpec, Family};
use crate::error::CliError;
use crate::qmat::{parse_qmat, parse_qpovm, write_qmat, QmatContent};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "qtime", version, about = "Entanglement criteria, dilations and time-orientation checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partial-transpose spectrum and PPT verdict.
    Ppt(InputArgs),
    /// Schmidt decomposition of a pure state or vector.
    Schmidt(InputArgs),
    /// Choi matrix of the adjoint channel and its partial-transpose check.
    Choi(OutputArgs),
    /// Kraus operators of the channel with Choi matrix rho.
    Kraus(OutputArgs),
    /// Minimal Stinespring dilation of the channel with Choi matrix rho.
    Stinespring(OutputArgs),
    /// Naimark dilation of a POVM file.
    Naimark(NaimarkArgs),
    /// Separability verdict with a decomposition certificate.
    Sep(SearchArgs),
    /// CP + co-CP split of a Choi matrix.
    Decomp(DecompArgs),
    /// Time-orientation checks on the minimal dilation.
    Orient(OrientArgs),
    /// Separability verdict with both orientation checks.
    Thm6(Thm6Args),
    /// Seeded ensemble experiment written as CSV.
    Ensemble(EnsembleArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// QMAT input file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Dimension of A, for files without a `bipartite` line.
    #[arg(long = "dimA")]
    pub dim_a: Option<usize>,
    /// Dimension of B, for files without a `bipartite` line.
    #[arg(long = "dimB")]
    pub dim_b: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Write the resulting matrix as QMAT.
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NaimarkArgs {
    /// QPOVM input file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Write the dilation isometry as QMAT.
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_FW_BUDGET)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the separable approximation as QMAT.
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecompArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_DECOMPOSITION_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignChoice {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Args)]
pub struct OrientArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Orientation of B; A always carries the reverse orientation.
    #[arg(long = "sign-b", value_enum, default_value_t = SignChoice::Both)]
    pub sign_b: SignChoice,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = ORIENTATION_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct Thm6Args {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_FW_BUDGET)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// werner, isotropic, induced, separable, tiles or mixed.
    #[arg(long)]
    pub family: String,
    /// Family parameter `K=V` (p, pmin, pmax, d, k, m); repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, String)>,
    #[arg(long = "dimA", default_value_t = 2)]
    pub dim_a: usize,
    #[arg(long = "dimB", default_value_t = 2)]
    pub dim_b: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_FW_BUDGET)]
    pub budget: usize,
    #[arg(long = "decomp-budget", default_value_t = 200)]
    pub decomp_budget: usize,
    /// Fill the wall_ms column (makes the output machine-dependent).
    #[arg(long)]
    pub timing: bool,
    #[arg(long = "out")]
    pub out: PathBuf,
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((k.to_string(), v.to_string())),
        _ => Err(format!("expected K=V, got `{s}`")),
    }
}

/// Compact decimal: 12 significant digits, trailing zeros dropped.
pub fn num(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded:?}")
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_qmat(path: &Path) -> Result<QmatContent, CliError> {
    parse_qmat(&read(path)?).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn explicit_dims(args: &InputArgs) -> Result<Option<(usize, usize)>, CliError> {
    match (args.dim_a, args.dim_b) {
        (Some(a), Some(b)) => Ok(Some((a, b))),
        (None, None) => Ok(None),
        _ => Err(CliError::Input("--dimA and --dimB must be given together".into())),
    }
}

fn load_state(args: &InputArgs) -> Result<BipartiteState, CliError> {
    let dims = explicit_dims(args)?;
    match (load_qmat(&args.input)?, dims) {
        (QmatContent::State(s), None) => Ok(s),
        (QmatContent::State(s), Some(d)) if d == s.dims() => Ok(s),
        (QmatContent::State(s), Some((a, b))) => Err(CliError::Input(format!(
            "--dimA {a} --dimB {b} contradicts the file's bipartite {}x{}",
            s.d_a(),
            s.d_b()
        ))),
        (QmatContent::Matrix(m), Some((a, b))) => Ok(BipartiteState::new(m, a, b)?),
        (QmatContent::Matrix(_), None) => Err(CliError::Input(
            "matrix has no `bipartite` line; pass --dimA and --dimB".into(),
        )),
    }
}

fn load_raw(args: &InputArgs) -> Result<(ComplexMatrix, usize, usize), CliError> {
    let dims = explicit_dims(args)?;
    match (load_qmat(&args.input)?, dims) {
        (QmatContent::State(s), None) => {
            let (a, b) = s.dims();
            Ok((s.into_rho(), a, b))
        }
        (content, Some((a, b))) => Ok((content.matrix().clone(), a, b)),
        (QmatContent::Matrix(_), None) => Err(CliError::Input(
            "matrix has no `bipartite` line; pass --dimA and --dimB".into(),
        )),
    }
}

fn header(out: &mut String, command: &str, config: &[(&str, String)]) {
    writeln!(out, "qtime {VERSION} {command}").unwrap();
    let cfg: Vec<String> = config.iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(out, "config {}", cfg.join(" ")).unwrap();
}

fn input_config(args: &InputArgs) -> (&'static str, String) {
    ("in", args.input.display().to_string())
}

/// Runs a command; returns the report text or an error carrying its exit code.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Ppt(a) => cmd_ppt(a),
        Command::Schmidt(a) => cmd_schmidt(a),
        Command::Choi(a) => cmd_choi(a),
        Command::Kraus(a) => cmd_kraus(a),
        Command::Stinespring(a) => cmd_stinespring(a),
        Command::Naimark(a) => cmd_naimark(a),
        Command::Sep(a) => cmd_sep(a),
        Command::Decomp(a) => cmd_decomp(a),
        Command::Orient(a) => cmd_orient(a),
        Command::Thm6(a) => cmd_thm6(a),
        Command::Ensemble(a) => cmd_ensemble(a),
    }
}

pub fn cmd_ppt(args: &InputArgs) -> Result<String, CliError> {
    let rho = load_state(args)?;
    let report = ppt_test(&rho)?;
    let mut out = String::new();
    header(&mut out, "ppt", &[input_config(args)]);
    writeln!(out, "dims {}x{} decisive={}", rho.d_a(), rho.d_b(), report.decisive).unwrap();
    writeln!(out, "spectrum [{}]", list(&report.spectrum)).unwrap();
    let verdict = match report.verdict {
        PptVerdict::Entangled => "ENTANGLED",
        PptVerdict::PptPass => "PASS",
    };
    writeln!(out, "min_eig={} VERDICT {verdict}", num(report.min_eigenvalue)).unwrap();
    Ok(out)
}

pub fn cmd_schmidt(args: &InputArgs) -> Result<String, CliError> {
    let dims = explicit_dims(args)?;
    let (psi, d_a, d_b) = match (load_qmat(&args.input)?, dims) {
        (QmatContent::Matrix(m), Some((a, b))) if m.cols() == 1 => (m, a, b),
        (content, dims) => {
            let rho = match (content, dims) {
                (QmatContent::State(s), _) => s,
                (QmatContent::Matrix(m), Some((a, b))) => BipartiteState::new(m, a, b)?,
                (QmatContent::Matrix(_), None) => {
                    return Err(CliError::Input("pass --dimA and --dimB for a raw vector or matrix".into()))
                }
            };
            let (a, b) = rho.dims();
            let psi = rho
                .pure_vector(qtime_core::separability::PURITY_TOL)
                .ok_or_else(|| CliError::Input("state is not pure".into()))?;
            (psi, a, b)
        }
    };
    let s = schmidt_decompose(&psi, d_a, d_b)?;
    let mut out = String::new();
    header(&mut out, "schmidt", &[input_config(args)]);
    writeln!(out, "dims {d_a}x{d_b}").unwrap();
    writeln!(out, "coefficients [{}]", list(&s.coefficients)).unwrap();
    let predicted = pad_spectrum(&pure_ppt_spectrum(&s), d_a * d_b);
    writeln!(out, "predicted_pt_spectrum [{}]", list(&predicted)).unwrap();
    let verdict = if s.rank() >= 2 { Verdict::Entangled } else { Verdict::Separable };
    writeln!(out, "rank={} VERDICT {}", s.rank(), verdict.label()).unwrap();
    Ok(out)
}

pub fn cmd_choi(args: &OutputArgs) -> Result<String, CliError> {
    let rho = load_state(&args.input)?;
    let phi = channel_from_state(&rho);
    let star = adjoint_channel(&phi);
    let defect = (star.choi() - &rho.partial_transpose(Subsystem::A)).frob_norm();
    let mut out = String::new();
    header(&mut out, "choi", &[input_config(&args.input)]);
    writeln!(out, "channel M_{} -> M_{}", rho.d_a(), rho.d_b()).unwrap();
    writeln!(out, "min_choi_eig={}", num(phi.min_choi_eigenvalue()?)).unwrap();
    writeln!(out, "adjoint_choi_min_eig={}", num(star.min_choi_eigenvalue()?)).unwrap();
    writeln!(out, "adjoint_vs_partial_transpose={}", num(defect)).unwrap();
    if let Some(path) = &args.out {
        write(path, &write_qmat(star.choi(), None))?;
        writeln!(out, "wrote adjoint Choi matrix to {}", path.display()).unwrap();
    }
    Ok(out)
}

pub fn cmd_kraus(args: &OutputArgs) -> Result<String, CliError> {
    let rho = load_state(&args.input)?;
    let phi = channel_from_state(&rho);
    let kraus = kraus_from_choi(&phi)?;
    let mut out = String::new();
    header(&mut out, "kraus", &[input_config(&args.input)]);
    writeln!(out, "operators={} shape={}x{}", kraus.len(), rho.d_b(), rho.d_a()).unwrap();
    writeln!(out, "reconstruction_residual={}", num(kraus.reconstruction_residual(&phi))).unwrap();
    if let Some(path) = &args.out {
        let (db, da) = (rho.d_b(), rho.d_a());
        let stacked = ComplexMatrix::from_fn(kraus.len() * db, da, |r, c| kraus.operators()[r / db][(r % db, c)]);
        let mut text = String::from("# Kraus operators stacked vertically\n");
        text.push_str(&write_qmat(&stacked, None));
        write(path, &text)?;
        writeln!(out, "wrote stacked Kraus operators to {}", path.display()).unwrap();
    }
    Ok(out)
}

pub fn cmd_stinespring(args: &OutputArgs) -> Result<String, CliError> {
    let rho = load_state(&args.input)?;
    let phi = channel_from_state(&rho);
    let dil = stinespring_from_kraus(&kraus_from_choi(&phi)?)?;
    let mut out = String::new();
    header(&mut out, "stinespring", &[input_config(&args.input)]);
    writeln!(out, "multiplicity={} dilation_dim={}", dil.multiplicity(), dil.dilation_dim()).unwrap();
    writeln!(out, "isometry_defect={}", num(dil.isometry_defect())).unwrap();
    writeln!(out, "reconstruction_residual={}", num(dil.reconstruction_residual(&phi))).unwrap();
    if let Some(path) = &args.out {
        write(path, &write_qmat(dil.v(), None))?;
        writeln!(out, "wrote v to {}", path.display()).unwrap();
    }
    Ok(out)
}

pub fn cmd_naimark(args: &NaimarkArgs) -> Result<String, CliError> {
    let povm = parse_qpovm(&read(&args.input)?).map_err(|source| CliError::Parse {
        path: args.input.display().to_string(),
        source,
    })?;
    let nd = naimark_dilate(&povm)?;
    let mut out = String::new();
    header(&mut out, "naimark", &[("in", args.input.display().to_string())]);
    writeln!(out, "outcomes={} (with completion) dilation_dim={}", nd.outcomes(), nd.dim() * nd.outcomes()).unwrap();
    let (iso, pov, proj) = (nd.isometry_defect(), nd.povm_defect(), nd.projection_defect());
    writeln!(out, "isometry_defect={} povm_defect={} projection_defect={}", num(iso), num(pov), num(proj)).unwrap();
    if let Some(path) = &args.out {
        write(path, &write_qmat(nd.vtilde(), None))?;
        writeln!(out, "wrote isometry to {}", path.display()).unwrap();
    }
    let pass = iso.max(pov).max(proj) <= NAIMARK_TOL;
    writeln!(out, "VERDICT {}", if pass { "PASS" } else { "FAIL" }).unwrap();
    Ok(out)
}

pub fn cmd_sep(args: &SearchArgs) -> Result<String, CliError> {
    let rho = load_state(&args.input)?;
    let mut rng = RngStream::new(args.seed, 0);
    let report = separability_verdict(&rho, args.budget, &mut rng)?;
    let mut out = String::new();
    header(
        &mut out,
        "sep",
        &[input_config(&args.input), ("budget", args.budget.to_string()), ("seed", args.seed.to_string())],
    );
    writeln!(out, "dims {}x{} ppt_min_eig={} decisive={}", rho.d_a(), rho.d_b(), num(report.ppt.min_eigenvalue), report.ppt.decisive)
        .unwrap();
    let reason = match report.reason {
        VerdictReason::SchmidtRank(r) => format!("pure state with Schmidt rank {r}"),
        VerdictReason::PptViolation(e) => format!("partial transpose has eigenvalue {}", num(e)),
        VerdictReason::PptDecisive => "PPT holds and is sufficient in these dimensions".into(),
        VerdictReason::Decomposition => format!("decomposition within {}", num(SEPARABLE_RESIDUAL)),
        VerdictReason::Inconclusive => {
            "PPT holds but no decomposition within the residual was found (indicative, not a proof of entanglement)"
                .into()
        }
    };
    writeln!(out, "reason: {reason}").unwrap();
    if let Some(fw) = &report.fw {
        writeln!(
            out,
            "search residual={} iterations={} lower_bound={} atoms={}",
            num(fw.residual),
            fw.iterations,
            num(fw.lower_bound),
            fw.decomposition.len()
        )
        .unwrap();
        if let Some(path) = &args.out {
            let sigma = fw.decomposition.mixture().hermitian_part();
            write(path, &write_qmat(&sigma, Some(rho.dims())))?;
            writeln!(out, "wrote separable approximation to {}", path.display()).unwrap();
        }
    }
    if let Some(cert) = &report.certificate {
        let c = cert.dilation.certificate();
        writeln!(out, "certificate terms={} outcomes={}", cert.decomposition.len(), cert.dilation.outcomes()).unwrap();
        writeln!(
            out,
            "  reconstruction={} holevo={} naimark_isometry={} naimark_povm={}",
            num(cert.reconstruction_residual),
            num(cert.holevo_residual),
            num(cert.naimark_isometry_defect),
            num(cert.naimark_povm_defect)
        )
        .unwrap();
        writeln!(
            out,
            "  image_commutator={} homomorphism={} star={} channel={}",
            num(c.image_commutator),
            num(c.homomorphism),
            num(c.star),
            num(c.channel_reconstruction)
        )
        .unwrap();
    }
    writeln!(out, "VERDICT {}", report.verdict.label()).unwrap();
    Ok(out)
}

pub fn cmd_decomp(args: &DecompArgs) -> Result<String, CliError> {
    let (c, d_a, d_b) = load_raw(&args.input)?;
    let cert = decomposability_test(&c, d_a, d_b, args.budget)?;
    let moved = prop2_transfer(&cert, &c);
    let (mp, mq) = cert.min_eigenvalues()?;
    let mut out = String::new();
    header(&mut out, "decomp", &[input_config(&args.input), ("budget", args.budget.to_string())]);
    writeln!(out, "dims {d_a}x{d_b} iterations={}", cert.iterations).unwrap();
    writeln!(out, "residual={} min_eig_p={} min_eig_q={}", num(cert.residual), num(mp), num(mq)).unwrap();
    writeln!(out, "transferred_residual={} (for the partial transpose on A)", num(moved.residual)).unwrap();
    writeln!(out, "VERDICT {}", if cert.is_feasible() { "PASS" } else { "FAIL" }).unwrap();
    Ok(out)
}

fn orientation_lines(out: &mut String, label: &str, r: &OrientationReport) {
    writeln!(
        out,
        "{label}: residual={} same={} opposite={} image_commutator={}",
        num(r.residual()),
        num(r.same_orientation_residual),
        num(r.opposite_orientation_residual),
        num(r.image_commutator)
    )
    .unwrap();
    writeln!(
        out,
        "  jordan={} star={} fd={} fd_discrepancy={} pairs={}",
        num(r.jordan_residual),
        num(r.star_residual),
        num(r.fd_residual),
        num(r.fd_discrepancy),
        r.pairs
    )
    .unwrap();
}

pub fn cmd_orient(args: &OrientArgs) -> Result<String, CliError> {
    let rho = load_state(&args.input)?;
    if !(args.tol >= 0.0) {
        return Err(CliError::Input("--tol must be non-negative".into()));
    }
    let mut rng = RngStream::new(args.seed, 0);
    let signs: &[Sign] = match args.sign_b {
        SignChoice::Plus => &[Sign::Plus],
        SignChoice::Minus => &[Sign::Minus],
        SignChoice::Both => &[Sign::Plus, Sign::Minus],
    };
    let mut out = String::new();
    header(
        &mut out,
        "orient",
        &[
            input_config(&args.input),
            ("samples", args.samples.to_string()),
            ("seed", args.seed.to_string()),
            ("tol", num(args.tol)),
        ],
    );
    let mut pass = true;
    for &sign in signs {
        let r = is_time_oriented_state(&rho, sign, args.samples, &mut rng)?;
        writeln!(out, "minimal dilation multiplicity={}", r.multiplicity).unwrap();
        orientation_lines(&mut out, &format!("A- B{}", sign.symbol()), &r.report);
        pass &= r.report.preserves(args.tol);
    }
    writeln!(out, "VERDICT {}", if pass { "PASS" } else { "FAIL" }).unwrap();
    Ok(out)
}

pub fn cmd_thm6(args: &Thm6Args) -> Result<String, CliError> {
    let rho = load_state(&args.input)?;
    let mut rng = RngStream::new(args.seed, 0);
    let dual = thm6_report(&rho, args.budget, args.samples, &mut rng)?;
    let mut out = String::new();
    header(
        &mut out,
        "thm6",
        &[
            input_config(&args.input),
            ("budget", args.budget.to_string()),
            ("seed", args.seed.to_string()),
            ("samples", args.samples.to_string()),
        ],
    );
    writeln!(out, "sign convention: Phi([a,b]) = sA*sB*[Phi(a),Phi(b)]").unwrap();
    match dual.dilation {
        Some(kind) => writeln!(out, "dilation {kind:?}").unwrap(),
        None => writeln!(out, "dilation none").unwrap(),
    }
    if let Some(f) = &dual.forward {
        orientation_lines(&mut out, "A- B+", f);
    }
    if let Some(r) = &dual.reverse {
        orientation_lines(&mut out, "A- B-", r);
    }
    writeln!(out, "consistent={} note: {}", dual.consistent, dual.note).unwrap();
    writeln!(out, "VERDICT {}", dual.verdict().label()).unwrap();
    Ok(out)
}

pub fn cmd_ensemble(args: &EnsembleArgs) -> Result<String, CliError> {
    let spec = EnsembleSpec {
        family: Family::parse(&args.family)?,
        params: args.params.clone(),
        d_a: args.dim_a,
        d_b: args.dim_b,
        samples: args.samples,
        seed: args.seed,
        budget: args.budget,
        decomp_budget: args.decomp_budget,
        timing: args.timing,
    };
    let rows = run_ensemble(&spec)?;
    write(&args.out, &to_csv(&rows))?;
    let mut out = String::new();
    let params: Vec<String> = spec.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    header(
        &mut out,
        "ensemble",
        &[
            ("family", spec.family.name().to_string()),
            ("params", params.join(";")),
            ("dims", format!("{}x{}", spec.d_a, spec.d_b)),
            ("samples", spec.samples.to_string()),
            ("seed", spec.seed.to_string()),
            ("budget", spec.budget.to_string()),
            ("decomp_budget", spec.decomp_budget.to_string()),
            ("timing", spec.timing.to_string()),
        ],
    );
    for label in ["SEPARABLE", "ENTANGLED", "UNDECIDED"] {
        let count = rows.iter().filter(|r| r.verdict == label).count();
        writeln!(out, "{label} {count}").unwrap();
    }
    writeln!(out, "wrote {} rows to {}", rows.len(), args.out.display()).unwrap();
    Ok(out)
}
