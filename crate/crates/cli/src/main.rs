//! `biframe`: classify operators, compute and verify (K-)biframe bounds,
//! apply the biframe-preserving transforms and run the randomized theorem
//! suites. All input and output is JSON.
//!
//! Exit codes: 0 holds / feasible, 1 negative verdict (with witness),
//! 2 usage or parse error, 3 numerical failure.

mod formats;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biframe_core::biframe::{
    biframe_bounds, bounds_for_form, pair_form, verify_claimed_bounds, FormPolicy,
};
use biframe_core::generators::MatrixGenerator;
use biframe_core::harness::{run_suites, SuiteConfig, SUITE_IDS};
use biframe_core::linalg::range_basis;
use biframe_core::operator::profile;
use biframe_core::transforms::{
    kl_transform, lambda_shift_transform, phi_transform, projection_membership,
    unitary_conjugate, TransformResult,
};
use biframe_core::{BiframeError, ComplexMatrix, Subspace, ToleranceProfile, VectorPairSystem, C64};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use formats::{read_matrix, read_pair, write_json, MatrixFile, PairFile};

#[derive(Debug, Parser)]
#[command(name = "biframe", version, about = "K-biframe bounds and operator analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduced minimum modulus, rank, EP / normal / semi-regular tests.
    Classify { matrix: PathBuf },
    /// Optimal bounds of a pair, optionally against K and on a subspace.
    Bounds {
        pair: PathBuf,
        #[arg(long)]
        k: Option<PathBuf>,
        /// Matrix whose columns span the subspace.
        #[arg(long)]
        subspace: Option<PathBuf>,
        /// Use (G + G^H)/2 when the pair operator is not Hermitian.
        #[arg(long)]
        hermitian_part: bool,
    },
    /// Check claimed bounds; reports the violated side with a witness.
    Verify {
        pair: PathBuf,
        #[arg(long)]
        k: Option<PathBuf>,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
    },
    /// Apply a biframe-preserving transform and certify the result.
    Transform {
        #[arg(long, value_enum)]
        kind: TransformKind,
        pair: PathBuf,
        /// Defaults to the identity.
        #[arg(long)]
        k: Option<PathBuf>,
        /// Inner inverse of K (kind kl).
        #[arg(long)]
        l: Option<PathBuf>,
        /// Unitary (kind unitary).
        #[arg(long)]
        u: Option<PathBuf>,
        /// Operator T (kinds phi, shift).
        #[arg(long)]
        t: Option<PathBuf>,
        /// Real part of the shift (kind shift).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda_im: f64,
        /// Where to write the transformed pair.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a randomized theorem suite (or `all`).
    CheckTheorems {
        #[arg(long)]
        theorem: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        dim: usize,
        /// Vectors per generated pair; defaults to dim + 2.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        parallel: bool,
    },
    /// Write seeded random operators or pairs.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Vectors per pair (kind kbiframe); defaults to dim + 2.
        #[arg(long)]
        count: Option<usize>,
        /// Operator K (kinds inner-inverse, kbiframe).
        #[arg(long)]
        k: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformKind {
    Kl,
    Unitary,
    Phi,
    Shift,
    Projection,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    Unitary,
    Ep,
    Normal,
    Idempotent,
    InnerInverse,
    Kbiframe,
}

enum Failure {
    Usage(String),
    Core(BiframeError),
}

impl From<BiframeError> for Failure {
    fn from(e: BiframeError) -> Self {
        Failure::Core(e)
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Usage(e)
    }
}

type CmdResult = Result<bool, Failure>;

fn exit_code(e: &BiframeError) -> u8 {
    match e {
        BiframeError::NonHermitianForm { .. }
        | BiframeError::NotAKBiframe
        | BiframeError::InnerInverseViolated { .. }
        | BiframeError::NotUnitary { .. }
        | BiframeError::NotEP
        | BiframeError::HypothesisViolated(_) => 1,
        BiframeError::DimensionMismatch(_)
        | BiframeError::InvalidInput(_)
        | BiframeError::TrivialSubspace
        | BiframeError::DegenerateK => 2,
        BiframeError::NotHermitian { .. }
        | BiframeError::NoConvergence { .. }
        | BiframeError::GenerationFailed(_) => 3,
    }
}

fn error_json(e: &BiframeError) -> serde_json::Value {
    let mut v = json!({ "error": e.name(), "message": e.to_string() });
    if let BiframeError::NonHermitianForm {
        defect,
        witness,
        imaginary_part,
    } = e
    {
        v["defect"] = json!(defect);
        v["witness"] = json!(witness);
        v["imaginary_part"] = json!(imaginary_part);
    }
    v
}

fn print_json<T: Serialize>(value: &T) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    // a closed pipe (e.g. `| head`) is not an error worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn env_tol(name: &str, default: f64) -> Result<f64, String> {
    match std::env::var(name) {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("{name}={s:?}: {e}")),
        Err(_) => Ok(default),
    }
}

fn tolerances() -> Result<ToleranceProfile, String> {
    let d = ToleranceProfile::default();
    ToleranceProfile::new(
        env_tol("BIFRAME_TOL_RANK_REL", d.rank_rel)?,
        env_tol("BIFRAME_TOL_PSD_ABS", d.psd_abs)?,
        env_tol("BIFRAME_TOL_EQ_ABS", d.eq_abs)?,
    )
    .map_err(|e| e.to_string())
}

fn optional_matrix(path: Option<&Path>) -> Result<Option<ComplexMatrix>, String> {
    path.map(read_matrix).transpose()
}

fn required_matrix(path: Option<&Path>, flag: &str) -> Result<ComplexMatrix, String> {
    optional_matrix(path)?.ok_or_else(|| format!("--{flag} is required for this kind"))
}

fn cmd_classify(matrix: &Path, tol: &ToleranceProfile) -> CmdResult {
    let t = read_matrix(matrix)?;
    if !t.is_square() {
        return Err(Failure::Usage(format!("{} is not square", matrix.display())));
    }
    print_json(&profile(&t, tol)?);
    Ok(true)
}

fn cmd_bounds(
    pair: &Path,
    k: Option<&Path>,
    subspace: Option<&Path>,
    hermitian_part: bool,
    tol: &ToleranceProfile,
) -> CmdResult {
    let p = read_pair(pair)?;
    let k = optional_matrix(k)?;
    let sub = match subspace {
        Some(path) => {
            let m = read_matrix(path)?;
            if m.rows() != p.dim() {
                return Err(Failure::Usage(format!(
                    "subspace vectors have length {} but the pair lives in dimension {}",
                    m.rows(),
                    p.dim()
                )));
            }
            Some(range_basis(&m, tol)?)
        }
        None => None,
    };
    let report = if k.is_none() && sub.is_none() && !hermitian_part {
        biframe_bounds(&p, tol)?
    } else {
        let policy = if hermitian_part {
            FormPolicy::HermitianPart
        } else {
            FormPolicy::Strict
        };
        let form = pair_form(&p, policy, tol)?;
        let k = k.unwrap_or_else(|| ComplexMatrix::identity(p.dim()));
        bounds_for_form(&form, &k, sub.as_ref(), tol)?
    };
    print_json(&report);
    Ok(report.feasible)
}

fn cmd_verify(
    pair: &Path,
    k: Option<&Path>,
    alpha: f64,
    beta: f64,
    tol: &ToleranceProfile,
) -> CmdResult {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Failure::Usage("--alpha and --beta must be positive".into()));
    }
    let p = read_pair(pair)?;
    let k = optional_matrix(k)?;
    let verdict = verify_claimed_bounds(&p, k.as_ref(), alpha, beta, tol)?;
    print_json(&verdict);
    Ok(verdict.holds())
}

fn subspace_json(s: &Subspace) -> serde_json::Value {
    json!({ "dim": s.dim(), "ambient_dim": s.ambient_dim(), "basis": MatrixFile::from_matrix(s.basis()) })
}

fn transform_json(r: &TransformResult) -> serde_json::Value {
    json!({
        "provenance": r.provenance,
        "target_operator": MatrixFile::from_matrix(&r.target_operator),
        "domain": subspace_json(&r.domain),
        "report": r.report,
        "input_report": r.input_report,
        "proof_alpha": r.proof_alpha,
        "proof_beta": r.proof_beta,
        "identities": r.identities,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_transform(
    kind: TransformKind,
    pair: &Path,
    k: Option<&Path>,
    l: Option<&Path>,
    u: Option<&Path>,
    t: Option<&Path>,
    lambda: C64,
    out: Option<&Path>,
    tol: &ToleranceProfile,
) -> CmdResult {
    let p = read_pair(pair)?;
    let k = optional_matrix(k)?.unwrap_or_else(|| ComplexMatrix::identity(p.dim()));
    let (new_pair, body, ok): (VectorPairSystem, serde_json::Value, bool) = match kind {
        TransformKind::Kl => {
            let l = required_matrix(l, "l")?;
            let r = kl_transform(&p, &k, &l, tol)?;
            (r.pair.clone(), transform_json(&r), r.report.feasible)
        }
        TransformKind::Unitary => {
            let u = required_matrix(u, "u")?;
            let (r, phi_report) = unitary_conjugate(&p, &k, &u, tol)?;
            let mut body = transform_json(&r);
            body["phi_report"] = json!(phi_report);
            let ok = r.report.feasible && phi_report.feasible;
            (r.pair.clone(), body, ok)
        }
        TransformKind::Phi => {
            let t = required_matrix(t, "t")?;
            let r = phi_transform(&p, &t, &k, tol)?;
            (r.pair.clone(), transform_json(&r), r.report.feasible)
        }
        TransformKind::Shift => {
            let t = required_matrix(t, "t")?;
            let r = lambda_shift_transform(&p, &t, &k, lambda, tol)?;
            (r.pair.clone(), transform_json(&r), r.report.feasible)
        }
        TransformKind::Projection => {
            let m = projection_membership(&p, &k, tol)?;
            let body = json!({
                "provenance": { "transform": "projection", "parameters": [] },
                "report": m.report,
                "input_report": m.input_report,
                "norm_constant": m.norm_constant,
                "gamma_constant": m.gamma_constant,
            });
            (p.clone(), body, m.report.feasible)
        }
    };
    if let Some(path) = out {
        write_json(path, &PairFile::from_pair(&new_pair))?;
    }
    print_json(&body);
    Ok(ok)
}

fn cmd_check_theorems(
    theorem: &str,
    trials: usize,
    dim: usize,
    count: Option<usize>,
    seed: u64,
    parallel: bool,
    tol: &ToleranceProfile,
) -> CmdResult {
    if theorem != "all" && !SUITE_IDS.contains(&theorem) {
        return Err(Failure::Usage(format!(
            "unknown theorem {theorem:?}; expected all or one of {}",
            SUITE_IDS.join(", ")
        )));
    }
    if trials == 0 || dim < 2 {
        return Err(Failure::Usage("need --trials >= 1 and --dim >= 2".into()));
    }
    let mut cfg = SuiteConfig::new(theorem, trials, dim, seed);
    cfg.count = count.unwrap_or(dim + 2);
    cfg.parallel = parallel;
    cfg.tol = *tol;
    let reports = run_suites(&cfg).map_err(|e| match e {
        BiframeError::InvalidInput(m) => Failure::Usage(m),
        other => Failure::Core(other),
    })?;
    let ok = reports.iter().all(|r| r.passed());
    if theorem == "all" {
        print_json(&reports);
    } else {
        print_json(&reports[0]);
    }
    Ok(ok)
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), String> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            print_json(value);
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    kind: GenKind,
    dim: Option<usize>,
    rank: Option<usize>,
    seed: u64,
    count: Option<usize>,
    k: Option<&Path>,
    out: Option<&Path>,
    tol: &ToleranceProfile,
) -> CmdResult {
    let mut g = MatrixGenerator::with_tolerance(seed, *tol);
    let need_dim = || dim.filter(|&d| d >= 1).ok_or_else(|| "--dim is required".to_string());
    match kind {
        GenKind::Unitary => emit(out, &MatrixFile::from_matrix(&g.unitary(need_dim()?)?))?,
        GenKind::Ep => {
            let n = need_dim()?;
            emit(out, &MatrixFile::from_matrix(&g.ep(n, rank.unwrap_or(n))?))?
        }
        GenKind::Normal => {
            let n = need_dim()?;
            emit(out, &MatrixFile::from_matrix(&g.normal(n, rank.unwrap_or(n))?))?
        }
        GenKind::Idempotent => {
            let n = need_dim()?;
            let r = rank.ok_or_else(|| "--rank is required for idempotent".to_string())?;
            emit(out, &MatrixFile::from_matrix(&g.idempotent(n, r)?))?
        }
        GenKind::InnerInverse => {
            let k = required_matrix(k, "k")?;
            emit(out, &MatrixFile::from_matrix(&g.inner_inverse(&k)?))?
        }
        GenKind::Kbiframe => {
            let k = match optional_matrix(k)? {
                Some(k) => k,
                None => ComplexMatrix::identity(need_dim()?),
            };
            let p = g.k_biframe(&k, count.unwrap_or(k.rows() + 2))?;
            emit(out, &PairFile::from_pair(&p))?
        }
    }
    Ok(true)
}

fn run(cli: Cli) -> CmdResult {
    let tol = tolerances()?;
    match cli.command {
        Command::Classify { matrix } => cmd_classify(&matrix, &tol),
        Command::Bounds {
            pair,
            k,
            subspace,
            hermitian_part,
        } => cmd_bounds(&pair, k.as_deref(), subspace.as_deref(), hermitian_part, &tol),
        Command::Verify { pair, k, alpha, beta } => cmd_verify(&pair, k.as_deref(), alpha, beta, &tol),
        Command::Transform {
            kind,
            pair,
            k,
            l,
            u,
            t,
            lambda,
            lambda_im,
            out,
        } => cmd_transform(
            kind,
            &pair,
            k.as_deref(),
            l.as_deref(),
            u.as_deref(),
            t.as_deref(),
            C64::new(lambda, lambda_im),
            out.as_deref(),
            &tol,
        ),
        Command::CheckTheorems {
            theorem,
            trials,
            dim,
            count,
            seed,
            parallel,
        } => cmd_check_theorems(&theorem, trials, dim, count, seed, parallel, &tol),
        Command::Gen {
            kind,
            dim,
            rank,
            seed,
            count,
            k,
            out,
        } => cmd_gen(kind, dim, rank, seed, count, k.as_deref(), out.as_deref(), &tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            print_json(&error_json(&e));
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
