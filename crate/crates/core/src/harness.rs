//! Seeded randomized theorem suites.
//!
//! Trial `i` of a run with base seed `s` draws everything from
//! `trial_seed(s, i)`, so results do not depend on scheduling. With the
//! `parallel` feature trials are spread over the rayon pool; without it
//! they run in order on the calling thread.

use std::time::Instant;

use serde::Serialize;

use crate::biframe::BoundsReport;
use crate::error::{BiframeError, Result};
use crate::generators::{MatrixGenerator, TrialSeed};
use crate::linalg::{
    pinv, range_basis, rank, subspace_eq, svd, ComplexMatrix, ToleranceProfile, C64,
};
use crate::operator::{commutator_norm, gamma, is_ep, is_semi_regular, phi};
use crate::transforms::{
    kl_transform, lambda_shift_transform, phi_membership, phi_transform, projection_membership,
    unitary_conjugate,
};

/// Absolute tolerance on every margin a suite checks.
pub const SUITE_TOL: f64 = 1e-8;

pub const SUITE_IDS: [&str; 11] = [
    "t2.1", "t2.2", "t2.3-phi", "t2.3-proj", "t2.4", "p2.1", "p2.2", "l2.1", "t1.3", "p1.4",
    "finite-sr",
];

/// What each suite checks, for `--help` style listings.
pub fn describe(id: &str) -> Option<&'static str> {
    Some(match id {
        "t2.1" => "KL transform of a K-biframe is a K-biframe with beta' <= beta ||KL||^2",
        "t2.2" => "(T - lambda) transform for invertible T commuting with K, |lambda| < gamma(T)",
        "t2.3-phi" => "a K-biframe is a phi(K)-biframe",
        "t2.3-proj" => "a K-biframe is a projector-onto-R(K) biframe, with the stated constants",
        "t2.4" => "phi(T) transform for Hermitian singular T commuting with K, on R(T)",
        "p2.1" => "unitary conjugation gives (UKU^H)- and (U phi(K) U^H)-biframes",
        "p2.2" => "phi(T) is EP for EP T",
        "l2.1" => "R(phi(K)) = R(K)",
        "t1.3" => "a polynomial in T commutes with T^+ (T invertible or EP)",
        "p1.4" => "normal operators are EP",
        "finite-sr" => "semi-regular iff invertible; T - lambda stays semi-regular for |lambda| < gamma(T)",
        _ => return None,
    })
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub theorem: String,
    pub trials: usize,
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    pub parallel: bool,
    pub tol: ToleranceProfile,
}

impl SuiteConfig {
    pub fn new(theorem: &str, trials: usize, dim: usize, seed: u64) -> Self {
        SuiteConfig {
            theorem: theorem.to_string(),
            trials,
            dim,
            count: dim + 2,
            seed,
            parallel: false,
            tol: ToleranceProfile::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialFailure {
    pub seed: u64,
    pub trial: usize,
    pub stage: String,
    pub witness: Option<Vec<C64>>,
    pub margins: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub theorem_id: String,
    pub trials: usize,
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    pub failures: Vec<TrialFailure>,
    pub tolerances: ToleranceProfile,
    pub suite_tol: f64,
    pub elapsed_ms: u64,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// SplitMix64 step applied to `base + (i + 1) * golden`.
pub fn trial_seed(base: u64, trial: usize) -> u64 {
    let mut z = base.wrapping_add((trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A failed check inside one trial, before seed and index are attached.
struct Miss {
    stage: String,
    witness: Option<Vec<C64>>,
    margins: Vec<(String, f64)>,
}

impl Miss {
    fn new(stage: &str) -> Self {
        Miss {
            stage: stage.to_string(),
            witness: None,
            margins: Vec::new(),
        }
    }

    fn margin(mut self, name: &str, v: f64) -> Self {
        self.margins.push((name.to_string(), v));
        self
    }

    fn from_report(stage: &str, r: &BoundsReport) -> Self {
        let mut m = Miss::new(stage)
            .margin("alpha_sup", r.alpha_sup)
            .margin("lambda_min_form", r.lambda_min_form);
        m.witness = r.witness.as_ref().map(|w| w.vector.clone());
        m
    }

    fn from_error(stage: &str, e: BiframeError) -> Self {
        Miss::new(&format!("{stage}: {} ({e})", e.name()))
    }
}

type Outcome = std::result::Result<(), Miss>;

trait Stage<T> {
    fn at(self, stage: &str) -> std::result::Result<T, Miss>;
}

impl<T> Stage<T> for Result<T> {
    fn at(self, stage: &str) -> std::result::Result<T, Miss> {
        self.map_err(|e| Miss::from_error(stage, e))
    }
}

fn require(ok: bool, miss: impl FnOnce() -> Miss) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(miss())
    }
}

fn feasible(stage: &str, r: &BoundsReport) -> Outcome {
    require(r.feasible, || Miss::from_report(stage, r))
}

fn lower(r: &BoundsReport) -> f64 {
    r.alpha_opt.unwrap_or(r.alpha_sup)
}

fn t2_1(t: &TrialSeed, tol: &ToleranceProfile) -> Outcome {
    let mut g = MatrixGenerator::with_tolerance(t.seed, *tol);
    let k = g.random_rank_operator(t.dim).at("generate K")?;
    let l = g.inner_inverse(&k).at("generate L")?;
    let p = g.k_biframe(&k, t.count).at("generate pair")?;
    let r = kl_transform(&p, &k, &l, tol).at("transform")?;
    feasible("output bounds", &r.report)?;
    let beta_margin = r.proof_beta + SUITE_TOL - r.report.beta_opt;
    require(beta_margin >= 0.0, || {
        Miss::new("upper bound scaling").margin("beta_margin", beta_margin)
    })?;
    let alpha_in = lower(&r.input_report);
    let alpha_margin = lower(&r.report) - alpha_in + SUITE_TOL * alpha_in.max(1.0);
    require(alpha_margin >= 0.0, || {
        Miss::new("lower bound preserved").margin("alpha_margin", alpha_margin)
    })
}

fn t2_2(t: &TrialSeed, tol: &ToleranceProfile) -> Outcome {
    let mut g = MatrixGenerator::with_tolerance(t.seed, *tol);
    let (k, op) = g.commuting_family(t.dim).at("generate family")?;
    let gam = gamma(&op, tol).at("gamma")?;
    let lambda = C64::from_polar(gam * g.uniform(0.0, 0.9), g.uniform(0.0, std::f64::consts::TAU));
    let p = g.k_biframe(&k, t.count).at("generate pair")?;
    let r = lambda_shift_transform(&p, &op, &k, lambda, tol).at("transform")?;
    require(r.domain.is_full(), || {
        Miss::new("domain is the whole space").margin("domain_dim", r.domain.dim() as f64)
    })?;
    feasible("output bounds", &r.report)
}

fn membership_input(t: &TrialSeed, tol: &ToleranceProfile) -> std::result::Result<(ComplexMatrix, crate::biframe::VectorPairSystem), Miss> {
    let mut g = MatrixGenerator::with_tolerance(t.seed, *tol);
    let k = g.random_rank_operator(t.dim).at("generate K")?;
    let p = g.k_biframe(&k, t.count).at("generate pair")?;
    Ok((k, p))
}

fn t2_3_phi(t: &TrialSeed, tol: &ToleranceProfile) -> Outcome {
    let (k, p) = membership_input(t, tol)?;
    let m = phi_membership(&p, &k, tol).at("membership")?;
    feasible("phi(K) bounds", &m.report)
}

fn t2_3_proj(t: &TrialSeed, tol: &ToleranceProfile) -> Outcome {
    let (k, p) = membership_input(t, tol)?;
    let m = projection_membership(&p, &k, tol).at("membership")?;
    feasible("projector bounds", &m.report)?;
    let a = lower(&m.report);
    let gm = a - m.gamma_constant + SUITE_TOL;
    require(gm >= 0.0, || Miss::new("gamma constant").margin("margin", gm))?;
    let nm = a - m.norm_constant + SUITE_TOL;
    require(nm >= 0.0, || Miss::new("norm constant").margin("margin", nm))
}

fn t2_4(t: &TrialSeed, tol: &ToleranceProfile) -> Outcome {
    let mut g = MatrixGenerator::with_tolerance(t.seed, *tol);
    let nullity = g.index(1, 3.min(t.dim - 1));
    let (k, op) = g.commuting_family_singular(t.dim, nullity).at("generate family")?;
    let p = g.k_biframe(&k, t.count).at("generate pair")?;
    let r = phi_transform(&p, &op, &k, tol).at("transform")?;
    require(r.domain.dim() == t.dim - nullity, || {
        Miss::new("domain is R(T)").margin("domain_dim", r.domain.dim() as f64)
    })?;
    feasible("output bounds on R(T)", &r.report)
}

fn p2_1(t: &TrialSeed, tol: &ToleranceProfile) -> Outcome {
    let mut g = MatrixGenerator::with_tolerance(t.seed, *tol);
    let k = g.random_rank_operator(t.dim).at("generate K")?;
    let u = g.unitary(t.dim).at("generate U")?;
    let p = g.k_biframe(&k, t.count).at("generate pair")?;
    let (r, phi_r) = unitary_conjugate(&p, &k, &u, tol).at("transform")?;
    feasible("UKU^H bounds", &r.report)?;
    feasible("U phi(K) U^H bounds", &phi_r)?;
    let phi_norm = phi(&k, tol).at("phi")?.frobenius_norm();
    let defect = r
        .identities
        .iter()
        .find(|(n, _)| n == "phi_conjugation")
        .map_or(f64::INFINITY, |(_, v)| *v);
    let bound = SUITE_TOL * phi_norm.max(1.0);
    require(defect <= bound, || {
        Miss::new("phi conjugation identity").margin("defect", defect).margin("bound", bound)
    })?;
    let (a0, a1) = (lower(&r.input_report), lower(&r.report));
    let (b0, b1) = (r.input_report.beta_opt, r.report.beta_opt);
    let da = (a1 - a0).abs();
    let db = (b1 - b0).abs();
    require(da <= SUITE_TOL * a0.max(1.0) && db <= SUITE_TOL * b0.max(1.0), || {
        Miss::new("bounds invariant").margin("alpha_change", da).margin("beta_change", db)
    })
}

fn p2_2(t: &TrialSeed, tol: &ToleranceProfile) -> Outcome {
    let mut g = MatrixGenerator::with_tolerance(t.seed, *tol);
    let r = g.index(1, t.dim);
    let op = g.ep(t.dim, r).at("generate T")?;
    let e = is_ep(&phi(&op, tol).at("phi")?, tol).at("classify")?;
    require(e.is_ep, || {
        let excess = e.range.excess_over(&e.corange).unwrap_or(f64::NAN);
        Miss::new("phi(T) is EP").margin("range_excess", excess)
    })
}

fn l2_1(t: &TrialSeed, tol: &ToleranceProfile) -> Outcome {
    let mut g = MatrixGenerator::with_tolerance(t.seed, *tol);
    let r = g.index(0, t.dim);
    let k = g.with_rank(t.dim, t.dim, r).at("generate K")?;
    let rk = range_basis(&k, tol).at("range")?;
    let rp = range_basis(&phi(&k, tol).at("phi")?, tol).at("range")?;
    let same = subspace_eq(&rp, &rk, tol.subspace_tol()).at("compare")?;
    require(same, || {
        Miss::new("R(phi(K)) = R(K)")
            .margin("dim_phi", rp.dim() as f64)
            .margin("dim_k", rk.dim() as f64)
    })
}

fn t1_3(t: &TrialSeed, tol: &ToleranceProfile) -> Outcome {
    let mut g = MatrixGenerator::with_tolerance(t.seed, *tol);
    // even seeds: generic (invertible) T; odd: EP of random rank
    let op = if t.seed.is_multiple_of(2) {
        g.invertible(t.dim).at("generate T")?
    } else {
        let r = g.index(1, t.dim);
        g.ep(t.dim, r).at("generate T")?
    };
    let mut poly = ComplexMatrix::identity(t.dim).scale(g.complex_normal());
    let mut power = ComplexMatrix::identity(t.dim);
    for _ in 0..3 {
        power = &power * &op;
        poly = &poly + &power.scale(g.complex_normal());
    }
    let tp = pinv(&op, tol).at("pinv")?;
    let c = commutator_norm(&poly, &tp).at("commutator")?;
    let bound = SUITE_TOL * (poly.frobenius_norm() * tp.frobenius_norm()).max(1.0);
    require(c <= bound, || {
        Miss::new("G commutes with T^+").margin("commutator", c).margin("bound", bound)
    })
}

fn p1_4(t: &TrialSeed, tol: &ToleranceProfile) -> Outcome {
    let mut g = MatrixGenerator::with_tolerance(t.seed, *tol);
    let r = g.index(1, t.dim);
    let op = g.normal(t.dim, r).at("generate T")?;
    let e = is_ep(&op, tol).at("classify")?;
    require(e.is_ep, || {
        let excess = e.range.excess_over(&e.corange).unwrap_or(f64::NAN);
        Miss::new("normal T is EP").margin("range_excess", excess)
    })
}

fn finite_sr(t: &TrialSeed, tol: &ToleranceProfile) -> Outcome {
    let mut g = MatrixGenerator::with_tolerance(t.seed, *tol);
    let n = t.dim;
    let op = match t.seed % 3 {
        0 => g.invertible(n).at("generate T")?,
        1 => {
            let r = g.index(1, n - 1);
            g.with_rank(n, n, r).at("generate T")?
        }
        _ => {
            let r = g.index(1, n - 1);
            g.idempotent(n, r).at("generate T")?
        }
    };
    let invertible = rank(&op, tol).at("rank")? == n;
    let sr = is_semi_regular(&op, tol).at("classify")?;
    require(sr.is_semi_regular == invertible, || {
        Miss::new("semi-regular iff invertible")
            .margin("semi_regular", sr.is_semi_regular as u8 as f64)
            .margin("invertible", invertible as u8 as f64)
    })?;
    if invertible {
        let gam = svd(&op).at("svd")?.sigma[n - 1];
        let lambda = C64::from_polar(gam * g.uniform(0.0, 0.9), g.uniform(0.0, std::f64::consts::TAU));
        let shifted = is_semi_regular(&op.shift(lambda), tol).at("classify shift")?;
        require(shifted.is_semi_regular, || {
            Miss::new("shift inside the gamma window")
                .margin("lambda_abs", lambda.norm())
                .margin("gamma", gam)
        })?;
    }
    Ok(())
}

fn suite_fn(id: &str) -> Option<fn(&TrialSeed, &ToleranceProfile) -> Outcome> {
    Some(match id {
        "t2.1" => t2_1,
        "t2.2" => t2_2,
        "t2.3-phi" => t2_3_phi,
        "t2.3-proj" => t2_3_proj,
        "t2.4" => t2_4,
        "p2.1" => p2_1,
        "p2.2" => p2_2,
        "l2.1" => l2_1,
        "t1.3" => t1_3,
        "p1.4" => p1_4,
        "finite-sr" => finite_sr,
        _ => return None,
    })
}

fn run_trial(
    f: fn(&TrialSeed, &ToleranceProfile) -> Outcome,
    cfg: &SuiteConfig,
    count: usize,
    i: usize,
) -> Option<TrialFailure> {
    let seed = trial_seed(cfg.seed, i);
    f(&TrialSeed::new(seed, cfg.dim, count), &cfg.tol)
        .err()
        .map(|m| TrialFailure {
            seed,
            trial: i,
            stage: m.stage,
            witness: m.witness,
            margins: m.margins,
        })
}

#[cfg(feature = "parallel")]
fn collect_failures(
    f: fn(&TrialSeed, &ToleranceProfile) -> Outcome,
    cfg: &SuiteConfig,
    count: usize,
) -> Vec<TrialFailure> {
    use rayon::prelude::*;
    if cfg.parallel {
        let out: Vec<Option<TrialFailure>> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(f, cfg, count, i))
            .collect();
        out.into_iter().flatten().collect()
    } else {
        (0..cfg.trials).filter_map(|i| run_trial(f, cfg, count, i)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn collect_failures(
    f: fn(&TrialSeed, &ToleranceProfile) -> Outcome,
    cfg: &SuiteConfig,
    count: usize,
) -> Vec<TrialFailure> {
    (0..cfg.trials).filter_map(|i| run_trial(f, cfg, count, i)).collect()
}

/// Runs one suite.
pub fn run_suite(cfg: &SuiteConfig) -> Result<TheoremReport> {
    let f = suite_fn(&cfg.theorem).ok_or_else(|| {
        BiframeError::InvalidInput(format!(
            "unknown theorem id {:?}; expected one of {}",
            cfg.theorem,
            SUITE_IDS.join(", ")
        ))
    })?;
    if cfg.trials == 0 {
        return Err(BiframeError::InvalidInput("trials must be at least 1".into()));
    }
    if cfg.dim < 2 {
        return Err(BiframeError::InvalidInput("dim must be at least 2".into()));
    }
    cfg.tol.validate()?;
    let count = cfg.count.max(cfg.dim);
    let start = Instant::now();
    let failures = collect_failures(f, cfg, count);
    Ok(TheoremReport {
        theorem_id: cfg.theorem.clone(),
        trials: cfg.trials,
        dim: cfg.dim,
        count,
        seed: cfg.seed,
        failures,
        tolerances: cfg.tol,
        suite_tol: SUITE_TOL,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Runs every suite (`"all"`) or the single named one.
pub fn run_suites(cfg: &SuiteConfig) -> Result<Vec<TheoremReport>> {
    if cfg.theorem == "all" {
        SUITE_IDS
            .iter()
            .map(|id| {
                let mut c = cfg.clone();
                c.theorem = id.to_string();
                run_suite(&c)
            })
            .collect()
    } else {
        Ok(vec![run_suite(cfg)?])
    }
}
