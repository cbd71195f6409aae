//! Biframe and K-biframe bounds.
//!
//! For a pair `({x_j}, {y_j})` the middle sum `sum_j <x, x_j><y_j, x>` is the
//! quadratic form of `G = sum_j y_j x_j^H`. A pair is a K-biframe with bounds
//! `(alpha, beta)` iff `alpha K K^H <= G <= beta I` in the Loewner order, so
//! the optimal upper bound is `lambda_max(G)` and the optimal lower bound is
//! the largest `alpha` keeping the pencil `G - alpha K K^H` positive
//! semidefinite. The lower bound is found by bisection because `K K^H` is
//! usually singular.

use serde::Serialize;

use crate::error::{BiframeError, Result};
use crate::linalg::{herm_eig_part, inner, ComplexMatrix, Subspace, ToleranceProfile, C64, ZERO};

/// Relative width at which the lower-bound bisection stops.
pub const BISECTION_REL_WIDTH: f64 = 1e-12;
const MAX_BISECTION_STEPS: usize = 200;

/// The pair `({x_j}, {y_j})` of equally long vector families in `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPairSystem {
    dim: usize,
    x: Vec<Vec<C64>>,
    y: Vec<Vec<C64>>,
}

impl VectorPairSystem {
    pub fn new(dim: usize, x: Vec<Vec<C64>>, y: Vec<Vec<C64>>) -> Result<Self> {
        if dim == 0 {
            return Err(BiframeError::InvalidInput("pair dimension must be positive".into()));
        }
        if x.is_empty() || x.len() != y.len() {
            return Err(BiframeError::DimensionMismatch(format!(
                "families of lengths {} and {}",
                x.len(),
                y.len()
            )));
        }
        for v in x.iter().chain(&y) {
            if v.len() != dim {
                return Err(BiframeError::DimensionMismatch(format!(
                    "vector of length {} in dimension {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(BiframeError::InvalidInput("non-finite vector entry".into()));
            }
        }
        Ok(VectorPairSystem { dim, x, y })
    }

    /// Builds a pair from real vectors; convenient for examples.
    pub fn from_real(x: &[&[f64]], y: &[&[f64]]) -> Result<Self> {
        let conv = |vs: &[&[f64]]| -> Vec<Vec<C64>> {
            vs.iter()
                .map(|v| v.iter().map(|&r| C64::new(r, 0.0)).collect())
                .collect()
        };
        let dim = x.first().map_or(0, |v| v.len());
        Self::new(dim, conv(x), conv(y))
    }

    /// `x_j = y_j = e_j`.
    pub fn parseval_basis(n: usize) -> Self {
        let basis: Vec<Vec<C64>> = (0..n).map(|k| crate::linalg::unit_vector(n, k)).collect();
        VectorPairSystem {
            dim: n,
            x: basis.clone(),
            y: basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.x.len()
    }

    pub fn x_vectors(&self) -> &[Vec<C64>] {
        &self.x
    }

    pub fn y_vectors(&self) -> &[Vec<C64>] {
        &self.y
    }

    /// `({A x_j}, {A y_j})`.
    pub fn map(&self, a: &ComplexMatrix) -> Result<Self> {
        if a.shape() != (self.dim, self.dim) {
            return Err(BiframeError::DimensionMismatch(format!(
                "operator {:?} on pair of dimension {}",
                a.shape(),
                self.dim
            )));
        }
        Ok(VectorPairSystem {
            dim: self.dim,
            x: a.apply_all(&self.x),
            y: a.apply_all(&self.y),
        })
    }

    /// Exchanges the roles of the two families.
    pub fn swapped(&self) -> Self {
        VectorPairSystem {
            dim: self.dim,
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    /// The middle sum evaluated term by term.
    pub fn middle_sum(&self, v: &[C64]) -> C64 {
        self.x
            .iter()
            .zip(&self.y)
            .map(|(xj, yj)| inner(v, xj) * inner(yj, v))
            .sum()
    }
}

/// `G = sum_j y_j x_j^H`.
pub fn pair_operator(p: &VectorPairSystem) -> ComplexMatrix {
    let n = p.dim();
    let mut g = ComplexMatrix::zeros(n, n);
    for (xj, yj) in p.x.iter().zip(&p.y) {
        for i in 0..n {
            if yj[i] == ZERO {
                continue;
            }
            for k in 0..n {
                g[(i, k)] += yj[i] * xj[k].conj();
            }
        }
    }
    g
}

/// What to do with a pair operator that is not Hermitian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormPolicy {
    /// Reject with `NonHermitianForm`.
    #[default]
    Strict,
    /// Use `(G + G^H) / 2` and report the defect.
    HermitianPart,
}

/// A pair operator that passed the Hermitian gate.
#[derive(Debug, Clone)]
pub struct PairForm {
    pub g: ComplexMatrix,
    pub hermitian_defect: f64,
    pub hermitian_part_used: bool,
}

pub fn pair_form(
    p: &VectorPairSystem,
    policy: FormPolicy,
    tol: &ToleranceProfile,
) -> Result<PairForm> {
    form_from_operator(pair_operator(p), policy, tol)
}

pub fn form_from_operator(
    g: ComplexMatrix,
    policy: FormPolicy,
    tol: &ToleranceProfile,
) -> Result<PairForm> {
    let defect = g.hermitian_defect();
    let over = defect > tol.eq_floor(g.frobenius_norm());
    if over && policy == FormPolicy::Strict {
        // Im(x^H G x) = x^H S x with S = (G - G^H) / 2i
        let s = (&g - &g.adjoint()).scale(C64::new(0.0, -0.5));
        let e = herm_eig_part(&s)?;
        let witness = if e.max().abs() >= e.min().abs() {
            e.max_vector()
        } else {
            e.min_vector()
        };
        let imaginary_part = g.quadratic_form(&witness).im;
        return Err(BiframeError::NonHermitianForm {
            defect,
            witness,
            imaginary_part,
        });
    }
    Ok(PairForm {
        g: g.hermitian_part(),
        hermitian_defect: defect,
        hermitian_part_used: over,
    })
}

/// An explicit vector at which the lower inequality fails.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub vector: Vec<C64>,
    /// The `alpha` at which the pencil was found indefinite.
    pub probe_alpha: f64,
    /// `x^H G x`.
    pub form_value: f64,
    /// `||K^H x||^2`.
    pub k_norm_sq: f64,
    /// `||x||^2`.
    pub norm_sq: f64,
}

/// Optimal bounds of a pair, or an infeasibility verdict with a witness.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub feasible: bool,
    /// Optimal lower bound; present iff `feasible`.
    pub alpha_opt: Option<f64>,
    /// Supremum found by the search, reported even when infeasible.
    pub alpha_sup: f64,
    pub beta_opt: f64,
    /// `lambda_min` of the (restricted) pair operator.
    pub lambda_min_form: f64,
    pub hermitian_defect: f64,
    pub hermitian_part_used: bool,
    /// Dimension of the subspace the inequality is quantified over.
    pub domain_dim: usize,
    pub witness: Option<Witness>,
    pub psd_floor: f64,
    pub tol_used: ToleranceProfile,
}

/// Bounds of the pencil `(g, b)`: `g` Hermitian, `b` Hermitian PSD.
#[derive(Debug, Clone)]
pub(crate) struct PencilOutcome {
    pub feasible: bool,
    pub alpha_sup: f64,
    pub beta: f64,
    pub lambda_min_g: f64,
    pub psd_floor: f64,
    pub witness: Option<(Vec<C64>, f64)>,
}

fn rounding_slack(n: usize, g_norm: f64, b_norm: f64, alpha: f64) -> f64 {
    4.0 * (n as f64).sqrt() * f64::EPSILON * (g_norm + alpha * b_norm)
}

/// Largest `alpha` with `lambda_min(g - alpha b) >= min(lambda_min(g), 0)`,
/// up to rounding slack. The pair is feasible iff that supremum exceeds the
/// PSD floor and `lambda_min(g)` is above minus the floor.
pub(crate) fn pencil_bounds(
    g: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &ToleranceProfile,
) -> Result<PencilOutcome> {
    let n = g.rows();
    let eg = herm_eig_part(g)?;
    let eb = herm_eig_part(b)?;
    let (lmin, lmax) = (eg.min(), eg.max());
    let b_top = eb.max();
    if b_top <= 0.0 {
        return Err(BiframeError::DegenerateK);
    }
    let psd_floor = tol.psd_floor(lmin.abs().max(lmax.abs()));

    if lmin < -psd_floor {
        return Ok(PencilOutcome {
            feasible: false,
            alpha_sup: 0.0,
            beta: lmax,
            lambda_min_g: lmin,
            psd_floor,
            witness: Some((eg.min_vector(), 0.0)),
        });
    }

    let b_pos_min = eb
        .values
        .iter()
        .copied()
        .find(|&v| v > tol.rank_rel * b_top)
        .unwrap_or(b_top);
    let (g_norm, b_norm) = (g.frobenius_norm(), b.frobenius_norm());
    let base = lmin.min(0.0);
    // margin of the pencil over its floor, with the eigenvector at lambda_min
    let probe = |alpha: f64| -> Result<(f64, Vec<C64>)> {
        let e = herm_eig_part(&(g - &b.scale_real(alpha)))?;
        let floor = base - rounding_slack(n, g_norm, b_norm, alpha);
        Ok((e.min() - floor, e.min_vector()))
    };

    let mut lo = 0.0;
    let mut m_lo = lmin - (base - rounding_slack(n, g_norm, b_norm, 0.0));
    let mut hi = (lmax.max(0.0) + 1.0) / b_pos_min;
    let (mut m_hi, hi_vec) = probe(hi)?;
    let mut witness: Option<(Vec<C64>, f64)> = None;
    let fallback = (hi_vec, hi);

    let mut steps = 0;
    while hi - lo > BISECTION_REL_WIDTH * hi && steps < MAX_BISECTION_STEPS {
        // once hi is far below the floor the pair is infeasible whatever lo is
        if hi < 1e-3 * psd_floor {
            break;
        }
        steps += 1;
        let mid = 0.5 * (lo + hi);
        let (m, v) = probe(mid)?;
        if m >= 0.0 {
            lo = mid;
            m_lo = m;
        } else {
            hi = mid;
            m_hi = m;
            if witness.is_none() {
                witness = Some((v, mid));
            }
        }
    }
    // linear interpolation of the margin across the final bracket
    let alpha_sup = if m_lo > m_hi {
        (lo + m_lo * (hi - lo) / (m_lo - m_hi)).clamp(lo, hi)
    } else {
        lo
    };

    let feasible = alpha_sup > psd_floor && lmin >= -psd_floor;
    Ok(PencilOutcome {
        feasible,
        alpha_sup,
        beta: lmax,
        lambda_min_g: lmin,
        psd_floor,
        witness: if feasible {
            None
        } else {
            Some(witness.unwrap_or(fallback))
        },
    })
}

fn report_from(
    outcome: PencilOutcome,
    form: &PairForm,
    b: &ComplexMatrix,
    lift: Option<&ComplexMatrix>,
    domain_dim: usize,
    tol: &ToleranceProfile,
) -> BoundsReport {
    let witness = outcome.witness.map(|(v, probe_alpha)| {
        let vector = match lift {
            Some(q) => q.mul_vec(&v),
            None => v,
        };
        Witness {
            form_value: form.g.quadratic_form(&vector).re,
            k_norm_sq: b.quadratic_form(&vector).re,
            norm_sq: crate::linalg::norm(&vector).powi(2),
            vector,
            probe_alpha,
        }
    });
    BoundsReport {
        feasible: outcome.feasible,
        alpha_opt: outcome.feasible.then_some(outcome.alpha_sup),
        alpha_sup: outcome.alpha_sup,
        beta_opt: outcome.beta,
        lambda_min_form: outcome.lambda_min_g,
        hermitian_defect: form.hermitian_defect,
        hermitian_part_used: form.hermitian_part_used,
        domain_dim,
        witness,
        psd_floor: outcome.psd_floor,
        tol_used: *tol,
    }
}

fn check_k(k: &ComplexMatrix, n: usize) -> Result<()> {
    if k.shape() != (n, n) {
        return Err(BiframeError::DimensionMismatch(format!(
            "K is {}x{} but the pair lives in dimension {n}",
            k.rows(),
            k.cols()
        )));
    }
    if k.max_abs() == 0.0 {
        return Err(BiframeError::DegenerateK);
    }
    Ok(())
}

/// Bounds of a prepared form against `K`, optionally restricted to a subspace.
pub fn bounds_for_form(
    form: &PairForm,
    k: &ComplexMatrix,
    subspace: Option<&Subspace>,
    tol: &ToleranceProfile,
) -> Result<BoundsReport> {
    let n = form.g.rows();
    check_k(k, n)?;
    let b = (k * &k.adjoint()).hermitian_part();
    match subspace {
        None => {
            let outcome = pencil_bounds(&form.g, &b, tol)?;
            Ok(report_from(outcome, form, &b, None, n, tol))
        }
        Some(s) => {
            if s.ambient_dim() != n {
                return Err(BiframeError::DimensionMismatch(format!(
                    "subspace of C^{} for a pair in C^{n}",
                    s.ambient_dim()
                )));
            }
            if s.is_trivial() {
                return Err(BiframeError::TrivialSubspace);
            }
            let q = s.basis();
            let qh = q.adjoint();
            let gs = &(&qh * &form.g) * q;
            let bs = &(&qh * &b) * q;
            let outcome = pencil_bounds(&gs, &bs, tol)?;
            Ok(report_from(outcome, form, &b, Some(q), s.dim(), tol))
        }
    }
}

/// Optimal biframe bounds `(lambda_min(G), lambda_max(G))`.
pub fn biframe_bounds(p: &VectorPairSystem, tol: &ToleranceProfile) -> Result<BoundsReport> {
    let form = pair_form(p, FormPolicy::Strict, tol)?;
    let eg = herm_eig_part(&form.g)?;
    let n = p.dim();
    let psd_floor = tol.psd_floor(eg.min().abs().max(eg.max().abs()));
    let feasible = eg.min() > psd_floor;
    let witness = (!feasible).then(|| {
        let v = eg.min_vector();
        Witness {
            form_value: form.g.quadratic_form(&v).re,
            k_norm_sq: crate::linalg::norm(&v).powi(2),
            norm_sq: crate::linalg::norm(&v).powi(2),
            vector: v,
            probe_alpha: 0.0,
        }
    });
    Ok(BoundsReport {
        feasible,
        alpha_opt: feasible.then_some(eg.min()),
        alpha_sup: eg.min().max(0.0),
        beta_opt: eg.max(),
        lambda_min_form: eg.min(),
        hermitian_defect: form.hermitian_defect,
        hermitian_part_used: false,
        domain_dim: n,
        witness,
        psd_floor,
        tol_used: *tol,
    })
}

/// Optimal K-biframe bounds over the whole space.
pub fn k_biframe_bounds(
    p: &VectorPairSystem,
    k: &ComplexMatrix,
    tol: &ToleranceProfile,
) -> Result<BoundsReport> {
    let form = pair_form(p, FormPolicy::Strict, tol)?;
    bounds_for_form(&form, k, None, tol)
}

/// K-biframe bounds with the inequalities quantified over `s` only.
pub fn k_biframe_bounds_on_subspace(
    p: &VectorPairSystem,
    k: &ComplexMatrix,
    s: &Subspace,
    tol: &ToleranceProfile,
) -> Result<BoundsReport> {
    let form = pair_form(p, FormPolicy::Strict, tol)?;
    bounds_for_form(&form, k, Some(s), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

/// Outcome of checking claimed constants `(alpha, beta)`.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Holds {
        /// `lambda_min(G - alpha K K^H)`.
        lower_margin: f64,
        /// `beta - lambda_max(G)`.
        upper_margin: f64,
    },
    Violated {
        side: Side,
        witness: Vec<C64>,
        /// `alpha x^H K K^H x`.
        alpha_term: f64,
        /// `x^H G x`.
        form_value: f64,
        /// `beta x^H x`.
        beta_term: f64,
        /// Positive amount by which the inequality fails at the witness.
        margin: f64,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }
}

/// Checks `alpha ||K^H x||^2 <= x^H G x <= beta ||x||^2` for all `x`
/// (`K = I` when absent).
pub fn verify_claimed_bounds(
    p: &VectorPairSystem,
    k: Option<&ComplexMatrix>,
    alpha: f64,
    beta: f64,
    tol: &ToleranceProfile,
) -> Result<Verdict> {
    let form = pair_form(p, FormPolicy::Strict, tol)?;
    verify_form(&form, k, alpha, beta, tol)
}

pub fn verify_form(
    form: &PairForm,
    k: Option<&ComplexMatrix>,
    alpha: f64,
    beta: f64,
    tol: &ToleranceProfile,
) -> Result<Verdict> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(BiframeError::InvalidInput(format!(
            "claimed bounds must be positive, got ({alpha}, {beta})"
        )));
    }
    let n = form.g.rows();
    let b = match k {
        Some(k) => {
            check_k(k, n)?;
            (k * &k.adjoint()).hermitian_part()
        }
        None => ComplexMatrix::identity(n),
    };
    let g = &form.g;
    let lower = herm_eig_part(&(g - &b.scale_real(alpha)))?;
    let eg = herm_eig_part(g)?;
    let lower_floor = tol.psd_floor(g.frobenius_norm().max(alpha * b.frobenius_norm()));
    let upper_floor = tol.psd_floor(eg.max().abs());

    let violated = |side: Side, x: Vec<C64>| {
        let alpha_term = alpha * b.quadratic_form(&x).re;
        let form_value = g.quadratic_form(&x).re;
        let beta_term = beta * crate::linalg::norm(&x).powi(2);
        let margin = match side {
            Side::Lower => alpha_term - form_value,
            Side::Upper => form_value - beta_term,
        };
        Verdict::Violated {
            side,
            witness: x,
            alpha_term,
            form_value,
            beta_term,
            margin,
        }
    };

    if lower.min() < -lower_floor {
        return Ok(violated(Side::Lower, lower.min_vector()));
    }
    if eg.max() > beta + upper_floor {
        return Ok(violated(Side::Upper, eg.max_vector()));
    }
    Ok(Verdict::Holds {
        lower_margin: lower.min(),
        upper_margin: beta - eg.max(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit_vector;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn intro_pair() -> VectorPairSystem {
        VectorPairSystem::from_real(&[&[1.0, 0.0], &[0.0, 1.0]], &[&[3.0, 1.0], &[1.0, 1.0]]).unwrap()
    }

    /// theta = (e^{iz} e1, e2/2, e3), psi = (e^{iz} e1, e2, e3/3)
    fn diag_phase_pair(z: f64) -> VectorPairSystem {
        let ph = C64::from_polar(1.0, z);
        let x = vec![
            vec![ph, c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let y = vec![
            vec![ph, c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0 / 3.0, 0.0)],
        ];
        VectorPairSystem::new(3, x, y).unwrap()
    }

    /// theta = (e1, e1, e2, ..., e_r), psi = (e1/2, -e1/2, e2, ..., e_r)
    fn cancelling_pair(r: usize) -> VectorPairSystem {
        let mut x = vec![unit_vector(r, 0), unit_vector(r, 0)];
        let mut y = vec![
            unit_vector(r, 0).iter().map(|z| z * 0.5).collect(),
            unit_vector(r, 0).iter().map(|z| z * -0.5).collect(),
        ];
        for k in 1..r {
            x.push(unit_vector(r, k));
            y.push(unit_vector(r, k));
        }
        VectorPairSystem::new(r, x, y).unwrap()
    }

    #[test]
    fn pair_operator_examples() {
        let g = pair_operator(&intro_pair());
        assert_eq!(g, ComplexMatrix::from_real_rows(&[&[3.0, 1.0], &[1.0, 1.0]]));
        assert_eq!(
            pair_operator(&VectorPairSystem::parseval_basis(4)),
            ComplexMatrix::identity(4)
        );
        for z in [0.0, 1.0, 2.5] {
            let g = pair_operator(&diag_phase_pair(z));
            assert!(g.distance(&ComplexMatrix::diag_real(&[1.0, 0.5, 1.0 / 3.0])) < 1e-15);
        }
    }

    #[test]
    fn middle_sum_matches_form() {
        let p = diag_phase_pair(0.7);
        let g = pair_operator(&p);
        let v = vec![c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.1)];
        assert!((p.middle_sum(&v) - g.quadratic_form(&v)).norm() < 1e-14);
    }

    #[test]
    fn biframe_examples() {
        let r = biframe_bounds(&VectorPairSystem::parseval_basis(3), &tol()).unwrap();
        assert!(r.feasible);
        assert_eq!((r.alpha_opt.unwrap(), r.beta_opt), (1.0, 1.0));

        let r = biframe_bounds(&intro_pair(), &tol()).unwrap();
        let s2 = 2f64.sqrt();
        assert!((r.alpha_opt.unwrap() - (2.0 - s2)).abs() < 1e-14);
        assert!((r.beta_opt - (2.0 + s2)).abs() < 1e-14);

        let p = VectorPairSystem::new(1, vec![vec![c(1.0, 0.0)]], vec![vec![c(-1.0, 0.0)]]).unwrap();
        let r = biframe_bounds(&p, &tol()).unwrap();
        assert!(!r.feasible);
        assert!(r.alpha_opt.is_none());
        assert!((r.witness.unwrap().vector[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_unit_vectors_never_exceed_top_eigenvalue() {
        // independent check of beta for the introductory pair: max over sampled
        // unit vectors approaches 2 + sqrt 2 from below
        use rand::{Rng, SeedableRng};
        let g = pair_operator(&intro_pair());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut best: f64 = 0.0;
        for _ in 0..100_000 {
            let v: Vec<C64> = (0..2)
                .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let nv = crate::linalg::norm(&v);
            let v: Vec<C64> = v.iter().map(|z| z / nv).collect();
            best = best.max(g.quadratic_form(&v).re);
        }
        let top = 2.0 + 2f64.sqrt();
        assert!(best <= top + 1e-12 && best > top - 1e-3);
    }

    #[test]
    fn k_biframe_diagonal_phase_example() {
        let k = ComplexMatrix::diag_real(&[3.0, 1.0, 1.0]);
        for z in [0.0, 1.0, 2.5] {
            let r = k_biframe_bounds(&diag_phase_pair(z), &k, &tol()).unwrap();
            assert!(r.feasible);
            assert!((r.alpha_opt.unwrap() - 1.0 / 9.0).abs() < 1e-12, "{r:?}");
            assert!((r.beta_opt - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn k_biframe_cancelling_pair_is_infeasible() {
        for r in [3, 6] {
            let mut kd = vec![1.0; r];
            kd[0] = 2f64.sqrt();
            let k = ComplexMatrix::diag_real(&kd);
            let rep = k_biframe_bounds(&cancelling_pair(r), &k, &tol()).unwrap();
            assert!(!rep.feasible);
            let w = rep.witness.unwrap();
            assert!(w.vector[0].norm() > 0.999);
            assert!(w.form_value.abs() < 1e-10);
            assert!((w.k_norm_sq - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn k_biframe_truncated_shift_example() {
        let n = 16;
        for a in [0.0, 1.0] {
            let ph = C64::from_polar(1.0, a);
            let mut x: Vec<Vec<C64>> = (0..n).map(|k| unit_vector(n, k)).collect();
            let mut y = x.clone();
            x[0][0] = ph;
            y[0][0] = ph / 2f64.sqrt();
            let p = VectorPairSystem::new(n, x, y).unwrap();
            let k = ComplexMatrix::from_fn(n, n, |i, j| if i == j + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
            let r = k_biframe_bounds(&p, &k, &tol()).unwrap();
            assert!((r.alpha_opt.unwrap() - 1.0).abs() < 1e-12);
            assert!((r.beta_opt - 1.0).abs() < 1e-14);
            let v = verify_claimed_bounds(&p, Some(&k), 0.5f64.sqrt(), 1.0, &tol()).unwrap();
            assert!(v.holds());
        }
    }

    #[test]
    fn subspace_restriction() {
        let t = tol();
        let k = ComplexMatrix::diag_real(&[3.0, 1.0, 1.0]);
        let full = Subspace::full(3, t.subspace_tol());
        let a = k_biframe_bounds(&diag_phase_pair(0.0), &k, &t).unwrap();
        let b = k_biframe_bounds_on_subspace(&diag_phase_pair(0.0), &k, &full, &t).unwrap();
        assert!((a.alpha_opt.unwrap() - b.alpha_opt.unwrap()).abs() < 1e-14);
        assert_eq!(a.beta_opt, b.beta_opt);

        let e1 = crate::linalg::span(3, &[unit_vector(3, 0)], &t).unwrap();
        let r = k_biframe_bounds_on_subspace(&diag_phase_pair(0.0), &k, &e1, &t).unwrap();
        assert!((r.alpha_opt.unwrap() - 1.0 / 9.0).abs() < 1e-12);
        assert!((r.beta_opt - 1.0).abs() < 1e-14);

        let mut kd = vec![1.0; 3];
        kd[0] = 2f64.sqrt();
        let k = ComplexMatrix::diag_real(&kd);
        let e23 = crate::linalg::span(3, &[unit_vector(3, 1), unit_vector(3, 2)], &t).unwrap();
        let r = k_biframe_bounds_on_subspace(&cancelling_pair(3), &k, &e23, &t).unwrap();
        assert!(r.feasible);
        assert!((r.alpha_opt.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.beta_opt - 1.0).abs() < 1e-14);

        let trivial = Subspace::trivial(3, 1e-8);
        assert!(matches!(
            k_biframe_bounds_on_subspace(&cancelling_pair(3), &k, &trivial, &t),
            Err(BiframeError::TrivialSubspace)
        ));
    }

    #[test]
    fn verify_examples() {
        // f = (e^{ia} e1, e2), g = (e^{ia} e1, 2 e2), K = [[e^{ia}, e^{-ia}], [0, 0]]
        let a = 0.4;
        let ph = C64::from_polar(1.0, a);
        let p = VectorPairSystem::new(
            2,
            vec![vec![ph, c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]],
            vec![vec![ph, c(0.0, 0.0)], vec![c(0.0, 0.0), c(2.0, 0.0)]],
        )
        .unwrap();
        let k = ComplexMatrix::from_rows(&[vec![ph, ph.conj()], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!(verify_claimed_bounds(&p, Some(&k), 0.5, 2.0, &tol()).unwrap().holds());

        match verify_claimed_bounds(&intro_pair(), None, 0.5, 3.0, &tol()).unwrap() {
            Verdict::Violated {
                side,
                margin,
                witness,
                ..
            } => {
                assert_eq!(side, Side::Upper);
                assert!((margin - (2f64.sqrt() - 1.0)).abs() < 1e-12);
                // dominant eigenvector of [[3,1],[1,1]] is (1+sqrt2, 1) normalized
                let ratio = witness[0] / witness[1];
                assert!((ratio.re - (1.0 + 2f64.sqrt())).abs() < 1e-10);
            }
            v => panic!("{v:?}"),
        }

        let v = verify_claimed_bounds(&VectorPairSystem::parseval_basis(3), None, 1.0, 1.0, &tol()).unwrap();
        assert!(v.holds());
        assert!(verify_claimed_bounds(&intro_pair(), None, 0.0, 3.0, &tol()).is_err());
    }

    #[test]
    fn non_hermitian_form_rejected_with_witness() {
        let p = VectorPairSystem::from_real(&[&[1.0, 0.0]], &[&[0.0, 1.0]]).unwrap();
        match biframe_bounds(&p, &tol()) {
            Err(BiframeError::NonHermitianForm {
                witness,
                imaginary_part,
                ..
            }) => {
                let g = pair_operator(&p);
                assert!(imaginary_part.abs() > 0.1);
                assert!((g.quadratic_form(&witness).im - imaginary_part).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        let form = pair_form(&p, FormPolicy::HermitianPart, &tol()).unwrap();
        assert!(form.hermitian_part_used);
        assert!((form.hermitian_defect - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_k_rejected() {
        let r = k_biframe_bounds(&intro_pair(), &ComplexMatrix::zeros(2, 2), &tol());
        assert!(matches!(r, Err(BiframeError::DegenerateK)));
    }
}
