//! Biframe-preserving constructions. Each transform checks its hypotheses,
//! refuses to run when one fails, and certifies its output by recomputing
//! the optimal bounds.

use serde::Serialize;

use crate::biframe::{
    k_biframe_bounds, k_biframe_bounds_on_subspace, BoundsReport, VectorPairSystem,
};
use crate::error::{BiframeError, Result};
use crate::linalg::{
    projector, range_basis, svd, ComplexMatrix, Subspace, ToleranceProfile, C64,
};
use crate::operator::{commutator_norm, gamma, generalized_range, is_ep, is_semi_regular, phi};

/// Which transform produced a result, with its scalar parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub transform: &'static str,
    pub parameters: Vec<(String, f64)>,
}

impl Provenance {
    fn new(transform: &'static str) -> Self {
        Provenance {
            transform,
            parameters: Vec::new(),
        }
    }

    fn with(mut self, name: &str, value: f64) -> Self {
        self.parameters.push((name.to_string(), value));
        self
    }
}

#[derive(Debug, Clone)]
pub struct TransformResult {
    pub pair: VectorPairSystem,
    /// The `K` against which `pair` is a K-biframe.
    pub target_operator: ComplexMatrix,
    /// Where the inequalities are asserted.
    pub domain: Subspace,
    pub provenance: Provenance,
    /// Bounds of the output pair against `target_operator` on `domain`.
    pub report: BoundsReport,
    /// Bounds of the input pair against the input `K`.
    pub input_report: BoundsReport,
    /// Lower bound the construction guarantees, when it states one.
    pub proof_alpha: Option<f64>,
    /// Upper bound the construction guarantees.
    pub proof_beta: f64,
    /// Extra numerical identities checked along the way, by name.
    pub identities: Vec<(String, f64)>,
}

/// Bounds of `p` against `k`; errors unless `p` is a K-biframe.
fn require_k_biframe(
    p: &VectorPairSystem,
    k: &ComplexMatrix,
    tol: &ToleranceProfile,
) -> Result<BoundsReport> {
    let r = k_biframe_bounds(p, k, tol)?;
    if !r.feasible {
        return Err(BiframeError::NotAKBiframe);
    }
    Ok(r)
}

fn require_square(a: &ComplexMatrix, n: usize, what: &str) -> Result<()> {
    if a.shape() != (n, n) {
        return Err(BiframeError::DimensionMismatch(format!(
            "{what} is {}x{} but the pair lives in dimension {n}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

fn alpha_of(r: &BoundsReport) -> f64 {
    r.alpha_opt.unwrap_or(0.0)
}

/// `({KL x_j}, {KL y_j})` for an inner inverse `L` of `K`, which remains a
/// K-biframe with the same lower bound and upper bound `beta ||KL||^2`.
pub fn kl_transform(
    p: &VectorPairSystem,
    k: &ComplexMatrix,
    l: &ComplexMatrix,
    tol: &ToleranceProfile,
) -> Result<TransformResult> {
    let n = p.dim();
    require_square(k, n, "K")?;
    require_square(l, n, "L")?;
    let residual = (&(k * l) * k).distance(k);
    let scale = k.frobenius_norm().max(1.0) * (k.frobenius_norm() * l.frobenius_norm()).max(1.0);
    if residual > tol.eq_floor(scale) {
        return Err(BiframeError::InnerInverseViolated { residual });
    }
    let input = require_k_biframe(p, k, tol)?;
    let kl = k * l;
    let out = p.map(&kl)?;
    let report = k_biframe_bounds(&out, k, tol)?;
    let kl_norm = svd(&kl)?.largest();
    Ok(TransformResult {
        pair: out,
        target_operator: k.clone(),
        domain: Subspace::full(n, tol.subspace_tol()),
        provenance: Provenance::new("kl").with("inner_inverse_residual", residual),
        proof_alpha: Some(alpha_of(&input)),
        proof_beta: input.beta_opt * kl_norm * kl_norm,
        report,
        input_report: input,
        identities: vec![("klk_minus_k".into(), residual)],
    })
}

/// `({U x_j}, {U y_j})` for unitary `U`: a `(U K U^H)`-biframe and a
/// `(U phi(K) U^H)`-biframe; `phi(U K U^H) = U phi(K) U^H` is checked too.
///
/// `report` is against `U K U^H`; the bounds against `U phi(K) U^H` are in
/// the returned second element.
pub fn unitary_conjugate(
    p: &VectorPairSystem,
    k: &ComplexMatrix,
    u: &ComplexMatrix,
    tol: &ToleranceProfile,
) -> Result<(TransformResult, BoundsReport)> {
    let n = p.dim();
    require_square(k, n, "K")?;
    require_square(u, n, "U")?;
    let residual = (&u.adjoint() * u).distance(&ComplexMatrix::identity(n));
    if residual > tol.eq_floor(n as f64) {
        return Err(BiframeError::NotUnitary { residual });
    }
    let input = require_k_biframe(p, k, tol)?;
    let uh = u.adjoint();
    let target = &(u * k) * &uh;
    let phi_k = phi(k, tol)?;
    let phi_target = &(u * &phi_k) * &uh;
    let phi_identity = phi(&target, tol)?.distance(&phi_target);

    let out = p.map(u)?;
    let report = k_biframe_bounds(&out, &target, tol)?;
    let phi_report = k_biframe_bounds(&out, &phi_target, tol)?;
    Ok((
        TransformResult {
            pair: out,
            target_operator: target,
            domain: Subspace::full(n, tol.subspace_tol()),
            provenance: Provenance::new("unitary").with("unitarity_residual", residual),
            proof_alpha: Some(alpha_of(&input)),
            proof_beta: input.beta_opt,
            report,
            input_report: input,
            identities: vec![
                ("unitarity".into(), residual),
                ("phi_conjugation".into(), phi_identity),
            ],
        },
        phi_report,
    ))
}

/// `({phi(T) x_j}, {phi(T) y_j})` for EP `T` with `T^H K = K T^H`: a
/// K-biframe for `R(T)` with upper bound `beta ||T^+||^2`.
pub fn phi_transform(
    p: &VectorPairSystem,
    t: &ComplexMatrix,
    k: &ComplexMatrix,
    tol: &ToleranceProfile,
) -> Result<TransformResult> {
    let n = p.dim();
    require_square(k, n, "K")?;
    require_square(t, n, "T")?;
    let ep = is_ep(t, tol)?;
    if !ep.is_ep {
        return Err(BiframeError::NotEP);
    }
    let th = t.adjoint();
    let comm = commutator_norm(&th, k)?;
    if comm > tol.eq_floor(th.frobenius_norm() * k.frobenius_norm()) {
        return Err(BiframeError::HypothesisViolated(format!(
            "T^H K != K T^H (commutator norm {comm:.3e})"
        )));
    }
    let input = require_k_biframe(p, k, tol)?;
    let phi_t = phi(t, tol)?;
    // ||T^+|| = ||phi(T)||
    let pinv_norm = svd(&phi_t)?.largest();
    let out = p.map(&phi_t)?;
    let domain = ep.range;
    let report = k_biframe_bounds_on_subspace(&out, k, &domain, tol)?;
    Ok(TransformResult {
        pair: out,
        target_operator: k.clone(),
        domain,
        provenance: Provenance::new("phi"),
        proof_alpha: None,
        proof_beta: input.beta_opt * pinv_norm * pinv_norm,
        report,
        input_report: input,
        identities: vec![("adjoint_commutator".into(), comm)],
    })
}

/// `({(T - lambda) x_j}, {(T - lambda) y_j})` for semi-regular `T` commuting
/// with `K` and `|lambda| < gamma(T)`, on the generalized range of `T`.
///
/// Semi-regular matrices are invertible, so the domain is the whole space.
pub fn lambda_shift_transform(
    p: &VectorPairSystem,
    t: &ComplexMatrix,
    k: &ComplexMatrix,
    lambda: C64,
    tol: &ToleranceProfile,
) -> Result<TransformResult> {
    let n = p.dim();
    require_square(k, n, "K")?;
    require_square(t, n, "T")?;
    let comm = commutator_norm(k, t)?;
    if comm > tol.eq_floor(k.frobenius_norm() * t.frobenius_norm()) {
        return Err(BiframeError::HypothesisViolated(format!(
            "K T != T K (commutator norm {comm:.3e})"
        )));
    }
    if !is_semi_regular(t, tol)?.is_semi_regular {
        return Err(BiframeError::HypothesisViolated("T is not semi-regular".into()));
    }
    let g = gamma(t, tol)?;
    if lambda.norm() >= g {
        return Err(BiframeError::HypothesisViolated(format!(
            "|lambda| = {} is not below gamma(T) = {g}",
            lambda.norm()
        )));
    }
    let input = require_k_biframe(p, k, tol)?;
    let shifted = t.shift(lambda);
    let out = p.map(&shifted)?;
    let domain = generalized_range(t, tol)?;
    let report = k_biframe_bounds_on_subspace(&out, k, &domain, tol)?;
    let s_norm = svd(&shifted)?.largest();
    Ok(TransformResult {
        pair: out,
        target_operator: k.clone(),
        domain,
        provenance: Provenance::new("shift")
            .with("lambda_re", lambda.re)
            .with("lambda_im", lambda.im)
            .with("gamma", g),
        proof_alpha: None,
        proof_beta: input.beta_opt * s_norm * s_norm,
        report,
        input_report: input,
        identities: vec![("commutator".into(), comm)],
    })
}

/// Outcome of a membership check: the pair against a replacement operator.
#[derive(Debug, Clone, Serialize)]
pub struct Membership {
    pub report: BoundsReport,
    pub input_report: BoundsReport,
    /// `alpha / sigma_1(K)^2`.
    pub norm_constant: f64,
    /// `alpha gamma(K)^2`, which `||K^H x|| >= gamma(K) ||x||` on `R(K)` yields.
    pub gamma_constant: f64,
}

/// The pair against the orthogonal projector onto `R(K)`.
pub fn projection_membership(
    p: &VectorPairSystem,
    k: &ComplexMatrix,
    tol: &ToleranceProfile,
) -> Result<Membership> {
    require_square(k, p.dim(), "K")?;
    let input = require_k_biframe(p, k, tol)?;
    let pi = projector(&range_basis(k, tol)?);
    let report = k_biframe_bounds(p, &pi, tol)?;
    let alpha = alpha_of(&input);
    let s1 = svd(k)?.largest();
    let g = gamma(k, tol)?;
    Ok(Membership {
        report,
        input_report: input,
        norm_constant: alpha / (s1 * s1),
        gamma_constant: alpha * g * g,
    })
}

/// The pair against `phi(K)`.
pub fn phi_membership(
    p: &VectorPairSystem,
    k: &ComplexMatrix,
    tol: &ToleranceProfile,
) -> Result<Membership> {
    require_square(k, p.dim(), "K")?;
    let input = require_k_biframe(p, k, tol)?;
    let report = k_biframe_bounds(p, &phi(k, tol)?, tol)?;
    let alpha = alpha_of(&input);
    let s1 = svd(k)?.largest();
    let g = gamma(k, tol)?;
    Ok(Membership {
        report,
        input_report: input,
        norm_constant: alpha / (s1 * s1),
        gamma_constant: alpha * g * g,
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

    fn diag_phase_pair() -> VectorPairSystem {
        let x = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let y = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0 / 3.0, 0.0)],
        ];
        VectorPairSystem::new(3, x, y).unwrap()
    }

    fn inner_inverse_example(a: f64) -> (VectorPairSystem, ComplexMatrix, ComplexMatrix) {
        let e = C64::from_polar(1.0, a);
        let z = c(0.0, 0.0);
        let k = ComplexMatrix::from_rows(&[vec![e, e.conj()], vec![z, z]]).unwrap();
        let l = ComplexMatrix::from_rows(&[vec![e.conj(), z], vec![z, z]]).unwrap();
        let x = vec![vec![e, z], vec![z, c(1.0, 0.0)]];
        let y = vec![vec![e, z], vec![z, c(2.0, 0.0)]];
        (VectorPairSystem::new(2, x, y).unwrap(), k, l)
    }

    #[test]
    fn kl_transform_example() {
        for a in [0.0, 0.7, 2.0] {
            let (p, k, l) = inner_inverse_example(a);
            let kl = &k * &l;
            assert!(kl.distance(&ComplexMatrix::diag_real(&[1.0, 0.0])) < 1e-15);
            let r = kl_transform(&p, &k, &l, &tol()).unwrap();
            assert!((alpha_of(&r.input_report) - 0.5).abs() < 1e-10);
            assert!((r.input_report.beta_opt - 2.0).abs() < 1e-12);
            assert!(r.report.feasible);
            assert!((r.report.alpha_opt.unwrap() - 0.5).abs() < 1e-10);
            assert!((r.report.beta_opt - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kl_transform_with_invertible_k() {
        let k = ComplexMatrix::diag_real(&[3.0, 1.0, 1.0]);
        let l = ComplexMatrix::diag_real(&[1.0 / 3.0, 1.0, 1.0]);
        let p = diag_phase_pair();
        let r = kl_transform(&p, &k, &l, &tol()).unwrap();
        for (a, b) in r.pair.x_vectors().iter().zip(p.x_vectors()) {
            for (u, v) in a.iter().zip(b) {
                assert!((u - v).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn kl_transform_rejects_non_inner_inverse() {
        let (p, k, _) = inner_inverse_example(0.0);
        let bad = ComplexMatrix::identity(2).scale_real(2.0);
        assert!(matches!(
            kl_transform(&p, &k, &bad, &tol()),
            Err(BiframeError::InnerInverseViolated { .. })
        ));
    }

    #[test]
    fn unitary_conjugation_by_swap_keeps_bounds() {
        let k = ComplexMatrix::diag_real(&[3.0, 1.0, 1.0]);
        let u = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        let (r, phi_r) = unitary_conjugate(&diag_phase_pair(), &k, &u, &tol()).unwrap();
        assert!((r.report.alpha_opt.unwrap() - 1.0 / 9.0).abs() < 1e-12);
        assert!((r.report.beta_opt - 1.0).abs() < 1e-14);
        assert!(phi_r.feasible);
        assert!(r.identities.iter().all(|(_, v)| *v < 1e-12));

        let (id, _) = unitary_conjugate(&diag_phase_pair(), &k, &ComplexMatrix::identity(3), &tol()).unwrap();
        assert_eq!(id.pair, diag_phase_pair());
    }

    #[test]
    fn unitary_conjugation_rejects_non_unitary() {
        let k = ComplexMatrix::identity(3);
        let u = ComplexMatrix::diag_real(&[1.0, 1.0, 1.1]);
        assert!(matches!(
            unitary_conjugate(&diag_phase_pair(), &k, &u, &tol()),
            Err(BiframeError::NotUnitary { .. })
        ));
    }

    #[test]
    fn phi_transform_diagonal_example() {
        // phi(T) = diag(1/2, 1, 0), G' = diag(1/4, 1/2, 0); on span{e1, e2}
        // the pencil diag(1/4 - 9 alpha, 1/2 - alpha) gives alpha = 1/36
        let t = ComplexMatrix::diag_real(&[2.0, 1.0, 0.0]);
        let k = ComplexMatrix::diag_real(&[3.0, 1.0, 1.0]);
        let r = phi_transform(&diag_phase_pair(), &t, &k, &tol()).unwrap();
        assert_eq!(r.domain.dim(), 2);
        assert!(r.domain.residual(&unit_vector(3, 2)) > 0.99);
        assert!(r.pair.x_vectors()[0][0] == c(0.5, 0.0));
        assert!(r.report.feasible);
        assert!((r.report.alpha_opt.unwrap() - 1.0 / 36.0).abs() < 1e-12);
        assert!((r.report.beta_opt - 0.5).abs() < 1e-14);
        assert!(r.report.beta_opt <= r.proof_beta);
    }

    #[test]
    fn phi_transform_identity_and_hypotheses() {
        let k = ComplexMatrix::diag_real(&[3.0, 1.0, 1.0]);
        let r = phi_transform(&diag_phase_pair(), &ComplexMatrix::identity(3), &k, &tol()).unwrap();
        assert_eq!(r.pair, diag_phase_pair());
        assert!(r.domain.is_full());

        let shift = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        assert!(matches!(
            phi_transform(&diag_phase_pair(), &shift, &k, &tol()),
            Err(BiframeError::NotEP)
        ));
        let mixing = ComplexMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert!(matches!(
            phi_transform(&diag_phase_pair(), &mixing, &k, &tol()),
            Err(BiframeError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn lambda_shift_diagonal_example() {
        let t = ComplexMatrix::diag_real(&[2.0, 3.0]);
        let k = ComplexMatrix::identity(2);
        let p = VectorPairSystem::parseval_basis(2);
        let r = lambda_shift_transform(&p, &t, &k, c(1.0, 0.0), &tol()).unwrap();
        assert!(r.domain.is_full());
        assert!((r.report.alpha_opt.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.report.beta_opt - 4.0).abs() < 1e-14);

        let id = lambda_shift_transform(&p, &ComplexMatrix::identity(2), &k, c(0.0, 0.0), &tol()).unwrap();
        assert_eq!(id.pair, p);
    }

    #[test]
    fn lambda_shift_hypotheses() {
        let t = ComplexMatrix::diag_real(&[2.0, 3.0]);
        let p = VectorPairSystem::parseval_basis(2);
        let k = ComplexMatrix::identity(2);
        assert!(matches!(
            lambda_shift_transform(&p, &t, &k, c(2.0, 0.0), &tol()),
            Err(BiframeError::HypothesisViolated(_))
        ));
        let singular = ComplexMatrix::diag_real(&[2.0, 0.0]);
        assert!(matches!(
            lambda_shift_transform(&p, &singular, &k, c(0.0, 0.0), &tol()),
            Err(BiframeError::HypothesisViolated(_))
        ));
        let k2 = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(
            lambda_shift_transform(&p, &t, &k2, c(0.0, 0.0), &tol()),
            Err(BiframeError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn membership_examples() {
        let k = ComplexMatrix::diag_real(&[3.0, 1.0, 1.0]);
        let m = projection_membership(&diag_phase_pair(), &k, &tol()).unwrap();
        assert!((m.report.alpha_opt.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((m.report.beta_opt - 1.0).abs() < 1e-14);
        // alpha = 1/9, sigma_1 = 3, gamma = 1
        assert!((m.norm_constant - 1.0 / 81.0).abs() < 1e-12);
        assert!((m.gamma_constant - 1.0 / 9.0).abs() < 1e-12);

        let m = phi_membership(&diag_phase_pair(), &k, &tol()).unwrap();
        assert!((m.report.alpha_opt.unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn norm_constant_is_not_a_lower_bound_for_small_k() {
        // G = I/100, K = I/10: alpha = 1 and the projector bound is 1/100,
        // below alpha / sigma_1^2 = 100 but equal to alpha gamma^2
        let x: Vec<Vec<C64>> = (0..3).map(|k| unit_vector(3, k)).collect();
        let y: Vec<Vec<C64>> = x.iter().map(|v| v.iter().map(|z| z * 0.01).collect()).collect();
        let p = VectorPairSystem::new(3, x, y).unwrap();
        let k = ComplexMatrix::identity(3).scale_real(0.1);
        let m = projection_membership(&p, &k, &tol()).unwrap();
        let a = m.report.alpha_opt.unwrap();
        assert!((a - 0.01).abs() < 1e-12);
        assert!((m.norm_constant - 100.0).abs() < 1e-9);
        assert!((m.gamma_constant - a).abs() < 1e-12);
    }

    #[test]
    fn membership_with_identity_k_reduces_to_plain_bounds() {
        let k = ComplexMatrix::identity(3);
        let m = phi_membership(&diag_phase_pair(), &k, &tol()).unwrap();
        let p = projection_membership(&diag_phase_pair(), &k, &tol()).unwrap();
        let plain = crate::biframe::biframe_bounds(&diag_phase_pair(), &tol()).unwrap();
        for r in [&m.report, &p.report] {
            assert!((r.alpha_opt.unwrap() - plain.alpha_opt.unwrap()).abs() < 1e-12);
            assert_eq!(r.beta_opt, plain.beta_opt);
        }
    }
}
