//! Operator classification: reduced minimum modulus, EP, normal and
//! semi-regular tests, generalized range, Douglas majorization and
//! `phi(K) = (K^+)^H`.
//!
//! In finite dimension every range is closed, so "closed range" is always
//! true and `gamma(T)` is reported as its quantitative proxy.

use serde::{Serialize, Serializer};

use crate::error::{BiframeError, Result};
use crate::linalg::{
    herm_eig_part, null_basis, penrose_residuals, penrose_scale, pinv_from_svd, range_basis,
    subspace_eq, subspace_leq, svd, ComplexMatrix, Subspace, ToleranceProfile, C64,
};

fn require_square(t: &ComplexMatrix, what: &str) -> Result<()> {
    if t.is_square() {
        Ok(())
    } else {
        Err(BiframeError::DimensionMismatch(format!(
            "{what} needs a square operator, got {}x{}",
            t.rows(),
            t.cols()
        )))
    }
}

/// Reduced minimum modulus: the smallest singular value above the rank
/// cutoff, `f64::INFINITY` for the zero operator.
pub fn gamma(t: &ComplexMatrix, tol: &ToleranceProfile) -> Result<f64> {
    let s = svd(t)?;
    let r = s.rank(tol.rank_rel);
    Ok(if r == 0 { f64::INFINITY } else { s.sigma[r - 1] })
}

/// `(K^+)^H`.
pub fn phi(k: &ComplexMatrix, tol: &ToleranceProfile) -> Result<ComplexMatrix> {
    Ok(crate::linalg::pinv(k, tol)?.adjoint())
}

/// Outcome of the EP test together with the two compared ranges.
#[derive(Debug, Clone)]
pub struct EpCheck {
    pub is_ep: bool,
    pub range: Subspace,
    pub corange: Subspace,
}

/// `R(T) = R(T^H)`.
pub fn is_ep(t: &ComplexMatrix, tol: &ToleranceProfile) -> Result<EpCheck> {
    require_square(t, "is_ep")?;
    let range = range_basis(t, tol)?;
    let corange = range_basis(&t.adjoint(), tol)?;
    let is_ep = subspace_eq(&range, &corange, tol.subspace_tol())?;
    Ok(EpCheck {
        is_ep,
        range,
        corange,
    })
}

/// Frobenius norm of `T T^H - T^H T`.
pub fn normality_defect(t: &ComplexMatrix) -> f64 {
    let th = t.adjoint();
    (t * &th).distance(&(&th * t))
}

/// `||T T^H - T^H T|| <= eq_abs * max(1, ||T||_F^2)`.
pub fn is_normal(t: &ComplexMatrix, tol: &ToleranceProfile) -> Result<bool> {
    require_square(t, "is_normal")?;
    Ok(normality_defect(t) <= tol.eq_floor(t.frobenius_norm().powi(2)))
}

/// Stabilized chain `R(T) ⊇ R(T^2) ⊇ ...`, computed by applying `T` to an
/// orthonormal basis of the previous power range.
#[derive(Debug, Clone)]
pub struct PowerRanges {
    /// `ranges[k]` spans `R(T^{k+1})`; the last entry is `R^inf(T)`.
    pub ranges: Vec<Subspace>,
}

impl PowerRanges {
    pub fn generalized_range(&self) -> &Subspace {
        self.ranges.last().expect("at least one power")
    }
}

pub fn power_ranges(t: &ComplexMatrix, tol: &ToleranceProfile) -> Result<PowerRanges> {
    require_square(t, "generalized_range")?;
    let n = t.rows();
    let mut ranges = vec![range_basis(t, tol)?];
    loop {
        let prev = ranges.last().expect("nonempty");
        if prev.is_trivial() || ranges.len() > n {
            break;
        }
        let next = range_basis(&(t * prev.basis()), tol)?;
        let stable = next.dim() == prev.dim();
        ranges.push(next);
        if stable {
            break;
        }
    }
    Ok(PowerRanges { ranges })
}

/// `R^inf(T)`: the power range at which the rank stabilizes.
pub fn generalized_range(t: &ComplexMatrix, tol: &ToleranceProfile) -> Result<Subspace> {
    Ok(power_ranges(t, tol)?.generalized_range().clone())
}

#[derive(Debug, Clone)]
pub struct SemiRegularCheck {
    pub is_semi_regular: bool,
    pub kernel: Subspace,
    pub generalized_range: Subspace,
    /// `chain[k]` answers `N(T) ⊆ R(T^{k+1})` for `k < dim`.
    pub chain: Vec<bool>,
}

/// `N(T) ⊆ R^inf(T)`; the per-power chain is reported for diagnostics.
pub fn is_semi_regular(t: &ComplexMatrix, tol: &ToleranceProfile) -> Result<SemiRegularCheck> {
    let powers = power_ranges(t, tol)?;
    let kernel = null_basis(t, tol)?;
    let stol = tol.subspace_tol();
    let n = t.rows();
    let mut chain = Vec::with_capacity(n);
    for k in 0..n {
        let r = powers
            .ranges
            .get(k)
            .unwrap_or_else(|| powers.generalized_range());
        chain.push(subspace_leq(&kernel, r, stol)?);
    }
    let gr = powers.generalized_range().clone();
    let is_semi_regular = subspace_leq(&kernel, &gr, stol)?;
    Ok(SemiRegularCheck {
        is_semi_regular,
        kernel,
        generalized_range: gr,
        chain,
    })
}

/// Optimal Douglas constant for `R(T) ⊆ R(G)`.
#[derive(Debug, Clone)]
pub enum Majorization {
    /// Largest `alpha` with `alpha T T^H <= G G^H`; infinite when `T = 0`.
    Alpha(f64),
    /// `R(T)` is not inside `R(G)`: `G^H x = 0` while `T^H x != 0`.
    NotContained { witness: Vec<C64> },
}

pub fn douglas_alpha(
    t: &ComplexMatrix,
    g: &ComplexMatrix,
    tol: &ToleranceProfile,
) -> Result<Majorization> {
    if t.shape() != g.shape() {
        return Err(BiframeError::DimensionMismatch(
            "douglas_alpha needs equally shaped operators".into(),
        ));
    }
    let rt = range_basis(t, tol)?;
    let gs = svd(g)?;
    let rg = Subspace::from_parts_unchecked(
        gs.u.column_range(0, gs.rank(tol.rank_rel)),
        tol.subspace_tol(),
    );
    if !subspace_leq(&rt, &rg, tol.subspace_tol())? {
        // the range direction of T sticking out of R(G) the most
        let coeffs = &rg.basis().adjoint() * rt.basis();
        let outside = rt.basis() - &(rg.basis() * &coeffs);
        let (best, nrm) = (0..outside.cols())
            .map(|j| (j, crate::linalg::norm(&outside.column(j))))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let witness = outside.column(best).iter().map(|z| z / nrm).collect();
        return Ok(Majorization::NotContained { witness });
    }
    let m = &pinv_from_svd(&gs, tol.rank_rel) * t;
    let top = herm_eig_part(&(&m.adjoint() * &m))?.max();
    Ok(Majorization::Alpha(if top <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / top
    }))
}

/// `||AB - BA||_F <= eq_abs * max(1, ||A||_F ||B||_F)`.
pub fn commutes(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceProfile) -> Result<bool> {
    Ok(commutator_norm(a, b)? <= tol.eq_floor(a.frobenius_norm() * b.frobenius_norm()))
}

pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(BiframeError::DimensionMismatch(format!(
            "commutator of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok((a * b).distance(&(b * a)))
}

fn serialize_gamma<S: Serializer>(g: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if g.is_infinite() {
        s.serialize_str("Infinity")
    } else {
        s.serialize_f64(*g)
    }
}

/// Classification record of a square operator.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorProfile {
    pub dim: usize,
    #[serde(serialize_with = "serialize_gamma")]
    pub gamma: f64,
    pub rank: usize,
    /// Always true in finite dimension.
    pub closed_range: bool,
    #[serde(rename = "ep")]
    pub is_ep: bool,
    #[serde(rename = "normal")]
    pub is_normal: bool,
    #[serde(rename = "semi_regular")]
    pub is_semi_regular: bool,
    #[serde(rename = "invertible")]
    pub is_invertible: bool,
    /// `N(T) ⊆ R(T^n)` for `n = 1..=dim`.
    pub semi_regular_chain: Vec<bool>,
    pub generalized_range_dim: usize,
    /// Largest Penrose residual of the computed pseudoinverse, relative to
    /// `max(1, ||T||_F, ||T^+||_F)`.
    pub penrose_residual: f64,
    pub normality_defect: f64,
}

pub fn profile(t: &ComplexMatrix, tol: &ToleranceProfile) -> Result<OperatorProfile> {
    require_square(t, "profile")?;
    let n = t.rows();
    let s = svd(t)?;
    let rank = s.rank(tol.rank_rel);
    let gamma = if rank == 0 {
        f64::INFINITY
    } else {
        s.sigma[rank - 1]
    };
    let p = pinv_from_svd(&s, tol.rank_rel);
    let scale = penrose_scale(t, &p);
    let penrose_residual = penrose_residuals(t, &p)
        .iter()
        .fold(0.0f64, |m, r| m.max(r / scale));
    let ep = is_ep(t, tol)?;
    let sr = is_semi_regular(t, tol)?;
    Ok(OperatorProfile {
        dim: n,
        gamma,
        rank,
        closed_range: true,
        is_ep: ep.is_ep,
        is_normal: is_normal(t, tol)?,
        is_semi_regular: sr.is_semi_regular,
        is_invertible: rank == n,
        semi_regular_chain: sr.chain,
        generalized_range_dim: sr.generalized_range.dim(),
        penrose_residual,
        normality_defect: normality_defect(t),
    })
}
