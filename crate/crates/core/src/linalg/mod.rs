//! Dense complex linear algebra: Jacobi eigen/SVD, rank, pseudoinverse and
//! subspace arithmetic under an explicit [`ToleranceProfile`].

mod eig;
mod matrix;
mod subspace;
mod svd;
mod tolerance;

pub use eig::{herm_eig, herm_eig_part, HermitianEigen};
pub use matrix::{inner, norm, unit_vector, ComplexMatrix, C64, ONE, ZERO};
pub use subspace::{subspace_eq, subspace_leq, Subspace};
pub use svd::{svd, Svd};
pub use tolerance::ToleranceProfile;

use crate::error::Result;

/// Count of singular values above `rank_rel * sigma_1`; zero for the zero matrix.
pub fn rank(a: &ComplexMatrix, tol: &ToleranceProfile) -> Result<usize> {
    Ok(svd(a)?.rank(tol.rank_rel))
}

/// Spectral norm `sigma_1(A)`.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(svd(a)?.largest())
}

/// Moore-Penrose pseudoinverse `V diag(1/sigma_i) U^H` over the kept singular values.
pub fn pinv(a: &ComplexMatrix, tol: &ToleranceProfile) -> Result<ComplexMatrix> {
    let s = svd(a)?;
    Ok(pinv_from_svd(&s, tol.rank_rel))
}

pub(crate) fn pinv_from_svd(s: &Svd, rank_rel: f64) -> ComplexMatrix {
    let (m, n) = (s.u.rows(), s.v.rows());
    let r = s.rank(rank_rel);
    let mut out = ComplexMatrix::zeros(n, m);
    for k in 0..r {
        let inv = 1.0 / s.sigma[k];
        for i in 0..n {
            let vik = s.v[(i, k)] * inv;
            for j in 0..m {
                out[(i, j)] += vik * s.u[(j, k)].conj();
            }
        }
    }
    out
}

/// Orthonormal basis of `R(A)`.
pub fn range_basis(a: &ComplexMatrix, tol: &ToleranceProfile) -> Result<Subspace> {
    let s = svd(a)?;
    let r = s.rank(tol.rank_rel);
    Ok(Subspace::from_parts_unchecked(
        s.u.column_range(0, r),
        tol.subspace_tol(),
    ))
}

/// Orthonormal basis of `N(A)`.
pub fn null_basis(a: &ComplexMatrix, tol: &ToleranceProfile) -> Result<Subspace> {
    let s = svd(a)?;
    let r = s.rank(tol.rank_rel);
    Ok(Subspace::from_parts_unchecked(
        s.v.column_range(r, a.cols()),
        tol.subspace_tol(),
    ))
}

/// Orthonormal basis of the span of the given vectors.
pub fn span(n: usize, vectors: &[Vec<C64>], tol: &ToleranceProfile) -> Result<Subspace> {
    if vectors.is_empty() {
        return Ok(Subspace::trivial(n, tol.subspace_tol()));
    }
    range_basis(&ComplexMatrix::from_columns(n, vectors)?, tol)
}

/// Orthogonal projector onto `S`.
pub fn projector(s: &Subspace) -> ComplexMatrix {
    s.projector()
}

/// The four Penrose residuals of a candidate pseudoinverse, in order
/// `||A X A - A||`, `||X A X - X||`, `||(AX)^H - AX||`, `||(XA)^H - XA||`
/// (Frobenius).
pub fn penrose_residuals(a: &ComplexMatrix, x: &ComplexMatrix) -> [f64; 4] {
    let ax = a * x;
    let xa = x * a;
    [
        (&ax * a).distance(a),
        (&xa * x).distance(x),
        ax.adjoint().distance(&ax),
        xa.adjoint().distance(&xa),
    ]
}

/// Normalizing scale for Penrose residuals: `max(1, ||A||_F, ||A^+||_F)`.
pub fn penrose_scale(a: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
    1f64.max(a.frobenius_norm()).max(x.frobenius_norm())
}
