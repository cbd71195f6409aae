use super::matrix::{ComplexMatrix, C64};
use crate::error::{BiframeError, Result};

/// A subspace of `C^n` held as an orthonormal column basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: ComplexMatrix,
    tol: f64,
}

impl Subspace {
    /// Wraps a basis that is already orthonormal; checks `Q^H Q = I` within `tol`.
    pub fn from_orthonormal(basis: ComplexMatrix, tol: f64) -> Result<Self> {
        let k = basis.cols();
        if k > basis.rows() {
            return Err(BiframeError::DimensionMismatch(format!(
                "{k} basis vectors in dimension {}",
                basis.rows()
            )));
        }
        let gram = &basis.adjoint() * &basis;
        let defect = gram.distance(&ComplexMatrix::identity(k));
        if defect > tol.max(1e-12) {
            return Err(BiframeError::InvalidInput(format!(
                "basis is not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Subspace { basis, tol })
    }

    pub(crate) fn from_parts_unchecked(basis: ComplexMatrix, tol: f64) -> Self {
        Subspace { basis, tol }
    }

    pub fn full(n: usize, tol: f64) -> Self {
        Subspace {
            basis: ComplexMatrix::identity(n),
            tol,
        }
    }

    pub fn trivial(n: usize, tol: f64) -> Self {
        Subspace {
            basis: ComplexMatrix::zeros(n, 0),
            tol,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Orthogonal projector `Q Q^H`.
    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * &self.basis.adjoint()
    }

    /// Distance of `v` from the subspace.
    pub fn residual(&self, v: &[C64]) -> f64 {
        let coeffs = self.basis.adjoint().mul_vec(v);
        let proj = self.basis.mul_vec(&coeffs);
        v.iter()
            .zip(&proj)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `||(I - P_other) Q_self||_F`, zero iff `self` is inside `other`.
    pub fn excess_over(&self, other: &Subspace) -> Result<f64> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(BiframeError::DimensionMismatch(format!(
                "subspaces of C^{} and C^{}",
                self.ambient_dim(),
                other.ambient_dim()
            )));
        }
        if self.is_trivial() {
            return Ok(0.0);
        }
        let coeffs = &other.basis.adjoint() * &self.basis;
        let proj = &other.basis * &coeffs;
        Ok(proj.distance(&self.basis))
    }
}

/// `S1 ⊆ S2` within `tol`.
pub fn subspace_leq(s1: &Subspace, s2: &Subspace, tol: f64) -> Result<bool> {
    Ok(s1.excess_over(s2)? <= tol)
}

/// Mutual inclusion.
pub fn subspace_eq(s1: &Subspace, s2: &Subspace, tol: f64) -> Result<bool> {
    Ok(s1.dim() == s2.dim() && subspace_leq(s1, s2, tol)? && subspace_leq(s2, s1, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::unit_vector;

    fn span(n: usize, idx: &[usize]) -> Subspace {
        let cols: Vec<Vec<C64>> = idx.iter().map(|&k| unit_vector(n, k)).collect();
        Subspace::from_orthonormal(ComplexMatrix::from_columns(n, &cols).unwrap(), 1e-8).unwrap()
    }

    #[test]
    fn trivial_is_inside_everything() {
        let t = Subspace::trivial(3, 1e-8);
        assert!(subspace_leq(&t, &span(3, &[1]), 1e-8).unwrap());
        assert!(subspace_leq(&t, &Subspace::trivial(3, 1e-8), 1e-8).unwrap());
    }

    #[test]
    fn disjoint_axes() {
        assert!(!subspace_leq(&span(2, &[0]), &span(2, &[1]), 1e-8).unwrap());
    }

    #[test]
    fn line_in_plane() {
        let a = span(2, &[0]);
        let b = span(2, &[0, 1]);
        assert!(subspace_leq(&a, &b, 1e-8).unwrap());
        assert!(!subspace_eq(&a, &b, 1e-8).unwrap());
        assert!(subspace_eq(&b, &Subspace::full(2, 1e-8), 1e-8).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            subspace_leq(&span(2, &[0]), &span(3, &[0]), 1e-8),
            Err(BiframeError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn projector_of_axis() {
        let p = span(2, &[0]).projector();
        assert_eq!(p, ComplexMatrix::diag_real(&[1.0, 0.0]));
        assert_eq!(Subspace::full(3, 1e-8).projector(), ComplexMatrix::identity(3));
    }

    #[test]
    fn non_orthonormal_rejected() {
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(Subspace::from_orthonormal(b, 1e-8).is_err());
    }
}
