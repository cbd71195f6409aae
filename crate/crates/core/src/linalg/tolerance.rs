use serde::{Deserialize, Serialize};

use crate::error::{BiframeError, Result};

/// Numerical thresholds shared by every decision the library makes.
///
/// `psd_abs` and `eq_abs` are base values; callers multiply them by the
/// scale of the matrices involved (see [`ToleranceProfile::psd_floor`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    /// Relative singular-value cutoff: `sigma_i > rank_rel * sigma_1` is kept.
    pub rank_rel: f64,
    /// Absolute eigenvalue floor for positive-semidefinite tests, per unit scale.
    pub psd_abs: f64,
    /// Elementwise equality tolerance, per unit scale.
    pub eq_abs: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            rank_rel: 1e-10,
            psd_abs: 1e-9,
            eq_abs: 1e-9,
        }
    }
}

impl ToleranceProfile {
    pub fn new(rank_rel: f64, psd_abs: f64, eq_abs: f64) -> Result<Self> {
        let t = ToleranceProfile {
            rank_rel,
            psd_abs,
            eq_abs,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel", self.rank_rel),
            ("psd_abs", self.psd_abs),
            ("eq_abs", self.eq_abs),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(BiframeError::InvalidInput(format!(
                    "tolerance {name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// PSD floor for a matrix whose magnitude is `scale`.
    pub fn psd_floor(&self, scale: f64) -> f64 {
        self.psd_abs * scale.max(1.0)
    }

    /// Equality threshold for quantities of magnitude `scale`.
    pub fn eq_floor(&self, scale: f64) -> f64 {
        self.eq_abs * scale.max(1.0)
    }

    /// Threshold on `||(I - P_2) Q_1||_F` for subspace inclusion.
    ///
    /// Bases are orthonormal so no scale enters; a decade above `eq_abs`
    /// absorbs the angle error of ranges whose smallest kept singular value
    /// is small.
    pub fn subspace_tol(&self) -> f64 {
        10.0 * self.eq_abs
    }
}
