use super::matrix::{ComplexMatrix, C64, ZERO};
use super::tolerance::ToleranceProfile;
use crate::error::{BiframeError, Result};

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `A = V diag(values) V^H` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `k` belongs to `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min_vector(&self) -> Vec<C64> {
        self.vectors.column(0)
    }

    pub fn max_vector(&self) -> Vec<C64> {
        self.vectors.column(self.values.len() - 1)
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.
///
/// Fails with `NotHermitian` when `||A - A^H||_F` exceeds the scaled `eq_abs`.
pub fn herm_eig(a: &ComplexMatrix, tol: &ToleranceProfile) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(BiframeError::DimensionMismatch(format!(
            "herm_eig needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let defect = a.hermitian_defect();
    if defect > tol.eq_floor(a.frobenius_norm()) {
        return Err(BiframeError::NotHermitian { defect });
    }
    jacobi_eig(&a.hermitian_part())
}

/// Same as [`herm_eig`] on the Hermitian part of `a`, without the symmetry gate.
/// Used internally on matrices that are Hermitian up to rounding.
pub fn herm_eig_part(a: &ComplexMatrix) -> Result<HermitianEigen> {
    jacobi_eig(&a.hermitian_part())
}

fn off_norm_sq(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi_eig(input: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = input.rows();
    let mut a = input.clone();
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();
    let target = (4.0 * n as f64 * f64::EPSILON * total).powi(2);

    let mut converged = n < 2 || off_norm_sq(&a) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(BiframeError::NoConvergence {
                routine: "hermitian jacobi",
                sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / b; // e^{i phi}
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                let pc = phase.conj();
                // columns: A <- A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * (pc * s);
                    a[(k, q)] = akp * s + akq * (pc * c);
                }
                // rows: A <- J^H A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * (phase * s);
                    a[(q, k)] = apk * s + aqk * (phase * c);
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * (pc * s);
                    v[(k, q)] = vkp * s + vkq * (pc * c);
                }
            }
        }
        converged = off_norm_sq(&a) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = v.select_columns(&order);
    normalize_phases(&mut vectors);
    Ok(HermitianEigen { values, vectors })
}

/// Makes the first non-negligible component of each column real positive.
pub(crate) fn normalize_phases(v: &mut ComplexMatrix) {
    for j in 0..v.cols() {
        let col = v.column(j);
        let scale = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            continue;
        }
        if let Some(z) = col.iter().find(|z| z.norm() > 1e-8 * scale) {
            let ph = z.conj() / z.norm();
            let rotated: Vec<C64> = col.iter().map(|w| w * ph).collect();
            v.set_column(j, &rotated);
        }
    }
}
