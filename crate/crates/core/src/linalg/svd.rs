use super::matrix::{inner, norm, ComplexMatrix, C64};
use crate::error::{BiframeError, Result};

const MAX_SWEEPS: usize = 80;

/// Full singular value decomposition `A = U diag(sigma) V^H`.
///
/// `u` is `m x m`, `v` is `n x n`, `sigma` has `min(m, n)` entries in
/// descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn largest(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `rank_rel * sigma_1`.
    pub fn rank(&self, rank_rel: f64) -> usize {
        let s1 = self.largest();
        if s1 == 0.0 {
            return 0;
        }
        self.sigma.iter().take_while(|&&s| s > rank_rel * s1).count()
    }

    /// Rebuilds `U diag(sigma) V^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut us = ComplexMatrix::zeros(m, n);
        for (k, &s) in self.sigma.iter().enumerate() {
            for i in 0..m {
                us[(i, k)] = self.u[(i, k)] * s;
            }
        }
        &us * &self.v.adjoint()
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if a.rows() >= a.cols() {
        tall_svd(a)
    } else {
        let t = tall_svd(&a.adjoint())?;
        Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        })
    }
}

fn tall_svd(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = a.shape();
    let mut cols = a.columns();
    let mut v: Vec<Vec<C64>> = (0..n).map(|j| super::matrix::unit_vector(n, j)).collect();

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&cols[q], &cols[p]); // a_p^H a_q
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let pc = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s, pc);
                rotate(&mut v, p, q, c, s, pc);
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps == MAX_SWEEPS {
            return Err(BiframeError::NoConvergence {
                routine: "one-sided jacobi svd",
                sweeps,
            });
        }
    }

    let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let s1 = sigma.first().copied().unwrap_or(0.0);

    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(m);
    for (k, &i) in order.iter().enumerate() {
        if sigma[k] > f64::EPSILON * s1 && sigma[k] > 0.0 {
            u_cols.push(cols[i].iter().map(|z| z / sigma[k]).collect());
        } else {
            break;
        }
    }
    complete_basis(&mut u_cols, m);

    let v_ordered: Vec<Vec<C64>> = order.iter().map(|&i| v[i].clone()).collect();
    Ok(Svd {
        u: ComplexMatrix::from_columns(m, &u_cols)?,
        sigma,
        v: ComplexMatrix::from_columns(n, &v_ordered)?,
    })
}

// [a_p, a_q] <- [a_p, e^{-i phi} a_q] * [[c, s], [-s, c]]
fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, pc: C64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yp = *y * pc;
        let xp = *x;
        *x = xp * c - yp * s;
        *y = xp * s + yp * c;
    }
}

/// Extends an orthonormal family to a basis of C^m: each step takes the
/// standard basis vector with the largest residual against the family and
/// normalizes its (twice orthogonalized) residual.
pub(crate) fn complete_basis(cols: &mut Vec<Vec<C64>>, m: usize) {
    let orthogonalize = |cand: &mut Vec<C64>, cols: &[Vec<C64>]| {
        for _ in 0..2 {
            for q in cols {
                let h = inner(cand, q);
                for (c, qq) in cand.iter_mut().zip(q) {
                    *c -= h * qq;
                }
            }
        }
    };
    while cols.len() < m {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for k in 0..m {
            let mut cand = super::matrix::unit_vector(m, k);
            orthogonalize(&mut cand, cols);
            let nrm = norm(&cand);
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, cand));
            }
        }
        let (nrm, cand) = best.expect("m > 0");
        cols.push(cand.iter().map(|z| z / nrm).collect());
    }
}
