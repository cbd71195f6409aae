//! Seeded random operators, one generator per hypothesis class.
//!
//! Every output is checked against its defining predicate before it is
//! returned; draws that fail the check (or exceed the condition cap) are
//! retried a bounded number of times.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::biframe::{pair_operator, VectorPairSystem};
use crate::error::{BiframeError, Result};
use crate::linalg::{
    inner, norm, pinv, rank, svd, ComplexMatrix, ToleranceProfile, C64, ZERO,
};
use crate::operator::{is_ep, is_normal};

/// Largest condition number (over the kept singular values) a generated
/// operator may have.
pub const CONDITION_CAP: f64 = 1e6;
const MAX_RETRIES: usize = 32;

/// Seed and shape of one randomized trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeed {
    pub seed: u64,
    pub dim: usize,
    pub count: usize,
}

impl TrialSeed {
    pub fn new(seed: u64, dim: usize, count: usize) -> Self {
        TrialSeed { seed, dim, count }
    }
}

/// Deterministic source of structured random matrices.
pub struct MatrixGenerator {
    rng: ChaCha8Rng,
    tol: ToleranceProfile,
}

fn cond_over_kept(a: &ComplexMatrix, tol: &ToleranceProfile) -> Result<f64> {
    let s = svd(a)?;
    let r = s.rank(tol.rank_rel);
    Ok(if r == 0 {
        f64::INFINITY
    } else {
        s.sigma[0] / s.sigma[r - 1]
    })
}

impl MatrixGenerator {
    pub fn new(seed: u64) -> Self {
        Self::with_tolerance(seed, ToleranceProfile::default())
    }

    pub fn with_tolerance(seed: u64, tol: ToleranceProfile) -> Self {
        MatrixGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            tol,
        }
    }

    pub fn tolerance(&self) -> &ToleranceProfile {
        &self.tol
    }

    pub fn complex_normal(&mut self) -> C64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    /// Ginibre matrix with unit-variance complex entries.
    pub fn gaussian(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }

    /// Uniform point on the unit sphere of `C^n`.
    pub fn unit_vector(&mut self, n: usize) -> Vec<C64> {
        loop {
            let v: Vec<C64> = (0..n).map(|_| self.complex_normal()).collect();
            let nv = norm(&v);
            if nv > 1e-6 {
                return v.iter().map(|z| z / nv).collect();
            }
        }
    }

    /// Random Hermitian matrix `(A + A^H) / 2` with `A` Ginibre.
    pub fn hermitian(&mut self, n: usize) -> ComplexMatrix {
        self.gaussian(n, n).hermitian_part()
    }

    /// Haar unitary: Gram-Schmidt on a Ginibre matrix, which leaves the
    /// triangular factor with a positive real diagonal.
    pub fn unitary(&mut self, n: usize) -> Result<ComplexMatrix> {
        for _ in 0..MAX_RETRIES {
            let g = self.gaussian(n, n);
            let mut q: Vec<Vec<C64>> = Vec::with_capacity(n);
            let mut ok = true;
            for j in 0..n {
                let mut v = g.column(j);
                for _ in 0..2 {
                    for u in &q {
                        let h = inner(&v, u);
                        for (a, b) in v.iter_mut().zip(u) {
                            *a -= h * b;
                        }
                    }
                }
                let nv = norm(&v);
                if nv < 1e-8 {
                    ok = false;
                    break;
                }
                q.push(v.iter().map(|z| z / nv).collect());
            }
            if !ok {
                continue;
            }
            let u = ComplexMatrix::from_columns(n, &q)?;
            if (&u.adjoint() * &u).distance(&ComplexMatrix::identity(n)) <= self.tol.eq_floor(n as f64) {
                return Ok(u);
            }
        }
        Err(BiframeError::GenerationFailed("unitary".into()))
    }

    /// Gaussian matrix of exact rank `r` (product of `n x r` and `r x m`
    /// factors), with the nonzero part's condition number under the cap.
    pub fn with_rank(&mut self, rows: usize, cols: usize, r: usize) -> Result<ComplexMatrix> {
        if r == 0 {
            return Ok(ComplexMatrix::zeros(rows, cols));
        }
        if r > rows.min(cols) {
            return Err(BiframeError::InvalidInput(format!(
                "rank {r} exceeds {rows}x{cols}"
            )));
        }
        let scale = 1.0 / (r as f64).sqrt();
        for _ in 0..MAX_RETRIES {
            let a = &self.gaussian(rows, r) * &self.gaussian(r, cols).scale_real(scale);
            if rank(&a, &self.tol)? == r && cond_over_kept(&a, &self.tol)? <= CONDITION_CAP {
                return Ok(a);
            }
        }
        Err(BiframeError::GenerationFailed(format!("rank-{r} matrix")))
    }

    /// Square operator whose rank is drawn uniformly from `1..=n`.
    pub fn random_rank_operator(&mut self, n: usize) -> Result<ComplexMatrix> {
        let r = self.index(1, n);
        self.with_rank(n, n, r)
    }

    /// Invertible square Gaussian operator under the condition cap.
    pub fn invertible(&mut self, n: usize) -> Result<ComplexMatrix> {
        self.with_rank(n, n, n)
    }

    /// `U diag(d) U^H` with complex `d`; `n - r` of the entries vanish.
    pub fn normal(&mut self, n: usize, r: usize) -> Result<ComplexMatrix> {
        let u = self.unitary(n)?;
        let mut d = vec![ZERO; n];
        for slot in d.iter_mut().take(r) {
            let mag = self.uniform(0.5, 2.0);
            let ang = self.uniform(0.0, std::f64::consts::TAU);
            *slot = C64::from_polar(mag, ang);
        }
        let t = &(&u * &ComplexMatrix::diag(&d)) * &u.adjoint();
        if !is_normal(&t, &self.tol)? {
            return Err(BiframeError::GenerationFailed("normal operator".into()));
        }
        Ok(t)
    }

    /// `U [M ⊕ 0] U^H` with `M` an invertible `r x r` block.
    pub fn ep(&mut self, n: usize, r: usize) -> Result<ComplexMatrix> {
        check_rank(n, r)?;
        for _ in 0..MAX_RETRIES {
            let u = self.unitary(n)?;
            let m = self.invertible(r)?;
            let mut block = ComplexMatrix::zeros(n, n);
            for i in 0..r {
                for j in 0..r {
                    block[(i, j)] = m[(i, j)];
                }
            }
            let t = &(&u * &block) * &u.adjoint();
            if is_ep(&t, &self.tol)?.is_ep && rank(&t, &self.tol)? == r {
                return Ok(t);
            }
        }
        Err(BiframeError::GenerationFailed("EP operator".into()))
    }

    /// Oblique projector `S [I_r ⊕ 0] S^{-1}`.
    pub fn idempotent(&mut self, n: usize, r: usize) -> Result<ComplexMatrix> {
        check_rank(n, r)?;
        for _ in 0..MAX_RETRIES {
            let s = self.gaussian(n, n);
            if cond_over_kept(&s, &self.tol)? > 1e3 || rank(&s, &self.tol)? < n {
                continue;
            }
            let s_inv = pinv(&s, &self.tol)?;
            let mut d = vec![0.0; n];
            d.iter_mut().take(r).for_each(|x| *x = 1.0);
            let t = &(&s * &ComplexMatrix::diag_real(&d)) * &s_inv;
            if (&t * &t).distance(&t) <= self.tol.eq_floor(t.frobenius_norm()) {
                return Ok(t);
            }
        }
        Err(BiframeError::GenerationFailed("idempotent".into()))
    }

    /// Random complex polynomial of degree <= 3 evaluated at `h`.
    fn polynomial_in(&mut self, h: &ComplexMatrix) -> ComplexMatrix {
        let n = h.rows();
        let coeffs: Vec<C64> = (0..4).map(|_| self.complex_normal()).collect();
        // Horner
        let mut acc = ComplexMatrix::identity(n).scale(coeffs[3]);
        for c in coeffs[..3].iter().rev() {
            acc = &(&acc * h) + &ComplexMatrix::identity(n).scale(*c);
        }
        acc
    }

    /// `(K, T)`: both random cubic polynomials in one random Hermitian
    /// matrix, hence commuting and normal; `T` is invertible under the cap.
    pub fn commuting_family(&mut self, n: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
        for _ in 0..MAX_RETRIES {
            let h = self.hermitian(n).scale_real(1.0 / (n as f64).sqrt());
            let k = self.polynomial_in(&h);
            let t = self.polynomial_in(&h);
            if k.max_abs() == 0.0 || rank(&t, &self.tol)? < n {
                continue;
            }
            if cond_over_kept(&t, &self.tol)? > CONDITION_CAP || cond_over_kept(&k, &self.tol)? > CONDITION_CAP {
                continue;
            }
            return Ok((k, t));
        }
        Err(BiframeError::GenerationFailed("commuting family".into()))
    }

    /// `(K, T)` as in [`Self::commuting_family`] but with `T` Hermitian of
    /// nullity `nullity`: `T = c (H - mu_1)...(H - mu_q)` for eigenvalues
    /// `mu_i` of `H`, a real polynomial of degree `q <= 3`.
    pub fn commuting_family_singular(
        &mut self,
        n: usize,
        nullity: usize,
    ) -> Result<(ComplexMatrix, ComplexMatrix)> {
        if nullity == 0 || nullity > 3.min(n - 1) {
            return Err(BiframeError::InvalidInput(format!(
                "nullity {nullity} unsupported in dimension {n}"
            )));
        }
        for _ in 0..MAX_RETRIES {
            let h = self.hermitian(n).scale_real(1.0 / (n as f64).sqrt());
            let eig = crate::linalg::herm_eig_part(&h)?;
            let k = self.polynomial_in(&h);
            let mut t = ComplexMatrix::identity(n).scale_real(self.uniform(0.5, 2.0));
            let mut picked: Vec<usize> = Vec::new();
            while picked.len() < nullity {
                let i = self.index(0, n - 1);
                if !picked.contains(&i) {
                    picked.push(i);
                }
            }
            for &i in &picked {
                t = &t * &h.shift(C64::new(eig.values[i], 0.0));
            }
            let t = t.hermitian_part();
            if k.max_abs() == 0.0 || rank(&t, &self.tol)? != n - nullity {
                continue;
            }
            if cond_over_kept(&t, &self.tol)? > CONDITION_CAP || cond_over_kept(&k, &self.tol)? > CONDITION_CAP {
                continue;
            }
            return Ok((k, t));
        }
        Err(BiframeError::GenerationFailed("singular commuting family".into()))
    }

    /// Inner inverse `L = K^+ + (W - K^+ K W K K^+)`, which satisfies `KLK = K`
    /// identically for every `W`.
    pub fn inner_inverse(&mut self, k: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (m, n) = k.shape();
        let kp = pinv(k, &self.tol)?;
        for _ in 0..MAX_RETRIES {
            let w = self.gaussian(n, m);
            let correction = &w - &(&(&(&(&kp * k) * &w) * k) * &kp);
            let l = &kp + &correction;
            let residual = (&(k * &l) * k).distance(k);
            let scale = k.frobenius_norm().max(1.0) * (k.frobenius_norm() * l.frobenius_norm()).max(1.0);
            if residual <= self.tol.eq_floor(scale) {
                return Ok(l);
            }
        }
        Err(BiframeError::GenerationFailed("inner inverse".into()))
    }

    /// Random K-biframe for `K`: its pair operator is `K K^H + D` with `D`
    /// random PSD, so the lower bound is at least 1.
    pub fn k_biframe(&mut self, k: &ComplexMatrix, count: usize) -> Result<VectorPairSystem> {
        let n = k.rows();
        if !k.is_square() || k.max_abs() == 0.0 {
            return Err(BiframeError::InvalidInput("K must be square and nonzero".into()));
        }
        if count < n {
            return Err(BiframeError::InvalidInput(format!(
                "count {count} below dimension {n}"
            )));
        }
        let c = self.gaussian(n, n);
        let d = (&c * &c.adjoint()).scale_real(1.0 / n as f64);
        let target = (&(k * &k.adjoint()) + &d).hermitian_part();
        for _ in 0..MAX_RETRIES {
            let x = self.gaussian(n, count);
            if rank(&x, &self.tol)? < n || cond_over_kept(&x, &self.tol)? > 1e4 {
                continue;
            }
            return k_biframe_from_target(&target, &x, &self.tol);
        }
        Err(BiframeError::GenerationFailed("full row rank analysis family".into()))
    }
}

fn check_rank(n: usize, r: usize) -> Result<()> {
    if r == 0 || r > n {
        return Err(BiframeError::InvalidInput(format!(
            "rank {r} outside 1..={n}"
        )));
    }
    Ok(())
}

/// Pair with pair operator `target`: `x_j` are the columns of `x` (full row
/// rank) and `y_j` the columns of `target (x^H)^+`.
pub fn k_biframe_from_target(
    target: &ComplexMatrix,
    x: &ComplexMatrix,
    tol: &ToleranceProfile,
) -> Result<VectorPairSystem> {
    let n = target.rows();
    if x.rows() != n {
        return Err(BiframeError::DimensionMismatch("analysis family".into()));
    }
    if rank(x, tol)? < n {
        return Err(BiframeError::GenerationFailed("analysis family is rank deficient".into()));
    }
    let y = target * &pinv(&x.adjoint(), tol)?;
    let p = VectorPairSystem::new(n, x.columns(), y.columns())?;
    let err = pair_operator(&p).distance(target);
    if err > tol.eq_floor(target.frobenius_norm()) {
        return Err(BiframeError::GenerationFailed(format!(
            "pair operator misses its target by {err:.3e}"
        )));
    }
    Ok(p)
}

pub fn gen_unitary(t: &TrialSeed) -> Result<ComplexMatrix> {
    MatrixGenerator::new(t.seed).unitary(t.dim)
}

pub fn gen_normal(t: &TrialSeed) -> Result<ComplexMatrix> {
    let mut g = MatrixGenerator::new(t.seed);
    let r = g.index(1, t.dim);
    g.normal(t.dim, r)
}

pub fn gen_ep(t: &TrialSeed, r: usize) -> Result<ComplexMatrix> {
    MatrixGenerator::new(t.seed).ep(t.dim, r)
}

pub fn gen_idempotent(t: &TrialSeed, r: usize) -> Result<ComplexMatrix> {
    MatrixGenerator::new(t.seed).idempotent(t.dim, r)
}

pub fn gen_commuting_family(t: &TrialSeed) -> Result<(ComplexMatrix, ComplexMatrix)> {
    MatrixGenerator::new(t.seed).commuting_family(t.dim)
}

pub fn gen_inner_inverse(k: &ComplexMatrix, t: &TrialSeed) -> Result<ComplexMatrix> {
    MatrixGenerator::new(t.seed).inner_inverse(k)
}

pub fn gen_k_biframe(k: &ComplexMatrix, t: &TrialSeed) -> Result<VectorPairSystem> {
    MatrixGenerator::new(t.seed).k_biframe(k, t.count)
}
