//! Lanczos approximation of `exp(-i t H) v` for real symmetric sparse `H`.
//!
//! Each step builds an orthonormal Krylov basis `V_m` of `span{v, Hv, ...}`
//! and the tridiagonal projection `T_m = V_m^H H V_m`, then takes
//! `exp(-i t H) v ~ ||v|| V_m exp(-i t T_m) e_1`. The a posteriori estimate
//! `beta_{m+1} |[exp(-i t T_m) e_1]_m|` controls both the basis size (the
//! basis stops growing once the estimate meets the step tolerance) and the
//! step length (halved on the same basis when the largest basis is not
//! enough).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::state::norm_of;

const BREAKDOWN: f64 = 1e-13;
const MAX_HALVINGS: usize = 60;
const MIN_BASIS: usize = 3;

#[derive(Debug, Default, Clone, Copy)]
pub struct KrylovStats {
    pub steps: usize,
    pub matvecs: usize,
}

/// Reusable workspace; owns the Krylov vectors for one evolution at a time.
pub(crate) struct Lanczos {
    max_dim: usize,
    vectors: Vec<Vec<Complex64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    work: Vec<Complex64>,
    pub(crate) stats: KrylovStats,
}

/// `exp(-i t T) e_1` for the tridiagonal projection `T`, by scaling and
/// squaring on the small complex matrix.
struct SmallExp {
    t: DMatrix<Complex64>,
}

impl SmallExp {
    fn new(alpha: &[f64], beta: &[f64]) -> Self {
        let m = alpha.len();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = Complex64::new(alpha[i], 0.0);
            if i + 1 < m {
                t[(i, i + 1)] = Complex64::new(beta[i + 1], 0.0);
                t[(i + 1, i)] = Complex64::new(beta[i + 1], 0.0);
            }
        }
        SmallExp { t }
    }

    fn apply_e1(&self, t: f64) -> Vec<Complex64> {
        let u = (&self.t * Complex64::new(0.0, -t)).exp();
        u.column(0).iter().copied().collect()
    }
}

impl Lanczos {
    pub(crate) fn new(max_dim: usize, n: usize) -> Self {
        let max_dim = max_dim.max(MIN_BASIS);
        Lanczos {
            max_dim,
            vectors: Vec::with_capacity(max_dim + 1),
            alpha: Vec::with_capacity(max_dim),
            beta: Vec::with_capacity(max_dim + 1),
            work: vec![Complex64::new(0.0, 0.0); n],
            stats: KrylovStats::default(),
        }
    }

    fn ensure_len(&mut self, n: usize) {
        if self.work.len() != n {
            self.work = vec![Complex64::new(0.0, 0.0); n];
            self.vectors.clear();
        }
    }

    /// Overwrites `psi` with `exp(-i duration H) psi`, keeping the summed
    /// per-step error estimate below `tol`.
    pub(crate) fn evolve(
        &mut self,
        h: &SparseHamiltonian,
        psi: &mut [Complex64],
        duration: f64,
        tol: f64,
    ) -> Result<()> {
        if duration == 0.0 {
            return Ok(());
        }
        let n = psi.len();
        self.ensure_len(n);
        let total = duration.abs();
        let sign = duration.signum();
        let scale = h.norm_bound().max(1e-300);
        let mut remaining = total;
        // a few radians per step is comfortably inside the basis' reach
        let mut step_guess = (0.5 * self.max_dim as f64 / scale).min(total);
        let step_budget = 10_000_000usize;

        while remaining > 0.0 {
            if self.stats.steps > step_budget {
                return Err(Error::NonConvergence("Krylov step budget exhausted".into()));
            }
            let beta0 = norm_of(psi);
            if beta0 == 0.0 {
                return Ok(());
            }
            let step_try = step_guess.min(remaining);
            let (dim, step, y) =
                self.build_and_fit(h, psi, beta0, step_try, sign, total, tol, scale)?;
            // psi <- beta0 * V y
            for (k, z) in psi.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, yj) in y.iter().enumerate().take(dim) {
                    acc += self.vectors[j][k] * yj;
                }
                *z = acc * beta0;
            }
            remaining -= step;
            if remaining < total * 1e-15 {
                remaining = 0.0;
            }
            self.stats.steps += 1;
            step_guess = if step < step_try { step } else { step * 1.5 };
        }
        Ok(())
    }

    /// Builds the basis from `psi` and returns `(basis size, accepted step,
    /// exp(-i step T) e_1)`.
    #[allow(clippy::too_many_arguments)]
    fn build_and_fit(
        &mut self,
        h: &SparseHamiltonian,
        psi: &[Complex64],
        beta0: f64,
        step_try: f64,
        sign: f64,
        total: f64,
        tol: f64,
        scale: f64,
    ) -> Result<(usize, f64, Vec<Complex64>)> {
        let n = psi.len();
        self.alpha.clear();
        self.beta.clear();
        self.beta.push(0.0);
        while self.vectors.len() < self.max_dim + 1 {
            self.vectors.push(vec![Complex64::new(0.0, 0.0); n]);
        }
        for (v, p) in self.vectors[0].iter_mut().zip(psi) {
            *v = p / beta0;
        }
        let step_tol = |step: f64| tol * step / total;
        let signed = |step: f64| sign * step;

        for j in 0..self.max_dim {
            h.matvec_into(&self.vectors[j], &mut self.work);
            self.stats.matvecs += 1;
            if j > 0 {
                let bj = self.beta[j];
                let prev = &self.vectors[j - 1];
                for (w, v) in self.work.iter_mut().zip(prev) {
                    *w -= v * bj;
                }
            }
            let a: f64 = self.vectors[j]
                .iter()
                .zip(&self.work)
                .map(|(v, w)| (v.conj() * w).re)
                .sum();
            self.alpha.push(a);
            let vj = &self.vectors[j];
            for (w, v) in self.work.iter_mut().zip(vj) {
                *w -= v * a;
            }
            // second Gram-Schmidt pass against the two latest vectors; short
            // steps keep the basis small enough that this suffices
            for i in j.saturating_sub(1)..=j {
                let c: Complex64 = self.vectors[i]
                    .iter()
                    .zip(&self.work)
                    .map(|(v, w)| v.conj() * w)
                    .sum();
                let vi = &self.vectors[i];
                for (w, v) in self.work.iter_mut().zip(vi) {
                    *w -= c * v;
                }
            }
            let b = norm_of(&self.work);
            let m = j + 1;
            if b < BREAKDOWN * scale {
                // invariant subspace: the projection is exact
                let e = SmallExp::new(&self.alpha, &self.beta);
                return Ok((m, step_try, e.apply_e1(signed(step_try))));
            }
            self.beta.push(b);
            for (v, w) in self.vectors[j + 1].iter_mut().zip(&self.work) {
                *v = w / b;
            }

            let check = m >= MIN_BASIS && (m % 2 == 0 || m == self.max_dim);
            if check {
                let e = SmallExp::new(&self.alpha, &self.beta);
                let y = e.apply_e1(signed(step_try));
                let err = b * y[m - 1].norm();
                if err <= step_tol(step_try) {
                    return Ok((m, step_try, y));
                }
                if m == self.max_dim {
                    let mut step = step_try;
                    for _ in 0..MAX_HALVINGS {
                        step *= 0.5;
                        let y = e.apply_e1(signed(step));
                        let err = b * y[m - 1].norm();
                        if err <= step_tol(step) {
                            return Ok((m, step, y));
                        }
                    }
                    return Err(Error::NonConvergence(format!(
                        "Krylov step could not reach tolerance {tol:e} (last step {step:e})"
                    )));
                }
            }
        }
        unreachable!("loop returns on the last basis size")
    }
}
