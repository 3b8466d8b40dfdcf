//! Short-iteration Lanczos propagation for sparse Hamiltonians.
//!
//! Each step builds a Krylov basis of `H` from the current state, with full
//! reorthogonalization, and applies `exp(-i H dt)` through the small
//! tridiagonal projection. The step is accepted once the a-posteriori
//! estimate `beta_{m+1} |e_m^T exp(-i T_m dt) e_1|` falls below the tolerance;
//! if the basis cap is reached first, the step is split in halves.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hamiltonian::OperatorMatrix;
use crate::scalar::{Real, C};

use super::PureState;

#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    /// Local error tolerance per step, for a unit-norm state.
    pub tol: f64,
    /// Largest Krylov basis per (sub)step.
    pub max_dim: usize,
    /// How many times a step may be halved before giving up.
    pub max_halvings: u32,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_dim: 30,
            max_halvings: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct KrylovStats {
    pub steps: usize,
    pub substeps: usize,
    pub matvecs: usize,
    /// Largest change of the state norm over a single step.
    pub max_norm_drift: f64,
    pub max_error_estimate: f64,
}

pub struct KrylovPropagator<'a, T> {
    h: &'a OperatorMatrix<T>,
    options: KrylovOptions,
    stats: KrylovStats,
    basis: Vec<Vec<C<T>>>,
    work: Vec<C<T>>,
}

enum Attempt<T> {
    Accepted(Vec<C<T>>, T),
    Rejected(T),
}

impl<'a, T: Real> KrylovPropagator<'a, T> {
    pub fn new(h: &'a OperatorMatrix<T>, options: KrylovOptions) -> Self {
        Self {
            h,
            options,
            stats: KrylovStats::default(),
            basis: Vec::new(),
            work: vec![C::zero(); h.dim()],
        }
    }

    pub fn stats(&self) -> KrylovStats {
        self.stats
    }

    /// Advances `psi` by `dt`. `step_index` is reported on failure.
    pub fn step(&mut self, psi: &mut PureState<T>, dt: T, step_index: usize) -> Result<()> {
        self.h.basis().ensure_same(psi.basis(), "krylov step")?;
        let before = psi.norm();
        self.advance(psi.amplitudes_mut(), dt, 0, step_index)?;
        let drift = (psi.norm() - before).abs().to_f64_lossy();
        if drift > 1e-10 {
            log::warn!("krylov step {step_index}: norm drift {drift:e}");
        }
        self.stats.max_norm_drift = self.stats.max_norm_drift.max(drift);
        self.stats.steps += 1;
        Ok(())
    }

    fn advance(&mut self, psi: &mut [C<T>], dt: T, depth: u32, step_index: usize) -> Result<()> {
        match self.attempt(psi, dt) {
            Attempt::Accepted(next, err) => {
                psi.copy_from_slice(&next);
                self.stats.substeps += 1;
                self.stats.max_error_estimate =
                    self.stats.max_error_estimate.max(err.to_f64_lossy());
                Ok(())
            }
            Attempt::Rejected(err) => {
                if depth >= self.options.max_halvings {
                    return Err(Error::Propagation {
                        step: step_index,
                        residual: err.to_f64_lossy(),
                    });
                }
                let half = dt / T::of(2.0);
                self.advance(psi, half, depth + 1, step_index)?;
                self.advance(psi, half, depth + 1, step_index)
            }
        }
    }

    fn attempt(&mut self, psi: &[C<T>], dt: T) -> Attempt<T> {
        let beta0 = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if beta0 == T::zero() {
            return Attempt::Accepted(psi.to_vec(), T::zero());
        }
        let tol = T::of(self.options.tol);
        let m_max = self.options.max_dim.min(psi.len()).max(1);
        self.basis.clear();
        self.basis
            .push(psi.iter().map(|z| z.unscale(beta0)).collect());
        let mut alphas: Vec<T> = Vec::with_capacity(m_max);
        let mut betas: Vec<T> = Vec::with_capacity(m_max);
        let mut scale = T::zero();
        let mut last_err = T::infinity();

        for j in 0..m_max {
            self.h.apply_into(&self.basis[j], &mut self.work);
            self.stats.matvecs += 1;
            let a: T = inner(&self.basis[j], &self.work).re;
            alphas.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for v in &self.basis {
                    let c = inner(v, &self.work);
                    for (w, x) in self.work.iter_mut().zip(v) {
                        *w -= c * x;
                    }
                }
            }
            let b = self.work.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            scale = scale.max(a.abs()).max(b);
            let y = tridiagonal_exp(&alphas, &betas, dt);
            let breakdown = b <= T::epsilon() * T::of(64.0) * scale.max(T::one());
            let err = if breakdown {
                T::zero()
            } else {
                b * y[j].norm()
            };
            if breakdown || err <= tol {
                let mut next = vec![C::zero(); psi.len()];
                for (v, &c) in self.basis.iter().zip(&y) {
                    let c = c.scale(beta0);
                    for (n, x) in next.iter_mut().zip(v) {
                        *n += c * x;
                    }
                }
                return Attempt::Accepted(next, err);
            }
            last_err = err;
            betas.push(b);
            if j + 1 < m_max {
                let v = self.work.iter().map(|z| z.unscale(b)).collect();
                self.basis.push(v);
            }
        }
        Attempt::Rejected(last_err)
    }
}

fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `exp(-i dt T) e_1` for the real symmetric tridiagonal `T` with diagonal
/// `alphas` and off-diagonal `betas` (`betas.len() == alphas.len() - 1`).
fn tridiagonal_exp<T: Real>(alphas: &[T], betas: &[T], dt: T) -> Vec<C<T>> {
    let m = alphas.len();
    let mut t = vec![T::zero(); m * m];
    for i in 0..m {
        t[i * m + i] = alphas[i];
        if i + 1 < m {
            t[i * m + i + 1] = betas[i];
            t[(i + 1) * m + i] = betas[i];
        }
    }
    let (theta, s) = T::symmetric_eigen(m, &t).expect("tridiagonal eigensolver converges");
    let mut y = vec![C::zero(); m];
    for k in 0..m {
        let phase = -theta[k] * dt;
        let w = C::new(phase.cos(), phase.sin()).scale(s[k * m]);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += w.scale(s[k * m + i]);
        }
    }
    y
}

/// `n_steps` steps of `exp(-i H dt)` from `psi0`; returns `n_steps + 1` states.
pub fn propagate_krylov<T: Real>(
    h: &OperatorMatrix<T>,
    psi0: &PureState<T>,
    dt: T,
    n_steps: usize,
    tol: f64,
) -> Result<Vec<PureState<T>>> {
    let mut prop = KrylovPropagator::new(
        h,
        KrylovOptions {
            tol,
            ..Default::default()
        },
    );
    let mut psi = psi0.clone();
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(psi.clone());
    for step in 0..n_steps {
        prop.step(&mut psi, dt, step)?;
        out.push(psi.clone());
    }
    Ok(out)
}
