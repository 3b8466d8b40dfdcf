use crate::error::{Error, Result};
use crate::hamiltonian::OperatorMatrix;
use crate::observables::reduce_central;
use crate::scalar::Real;

use super::krylov::{KrylovOptions, KrylovPropagator, KrylovStats};
use super::{EigenSystem, ExactPropagator, PureState};

/// Bloch vector, energy and norm of a run, sampled on a time grid.
#[derive(Debug, Clone, Default)]
pub struct Trajectory<T> {
    /// Times in units of `1/delta_C`.
    pub times: Vec<T>,
    pub bloch: Vec<[T; 3]>,
    pub energy: Vec<T>,
    pub norm: Vec<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            bloch: Vec::with_capacity(n),
            energy: Vec::with_capacity(n),
            norm: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn record(&mut self, t: T, state: &PureState<T>, h: &OperatorMatrix<T>) -> Result<()> {
        let rho = reduce_central(state)?;
        self.times.push(t);
        self.bloch.push(rho.bloch);
        self.energy.push(h.expectation(state.amplitudes()));
        self.norm.push(state.norm());
        Ok(())
    }

    /// One Bloch component over time (0 = x, 1 = y, 2 = z).
    pub fn component(&self, axis: usize) -> Vec<T> {
        self.bloch.iter().map(|b| b[axis]).collect()
    }

    pub fn max_norm_deviation(&self) -> T {
        self.norm
            .iter()
            .fold(T::zero(), |m, &n| m.max((n - T::one()).abs()))
    }

    /// `max_t |E(t) - E(0)|`.
    pub fn max_energy_drift(&self) -> T {
        let e0 = self.energy.first().copied().unwrap_or_else(T::zero);
        self.energy
            .iter()
            .fold(T::zero(), |m, &e| m.max((e - e0).abs()))
    }

    /// Checks ordering of times, unitarity and energy conservation.
    pub fn validate(&self, norm_tol: T, energy_rel_tol: T, energy_abs_tol: T) -> Result<()> {
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::usage("trajectory times are not strictly increasing"));
        }
        let dn = self.max_norm_deviation();
        if dn > norm_tol {
            return Err(Error::usage(format!(
                "norm deviation {dn:e} exceeds {norm_tol:e}"
            )));
        }
        let e0 = self.energy.first().copied().unwrap_or_else(T::zero).abs();
        let de = self.max_energy_drift();
        if de > energy_rel_tol * e0 + energy_abs_tol {
            return Err(Error::usage(format!(
                "energy drift {de:e} exceeds tolerance"
            )));
        }
        Ok(())
    }
}

/// Uniform grid of `samples` times spanning `[0, t_max]`.
pub fn time_grid<T: Real>(t_max: f64, samples: usize) -> Vec<T> {
    match samples {
        0 => Vec::new(),
        1 => vec![T::zero()],
        n => (0..n)
            .map(|i| T::of(t_max * i as f64 / (n - 1) as f64))
            .collect(),
    }
}

/// How a trajectory is propagated.
#[derive(Debug, Clone, Copy)]
pub enum Method<'a, T> {
    /// Spectral propagation with a precomputed eigensystem of `h`.
    Exact(&'a EigenSystem<T>),
    Krylov(KrylovOptions),
}

/// Propagates `psi0` under `h` and records the trajectory on `times`.
///
/// `times` must start at 0. Returns the Krylov statistics when that path is used.
pub fn evolve<T: Real>(
    h: &OperatorMatrix<T>,
    psi0: &PureState<T>,
    times: &[T],
    method: Method<'_, T>,
) -> Result<(Trajectory<T>, Option<KrylovStats>)> {
    h.basis().ensure_same(psi0.basis(), "evolve")?;
    if times.first().is_some_and(|t| *t != T::zero()) {
        return Err(Error::usage("time grid must start at t = 0"));
    }
    let mut traj = Trajectory::with_capacity(times.len());
    match method {
        Method::Exact(eig) => {
            eig.basis().ensure_same(h.basis(), "evolve")?;
            let prop = ExactPropagator::new(eig, psi0)?;
            prop.for_each_state(times, |_, t, s| traj.record(t, s, h))?;
            Ok((traj, None))
        }
        Method::Krylov(options) => {
            let mut prop = KrylovPropagator::new(h, options);
            let mut psi = psi0.clone();
            let mut prev = T::zero();
            for (i, &t) in times.iter().enumerate() {
                if i > 0 {
                    prop.step(&mut psi, t - prev, i)?;
                }
                traj.record(t, &psi, h)?;
                prev = t;
            }
            Ok((traj, Some(prop.stats())))
        }
    }
}
