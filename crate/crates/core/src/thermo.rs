//! Closed-form equilibrium predictions from the binomial band structure.

use crate::error::{Error, Result};
use crate::observables::ReducedSpinState;
use crate::scalar::Real;

/// Equilibrium of the central spin in resonance with bands of degeneracy
/// `g_k` (central spin up) and `g_k1` (central spin down):
/// `rho = (g_k1 |0><0| + g_k |1><1|) / (g_k + g_k1)`.
pub fn equilibrium_state<T: Real>(g_k: u64, g_k1: u64) -> Result<ReducedSpinState<T>> {
    if g_k == 0 || g_k1 == 0 {
        return Err(Error::domain("band degeneracies must be positive"));
    }
    let total = (g_k + g_k1) as f64;
    let mut rho = ReducedSpinState::diagonal(T::of(g_k as f64 / total), T::of(g_k1 as f64 / total));
    rho.bloch[2] = T::of((g_k as f64 - g_k1 as f64) / total);
    Ok(rho)
}

/// Expected inversion `(g_k - g_{k+1}) / (g_k + g_{k+1})` for `N` environment spins.
///
/// With `g_{k+1}/g_k = (N - k)/(k + 1)` this is `(2k + 1 - N)/(N + 1)`.
pub fn expected_inversion<T: Real>(n_env: usize, k: usize) -> Result<T> {
    check_band(n_env, k)?;
    Ok(T::of(
        (2.0 * k as f64 + 1.0 - n_env as f64) / (n_env as f64 + 1.0),
    ))
}

/// Inverse temperature `ln(g_{k+1} / g_k) / delta_c` imparted by band `k`.
///
/// `g_{k+1}/g_k = (N - k)/(k + 1)` exactly, so no large binomials are formed.
pub fn spectral_beta<T: Real>(n_env: usize, k: usize, delta_c: f64) -> Result<T> {
    check_band(n_env, k)?;
    if delta_c.is_nan() || delta_c <= 0.0 {
        return Err(Error::domain("delta_c must be positive"));
    }
    let ratio = (n_env - k) as f64 / (k + 1) as f64;
    Ok(T::of(ratio.ln() / delta_c))
}

fn check_band(n_env: usize, k: usize) -> Result<()> {
    if k >= n_env {
        return Err(Error::domain(format!("band {k} invalid for N = {n_env}")));
    }
    Ok(())
}

/// Temperature and inversion predicted for band `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint<T> {
    pub k: usize,
    /// Units of `1/delta_C`.
    pub beta: T,
    pub inversion: T,
}

/// One [`SpectralPoint`] per band `k = 0..N-1`, with `delta_c = 1`.
pub fn beta_table<T: Real>(n_env: usize) -> Result<Vec<SpectralPoint<T>>> {
    if n_env < 2 {
        return Err(Error::domain(format!(
            "beta table needs N >= 2, got {n_env}"
        )));
    }
    (0..n_env)
        .map(|k| {
            Ok(SpectralPoint {
                k,
                beta: spectral_beta(n_env, k, 1.0)?,
                inversion: expected_inversion(n_env, k)?,
            })
        })
        .collect()
}
