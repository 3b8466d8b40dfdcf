use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hamiltonian::{CentralInit, ModelConfig};
use crate::scalar::{Real, C};
use crate::spin_basis::{enumerate_band, AccessibleSubspace, Basis};

/// Amplitude vector tagged with its basis.
#[derive(Debug, Clone)]
pub struct PureState<T> {
    basis: Basis,
    amps: Vec<C<T>>,
}

impl<T: Real> PureState<T> {
    pub fn new(basis: Basis, amps: Vec<C<T>>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::usage(format!(
                "state of length {} on basis of dim {}",
                amps.len(),
                basis.dim()
            )));
        }
        Ok(Self { basis, amps })
    }

    /// Basis vector `index` of `basis`.
    pub fn basis_vector(basis: Basis, index: usize) -> Result<Self> {
        let mut amps = vec![C::zero(); basis.dim()];
        *amps
            .get_mut(index)
            .ok_or_else(|| Error::usage(format!("basis index {index} out of range")))? = C::one();
        Self::new(basis, amps)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > T::zero() {
            let inv = n.recip();
            self.amps.iter_mut().for_each(|z| *z = z.scale(inv));
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        self.basis.ensure_same(&other.basis, "inner product")?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest component-wise distance to another state on the same basis.
    pub fn max_deviation(&self, other: &Self) -> Result<T> {
        self.basis.ensure_same(&other.basis, "state comparison")?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm())))
    }

    /// The same state written on the full product space.
    pub fn to_full(&self) -> Result<Self> {
        match &self.basis {
            Basis::Full { .. } => Ok(self.clone()),
            Basis::Subspace(s) => Self::new(Basis::full(s.n_env()), s.embed(&self.amps)?),
        }
    }

    /// Restriction to `subspace`, with the norm of the discarded part.
    pub fn restrict(&self, subspace: &AccessibleSubspace) -> Result<(Self, T)> {
        let Basis::Full { n_env } = self.basis else {
            return Err(Error::usage("restrict: state is not on the full space"));
        };
        if n_env != subspace.n_env() {
            return Err(Error::usage("restrict: environment size mismatch"));
        }
        let (amps, residual) = subspace.restrict(&self.amps)?;
        Ok((
            Self::new(Basis::subspace(subspace.clone()), amps)?,
            residual,
        ))
    }

    /// Image under the global flip `sigma_x` on all `N + 1` spins.
    ///
    /// Subspace states land on the dual subspace `(N, N - 1 - k)`.
    pub fn flipped(&self) -> Result<Self> {
        match &self.basis {
            Basis::Full { n_env } => {
                let mask = (1usize << (n_env + 1)) - 1;
                let amps = (0..self.amps.len()).map(|i| self.amps[i ^ mask]).collect();
                Self::new(self.basis.clone(), amps)
            }
            Basis::Subspace(s) => {
                let dual = s.dual();
                let mask = s.full_dim() - 1;
                let mut amps = vec![C::zero(); dual.dim()];
                for (p, &full) in s.members().iter().enumerate() {
                    let q = dual
                        .position(full ^ mask)
                        .expect("flip maps onto the dual subspace");
                    amps[q] = self.amps[p];
                }
                Self::new(Basis::subspace(dual), amps)
            }
        }
    }
}

/// Initial product state `|s> (x) |k, m>` of a configuration.
///
/// `Up` gives `|1> (x) |k, m>`; `Superposition` gives `(|0> + |1>)/sqrt 2 (x) |k, m>`,
/// which leaves the two-band subspace and so needs `basis` to be the full space.
pub fn make_initial_state<T: Real>(config: &ModelConfig, basis: &Basis) -> Result<PureState<T>> {
    config.validate()?;
    if basis.n_env() != config.n_env {
        return Err(Error::usage(
            "initial state: basis has a different environment size",
        ));
    }
    let env = enumerate_band(config.n_env, config.k)?[config.initial_m] as usize;
    let up = (env << 1) | 1;
    let down = env << 1;
    match (config.central_init, basis) {
        (CentralInit::Up, Basis::Full { .. }) => PureState::basis_vector(basis.clone(), up),
        (CentralInit::Up, Basis::Subspace(s)) => {
            let p = s
                .position(up)
                .ok_or_else(|| Error::usage("initial state lies outside the given subspace"))?;
            PureState::basis_vector(basis.clone(), p)
        }
        (CentralInit::Superposition, Basis::Full { .. }) => {
            let h = C::from(T::FRAC_1_SQRT_2());
            let mut amps = vec![C::zero(); basis.dim()];
            amps[up] = h;
            amps[down] = h;
            PureState::new(basis.clone(), amps)
        }
        (CentralInit::Superposition, Basis::Subspace(_)) => Err(Error::usage(
            "a central superposition leaves the two-band subspace; use the full space",
        )),
    }
}
