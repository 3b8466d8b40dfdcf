use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::spin_basis::{binomial, MAX_ENV_SPINS};

/// Interaction between the central spin and the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingKind {
    /// Random matrix from the Gaussian unitary ensemble on the accessible subspace.
    Gue,
    /// Random two-body coupling of the central spin to every environment spin.
    Star,
    /// Star coupling plus a nearest-neighbour ring inside the environment.
    RingStar,
}

/// Two-spin operator used on each ring bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingKind {
    IsingXx,
    Xy,
    Heisenberg,
    IsingZz,
}

/// Initial state of the central spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CentralInit {
    /// `|1>`, the upper Zeeman level.
    Up,
    /// `(|0> + |1>)/sqrt 2`.
    Superposition,
}

macro_rules! keyword_enum {
    ($ty:ty, $what:literal, $( $variant:expr => [$($name:literal),+] ),+ $(,)?) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                let norm = s.trim().to_ascii_lowercase().replace('_', "-");
                $( if [$($name),+].contains(&norm.as_str()) { return Ok($variant); } )+
                Err(Error::Config(format!(concat!("unknown ", $what, " '{}'"), s)))
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $( if *self == $variant { return f.write_str([$($name),+][0]); } )+
                unreachable!()
            }
        }
    };
}

keyword_enum!(CouplingKind, "coupling kind",
    CouplingKind::Gue => ["gue", "random"],
    CouplingKind::Star => ["star"],
    CouplingKind::RingStar => ["ring-star", "ringstar"],
);

keyword_enum!(RingKind, "ring kind",
    RingKind::IsingXx => ["ising-xx", "xx"],
    RingKind::Xy => ["xy"],
    RingKind::Heisenberg => ["heisenberg", "xxx"],
    RingKind::IsingZz => ["ising-zz", "zz"],
);

keyword_enum!(CentralInit, "central initial state",
    CentralInit::Up => ["up", "1"],
    CentralInit::Superposition => ["superposition", "plus"],
);

/// Physical model parameters. Energies in units of `delta_c`, `hbar = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Number of environment spins `N`.
    pub n_env: usize,
    /// Lower band index of the accessible subspace.
    pub k: usize,
    pub delta_s: f64,
    pub delta_c: f64,
    /// Interaction scale.
    pub alpha: f64,
    /// Intra-environment ring coupling, in units of `alpha`.
    pub gamma: f64,
    pub coupling: CouplingKind,
    pub ring: RingKind,
    pub seed: u64,
    /// Intra-band index `m` of the initial environment state.
    pub initial_m: usize,
    pub central_init: CentralInit,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n_env: 10,
            k: 2,
            delta_s: 1.0,
            delta_c: 1.0,
            alpha: 1.0 / 5000.0,
            gamma: 0.0,
            coupling: CouplingKind::Gue,
            ring: RingKind::IsingXx,
            seed: 0,
            initial_m: 0,
            central_init: CentralInit::Up,
        }
    }
}

impl ModelConfig {
    /// The reference profile: `N = 14`, `k = 2`, `alpha = delta_C / 5000`.
    pub fn reference_scale(coupling: CouplingKind) -> Self {
        Self {
            n_env: 14,
            coupling,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_env == 0 || self.n_env > MAX_ENV_SPINS {
            return bad(format!(
                "n_env = {} outside 1..={MAX_ENV_SPINS}",
                self.n_env
            ));
        }
        if self.k >= self.n_env {
            return bad(format!(
                "k = {} must be below n_env = {}",
                self.k, self.n_env
            ));
        }
        if !(self.delta_c > 0.0 && self.delta_c.is_finite()) {
            return bad(format!("delta_c = {} must be positive", self.delta_c));
        }
        let ratio = self.delta_s / self.delta_c;
        if !(ratio > 0.9 && ratio < 1.1) {
            return bad(format!(
                "delta_s / delta_c = {ratio} outside the weak-detuning window (0.9, 1.1)"
            ));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha = {} must be positive", self.alpha));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma = {} must be non-negative", self.gamma));
        }
        if self.coupling == CouplingKind::RingStar && self.n_env < 3 {
            return bad(format!("ring needs n_env >= 3, got {}", self.n_env));
        }
        let g = binomial(self.n_env as u32, self.k as u32)?;
        if self.initial_m as u64 >= g {
            return bad(format!(
                "initial_m = {} outside band of degeneracy {g}",
                self.initial_m
            ));
        }
        Ok(())
    }

    /// Ring coupling in energy units, `gamma * alpha`.
    pub fn gamma_energy(&self) -> f64 {
        self.gamma * self.alpha
    }

    /// The configuration mapped by the global spin flip: band `N - 1 - k`.
    pub fn dual_band(&self) -> Self {
        Self {
            k: self.n_env - 1 - self.k,
            ..self.clone()
        }
    }
}
