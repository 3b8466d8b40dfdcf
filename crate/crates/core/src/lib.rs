//! Central spin coupled to a finite spin environment: Hamiltonians on the
//! energy-shell subspace, exact and Krylov propagation, reduced-state
//! observables, and the binomial-degeneracy equilibrium predictions.
//!
//! Numerical types are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix them to `f64`, which is what the experiment drivers use.

pub mod error;
pub mod evolution;
pub mod experiments;
pub mod hamiltonian;
pub mod observables;
pub mod rng;
pub mod scalar;
pub mod spin_basis;
pub mod thermo;

pub use error::{Error, Result};
pub use scalar::{Real, C};
pub use spin_basis::{binomial, AccessibleSubspace, BandSpec, Basis, SpinConfiguration};

pub type Complex64 = C<f64>;
pub type PureStateF64 = evolution::PureState<f64>;
pub type OperatorF64 = hamiltonian::OperatorMatrix<f64>;
pub type HamiltonianF64 = hamiltonian::ModelHamiltonian<f64>;
pub type EigenSystemF64 = evolution::EigenSystem<f64>;
pub type TrajectoryF64 = evolution::Trajectory<f64>;
pub type ReducedStateF64 = observables::ReducedSpinState<f64>;

pub type PureStateF32 = evolution::PureState<f32>;
pub type OperatorF32 = hamiltonian::OperatorMatrix<f32>;
pub type EigenSystemF32 = evolution::EigenSystem<f32>;
pub type TrajectoryF32 = evolution::Trajectory<f32>;
