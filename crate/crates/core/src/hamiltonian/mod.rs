//! Hamiltonians of the central-spin model and their projection onto the
//! accessible subspace.

mod builders;
mod config;
mod operator;

pub use builders::{
    assemble, assemble_on, assemble_projected, kron2, project, ring_coupling, sample_gue,
    star_coupling, zeeman_hamiltonian, ModelHamiltonian, Pauli, StarCoefficients, TwoSite,
};
pub use config::{CentralInit, CouplingKind, ModelConfig, RingKind};
pub use operator::{DenseMatrix, OperatorMatrix, SparseMatrix, Storage, DENSE_LIMIT};
