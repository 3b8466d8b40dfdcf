//! Schrödinger propagation of pure states.

mod eigen;
mod exact;
mod krylov;
mod state;
mod trajectory;

pub use eigen::{eigendecompose, eigendecompose_capped, EigenSystem, DEFAULT_DENSE_CAP};
pub use exact::{propagate_exact, ExactPropagator};
pub use krylov::{propagate_krylov, KrylovOptions, KrylovPropagator, KrylovStats};
pub use state::{make_initial_state, PureState};
pub use trajectory::{evolve, time_grid, Method, Trajectory};
