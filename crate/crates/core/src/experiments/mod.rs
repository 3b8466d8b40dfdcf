//! Scenario drivers behind the command-line tool: single runs, detuning
//! scans, gamma sweeps, eigenstate ensembles, duality checks and the
//! spectral-temperature table. All of them work in `f64`.

mod config;
mod scenario;
mod sweeps;

pub use config::{DualityMode, Propagation, RunConfig, RunOptions, AUTO_DENSE_LIMIT};
pub use scenario::{
    fmt_num, manifest, projected_diagonal_average, propagate, resolve_propagation, run_scenario,
    trajectory_csv, write_file, Propagated, ScenarioResult, Summary, DRIFT_TOL,
};
pub use sweeps::{
    detune_offsets, detune_scan, diagonal_average, dual_model, duality_run, ensemble_histogram,
    gamma_sweep, sweep_csv, thermo_table_cmd, thermo_table_csv, DetunePoint, DetuneScan,
    DualityResult, EnsembleResult, SweepPoint, FLAT_TOL, MASS_THRESHOLD,
};
