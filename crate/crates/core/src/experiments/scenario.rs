use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::evolution::{
    eigendecompose, evolve, make_initial_state, time_grid, KrylovOptions, KrylovStats, Method,
    PureState, Trajectory,
};
use crate::hamiltonian::{
    assemble_on, assemble_projected, CentralInit, CouplingKind, ModelConfig, OperatorMatrix,
};
use crate::observables::{diagonal_ensemble_average, numeric_time_average, TimeAverage};
use crate::spin_basis::{AccessibleSubspace, Basis};
use crate::thermo::expected_inversion;

use super::config::{Propagation, RunConfig, AUTO_DENSE_LIMIT};

/// Relative norm and energy drift tolerated on a propagated trajectory.
pub const DRIFT_TOL: f64 = 1e-8;

/// The propagation route actually taken by `Auto`.
pub fn resolve_propagation(model: &ModelConfig, requested: Propagation) -> Result<Propagation> {
    let full_dim = 1usize << (model.n_env + 1);
    let resolved = match (model.coupling, requested) {
        (CouplingKind::Gue, Propagation::Auto | Propagation::Projected) => Propagation::Projected,
        (CouplingKind::Gue, _) => {
            return Err(Error::Config(
                "the GUE interaction lives on the accessible subspace; use projected propagation"
                    .into(),
            ))
        }
        (_, Propagation::Auto) if full_dim <= AUTO_DENSE_LIMIT => Propagation::FullExact,
        (_, Propagation::Auto) => Propagation::Krylov,
        (_, p) => p,
    };
    if resolved == Propagation::Projected && model.central_init == CentralInit::Superposition {
        return Err(Error::Config(
            "a central superposition leaves the accessible subspace; use full-space propagation"
                .into(),
        ));
    }
    Ok(resolved)
}

fn basis_for(model: &ModelConfig, route: Propagation) -> Result<Basis> {
    Ok(match route {
        Propagation::Projected => Basis::subspace(AccessibleSubspace::new(model.n_env, model.k)?),
        _ => Basis::full(model.n_env),
    })
}

/// Propagated trajectory and, where a spectral decomposition is at hand, the infinite-time average.
pub struct Propagated {
    pub trajectory: Trajectory<f64>,
    pub diagonal_z: Option<f64>,
    pub krylov: Option<KrylovStats>,
}

/// Propagates `psi0` under `h` on `times` by the given route.
pub fn propagate(
    h: &OperatorMatrix<f64>,
    psi0: &PureState<f64>,
    times: &[f64],
    route: Propagation,
    krylov_tol: f64,
) -> Result<Propagated> {
    let (trajectory, diagonal_z, krylov) = if route == Propagation::Krylov {
        let options = KrylovOptions {
            tol: krylov_tol,
            ..KrylovOptions::default()
        };
        let (traj, stats) = evolve(h, psi0, times, Method::Krylov(options))?;
        (traj, None, stats)
    } else {
        let eig = eigendecompose(h)?;
        let (traj, _) = evolve(h, psi0, times, Method::Exact(&eig))?;
        (traj, Some(diagonal_ensemble_average(&eig, psi0)?), None)
    };
    trajectory.validate(DRIFT_TOL, DRIFT_TOL, DRIFT_TOL * h.max_abs())?;
    Ok(Propagated {
        trajectory,
        diagonal_z,
        krylov,
    })
}

/// Infinite-time `<sigma_z>` from the spectrum of the subspace-projected Hamiltonian.
pub fn projected_diagonal_average(model: &ModelConfig) -> Result<f64> {
    let h = assemble_projected::<f64>(model)?;
    let psi0 = make_initial_state(model, h.basis())?;
    diagonal_ensemble_average(&eigendecompose(&h.total)?, &psi0)
}

/// Summary statistics of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub numeric: TimeAverage<f64>,
    /// Infinite-time average; for Krylov runs taken from the projected Hamiltonian.
    pub diagonal_z: Option<f64>,
    /// Standard deviation of `<sigma_z>(t)` over the averaging window.
    pub fluctuation_std: f64,
    pub expected_inversion: f64,
    /// `|numeric z-average - expected inversion|`.
    pub residual: f64,
}

impl Summary {
    /// The best available estimate of the long-time z-average.
    pub fn z_average(&self) -> f64 {
        self.diagonal_z.unwrap_or(self.numeric.mean[2])
    }

    /// `|numeric - diagonal| / standard error`, when both are present.
    pub fn consistency_sigmas(&self) -> Option<f64> {
        self.diagonal_z.map(|d| {
            (self.numeric.mean[2] - d).abs() / self.numeric.std_error[2].max(f64::MIN_POSITIVE)
        })
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: RunConfig,
    pub propagation: Propagation,
    pub trajectory: Trajectory<f64>,
    pub summary: Summary,
    pub krylov: Option<KrylovStats>,
    pub trajectory_path: Option<PathBuf>,
}

/// Builds the model, propagates its initial state and summarizes `<sigma_z>`.
///
/// With `out_dir`, writes `<stem>.csv` and `<stem>.manifest` there.
pub fn run_scenario(config: &RunConfig, out: Option<(&Path, &str)>) -> Result<ScenarioResult> {
    config.validate()?;
    let model = &config.model;
    let route = resolve_propagation(model, config.run.propagation)?;
    let basis = basis_for(model, route)?;
    let h = assemble_on::<f64>(model, &basis)?;
    let psi0 = make_initial_state(model, &basis)?;
    let times = time_grid::<f64>(config.run.t_max_for(model), config.run.samples);
    let p = propagate(&h.total, &psi0, &times, route, config.run.krylov_tol)?;
    let diagonal_z = match p.diagonal_z {
        Some(z) => Some(z),
        None if model.central_init == CentralInit::Up => Some(projected_diagonal_average(model)?),
        None => None,
    };
    let summary = summarize(
        model,
        &p.trajectory,
        diagonal_z,
        config.run.discard_fraction,
    )?;
    let mut result = ScenarioResult {
        config: config.clone(),
        propagation: route,
        trajectory: p.trajectory,
        summary,
        krylov: p.krylov,
        trajectory_path: None,
    };
    if let Some((dir, stem)) = out {
        result.trajectory_path = Some(write_scenario(&result, dir, stem)?);
    }
    Ok(result)
}

pub(crate) fn summarize(
    model: &ModelConfig,
    traj: &Trajectory<f64>,
    diagonal_z: Option<f64>,
    discard_fraction: f64,
) -> Result<Summary> {
    let numeric = numeric_time_average(traj, discard_fraction)?;
    let expected = expected_inversion::<f64>(model.n_env, model.k)?;
    Ok(Summary {
        numeric,
        diagonal_z,
        fluctuation_std: numeric.std[2],
        expected_inversion: expected,
        residual: (numeric.mean[2] - expected).abs(),
    })
}

/// Formats a float with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(traj: &Trajectory<f64>) -> String {
    let mut s = String::from("t,sx,sy,sz,energy,norm\n");
    for i in 0..traj.len() {
        let b = traj.bloch[i];
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_num(traj.times[i]),
            fmt_num(b[0]),
            fmt_num(b[1]),
            fmt_num(b[2]),
            fmt_num(traj.energy[i]),
            fmt_num(traj.norm[i])
        );
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Resolved config followed by commented summary lines.
pub fn manifest(config: &RunConfig, extra: &[(&str, String)]) -> String {
    let mut s = config.render();
    for (k, v) in extra {
        let _ = writeln!(s, "# {k}: {v}");
    }
    s
}

fn write_scenario(result: &ScenarioResult, dir: &Path, stem: &str) -> Result<PathBuf> {
    let csv = dir.join(format!("{stem}.csv"));
    write_file(&csv, &trajectory_csv(&result.trajectory))?;
    let s = &result.summary;
    let extra = [
        ("propagation", result.propagation.to_string()),
        ("z_average_numeric", fmt_num(s.numeric.mean[2])),
        (
            "z_average_diagonal",
            s.diagonal_z.map_or("n/a".into(), fmt_num),
        ),
        ("fluctuation_std", fmt_num(s.fluctuation_std)),
        ("standard_error", fmt_num(s.numeric.std_error[2])),
        ("expected_inversion", fmt_num(s.expected_inversion)),
        ("residual", fmt_num(s.residual)),
        ("x_average", fmt_num(s.numeric.mean[0])),
        ("y_average", fmt_num(s.numeric.mean[1])),
    ];
    write_file(
        &dir.join(format!("{stem}.manifest")),
        &manifest(&result.config, &extra),
    )?;
    Ok(csv)
}
