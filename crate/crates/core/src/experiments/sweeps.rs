use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{eigendecompose, make_initial_state, time_grid};
use crate::hamiltonian::{assemble_on, assemble_projected, CouplingKind, ModelConfig};
use crate::observables::{
    diagonal_ensemble_average, eigenstate_lambdas, fraction_below, histogram, mean, std_dev,
    Histogram, LambdaZSample, SampleMeta, DEFAULT_RANGE,
};
use crate::rng::derive_seed;
use crate::spin_basis::Basis;
use crate::thermo::{beta_table, expected_inversion};

use super::config::{DualityMode, Propagation, RunConfig};
use super::scenario::{
    fmt_num, manifest, projected_diagonal_average, propagate, resolve_propagation, run_scenario,
    summarize, trajectory_csv, write_file, ScenarioResult,
};

/// Residual spread below which a detuning scan counts as flat.
pub const FLAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetunePoint {
    /// `delta_s - delta_c`.
    pub offset: f64,
    pub z_avg: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetuneScan {
    pub points: Vec<DetunePoint>,
    /// Index of the smallest residual (first one on ties).
    pub best: usize,
    /// All residuals equal within [`FLAT_TOL`].
    pub flat: bool,
    pub expected: f64,
}

impl DetuneScan {
    pub fn best_point(&self) -> DetunePoint {
        self.points[self.best]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("param,z_avg,residual\n");
        for p in &self.points {
            let _ = writeln!(
                s,
                "{},{},{}",
                fmt_num(p.offset),
                fmt_num(p.z_avg),
                fmt_num(p.residual)
            );
        }
        s
    }
}

/// Infinite-time `<sigma_z>` of a model: on the full space when `FullExact`
/// is requested, on the projected Hamiltonian otherwise.
pub fn diagonal_average(model: &ModelConfig, propagation: Propagation) -> Result<f64> {
    if propagation == Propagation::FullExact && model.coupling != CouplingKind::Gue {
        let basis = Basis::full(model.n_env);
        let h = assemble_on::<f64>(model, &basis)?;
        let psi0 = make_initial_state(model, &basis)?;
        diagonal_ensemble_average(&eigendecompose(&h.total)?, &psi0)
    } else {
        projected_diagonal_average(model)
    }
}

/// Offsets `delta_s - delta_c` spanning `+-window * delta_c` in `steps` points.
pub fn detune_offsets(window: f64, steps: usize, delta_c: f64) -> Vec<f64> {
    if window == 0.0 || steps < 2 {
        return vec![0.0];
    }
    (0..steps)
        .map(|i| delta_c * window * (2.0 * i as f64 / (steps - 1) as f64 - 1.0))
        .collect()
}

/// Diagonal-ensemble z-average against detuning, minimizing `|z - expected inversion|`.
pub fn detune_scan(config: &RunConfig, out: Option<&Path>) -> Result<DetuneScan> {
    config.validate()?;
    let model = &config.model;
    let expected = expected_inversion::<f64>(model.n_env, model.k)?;
    let offsets = detune_offsets(
        config.run.detune_window,
        config.run.detune_steps,
        model.delta_c,
    );
    let points = offsets
        .par_iter()
        .enumerate()
        .map(|(i, &offset)| {
            let m = ModelConfig {
                delta_s: model.delta_c + offset,
                ..model.clone()
            };
            let z =
                diagonal_average(&m, config.run.propagation).map_err(Error::in_realization(i))?;
            Ok(DetunePoint {
                offset,
                z_avg: z,
                residual: (z - expected).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = points.iter().enumerate().fold(0, |b, (i, p)| {
        if p.residual < points[b].residual {
            i
        } else {
            b
        }
    });
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.residual), hi.max(p.residual))
        });
    let scan = DetuneScan {
        flat: hi - lo <= FLAT_TOL,
        best,
        points,
        expected,
    };
    if let Some(dir) = out {
        write_file(&dir.join("detune_scan.csv"), &scan.to_csv())?;
        let b = scan.best_point();
        let extra = [
            ("best_offset", fmt_num(b.offset)),
            ("best_delta_s", fmt_num(model.delta_c + b.offset)),
            ("best_z_average", fmt_num(b.z_avg)),
            ("expected_inversion", fmt_num(expected)),
            ("flat", scan.flat.to_string()),
        ];
        write_file(&dir.join("detune_scan.manifest"), &manifest(config, &extra))?;
    }
    Ok(scan)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// Ring coupling in units of `alpha`.
    pub gamma: f64,
    pub z_avg: f64,
    pub residual: f64,
    pub std: f64,
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from("param,z_avg,residual,std\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_num(p.gamma),
            fmt_num(p.z_avg),
            fmt_num(p.residual),
            fmt_num(p.std)
        );
    }
    s
}

/// Ring-star scenarios over `config.run.gamma_values` with the star couplings held fixed.
pub fn gamma_sweep(config: &RunConfig, out: Option<&Path>) -> Result<Vec<SweepPoint>> {
    config.validate()?;
    if config.model.coupling == CouplingKind::Gue {
        return Err(Error::Config(
            "gamma sweep needs a star or ring-star model".into(),
        ));
    }
    let points = config
        .run
        .gamma_values
        .par_iter()
        .enumerate()
        .map(|(i, &gamma)| {
            let mut c = config.clone();
            c.model.coupling = CouplingKind::RingStar;
            c.model.gamma = gamma;
            let r = run_scenario(&c, None).map_err(Error::in_realization(i))?;
            let z = r.summary.z_average();
            Ok(SweepPoint {
                gamma,
                z_avg: z,
                residual: (z - r.summary.expected_inversion).abs(),
                std: r.summary.fluctuation_std,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(dir) = out {
        write_file(&dir.join("gamma_sweep.csv"), &sweep_csv(&points))?;
        write_file(&dir.join("gamma_sweep.manifest"), &manifest(config, &[]))?;
    }
    Ok(points)
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub samples: Vec<LambdaZSample<f64>>,
    pub histogram: Histogram,
    pub mean: f64,
    pub std: f64,
    /// Fraction of `lambda_z` values below -0.95.
    pub mass_below: f64,
    /// `(g_k - g_{k+1}) / d_H`.
    pub trace_value: f64,
    /// Largest `|mean_n lambda_{z,n} - trace_value|` over realizations.
    pub max_trace_residual: f64,
}

pub const MASS_THRESHOLD: f64 = -0.95;

impl EnsembleResult {
    pub fn values(&self) -> Vec<f64> {
        self.samples
            .iter()
            .flat_map(|s| s.values.iter().copied())
            .collect()
    }

    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("bin_center,count\n");
        for (c, n) in self.histogram.centers().iter().zip(&self.histogram.counts) {
            let _ = writeln!(s, "{},{}", fmt_num(*c), n);
        }
        s
    }
}

/// `lambda_z` statistics over `config.run.realizations` projected Hamiltonians.
///
/// Realization `i` uses seed `derive_seed(config.model.seed, i)`.
pub fn ensemble_histogram(config: &RunConfig, out: Option<&Path>) -> Result<EnsembleResult> {
    config.validate()?;
    let model = &config.model;
    let trace_value = expected_inversion::<f64>(model.n_env, model.k)?;
    let samples = (0..config.run.realizations)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(model.seed, i as u64);
            let m = ModelConfig {
                seed,
                ..model.clone()
            };
            let sample = (|| {
                let h = assemble_projected::<f64>(&m)?;
                eigenstate_lambdas(&eigendecompose(&h.total)?)
            })()
            .map_err(Error::in_realization(i))?;
            Ok(LambdaZSample {
                meta: SampleMeta {
                    coupling: Some(m.coupling),
                    gamma: m.gamma,
                    seed,
                },
                ..sample
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_trace_residual = samples
        .iter()
        .map(|s| (s.mean() - trace_value).abs())
        .fold(0.0, f64::max);
    let values: Vec<f64> = samples
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .collect();
    let result = EnsembleResult {
        histogram: histogram(&values, config.run.bin_width, DEFAULT_RANGE)?,
        mean: mean(&values),
        std: std_dev(&values),
        mass_below: fraction_below(&values, MASS_THRESHOLD),
        trace_value,
        max_trace_residual,
        samples,
    };
    if let Some(dir) = out {
        write_file(&dir.join("histogram.csv"), &result.histogram_csv())?;
        let extra = [
            ("values", values.len().to_string()),
            ("mean", fmt_num(result.mean)),
            ("std", fmt_num(result.std)),
            ("mass_below_-0.95", fmt_num(result.mass_below)),
            ("trace_value", fmt_num(trace_value)),
            ("max_trace_residual", fmt_num(max_trace_residual)),
        ];
        write_file(&dir.join("histogram.manifest"), &manifest(config, &extra))?;
    }
    Ok(result)
}

#[derive(Debug, Clone)]
pub struct DualityResult {
    pub mode: DualityMode,
    pub original: ScenarioResult,
    pub dual: ScenarioResult,
    /// `<sigma_z>(t) + <sigma_z>_dual(t)`.
    pub sum: Vec<f64>,
}

impl DualityResult {
    pub fn max_abs_sum(&self) -> f64 {
        self.sum.iter().fold(0.0, |m, s| m.max(s.abs()))
    }
}

/// The model mapped to band `N - 1 - k`.
pub fn dual_model(model: &ModelConfig) -> ModelConfig {
    ModelConfig {
        k: model.n_env - 1 - model.k,
        ..model.clone()
    }
}

/// Runs a scenario and its image under the global spin flip.
///
/// `Exact` conjugates the Hamiltonian and initial state; `Physical` draws new
/// couplings (seed `derive_seed(seed, 1)`) for the model in band `N - 1 - k`.
pub fn duality_run(config: &RunConfig, out: Option<&Path>) -> Result<DualityResult> {
    config.validate()?;
    let model = &config.model;
    if model.coupling == CouplingKind::Gue {
        return Err(Error::Config(
            "duality runs need a star or ring-star model".into(),
        ));
    }
    let mut dual_config = config.clone();
    dual_config.model = dual_model(model);
    let (original, dual) = match config.run.duality {
        DualityMode::Physical => {
            dual_config.model.seed = derive_seed(model.seed, 1);
            (
                run_scenario(config, None)?,
                run_scenario(&dual_config, None)?,
            )
        }
        DualityMode::Exact => {
            let route = resolve_propagation(model, config.run.propagation)?;
            let basis = match route {
                Propagation::Projected => assemble_projected::<f64>(model)?.basis().clone(),
                _ => Basis::full(model.n_env),
            };
            let h = assemble_on::<f64>(model, &basis)?.total;
            let h_dual = h.flip_conjugated()?;
            let psi0 = make_initial_state(model, &basis)?;
            let psi_dual = psi0.flipped()?;
            let times = time_grid::<f64>(config.run.t_max_for(model), config.run.samples);
            let tol = config.run.krylov_tol;
            let (a, b) = rayon::join(
                || propagate(&h, &psi0, &times, route, tol),
                || propagate(&h_dual, &psi_dual, &times, route, tol),
            );
            let (a, b) = (a?, b?);
            let diag_a = match a.diagonal_z {
                Some(z) => Some(z),
                None => Some(projected_diagonal_average(model)?),
            };
            let diag_b = b.diagonal_z.or(diag_a.map(|z| -z));
            let df = config.run.discard_fraction;
            let sa = summarize(model, &a.trajectory, diag_a, df)?;
            let sb = summarize(&dual_config.model, &b.trajectory, diag_b, df)?;
            let wrap =
                |config: &RunConfig, p: super::scenario::Propagated, summary| ScenarioResult {
                    config: config.clone(),
                    propagation: route,
                    trajectory: p.trajectory,
                    summary,
                    krylov: p.krylov,
                    trajectory_path: None,
                };
            (wrap(config, a, sa), wrap(&dual_config, b, sb))
        }
    };
    let sum = original
        .trajectory
        .bloch
        .iter()
        .zip(&dual.trajectory.bloch)
        .map(|(a, b)| a[2] + b[2])
        .collect();
    let mut result = DualityResult {
        mode: config.run.duality,
        original,
        dual,
        sum,
    };
    if let Some(dir) = out {
        let a = dir.join("duality_original.csv");
        let b = dir.join("duality_dual.csv");
        write_file(&a, &trajectory_csv(&result.original.trajectory))?;
        write_file(&b, &trajectory_csv(&result.dual.trajectory))?;
        result.original.trajectory_path = Some(a);
        result.dual.trajectory_path = Some(b);
        let (so, sd) = (&result.original.summary, &result.dual.summary);
        let extra = [
            ("mode", result.mode.to_string()),
            ("dual_k", result.dual.config.model.k.to_string()),
            ("dual_seed", result.dual.config.model.seed.to_string()),
            ("z_average_original", fmt_num(so.z_average())),
            ("z_average_dual", fmt_num(sd.z_average())),
            ("expected_inversion_dual", fmt_num(sd.expected_inversion)),
            ("max_abs_sum", fmt_num(result.max_abs_sum())),
        ];
        write_file(&dir.join("duality.manifest"), &manifest(config, &extra))?;
    }
    Ok(result)
}

pub fn thermo_table_csv(n_env: usize) -> Result<String> {
    let mut s = String::from("k,beta,inversion\n");
    for p in beta_table::<f64>(n_env)? {
        let _ = writeln!(s, "{},{},{}", p.k, fmt_num(p.beta), fmt_num(p.inversion));
    }
    Ok(s)
}

/// Writes `thermo_table.csv` for `N` environment spins and returns its contents.
pub fn thermo_table_cmd(n_env: usize, out: Option<&Path>) -> Result<String> {
    let csv = thermo_table_csv(n_env)?;
    if let Some(dir) = out {
        write_file(&dir.join("thermo_table.csv"), &csv)?;
    }
    Ok(csv)
}
