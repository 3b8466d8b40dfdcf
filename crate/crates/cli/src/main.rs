use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use spinbath::experiments::{
    detune_scan, duality_run, ensemble_histogram, fmt_num, gamma_sweep, run_scenario,
    thermo_table_cmd, DualityMode, RunConfig,
};
use spinbath::Error;

#[derive(Parser)]
#[command(
    name = "spinbath",
    version,
    about = "Central spin relaxation in a finite spin environment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat key = value config file; missing keys take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Simulated time window in units of 1/delta_c.
    #[arg(long)]
    tmax: Option<f64>,
    /// Trajectory samples including t = 0.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one scenario and write its trajectory.
    Evolve {
        #[command(flatten)]
        common: Common,
    },
    /// Diagonal-ensemble average against delta_s - delta_c.
    ScanDetune {
        #[command(flatten)]
        common: Common,
        /// Half-width in units of delta_c.
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Time averages over ring couplings (units of alpha).
    SweepGamma {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
    },
    /// Histogram of eigenstate lambda_z over random realizations.
    Ensemble {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        realizations: Option<usize>,
    },
    /// A scenario and its global spin-flip dual.
    Duality {
        #[command(flatten)]
        common: Common,
        /// `exact` or `physical`.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Spectral temperature and inversion per band.
    ThermoTable {
        #[command(flatten)]
        common: Common,
        /// Number of environment spins.
        #[arg(long, short = 'n')]
        n_env: usize,
    },
}

fn resolve(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.model.seed = seed;
    }
    if let Some(t) = common.tmax {
        cfg.run.t_max = Some(t);
    }
    if let Some(s) = common.samples {
        cfg.run.samples = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Evolve { common } => {
            let cfg = resolve(&common)?;
            let r = run_scenario(&cfg, Some((&common.out_dir, "trajectory")))?;
            let s = &r.summary;
            info!("propagation {}", r.propagation);
            println!(
                "trajectory: {}",
                r.trajectory_path.unwrap_or_default().display()
            );
            println!("z_average_numeric: {}", fmt_num(s.numeric.mean[2]));
            if let Some(z) = s.diagonal_z {
                println!("z_average_diagonal: {}", fmt_num(z));
            }
            println!("fluctuation_std: {}", fmt_num(s.fluctuation_std));
            println!("expected_inversion: {}", fmt_num(s.expected_inversion));
            println!("residual: {}", fmt_num(s.residual));
        }
        Command::ScanDetune {
            common,
            window,
            steps,
        } => {
            let mut cfg = resolve(&common)?;
            if let Some(w) = window {
                cfg.run.detune_window = w;
            }
            if let Some(n) = steps {
                cfg.run.detune_steps = n;
            }
            cfg.validate()?;
            let scan = detune_scan(&cfg, Some(&common.out_dir))?;
            let b = scan.best_point();
            println!("scan: {}", common.out_dir.join("detune_scan.csv").display());
            println!("best_offset: {}", fmt_num(b.offset));
            println!("best_z_average: {}", fmt_num(b.z_avg));
            println!("residual: {}", fmt_num(b.residual));
            println!("flat: {}", scan.flat);
        }
        Command::SweepGamma { common, gammas } => {
            let mut cfg = resolve(&common)?;
            if let Some(g) = gammas {
                cfg.run.gamma_values = g;
            }
            cfg.validate()?;
            let points = gamma_sweep(&cfg, Some(&common.out_dir))?;
            println!(
                "sweep: {}",
                common.out_dir.join("gamma_sweep.csv").display()
            );
            for p in points {
                println!(
                    "gamma {}: z_average {} std {}",
                    p.gamma,
                    fmt_num(p.z_avg),
                    fmt_num(p.std)
                );
            }
        }
        Command::Ensemble {
            common,
            realizations,
        } => {
            let mut cfg = resolve(&common)?;
            if let Some(n) = realizations {
                cfg.run.realizations = n;
            }
            cfg.validate()?;
            let e = ensemble_histogram(&cfg, Some(&common.out_dir))?;
            println!(
                "histogram: {}",
                common.out_dir.join("histogram.csv").display()
            );
            println!("values: {}", e.histogram.total());
            println!("mean: {}", fmt_num(e.mean));
            println!("std: {}", fmt_num(e.std));
            println!("mass_below_-0.95: {}", fmt_num(e.mass_below));
        }
        Command::Duality { common, mode } => {
            let mut cfg = resolve(&common)?;
            if let Some(m) = mode {
                cfg.run.duality = m.parse::<DualityMode>()?;
            }
            let d = duality_run(&cfg, Some(&common.out_dir))?;
            println!(
                "original: {}",
                common.out_dir.join("duality_original.csv").display()
            );
            println!(
                "dual: {}",
                common.out_dir.join("duality_dual.csv").display()
            );
            println!(
                "z_average_original: {}",
                fmt_num(d.original.summary.z_average())
            );
            println!("z_average_dual: {}", fmt_num(d.dual.summary.z_average()));
            println!("max_abs_sum: {}", fmt_num(d.max_abs_sum()));
        }
        Command::ThermoTable { common, n_env } => {
            let csv = thermo_table_cmd(n_env, Some(&common.out_dir))?;
            print!("{csv}");
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Config(_) | Error::Usage(_) | Error::Domain(_) => 2,
        Error::Propagation { .. } | Error::Eigen(_) | Error::Capacity { .. } => 3,
        Error::Io { .. } => 4,
        Error::Realization { .. } => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinbath: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
