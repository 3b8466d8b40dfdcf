use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::hamiltonian::{CentralInit, CouplingKind, ModelConfig, RingKind};

/// Propagation route for a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    /// GUE on the subspace; star models dense on the full space up to
    /// [`AUTO_DENSE_LIMIT`], Krylov beyond.
    Auto,
    /// Exact propagation of the subspace-projected Hamiltonian.
    Projected,
    /// Exact propagation on the full product space.
    FullExact,
    /// Krylov propagation on the full product space.
    Krylov,
}

/// Largest full-space dimension that [`Propagation::Auto`] diagonalizes densely.
pub const AUTO_DENSE_LIMIT: usize = 4096;

impl FromStr for Propagation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "auto" => Ok(Self::Auto),
            "projected" | "subspace" => Ok(Self::Projected),
            "full-exact" | "exact" => Ok(Self::FullExact),
            "krylov" => Ok(Self::Krylov),
            _ => Err(Error::Config(format!("unknown propagation '{s}'"))),
        }
    }
}

impl fmt::Display for Propagation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::Projected => "projected",
            Self::FullExact => "full-exact",
            Self::Krylov => "krylov",
        })
    }
}

/// How the dual of a scenario is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualityMode {
    /// Conjugate Hamiltonian and initial state by the global spin flip.
    Exact,
    /// Fresh couplings of the same family in band `N - 1 - k`.
    Physical,
}

impl FromStr for DualityMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Self::Exact),
            "physical" => Ok(Self::Physical),
            _ => Err(Error::Config(format!("unknown duality mode '{s}'"))),
        }
    }
}

impl fmt::Display for DualityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Physical => "physical",
        })
    }
}

/// Run parameters that are not part of the physical model.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Simulated window; `None` means `60 / alpha`.
    pub t_max: Option<f64>,
    /// Trajectory samples including `t = 0`.
    pub samples: usize,
    pub propagation: Propagation,
    pub krylov_tol: f64,
    /// Leading fraction of the trajectory excluded from time averages.
    pub discard_fraction: f64,
    /// Half-width of the detuning scan, in units of `delta_c`.
    pub detune_window: f64,
    pub detune_steps: usize,
    /// Ring couplings for the gamma sweep, in units of `alpha`.
    pub gamma_values: Vec<f64>,
    pub realizations: usize,
    pub bin_width: f64,
    pub duality: DualityMode,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            t_max: None,
            samples: 4096,
            propagation: Propagation::Auto,
            krylov_tol: 1e-9,
            discard_fraction: 0.1,
            detune_window: 0.002,
            detune_steps: 41,
            gamma_values: vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            realizations: 20,
            bin_width: crate::observables::DEFAULT_BIN_WIDTH,
            duality: DualityMode::Exact,
        }
    }
}

impl RunOptions {
    pub fn t_max_for(&self, config: &ModelConfig) -> f64 {
        self.t_max.unwrap_or(60.0 / config.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if let Some(t) = self.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("tmax = {t} must be positive"));
            }
        }
        if self.samples < 2 {
            return bad(format!("samples = {} must be at least 2", self.samples));
        }
        if self.krylov_tol.is_nan() || self.krylov_tol <= 0.0 {
            return bad(format!("krylov_tol = {} must be positive", self.krylov_tol));
        }
        if !(0.0..1.0).contains(&self.discard_fraction) {
            return bad(format!(
                "discard_fraction = {} outside [0, 1)",
                self.discard_fraction
            ));
        }
        if !(self.detune_window >= 0.0 && self.detune_window < 0.1) {
            return bad(format!(
                "detune_window = {} outside [0, 0.1)",
                self.detune_window
            ));
        }
        if self.detune_window > 0.0 && self.detune_steps < 3 {
            return bad(format!(
                "detune_steps = {} must be at least 3",
                self.detune_steps
            ));
        }
        if self
            .gamma_values
            .iter()
            .any(|g| !(*g >= 0.0 && g.is_finite()))
        {
            return bad("gamma_values must be non-negative".into());
        }
        if self.realizations == 0 {
            return bad("realizations must be at least 1".into());
        }
        if self.bin_width.is_nan() || self.bin_width <= 0.0 {
            return bad(format!("bin_width = {} must be positive", self.bin_width));
        }
        Ok(())
    }
}

/// A model plus its run parameters, as read from a config file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub run: RunOptions,
}

fn number(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::Config(format!("{key}: expected a number"))),
    }
}

fn count(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(Error::Config(format!(
            "{key}: expected a non-negative integer"
        ))),
    }
}

fn word<T: FromStr<Err = Error>>(key: &str, v: &Value) -> Result<T> {
    match v {
        Value::String(s) => s.parse(),
        _ => Err(Error::Config(format!("{key}: expected a string"))),
    }
}

impl RunConfig {
    /// Parses flat `key = value` text (TOML syntax, no tables).
    ///
    /// Keys are the [`ModelConfig`] and [`RunOptions`] field names; `tmax` and
    /// `samples` are accepted for `t_max` and `samples`. Missing keys keep
    /// their defaults, unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut cfg = RunConfig::default();
        for (key, v) in &table {
            let (m, r) = (&mut cfg.model, &mut cfg.run);
            match key.as_str() {
                "n_env" => m.n_env = count(key, v)? as usize,
                "k" => m.k = count(key, v)? as usize,
                "delta_s" => m.delta_s = number(key, v)?,
                "delta_c" => m.delta_c = number(key, v)?,
                "alpha" => m.alpha = number(key, v)?,
                "gamma" => m.gamma = number(key, v)?,
                "coupling" => m.coupling = word::<CouplingKind>(key, v)?,
                "ring" => m.ring = word::<RingKind>(key, v)?,
                "seed" => m.seed = count(key, v)?,
                "initial_m" => m.initial_m = count(key, v)? as usize,
                "central_init" => m.central_init = word::<CentralInit>(key, v)?,
                "t_max" | "tmax" => r.t_max = Some(number(key, v)?),
                "samples" => r.samples = count(key, v)? as usize,
                "propagation" => r.propagation = word(key, v)?,
                "krylov_tol" => r.krylov_tol = number(key, v)?,
                "discard_fraction" => r.discard_fraction = number(key, v)?,
                "detune_window" => r.detune_window = number(key, v)?,
                "detune_steps" => r.detune_steps = count(key, v)? as usize,
                "gamma_values" => {
                    r.gamma_values = match v {
                        Value::Array(a) => {
                            a.iter().map(|x| number(key, x)).collect::<Result<_>>()?
                        }
                        _ => return Err(Error::Config(format!("{key}: expected an array"))),
                    }
                }
                "realizations" => r.realizations = count(key, v)? as usize,
                "bin_width" => r.bin_width = number(key, v)?,
                "duality" => r.duality = word(key, v)?,
                _ => return Err(Error::Config(format!("unknown key '{key}'"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.run.validate()
    }

    /// The resolved configuration in the same format [`RunConfig::parse`] reads.
    pub fn render(&self) -> String {
        let m = &self.model;
        let r = &self.run;
        let mut s = String::new();
        let _ = writeln!(s, "n_env = {}", m.n_env);
        let _ = writeln!(s, "k = {}", m.k);
        let _ = writeln!(s, "delta_s = {:?}", m.delta_s);
        let _ = writeln!(s, "delta_c = {:?}", m.delta_c);
        let _ = writeln!(s, "alpha = {:?}", m.alpha);
        let _ = writeln!(s, "gamma = {:?}", m.gamma);
        let _ = writeln!(s, "coupling = \"{}\"", m.coupling);
        let _ = writeln!(s, "ring = \"{}\"", m.ring);
        let _ = writeln!(s, "seed = {}", m.seed);
        let _ = writeln!(s, "initial_m = {}", m.initial_m);
        let _ = writeln!(s, "central_init = \"{}\"", m.central_init);
        let _ = writeln!(s, "t_max = {:?}", r.t_max_for(m));
        let _ = writeln!(s, "samples = {}", r.samples);
        let _ = writeln!(s, "propagation = \"{}\"", r.propagation);
        let _ = writeln!(s, "krylov_tol = {:?}", r.krylov_tol);
        let _ = writeln!(s, "discard_fraction = {:?}", r.discard_fraction);
        let _ = writeln!(s, "detune_window = {:?}", r.detune_window);
        let _ = writeln!(s, "detune_steps = {}", r.detune_steps);
        let gammas: Vec<String> = r.gamma_values.iter().map(|g| format!("{g:?}")).collect();
        let _ = writeln!(s, "gamma_values = [{}]", gammas.join(", "));
        let _ = writeln!(s, "realizations = {}", r.realizations);
        let _ = writeln!(s, "bin_width = {:?}", r.bin_width);
        let _ = writeln!(s, "duality = \"{}\"", r.duality);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_round_trip() {
        let text = "n_env = 12\nk = 3\ncoupling = \"ring-star\"\ngamma = 3\nseed = 7\n\
                    # comment\ntmax = 1e5\ngamma_values = [0, 1.5, 3]\npropagation = \"projected\"\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.model.n_env, 12);
        assert_eq!(cfg.model.coupling, CouplingKind::RingStar);
        assert_eq!(cfg.model.gamma, 3.0);
        assert_eq!(cfg.run.t_max, Some(1e5));
        assert_eq!(cfg.run.gamma_values, vec![0.0, 1.5, 3.0]);
        assert_eq!(cfg.run.propagation, Propagation::Projected);
        let again = RunConfig::parse(&cfg.render()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            RunConfig::parse("nenv = 3"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::parse("coupling = \"bogus\""),
            Err(Error::Config(_))
        ));
        assert!(matches!(RunConfig::parse("k = -1"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("k = "), Err(Error::Config(_))));
        let cfg = RunConfig::parse("samples = 1").unwrap();
        assert!(cfg.validate().is_err());
    }
}
