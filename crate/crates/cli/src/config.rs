//! TOML run configuration.
//!
//! ```toml
//! experiment = "fig1b"
//! omega = 1.0
//! method = "mc"
//! n_traj = 4000
//! seed = 42
//! dt = 0.01
//! output_dir = "results"
//! emit_plot = true
//!
//! [gamma_grid]
//! min = 1e-3
//! max = 1e-1
//! points = 21
//! include_zero = true
//! ```
//!
//! `gamma_grid` values are `γ/ω`. An explicit `values = [...]` list replaces
//! the `min`/`max`/`points` range. Command-line flags override file values.

use std::fs;
use std::path::{Path, PathBuf};

use etlab_core::experiments::{default_gamma_grid, log_grid, Method, DEFAULT_SEED, DEFAULT_TRAJECTORIES};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("missing required key `{key}` for experiment {experiment}")]
    Missing { key: &'static str, experiment: &'static str },
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Fig1a,
    Fig1b,
    Verify,
    EthInspect,
    Perturbative,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Fig1a => "fig1a",
            ExperimentKind::Fig1b => "fig1b",
            ExperimentKind::Verify => "verify",
            ExperimentKind::EthInspect => "eth-inspect",
            ExperimentKind::Perturbative => "perturbative",
        }
    }

    pub fn is_sweep(self) -> bool {
        matches!(self, ExperimentKind::Fig1a | ExperimentKind::Fig1b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Lindblad,
    Mc,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::Lindblad => Method::Lindblad,
            MethodName::Mc => Method::Mc,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaGridFile {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
    pub include_zero: Option<bool>,
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbativeFile {
    pub n: Option<usize>,
    /// `γ/ω`
    pub gamma: Option<f64>,
    /// `Δ/ω`
    pub delta: Option<f64>,
    pub k: Option<u32>,
}

/// Raw file contents; every key optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<ExperimentKind>,
    pub omega: Option<f64>,
    pub method: Option<MethodName>,
    pub n_traj: Option<usize>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub emit_plot: Option<bool>,
    pub code: Option<String>,
    pub gamma_grid: Option<GammaGridFile>,
    pub perturbative: Option<PerturbativeFile>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|message| ConfigError::Parse {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string().trim_end().to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbativeSettings {
    pub n: usize,
    pub gamma_over_omega: f64,
    pub delta_over_omega: f64,
    pub k: u32,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    /// `γ/ω` values.
    pub gamma_grid: Vec<f64>,
    pub omega: f64,
    pub method: Method,
    pub n_traj: usize,
    pub seed: u64,
    pub dt_override: Option<f64>,
    pub output_dir: PathBuf,
    pub emit_plot: bool,
    pub code: Option<String>,
    pub perturbative: Option<PerturbativeSettings>,
}

pub const DEFAULT_OUTPUT_DIR: &str = "results";

impl RunConfig {
    /// Applies defaults and checks the keys each experiment needs.
    pub fn resolve(file: ConfigFile) -> Result<Self, ConfigError> {
        let experiment = file.experiment.ok_or(ConfigError::Missing {
            key: "experiment",
            experiment: "any",
        })?;
        let omega = file.omega.unwrap_or(1.0);
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid("omega", format!("{omega} must be > 0")));
        }
        let method = match (file.method, experiment) {
            (Some(m), _) => m.into(),
            (None, ExperimentKind::Fig1b) => Method::Mc,
            (None, _) => Method::Lindblad,
        };
        let n_traj = file.n_traj.unwrap_or(DEFAULT_TRAJECTORIES);
        if n_traj == 0 {
            return Err(invalid("n_traj", "must be >= 1".into()));
        }
        if let Some(dt) = file.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid("dt", format!("{dt} must be > 0")));
            }
        }
        let gamma_grid = resolve_grid(file.gamma_grid.unwrap_or_default())?;

        if experiment == ExperimentKind::EthInspect && file.code.is_none() {
            return Err(ConfigError::Missing {
                key: "code",
                experiment: experiment.as_str(),
            });
        }
        let perturbative = match (experiment, file.perturbative) {
            (ExperimentKind::Perturbative, None) => {
                return Err(ConfigError::Missing {
                    key: "perturbative",
                    experiment: experiment.as_str(),
                })
            }
            (_, Some(p)) => Some(resolve_perturbative(p, experiment)?),
            (_, None) => None,
        };

        Ok(RunConfig {
            experiment,
            gamma_grid,
            omega,
            method,
            n_traj,
            seed: file.seed.unwrap_or(DEFAULT_SEED),
            dt_override: file.dt,
            output_dir: file.output_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            emit_plot: file.emit_plot.unwrap_or(false),
            code: file.code,
            perturbative,
        })
    }
}

fn invalid(key: &'static str, message: String) -> ConfigError {
    ConfigError::Invalid { key, message }
}

fn resolve_grid(g: GammaGridFile) -> Result<Vec<f64>, ConfigError> {
    if let Some(values) = g.values {
        if g.min.is_some() || g.max.is_some() || g.points.is_some() {
            return Err(invalid("gamma_grid.values", "cannot be combined with min/max/points".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(invalid("gamma_grid.values", format!("{v} must be >= 0")));
        }
        let mut values = values;
        if g.include_zero == Some(true) && !values.contains(&0.0) {
            values.push(0.0);
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        return Ok(values);
    }
    if g == GammaGridFile::default() {
        return Ok(default_gamma_grid());
    }
    let min = g.min.unwrap_or(1e-3);
    let max = g.max.unwrap_or(1e-1);
    let points = g.points.unwrap_or(21);
    if !(min > 0.0 && min.is_finite()) {
        return Err(invalid("gamma_grid.min", format!("{min} must be > 0")));
    }
    if !(max >= min && max.is_finite()) {
        return Err(invalid("gamma_grid.max", format!("{max} must be >= min ({min})")));
    }
    let mut out = Vec::new();
    if g.include_zero.unwrap_or(true) {
        out.push(0.0);
    }
    out.extend(log_grid(min, max, points));
    out.dedup();
    Ok(out)
}

fn resolve_perturbative(p: PerturbativeFile, experiment: ExperimentKind) -> Result<PerturbativeSettings, ConfigError> {
    let missing = |key| ConfigError::Missing {
        key,
        experiment: experiment.as_str(),
    };
    let s = PerturbativeSettings {
        n: p.n.ok_or_else(|| missing("perturbative.n"))?,
        gamma_over_omega: p.gamma.ok_or_else(|| missing("perturbative.gamma"))?,
        delta_over_omega: p.delta.ok_or_else(|| missing("perturbative.delta"))?,
        k: p.k.ok_or_else(|| missing("perturbative.k"))?,
    };
    if s.n == 0 {
        return Err(invalid("perturbative.n", "must be >= 1".into()));
    }
    if s.k == 0 {
        return Err(invalid("perturbative.k", "must be >= 1".into()));
    }
    if !(s.gamma_over_omega >= 0.0 && s.gamma_over_omega.is_finite()) {
        return Err(invalid("perturbative.gamma", format!("{} must be >= 0", s.gamma_over_omega)));
    }
    if !(s.delta_over_omega > 0.0 && s.delta_over_omega.is_finite()) {
        return Err(invalid("perturbative.delta", format!("{} must be > 0", s.delta_over_omega)));
    }
    Ok(s)
}
