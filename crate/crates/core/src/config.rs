//! Run configuration: TOML-backed, strict about unknown keys, with named
//! initial-data presets. A config validates fully before any compute starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::EnvelopeVariant;
use crate::field::SpectralField;
use crate::flux::{ParameterError, Parameters};
use crate::grid::Grid;
use crate::integrator::StepPolicy;
use crate::scalar::{c, Real};

/// Configuration or input-data failure, raised before or at run start.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Parameter(#[from] ParameterError),
    #[error("unknown initial-data preset '{0}' (expected paper-fig, smooth-positive, blowup-seed, constant:<value>, or file:<path>)")]
    UnknownPreset(String),
    #[error("bad constant initial data '{0}'")]
    BadConstant(String),
    #[error("sample file {path}: expected {expected} values, found {found}")]
    SampleCount { path: PathBuf, expected: usize, found: usize },
    #[error("sample file {path}: cannot parse '{token}' as a number")]
    BadNumber { path: PathBuf, token: String },
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Initial-data selector: a preset name, "constant:<value>", or
/// "file:<path>" pointing at a plain list of nodal samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InitialData(pub String);

impl InitialData {
    /// The named presets (the parametric constant:/file: forms come on top).
    pub fn preset_names() -> [&'static str; 3] {
        ["paper-fig", "smooth-positive", "blowup-seed"]
    }

    /// Cheap name/syntax check, run at validation time so typos surface
    /// before any compute. File contents are only read at sampling time.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = self.0.as_str();
        if Self::preset_names().contains(&s) {
            return Ok(());
        }
        if let Some(v) = s.strip_prefix("constant:") {
            return match v.trim().parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(()),
                _ => Err(ConfigError::BadConstant(v.to_string())),
            };
        }
        if let Some(p) = s.strip_prefix("file:") {
            if p.is_empty() {
                return Err(ConfigError::UnknownPreset(s.to_string()));
            }
            return Ok(());
        }
        Err(ConfigError::UnknownPreset(s.to_string()))
    }

    /// Sample onto a grid. The bump-profile preset is
    /// 1 - e^{-x^2}(1 - x^2/pi^2): it vanishes at x = 0, equals 1 at the
    /// seam, and stays inside [0, 1].
    pub fn sample<T: Real>(&self, grid: Grid<T>) -> Result<SpectralField<T>, ConfigError> {
        self.validate()?;
        let s = self.0.as_str();
        let pi_sq = T::PI() * T::PI();
        let half = c::<T>(0.5);
        match s {
            "paper-fig" => Ok(SpectralField::from_fn(grid, |x| {
                T::one() - (-x * x).exp() * (T::one() - x * x / pi_sq)
            })),
            "smooth-positive" => {
                Ok(SpectralField::from_fn(grid, |x| half + c::<T>(0.4) * x.sin()))
            }
            "blowup-seed" => Ok(SpectralField::from_fn(grid, |x| {
                let v = (x * half).sin();
                v * v
            })),
            _ => {
                if let Some(v) = s.strip_prefix("constant:") {
                    let x: f64 = v.trim().parse().unwrap();
                    return Ok(SpectralField::from_fn(grid, |_| c(x)));
                }
                let p = Path::new(s.strip_prefix("file:").unwrap());
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ConfigError::Io { path: p.into(), source: e })?;
                let mut vals = Vec::new();
                for token in text.split([' ', '\t', '\n', '\r', ',']) {
                    let token = token.trim();
                    if token.is_empty() || token.starts_with('#') {
                        continue;
                    }
                    vals.push(token.parse::<f64>().map_err(|_| ConfigError::BadNumber {
                        path: p.into(),
                        token: token.to_string(),
                    })?);
                }
                if vals.len() != grid.n_nodes() {
                    return Err(ConfigError::SampleCount {
                        path: p.into(),
                        expected: grid.n_nodes(),
                        found: vals.len(),
                    });
                }
                Ok(SpectralField::from_nodal(grid, vals.into_iter().map(c).collect()))
            }
        }
    }
}

/// Step-size selection mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepMode {
    FixedDt,
    CflAdaptive,
}

/// Step-size section. Optional knobs default at resolution time: cfl-number
/// 0.4, max-dt 0.05.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "")]
pub struct StepConfig<T: Real> {
    pub mode: StepMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl_number: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dt: Option<T>,
}

impl<T: Real> StepConfig<T> {
    /// Resolve into a concrete policy, or explain what is missing/out of
    /// range.
    pub fn policy(&self) -> Result<StepPolicy<T>, ConfigError> {
        match self.mode {
            StepMode::FixedDt => {
                let dt = self.dt.ok_or_else(|| invalid("fixed-dt mode requires step.dt"))?;
                if !(dt > T::zero() && dt.is_finite()) {
                    return Err(invalid("step.dt must be positive and finite"));
                }
                Ok(StepPolicy::FixedDt { dt })
            }
            StepMode::CflAdaptive => {
                let cfl = self.cfl_number.unwrap_or_else(|| c(0.4));
                let max_dt = self.max_dt.unwrap_or_else(|| c(0.05));
                if !(cfl > T::zero() && cfl <= T::one()) {
                    return Err(invalid("step.cfl_number must lie in (0, 1]"));
                }
                if !(max_dt > T::zero() && max_dt.is_finite()) {
                    return Err(invalid("step.max_dt must be positive and finite"));
                }
                Ok(StepPolicy::CflAdaptive { cfl_number: cfl, max_dt })
            }
        }
    }
}

/// Blow-up tracker section.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[serde(bound = "")]
pub struct VirialConfig<T: Real> {
    pub enabled: bool,
    /// Weight exponent delta of the singular functional, in (0, 1).
    pub delta: T,
}

impl<T: Real> Default for VirialConfig<T> {
    fn default() -> Self {
        Self { enabled: false, delta: c(0.1) }
    }
}

/// Resolution-monitor section. The defaults suit order-one initial data;
/// runs whose mean mode carries most of the energy may need a tighter
/// tail-fraction threshold, since the mean dilutes the fraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[serde(bound = "")]
pub struct MonitorConfig<T: Real> {
    /// Fraction of spectral energy in the dealiasing band above which the
    /// run is declared under-resolved.
    pub tail_fraction_threshold: T,
    /// Growth factor of the sup-norm gradient over its initial value that
    /// counts as gradient blow-up.
    pub gradient_blowup_factor: T,
}

impl<T: Real> Default for MonitorConfig<T> {
    fn default() -> Self {
        Self { tail_fraction_threshold: c(1e-4), gradient_blowup_factor: c(1e4) }
    }
}

/// Output plumbing: where the CLI writes, and which profile snapshot times
/// to capture. Empty defaults mean "derive from context".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[serde(bound = "")]
pub struct OutputConfig<T: Real> {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub profile_times: Vec<T>,
}

impl<T: Real> Default for OutputConfig<T> {
    fn default() -> Self {
        Self { directory: None, name: None, profile_times: Vec::new() }
    }
}

fn default_entropy_guard<T: Real>() -> T {
    c(1e-8)
}

fn default_holder_delta<T: Real>() -> T {
    c(0.1)
}

/// Full run description. Scalar keys first, then the sections; parses from
/// and serializes to TOML losslessly (round-trip equality is a test).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "")]
pub struct SolverConfig<T: Real> {
    /// Grid size; a power of two, at least 8.
    pub n_nodes: usize,
    pub t_end: T,
    /// Time between diagnostic records (and the quadrature step for the
    /// running dissipation integral).
    pub diagnostic_cadence: T,
    pub initial_data: InitialData,
    /// Seed for randomized property suites; never consumed by the solver
    /// itself, which is deterministic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Positivity floor under which log-bearing diagnostics go undefined.
    #[serde(default = "default_entropy_guard")]
    pub entropy_guard: T,
    /// Which decay-envelope constant the monitor asserts.
    #[serde(default)]
    pub envelope_variant: EnvelopeVariant,
    /// Order of the Hoelder seminorm column.
    #[serde(default = "default_holder_delta")]
    pub holder_delta: T,
    pub params: Parameters<T>,
    pub step: StepConfig<T>,
    #[serde(default)]
    pub virial: VirialConfig<T>,
    #[serde(default)]
    pub monitor: MonitorConfig<T>,
    #[serde(default)]
    pub output: OutputConfig<T>,
}

impl<T: Real> SolverConfig<T> {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.into(), source: e })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialization cannot fail")
    }

    /// Check every invariant that does not require touching the filesystem.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_nodes < 8 || !self.n_nodes.is_power_of_two() {
            return Err(invalid("n_nodes must be a power of two, at least 8"));
        }
        if !(self.t_end >= T::zero() && self.t_end.is_finite()) {
            return Err(invalid("t_end must be nonnegative and finite"));
        }
        if !(self.diagnostic_cadence > T::zero() && self.diagnostic_cadence.is_finite()) {
            return Err(invalid("diagnostic_cadence must be positive and finite"));
        }
        self.params.validate()?;
        self.step.policy()?;
        if !(self.virial.delta > T::zero() && self.virial.delta < T::one()) {
            return Err(invalid("virial.delta must lie in (0, 1)"));
        }
        if !(self.monitor.tail_fraction_threshold > T::zero()
            && self.monitor.tail_fraction_threshold.is_finite())
        {
            return Err(invalid("monitor.tail_fraction_threshold must be positive and finite"));
        }
        if !(self.monitor.gradient_blowup_factor > T::one()
            && self.monitor.gradient_blowup_factor.is_finite())
        {
            return Err(invalid("monitor.gradient_blowup_factor must exceed 1"));
        }
        if !(self.entropy_guard > T::zero() && self.entropy_guard.is_finite()) {
            return Err(invalid("entropy_guard must be positive and finite"));
        }
        if !(self.holder_delta > T::zero() && self.holder_delta <= T::one()) {
            return Err(invalid("holder_delta must lie in (0, 1]"));
        }
        for &t in &self.output.profile_times {
            if !(t >= T::zero() && t.is_finite()) {
                return Err(invalid("output.profile_times entries must be nonnegative and finite"));
            }
        }
        self.initial_data.validate()
    }

    pub fn grid(&self) -> Grid<T> {
        Grid::new(self.n_nodes)
    }

    /// Sample the configured initial data onto the configured grid.
    pub fn initial_field(&self) -> Result<SpectralField<T>, ConfigError> {
        self.initial_data.sample(self.grid())
    }
}
