//! Pseudospectral simulator and diagnostics for a generalized Buckley-Leverett
//! equation with nonlocal regularization on the periodic domain [-pi, pi):
//!
//! ```text
//! du/dt + d/dx f(u) = -nu * L^alpha u - mu * L^beta du/dt,
//! f(u) = u^2 / (u^2 + M (1-u)^2),
//! ```
//!
//! where `L^s` is the fractional Laplacian, acting in Fourier space as the
//! multiplier |k|^s. The crate provides the spectral toolbox (transforms,
//! fractional operators, seminorms), the flux model with its smallness
//! thresholds, an integrating-factor RK4 time stepper with resolution
//! monitoring, entropy/Fisher/energy diagnostics with their balance laws,
//! and a virial blow-up tracker along a characteristic.
//!
//! Everything is generic over the scalar type through [`Real`] (f32 or f64);
//! concrete f64 aliases are exported at the crate root. All stated tolerances
//! assume f64.

pub mod config;
pub mod diagnostics;
pub mod field;
pub mod flux;
pub mod fractional;
pub mod grid;
pub mod integrator;
pub mod norms;
pub mod scalar;
pub mod virial;

pub use config::{InitialData, MonitorConfig, OutputConfig, SolverConfig, StepConfig, VirialConfig};
pub use diagnostics::{
    DiagnosticsRecord, EntropyGuard, EnvelopeReport, EnvelopeVariant, FisherKind, EntropyFisherReport,
};
pub use field::SpectralField;
pub use flux::{Parameters, SmallnessCase, SmallnessReport, ThresholdReport};
pub use grid::Grid;
pub use integrator::{ResolutionMonitor, State, StepPolicy, Trajectory, Verdict};
pub use norms::SeminormOrder;
pub use scalar::Real;
pub use virial::VirialState;

/// Working-precision grid.
pub type Grid64 = Grid<f64>;
/// Working-precision field.
pub type Field64 = SpectralField<f64>;
/// Working-precision model parameters.
pub type Parameters64 = Parameters<f64>;
/// Working-precision solver configuration.
pub type SolverConfig64 = SolverConfig<f64>;
/// Working-precision trajectory.
pub type Trajectory64 = Trajectory<f64>;
