//! Command-line front end for the simulator: runs single configurations or
//! parameter sweeps, persists their artifacts, and exposes the diagnostic
//! toolbox (thresholds, functional-inequality checks, invariant self-tests)
//! without writing any Rust.

pub mod persist;
pub mod presets;
pub mod summary;
pub mod sweep;
pub mod verify;

use std::path::Path;

use anyhow::Result;
use fracbl_core::integrator::evolve;
use fracbl_core::{SolverConfig64, Verdict};

use persist::{persist_run, RunArtifacts};
use summary::{summarize, RunSummary};

/// Evolve one config, summarize, and write everything under `dir`.
pub fn execute_run(config: &SolverConfig64, name: &str, dir: &Path) -> Result<(RunSummary, RunArtifacts)> {
    let traj = evolve(config)?;
    let summary = summarize(name, config, &traj);
    let artifacts = persist_run(dir, config, &traj, &summary)?;
    Ok((summary, artifacts))
}

/// Process exit code for a finished run. Blow-up and resolution loss are
/// legitimate scientific outcomes, distinguished from plain failure (1).
pub fn verdict_exit_code(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Completed => 0,
        Verdict::GradientBlowup => 2,
        Verdict::ResolutionLost => 3,
        Verdict::Running => 1,
    }
}
