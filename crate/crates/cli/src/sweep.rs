//! Parameter sweeps: a base config plus one or more value axes, expanded to
//! the cartesian product and run on a bounded worker pool. Every point gets
//! its own subdirectory of run artifacts; the coordinator writes a single
//! `index.json` at the end mapping points to verdicts. A failing point is
//! recorded in the index and does not stop the other points.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fracbl_core::integrator::evolve;
use fracbl_core::{SolverConfig64, Verdict};
use serde::{Deserialize, Serialize};

use crate::persist::persist_run;
use crate::summary::summarize;

/// Which scalar parameter an axis varies. `AlphaBeta` moves both orders in
/// lockstep, for the matched-order damped regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisParam {
    Alpha,
    Beta,
    AlphaBeta,
    Nu,
    Mu,
    MRatio,
}

impl AxisParam {
    /// Key used in point names and the index; matches the serde spelling.
    pub fn key(self) -> &'static str {
        match self {
            AxisParam::Alpha => "alpha",
            AxisParam::Beta => "beta",
            AxisParam::AlphaBeta => "alpha-beta",
            AxisParam::Nu => "nu",
            AxisParam::Mu => "mu",
            AxisParam::MRatio => "m-ratio",
        }
    }

    fn apply(self, config: &mut SolverConfig64, value: f64) {
        let p = &mut config.params;
        match self {
            AxisParam::Alpha => p.alpha = value,
            AxisParam::Beta => p.beta = value,
            AxisParam::AlphaBeta => {
                p.alpha = value;
                p.beta = value;
            }
            AxisParam::Nu => p.nu = value,
            AxisParam::Mu => p.mu = value,
            AxisParam::MRatio => p.m_ratio = value,
        }
    }

    /// Parameters actually written by this axis, for the index entry.
    fn record(self, value: f64, into: &mut BTreeMap<String, f64>) {
        match self {
            AxisParam::AlphaBeta => {
                into.insert("alpha".to_string(), value);
                into.insert("beta".to_string(), value);
            }
            other => {
                into.insert(other.key().to_string(), value);
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: AxisParam,
    pub values: Vec<f64>,
}

/// A sweep file: the base run config, the axes, and an optional worker
/// count (defaults to one worker per point, capped at the CPU count).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub workers: Option<usize>,
    pub base: SolverConfig64,
    pub axes: Vec<Axis>,
}

/// One assignment of a value to every axis, in axis order.
pub type SweepPoint = Vec<(AxisParam, f64)>;

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).context("parsing sweep spec")?;
        if spec.axes.is_empty() {
            bail!("sweep spec needs at least one [[axes]] entry");
        }
        for axis in &spec.axes {
            if axis.values.is_empty() {
                bail!("axis {} has no values", axis.param.key());
            }
            if !axis.values.iter().all(|v| v.is_finite()) {
                bail!("axis {} has a non-finite value", axis.param.key());
            }
        }
        if let Some(0) = spec.workers {
            bail!("workers must be at least 1");
        }
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml_str(&text)
    }

    /// Cartesian product of the axes, first axis slowest.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut points: Vec<SweepPoint> = vec![Vec::new()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|stem| {
                    axis.values.iter().map(move |&v| {
                        let mut p = stem.clone();
                        p.push((axis.param, v));
                        p
                    })
                })
                .collect();
        }
        points
    }

    /// Base config with one point's values written in.
    pub fn config_at(&self, point: &SweepPoint) -> SolverConfig64 {
        let mut config = self.base.clone();
        for &(param, value) in point {
            param.apply(&mut config, value);
        }
        config
    }
}

/// Directory-safe name of a point, e.g. `alpha0.25` or `nu0.5_mu0.1`.
pub fn point_name(point: &SweepPoint) -> String {
    point
        .iter()
        .map(|(param, value)| format!("{}{}", param.key(), value))
        .collect::<Vec<_>>()
        .join("_")
}

/// One row of `index.json`. Exactly one of `verdict` and `error` is set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndexEntry {
    pub name: String,
    pub point: BTreeMap<String, f64>,
    pub directory: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub struct SweepReport {
    pub entries: Vec<IndexEntry>,
    pub index_path: PathBuf,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.error.is_some()).count()
    }
}

fn run_point(spec: &SweepSpec, point: &SweepPoint, root: &Path) -> IndexEntry {
    let name = point_name(point);
    let mut recorded = BTreeMap::new();
    for &(param, value) in point {
        param.record(value, &mut recorded);
    }
    let dir = root.join(&name);
    let config = spec.config_at(point);
    let outcome = evolve(&config)
        .map_err(anyhow::Error::from)
        .and_then(|traj| {
            let summary = summarize(&name, &config, &traj);
            persist_run(&dir, &config, &traj, &summary)?;
            Ok(traj.verdict)
        });
    let (verdict, error) = match outcome {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(format!("{e:#}"))),
    };
    IndexEntry { name, point: recorded, directory: dir.display().to_string(), verdict, error }
}

/// Run every point of `spec` under `root`, on at most `workers` threads,
/// and write `index.json` once at the end. Point failures are recorded in
/// the index; only coordinator-level failures (pool construction, writing
/// the index itself) abort the sweep.
pub fn run_sweep(spec: &SweepSpec, root: &Path, workers_override: Option<usize>) -> Result<SweepReport> {
    let points = spec.points();
    let names: std::collections::BTreeSet<String> = points.iter().map(|p| point_name(p)).collect();
    if names.len() != points.len() {
        bail!("sweep points do not have unique names; check the axes for duplicate values");
    }
    std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;

    let workers = workers_override
        .or(spec.workers)
        .unwrap_or(points.len())
        .clamp(1, points.len().max(1));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;

    use rayon::prelude::*;
    let entries: Vec<IndexEntry> =
        pool.install(|| points.par_iter().map(|p| run_point(spec, p, root)).collect());

    let index_path = root.join("index.json");
    let json = serde_json::to_string_pretty(&entries).context("serializing index")?;
    std::fs::write(&index_path, json).with_context(|| format!("writing {}", index_path.display()))?;
    Ok(SweepReport { entries, index_path })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec(axes: &str) -> SweepSpec {
        let text = format!(
            r#"
[base]
n_nodes = 32
t_end = 0.01
diagnostic_cadence = 0.01
initial_data = "smooth-positive"

[base.params]
alpha = 1.0
beta = 1.0
nu = 0.5
mu = 0.0
m_ratio = 0.5

[base.step]
mode = "fixed-dt"
dt = 0.005

{axes}
"#
        );
        SweepSpec::from_toml_str(&text).unwrap()
    }

    #[test]
    fn cartesian_product_order_and_values() {
        let spec = tiny_spec(
            "[[axes]]\nparam = \"alpha\"\nvalues = [0.5, 1.0]\n\n\
             [[axes]]\nparam = \"nu\"\nvalues = [0.1, 0.2, 0.3]\n",
        );
        let points = spec.points();
        assert_eq!(points.len(), 6);
        assert_eq!(point_name(&points[0]), "alpha0.5_nu0.1");
        assert_eq!(point_name(&points[5]), "alpha1_nu0.3");
        let cfg = spec.config_at(&points[4]);
        assert_eq!(cfg.params.alpha, 1.0);
        assert_eq!(cfg.params.nu, 0.2);
    }

    #[test]
    fn alpha_beta_axis_moves_both_orders() {
        let spec = tiny_spec("[[axes]]\nparam = \"alpha-beta\"\nvalues = [0.75]\n");
        let cfg = spec.config_at(&spec.points()[0]);
        assert_eq!(cfg.params.alpha, 0.75);
        assert_eq!(cfg.params.beta, 0.75);
        let entry_params = {
            let mut m = BTreeMap::new();
            AxisParam::AlphaBeta.record(0.75, &mut m);
            m
        };
        assert_eq!(entry_params.len(), 2);
        assert_eq!(entry_params["alpha"], 0.75);
        assert_eq!(entry_params["beta"], 0.75);
    }

    #[test]
    fn rejects_empty_axes_and_zero_workers() {
        let base = r#"
[base]
n_nodes = 32
t_end = 0.01
diagnostic_cadence = 0.01
initial_data = "smooth-positive"
[base.params]
alpha = 1.0
beta = 1.0
nu = 0.5
mu = 0.0
m_ratio = 0.5
[base.step]
mode = "fixed-dt"
dt = 0.005
"#;
        assert!(SweepSpec::from_toml_str(base).is_err());
        let zero = format!("workers = 0\n{base}\n[[axes]]\nparam = \"nu\"\nvalues = [0.1]\n");
        assert!(SweepSpec::from_toml_str(&zero).is_err());
    }

    #[test]
    fn sweep_runs_points_and_writes_index_once() {
        let spec = tiny_spec("[[axes]]\nparam = \"alpha\"\nvalues = [0.5, 1.0]\n");
        let dir = tempfile::tempdir().unwrap();
        let report = run_sweep(&spec, dir.path(), Some(2)).unwrap();
        assert_eq!(report.entries.len(), 2);
        assert_eq!(report.failures(), 0);
        for e in &report.entries {
            assert_eq!(e.verdict, Some(Verdict::Completed));
            assert!(Path::new(&e.directory).join("summary.json").is_file());
            assert!(Path::new(&e.directory).join("records.csv").is_file());
        }
        let text = std::fs::read_to_string(&report.index_path).unwrap();
        let parsed: Vec<IndexEntry> = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.len(), 2);
    }

    #[test]
    fn failing_point_is_recorded_and_sweep_continues() {
        // nu = -1 fails config validation inside evolve for that point only.
        let spec = tiny_spec("[[axes]]\nparam = \"nu\"\nvalues = [-1.0, 0.5]\n");
        let dir = tempfile::tempdir().unwrap();
        let report = run_sweep(&spec, dir.path(), Some(1)).unwrap();
        assert_eq!(report.entries.len(), 2);
        assert_eq!(report.failures(), 1);
        let bad = report.entries.iter().find(|e| e.name == "nu-1").unwrap();
        assert!(bad.verdict.is_none());
        assert!(bad.error.as_deref().unwrap().contains("nu"));
        let good = report.entries.iter().find(|e| e.name == "nu0.5").unwrap();
        assert_eq!(good.verdict, Some(Verdict::Completed));
    }
}
