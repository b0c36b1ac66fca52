//! On-disk layout of a run: one rectangular CSV of diagnostic records, one
//! (x, u) CSV per profile snapshot, a JSON summary, and a gnuplot script
//! that renders the lot. All numbers are written with 17 significant
//! digits, locale-independent, so files round-trip to the bit.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fracbl_core::diagnostics::DiagnosticsRecord;
use fracbl_core::integrator::{ProfileSnapshot, Trajectory};
use fracbl_core::{Grid64, SolverConfig64};

use crate::summary::RunSummary;

/// Formats one value the way every writer here does: 17 significant digits.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn records_csv(records: &[DiagnosticsRecord<f64>]) -> String {
    let mut text = String::new();
    text.push_str(&DiagnosticsRecord::<f64>::csv_columns().join(","));
    text.push('\n');
    for r in records {
        let row: Vec<String> = r.csv_values().into_iter().map(fmt_value).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

pub fn profile_csv(grid: &Grid64, profile: &ProfileSnapshot<f64>) -> String {
    let mut text = String::from("x,u\n");
    for (&x, &u) in grid.nodes().iter().zip(&profile.nodal) {
        text.push_str(&fmt_value(x));
        text.push(',');
        text.push_str(&fmt_value(u));
        text.push('\n');
    }
    text
}

/// File name for a profile snapshot; the time is embedded with enough
/// digits to stay unique and shell-safe (no '+' or scientific notation).
pub fn profile_file_name(time: f64) -> String {
    format!("profile_t{:.6}.csv", time).replace('-', "m")
}

pub fn gnuplot_script(name: &str, profiles: &[ProfileSnapshot<f64>]) -> String {
    let mut s = String::new();
    s.push_str("# Render with: gnuplot plot.gp\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set key outside\n");
    s.push_str("set grid\n\n");
    s.push_str(&format!("set title '{name}: norms'\n"));
    s.push_str("set terminal pngcairo size 1200,800\n");
    s.push_str("set output 'norms.png'\n");
    s.push_str("set logscale y\n");
    s.push_str("plot 'records.csv' using 1:7 with lines title 'sup norm', \\\n");
    s.push_str("     'records.csv' using 1:10 with lines title 'grad sup norm', \\\n");
    s.push_str("     'records.csv' using 1:6 with lines title 'energy'\n\n");
    if !profiles.is_empty() {
        s.push_str(&format!("set title '{name}: profiles'\n"));
        s.push_str("set output 'profiles.png'\n");
        s.push_str("unset logscale y\n");
        s.push_str("plot ");
        let parts: Vec<String> = profiles
            .iter()
            .map(|p| {
                format!(
                    "'{}' using 1:2 with lines title 't={:.3}'",
                    profile_file_name(p.time),
                    p.time
                )
            })
            .collect();
        s.push_str(&parts.join(", \\\n     "));
        s.push('\n');
    }
    s
}

/// Layout written by [`persist_run`].
pub struct RunArtifacts {
    pub directory: PathBuf,
    pub records_path: PathBuf,
    pub summary_path: PathBuf,
    pub profile_paths: Vec<PathBuf>,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))?;
    f.write_all(contents.as_bytes())
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Write all artifacts of one finished run under `dir` (created if absent).
pub fn persist_run(
    dir: &Path,
    config: &SolverConfig64,
    traj: &Trajectory<f64>,
    summary: &RunSummary,
) -> Result<RunArtifacts> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let records_path = dir.join("records.csv");
    write_file(&records_path, &records_csv(&traj.records))?;

    let grid = Grid64::new(config.n_nodes);
    let mut profile_paths = Vec::new();
    for p in &traj.profiles {
        let path = dir.join(profile_file_name(p.time));
        write_file(&path, &profile_csv(&grid, p))?;
        profile_paths.push(path);
    }

    let summary_path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(summary).context("serializing summary")?;
    write_file(&summary_path, &json)?;

    write_file(&dir.join("config.toml"), &config.to_toml_string())?;
    write_file(&dir.join("plot.gp"), &gnuplot_script(&summary.name, &traj.profiles))?;

    Ok(RunArtifacts { directory: dir.to_path_buf(), records_path, summary_path, profile_paths })
}

/// Default output root: $FRACBL_OUT_DIR, or ./fracbl-out.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os("FRACBL_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fracbl-out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_format_has_17_significant_digits_and_round_trips() {
        let v = std::f64::consts::PI;
        let s = fmt_value(v);
        assert_eq!(s, "3.1415926535897931e0");
        assert_eq!(s.parse::<f64>().unwrap(), v);
        let tiny = 2.2250738585072014e-308;
        assert_eq!(fmt_value(tiny).parse::<f64>().unwrap(), tiny);
        assert_eq!(fmt_value(f64::NAN), "NaN".to_string());
    }

    #[test]
    fn profile_names_are_unique_and_safe() {
        assert_eq!(profile_file_name(0.0), "profile_t0.000000.csv");
        assert_eq!(profile_file_name(2.5), "profile_t2.500000.csv");
        assert_ne!(profile_file_name(0.1), profile_file_name(0.100001));
    }

    #[test]
    fn gnuplot_columns_match_csv_schema() {
        let cols = DiagnosticsRecord::<f64>::csv_columns();
        let script = gnuplot_script("t", &[]);
        for (name, title) in [("linf", "sup norm"), ("grad_linf", "grad sup norm"), ("energy_total", "energy")] {
            let idx = cols.iter().position(|c| *c == name).unwrap() + 1;
            let clause = format!("using 1:{idx} with lines title '{title}'");
            assert!(script.contains(&clause), "missing {clause:?} in script:\n{script}");
        }
    }
}
