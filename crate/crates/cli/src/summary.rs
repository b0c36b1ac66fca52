//! End-of-run summary: the one JSON document that states what a run did and
//! which of the tracked laws held on it.

use fracbl_core::diagnostics::{
    entropy_balance_residual_a, entropy_balance_residual_b, envelope_monitor, EnvelopeVariant,
};
use fracbl_core::flux::threshold_report;
use fracbl_core::integrator::Trajectory;
use fracbl_core::{SolverConfig, ThresholdReport, Verdict};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSummary {
    pub variant: EnvelopeVariant,
    pub violations: usize,
    pub worst_excess: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VirialSummary {
    pub delta: f64,
    pub j_initial: f64,
    pub j_final: f64,
    pub monotone: bool,
    pub min_odi_residual: Option<f64>,
    /// (1+M)/(delta * J(0)), the upper bound the differential inequality
    /// puts on the classical lifespan; infinite when J(0) = 0.
    pub blowup_time_bound: f64,
}

/// Everything worth keeping after the records are on disk. Serialized as
/// JSON; round-trips losslessly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub verdict: Verdict,
    pub t_final: f64,
    pub record_count: usize,
    pub max_grad_linf: f64,
    pub max_grad_time: f64,
    pub mass_drift: f64,
    /// Relative drift of the total energy bracket; meaningful when nu > 0.
    pub energy_drift_rel: f64,
    /// Largest |residual| of the first entropy balance over the run; None
    /// when the positivity guard interrupted the time integral.
    pub balance_a_max_abs: Option<f64>,
    pub balance_b_max_abs: Option<f64>,
    /// Present on mu = 0, nu > 0 runs, where the sup-norm envelope applies.
    pub envelope: Option<EnvelopeSummary>,
    /// Present when nu > 0; the smallness thresholds assume dissipation.
    pub thresholds: Option<ThresholdReport<f64>>,
    pub virial: Option<VirialSummary>,
}

pub fn summarize(name: &str, config: &SolverConfig<f64>, traj: &Trajectory<f64>) -> RunSummary {
    let records = &traj.records;
    let first = &records[0];
    let (max_grad_linf, max_grad_time) = records
        .iter()
        .map(|r| (r.grad_linf, r.time))
        .fold((f64::NEG_INFINITY, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
    let mass_drift = records
        .iter()
        .map(|r| (r.mean - first.mean).abs())
        .fold(0.0, f64::max);
    let e0 = first.energy_total;
    let energy_drift_rel = records
        .iter()
        .map(|r| (r.energy_total - e0).abs())
        .fold(0.0, f64::max)
        / e0.abs().max(f64::MIN_POSITIVE);

    let nu = config.params.nu;
    let max_abs = |series: Vec<(f64, Option<f64>)>| -> Option<f64> {
        series
            .iter()
            .map(|(_, v)| v.map(f64::abs))
            .collect::<Option<Vec<f64>>>()
            .map(|v| v.into_iter().fold(0.0, f64::max))
    };
    let balance_a_max_abs = max_abs(entropy_balance_residual_a(records, nu));
    let balance_b_max_abs = max_abs(entropy_balance_residual_b(records, nu));

    let envelope = (config.params.mu == 0.0 && nu > 0.0).then(|| {
        let rep = envelope_monitor(records, &config.params, config.envelope_variant, 1e-8);
        EnvelopeSummary {
            variant: config.envelope_variant,
            violations: rep.violations,
            worst_excess: rep.worst_excess,
            passed: rep.passed,
        }
    });

    let virial = config.virial.enabled.then(|| {
        let js: Vec<f64> = records.iter().filter_map(|r| r.virial_j).collect();
        let monotone = js.windows(2).all(|w| w[1] >= w[0] - 1e-12);
        let j_initial = js.first().copied().unwrap_or(f64::NAN);
        let bound = if j_initial > 0.0 {
            fracbl_core::virial::blowup_time_bound(j_initial, config.params.m_ratio, config.virial.delta)
        } else {
            f64::INFINITY
        };
        VirialSummary {
            delta: config.virial.delta,
            j_initial,
            j_final: js.last().copied().unwrap_or(f64::NAN),
            monotone,
            min_odi_residual: records
                .iter()
                .filter_map(|r| r.odi_residual)
                .min_by(|a, b| a.partial_cmp(b).unwrap()),
            blowup_time_bound: bound,
        }
    });

    RunSummary {
        name: name.to_string(),
        verdict: traj.verdict,
        t_final: traj.final_state.time,
        record_count: records.len(),
        max_grad_linf,
        max_grad_time,
        mass_drift,
        energy_drift_rel,
        balance_a_max_abs,
        balance_b_max_abs,
        envelope,
        thresholds: (nu > 0.0)
            .then(|| threshold_report(nu, config.params.alpha, config.params.m_ratio)),
        virial,
    }
}
