//! Monitored functionals: entropies, Fisher informations, balance-law
//! residuals, sup-norm decay envelopes, and the entropy-versus-seminorm
//! inequalities, plus the per-sample record type the solver emits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::field::SpectralField;
use crate::flux::{flux, Parameters};
use crate::fractional::normalizing_constant;
use crate::grid::Grid;
use crate::norms::{default_holder_stride, SeminormOrder};
use crate::scalar::{c, Real};

/// Positivity guard for functionals containing log(u) or 1/u. Fields that
/// dip below the floor get a sentinel (None) instead of a clipped value:
/// clipping would silently corrupt balance residuals.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EntropyGuard<T: Real> {
    pub positivity_floor_threshold: T,
}

impl<T: Real> Default for EntropyGuard<T> {
    fn default() -> Self {
        Self { positivity_floor_threshold: c(1e-8) }
    }
}

impl<T: Real> EntropyGuard<T> {
    /// True when log(u) and 1/u are safe: min u at or above the floor.
    pub fn admits_log(&self, field: &SpectralField<T>) -> bool {
        field.nodal_min() >= self.positivity_floor_threshold
    }

    /// True when log(1+u) is safe: tolerates round-off dips below zero.
    pub fn admits_log1p(&self, field: &SpectralField<T>) -> bool {
        field.nodal_min() >= -self.positivity_floor_threshold
    }
}

fn quad<T: Real>(field: &SpectralField<T>, f: impl Fn(T) -> T) -> T {
    field.grid().node_spacing() * field.nodal().iter().map(|&u| f(u)).sum()
}

fn quad2<T: Real>(field: &SpectralField<T>, other: &[T], f: impl Fn(T, T) -> T) -> T {
    let h = field.grid().node_spacing();
    h * field.nodal().iter().zip(other).map(|(&u, &v)| f(u, v)).sum()
}

/// First entropy integral F1 = int (u log u - u + 1) dx; pointwise
/// nonnegative. None when the positivity guard trips.
pub fn entropy_f1<T: Real>(field: &SpectralField<T>, guard: &EntropyGuard<T>) -> Option<T> {
    guard
        .admits_log(field)
        .then(|| quad(field, |u| u * u.ln() - u + T::one()))
}

/// Second entropy integral F2 = int (1+u) log(1+u) dx. None when u dips
/// below -floor.
pub fn entropy_f2<T: Real>(field: &SpectralField<T>, guard: &EntropyGuard<T>) -> Option<T> {
    guard.admits_log1p(field).then(|| quad(field, |u| (T::one() + u) * u.ln_1p()))
}

/// Third entropy integral F3 = int u log(u^2 + M(1-u)^2) dx. Total: the log
/// argument is positive for every real u when M > 0.
pub fn entropy_f3<T: Real>(field: &SpectralField<T>, m_ratio: T) -> T {
    quad(field, |u| {
        let w = T::one() - u;
        u * (u * u + m_ratio * w * w).ln()
    })
}

/// Fisher information I1 = int (L^alpha u) log u dx; nonnegative for
/// positive u (symmetrization argument). None when the guard trips.
pub fn fisher_i1<T: Real>(
    field: &SpectralField<T>,
    alpha: T,
    guard: &EntropyGuard<T>,
) -> Option<T> {
    guard.admits_log(field).then(|| {
        let lam = field.frac_laplacian(alpha);
        quad2(field, lam.nodal(), |u, l| l * u.ln())
    })
}

/// Fisher information I2 = int (L^alpha u) log(1+u) dx; nonnegative for
/// nonnegative u.
pub fn fisher_i2<T: Real>(
    field: &SpectralField<T>,
    alpha: T,
    guard: &EntropyGuard<T>,
) -> Option<T> {
    guard.admits_log1p(field).then(|| {
        let lam = field.frac_laplacian(alpha);
        quad2(field, lam.nodal(), |u, l| l * u.ln_1p())
    })
}

/// Fisher information
/// I3 = int (L^alpha u) [log(u^2+M(1-u)^2) + 2(M+1) f(u)] dx
/// where f is the flux. Total for valid fields.
pub fn fisher_i3<T: Real>(field: &SpectralField<T>, alpha: T, m_ratio: T) -> T {
    let lam = field.frac_laplacian(alpha);
    let two_mp1 = c::<T>(2.0) * (m_ratio + T::one());
    quad2(field, lam.nodal(), |u, l| {
        let w = T::one() - u;
        l * ((u * u + m_ratio * w * w).ln() + two_mp1 * flux(u, m_ratio))
    })
}

/// The bracket whose decay the second balance law states:
///
/// ```text
/// B[u] = int (u + M/(1+M)) log(u^2+M(1-u)^2) dx
///      - 2 M^{3/2}/(1+M) int arctan(sqrt(M) (1/u - 1)) dx.
/// ```
///
/// Needs u > 0 for the arctan term; None when the guard trips.
pub fn entropy_bracket_b<T: Real>(
    field: &SpectralField<T>,
    m_ratio: T,
    guard: &EntropyGuard<T>,
) -> Option<T> {
    guard.admits_log(field).then(|| {
        let shift = m_ratio / (T::one() + m_ratio);
        let sqrt_m = m_ratio.sqrt();
        let arctan_coeff = c::<T>(2.0) * m_ratio * sqrt_m / (T::one() + m_ratio);
        let log_part = quad(field, |u| {
            let w = T::one() - u;
            (u + shift) * (u * u + m_ratio * w * w).ln()
        });
        let arctan_part = quad(field, |u| (sqrt_m * (T::one() / u - T::one())).atan());
        log_part - arctan_coeff * arctan_part
    })
}

/// One row of the solver's diagnostic output. Field declaration order is the
/// CSV column order. Option fields hold None when the quantity is undefined
/// at that sample (positivity guard, disabled tracker, series endpoint); the
/// CSV writer renders those as nan, never as zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DiagnosticsRecord<T: Real> {
    pub time: T,
    /// ||u||_{L2}^2.
    pub l2_sq: T,
    /// ||u||_{H^{beta/2}}^2 (zero when beta is unset/invalid).
    pub hs_beta_half_sq: T,
    /// ||u||_{H^{alpha/2}}^2 (zero when alpha is unset/invalid).
    pub hs_alpha_half_sq: T,
    /// Running 2 nu int_0^t ||u||_{H^{alpha/2}}^2 ds (trapezoid on the
    /// cadence grid).
    pub dissipation_integral: T,
    /// l2_sq + mu * hs_beta_half_sq + dissipation_integral; constant along
    /// exact solutions.
    pub energy_total: T,
    pub linf: T,
    pub mean: T,
    /// max(linf, grad_linf), the W^{1,inf} norm.
    pub lipschitz: T,
    pub grad_linf: T,
    pub f1: Option<T>,
    pub f2: Option<T>,
    pub f3: T,
    pub i1: Option<T>,
    pub i2: Option<T>,
    pub i3: Option<T>,
    /// The balance-B bracket; undefined when u touches zero.
    pub entropy_bracket_b: Option<T>,
    /// C^delta seminorm at the configured Hoelder order.
    pub holder_delta: T,
    /// min u, the positivity margin the entropy guard tests.
    pub positivity_floor: T,
    /// Characteristic position, when the blow-up tracker runs.
    pub virial_y: Option<T>,
    /// J functional, when the blow-up tracker runs.
    pub virial_j: Option<T>,
    /// Centered-difference residual of dJ/dt >= delta/(1+M) J^2; None at
    /// series endpoints and when the tracker is off.
    pub odi_residual: Option<T>,
}

impl<T: Real> DiagnosticsRecord<T> {
    /// CSV column names, in struct declaration order.
    pub fn csv_columns() -> &'static [&'static str] {
        &[
            "time",
            "l2_sq",
            "hs_beta_half_sq",
            "hs_alpha_half_sq",
            "dissipation_integral",
            "energy_total",
            "linf",
            "mean",
            "lipschitz",
            "grad_linf",
            "f1",
            "f2",
            "f3",
            "i1",
            "i2",
            "i3",
            "entropy_bracket_b",
            "holder_delta",
            "positivity_floor",
            "virial_y",
            "virial_j",
            "odi_residual",
        ]
    }

    /// Values in column order; sentinels surface as NaN.
    pub fn csv_values(&self) -> Vec<f64> {
        let v = |x: T| x.to_f64().unwrap_or(f64::NAN);
        let o = |x: Option<T>| x.map_or(f64::NAN, v);
        vec![
            v(self.time),
            v(self.l2_sq),
            v(self.hs_beta_half_sq),
            v(self.hs_alpha_half_sq),
            v(self.dissipation_integral),
            v(self.energy_total),
            v(self.linf),
            v(self.mean),
            v(self.lipschitz),
            v(self.grad_linf),
            o(self.f1),
            o(self.f2),
            v(self.f3),
            o(self.i1),
            o(self.i2),
            o(self.i3),
            o(self.entropy_bracket_b),
            v(self.holder_delta),
            v(self.positivity_floor),
            o(self.virial_y),
            o(self.virial_j),
            o(self.odi_residual),
        ]
    }
}

/// Measure every record field that depends only on the current field and
/// parameters. The dissipation integral is the caller's running value; the
/// virial entries stay None until the tracker fills them.
pub fn norms_snapshot<T: Real>(
    field: &SpectralField<T>,
    params: &Parameters<T>,
    guard: &EntropyGuard<T>,
    holder_order: T,
    time: T,
    dissipation_integral: T,
) -> DiagnosticsRecord<T> {
    let half = c::<T>(0.5);
    let two = c::<T>(2.0);
    let order_ok = |s: T| s.is_finite() && s > T::zero() && s <= two;
    let seminorm_sq = |s: T| {
        let v = field.sobolev_seminorm(SeminormOrder::new(s * half));
        v * v
    };
    let l2_sq = field.l2_norm_sq();
    let hs_beta_half_sq = if order_ok(params.beta) { seminorm_sq(params.beta) } else { T::zero() };
    let alpha_ok = order_ok(params.alpha);
    let hs_alpha_half_sq = if alpha_ok { seminorm_sq(params.alpha) } else { T::zero() };
    let grad = field.derivative();
    let linf = field.linf_norm();
    let grad_linf = grad.linf_norm();
    let stride = default_holder_stride(field.grid().n_nodes());
    DiagnosticsRecord {
        time,
        l2_sq,
        hs_beta_half_sq,
        hs_alpha_half_sq,
        dissipation_integral,
        energy_total: l2_sq + params.mu * hs_beta_half_sq + dissipation_integral,
        linf,
        mean: field.mean(),
        lipschitz: linf.max(grad_linf),
        grad_linf,
        f1: entropy_f1(field, guard),
        f2: entropy_f2(field, guard),
        f3: entropy_f3(field, params.m_ratio),
        i1: alpha_ok.then(|| fisher_i1(field, params.alpha, guard)).flatten(),
        i2: alpha_ok.then(|| fisher_i2(field, params.alpha, guard)).flatten(),
        i3: alpha_ok.then(|| fisher_i3(field, params.alpha, params.m_ratio)),
        entropy_bracket_b: entropy_bracket_b(field, params.m_ratio, guard),
        holder_delta: field.holder_seminorm(SeminormOrder::new(holder_order), stride),
        positivity_floor: field.nodal_min(),
        virial_y: None,
        virial_j: None,
        odi_residual: None,
    }
}

/// Running trapezoid integral of an optionally-defined integrand; once a
/// sample is undefined every later cumulative value is undefined too.
fn running_trapezoid<T: Real>(samples: &[(T, Option<T>)]) -> Vec<Option<T>> {
    let half = c::<T>(0.5);
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = samples.first().and_then(|s| s.1.map(|_| T::zero()));
    let mut prev: Option<(T, T)> = samples.first().and_then(|&(t, v)| v.map(|v| (t, v)));
    for (i, &(t, v)) in samples.iter().enumerate() {
        if i > 0 {
            acc = match (acc, prev, v) {
                (Some(a), Some((tp, vp)), Some(v)) => Some(a + half * (t - tp) * (vp + v)),
                _ => None,
            };
            prev = v.map(|v| (t, v));
        }
        out.push(acc);
    }
    out
}

/// Residual of the first balance law, F1(t) + nu int_0^t I1 ds - F1(0), per
/// record. Zero at t = 0 by construction; pure discretization error on
/// smooth positive runs. None wherever a guard sentinel blocks the identity.
pub fn entropy_balance_residual_a<T: Real>(
    records: &[DiagnosticsRecord<T>],
    nu: T,
) -> Vec<(T, Option<T>)> {
    let samples: Vec<(T, Option<T>)> = records.iter().map(|r| (r.time, r.i1)).collect();
    let cum = running_trapezoid(&samples);
    let f1_0 = records.first().and_then(|r| r.f1);
    records
        .iter()
        .zip(cum)
        .map(|(r, integral)| {
            let res = match (r.f1, integral, f1_0) {
                (Some(f1), Some(int), Some(f0)) => Some(f1 + nu * int - f0),
                _ => None,
            };
            (r.time, res)
        })
        .collect()
}

/// Residual of the second balance law, B(t) + nu int_0^t I3 ds - B(0), with
/// B the arctan-log bracket ([`entropy_bracket_b`]).
pub fn entropy_balance_residual_b<T: Real>(
    records: &[DiagnosticsRecord<T>],
    nu: T,
) -> Vec<(T, Option<T>)> {
    let samples: Vec<(T, Option<T>)> = records.iter().map(|r| (r.time, r.i3)).collect();
    let cum = running_trapezoid(&samples);
    let b_0 = records.first().and_then(|r| r.entropy_bracket_b);
    records
        .iter()
        .zip(cum)
        .map(|(r, integral)| {
            let res = match (r.entropy_bracket_b, integral, b_0) {
                (Some(b), Some(int), Some(b0)) => Some(b + nu * int - b0),
                _ => None,
            };
            (r.time, res)
        })
        .collect()
}

/// Which constant the decay envelope carries: the one printed in the result
/// statement (pi^{1+alpha} denominator) or the one its proof actually
/// derives ((2 pi)^{1+alpha}, a slower rate). Only the proof variant is ever
/// asserted against simulations; the statement variant is report-only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeVariant {
    Statement,
    #[default]
    Proof,
}

/// Decay rate of the periodic sup-norm envelope,
/// 2 Gamma(1+alpha) cos((1-alpha) pi/2) / pi^{1+alpha} (statement) or the
/// same over (2 pi)^{1+alpha} (proof). Zero at alpha = 2 where the cosine
/// vanishes.
pub fn envelope_rate_periodic<T: Real>(alpha: T, variant: EnvelopeVariant) -> T {
    assert!(alpha > T::zero() && alpha <= c(2.0), "envelope needs 0 < alpha <= 2");
    let one = T::one();
    let half_pi = T::PI() * c::<T>(0.5);
    let numer = c::<T>(2.0) * (one + alpha).gamma() * ((one - alpha) * half_pi).cos();
    let base = match variant {
        EnvelopeVariant::Statement => T::PI(),
        EnvelopeVariant::Proof => c::<T>(2.0) * T::PI(),
    };
    numer / base.powf(one + alpha)
}

/// Periodic sup-norm envelope <u0> + (||u0||_inf - <u0>) e^{-rt}.
pub fn decay_envelope_periodic<T: Real>(
    t: T,
    mean_u0: T,
    linf_u0: T,
    alpha: T,
    variant: EnvelopeVariant,
) -> T {
    assert!(
        linf_u0 >= mean_u0 && mean_u0 >= T::zero(),
        "envelope needs linf >= mean >= 0"
    );
    let rate = envelope_rate_periodic(alpha, variant);
    mean_u0 + (linf_u0 - mean_u0) * (-rate * t).exp()
}

/// Whole-line sup-norm envelope, algebraic decay
/// ||u0||_inf (1 + alpha K ||u0||_inf^alpha t)^{-1/alpha}. The statement
/// variant has K = Gamma(1+alpha) cos((1-alpha) pi/2) / (2 pi); the proof
/// variant divides by 2^{1+alpha} pi and by ||u0||_{L1}^alpha. Formula
/// evaluator only; the whole-line problem is never simulated here.
pub fn decay_envelope_real_line<T: Real>(
    t: T,
    linf_u0: T,
    l1_u0: T,
    alpha: T,
    variant: EnvelopeVariant,
) -> T {
    assert!(alpha > T::zero() && alpha <= c(2.0), "envelope needs 0 < alpha <= 2");
    assert!(linf_u0 > T::zero() && l1_u0 > T::zero(), "envelope needs positive norms");
    let one = T::one();
    let half_pi = T::PI() * c::<T>(0.5);
    let gamma_cos = (one + alpha).gamma() * ((one - alpha) * half_pi).cos();
    let k = match variant {
        EnvelopeVariant::Statement => gamma_cos / (c::<T>(2.0) * T::PI()) * linf_u0.powf(alpha),
        EnvelopeVariant::Proof => {
            gamma_cos / (c::<T>(2.0).powf(one + alpha) * T::PI())
                * (linf_u0 / l1_u0).powf(alpha)
        }
    };
    linf_u0 / (one + alpha * k * t).powf(one / alpha)
}

/// Envelope check over a recorded run.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EnvelopeReport<T: Real> {
    pub variant: EnvelopeVariant,
    pub rate: T,
    pub samples: usize,
    pub violations: usize,
    /// max over samples of linf(t) - envelope(t); negative when the bound
    /// holds with room.
    pub worst_excess: T,
    pub passed: bool,
}

/// Check ||u(t)||_inf <= envelope(t) + tolerance at every record. Applies to
/// mu = 0, nu > 0 runs (the regime the bound is proved in); asserted with
/// the variant given, conventionally the proof constant.
pub fn envelope_monitor<T: Real>(
    records: &[DiagnosticsRecord<T>],
    params: &Parameters<T>,
    variant: EnvelopeVariant,
    tolerance: T,
) -> EnvelopeReport<T> {
    assert!(params.mu == T::zero(), "envelope bound applies to mu = 0 runs");
    assert!(params.nu > T::zero(), "envelope bound applies to nu > 0 runs");
    assert!(!records.is_empty(), "no records to monitor");
    let mean0 = records[0].mean;
    let linf0 = records[0].linf;
    let mut violations = 0usize;
    let mut worst = T::neg_infinity();
    for r in records {
        let bound = decay_envelope_periodic(r.time, mean0, linf0, params.alpha, variant);
        let excess = r.linf - bound;
        worst = worst.max(excess);
        if excess > tolerance {
            violations += 1;
        }
    }
    EnvelopeReport {
        variant,
        rate: envelope_rate_periodic(params.alpha, variant),
        samples: records.len(),
        violations,
        worst_excess: worst,
        passed: violations == 0,
    }
}

/// Which Fisher information feeds the entropy inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FisherKind {
    I1,
    I2,
}

/// Both sides of both entropy inequalities for one field: the W^{s,1}
/// inequality with constant C(alpha,1,eps) = 2 C(eps)/C_alpha,
/// C(eps) = pi^{2 eps}/eps, and the H^{alpha/2} inequality with constant
/// 4/C_alpha.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EntropyFisherReport<T: Real> {
    pub which: FisherKind,
    pub alpha: T,
    pub epsilon: T,
    /// ||u||^2 in W^{alpha/2-eps,1}.
    pub w_side: T,
    /// C(alpha,1,eps) ||u||_{L1} I.
    pub w_bound: T,
    /// ||u||^2 in H^{alpha/2}.
    pub h_side: T,
    /// (4/C_alpha) ||u||_inf I.
    pub h_bound: T,
    pub w_slack: T,
    pub h_slack: T,
    pub passed: bool,
}

/// Evaluate both entropy inequalities on a positive field. None when the
/// positivity guard blocks the Fisher information.
pub fn entropy_fisher_check<T: Real>(
    field: &SpectralField<T>,
    alpha: T,
    epsilon: T,
    which: FisherKind,
    guard: &EntropyGuard<T>,
) -> Option<EntropyFisherReport<T>> {
    assert!(alpha > T::zero() && alpha < c(2.0), "inequalities need 0 < alpha < 2");
    assert!(
        epsilon > T::zero() && epsilon < alpha * c(0.5),
        "inequalities need 0 < epsilon < alpha/2"
    );
    let fisher = match which {
        FisherKind::I1 => fisher_i1(field, alpha, guard)?,
        FisherKind::I2 => fisher_i2(field, alpha, guard)?,
    };
    let half = c::<T>(0.5);
    let c_alpha = normalizing_constant(alpha);
    let c_eps = T::PI().powf(c::<T>(2.0) * epsilon) / epsilon;
    let w = field.w_s1_seminorm(SeminormOrder::new(alpha * half - epsilon));
    let h = field.sobolev_seminorm(SeminormOrder::new(alpha * half));
    let w_side = w * w;
    let h_side = h * h;
    let w_bound = c::<T>(2.0) * c_eps / c_alpha * field.l1_norm() * fisher;
    let h_bound = c::<T>(4.0) / c_alpha * field.linf_norm() * fisher;
    Some(EntropyFisherReport {
        which,
        alpha,
        epsilon,
        w_side,
        w_bound,
        h_side,
        h_bound,
        w_slack: w_bound - w_side,
        h_slack: h_bound - h_side,
        passed: w_side <= w_bound && h_side <= h_bound,
    })
}

/// Random strictly positive trigonometric polynomial: modes 1..=max_mode
/// with 1/k-damped uniform coefficients, rescaled so the fluctuation stays
/// below 0.7 and shifted so min u lands in [min_value, min_value + 0.1].
/// Deterministic given the generator state.
pub fn random_positive_trig_poly<T: Real, R: Rng>(
    grid: Grid<T>,
    rng: &mut R,
    max_mode: usize,
    min_value: T,
) -> SpectralField<T> {
    assert!(max_mode >= 1 && max_mode <= grid.n_nodes() / 3, "mode cap out of range");
    let coeffs: Vec<(f64, f64)> = (1..=max_mode)
        .map(|k| {
            let damp = 1.0 / k as f64;
            (rng.gen_range(-1.0..1.0) * damp, rng.gen_range(-1.0..1.0) * damp)
        })
        .collect();
    let amplitude = rng.gen_range(0.15..0.35);
    let lift = rng.gen_range(0.0..0.1);
    let g = SpectralField::from_fn(grid.clone(), |x| {
        let xf = x.to_f64().unwrap();
        let mut acc = 0.0;
        for (k, &(a, b)) in coeffs.iter().enumerate() {
            let kx = (k + 1) as f64 * xf;
            acc += a * kx.cos() + b * kx.sin();
        }
        c::<T>(acc)
    });
    let peak = g.linf_norm().to_f64().unwrap().max(1e-12);
    let scale = c::<T>(amplitude / peak);
    let floor = g.nodal_min() * scale;
    let base = min_value + c::<T>(lift) - floor;
    let nodal: Vec<T> = g.nodal().iter().map(|&v| base + v * scale).collect();
    SpectralField::from_nodal(grid, nodal)
}
