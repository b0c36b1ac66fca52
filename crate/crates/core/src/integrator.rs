//! Time evolution by integrating-factor RK4 on the modal system
//!
//! ```text
//! d u_k / dt = [ -ik (f(u))_k - nu |k|^alpha u_k ] / (1 + mu |k|^beta),
//! ```
//!
//! with the stiff dissipative part handled exactly by the integrating factor
//! exp(-sigma_k t), sigma_k = nu |k|^alpha / (1 + mu |k|^beta), and the
//! conservative term inverted exactly as the modal divisor. Includes step
//! control, the resolution monitor, and the cadence-driven diagnostic loop.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, SolverConfig};
use crate::diagnostics::{norms_snapshot, DiagnosticsRecord, EntropyGuard};
use crate::field::SpectralField;
use crate::flux::{flux, flux_derivative, Parameters};
use crate::scalar::{c, Real};
use crate::virial::{odi_residual, VirialState};

/// Solution snapshot: the field, its time, and how many steps produced it.
#[derive(Clone, Debug)]
pub struct State<T: Real> {
    pub field: SpectralField<T>,
    pub time: T,
    pub step_index: u64,
}

impl<T: Real> State<T> {
    pub fn new(field: SpectralField<T>) -> Self {
        Self { field, time: T::zero(), step_index: 0 }
    }
}

/// Step-size policy. The dissipative term needs no constraint (it is exact
/// under the integrating factor); only transport restricts dt.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepPolicy<T: Real> {
    FixedDt { dt: T },
    CflAdaptive { cfl_number: T, max_dt: T },
}

/// Terminal status of a run. Transitions are monotone: Running can move to
/// any other verdict; the others are final.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Running,
    Completed,
    GradientBlowup,
    ResolutionLost,
}

/// Numerical proxy for the continuation criterion: a run ends early when the
/// spectral tail fills (the grid stops resolving the solution) or the sup
/// norm of the gradient grows past a factor of its initial size.
#[derive(Clone, Debug)]
pub struct ResolutionMonitor<T: Real> {
    tail_fraction_threshold: T,
    gradient_blowup_factor: T,
    initial_grad_linf: Option<T>,
    verdict: Verdict,
}

impl<T: Real> Default for ResolutionMonitor<T> {
    fn default() -> Self {
        Self::new(c(1e-4), c(1e4))
    }
}

impl<T: Real> ResolutionMonitor<T> {
    pub fn new(tail_fraction_threshold: T, gradient_blowup_factor: T) -> Self {
        assert!(tail_fraction_threshold > T::zero());
        assert!(gradient_blowup_factor > T::one());
        Self {
            tail_fraction_threshold,
            gradient_blowup_factor,
            initial_grad_linf: None,
            verdict: Verdict::Running,
        }
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    /// Fraction of modal energy in the top decade of the dealiased band,
    /// |k| > 0.9 n/3.
    pub fn tail_fraction(field: &SpectralField<T>) -> T {
        let cutoff = c::<T>(0.9) * c::<T>(field.grid().dealias_cutoff() as f64);
        let mut tail = T::zero();
        let mut total = T::zero();
        for (&k, v) in field.grid().wavenumbers().iter().zip(field.modal()) {
            let e = v.norm_sqr();
            total = total + e;
            if c::<T>(k.unsigned_abs() as f64) > cutoff {
                tail = tail + e;
            }
        }
        if total > T::zero() {
            tail / total
        } else {
            T::zero()
        }
    }

    /// Inspect a field and update the verdict. The first call captures the
    /// reference gradient size. Checks are one-way: a non-running verdict is
    /// never revisited.
    pub fn check(&mut self, field: &SpectralField<T>) -> Verdict {
        if self.verdict != Verdict::Running {
            return self.verdict;
        }
        let grad_linf = field.derivative().linf_norm();
        let reference =
            *self.initial_grad_linf.get_or_insert_with(|| grad_linf.max(c(1e-8)));
        if Self::tail_fraction(field) > self.tail_fraction_threshold {
            self.verdict = Verdict::ResolutionLost;
        } else if grad_linf > self.gradient_blowup_factor * reference {
            self.verdict = Verdict::GradientBlowup;
        }
        self.verdict
    }

    /// Mark a run that reached its end time. Only a running monitor can
    /// complete.
    pub fn complete(&mut self) {
        if self.verdict == Verdict::Running {
            self.verdict = Verdict::Completed;
        }
    }
}

/// Hard numerical failure or configuration failure inside [`evolve`].
#[derive(Debug, thiserror::Error)]
pub enum EvolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("non-finite field at t = {time}, step {step_index}")]
    NumericalBreakdown { time: f64, step_index: u64 },
}

fn modal_divisor<T: Real>(k: i64, params: &Parameters<T>) -> T {
    if params.mu > T::zero() {
        T::one() + params.mu * c::<T>(k.unsigned_abs() as f64).powf(params.beta)
    } else {
        T::one()
    }
}

fn dissipation_symbol<T: Real>(k: i64, params: &Parameters<T>) -> T {
    if params.nu > T::zero() {
        params.nu * c::<T>(k.unsigned_abs() as f64).powf(params.alpha) / modal_divisor(k, params)
    } else {
        T::zero()
    }
}

/// Transport part of the tendency, -ik (f(u))_k / (1 + mu |k|^beta), with
/// the flux transform dealiased by the 2/3 rule and the Nyquist mode zeroed.
pub fn transport_tendency<T: Real>(
    field: &SpectralField<T>,
    params: &Parameters<T>,
) -> SpectralField<T> {
    SpectralField::from_modal(field.grid().clone(), transport_modal(field, params))
}

fn transport_modal<T: Real>(
    field: &SpectralField<T>,
    params: &Parameters<T>,
) -> Vec<Complex<T>> {
    let grid = field.grid();
    let m = params.m_ratio;
    let f_nodal: Vec<T> = field.nodal().iter().map(|&u| flux(u, m)).collect();
    let f_hat = SpectralField::from_nodal(grid.clone(), f_nodal).dealias();
    let n = grid.n_nodes();
    grid.wavenumbers()
        .iter()
        .zip(f_hat.modal())
        .enumerate()
        .map(|(i, (&k, &v))| {
            if i == n / 2 {
                return Complex::new(T::zero(), T::zero());
            }
            let ik = Complex::new(T::zero(), c::<T>(k as f64));
            -ik * v / modal_divisor(k, params)
        })
        .collect()
}

/// Dissipative part of the tendency, -nu |k|^alpha u_k / (1 + mu |k|^beta).
pub fn dissipation_tendency<T: Real>(
    field: &SpectralField<T>,
    params: &Parameters<T>,
) -> SpectralField<T> {
    let modal = field
        .grid()
        .wavenumbers()
        .iter()
        .zip(field.modal())
        .map(|(&k, &v)| v * -dissipation_symbol(k, params))
        .collect();
    SpectralField::from_modal(field.grid().clone(), modal)
}

/// Full modal tendency (transport plus dissipation); the k = 0 component is
/// exactly zero, so the mean is invariant.
pub fn rhs<T: Real>(field: &SpectralField<T>, params: &Parameters<T>) -> SpectralField<T> {
    let grid = field.grid().clone();
    let mut modal = transport_modal(field, params);
    for ((&k, v), &u) in grid.wavenumbers().iter().zip(&mut modal).zip(field.modal()) {
        *v = *v - u * dissipation_symbol(k, params);
    }
    SpectralField::from_modal(grid, modal)
}

/// The four stage fields of one step (initial, both midpoint stages, and the
/// endpoint stage), exposed so a characteristic tracker can sample the same
/// stage structure the field update used.
pub type StageFields<T> = [SpectralField<T>; 4];

fn ifrk4_step_inner<T: Real>(
    field: &SpectralField<T>,
    params: &Parameters<T>,
    dt: T,
    with_transport: bool,
) -> (SpectralField<T>, StageFields<T>) {
    let grid = field.grid().clone();
    let n = grid.n_nodes();
    let half = c::<T>(0.5);
    let sixth = T::one() / c::<T>(6.0);
    let two = c::<T>(2.0);

    // Exponentials of the dissipative symbol over half and full steps; both
    // decay, so no overflow path exists.
    let mut e_h = Vec::with_capacity(n);
    let mut e_f = Vec::with_capacity(n);
    for &k in grid.wavenumbers().iter() {
        let s = dissipation_symbol(k, params);
        let eh = (-s * dt * half).exp();
        e_h.push(eh);
        e_f.push(eh * eh);
    }

    let tendency = |f: &SpectralField<T>| -> Vec<Complex<T>> {
        if with_transport {
            transport_modal(f, params)
        } else {
            vec![Complex::new(T::zero(), T::zero()); n]
        }
    };

    let u_n = field.modal();
    let k1 = tendency(field);

    let stage_a: Vec<Complex<T>> = (0..n)
        .map(|i| (u_n[i] + k1[i] * (dt * half)) * e_h[i])
        .collect();
    let stage_a = SpectralField::from_modal(grid.clone(), stage_a);
    let k2 = tendency(&stage_a);

    let stage_b: Vec<Complex<T>> = (0..n)
        .map(|i| u_n[i] * e_h[i] + k2[i] * (dt * half))
        .collect();
    let stage_b = SpectralField::from_modal(grid.clone(), stage_b);
    let k3 = tendency(&stage_b);

    let stage_c: Vec<Complex<T>> = (0..n)
        .map(|i| u_n[i] * e_f[i] + k3[i] * (dt * e_h[i]))
        .collect();
    let stage_c = SpectralField::from_modal(grid.clone(), stage_c);
    let k4 = tendency(&stage_c);

    let next: Vec<Complex<T>> = (0..n)
        .map(|i| {
            let weighted =
                k1[i] * e_f[i] + (k2[i] + k3[i]) * (e_h[i] * two) + k4[i];
            u_n[i] * e_f[i] + weighted * (dt * sixth)
        })
        .collect();
    let next = SpectralField::from_modal(grid, next);
    (next, [field.clone(), stage_a, stage_b, stage_c])
}

/// One integrating-factor RK4 step. Deterministic: identical inputs give
/// bit-identical outputs.
pub fn if_rk4_step<T: Real>(state: &State<T>, params: &Parameters<T>, dt: T) -> State<T> {
    assert!(dt > T::zero(), "dt must be positive");
    let (field, _) = ifrk4_step_inner(&state.field, params, dt, true);
    State { field, time: state.time + dt, step_index: state.step_index + 1 }
}

/// One step with the transport term switched off: pure fractional heat. The
/// integrating factor makes this exact to round-off, which is the
/// self-verification hook for the scheme.
pub fn if_rk4_step_dissipation_only<T: Real>(
    state: &State<T>,
    params: &Parameters<T>,
    dt: T,
) -> State<T> {
    assert!(dt > T::zero(), "dt must be positive");
    let (field, _) = ifrk4_step_inner(&state.field, params, dt, false);
    State { field, time: state.time + dt, step_index: state.step_index + 1 }
}

/// Transport-limited step suggestion: cfl * min(h / max |a(u)|, 1), capped
/// at max_dt. Fixed mode returns its dt unconditionally.
pub fn suggest_dt<T: Real>(
    state: &State<T>,
    params: &Parameters<T>,
    policy: &StepPolicy<T>,
) -> T {
    match *policy {
        StepPolicy::FixedDt { dt } => dt,
        StepPolicy::CflAdaptive { cfl_number, max_dt } => {
            let a_max = state
                .field
                .nodal()
                .iter()
                .map(|&u| flux_derivative(u, params.m_ratio).abs())
                .fold(T::zero(), T::max);
            if a_max == T::zero() {
                return max_dt;
            }
            let h = state.field.grid().node_spacing();
            (cfl_number * (h / a_max).min(T::one())).min(max_dt)
        }
    }
}

/// A nodal snapshot of the solution at one time.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ProfileSnapshot<T: Real> {
    pub time: T,
    pub nodal: Vec<T>,
}

/// Everything a run produces: the diagnostic rows, any profile snapshots,
/// the terminal verdict, and the final state.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub records: Vec<DiagnosticsRecord<T>>,
    pub profiles: Vec<ProfileSnapshot<T>>,
    pub verdict: Verdict,
    pub final_state: State<T>,
}

fn non_finite<T: Real>(field: &SpectralField<T>) -> bool {
    field.modal().iter().any(|v| !v.re.is_finite() || !v.im.is_finite())
}

struct Event<T> {
    time: T,
    record: bool,
    profile: bool,
}

fn build_events<T: Real>(config: &SolverConfig<T>) -> Vec<Event<T>> {
    let t_end = config.t_end;
    let tol = c::<T>(1e-12) * t_end.max(T::one());
    let mut events: Vec<Event<T>> = Vec::new();
    let mut k = 1u64;
    loop {
        let t = config.diagnostic_cadence * c::<T>(k as f64);
        if t >= t_end - tol {
            break;
        }
        events.push(Event { time: t, record: true, profile: false });
        k += 1;
    }
    if t_end > T::zero() {
        events.push(Event { time: t_end, record: true, profile: false });
    }
    for &pt in &config.output.profile_times {
        if pt <= T::zero() || pt > t_end + tol {
            continue;
        }
        match events.iter_mut().find(|e| (e.time - pt).abs() <= tol) {
            Some(e) => e.profile = true,
            None => events.push(Event { time: pt, record: false, profile: true }),
        }
    }
    events.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap());
    events
}

/// Run a configured evolution from t = 0 to t_end or until the monitor
/// produces a terminal verdict. Diagnostic records land exactly on cadence
/// multiples (the preceding step is shortened to hit them); the dissipation
/// integral accumulates by trapezoid on those samples; the virial tracker,
/// when enabled, advances through the same stage structure each step.
pub fn evolve<T: Real>(config: &SolverConfig<T>) -> Result<Trajectory<T>, EvolveError> {
    config.validate()?;
    let params = config.params;
    let policy = config.step.policy()?;
    let guard = EntropyGuard { positivity_floor_threshold: config.entropy_guard };
    let two = c::<T>(2.0);
    let half = c::<T>(0.5);

    let mut state = State::new(config.initial_field()?);
    let mut monitor = ResolutionMonitor::new(
        config.monitor.tail_fraction_threshold,
        config.monitor.gradient_blowup_factor,
    );
    let mut virial = config.virial.enabled.then(|| VirialState::new(config.virial.delta));

    let order_ok = params.alpha.is_finite() && params.alpha > T::zero() && params.alpha <= two;
    let diss_rate = |field: &SpectralField<T>| -> T {
        if params.nu > T::zero() && order_ok {
            let s = field.sobolev_seminorm(crate::norms::SeminormOrder::new(params.alpha * half));
            two * params.nu * s * s
        } else {
            T::zero()
        }
    };

    let mut dissipation = T::zero();
    let mut prev_rate = diss_rate(&state.field);
    let mut prev_time = T::zero();

    let take_record = |state: &State<T>,
                           dissipation: T,
                           virial: &mut Option<VirialState<T>>|
     -> DiagnosticsRecord<T> {
        let mut rec = norms_snapshot(
            &state.field,
            &params,
            &guard,
            config.holder_delta,
            state.time,
            dissipation,
        );
        if let Some(vs) = virial {
            vs.record(state.time, &state.field);
            rec.virial_y = Some(vs.y());
            rec.virial_j = Some(vs.j_value());
        }
        rec
    };

    let mut records = vec![take_record(&state, dissipation, &mut virial)];
    let mut profiles: Vec<ProfileSnapshot<T>> = Vec::new();
    if config.output.profile_times.iter().any(|&t| t == T::zero()) {
        profiles.push(ProfileSnapshot { time: T::zero(), nodal: state.field.nodal().to_vec() });
    }
    monitor.check(&state.field);

    let events = build_events(config);
    let tol = c::<T>(1e-12) * config.t_end.max(T::one());

    'events: for event in events {
        if monitor.verdict() != Verdict::Running {
            break;
        }
        while event.time - state.time > tol {
            let remaining = event.time - state.time;
            let dt = suggest_dt(&state, &params, &policy).min(remaining);
            let (next_field, stages) = ifrk4_step_inner(&state.field, &params, dt, true);
            if let Some(vs) = virial.as_mut() {
                vs.advance(
                    [&stages[0], &stages[1], &stages[2], &stages[3]],
                    params.m_ratio,
                    dt,
                );
            }
            state = State {
                field: next_field,
                time: state.time + dt,
                step_index: state.step_index + 1,
            };
            if non_finite(&state.field) {
                return Err(EvolveError::NumericalBreakdown {
                    time: state.time.to_f64().unwrap_or(f64::NAN),
                    step_index: state.step_index,
                });
            }
        }
        state.time = event.time;
        if event.record {
            let rate = diss_rate(&state.field);
            dissipation = dissipation + (state.time - prev_time) * half * (prev_rate + rate);
            prev_rate = rate;
            prev_time = state.time;
            records.push(take_record(&state, dissipation, &mut virial));
            if monitor.check(&state.field) != Verdict::Running {
                if event.profile {
                    profiles.push(ProfileSnapshot {
                        time: state.time,
                        nodal: state.field.nodal().to_vec(),
                    });
                }
                break 'events;
            }
        }
        if event.profile {
            profiles
                .push(ProfileSnapshot { time: state.time, nodal: state.field.nodal().to_vec() });
        }
    }

    monitor.complete();

    // Fill the ODI residual column now the J history is complete.
    if let Some(vs) = &virial {
        if vs.j_history().len() >= 3 {
            let series = odi_residual(vs.j_history(), params.m_ratio, config.virial.delta);
            for (i, &(_, r)) in series.iter().enumerate() {
                records[i + 1].odi_residual = Some(r);
            }
        }
    }

    Ok(Trajectory { records, profiles, verdict: monitor.verdict(), final_state: state })
}
