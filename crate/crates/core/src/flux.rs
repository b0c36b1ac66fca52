//! The two-phase flux f(u) = u^2 / (u^2 + M (1-u)^2), its derivative in both
//! algebraic forms, the C(M) bound, and the smallness thresholds that decide
//! which global-existence regime a data set falls into.

use serde::{Deserialize, Serialize};

use crate::fractional::normalizing_constant;
use crate::scalar::{c, Real};

/// Model parameters for du/dt + d/dx f(u) = -nu L^alpha u - mu L^beta du/dt.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "")]
pub struct Parameters<T: Real> {
    /// Dissipation order, used when nu > 0; must lie in (0, 2].
    pub alpha: T,
    /// Conservative-regularization order, used when mu > 0; must lie in (0, 2].
    pub beta: T,
    /// Dissipation coefficient, >= 0.
    pub nu: T,
    /// Conservative-regularization coefficient, >= 0.
    pub mu: T,
    /// Viscosity ratio M > 0.
    pub m_ratio: T,
}

/// Parameter-domain violation found by [`Parameters::validate`].
#[derive(Debug, thiserror::Error)]
pub enum ParameterError {
    #[error("m_ratio must be positive and finite, got {0}")]
    MRatio(f64),
    #[error("nu must be nonnegative and finite, got {0}")]
    Nu(f64),
    #[error("mu must be nonnegative and finite, got {0}")]
    Mu(f64),
    #[error("alpha must lie in (0, 2] when nu > 0, got {0}")]
    Alpha(f64),
    #[error("beta must lie in (0, 2] when mu > 0, got {0}")]
    Beta(f64),
}

impl<T: Real> Parameters<T> {
    /// Check all parameter-domain invariants. The orders are only constrained
    /// when their coefficient is active (alpha is ignored when nu = 0, beta
    /// when mu = 0). nu = mu = 0 is allowed: that is the inviscid scenario
    /// the virial tracker targets.
    pub fn validate(&self) -> Result<(), ParameterError> {
        let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
        if !(self.m_ratio > T::zero() && self.m_ratio.is_finite()) {
            return Err(ParameterError::MRatio(f(self.m_ratio)));
        }
        if !(self.nu >= T::zero() && self.nu.is_finite()) {
            return Err(ParameterError::Nu(f(self.nu)));
        }
        if !(self.mu >= T::zero() && self.mu.is_finite()) {
            return Err(ParameterError::Mu(f(self.mu)));
        }
        if self.nu > T::zero() && !(self.alpha > T::zero() && self.alpha <= c(2.0)) {
            return Err(ParameterError::Alpha(f(self.alpha)));
        }
        if self.mu > T::zero() && !(self.beta > T::zero() && self.beta <= c(2.0)) {
            return Err(ParameterError::Beta(f(self.beta)));
        }
        Ok(())
    }
}

/// f(u) = u^2 / (u^2 + M (1-u)^2). Total for all real u when M > 0; maps
/// [0, 1] onto [0, 1] monotonically. Panics if m_ratio <= 0.
pub fn flux<T: Real>(u: T, m_ratio: T) -> T {
    assert!(m_ratio > T::zero(), "m_ratio must be positive");
    let w = T::one() - u;
    u * u / (u * u + m_ratio * w * w)
}

/// f'(u) in the factored form 2 M u (1-u) / (u^2 + M (1-u)^2)^2. This is the
/// wave speed a(u); nonnegative on [0, 1].
pub fn flux_derivative<T: Real>(u: T, m_ratio: T) -> T {
    assert!(m_ratio > T::zero(), "m_ratio must be positive");
    let w = T::one() - u;
    let d = u * u + m_ratio * w * w;
    c::<T>(2.0) * m_ratio * u * w / (d * d)
}

/// f'(u) by the raw quotient rule,
/// 2u/(u^2+M(1-u)^2) - u^2 (2u - 2M(1-u)) / (u^2+M(1-u)^2)^2,
/// kept as a separate evaluation path so the two closed forms can check each
/// other.
pub fn flux_derivative_quotient_form<T: Real>(u: T, m_ratio: T) -> T {
    assert!(m_ratio > T::zero(), "m_ratio must be positive");
    let two = c::<T>(2.0);
    let w = T::one() - u;
    let d = u * u + m_ratio * w * w;
    two * u / d - u * u * (two * u - two * m_ratio * w) / (d * d)
}

/// sup of f' over [lo, hi] by dense sampling (2^16 intervals) followed by
/// golden-section refinement around the best sample.
pub fn c_of_m_on<T: Real>(m_ratio: T, lo: T, hi: T) -> T {
    assert!(hi > lo, "empty search interval");
    let samples = 1 << 16;
    let width = hi - lo;
    let mut best_i = 0usize;
    let mut best = T::neg_infinity();
    for i in 0..=samples {
        let u = lo + width * c::<T>(i as f64 / samples as f64);
        let v = flux_derivative(u, m_ratio);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    // Golden-section maximization on the bracketing pair of sample cells.
    let mut a = lo + width * c::<T>(best_i.saturating_sub(1) as f64 / samples as f64);
    let mut b = lo + width * c::<T>(best_i.saturating_add(1).min(samples) as f64 / samples as f64);
    let inv_phi = c::<T>(0.618_033_988_749_894_9);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = flux_derivative(x1, m_ratio);
    let mut f2 = flux_derivative(x2, m_ratio);
    for _ in 0..200 {
        if b - a <= T::epsilon() * (T::one() + a.abs() + b.abs()) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = flux_derivative(x2, m_ratio);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = flux_derivative(x1, m_ratio);
        }
    }
    best.max(f1).max(f2)
}

/// C(M) = sup over u in [0, 1] of f'(u). The solver keeps 0 <= u <= 1, so the
/// physical range is the default; use [`c_of_m_on`] for a wider interval.
pub fn c_of_m<T: Real>(m_ratio: T) -> T {
    c_of_m_on(m_ratio, T::zero(), T::one())
}

/// The five-term smallness polynomial
///
/// ```text
/// Sigma(g) = 2g(M+1)/M + 4g(g+M)(M+1)^2/M^2 + 4g^2(g+M)(M+1)^2/M^2
///          + 2g^3(M+1)^3/M^2 + 8g^3(g+M)^2(M+1)^3/M^3
/// ```
///
/// Strictly increasing in g >= 0 with Sigma(0) = 0.
pub fn sigma<T: Real>(gamma: T, m_ratio: T) -> T {
    assert!(m_ratio > T::zero(), "m_ratio must be positive");
    let (g, m) = (gamma, m_ratio);
    let mp1 = m + T::one();
    let two = c::<T>(2.0);
    let four = c::<T>(4.0);
    let eight = c::<T>(8.0);
    two * g * mp1 / m
        + four * g * (g + m) * mp1 * mp1 / (m * m)
        + four * g * g * (g + m) * mp1 * mp1 / (m * m)
        + two * g * g * g * mp1 * mp1 * mp1 / (m * m)
        + eight * g * g * g * (g + m) * (g + m) * mp1 * mp1 * mp1 / (m * m * m)
}

/// The critical cubic 2g(M+1)/M + 2g^2(g+M)(M+1)^2/M^2 whose root defines the
/// alpha = 1 smallness threshold.
fn critical_cubic<T: Real>(gamma: T, m_ratio: T) -> T {
    let (g, m) = (gamma, m_ratio);
    let mp1 = m + T::one();
    let two = c::<T>(2.0);
    two * g * mp1 / m + two * g * g * (g + m) * mp1 * mp1 / (m * m)
}

/// Root of a strictly increasing function; brackets by doubling, then bisects
/// to machine precision.
fn increasing_root<T: Real>(f: impl Fn(T) -> T, target: T) -> T {
    assert!(target > T::zero(), "root target must be positive");
    let mut hi = T::one();
    for _ in 0..200 {
        if f(hi) >= target {
            break;
        }
        hi = hi * c(2.0);
    }
    assert!(f(hi) >= target, "bracketing failed: function never reaches target");
    let mut lo = T::zero();
    for _ in 0..500 {
        let mid = (lo + hi) * c(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * c(0.5)
}

/// The unique positive root gamma* of 2g(M+1)/M + 2g^2(g+M)(M+1)^2/M^2 = nu.
/// Data with sup-norm below any gamma < gamma* falls in the alpha = 1 global
/// regime. Panics on nu <= 0 or m_ratio <= 0.
pub fn gamma_star_critical<T: Real>(nu: T, m_ratio: T) -> T {
    assert!(nu > T::zero(), "nu must be positive");
    assert!(m_ratio > T::zero(), "m_ratio must be positive");
    increasing_root(|g| critical_cubic(g, m_ratio), nu)
}

/// The closed form min{1, (-1 + sqrt(1 + 2(M+1) nu)) / (1+M)}. Reported for
/// reference only: it does not satisfy the critical cubic (see
/// [`threshold_report`]'s consistency flag), so the cubic root stays
/// authoritative.
pub fn gamma_star_explicit<T: Real>(nu: T, m_ratio: T) -> T {
    assert!(nu > T::zero(), "nu must be positive");
    assert!(m_ratio > T::zero(), "m_ratio must be positive");
    let mp1 = m_ratio + T::one();
    let root = (-T::one() + (T::one() + c::<T>(2.0) * mp1 * nu).sqrt()) / mp1;
    root.min(T::one())
}

/// The unique positive root of Sigma(gamma) = nu * Gamma(1+alpha)
/// cos((1-alpha) pi/2) / pi, the supercritical (0 < alpha < 1) smallness
/// threshold. Panics outside nu > 0, 0 < alpha < 1, m_ratio > 0.
pub fn gamma_star_supercritical<T: Real>(nu: T, alpha: T, m_ratio: T) -> T {
    assert!(nu > T::zero(), "nu must be positive");
    assert!(
        alpha > T::zero() && alpha < T::one(),
        "supercritical threshold defined for 0 < alpha < 1"
    );
    assert!(m_ratio > T::zero(), "m_ratio must be positive");
    let target = nu * normalizing_constant(alpha);
    increasing_root(|g| sigma(g, m_ratio), target)
}

/// All three thresholds at one parameter point, plus the flag recording
/// whether the explicit closed form agrees with the cubic root (observed:
/// it does not).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ThresholdReport<T: Real> {
    pub gamma_star_critical: T,
    pub gamma_star_explicit: T,
    /// Defined only for 0 < alpha < 1.
    pub gamma_star_supercritical: Option<T>,
    /// True when explicit and cubic agree to 1e-6 relative.
    pub consistency_flag: bool,
}

/// Compute a [`ThresholdReport`] for nu > 0. The supercritical entry is
/// filled only when alpha lies in (0, 1).
pub fn threshold_report<T: Real>(nu: T, alpha: T, m_ratio: T) -> ThresholdReport<T> {
    let critical = gamma_star_critical(nu, m_ratio);
    let explicit = gamma_star_explicit(nu, m_ratio);
    let supercritical = if alpha > T::zero() && alpha < T::one() {
        Some(gamma_star_supercritical(nu, alpha, m_ratio))
    } else {
        None
    };
    let rel = (critical - explicit).abs() / critical.max(explicit).max(T::epsilon());
    ThresholdReport {
        gamma_star_critical: critical,
        gamma_star_explicit: explicit,
        gamma_star_supercritical: supercritical,
        consistency_flag: rel <= c(1e-6),
    }
}

/// Which global-existence hypothesis to test data against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmallnessCase {
    /// ||u0||_Linf <= gamma (nu > 0, alpha = 1, mu = 0 regime).
    LinfBound,
    /// ||u0||_L2^2 + (1+mu) ||u0||_{H^1/2}^2 + mu ||u0||_{H^(1+beta)/2}^2
    /// <= (1+mu) gamma^2 / C_S^2 (nu > 0, alpha = 1, mu > 0 regime).
    WeightedEnergy,
    /// ||u0||_{W^1,inf} <= gamma (0 < alpha < 1 regime).
    Lipschitz,
}

/// Precomputed data norms consumed by [`smallness_check`]. Squared entries
/// are stored squared because that is how the hypothesis combines them.
#[derive(Clone, Copy, Debug)]
pub struct SmallnessNorms<T: Real> {
    pub linf: T,
    /// max(||u||_inf, ||u_x||_inf).
    pub lipschitz: T,
    pub l2_sq: T,
    /// Squared H^{1/2} seminorm.
    pub hs_half_sq: T,
    /// Squared H^{(1+beta)/2} seminorm.
    pub hs_mixed_sq: T,
}

/// Outcome of one hypothesis evaluation: the measured quantity, the
/// threshold it is compared against, and the signed margin (threshold minus
/// measured; nonnegative means the hypothesis holds).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SmallnessReport<T: Real> {
    pub case: SmallnessCase,
    pub measured: T,
    pub threshold: T,
    pub margin: T,
    pub passes: bool,
}

/// Evaluate one smallness hypothesis literally. `gamma` is the caller's
/// choice of constant (typically a value below the matching threshold from
/// [`threshold_report`]); `sobolev_constant` is the embedding constant C_S,
/// which the source material never pins down numerically, so it is an
/// explicit input.
pub fn smallness_check<T: Real>(
    norms: &SmallnessNorms<T>,
    params: &Parameters<T>,
    gamma: T,
    sobolev_constant: T,
    case: SmallnessCase,
) -> SmallnessReport<T> {
    assert!(gamma > T::zero(), "gamma must be positive");
    assert!(sobolev_constant > T::zero(), "sobolev constant must be positive");
    let (measured, threshold) = match case {
        SmallnessCase::LinfBound => (norms.linf, gamma),
        SmallnessCase::WeightedEnergy => {
            let one_plus_mu = T::one() + params.mu;
            let lhs = norms.l2_sq + one_plus_mu * norms.hs_half_sq + params.mu * norms.hs_mixed_sq;
            (lhs, one_plus_mu * gamma * gamma / (sobolev_constant * sobolev_constant))
        }
        SmallnessCase::Lipschitz => (norms.lipschitz, gamma),
    };
    assert!(measured.is_finite(), "smallness check needs a finite measured norm");
    SmallnessReport {
        case,
        measured,
        threshold,
        margin: threshold - measured,
        passes: measured <= threshold,
    }
}
