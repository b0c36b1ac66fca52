//! Scalar abstraction: the one trait every numerical routine is generic over.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type usable everywhere in this crate (f32 or f64).
///
/// Bundles the num-traits float surface with the FFT requirements so that
/// grids, fields, operators and diagnostics are written once. Stated
/// tolerances throughout the crate assume f64.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + rustfft::FftNum
    + std::iter::Sum<Self>
    + std::fmt::Display
    + std::fmt::LowerExp
    + serde::Serialize
    + serde::de::DeserializeOwned
{
    /// Gamma function, evaluated through f64 (full f64 precision; f32 loses
    /// nothing since its mantissa is shorter).
    fn gamma(self) -> Self {
        c(libm::tgamma(self.to_f64().unwrap()))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for converting an f64 literal into the working scalar type.
pub fn c<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_matches_closed_forms() {
        // Gamma(1) = Gamma(2) = 1, Gamma(3) = 2, Gamma(1/2) = sqrt(pi),
        // Gamma(3/2) = sqrt(pi)/2.
        assert!((Real::gamma(1.0f64) - 1.0).abs() < 1e-14);
        assert!((Real::gamma(2.0f64) - 1.0).abs() < 1e-14);
        assert!((Real::gamma(3.0f64) - 2.0).abs() < 1e-13);
        assert!((Real::gamma(0.5f64) - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((Real::gamma(1.5f64) - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn gamma_in_f32() {
        assert!((Real::gamma(1.5f32) - (std::f32::consts::PI.sqrt() / 2.0)).abs() < 1e-6);
    }
}
