//! Real-valued periodic fields with lazily synchronized nodal and modal views.

use std::sync::OnceLock;

use num_complex::Complex;

use crate::grid::Grid;
use crate::scalar::{c, Real};

/// A real field on a [`Grid`], stored as nodal samples, Fourier coefficients,
/// or both. Whichever view is missing is computed on first access and cached;
/// the cache is idempotent and race-safe (`OnceLock`).
///
/// Modal coefficients are with respect to the basis e^{ikx} on [-pi, pi):
/// u(x_j) = sum_k modal[i(k)] e^{i k x_j}, with k in the FFT layout of
/// [`Grid::wavenumbers`]. A constant field c has exactly modal[0] = c;
/// cos(3x) has exactly modal support {+3, -3} with coefficients 1/2.
///
/// Synthesis takes the real part; constructing from non-Hermitian modal data
/// silently discards the imaginary remainder at the nodes.
#[derive(Clone)]
pub struct SpectralField<T: Real> {
    grid: Grid<T>,
    nodal: OnceLock<Vec<T>>,
    modal: OnceLock<Vec<Complex<T>>>,
}

impl<T: Real> std::fmt::Debug for SpectralField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralField")
            .field("n", &self.grid.n_nodes())
            .field("has_nodal", &self.nodal.get().is_some())
            .field("has_modal", &self.modal.get().is_some())
            .finish()
    }
}

impl<T: Real> SpectralField<T> {
    /// Field from nodal samples (length must equal the grid size).
    pub fn from_nodal(grid: Grid<T>, values: Vec<T>) -> Self {
        assert_eq!(values.len(), grid.n_nodes(), "nodal length mismatch");
        let nodal = OnceLock::new();
        nodal.set(values).ok();
        Self { grid, nodal, modal: OnceLock::new() }
    }

    /// Field from modal coefficients in FFT layout (length must equal the grid size).
    pub fn from_modal(grid: Grid<T>, coefficients: Vec<Complex<T>>) -> Self {
        assert_eq!(coefficients.len(), grid.n_nodes(), "modal length mismatch");
        let modal = OnceLock::new();
        modal.set(coefficients).ok();
        Self { grid, nodal: OnceLock::new(), modal }
    }

    /// Field sampled from a function of x.
    pub fn from_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::from_nodal(grid, values)
    }

    /// The zero field.
    pub fn zeros(grid: Grid<T>) -> Self {
        let n = grid.n_nodes();
        Self::from_nodal(grid, vec![T::zero(); n])
    }

    /// Grid this field lives on.
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// Nodal samples, synthesizing from modal once if needed.
    pub fn nodal(&self) -> &[T] {
        self.nodal.get_or_init(|| {
            let modal = self.modal.get().expect("field holds at least one view");
            let mut buf: Vec<Complex<T>> = modal
                .iter()
                .enumerate()
                .map(|(i, &v)| if i & 1 == 1 { -v } else { v })
                .collect();
            self.grid.inverse_plan().process(&mut buf);
            buf.iter().map(|v| v.re).collect()
        })
    }

    /// Modal coefficients, transforming from nodal once if needed.
    pub fn modal(&self) -> &[Complex<T>] {
        self.modal.get_or_init(|| {
            let nodal = self.nodal.get().expect("field holds at least one view");
            let mut buf: Vec<Complex<T>> =
                nodal.iter().map(|&u| Complex::new(u, T::zero())).collect();
            self.grid.forward_plan().process(&mut buf);
            let inv_n = T::one() / c::<T>(self.grid.n_nodes() as f64);
            // The grid starts at -pi, not 0; e^{-ik(x+pi)} sampling leaves a
            // (-1)^k phase relative to the e^{ikx} basis ((-1)^k = (-1)^i for
            // even n in FFT layout).
            buf.iter()
                .enumerate()
                .map(|(i, &v)| if i & 1 == 1 { -v * inv_n } else { v * inv_n })
                .collect()
        })
    }

    /// Force both views to exist (transforms at most once per view).
    pub fn ensure_both(&self) -> &Self {
        self.nodal();
        self.modal();
        self
    }

    /// New field with coefficients m(k) * modal[k]; the Nyquist mode is zeroed
    /// when `zero_nyquist` is set (every derivative-like operator does).
    pub(crate) fn map_multiplier(
        &self,
        zero_nyquist: bool,
        m: impl Fn(i64) -> Complex<T>,
    ) -> Self {
        let nyquist = (self.grid.n_nodes() / 2) as i64;
        let coeffs = self
            .grid
            .wavenumbers()
            .iter()
            .zip(self.modal())
            .map(|(&k, &v)| {
                if zero_nyquist && k == nyquist {
                    Complex::new(T::zero(), T::zero())
                } else {
                    v * m(k)
                }
            })
            .collect();
        Self::from_modal(self.grid.clone(), coeffs)
    }

    /// Spectral derivative d/dx (multiplier ik, Nyquist zeroed).
    pub fn derivative(&self) -> Self {
        self.map_multiplier(true, |k| Complex::new(T::zero(), c::<T>(k as f64)))
    }

    /// 2/3-rule dealiasing: zeroes every mode with |k| > n/3.
    pub fn dealias(&self) -> Self {
        let cutoff = self.grid.dealias_cutoff();
        self.map_multiplier(false, |k| {
            if k.abs() > cutoff {
                Complex::new(T::zero(), T::zero())
            } else {
                Complex::new(T::one(), T::zero())
            }
        })
    }

    /// Mean value <u> = modal coefficient of k=0 (exactly conserved quantity).
    pub fn mean(&self) -> T {
        self.modal()[0].re
    }

    /// Minimum nodal value.
    pub fn nodal_min(&self) -> T {
        self.nodal().iter().fold(T::infinity(), |a, &b| a.min(b))
    }

    /// Maximum nodal value.
    pub fn nodal_max(&self) -> T {
        self.nodal().iter().fold(T::neg_infinity(), |a, &b| a.max(b))
    }

    /// Maximum absolute nodal value (discrete L-infinity norm).
    pub fn linf_norm(&self) -> T {
        self.nodal().iter().fold(T::zero(), |a, &b| a.max(b.abs()))
    }

    /// Trigonometric interpolation at an arbitrary point (periodic in x).
    ///
    /// Evaluates the modal sum directly; exact at the nodes and for any
    /// band-limited field. The Nyquist component is interpreted as the real
    /// basis function cos((n/2)(x+pi)), the unique real interpolant of its
    /// alternating nodal samples.
    pub fn eval_at(&self, x: T) -> T {
        let n = self.grid.n_nodes();
        let modal = self.modal();
        // Real fields have Hermitian modal data (u_{-k} = conj(u_k)), so the
        // interpolant collapses to u_0 + 2 sum_{k>=1} Re(u_k e^{ikx}); the
        // powers e^{ikx} come from one complex exponential by recurrence.
        let z = Complex::new(x.cos(), x.sin());
        let mut zk = Complex::new(T::one(), T::zero());
        let two = c::<T>(2.0);
        let mut acc = modal[0].re;
        for v in &modal[1..n / 2] {
            zk = zk * z;
            acc = acc + two * (*v * zk).re;
        }
        // Nyquist samples are Re(modal[n/2]) * (-1)^{n/2} * (-1)^j; the real
        // interpolant of an alternating sequence is cos((n/2)(x+pi)).
        let half = c::<T>((n / 2) as f64);
        let nyq_basis = (half * (x + T::PI())).cos();
        let sign = if (n / 2) & 1 == 1 { -T::one() } else { T::one() };
        acc + sign * modal[n / 2].re * nyq_basis
    }
}
