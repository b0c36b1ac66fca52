//! Uniform periodic grid on [-pi, pi) with cached FFT plans.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::scalar::{c, Real};

/// Uniform collocation grid of `n` nodes on the fixed domain [-pi, pi),
/// node j at x_j = -pi + j * spacing, spacing = 2*pi/n.
///
/// Wavenumbers follow the FFT layout `[0, 1, ..., n/2, -n/2+1, ..., -1]`;
/// the Nyquist mode n/2 exists but every derivative-like operator zeroes it.
/// Forward/inverse FFT plans are built once and shared by clones.
pub struct Grid<T: Real> {
    n: usize,
    spacing: T,
    nodes: Arc<Vec<T>>,
    wavenumbers: Arc<Vec<i64>>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Grid<T> {
    /// Build a grid with `n` nodes. `n` must be a power of two, at least 8.
    pub fn new(n: usize) -> Self {
        assert!(n >= 8 && n.is_power_of_two(), "grid size must be a power of two >= 8, got {n}");
        let spacing = c::<T>(2.0) * T::PI() / c::<T>(n as f64);
        let nodes = (0..n).map(|j| -T::PI() + spacing * c::<T>(j as f64)).collect();
        let half = (n / 2) as i64;
        let wavenumbers = (0..n as i64).map(|i| if i <= half { i } else { i - n as i64 }).collect();
        let mut planner = FftPlanner::new();
        Self {
            n,
            spacing,
            nodes: Arc::new(nodes),
            wavenumbers: Arc::new(wavenumbers),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Number of collocation nodes.
    pub fn n_nodes(&self) -> usize {
        self.n
    }

    /// Node spacing 2*pi/n (also the quadrature weight of every node).
    pub fn node_spacing(&self) -> T {
        self.spacing
    }

    /// Node coordinates x_j = -pi + j * spacing.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Integer wavenumbers in FFT layout.
    pub fn wavenumbers(&self) -> &[i64] {
        &self.wavenumbers
    }

    /// Dealiasing cutoff of the 2/3 rule: modes with |k| > n/3 are dropped.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    pub(crate) fn forward_plan(&self) -> &Arc<dyn Fft<T>> {
        &self.forward
    }

    pub(crate) fn inverse_plan(&self) -> &Arc<dyn Fft<T>> {
        &self.inverse
    }
}

impl<T: Real> Clone for Grid<T> {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            spacing: self.spacing,
            nodes: Arc::clone(&self.nodes),
            wavenumbers: Arc::clone(&self.wavenumbers),
            forward: Arc::clone(&self.forward),
            inverse: Arc::clone(&self.inverse),
        }
    }
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl<T: Real> std::fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid").field("n", &self.n).finish()
    }
}
