//! Discrete norms and seminorms: spectral Sobolev, integral W^{s,1}, and
//! pointwise Hoelder, all with the periodic metric of [-pi, pi).

use crate::field::SpectralField;
use crate::scalar::{c, Real};

/// Validated seminorm order. Construction rejects non-finite or absurdly
/// large orders; the narrow windows (0 < s < 1 for W^{s,1}, 0 < delta <= 1
/// for Hoelder) are enforced by the operations that need them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeminormOrder<T: Real>(T);

impl<T: Real> SeminormOrder<T> {
    /// Wrap an order; panics outside [-8, 8] or on non-finite input.
    pub fn new(s: T) -> Self {
        assert!(s.is_finite() && s.abs() <= c(8.0), "seminorm order out of range");
        Self(s)
    }

    /// The wrapped order.
    pub fn value(self) -> T {
        self.0
    }
}

/// Default Hoelder-seminorm stride: keeps the pair scan at or below 512^2
/// pairs (stride 1 for n <= 512).
pub fn default_holder_stride(n: usize) -> usize {
    n.div_ceil(512).max(1)
}

impl<T: Real> SpectralField<T> {
    /// Squared L2 norm, integral convention: ||u||^2 = 2 pi sum_k |u_k|^2
    /// (Parseval; agrees with the nodal quadrature h * sum u_j^2 to round-off).
    pub fn l2_norm_sq(&self) -> T {
        let two_pi = c::<T>(2.0) * T::PI();
        two_pi * self.modal().iter().map(|v| v.norm_sqr()).sum()
    }

    /// L1 norm by nodal quadrature, h * sum |u_j|.
    pub fn l1_norm(&self) -> T {
        self.grid().node_spacing() * self.nodal().iter().map(|u| u.abs()).sum()
    }

    /// Homogeneous Sobolev seminorm ||u||_{H^s} = (2 pi sum_{k!=0} |k|^{2s} |u_k|^2)^{1/2}.
    /// For cos(x) this is sqrt(pi) at every order s.
    pub fn sobolev_seminorm(&self, s: SeminormOrder<T>) -> T {
        let two = c::<T>(2.0);
        let sum: T = self
            .grid()
            .wavenumbers()
            .iter()
            .zip(self.modal())
            .filter(|(&k, _)| k != 0)
            .map(|(&k, v)| c::<T>(k.unsigned_abs() as f64).powf(two * s.value()) * v.norm_sqr())
            .sum();
        (two * T::PI() * sum).sqrt()
    }

    /// W^{s,1} double-integral seminorm for 0 < s < 1:
    ///
    /// ```text
    /// integral integral |u(x)-u(y)| / dist(x,y)^{1+s} dx dy
    /// ```
    ///
    /// by the midpoint rule over node pairs. The diagonal cells (where the
    /// midpoint distance vanishes) are integrated in closed form against the
    /// local linear model |u(x)-u(y)| ~ |u'(x_i)| |x-y|, contributing
    /// 2 h^{2-s} / ((1-s)(2-s)) per unit |u'|.
    pub fn w_s1_seminorm(&self, s: SeminormOrder<T>) -> T {
        let s = s.value();
        assert!(s > T::zero() && s < T::one(), "W^{{s,1}} seminorm needs 0 < s < 1");
        let grid = self.grid();
        let n = grid.n_nodes();
        let h = grid.node_spacing();
        let u = self.nodal();

        let mut dist_pow = vec![T::zero(); n / 2 + 1];
        for (m, slot) in dist_pow.iter_mut().enumerate().skip(1) {
            *slot = (h * c::<T>(m as f64)).powf(-T::one() - s);
        }

        let mut off_diag = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                let m = (j - i).min(n - (j - i));
                off_diag = off_diag + (u[i] - u[j]).abs() * dist_pow[m];
            }
        }
        off_diag = c::<T>(2.0) * off_diag * h * h;

        let du = self.derivative();
        let slope_sum: T = du.nodal().iter().map(|g| g.abs()).sum();
        let diag = slope_sum * c::<T>(2.0) * h.powf(c::<T>(2.0) - s)
            / ((T::one() - s) * (c::<T>(2.0) - s));

        off_diag + diag
    }

    /// Hoelder seminorm sup |u(x)-u(y)| / dist(x,y)^delta, 0 < delta <= 1,
    /// scanned over node pairs with the given index stride. The global
    /// extremum nodes are always included in the scan so the subsample never
    /// misses the peak values themselves.
    pub fn holder_seminorm(&self, delta: SeminormOrder<T>, stride: usize) -> T {
        let delta = delta.value();
        assert!(delta > T::zero() && delta <= T::one(), "Hoelder seminorm needs 0 < delta <= 1");
        assert!(stride >= 1, "stride must be positive");
        let grid = self.grid();
        let n = grid.n_nodes();
        let h = grid.node_spacing();
        let u = self.nodal();

        let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
        let argmax = (0..n).max_by(|&a, &b| u[a].partial_cmp(&u[b]).unwrap()).unwrap();
        let argmin = (0..n).min_by(|&a, &b| u[a].partial_cmp(&u[b]).unwrap()).unwrap();
        for extra in [argmax, argmin] {
            if !idx.contains(&extra) {
                idx.push(extra);
            }
        }

        let mut best = T::zero();
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                let m = if i < j { (j - i).min(n - (j - i)) } else { (i - j).min(n - (i - j)) };
                if m == 0 {
                    continue;
                }
                let d = h * c::<T>(m as f64);
                let q = (u[i] - u[j]).abs() / d.powf(delta);
                best = best.max(q);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn cosine_sobolev_is_sqrt_pi_at_every_order() {
        let f = SpectralField::from_fn(Grid::<f64>::new(256), |x| x.cos());
        for s in [-1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 2.0] {
            let v = f.sobolev_seminorm(SeminormOrder::new(s));
            assert!(
                (v - std::f64::consts::PI.sqrt()).abs() < 1e-12,
                "s={s}: {v}"
            );
        }
    }

    #[test]
    fn mixed_cosine_sobolev_frozen_value() {
        // u = cos(2x) + cos(3x), s = 1/2: 2 pi (2 * 1/4 + 2 * 1/4 ...) with
        // |k|^{2s} = |k| gives 2 pi (2 + 3)/2 = 5 pi, seminorm sqrt(5 pi).
        let f = SpectralField::from_fn(Grid::<f64>::new(256), |x| (2.0 * x).cos() + (3.0 * x).cos());
        let v = f.sobolev_seminorm(SeminormOrder::new(0.5));
        assert!((v - (5.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12, "{v}");
    }

    #[test]
    fn parseval_l2_matches_nodal_quadrature() {
        let g = Grid::<f64>::new(128);
        let f = SpectralField::from_fn(g.clone(), |x| 0.3 + x.sin() - 0.2 * (4.0 * x).cos());
        let nodal: f64 = f.nodal().iter().map(|u| u * u).sum::<f64>() * g.node_spacing();
        assert!((f.l2_norm_sq() - nodal).abs() < 1e-12 * nodal.max(1.0));
    }

    #[test]
    fn holder_dense_scan_matches_brute_force() {
        let g = Grid::<f64>::new(512);
        let f = SpectralField::from_fn(g.clone(), |x| x.cos());
        let h = g.node_spacing();
        let u = f.nodal();
        let n = u.len();
        let mut brute = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let m = (j - i).min(n - (j - i));
                let d = h * m as f64;
                brute = brute.max((u[i] - u[j]).abs() / d.powf(0.5));
            }
        }
        let v = f.holder_seminorm(SeminormOrder::new(0.5), 1);
        assert!((v - brute).abs() <= 1e-15 * brute, "{v} vs {brute}");
    }
}
