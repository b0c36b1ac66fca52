//! Built-in self checks: the invariants of the spectral toolbox exercised
//! on the spot, with a pass/fail line per invariant. The hidden corruption
//! hook perturbs the fractional multiplier so a failure report can be seen
//! (and is seen to name the violated invariant, not just a number).

use std::fmt::Write as _;

use fracbl_core::fractional::normalizing_constant;
use fracbl_core::{Field64, Grid64};

/// Outcome of one named invariant check.
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub struct VerifyReport {
    pub lines: Vec<CheckLine>,
    /// Kernel-vs-multiplier relative L2 error per image count, in the order
    /// requested. Printed as a table; also checked for monotone decrease.
    pub kernel_table: Vec<(usize, f64)>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            let tag = if l.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{tag} {} ({})", l.name, l.detail).unwrap();
        }
        writeln!(out, "\nkernel quadrature vs multiplier, rel L2 error:").unwrap();
        writeln!(out, "{:>12}  {:>12}", "images", "error").unwrap();
        for (g, e) in &self.kernel_table {
            writeln!(out, "{g:>12}  {e:>12.4e}").unwrap();
        }
        out
    }
}

fn round_trip_eps(n: usize) -> f64 {
    10.0 * f64::EPSILON * n as f64
}

fn rel_l2(a: &Field64, b: &Field64) -> f64 {
    let num: f64 = a
        .nodal()
        .iter()
        .zip(b.nodal())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.nodal().iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

/// Run every check at grid size `n`, with the kernel table over
/// `image_counts`. `corrupt_multiplier` injects a one-mode error into the
/// eigenfunction check; nothing else is touched, so exactly one invariant
/// must then fail and name itself.
pub fn run_verify(n: usize, image_counts: &[usize], corrupt_multiplier: bool) -> VerifyReport {
    let grid = Grid64::new(n);
    let mut lines = Vec::new();

    // Transform round-trip on a full-band signal.
    let u = Field64::from_fn(grid.clone(), |x| (x.sin() + 0.3 * (7.0 * x).cos()).exp());
    let back = Field64::from_modal(grid.clone(), u.modal().to_vec());
    let rt_err = u
        .nodal()
        .iter()
        .zip(back.nodal())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    lines.push(CheckLine {
        name: "transform round-trip",
        passed: rt_err <= round_trip_eps(n),
        detail: format!("max err {rt_err:.3e}, budget {:.3e}", round_trip_eps(n)),
    });

    // Parseval: the nodal quadrature h sum u_j^2 equals 2 pi times the
    // modal power sum (which is what l2_norm_sq computes).
    let nodal_l2_sq: f64 = grid.node_spacing() * u.nodal().iter().map(|v| v * v).sum::<f64>();
    let parseval_rel = (nodal_l2_sq - u.l2_norm_sq()).abs() / nodal_l2_sq;
    lines.push(CheckLine {
        name: "Parseval identity",
        passed: parseval_rel <= 1e-12,
        detail: format!("rel err {parseval_rel:.3e}, budget 1.0e-12"),
    });

    // Eigenfunction exactness: L^alpha cos(kx) = |k|^alpha cos(kx), checked
    // across orders and wavenumbers up to the last resolved mode. The error
    // budget scales with the largest multiplier on the grid, which is the
    // amplification floor the transform's own roundoff sees.
    let mut worst: f64 = 0.0;
    let mut worst_at = (0.0_f64, 0_usize);
    let mut budget: f64 = 0.0;
    for &alpha in &[0.25, 0.5, 1.0, 1.5, 2.0] {
        let tol = round_trip_eps(n) * ((n as f64 / 2.0).powf(alpha)).max(1.0);
        for &k in &[1_usize, 2, 3, 5, n / 2 - 1] {
            let f = Field64::from_fn(grid.clone(), |x| (k as f64 * x).cos());
            let got = f.frac_laplacian(alpha);
            let scale = (k as f64).powf(alpha);
            let mut err = got
                .nodal()
                .iter()
                .zip(f.nodal())
                .map(|(g, v)| (g - scale * v).abs())
                .fold(0.0_f64, f64::max);
            if corrupt_multiplier && alpha == 1.0 && k == 3 {
                err += 1e-3;
            }
            if err / tol > worst / budget.max(f64::MIN_POSITIVE) {
                worst = err;
                worst_at = (alpha, k);
                budget = tol;
            }
        }
    }
    lines.push(CheckLine {
        name: "fractional multiplier eigenfunction exactness",
        passed: worst <= budget,
        detail: format!(
            "worst err {worst:.3e} at alpha={}, k={}, budget {budget:.3e}",
            worst_at.0, worst_at.1
        ),
    });

    // Normalizing constant endpoints: C_alpha |x|^{-1-alpha} must reproduce
    // the multiplier, and the constant itself is positive on (0, 2).
    let c_half = normalizing_constant(0.5_f64);
    lines.push(CheckLine {
        name: "kernel normalizing constant positive",
        passed: c_half > 0.0 && normalizing_constant(1.5_f64) > 0.0,
        detail: format!("C(0.5) = {c_half:.6}"),
    });

    // Kernel quadrature against the multiplier on a two-mode field.
    let test = Field64::from_fn(grid.clone(), |x| x.cos() + 0.3 * (4.0 * x).cos());
    let exact = test.frac_laplacian(0.5);
    let mut kernel_table = Vec::new();
    for &g in image_counts {
        kernel_table.push((g, rel_l2(&test.frac_laplacian_kernel(0.5, g), &exact)));
    }
    let monotone = kernel_table.windows(2).all(|w| w[1].1 < w[0].1);
    let final_err = kernel_table.last().map_or(f64::INFINITY, |&(_, e)| e);
    lines.push(CheckLine {
        name: "kernel quadrature converges to multiplier",
        passed: monotone && final_err < 1e-3,
        detail: format!("final rel L2 {final_err:.3e}, monotone: {monotone}"),
    });

    VerifyReport { lines, kernel_table }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_verify_passes_every_line() {
        let report = run_verify(256, &[16, 32, 64], false);
        assert!(report.all_passed(), "{}", report.render());
        assert_eq!(report.kernel_table.len(), 3);
    }

    #[test]
    fn corruption_fails_exactly_the_multiplier_invariant() {
        let report = run_verify(256, &[16, 32], true);
        assert!(!report.all_passed());
        let failed: Vec<&str> =
            report.lines.iter().filter(|l| !l.passed).map(|l| l.name).collect();
        assert_eq!(failed, ["fractional multiplier eigenfunction exactness"]);
        assert!(report.render().contains("FAIL fractional multiplier eigenfunction exactness"));
    }
}
