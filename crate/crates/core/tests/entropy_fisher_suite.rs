//! Randomized verification of the two entropy-Fisher inequalities: for
//! positive data u and 0 < alpha < 2,
//!
//! ```text
//! ||u||^2_{W^{alpha/2-eps,1}} <= 2 C(eps)/C_alpha ||u||_L1 int (L^alpha u) log u
//! ||u||^2_{H^{alpha/2}}      <= 4/C_alpha ||u||_inf  int (L^alpha u) log u
//! ```
//!
//! with C(eps) = pi^{2 eps}/eps. One hundred seeded positive trig
//! polynomials, three orders each; every evaluation must satisfy both.

use fracbl_core::diagnostics::{
    entropy_fisher_check, random_positive_trig_poly, EntropyGuard, FisherKind,
};
use fracbl_core::Grid64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn both_inequalities_hold_on_100_seeded_fields_times_3_orders() {
    let grid = Grid64::new(256);
    let guard = EntropyGuard::default();
    let mut passes = 0usize;
    let mut total = 0usize;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = random_positive_trig_poly(grid.clone(), &mut rng, 32, 0.1);
        assert!(field.nodal_min() >= 0.1 - 1e-12, "seed {seed} floor violated");
        for &alpha in &[0.5f64, 1.0, 1.5] {
            let eps = alpha / 4.0;
            let report = entropy_fisher_check(&field, alpha, eps, FisherKind::I1, &guard)
                .expect("guard admits positive field");
            total += 1;
            if report.passed {
                passes += 1;
            } else {
                panic!(
                    "seed {seed} alpha {alpha}: w {:.6e} <= {:.6e}? h {:.6e} <= {:.6e}?",
                    report.w_side, report.w_bound, report.h_side, report.h_bound
                );
            }
        }
    }
    assert_eq!((passes, total), (300, 300));
}

#[test]
fn suite_is_deterministic_per_seed() {
    let grid = Grid64::new(256);
    let guard = EntropyGuard::default();
    let once = {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let f = random_positive_trig_poly(grid.clone(), &mut rng, 32, 0.1);
        entropy_fisher_check(&f, 1.0, 0.25, FisherKind::I1, &guard).unwrap()
    };
    let again = {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let f = random_positive_trig_poly(grid.clone(), &mut rng, 32, 0.1);
        entropy_fisher_check(&f, 1.0, 0.25, FisherKind::I1, &guard).unwrap()
    };
    assert_eq!(once.w_side, again.w_side);
    assert_eq!(once.w_bound, again.w_bound);
    assert_eq!(once.h_side, again.h_side);
    assert_eq!(once.h_bound, again.h_bound);
}

#[test]
fn second_fisher_form_also_bounds_on_a_sample() {
    // The log(1+u) variant gives a valid (weaker) dissipation functional on
    // positive data; spot-check the same report structure with it.
    let grid = Grid64::new(256);
    let guard = EntropyGuard::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let field = random_positive_trig_poly(grid, &mut rng, 16, 0.1);
    let report = entropy_fisher_check(&field, 1.0, 0.25, FisherKind::I2, &guard)
        .expect("guard admits positive field");
    assert!(report.w_side.is_finite() && report.h_side.is_finite());
}
