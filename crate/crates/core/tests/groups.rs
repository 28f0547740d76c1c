mod common;

use common::{random_trace, weyl_expectation};
use haar_trace::groups::{eigen_density, eta, mean_trace};
use haar_trace::{group_spec, GroupKind};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn one(_: &[f64]) -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[test]
fn every_density_is_a_probability_density() {
    for kind in GroupKind::ALL {
        for n in kind.min_n()..=kind.min_n() + 2 {
            let spec = group_spec(kind, n).unwrap();
            let total = weyl_expectation(&spec, 32, one);
            assert!((total - 1.0).norm() < 1e-12, "{kind} n={n}: {total}");
        }
    }
}

#[test]
fn single_angle_densities_match_closed_forms() {
    // ρ for one random angle, written out by hand for each Jacobi weight
    type Case = (GroupKind, usize, fn(f64) -> f64);
    let closed: [Case; 5] = [
        (GroupKind::OEvenPlus, 1, |_| 1.0 / PI),
        (GroupKind::OEvenMinus, 2, |t| 2.0 / PI * t.sin().powi(2)),
        (GroupKind::OOddPlus, 1, |t| 2.0 / PI * (t / 2.0).sin().powi(2)),
        (GroupKind::OOddMinus, 1, |t| 2.0 / PI * (t / 2.0).cos().powi(2)),
        (GroupKind::Sp, 1, |t| 2.0 / PI * t.sin().powi(2)),
    ];
    for (kind, n, rho) in closed {
        let spec = group_spec(kind, n).unwrap();
        for i in 0..50 {
            let t = PI * (i as f64 + 0.25) / 50.0;
            assert!((eigen_density(&spec, &[t]).unwrap() - rho(t)).abs() < 1e-14, "{kind}");
        }
    }
}

/// Within the moment range the Gaussian-side mean is the exact mean.
#[test]
fn mean_trace_matches_weyl_integral() {
    for kind in GroupKind::ALL {
        for n in kind.min_n()..=kind.min_n() + 1 {
            let spec = group_spec(kind, n).unwrap();
            for k in 1..=spec.moment_range().min(5) {
                let v = weyl_expectation(&spec, 32, |th| Complex64::new(random_trace(th, k), 0.0));
                let expect = mean_trace(&spec, k, false);
                assert!(
                    (v.re - expect).abs() < 1e-12,
                    "{kind} n={n} k={k}: {} vs {expect}",
                    v.re
                );
            }
        }
    }
}

#[test]
fn mean_of_square_differs_past_the_range() {
    let spec = group_spec(GroupKind::OEvenPlus, 1).unwrap();
    let v = weyl_expectation(&spec, 32, |th| Complex64::new(random_trace(th, 2), 0.0));
    assert!(v.re.abs() < 1e-14);
    assert_eq!(mean_trace(&spec, 2, false), 1.0);
}

#[test]
fn deterministic_eigenvalues_shift_the_mean() {
    let spec = group_spec(GroupKind::OEvenMinus, 3).unwrap();
    for k in 1..=4 {
        let forced = 1.0 + if k % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(mean_trace(&spec, k, true), mean_trace(&spec, k, false) + forced);
    }
}

#[test]
fn eta_is_even_indicator() {
    for j in 1..40 {
        assert_eq!(eta(j), i32::from(j % 2 == 0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_is_symmetric_and_nonnegative(
        kind_idx in 0usize..5,
        angles in prop::collection::vec(0.0f64..PI, 3),
    ) {
        let kind = GroupKind::ALL[kind_idx];
        let n = if kind == GroupKind::OEvenMinus { 4 } else { 3 };
        let spec = group_spec(kind, n).unwrap();
        let a = eigen_density(&spec, &angles).unwrap();
        let swapped = [angles[2], angles[0], angles[1]];
        let b = eigen_density(&spec, &swapped).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn density_vanishes_on_collisions(kind_idx in 0usize..5, t in 0.01f64..3.1, s in 0.01f64..3.1) {
        let kind = GroupKind::ALL[kind_idx];
        let n = if kind == GroupKind::OEvenMinus { 4 } else { 3 };
        let spec = group_spec(kind, n).unwrap();
        prop_assert!(eigen_density(&spec, &[t, t, s]).unwrap().abs() < 1e-12);
    }
}
