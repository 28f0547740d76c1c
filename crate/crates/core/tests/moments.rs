mod common;

use common::{random_trace, weyl_expectation};
use haar_trace::moments::{
    gaussian_side_moment, group_moment_exact, moment_identity_check, partitions, verify_exponential_formula,
    ContourOptions, Multiplicities, Partition,
};
use haar_trace::{group_spec, GroupKind};
use num_complex::Complex64;
use proptest::prelude::*;

fn mult(pairs: &[(usize, usize)]) -> Multiplicities {
    pairs.iter().cloned().collect()
}

/// E Π_j (Σᵢ 2cos jθᵢ)^{m_j} by direct integration.
fn moment_quadrature(kind: GroupKind, n: usize, m: &Multiplicities) -> f64 {
    let spec = group_spec(kind, n).unwrap();
    weyl_expectation(&spec, 48, |th| {
        let v: f64 = m.iter().map(|(&j, &p)| random_trace(th, j).powi(p as i32)).product();
        Complex64::new(v, 0.0)
    })
    .re
}

#[test]
fn partition_counts_follow_euler() {
    let p = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176];
    for (w, &count) in p.iter().enumerate() {
        assert_eq!(partitions(w).unwrap().len(), count, "p({w})");
    }
}

#[test]
fn inverse_symmetry_factors_sum_to_one() {
    // Σ_{λ ⊢ n} 1/z_λ = 1 (cycle types of Sₙ weighted by class size / n!)
    for w in 0..=12 {
        let s: f64 = partitions(w).unwrap().iter().map(|l| 1.0 / l.z()).sum();
        assert!((s - 1.0).abs() < 1e-13, "n={w}");
    }
    assert_eq!(Partition::from_parts(vec![3, 1, 1]).z(), 6.0);
}

#[test]
fn exact_moments_match_quadrature_inside_and_outside_the_range() {
    type Case<'a> = (GroupKind, usize, &'a [(usize, usize)]);
    let cases: [Case; 8] = [
        (GroupKind::OEvenPlus, 1, &[(1, 2)]),
        (GroupKind::OEvenPlus, 2, &[(1, 2), (2, 1)]),
        (GroupKind::OEvenMinus, 3, &[(1, 3)]),
        (GroupKind::OOddPlus, 2, &[(2, 2)]),
        (GroupKind::OOddMinus, 2, &[(1, 1), (3, 1)]),
        (GroupKind::Sp, 2, &[(2, 2)]),
        (GroupKind::Sp, 1, &[(1, 4)]),
        (GroupKind::Sp, 3, &[(1, 2), (2, 2)]),
    ];
    for (kind, n, pairs) in cases {
        let m = mult(pairs);
        let spec = group_spec(kind, n).unwrap();
        let exact = group_moment_exact(&spec, &m, ContourOptions::default()).unwrap();
        let quad = moment_quadrature(kind, n, &m);
        assert!(
            (exact - quad).abs() < 1e-8 * quad.abs().max(1.0),
            "{kind} n={n} {pairs:?}: {exact} vs {quad}"
        );
    }
}

#[test]
fn range_edge_of_o2_plus() {
    let spec = group_spec(GroupKind::OEvenPlus, 1).unwrap();
    let r = moment_identity_check(&spec, 2).unwrap();
    let e = r.entries.iter().find(|e| e.multiplicities == vec![(1, 2)]).unwrap();
    assert!(!e.in_range);
    assert!((e.group - 2.0).abs() < 1e-9 && (e.gaussian - 1.0).abs() < 1e-15);
    assert_eq!(r.first_mismatch_weight, Some(2));
}

#[test]
fn in_range_reports_pass() {
    let r = moment_identity_check(&group_spec(GroupKind::Sp, 2).unwrap(), 5).unwrap();
    assert!(r.all_pass());
    assert!(r.entries.iter().filter(|e| e.in_range).all(|e| e.rel_diff < 1e-7));
    let r = moment_identity_check(&group_spec(GroupKind::OOddPlus, 2).unwrap(), 4).unwrap();
    assert!(r.entries.iter().all(|e| e.in_range && e.pass));
}

#[test]
fn gaussian_side_examples() {
    let sp = group_spec(GroupKind::Sp, 2).unwrap();
    assert!((gaussian_side_moment(&sp, &mult(&[(2, 2)])).value - 3.0).abs() < 1e-14);
    let om = group_spec(GroupKind::OOddMinus, 1).unwrap();
    assert!((gaussian_side_moment(&om, &mult(&[(1, 1)])).value - 1.0).abs() < 1e-14);
}

#[test]
fn deterministic_eigenvalues_can_be_included() {
    // O(5)⁺ has a forced eigenvalue 1, so Tr U = 1 + random part
    let spec = group_spec(GroupKind::OOddPlus, 2).unwrap();
    let opts = ContourOptions {
        include_deterministic: true,
        ..ContourOptions::default()
    };
    let with = group_moment_exact(&spec, &mult(&[(1, 2)]), opts).unwrap();
    let random_sq = moment_quadrature(GroupKind::OOddPlus, 2, &mult(&[(1, 2)]));
    let random = moment_quadrature(GroupKind::OOddPlus, 2, &mult(&[(1, 1)]));
    assert!((with - (random_sq + 2.0 * random + 1.0)).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exponential_formula_holds(g in prop::collection::vec(-1.0f64..1.0, 1..9)) {
        prop_assert!(verify_exponential_formula(&g, 0.5).unwrap() <= 1e-9);
    }

    #[test]
    fn in_range_moments_are_gaussian(kind_idx in 0usize..5, n in 1usize..4, parts in prop::collection::vec(1usize..4, 1..4)) {
        let kind = GroupKind::ALL[kind_idx];
        let spec = group_spec(kind, n.max(kind.min_n())).unwrap();
        let p = Partition::from_parts(parts);
        prop_assume!(p.parts.iter().sum::<usize>() <= spec.moment_range());
        let exact = group_moment_exact(&spec, &p.multiplicities, ContourOptions::default()).unwrap();
        let gauss = gaussian_side_moment(&spec, &p.multiplicities).value;
        prop_assert!((exact - gauss).abs() <= 1e-7 * gauss.abs().max(1.0), "{} vs {}", exact, gauss);
    }
}
