mod common;

use common::{bessel_i, bessel_j};
use haar_trace::symbols::{
    build_test_function, chebyshev_t, fourier_coeffs, fourier_coeffs_adaptive, hilbert_transform, TrigPoly,
};
use haar_trace::{group_spec, GroupKind};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn exponential_of_sine_has_bessel_coefficients() {
    // e^{x sin θ} = e^{x cos(θ − π/2)}, so coefficient k is I_k(x)·(−i)^k
    let table = fourier_coeffs(|t| Complex64::new((2.0 * 0.5 * t.sin()).exp(), 0.0), 32).unwrap();
    assert!((table.get(0).re - bessel_i(0, 1.0)).abs() < 1e-14);
    assert!((table.get(0).re - 1.266_065_877_752_008_4).abs() < 1e-12);
    for k in 1..6u32 {
        let expect = Complex64::new(0.0, -1.0).powi(k as i32) * bessel_i(k, 1.0);
        assert!((table.get(k as i64) - expect).norm() < 1e-14, "k={k}");
    }
}

#[test]
fn jacobi_anger_coefficients() {
    // e^{i x cos θ} = Σ i^k J_k(x) e^{ikθ}
    let x = 2.7;
    let table = fourier_coeffs_adaptive(|t| Complex64::from_polar(1.0, x * t.cos()), 16).unwrap();
    for k in 0..12u32 {
        let expect = Complex64::new(0.0, 1.0).powi(k as i32) * bessel_j(k, x);
        assert!((table.get(k as i64) - expect).norm() < 1e-13, "k={k}");
        assert!((table.get(-(k as i64)) - expect).norm() < 1e-13, "k=-{k}");
    }
}

#[test]
fn test_function_traces_match_angle_sums() {
    // g(θ) summed over angles equals ⟨ξ, X⟩ once the means are subtracted
    let spec = group_spec(GroupKind::OOddPlus, 2).unwrap();
    let xi = [0.3, -0.8, 1.1];
    let tf = build_test_function(&spec, &xi).unwrap();
    let angles = [0.4, 2.2];
    let lhs: f64 = angles.iter().map(|&t| tf.g.eval(t)).sum();
    let rhs: f64 = (1..=3)
        .map(|k| {
            let tr: f64 = angles.iter().map(|t| 2.0 * (k as f64 * t).cos()).sum();
            xi[k - 1] * (tr - haar_trace::groups::mean_trace(&spec, k, false)) / (k as f64).sqrt()
        })
        .sum();
    assert!((lhs - rhs).abs() < 1e-14, "{lhs} vs {rhs}");
}

#[test]
fn hilbert_examples() {
    let g = TrigPoly::new(vec![0.0, 2.0], vec![0.0]);
    assert!((hilbert_transform(&g).eval(PI / 2.0) - 2.0).abs() < 1e-15);
    let g = TrigPoly::new(vec![0.0, 0.0, 2f64.sqrt()], vec![0.0, 0.0]);
    assert!((hilbert_transform(&g).eval(PI / 4.0) - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn truncation_grows_with_rho() {
    let spec = group_spec(GroupKind::Sp, 4).unwrap();
    let small = build_test_function(&spec, &[0.1, 0.1]).unwrap().default_truncation();
    let large = build_test_function(&spec, &[30.0, 10.0]).unwrap().default_truncation();
    assert_eq!(small, 64);
    assert!(large > small);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chebyshev_is_cosine_of_multiple_angle(k in 0usize..40, t in 0.0f64..PI) {
        prop_assert!((chebyshev_t(k, t.cos()) - (k as f64 * t).cos()).abs() < 1e-12);
    }

    #[test]
    fn hilbert_is_linear_and_squares_to_minus_identity(
        a in prop::collection::vec(-2.0f64..2.0, 5),
        b in prop::collection::vec(-2.0f64..2.0, 4),
        t in 0.0f64..(2.0 * PI),
    ) {
        let mut cos = a.clone();
        cos[0] = 0.0;
        let p = TrigPoly::new(cos, b);
        let hh = hilbert_transform(&hilbert_transform(&p));
        prop_assert!((hh.eval(t) + p.eval(t)).abs() < 1e-12);
        let double = TrigPoly::new(p.cos_coeffs.iter().map(|c| 2.0 * c).collect(), p.sin_coeffs.iter().map(|c| 2.0 * c).collect());
        prop_assert!((hilbert_transform(&double).eval(t) - 2.0 * hilbert_transform(&p).eval(t)).abs() < 1e-12);
    }

    #[test]
    fn gplus_splits_g(kind_idx in 0usize..5, xi in prop::collection::vec(-2.0f64..2.0, 1..4), t in 0.0f64..(2.0 * PI)) {
        let kind = GroupKind::ALL[kind_idx];
        let spec = group_spec(kind, 3).unwrap();
        let tf = build_test_function(&spec, &xi).unwrap();
        // g = 2 Re g₊ + ĝ₀ and 2 Im g₊ = H g
        let gp = tf.gplus(t);
        prop_assert!((2.0 * gp.re + tf.g.cos_coeffs[0] - tf.g.eval(t)).abs() < 1e-12);
        prop_assert!((2.0 * gp.im - hilbert_transform(&tf.g).eval(t)).abs() < 1e-12);
    }

    #[test]
    fn coefficients_of_real_symbols_are_hermitian(
        c in prop::collection::vec(-1.0f64..1.0, 4),
        s in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let p = TrigPoly::new(c, s);
        let t = fourier_coeffs_adaptive(|th| Complex64::new(p.eval(th).exp(), 0.0), 16).unwrap();
        prop_assert!(t.is_hermitian(1e-14));
        // Parseval against a direct quadrature of |f|²
        let energy: f64 = (-(t.k_max() as i64)..=t.k_max() as i64).map(|k| t.get(k).norm_sqr()).sum();
        let nodes = 512;
        let direct: f64 = (0..nodes).map(|i| (2.0 * p.eval(2.0 * PI * i as f64 / nodes as f64)).exp()).sum::<f64>() / nodes as f64;
        prop_assert!((energy - direct).abs() < 1e-10 * direct);
    }
}
