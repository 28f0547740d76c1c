//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use haar_trace::groups::{eigen_density, mean_trace};
use haar_trace::GroupSpec;
use num_complex::Complex64;
use std::f64::consts::PI;

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Bessel J_k(x) from its power series.
pub fn bessel_j(k: u32, x: f64) -> f64 {
    (0..60u32)
        .map(|s| {
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            sign * (x / 2.0).powi((2 * s + k) as i32) / (factorial(s) * factorial(s + k))
        })
        .sum()
}

/// Modified Bessel I_k(x) from its power series.
pub fn bessel_i(k: u32, x: f64) -> f64 {
    (0..60u32)
        .map(|s| (x / 2.0).powi((2 * s + k) as i32) / (factorial(s) * factorial(s + k)))
        .sum()
}

/// ∫_{[0,π]^q} f(θ) dθ for f even and 2π-periodic in every angle, by the
/// trapezoid rule on the full circle (spectrally accurate for such f).
pub fn torus_integral<F: FnMut(&[f64]) -> Complex64>(q: usize, nodes: usize, mut f: F) -> Complex64 {
    let h = 2.0 * PI / nodes as f64;
    let mut idx = vec![0usize; q];
    let mut theta = vec![0.0; q];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        for (t, &i) in theta.iter_mut().zip(&idx) {
            *t = i as f64 * h;
        }
        total += f(&theta);
        let mut d = 0;
        loop {
            if d == q {
                return total * (h / 2.0).powi(q as i32);
            }
            idx[d] += 1;
            if idx[d] < nodes {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// E f(θ) under the eigenangle density of `spec`, with f even and periodic in each angle.
pub fn weyl_expectation<F: Fn(&[f64]) -> Complex64>(spec: &GroupSpec, nodes: usize, f: F) -> Complex64 {
    let q = spec.num_angles;
    torus_integral(q, nodes, |th| {
        // the density is a polynomial in the cosines, so reflect into [0, π]
        let folded: Vec<f64> = th.iter().map(|t| if *t > PI { 2.0 * PI - t } else { *t }).collect();
        f(&folded) * eigen_density(spec, &folded).unwrap()
    })
}

/// Σᵢ 2cos(kθᵢ), the random-eigenvalue part of Tr Uᵏ.
pub fn random_trace(theta: &[f64], k: usize) -> f64 {
    theta.iter().map(|t| 2.0 * (k as f64 * t).cos()).sum()
}

/// E e^{i⟨ξ, X⟩} by direct integration against the eigenangle density.
pub fn charfn_quadrature(spec: &GroupSpec, xi: &[f64], nodes: usize) -> Complex64 {
    let means: Vec<f64> = (1..=xi.len()).map(|k| mean_trace(spec, k, false)).collect();
    weyl_expectation(spec, nodes, |th| {
        let s: f64 = xi
            .iter()
            .enumerate()
            .map(|(i, x)| x * (random_trace(th, i + 1) - means[i]) / ((i + 1) as f64).sqrt())
            .sum();
        Complex64::from_polar(1.0, s)
    })
}
