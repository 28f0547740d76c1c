//! Thin wrappers around `libm` plus a few log-space helpers.

use std::f64::consts::PI;

/// Natural log of Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// ln(k!)
pub fn ln_factorial(k: u64) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// Upper Gaussian tail P(Z > x).
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// log(Σ exp(xᵢ)), robust to large magnitudes.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Lower and upper Stirling brackets for ln Γ(x+1):
/// √(2π) x^{x+1/2} e^{-x} and e^{1/(12x)} times that.
pub fn ln_stirling_bracket(x: f64) -> (f64, f64) {
    let lower = 0.5 * (2.0 * PI).ln() + (x + 0.5) * x.ln() - x;
    (lower, lower + 1.0 / (12.0 * x))
}

/// (2k-1)!! for k >= 0, as a float (1 for k = 0).
pub fn double_factorial_odd(k: u32) -> f64 {
    (1..=k).map(|i| (2 * i - 1) as f64).product()
}

/// Binomial coefficient as a float.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Volume of the unit ball in ℝ^m, in log form.
pub fn ln_unit_ball_volume(m: f64) -> f64 {
    0.5 * m * PI.ln() - ln_gamma(0.5 * m + 1.0)
}
