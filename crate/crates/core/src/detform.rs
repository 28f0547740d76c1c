//! Finite-n expectations E[Π ψ(cos θ_j)] as determinants of Fourier data.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::{GroupSpec, Variant};
use crate::linalg::{det, DetValue};
use crate::symbols::{build_test_function, fourier_coeffs_adaptive, FourierTable};

fn require_truncation(symbol: &FourierTable, size: usize) -> Result<()> {
    let need = 2 * size + 2;
    if symbol.k_max() < need {
        return Err(Error::InsufficientTruncation {
            have: symbol.k_max(),
            need,
        });
    }
    Ok(())
}

/// Gram matrix of the normalized Jacobi polynomials against ψ, row-major.
pub fn gram_matrix(variant: Variant, symbol: &FourierTable, size: usize) -> Vec<Complex64> {
    gram_matrix_with(variant, size, |k| symbol.get(k))
}

/// As [`gram_matrix`], reading φ̂_k from a closure.
pub fn gram_matrix_with<F>(variant: Variant, size: usize, coeff: F) -> Vec<Complex64>
where
    F: Fn(i64) -> Complex64,
{
    let c = |k: usize| coeff(k as i64);
    let cd = |j: usize, k: usize| coeff(j as i64 - k as i64);
    let mut a = vec![Complex64::new(0.0, 0.0); size * size];
    for j in 0..size {
        for k in 0..size {
            a[j * size + k] = match variant {
                Variant::MinusPlus => cd(j, k) + c(j + k + 1),
                Variant::PlusMinus => cd(j, k) - c(j + k + 1),
                Variant::PlusPlus => cd(j, k) - c(j + k + 2),
                Variant::MinusMinus => match (j, k) {
                    (0, 0) => c(0),
                    (0, k) => c(k) * std::f64::consts::SQRT_2,
                    (j, 0) => c(j) * std::f64::consts::SQRT_2,
                    _ => cd(j, k) + c(j + k),
                },
            };
        }
    }
    a
}

/// E[Π ψ(cos θ_j)] for the density of `variant` with `size` angles.
pub fn expectation_for_variant(variant: Variant, symbol: &FourierTable, size: usize) -> Result<DetValue> {
    require_truncation(symbol, size)?;
    Ok(det(gram_matrix(variant, symbol, size), size))
}

/// Authoritative expectation E[Π ψ(x_j)] over the random eigenvalues of `spec`,
/// given the Fourier table of θ ↦ ψ(cos θ).
pub fn expectation_gram(spec: &GroupSpec, symbol: &FourierTable) -> Result<DetValue> {
    expectation_for_variant(spec.ab, symbol, spec.num_angles)
}

/// Determinant of the literal n×n matrix φ̂_{j−k} ± φ̂_{j+k+δ}.
/// For (−,−) this is twice the Gram determinant.
pub fn toeplitz_hankel_det(variant: Variant, symbol: &FourierTable, n: usize) -> Result<DetValue> {
    require_truncation(symbol, n)?;
    let (sign, delta) = match variant {
        Variant::MinusPlus => (1.0, 1),
        Variant::PlusMinus => (-1.0, 1),
        Variant::PlusPlus => (-1.0, 2),
        Variant::MinusMinus => (1.0, 0),
    };
    let mut a = Vec::with_capacity(n * n);
    for j in 0..n as i64 {
        for k in 0..n as i64 {
            a.push(symbol.get(j - k) + symbol.get(j + k + delta) * sign);
        }
    }
    Ok(det(a, n))
}

/// Characteristic function E[exp(i⟨ξ, X⟩)] via the Gram determinant of e^{ig}.
pub fn char_fn_det(spec: &GroupSpec, xi: &[f64]) -> Result<Complex64> {
    Ok(char_fn_det_detailed(spec, xi)?.value())
}

pub fn char_fn_det_detailed(spec: &GroupSpec, xi: &[f64]) -> Result<DetValue> {
    char_fn_det_with(spec, xi, None)
}

/// As [`char_fn_det_detailed`], with the starting Fourier truncation overridden.
pub fn char_fn_det_with(spec: &GroupSpec, xi: &[f64], truncation: Option<usize>) -> Result<DetValue> {
    let tf = build_test_function(spec, xi)?;
    let k = truncation.unwrap_or_else(|| tf.default_truncation());
    let table = fourier_coeffs_adaptive(|t| tf.exp_i_g(t), k)?;
    expectation_gram(spec, &table)
}
