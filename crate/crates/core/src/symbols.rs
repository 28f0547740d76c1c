//! Trigonometric test functions and Fourier tables of circle symbols.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{mean_trace, GroupSpec};

/// Agreement required between successive tables in [`fourier_coeffs_adaptive`].
pub const FOURIER_AGREEMENT: f64 = 1e-12;
const MAX_TRUNCATION: usize = 1 << 16;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// T_k(x) by the three-term recurrence.
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// θ ↦ c₀ + Σ_{k=1}^m (c_k cos kθ + s_k sin kθ).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigPoly {
    /// c₀..c_m
    pub cos_coeffs: Vec<f64>,
    /// s₁..s_m
    pub sin_coeffs: Vec<f64>,
}

impl TrigPoly {
    pub fn new(cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Self {
        let m = cos_coeffs.len().saturating_sub(1).max(sin_coeffs.len());
        let mut c = cos_coeffs;
        let mut s = sin_coeffs;
        c.resize(m + 1, 0.0);
        s.resize(m, 0.0);
        TrigPoly {
            cos_coeffs: c,
            sin_coeffs: s,
        }
    }

    pub fn degree(&self) -> usize {
        self.sin_coeffs.len()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = self.cos_coeffs[0];
        // cos kθ, sin kθ by angle addition; one sin_cos per call.
        let (s1, c1) = theta.sin_cos();
        let (mut s, mut c) = (0.0, 1.0);
        for k in 1..=self.degree() {
            (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
            acc += self.cos_coeffs[k] * c + self.sin_coeffs[k - 1] * s;
        }
        acc
    }

    /// Evaluation at θ + i·t. |t| is clamped to 2 so that cosh(m t) stays finite.
    pub fn eval_complex(&self, theta: f64, t: f64) -> Complex64 {
        let z = Complex64::new(theta, t.clamp(-2.0, 2.0));
        let mut acc = Complex64::new(self.cos_coeffs[0], 0.0);
        for k in 1..=self.degree() {
            let kz = z * k as f64;
            acc += kz.cos() * self.cos_coeffs[k] + kz.sin() * self.sin_coeffs[k - 1];
        }
        acc
    }

    /// Exponential-basis coefficients: p(θ) = Σ_{|k|≤m} e_k e^{ikθ}.
    pub fn exp_coeff(&self, k: i64) -> Complex64 {
        let a = k.unsigned_abs() as usize;
        if a > self.degree() {
            return Complex64::new(0.0, 0.0);
        }
        if a == 0 {
            return Complex64::new(self.cos_coeffs[0], 0.0);
        }
        // c cos + s sin = (c − i s)/2 e^{ikθ} + (c + i s)/2 e^{−ikθ}
        let (c, s) = (self.cos_coeffs[a], self.sin_coeffs[a - 1]);
        if k > 0 {
            Complex64::new(0.5 * c, -0.5 * s)
        } else {
            Complex64::new(0.5 * c, 0.5 * s)
        }
    }

    /// L² norm with respect to dθ/2π.
    pub fn l2_norm(&self) -> f64 {
        let mut acc = self.cos_coeffs[0].powi(2);
        for k in 1..=self.degree() {
            acc += 0.5 * (self.cos_coeffs[k].powi(2) + self.sin_coeffs[k - 1].powi(2));
        }
        acc.sqrt()
    }
}

/// Conjugate function: cos kθ ↦ sin kθ, sin kθ ↦ −cos kθ, constants ↦ 0.
pub fn hilbert_transform(p: &TrigPoly) -> TrigPoly {
    let m = p.degree();
    let mut cos = vec![0.0; m + 1];
    let mut sin = vec![0.0; m];
    for k in 1..=m {
        sin[k - 1] = p.cos_coeffs[k];
        cos[k] = -p.sin_coeffs[k - 1];
    }
    TrigPoly::new(cos, sin)
}

/// Test function g for a trace vector pairing ⟨ξ, X⟩ = Σ_j g(θ_j).
#[derive(Debug, Clone, Serialize)]
pub struct TestFunction {
    pub xi: Vec<f64>,
    pub spec: GroupSpec,
    pub g: TrigPoly,
    /// Coefficients of e^{ikθ}, k = 0..m, of the analytic part g₊ = Σ ξ_k/√k e^{ikθ}.
    /// The constant slot is zero; see [`TestFunction::gplus`].
    pub gplus_coeffs: Vec<Complex64>,
}

pub fn build_test_function(spec: &GroupSpec, xi: &[f64]) -> Result<TestFunction> {
    if xi.is_empty() {
        return Err(Error::InvalidArgument("xi must have at least one entry".into()));
    }
    let m = xi.len();
    let q = spec.num_angles as f64;
    let mut cos = vec![0.0; m + 1];
    let mut gplus = vec![Complex64::new(0.0, 0.0); m + 1];
    for k in 1..=m {
        let w = xi[k - 1] / (k as f64).sqrt();
        cos[k] = 2.0 * w;
        cos[0] -= w * mean_trace(spec, k, false) / q;
        gplus[k] = Complex64::new(w, 0.0);
    }
    Ok(TestFunction {
        xi: xi.to_vec(),
        spec: spec.clone(),
        g: TrigPoly::new(cos, vec![0.0; m]),
        gplus_coeffs: gplus,
    })
}

impl TestFunction {
    pub fn m(&self) -> usize {
        self.xi.len()
    }

    pub fn xi_norm(&self) -> f64 {
        self.xi.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// ρ = √(log m + 1)·‖ξ‖
    pub fn rho(&self) -> f64 {
        ((self.m() as f64).ln() + 1.0).sqrt() * self.xi_norm()
    }

    pub fn gplus(&self, theta: f64) -> Complex64 {
        self.gplus_coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * theta))
            .sum()
    }

    /// 2 Im g₊(θ), which equals the conjugate function of g.
    pub fn two_im_gplus(&self, theta: f64) -> f64 {
        2.0 * self.gplus(theta).im
    }

    /// The symbol e^{2 Im g₊}.
    pub fn exp_two_im_gplus(&self, theta: f64) -> Complex64 {
        Complex64::new(self.two_im_gplus(theta).exp(), 0.0)
    }

    /// The symbol e^{i g}.
    pub fn exp_i_g(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.g.eval(theta))
    }

    /// Default Fourier truncation max(64, 4m⌈ρ⌉ + 2q).
    pub fn default_truncation(&self) -> usize {
        default_truncation(self.m(), self.rho(), self.spec.num_angles)
    }
}

pub fn default_truncation(m: usize, rho: f64, n: usize) -> usize {
    64usize.max(4 * m * rho.ceil() as usize + 2 * n)
}

/// Two-sided Fourier coefficients c_k = (1/2π)∫ f(θ) e^{−ikθ} dθ, |k| ≤ K.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierTable {
    coeffs: Vec<Complex64>,
    k_max: usize,
}

impl FourierTable {
    pub fn from_coeffs(k_max: usize, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), 2 * k_max + 1);
        FourierTable { coeffs, k_max }
    }

    /// Table from a sparse list of (index, value) pairs.
    pub fn from_pairs(k_max: usize, pairs: &[(i64, Complex64)]) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k_max + 1];
        for &(k, v) in pairs {
            assert!(k.unsigned_abs() as usize <= k_max);
            coeffs[(k + k_max as i64) as usize] += v;
        }
        FourierTable { coeffs, k_max }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Coefficient at k; zero beyond the truncation.
    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.k_max as i64) as usize]
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..=self.k_max as i64).all(|k| (self.get(-k) - self.get(k).conj()).norm() <= tol)
    }

    pub fn max_abs_diff(&self, other: &FourierTable) -> f64 {
        let k = self.k_max.max(other.k_max) as i64;
        (-k..=k)
            .map(|i| (self.get(i) - other.get(i)).norm())
            .fold(0.0, f64::max)
    }

    /// Evaluate the truncated series at θ.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let k = self.k_max as i64;
        (-k..=k)
            .map(|i| self.get(i) * Complex64::from_polar(1.0, i as f64 * theta))
            .sum()
    }
}

/// Uniform-grid quadrature on ≥ 8(K+1) points.
pub fn fourier_coeffs<F>(symbol: F, k_max: usize) -> Result<FourierTable>
where
    F: Fn(f64) -> Complex64,
{
    let k_max = k_max.max(1);
    let p = (8 * (k_max + 1)).next_power_of_two();
    let mut buf = Vec::with_capacity(p);
    for i in 0..p {
        let theta = 2.0 * PI * i as f64 / p as f64;
        let v = symbol(theta);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteSymbol { theta });
        }
        buf.push(v);
    }
    PLANNER.with(|pl| pl.borrow_mut().plan_fft_forward(p).process(&mut buf));
    let scale = 1.0 / p as f64;
    let coeffs = (-(k_max as i64)..=k_max as i64)
        .map(|k| buf[k.rem_euclid(p as i64) as usize] * scale)
        .collect();
    Ok(FourierTable { coeffs, k_max })
}

/// Doubles K from `k_start` until two successive tables agree to
/// [`FOURIER_AGREEMENT`], relative to max(1, largest coefficient).
pub fn fourier_coeffs_adaptive<F>(symbol: F, k_start: usize) -> Result<FourierTable>
where
    F: Fn(f64) -> Complex64,
{
    let mut k = k_start.max(1);
    if k > MAX_TRUNCATION {
        return Err(Error::InsufficientTruncation {
            have: MAX_TRUNCATION,
            need: k,
        });
    }
    let mut prev = fourier_coeffs(&symbol, k)?;
    let mut prev_diff = f64::INFINITY;
    loop {
        let next = fourier_coeffs(&symbol, 2 * k)?;
        let scale = next.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let diff = prev.max_abs_diff(&next) / scale;
        if diff < FOURIER_AGREEMENT {
            return Ok(next);
        }
        if 2 * k >= MAX_TRUNCATION {
            return Err(Error::NonConvergence {
                what: "Fourier table",
                previous: prev_diff,
                last: diff,
            });
        }
        k *= 2;
        prev = next;
        prev_diff = diff;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{group_spec, GroupKind};

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev_t(0, 0.7), 1.0);
        assert!((chebyshev_t(3, 0.5) + 1.0).abs() < 1e-15);
        assert!((chebyshev_t(2, 0.6) + 0.28).abs() < 1e-15);
        assert!((chebyshev_t(5, 2.0) - (5.0 * 2f64.acosh()).cosh()).abs() < 1e-9);
    }

    #[test]
    fn test_function_examples() {
        let sp1 = group_spec(GroupKind::Sp, 1).unwrap();
        let tf = build_test_function(&sp1, &[1.0]).unwrap();
        assert!((tf.g.eval(0.0) - 2.0).abs() < 1e-15);

        let sp2 = group_spec(GroupKind::Sp, 2).unwrap();
        let tf = build_test_function(&sp2, &[0.0, 1.0]).unwrap();
        let expect = (-2.0 + 0.5) / 2f64.sqrt();
        assert!((tf.g.eval(PI / 2.0) - expect).abs() < 1e-14);

        let op2 = group_spec(GroupKind::OEvenPlus, 2).unwrap();
        let tf = build_test_function(&op2, &[1.0, 1.0]).unwrap();
        assert!((tf.g.cos_coeffs[0] + 0.5 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hilbert_examples() {
        let g = TrigPoly::new(vec![0.0, 2.0], vec![0.0]);
        assert!((hilbert_transform(&g).eval(PI / 2.0) - 2.0).abs() < 1e-15);
        let z = TrigPoly::new(vec![0.0; 3], vec![0.0; 2]);
        assert_eq!(hilbert_transform(&z).eval(0.4), 0.0);
        let g = TrigPoly::new(vec![0.0, 0.0, 2f64.sqrt()], vec![0.0; 2]);
        assert!((hilbert_transform(&g).eval(PI / 4.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hilbert_of_g_is_two_im_gplus() {
        let spec = group_spec(GroupKind::OOddMinus, 3).unwrap();
        let tf = build_test_function(&spec, &[0.4, -1.2, 0.7]).unwrap();
        let h = hilbert_transform(&tf.g);
        for i in 0..20 {
            let t = 0.31 * i as f64;
            assert!((h.eval(t) - tf.two_im_gplus(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn fourier_examples() {
        let one = fourier_coeffs(|_| Complex64::new(1.0, 0.0), 4).unwrap();
        assert!((one.get(0) - 1.0).norm() < 1e-15);
        assert!((1..=4).all(|k| one.get(k).norm() < 1e-15 && one.get(-k).norm() < 1e-15));
        let e = fourier_coeffs(|t| Complex64::from_polar(1.0, t), 4).unwrap();
        assert!((e.get(1) - 1.0).norm() < 1e-15);
        assert!(e.get(-1).norm() < 1e-15);
        assert!(fourier_coeffs(|_| Complex64::new(f64::NAN, 0.0), 2).is_err());
    }

    #[test]
    fn exp_coeff_matches_quadrature() {
        let p = TrigPoly::new(vec![0.3, 1.0, -0.5], vec![0.25, 2.0]);
        let t = fourier_coeffs(|th| Complex64::new(p.eval(th), 0.0), 4).unwrap();
        for k in -3..=3 {
            assert!((t.get(k) - p.exp_coeff(k)).norm() < 1e-14);
        }
    }

    #[test]
    fn complex_evaluation_matches_real_axis() {
        let p = TrigPoly::new(vec![0.3, 1.0, -0.5], vec![0.25, 2.0]);
        let z = p.eval_complex(0.7, 0.0);
        assert!((z.re - p.eval(0.7)).abs() < 1e-12 && z.im.abs() < 1e-12);
    }
}
