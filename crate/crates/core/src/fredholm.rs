//! Hankel operators, truncated Fredholm determinants and the
//! Toeplitz+Hankel / Fredholm identities for the four Jacobi variants.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::bounds::{Check, SuiteSummary};

use crate::detform::{char_fn_det, toeplitz_hankel_det};
use crate::error::{Error, Result};
use crate::groups::{GroupSpec, Variant};
use crate::linalg::{det, LogDet};
use crate::sampling::draw_rng;
use crate::symbols::{build_test_function, fourier_coeffs, fourier_coeffs_adaptive, FourierTable};

/// Agreement between successive block sizes required by [`fredholm_det_truncated`].
pub const FREDHOLM_AGREEMENT: f64 = 1e-11;
/// Largest block size tried before giving up.
pub const FREDHOLM_CAP: usize = 2048;

/// sign·Q_p H(e^{−i·shift·θ} c) Q_p, with matrix entries d_{j+k+1} (j, k ≥ p)
/// and d_l = c_{l+shift}.
#[derive(Debug, Clone, Serialize)]
pub struct HankelOp {
    pub base_symbol: FourierTable,
    pub shift: i64,
    pub sign: f64,
    pub projection_n: usize,
}

impl HankelOp {
    pub fn new(base_symbol: FourierTable, shift: i64, sign: f64, projection_n: usize) -> Self {
        HankelOp {
            base_symbol,
            shift,
            sign,
            projection_n,
        }
    }

    /// Effective coefficient d_l.
    pub fn coeff(&self, l: i64) -> Complex64 {
        self.base_symbol.get(l + self.shift)
    }

    /// Coefficient feeding the block entry (a, b), counted from the projection corner.
    fn block_coeff(&self, s: usize) -> Complex64 {
        self.coeff((s + 1 + 2 * self.projection_n) as i64)
    }

    /// Largest anti-diagonal index s with a possibly nonzero d; None if all vanish.
    fn support_end(&self) -> Option<usize> {
        let last = self.base_symbol.k_max() as i64 - self.shift - 1 - 2 * self.projection_n as i64;
        (last >= 0).then_some(last as usize)
    }

    /// Σ_{s ≥ from} |d_{s+1+2p}| over the stored table.
    fn tail_sum(&self, from: usize) -> f64 {
        match self.support_end() {
            Some(end) if end >= from => (from..=end).map(|s| self.block_coeff(s).norm()).sum(),
            _ => 0.0,
        }
    }

    /// M×M block of I + sign·A.
    fn identity_plus_block(&self, m: usize) -> Vec<Complex64> {
        let mut a = vec![Complex64::new(0.0, 0.0); m * m];
        for j in 0..m {
            for k in 0..m {
                a[j * m + k] = self.block_coeff(j + k) * self.sign;
            }
            a[j * m + j] += 1.0;
        }
        a
    }
}

/// Converged Fredholm determinant with its certificate.
#[derive(Debug, Clone, Serialize)]
pub struct FredholmValue {
    pub value: Complex64,
    pub log_det: LogDet,
    pub block_size: usize,
    /// Σ |d_l| over coefficients not reached by the final block.
    pub tail: f64,
    /// Pivot ratio of the final block's elimination.
    pub pivot_ratio: f64,
    pub warning: Option<String>,
}

/// det(I + sign·A) for the leading M×M block A, doubling M until two successive
/// values agree to [`FREDHOLM_AGREEMENT`] (relative to max(1, |value|)).
pub fn fredholm_det_truncated(op: &HankelOp, m: usize) -> Result<FredholmValue> {
    let Some(end) = op.support_end() else {
        return Ok(FredholmValue {
            value: Complex64::new(1.0, 0.0),
            log_det: LogDet::ONE,
            block_size: 0,
            tail: 0.0,
            pivot_ratio: 1.0,
            warning: None,
        });
    };
    let eval = |m: usize| det(op.identity_plus_block(m), m);
    let mut size = m.max(1);
    let mut prev = eval(size);
    loop {
        // once the block reaches past the support, larger blocks only add identity rows
        let covers = 2 * size > end + 1;
        let next_size = (2 * size).min(FREDHOLM_CAP);
        let next = eval(next_size);
        let (pv, nv) = (prev.value(), next.value());
        let agree = (pv - nv).norm() <= FREDHOLM_AGREEMENT * nv.norm().max(1.0);
        if agree || covers {
            return Ok(FredholmValue {
                value: nv,
                log_det: next.log_det,
                block_size: next_size,
                tail: op.tail_sum(2 * next_size - 1),
                pivot_ratio: next.pivot_ratio,
                warning: next.warning,
            });
        }
        if next_size >= FREDHOLM_CAP {
            return Err(Error::FredholmNonConvergence {
                size: next_size,
                previous: pv,
                last: nv,
            });
        }
        size = next_size;
        prev = next;
    }
}

/// Truncated trace and Hilbert–Schmidt norm of the projected operator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OperatorDiagnostics {
    pub trace: Complex64,
    pub hs_norm: f64,
    /// Σ |d| over diagonal entries beyond the block.
    pub trace_tail: f64,
    /// √(Σ (s+1)|d_{s+1+2p}|²) over anti-diagonals beyond the block.
    pub hs_tail: f64,
}

impl OperatorDiagnostics {
    /// Υ = max(|Tr K|, ‖K‖₂).
    pub fn upsilon(&self) -> f64 {
        self.trace.norm().max(self.hs_norm)
    }
}

pub fn operator_diagnostics(op: &HankelOp, m: usize) -> OperatorDiagnostics {
    let trace: Complex64 = (0..m).map(|a| op.block_coeff(2 * a)).sum();
    let mut hs2 = 0.0;
    for s in 0..m.saturating_sub(1) * 2 + 1 {
        let count = if s < m { s + 1 } else { 2 * m - 1 - s };
        hs2 += count as f64 * op.block_coeff(s).norm_sqr();
    }
    let end = op.support_end();
    let trace_tail = match end {
        Some(e) if e >= 2 * m => (m..=e / 2).map(|a| op.block_coeff(2 * a).norm()).sum(),
        _ => 0.0,
    };
    let hs_tail = match end {
        Some(e) if m > 0 => (m..=e.max(m))
            .map(|s| (s + 1) as f64 * op.block_coeff(s).norm_sqr())
            .sum::<f64>()
            .sqrt(),
        _ => 0.0,
    };
    OperatorDiagnostics {
        trace,
        hs_norm: hs2.sqrt(),
        trace_tail,
        hs_tail,
    }
}

/// Sign, Hankel shift and parity of the exponential correction for each variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityShape {
    pub sign: i8,
    /// Extra shift from the t^{±1} prefactor.
    pub t_shift: i64,
    /// Sign of the correction sum.
    pub correction_sign: i8,
    /// Correction runs over odd (true) or even (false) positive indices.
    pub correction_odd: bool,
}

pub fn identity_shape(variant: Variant) -> IdentityShape {
    let (sign, t_shift, correction_sign, correction_odd) = match variant {
        Variant::MinusPlus => (1, 0, 1, true),
        Variant::PlusMinus => (-1, 0, -1, true),
        Variant::PlusPlus => (-1, 1, -1, false),
        Variant::MinusMinus => (1, -1, 1, false),
    };
    IdentityShape {
        sign,
        t_shift,
        correction_sign,
        correction_odd,
    }
}

/// Both sides of a Toeplitz+Hankel / Fredholm identity.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub variant: Variant,
    pub n: usize,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

fn eval_analytic(coeffs: &[Complex64], theta: f64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * theta))
        .sum()
}

/// Compares the Toeplitz+Hankel determinant of a = exp(b₊ + b̃₊) against the
/// exponential prefactor times the Fredholm determinant of a₊⁻¹ã₊.
///
/// The (−,−) left side is the Gram-normalized determinant (half the raw one);
/// the raw determinant exceeds the right side by exactly a factor 2.
pub fn verify_basor_ehrhardt(variant: Variant, bplus: &[Complex64], n: usize) -> Result<IdentityCheck> {
    let degree = bplus.len().saturating_sub(1);
    let b_sym = |t: f64| eval_analytic(bplus, t) + eval_analytic(bplus, -t);
    let a_table = fourier_coeffs_adaptive(|t| b_sym(t).exp(), (2 * n + 4).max(32))?;
    let mut lhs = toeplitz_hankel_det(variant, &a_table, n)?.log_det;
    if variant == Variant::MinusMinus {
        lhs = lhs.scale(0.5);
    }

    let log_a = fourier_coeffs(b_sym, degree.max(1))?;
    let shape = identity_shape(variant);
    let mut exponent = log_a.get(0) * n as f64;
    for k in 1..=degree {
        let lk = log_a.get(k as i64);
        if (k % 2 == 1) == shape.correction_odd {
            exponent += lk * shape.correction_sign as f64;
        }
        exponent += lk * lk * (0.5 * k as f64);
    }

    let s_table = fourier_coeffs_adaptive(|t| (eval_analytic(bplus, -t) - eval_analytic(bplus, t)).exp(), 32)?;
    let op = HankelOp::new(s_table, shape.t_shift, shape.sign as f64, n);
    let fred = fredholm_det_truncated(&op, 8)?;
    let rhs = LogDet::from_value(exponent.exp()).mul(&fred.log_det);
    let (l, r) = (lhs.value(), rhs.value());
    Ok(IdentityCheck {
        variant,
        n,
        lhs: l,
        rhs: r,
        residual: (l - r).norm() / l.norm().max(f64::MIN_POSITIVE),
    })
}

/// (Hankel shift, sign) of the characteristic-function Fredholm form.
pub fn char_fn_operator_shape(variant: Variant, q: usize) -> (i64, f64) {
    let q = q as i64;
    match variant {
        Variant::MinusPlus => (2 * q, 1.0),
        Variant::PlusMinus => (2 * q, -1.0),
        Variant::PlusPlus => (2 * q + 1, -1.0),
        Variant::MinusMinus => (2 * q - 1, 1.0),
    }
}

/// The Hankel operator whose Fredholm determinant gives the characteristic function.
pub fn char_fn_operator(spec: &GroupSpec, xi: &[f64]) -> Result<HankelOp> {
    char_fn_operator_with(spec, xi, None)
}

/// As [`char_fn_operator`], with the starting Fourier truncation overridden.
pub fn char_fn_operator_with(spec: &GroupSpec, xi: &[f64], truncation: Option<usize>) -> Result<HankelOp> {
    let tf = build_test_function(spec, xi)?;
    let k = truncation.unwrap_or_else(|| tf.default_truncation());
    let table = fourier_coeffs_adaptive(|t| tf.exp_two_im_gplus(t), k)?;
    let (shift, sign) = char_fn_operator_shape(spec.ab, spec.num_angles);
    Ok(HankelOp::new(table, shift, sign, 0))
}

/// e^{−‖ξ‖²/2}·det(1 ± H(e^{−i·shift·θ} e^{2 Im g₊})).
pub fn char_fn_fredholm(spec: &GroupSpec, xi: &[f64]) -> Result<Complex64> {
    char_fn_fredholm_with(spec, xi, None)
}

pub fn char_fn_fredholm_with(spec: &GroupSpec, xi: &[f64], truncation: Option<usize>) -> Result<Complex64> {
    Ok(char_fn_fredholm_detailed(spec, xi, truncation)?.0)
}

/// F(ξ) together with the underlying Fredholm evaluation. At large ‖ξ‖ the
/// determinant is a huge number times e^{−‖ξ‖²/2} and loses all accuracy to
/// cancellation; the pivot ratio of the result flags this.
pub fn char_fn_fredholm_detailed(
    spec: &GroupSpec,
    xi: &[f64],
    truncation: Option<usize>,
) -> Result<(Complex64, FredholmValue)> {
    let op = char_fn_operator_with(spec, xi, truncation)?;
    let fred = fredholm_det_truncated(&op, 8)?;
    let norm2: f64 = xi.iter().map(|x| x * x).sum();
    let gauss = LogDet {
        ln_abs: -0.5 * norm2,
        phase: Complex64::new(1.0, 0.0),
    };
    let v = fred.log_det.mul(&gauss).value();
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::NonFiniteSymbol { theta: f64::NAN });
    }
    Ok((v, fred))
}

/// Residual allowed by [`identity_suite`].
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Random analytic polynomial with degree at most `max_degree` and complex
/// coefficients of modulus at most `max_coeff`.
pub fn random_analytic_poly<R: Rng>(rng: &mut R, max_degree: usize, max_coeff: f64) -> Vec<Complex64> {
    let degree = rng.random_range(0..=max_degree);
    (0..=degree)
        .map(|_| {
            let r = max_coeff * rng.random::<f64>();
            Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

/// Checks the identity for `trials` random symbols per variant and n in `sizes`.
pub fn identity_suite(trials: usize, sizes: std::ops::RangeInclusive<usize>, seed: u64) -> Result<SuiteSummary> {
    let mut suite = SuiteSummary::new("toeplitz-hankel-fredholm", "degree <= 3, |coeff| <= 0.5");
    for (vi, &variant) in Variant::ALL.iter().enumerate() {
        let mut rng = draw_rng(seed, 0xC0_0000 + vi as u32, 0);
        for _ in 0..trials {
            let bplus = random_analytic_poly(&mut rng, 3, 0.5);
            for n in sizes.clone() {
                let id = verify_basor_ehrhardt(variant, &bplus, n)?;
                let name = format!("{}-n{}", variant.label(), n);
                suite.record(Check::le(
                    &name,
                    &suite.gate.clone(),
                    id.residual,
                    IDENTITY_TOLERANCE,
                    0.0,
                ));
            }
        }
    }
    Ok(suite)
}

/// Allowed |determinant − Fredholm| gap for the characteristic function.
pub const CHARFN_AGREEMENT: f64 = 1e-8;

/// Compares the two exact characteristic-function routes at every ξ.
pub fn charfn_agreement_suite(spec: &GroupSpec, xi_samples: &[Vec<f64>]) -> Result<SuiteSummary> {
    let mut suite = SuiteSummary::new("det-vs-fredholm", "all xi");
    for xi in xi_samples {
        let gap = (char_fn_det(spec, xi)? - char_fn_fredholm(spec, xi)?).norm();
        suite.record(Check::le("det-vs-fredholm", "all xi", gap, CHARFN_AGREEMENT, 0.0));
    }
    Ok(suite)
}
