//! Pointwise bounds on the characteristic function F(ξ) in the three ξ-regimes.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::f64::consts::{E, PI};

use super::check::{Check, SuiteSummary};
use super::theorem::{c1, c2, GatedBound};
use crate::detform::char_fn_det;
use crate::sampling::draw_rng;
use crate::special::ln_gamma;
use crate::{GroupSpec, Result};

/// Absolute slack for comparisons whose right-hand side can fall below the
/// roundoff level of the determinant evaluation.
pub const ROUNDOFF_SLACK: f64 = 1e-13;

/// 32·e^{1/2}(e^{9/8}+1)/15
pub fn small_xi_constant() -> f64 {
    32.0 * 0.5f64.exp() * ((9.0f64 / 8.0).exp() + 1.0) / 15.0
}

#[derive(Debug, Clone, Serialize)]
pub struct PointwiseBounds {
    /// Density index q; plays the role of n in every formula here.
    pub n: usize,
    pub m: usize,
    pub xi_norm: f64,
    pub rho: f64,
    pub big_n: f64,
    /// Bound on |F − e^{−‖ξ‖²/2}|.
    pub small_xi: GatedBound,
    /// Bound on |F|.
    pub intermediate: GatedBound,
    /// Bound on |F| decaying in ‖ξ‖.
    pub large: GatedBound,
}

fn gated(name: &str, gate: &str, ok: bool, ln_value: f64) -> GatedBound {
    GatedBound {
        name: name.to_string(),
        gate: gate.to_string(),
        applicable: ok,
        ln_value: ok.then_some(ln_value),
    }
}

pub fn pointwise_bounds(spec: &GroupSpec, xi: &[f64]) -> PointwiseBounds {
    let n = spec.density_index();
    let m = xi.len();
    let (nf, mf) = (n as f64, m as f64);
    let l = mf.ln() + 1.0;
    let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let rho = l.sqrt() * norm;
    let big_n = nf / mf;

    let small_ok = big_n >= 2.0 * rho && big_n >= mf;
    let ln_small = if rho == 0.0 {
        f64::NEG_INFINITY
    } else {
        small_xi_constant().ln() + mf.ln() + rho + 2.0 * big_n * rho.ln()
            - 0.5 * norm * norm
            - ln_gamma(2.0 * big_n + 1.0)
    };

    let cubic = n >= m * m * m;
    let inter_ok = m >= 2 && cubic;
    let ln_inter = if m >= 2 {
        -(1.0 - c1(mf)).powi(2) * (nf * nf).min(norm * norm) / (c2(mf) * (mf + 1.0).powf(8.0 / 3.0) * l)
    } else {
        f64::NAN
    };

    let large_ok = m >= 3 && cubic && norm > 0.0;
    let nm = nf * mf;
    let ln_large = 2.0 * nf * (2.0 * E).ln() - 0.5 * (2.0 * PI * nf).ln()
        + nf / (4.0 * mf)
            * (0.5 * (1.0 + 1.0 / (2.0 * nf)) + 0.5 * nm.ln() + 2.0 * (mf + 1.0).ln()
                - 0.5 * 2f64.ln()
                - (1.0 - (1.0 / (2.0 * nm.sqrt())).exp() / (24.0 * 3f64.sqrt() * nm)).ln()
                - norm.ln());

    PointwiseBounds {
        n,
        m,
        xi_norm: norm,
        rho,
        big_n,
        small_xi: gated("small-xi", "N >= max(2 rho, m)", small_ok, ln_small),
        intermediate: gated("intermediate", "m >= 2 and n >= m^3", inter_ok, ln_inter),
        large: gated("large", "m >= 3, n >= m^3, xi != 0", large_ok, ln_large),
    }
}

/// Checks the applicable pointwise bounds against the exact F at one ξ.
pub fn charfn_checks(spec: &GroupSpec, xi: &[f64]) -> Result<(PointwiseBounds, Complex64, Vec<Check>)> {
    let b = pointwise_bounds(spec, xi);
    let f = char_fn_det(spec, xi)?;
    let gauss = (-0.5 * b.xi_norm * b.xi_norm).exp();
    let mut checks = Vec::new();
    if let Some(v) = b.small_xi.value() {
        checks.push(Check::le(
            "small-xi",
            &b.small_xi.gate,
            (f - gauss).norm(),
            v,
            ROUNDOFF_SLACK,
        ));
    }
    if let Some(v) = b.intermediate.value() {
        checks.push(Check::le(
            "intermediate",
            &b.intermediate.gate,
            f.norm(),
            v,
            ROUNDOFF_SLACK,
        ));
    }
    if let Some(ln_v) = b.large.ln_value {
        let lhs = f.norm().max(f64::MIN_POSITIVE).ln();
        checks.push(Check::le_log("large", &b.large.gate, lhs, ln_v, 0.0));
    }
    Ok((b, f, checks))
}

#[derive(Debug, Clone, Serialize)]
pub struct CharfnBoundReport {
    pub group: String,
    pub n: usize,
    pub samples: usize,
    pub suites: Vec<SuiteSummary>,
}

impl CharfnBoundReport {
    pub fn all_pass(&self) -> bool {
        self.suites.iter().all(|s| s.violations == 0)
    }
}

/// Runs [`charfn_checks`] at every sample; samples outside a regime's gate count as skipped.
pub fn check_charfn_bounds(spec: &GroupSpec, xi_samples: &[Vec<f64>]) -> Result<CharfnBoundReport> {
    let names = ["small-xi", "intermediate", "large"];
    let mut suites: Vec<SuiteSummary> = names.iter().map(|n| SuiteSummary::new(n, "")).collect();
    for xi in xi_samples {
        let (b, _, checks) = charfn_checks(spec, xi)?;
        for (suite, gate) in suites.iter_mut().zip([&b.small_xi, &b.intermediate, &b.large]) {
            suite.gate = gate.gate.clone();
            if !gate.applicable {
                suite.skip();
            }
        }
        for c in checks {
            let idx = names.iter().position(|n| *n == c.name).unwrap();
            suites[idx].record(c);
        }
    }
    Ok(CharfnBoundReport {
        group: spec.kind.name().to_string(),
        n: spec.n,
        samples: xi_samples.len(),
        suites,
    })
}

/// Uniform direction in R^m with norm uniform on [0, max_norm].
pub fn random_xi<R: Rng>(rng: &mut R, m: usize, max_norm: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let r = max_norm * rng.random::<f64>();
    v.iter_mut().for_each(|x| *x *= r / len);
    v
}

/// `count` ξ in R^m alternating between the small-ξ ball ‖ξ‖ ≤ N/(2√L) and
/// the wider ball ‖ξ‖ ≤ 2q, so every regime gets draws.
pub fn charfn_xi_samples(spec: &GroupSpec, m: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let q = spec.density_index() as f64;
    let mf = m as f64;
    let small = q / mf / (2.0 * (mf.ln() + 1.0).sqrt());
    let mut rng = draw_rng(seed, 0xD0_0000 + m as u32, q as u32);
    (0..count)
        .map(|i| random_xi(&mut rng, m, if i % 2 == 0 { small } else { 2.0 * q }))
        .collect()
}

/// Largest ‖ξ‖ at which the determinant and Fredholm routes are compared.
pub const AGREEMENT_RADIUS: f64 = 2.0;

/// `count` ξ in R^m with ‖ξ‖ ≤ [`AGREEMENT_RADIUS`].
pub fn agreement_xi_samples(m: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = draw_rng(seed, 0xD1_0000 + m as u32, 0);
    (0..count).map(|_| random_xi(&mut rng, m, AGREEMENT_RADIUS)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{group_spec, GroupKind};

    #[test]
    fn zero_xi_gives_zero_small_regime_bound() {
        let spec = group_spec(GroupKind::Sp, 8).unwrap();
        let b = pointwise_bounds(&spec, &[0.0, 0.0]);
        assert_eq!(b.small_xi.value(), Some(0.0));
    }

    #[test]
    fn large_envelope_decreases_in_norm() {
        let spec = group_spec(GroupKind::Sp, 27).unwrap();
        let a = pointwise_bounds(&spec, &[10.0, 0.0, 0.0]).large.ln_value.unwrap();
        let b = pointwise_bounds(&spec, &[20.0, 0.0, 0.0]).large.ln_value.unwrap();
        assert!(b < a);
    }
}
