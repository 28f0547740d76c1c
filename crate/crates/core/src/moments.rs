//! Integer partitions, the exponential formula, and exact joint trace moments.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::detform::gram_matrix_with;
use crate::error::{Error, Result};
use crate::groups::{deterministic_power_sum, mean_trace, GroupSpec};
use crate::linalg::det;
use crate::special::{binomial, double_factorial_odd, ln_factorial, ln_gamma};

/// Largest weight accepted by [`partitions`].
pub const MAX_PARTITION_WEIGHT: usize = 30;

/// Multiplicity vector j ↦ m_j (entries with m_j = 0 are ignored).
pub type Multiplicities = BTreeMap<usize, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    /// Weakly decreasing positive parts.
    pub parts: Vec<usize>,
    pub multiplicities: Multiplicities,
    pub weight: usize,
}

impl Partition {
    pub fn from_parts(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let mut multiplicities = Multiplicities::new();
        for &p in &parts {
            *multiplicities.entry(p).or_insert(0) += 1;
        }
        let weight = parts.iter().sum();
        Partition {
            parts,
            multiplicities,
            weight,
        }
    }

    /// z_λ = Π m_i!·i^{m_i}.
    pub fn z(&self) -> f64 {
        self.multiplicities
            .iter()
            .map(|(&i, &m)| ln_factorial(m as u64).exp() * (i as f64).powi(m as i32))
            .product()
    }
}

/// All partitions of `weight`, in reverse lexicographic order.
pub fn partitions(weight: usize) -> Result<Vec<Partition>> {
    if weight > MAX_PARTITION_WEIGHT {
        return Err(Error::InvalidArgument(format!(
            "partition weight {weight} exceeds {MAX_PARTITION_WEIGHT}"
        )));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(rest: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition::from_parts(current.clone()));
            return;
        }
        for p in (1..=rest.min(max_part)).rev() {
            current.push(p);
            rec(rest - p, p, current, out);
            current.pop();
        }
    }
    rec(weight, weight, &mut current, &mut out);
    Ok(out)
}

/// Taylor coefficients a_0..a_W of f at 0 from `nodes` samples on |t| = r.
pub fn taylor_coefficients<F>(f: F, order: usize, radius: f64, nodes: usize) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let values: Vec<Complex64> = (0..nodes)
        .map(|a| f(Complex64::from_polar(radius, 2.0 * PI * a as f64 / nodes as f64)))
        .collect();
    (0..=order)
        .map(|n| {
            let s: Complex64 = values
                .iter()
                .enumerate()
                .map(|(a, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (a * n) as f64 / nodes as f64))
                .sum();
            s / (nodes as f64 * radius.powi(n as i32))
        })
        .collect()
}

/// max_{n ≤ W} |[tⁿ] exp(Σ g(k)tᵏ/k) − Σ_{λ⊢n} z_λ⁻¹ Π g(λ_i)|, with `gvals[k-1] = g(k)`.
pub fn verify_exponential_formula(gvals: &[f64], radius: f64) -> Result<f64> {
    let w = gvals.len();
    if w > 12 {
        return Err(Error::InvalidArgument(
            "exponential formula checked up to order 12".into(),
        ));
    }
    let f = |t: Complex64| {
        let mut s = Complex64::new(0.0, 0.0);
        let mut tk = Complex64::new(1.0, 0.0);
        for (k, g) in gvals.iter().enumerate() {
            tk *= t;
            s += tk * (*g / (k + 1) as f64);
        }
        s.exp()
    };
    let taylor = taylor_coefficients(f, w, radius, 64);
    let mut worst: f64 = 0.0;
    for (n, coeff) in taylor.iter().enumerate() {
        let side: f64 = partitions(n)?
            .iter()
            .map(|l| l.parts.iter().map(|&p| gvals[p - 1]).product::<f64>() / l.z())
            .sum();
        worst = worst.max((coeff - side).norm());
    }
    Ok(worst)
}

/// E[(√j Z + s)^m] by the binomial expansion.
pub fn shifted_gaussian_moment(j: usize, shift: f64, m: usize) -> f64 {
    let jf = j as f64;
    (0..=m)
        .step_by(2)
        .map(|i| {
            binomial(m as u32, i as u32)
                * jf.powf(i as f64 / 2.0)
                * double_factorial_odd(i as u32 / 2)
                * shift.powi((m - i) as i32)
        })
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussianMoment {
    pub value: f64,
    pub weight: usize,
    /// Largest weight for which the group moment is expected to equal `value`.
    pub range: usize,
}

impl GaussianMoment {
    pub fn in_range(&self) -> bool {
        self.weight <= self.range
    }
}

pub fn weight(mult: &Multiplicities) -> usize {
    mult.iter().map(|(j, m)| j * m).sum()
}

/// Π_j E[(√j Z_j + s_j)^{m_j}] with s_j the random-eigenvalue trace mean.
pub fn gaussian_side_moment(spec: &GroupSpec, mult: &Multiplicities) -> GaussianMoment {
    let value = mult
        .iter()
        .filter(|(_, &m)| m > 0)
        .map(|(&j, &m)| shifted_gaussian_moment(j, mean_trace(spec, j, false), m))
        .product();
    GaussianMoment {
        value,
        weight: weight(mult),
        range: spec.moment_range(),
    }
}

/// Options for [`group_moment_exact`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContourOptions {
    /// Base radius; each variable's circle is this times 2√(m_j/j).
    pub radius: f64,
    pub include_deterministic: bool,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions {
            radius: 0.5,
            include_deterministic: false,
        }
    }
}

/// Pre-asymptotic bound on the k-th absolute moment of a random-eigenvalue trace:
/// min((2q)^k, E(√j|Z| + |s|)^k), in log form.
fn ln_abs_moment_model(q: usize, j: usize, shift: f64, k: usize) -> f64 {
    let trivial = k as f64 * (2.0 * q as f64).ln();
    let s = shift.abs();
    let jf = j as f64;
    let gauss: f64 = (0..=k)
        .map(|i| {
            // E|Z|^i = 2^{i/2} Γ((i+1)/2) / √π
            let abs_z = (0.5 * i as f64 * 2f64.ln() + ln_gamma((i as f64 + 1.0) / 2.0) - 0.5 * PI.ln()).exp();
            binomial(k as u32, i as u32) * jf.powf(i as f64 / 2.0) * abs_z * s.powi((k - i) as i32)
        })
        .sum();
    trivial.min(gauss.ln())
}

/// Smallest node count whose aliasing error sits below double-precision roundoff.
fn node_count(q: usize, j: usize, shift: f64, m: usize, r: f64) -> usize {
    let term = |k: usize| ln_abs_moment_model(q, j, shift, k) + k as f64 * r.ln() - ln_factorial(k as u64);
    let scale = (0..200).map(term).fold(f64::NEG_INFINITY, f64::max);
    let mut nodes = m + 1;
    loop {
        let alias = (1..=4).map(|l| term(m + l * nodes)).fold(f64::NEG_INFINITY, f64::max);
        if alias < scale + (1e-17f64).ln() || nodes > 400 {
            return nodes.max(m + 4);
        }
        nodes += 1;
    }
}

struct Variable {
    j: usize,
    power: usize,
    radius: f64,
    nodes: usize,
}

/// E[Π_j (Tr U^j)^{m_j}] over the random eigenvalues (plus forced ones if requested),
/// as a mixed Taylor coefficient of the Gram-determinant generating function.
pub fn group_moment_exact(spec: &GroupSpec, mult: &Multiplicities, opts: ContourOptions) -> Result<f64> {
    let active: Vec<(usize, usize)> = mult.iter().filter(|(_, &m)| m > 0).map(|(&j, &m)| (j, m)).collect();
    if active.is_empty() {
        return Ok(1.0);
    }
    let mut base = opts.radius;
    for _ in 0..8 {
        match extract_moment(spec, &active, base, opts.include_deterministic) {
            Ok(v) if v.is_finite() => return Ok(v),
            Ok(_) => base *= 0.5,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonConvergence {
        what: "moment contour extraction (radius shrink)",
        previous: base * 2.0,
        last: base,
    })
}

fn extract_moment(spec: &GroupSpec, active: &[(usize, usize)], base: f64, include_deterministic: bool) -> Result<f64> {
    let q = spec.num_angles;
    let vars: Vec<Variable> = active
        .iter()
        .map(|&(j, m)| {
            let radius = 2.0 * base * (m as f64 / j as f64).sqrt();
            let shift = mean_trace(spec, j, false);
            Variable {
                j,
                power: m,
                radius,
                nodes: node_count(q.max(1), j, shift, m, radius),
            }
        })
        .collect();

    let need = 2 * q + 2;
    let band: f64 = vars
        .iter()
        .map(|v| v.j as f64 * (2.0 * std::f64::consts::E * v.radius + 40.0))
        .fold(0.0, f64::max);
    let p = ((4.0 * (need as f64 + band)) as usize).next_power_of_two().max(64);
    let half = p / 2;
    let thetas: Vec<f64> = (0..=half).map(|i| 2.0 * PI * i as f64 / p as f64).collect();
    let weights: Vec<f64> = (0..=half)
        .map(|i| if i == 0 || i == half { 1.0 } else { 2.0 } / p as f64)
        .collect();
    // cos(kθ)·w on the half grid for k = 0..need
    let cos_table: Vec<Vec<f64>> = (0..=need)
        .map(|k| {
            thetas
                .iter()
                .zip(&weights)
                .map(|(t, w)| (k as f64 * t).cos() * w)
                .collect()
        })
        .collect();

    // per-variable tables exp(t_j · 2cos jθ) · (node phase) over the contour nodes
    let factor_tables: Vec<Vec<Vec<Complex64>>> = vars
        .iter()
        .map(|v| {
            (0..v.nodes)
                .map(|a| {
                    let t = Complex64::from_polar(v.radius, 2.0 * PI * a as f64 / v.nodes as f64);
                    thetas
                        .iter()
                        .map(|th| (t * (2.0 * (v.j as f64 * th).cos())).exp())
                        .collect()
                })
                .collect()
        })
        .collect();
    let phase = |v: &Variable, a: usize| {
        let mut z = Complex64::from_polar(1.0, -2.0 * PI * (a * v.power) as f64 / v.nodes as f64);
        if include_deterministic {
            let t = Complex64::from_polar(v.radius, 2.0 * PI * a as f64 / v.nodes as f64);
            z *= (t * deterministic_power_sum(spec, v.j)).exp();
        }
        z
    };

    let nv = vars.len();
    let grid_len = thetas.len();
    let mut partial = vec![vec![Complex64::new(1.0, 0.0); grid_len]; nv + 1];
    let mut partial_phase = vec![Complex64::new(1.0, 0.0); nv + 1];
    let mut idx = vec![0usize; nv];
    let mut total = Complex64::new(0.0, 0.0);
    let mut level = 0;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); need + 1];
    // odometer over the tensor grid; partial[l+1] = partial[l] ⊙ table_l[idx_l]
    loop {
        while level < nv {
            let tab = &factor_tables[level][idx[level]];
            let (lo, hi) = partial.split_at_mut(level + 1);
            for ((dst, a), b) in hi[0].iter_mut().zip(&lo[level]).zip(tab) {
                *dst = a * b;
            }
            partial_phase[level + 1] = partial_phase[level] * phase(&vars[level], idx[level]);
            level += 1;
        }
        let sym = &partial[nv];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = sym.iter().zip(&cos_table[k]).map(|(s, w)| s * *w).sum();
        }
        let value = if q == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            let a = gram_matrix_with(spec.ab, q, |k| coeffs[k.unsigned_abs() as usize]);
            det(a, q).value()
        };
        total += value * partial_phase[nv];

        // advance the odometer
        loop {
            if level == 0 {
                break;
            }
            level -= 1;
            idx[level] += 1;
            if idx[level] < vars[level].nodes {
                break;
            }
            idx[level] = 0;
        }
        if level == 0 && idx[0] == 0 {
            break;
        }
    }

    let norm: f64 = vars
        .iter()
        .map(|v| v.nodes as f64 * v.radius.powi(v.power as i32))
        .product();
    let coeff = total / norm;
    let fact: f64 = vars.iter().map(|v| ln_factorial(v.power as u64)).sum::<f64>().exp();
    let moment = coeff * fact;
    let scale = moment.re.abs().max(1.0);
    if moment.im.abs() > 1e-6 * scale {
        return Err(Error::NonConvergence {
            what: "moment contour extraction (imaginary residue)",
            previous: moment.re,
            last: moment.im,
        });
    }
    Ok(moment.re)
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentEntry {
    /// (j, m_j) pairs.
    pub multiplicities: Vec<(usize, usize)>,
    pub weight: usize,
    pub in_range: bool,
    pub group: f64,
    pub gaussian: f64,
    pub rel_diff: f64,
    /// In-range entries must match; out-of-range entries always pass.
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub spec: GroupSpec,
    pub max_weight: usize,
    pub range: usize,
    pub tolerance: f64,
    pub entries: Vec<MomentEntry>,
    /// Smallest weight at which some entry disagrees, if any.
    pub first_mismatch_weight: Option<usize>,
}

impl MomentReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

/// Relative tolerance for in-range moment identities, measured against max(1, |gaussian|).
pub const MOMENT_TOLERANCE: f64 = 1e-7;

pub fn moment_identity_check(spec: &GroupSpec, max_weight: usize) -> Result<MomentReport> {
    let mut entries = Vec::new();
    let mut first_mismatch = None;
    for w in 1..=max_weight {
        for part in partitions(w)? {
            let gauss = gaussian_side_moment(spec, &part.multiplicities);
            let group = group_moment_exact(spec, &part.multiplicities, ContourOptions::default())?;
            let rel_diff = (group - gauss.value).abs() / gauss.value.abs().max(1.0);
            let matches = rel_diff <= MOMENT_TOLERANCE;
            if !matches && first_mismatch.is_none() {
                first_mismatch = Some(w);
            }
            entries.push(MomentEntry {
                multiplicities: part.multiplicities.iter().map(|(&j, &m)| (j, m)).collect(),
                weight: w,
                in_range: gauss.in_range(),
                group,
                gaussian: gauss.value,
                rel_diff,
                pass: matches || !gauss.in_range(),
            });
        }
    }
    Ok(MomentReport {
        spec: spec.clone(),
        max_weight,
        range: spec.moment_range(),
        tolerance: MOMENT_TOLERANCE,
        entries,
        first_mismatch_weight: first_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{group_spec, GroupKind};

    fn mult(pairs: &[(usize, usize)]) -> Multiplicities {
        pairs.iter().cloned().collect()
    }

    #[test]
    fn partition_examples() {
        assert_eq!(partitions(4).unwrap().len(), 5);
        assert_eq!(partitions(0).unwrap().len(), 1);
        assert_eq!(Partition::from_parts(vec![2, 2]).z(), 8.0);
        assert_eq!(Partition::from_parts(vec![1, 2]).z(), 2.0);
        assert!(partitions(31).is_err());
    }

    #[test]
    fn exponential_formula_trivial_cases() {
        assert!(verify_exponential_formula(&[0.0; 6], 0.5).unwrap() < 1e-13);
        assert!(verify_exponential_formula(&[1.0; 8], 0.5).unwrap() < 1e-12);
    }

    #[test]
    fn gaussian_examples() {
        let sp = group_spec(GroupKind::Sp, 2).unwrap();
        assert!((gaussian_side_moment(&sp, &mult(&[(2, 2)])).value - 3.0).abs() < 1e-14);
        let op = group_spec(GroupKind::OEvenPlus, 1).unwrap();
        assert!((gaussian_side_moment(&op, &mult(&[(1, 2)])).value - 1.0).abs() < 1e-14);
        let om = group_spec(GroupKind::OOddMinus, 1).unwrap();
        assert!((gaussian_side_moment(&om, &mult(&[(1, 1)])).value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn group_examples() {
        let sp = group_spec(GroupKind::Sp, 2).unwrap();
        let v = group_moment_exact(&sp, &mult(&[(2, 2)]), ContourOptions::default()).unwrap();
        assert!((v - 3.0).abs() < 1e-9, "{v}");
        let op = group_spec(GroupKind::OEvenPlus, 1).unwrap();
        let v = group_moment_exact(&op, &mult(&[(1, 2)]), ContourOptions::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
        assert_eq!(
            group_moment_exact(&op, &mult(&[]), ContourOptions::default()).unwrap(),
            1.0
        );
    }
}
