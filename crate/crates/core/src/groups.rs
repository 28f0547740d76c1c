//! The five Haar ensembles and their joint eigenangle densities.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_factorial;

/// Matrix family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    /// O(2n) with determinant +1.
    OEvenPlus,
    /// O(2n) with determinant −1 (forced eigenvalues at +1 and −1).
    OEvenMinus,
    /// O(2n+1) with determinant +1 (forced eigenvalue +1).
    OOddPlus,
    /// O(2n+1) with determinant −1 (forced eigenvalue −1).
    OOddMinus,
    /// Unitary symplectic group Sp(2n).
    Sp,
}

impl GroupKind {
    pub const ALL: [GroupKind; 5] = [
        GroupKind::OEvenPlus,
        GroupKind::OEvenMinus,
        GroupKind::OOddPlus,
        GroupKind::OOddMinus,
        GroupKind::Sp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GroupKind::OEvenPlus => "o-even-plus",
            GroupKind::OEvenMinus => "o-even-minus",
            GroupKind::OOddPlus => "o-odd-plus",
            GroupKind::OOddMinus => "o-odd-minus",
            GroupKind::Sp => "sp",
        }
    }

    pub fn is_orthogonal(self) -> bool {
        self != GroupKind::Sp
    }

    pub fn min_n(self) -> usize {
        match self {
            GroupKind::OEvenMinus => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown group kind '{s}'")))
    }
}

/// Jacobi weight exponents (a, b) ∈ {±1/2}², named by their signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    MinusMinus,
    PlusPlus,
    MinusPlus,
    PlusMinus,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::MinusPlus,
        Variant::PlusMinus,
        Variant::PlusPlus,
        Variant::MinusMinus,
    ];

    pub fn a(self) -> f64 {
        match self {
            Variant::MinusMinus | Variant::MinusPlus => -0.5,
            Variant::PlusPlus | Variant::PlusMinus => 0.5,
        }
    }

    pub fn b(self) -> f64 {
        match self {
            Variant::MinusMinus | Variant::PlusMinus => -0.5,
            Variant::PlusPlus | Variant::MinusPlus => 0.5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Variant::MinusMinus => "(-,-)",
            Variant::PlusPlus => "(+,+)",
            Variant::MinusPlus => "(-,+)",
            Variant::PlusMinus => "(+,-)",
        }
    }
}

/// Ensemble bookkeeping: the conventional index `n` and the number of
/// random eigenangles actually carried by the density.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub n: usize,
    pub ab: Variant,
    pub num_angles: usize,
    pub det_eigs: Vec<i8>,
    pub matrix_dim: usize,
}

pub fn group_spec(kind: GroupKind, n: usize) -> Result<GroupSpec> {
    if n < kind.min_n() {
        return Err(Error::InvalidN {
            kind: kind.name(),
            n,
            reason: if kind == GroupKind::OEvenMinus {
                "O(2n) with det -1 needs n >= 2 to carry a random angle"
            } else {
                "n must be at least 1"
            },
        });
    }
    let (ab, num_angles, det_eigs) = match kind {
        GroupKind::OEvenPlus => (Variant::MinusMinus, n, vec![]),
        GroupKind::OEvenMinus => (Variant::PlusPlus, n - 1, vec![1, -1]),
        GroupKind::OOddPlus => (Variant::PlusMinus, n, vec![1]),
        GroupKind::OOddMinus => (Variant::MinusPlus, n, vec![-1]),
        GroupKind::Sp => (Variant::PlusPlus, n, vec![]),
    };
    let matrix_dim = 2 * num_angles + det_eigs.len();
    Ok(GroupSpec {
        kind,
        n,
        ab,
        num_angles,
        det_eigs,
        matrix_dim,
    })
}

/// Spec whose random eigenangle count (density index) equals `q`.
pub fn group_spec_for_index(kind: GroupKind, q: usize) -> Result<GroupSpec> {
    let n = if kind == GroupKind::OEvenMinus { q + 1 } else { q };
    group_spec(kind, n)
}

impl GroupSpec {
    /// Index of the density (n − 1 for O(2n)⁻, n otherwise).
    pub fn density_index(&self) -> usize {
        self.num_angles
    }

    /// Largest Σ j·m_j for which the joint trace moments are Gaussian.
    pub fn moment_range(&self) -> usize {
        match self.kind {
            GroupKind::OEvenPlus | GroupKind::OEvenMinus => 2 * self.n - 1,
            GroupKind::OOddPlus | GroupKind::OOddMinus => 2 * self.n,
            GroupKind::Sp => 2 * self.n + 1,
        }
    }
}

/// 1 for even j, 0 for odd j.
pub fn eta(j: usize) -> i32 {
    if j.is_multiple_of(2) {
        1
    } else {
        0
    }
}

/// E[Tr Uᵏ] over the random eigenvalues, optionally adding Σ dᵏ over the forced ones.
pub fn mean_trace(spec: &GroupSpec, k: usize, include_deterministic: bool) -> f64 {
    let e = eta(k) as f64;
    let random = match spec.kind {
        GroupKind::OEvenPlus => e,
        GroupKind::OEvenMinus | GroupKind::Sp => -e,
        GroupKind::OOddPlus => -(1.0 - e),
        GroupKind::OOddMinus => 1.0 - e,
    };
    if include_deterministic {
        random + deterministic_power_sum(spec, k)
    } else {
        random
    }
}

/// Σ dᵏ over the forced eigenvalues.
pub fn deterministic_power_sum(spec: &GroupSpec, k: usize) -> f64 {
    spec.det_eigs
        .iter()
        .map(|&d| if d < 0 && k % 2 == 1 { -1.0 } else { 1.0 })
        .sum()
}

fn ln_density_prefactor(variant: Variant, q: usize) -> f64 {
    let qf = q as f64;
    let ln2_power = match variant {
        Variant::MinusMinus => (qf - 1.0) * (qf - 1.0),
        _ => qf * qf,
    };
    ln2_power * std::f64::consts::LN_2 - ln_factorial(q as u64) - qf * PI.ln()
}

/// Joint density of the random eigenangles on [0, π]^q.
pub fn density_for_variant(variant: Variant, angles: &[f64]) -> f64 {
    let q = angles.len();
    if q == 0 {
        return 1.0;
    }
    let single = |t: f64| -> f64 {
        match variant {
            Variant::MinusMinus => 1.0,
            Variant::PlusPlus => t.sin().powi(2),
            Variant::MinusPlus => (0.5 * t).cos().powi(2),
            Variant::PlusMinus => (0.5 * t).sin().powi(2),
        }
    };
    let mut prod = 1.0;
    for (j, &tj) in angles.iter().enumerate() {
        prod *= single(tj);
        for &tk in &angles[j + 1..] {
            let d = tj.cos() - tk.cos();
            prod *= d * d;
        }
    }
    ln_density_prefactor(variant, q).exp() * prod
}

pub fn eigen_density(spec: &GroupSpec, angles: &[f64]) -> Result<f64> {
    if angles.len() != spec.num_angles {
        return Err(Error::WrongLength {
            expected: spec.num_angles,
            got: angles.len(),
        });
    }
    Ok(density_for_variant(spec.ab, angles))
}

/// Z = πⁿ n! / 2^{n² − (1−a−b)n + 1[a,b<0]}, the normalizer of
/// Π(1−x)^a(1+x)^b Π(x_j−x_k)² on [−1,1]ⁿ.
pub fn normalization_constant(variant: Variant, n: usize) -> f64 {
    let nf = n as f64;
    let indicator = if variant == Variant::MinusMinus { 1.0 } else { 0.0 };
    let exponent = nf * nf - (1.0 - variant.a() - variant.b()) * nf + indicator;
    (nf * PI.ln() + ln_factorial(n as u64) - exponent * std::f64::consts::LN_2).exp()
}

/// Upper bound (2e/π)^q / √(2πq) on any of the angle densities.
pub fn density_sup_bound(q: usize) -> f64 {
    let qf = q as f64;
    (2.0 * std::f64::consts::E / PI).powf(qf) / (2.0 * PI * qf).sqrt()
}
