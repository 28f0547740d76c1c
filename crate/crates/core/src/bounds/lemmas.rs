//! Randomized verification of the auxiliary inequalities behind the theorems.

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::f64::consts::{E, PI};

use super::check::{worst_of, Check, SuiteSummary};
use crate::groups::{density_for_variant, density_sup_bound, group_spec_for_index, GroupKind};
use crate::sampling::{box_tail, draw_rng, sample_batch_stream};
use crate::special::{gaussian_q, ln_gamma, ln_stirling_bracket};
use crate::symbols::{build_test_function, fourier_coeffs_adaptive, TrigPoly};
use crate::Result;

fn random_kind(rng: &mut ChaCha20Rng) -> GroupKind {
    GroupKind::ALL[rng.random_range(0..GroupKind::ALL.len())]
}

/// ln(1 + s²) without overflow.
fn ln_one_plus_square(s: f64) -> f64 {
    if s.abs() > 1e150 {
        2.0 * s.abs().ln()
    } else {
        (s * s).ln_1p()
    }
}

/// 1 + (sinh x / y)² ≤ exp((x/y)²) for y ∈ [−1,1]∖{0}, x ∈ [−5,5].
pub fn sinh_square_suite(trials: usize, rng: &mut ChaCha20Rng) -> SuiteSummary {
    let mut suite = SuiteSummary::new("sinh-square", "0 < |y| <= 1");
    for _ in 0..trials {
        let x: f64 = rng.random_range(-5.0..=5.0);
        let mut y: f64 = 0.0;
        while y == 0.0 {
            y = rng.random_range(-1.0..=1.0);
        }
        let lhs = ln_one_plus_square(x.sinh() / y);
        let rhs = (x / y).powi(2);
        suite.record(Check::le_log(&suite.name.clone(), "", lhs, rhs, 1e-12 * rhs.max(1.0)));
    }
    suite
}

/// y^x / Γ(x+1) is decreasing on [y, y+10], y ∈ (0, 20], sampled on 65 points.
pub fn gamma_ratio_suite(trials: usize, rng: &mut ChaCha20Rng) -> SuiteSummary {
    let mut suite = SuiteSummary::new("gamma-ratio-monotone", "x >= y > 0");
    for _ in 0..trials {
        let y = 20.0 * (1.0 - rng.random::<f64>());
        let f = |x: f64| x * y.ln() - ln_gamma(x + 1.0);
        let checks = (0..64)
            .map(|i| {
                let (a, b) = (y + 10.0 * i as f64 / 64.0, y + 10.0 * (i + 1) as f64 / 64.0);
                let (fa, fb) = (f(a), f(b));
                Check::le_log("gamma-ratio-monotone", "", fb, fa, 1e-12 * fa.abs().max(1.0))
            })
            .collect();
        suite.record(worst_of(checks).unwrap());
    }
    suite
}

/// |(e^{2 Im g₊})^_k| ≤ 2e^ρ ρ^{⌈k/m⌉}/⌈k/m⌉! for k ≥ 2mρ, random ξ with ‖ξ‖ ≤ 2.5.
pub fn fourier_decay_suite(trials: usize, rng: &mut ChaCha20Rng) -> Result<SuiteSummary> {
    let mut suite = SuiteSummary::new("fourier-decay", "k >= 2 m rho");
    for _ in 0..trials {
        let m = rng.random_range(1..=5usize);
        let spec = group_spec_for_index(random_kind(rng), rng.random_range(1..=6))?;
        let dir: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        let norm = 2.5 * (1.0 - rng.random::<f64>());
        let xi: Vec<f64> = dir.iter().map(|x| x * norm / len).collect();
        let tf = build_test_function(&spec, &xi)?;
        let rho = tf.rho();
        let k0 = ((2.0 * m as f64 * rho).ceil() as usize).max(1);
        let k1 = k0 + 8 * m + 32;
        let table = fourier_coeffs_adaptive(|t| tf.exp_two_im_gplus(t), k1)?;
        let kmax = table.k_max() as i64;
        let sup = (-kmax..=kmax).map(|k| table.get(k).norm()).fold(0.0, f64::max);
        let floor = 1e-13 * sup;
        let checks = (k0..=k1)
            .map(|k| {
                let c = k.div_ceil(m) as f64;
                let bound = (2f64.ln() + rho + c * rho.ln() - ln_gamma(c + 1.0)).exp();
                Check::le("fourier-decay", "", table.get(k as i64).norm(), bound, floor)
            })
            .collect();
        suite.record(worst_of(checks).unwrap());
    }
    Ok(suite)
}

/// Grid points per axis for the density sup search at density index q.
fn sup_grid(q: usize) -> usize {
    match q {
        1 => 10_000,
        2 => 100,
        _ => 22,
    }
}

/// Grid sup of the eigenangle density ≤ (2e/π)^q/√(2πq), q ∈ {1,2,3}, shifted random grids.
pub fn density_sup_suite(trials: usize, rng: &mut ChaCha20Rng) -> Result<SuiteSummary> {
    let mut suite = SuiteSummary::new("density-sup", "q in {1,2,3}");
    for _ in 0..trials {
        let q = rng.random_range(1..=3usize);
        let spec = group_spec_for_index(random_kind(rng), q)?;
        let g = sup_grid(q);
        let h = PI / g as f64;
        let offset = rng.random::<f64>() * h;
        let mut idx = vec![0usize; q];
        let mut angles = vec![0.0; q];
        let mut sup: f64 = 0.0;
        'grid: loop {
            for (a, &i) in angles.iter_mut().zip(&idx) {
                *a = offset + i as f64 * h;
            }
            sup = sup.max(density_for_variant(spec.ab, &angles));
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < g {
                    continue 'grid;
                }
                *slot = 0;
            }
            break;
        }
        suite.record(Check::le("density-sup", "", sup, density_sup_bound(q), 0.0));
    }
    Ok(suite)
}

/// Sorted |p| on a uniform grid of the circle; G(t) is then a binary search.
pub struct LevelSets {
    values: Vec<f64>,
}

impl LevelSets {
    pub fn new(p: &TrigPoly, grid: usize) -> Self {
        let mut values: Vec<f64> = (0..grid)
            .map(|i| p.eval(2.0 * PI * i as f64 / grid as f64).abs())
            .collect();
        values.sort_by(f64::total_cmp);
        LevelSets { values }
    }

    /// Normalized measure of {θ : |p(θ)| ≤ t}.
    pub fn measure(&self, t: f64) -> f64 {
        self.values.partition_point(|&v| v <= t) as f64 / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn grid(&self) -> usize {
        self.values.len()
    }
}

/// The level-set bound 2e(t/(√2‖p‖₂))^{1/(2 deg p)}.
pub fn level_set_bound(p: &TrigPoly, t: f64) -> f64 {
    2.0 * E * (t / (2f64.sqrt() * p.l2_norm())).powf(1.0 / (2.0 * p.degree() as f64))
}

pub const LEVEL_SET_GRID: usize = 1_000_000;
const LEVELS_PER_POLY: usize = 50;

/// G(t) ≤ 2e(t/(√2‖p‖₂))^{1/2m} for random p of degree ≤ 5, G by grid counting
/// with half a cell added to the measured side.
pub fn level_set_suite(trials: usize, rng: &mut ChaCha20Rng) -> SuiteSummary {
    let mut suite = SuiteSummary::new("level-set", "deg p in 1..=5");
    let polys = trials.div_ceil(LEVELS_PER_POLY);
    for _ in 0..polys {
        let d = rng.random_range(1..=5usize);
        let cos: Vec<f64> = (0..=d).map(|_| rng.sample(StandardNormal)).collect();
        let sin: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let p = TrigPoly::new(cos, sin);
        let sets = LevelSets::new(&p, LEVEL_SET_GRID);
        for _ in 0..LEVELS_PER_POLY {
            let t = sets.max() * (1.0 - rng.random::<f64>());
            let lhs = sets.measure(t) + 0.5 / sets.grid() as f64;
            suite.record(Check::le("level-set", "", lhs, level_set_bound(&p, t), 0.0));
        }
    }
    suite
}

/// √(2π)x^{x+1/2}e^{−x} < Γ(x+1) < e^{1/12x}·(same), x ∈ (0, 50].
pub fn stirling_suite(trials: usize, rng: &mut ChaCha20Rng) -> SuiteSummary {
    let mut suite = SuiteSummary::new("stirling", "0 < x <= 50");
    for _ in 0..trials {
        let x = 50.0 * (1.0 - rng.random::<f64>());
        suite.record(stirling_check(x));
    }
    suite
}

pub fn stirling_check(x: f64) -> Check {
    let (lo, hi) = ln_stirling_bracket(x);
    let g = ln_gamma(x + 1.0);
    let mut checks = vec![
        Check::le_log("stirling-lower", "", lo, g, 0.0),
        Check::le_log("stirling-upper", "", g, hi, 0.0),
    ];
    for c in &mut checks {
        c.pass = c.lhs < c.rhs;
    }
    worst_of(checks).unwrap()
}

/// Dimension and density index used for the Monte-Carlo tail check.
pub const TAIL_M: usize = 4;
pub const TAIL_Q: usize = 64;

/// P[X ∉ □_L] ≤ 2m e^{−L²/80m} + 5·stderr at m = 4, density index 64 (n ≥ m³),
/// for L above the lemma's threshold. `trials` counts Monte-Carlo draws, spread
/// over the five kinds.
pub fn trace_tail_suite(trials: usize, seed: u64, stream_base: u32) -> Result<SuiteSummary> {
    let (m, q) = (TAIL_M as f64, TAIL_Q as f64);
    let threshold = 2.0 * 6f64.sqrt() * m * m / (q - 1.0).sqrt();
    let mut suite = SuiteSummary::new("trace-tail", "m >= 4, n >= m^3, L > 2 sqrt(6) m^2 / sqrt(n - 1)");
    let per_kind = trials.div_ceil(GroupKind::ALL.len());
    let mut draws = 0;
    for (i, kind) in GroupKind::ALL.iter().enumerate() {
        let spec = group_spec_for_index(*kind, TAIL_Q)?;
        let batch = sample_batch_stream(&spec, TAIL_M, per_kind, seed, stream_base + i as u32)?;
        draws += per_kind;
        for l in [threshold * 1.01, 12.0, 16.0] {
            let est = box_tail(&batch, l);
            let rhs = 2.0 * m * (-l * l / (80.0 * m)).exp();
            let gate = format!("{} L = {l:.3}", kind.name());
            suite.record(Check::le("trace-tail", &gate, est.mean, rhs, 5.0 * est.stderr));
        }
    }
    suite.trials = draws;
    Ok(suite)
}

/// The Gaussian box-tail chain (2Q(L/2))^m ≤ (4/(√(2π)L) e^{−L²/8})^m ≤ e^{−mL²/8}
/// for L ≥ √3, plus a diagnostic suite comparing the true tail 1 − (1 − 2Q(L/2))^m
/// with the same right-hand side.
pub fn gaussian_box_tail_suites(trials: usize, rng: &mut ChaCha20Rng) -> (SuiteSummary, SuiteSummary) {
    let mut chain = SuiteSummary::new("gaussian-box-tail", "L >= sqrt(3)");
    let mut exact = SuiteSummary::new("gaussian-box-tail-exact", "L >= sqrt(3)").diagnostic();
    for _ in 0..trials {
        let m = rng.random_range(1..=64usize) as f64;
        let l = rng.random_range(3f64.sqrt()..=30.0);
        let q2 = 2.0 * gaussian_q(0.5 * l);
        let ln_product = m * q2.ln();
        let ln_mid = m * ((4.0 / ((2.0 * PI).sqrt() * l)).ln() - l * l / 8.0);
        let ln_rhs = -m * l * l / 8.0;
        chain.record(
            worst_of(vec![
                Check::le_log("gaussian-box-tail", "", ln_product, ln_mid, 1e-12 * ln_mid.abs()),
                Check::le_log("gaussian-box-tail", "", ln_mid, ln_rhs, 1e-12 * ln_rhs.abs()),
            ])
            .unwrap(),
        );
        let ln_true = (-(m * (-q2).ln_1p()).exp_m1()).ln();
        exact.record(Check::le_log("gaussian-box-tail-exact", "", ln_true, ln_rhs, 0.0));
    }
    (chain, exact)
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaSuiteReport {
    pub trials: usize,
    pub seed: u64,
    pub suites: Vec<SuiteSummary>,
}

impl LemmaSuiteReport {
    /// Every non-diagnostic suite ran and saw no violation.
    pub fn all_pass(&self) -> bool {
        self.suites.iter().filter(|s| !s.diagnostic).all(|s| s.passed())
    }
}

/// All eight auxiliary suites with `trials` randomized trials each.
pub fn lemma_suite(trials: usize, seed: u64) -> Result<LemmaSuiteReport> {
    let trials = trials.max(1);
    let rng = |stream: u32| draw_rng(seed, 0xB0_0000 + stream, 0);
    let mut suites = vec![
        sinh_square_suite(trials, &mut rng(0)),
        gamma_ratio_suite(trials, &mut rng(1)),
        fourier_decay_suite(trials, &mut rng(2))?,
        density_sup_suite(trials, &mut rng(3))?,
        level_set_suite(trials, &mut rng(4)),
        stirling_suite(trials, &mut rng(5)),
        trace_tail_suite(trials, seed, 0xB1_0000)?,
    ];
    let (chain, exact) = gaussian_box_tail_suites(trials, &mut rng(7));
    suites.push(chain);
    suites.push(exact);
    Ok(LemmaSuiteReport { trials, seed, suites })
}
