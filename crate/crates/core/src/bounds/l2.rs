//! Desk-scale L² distance between the characteristic function and the Gaussian one.

use serde::Serialize;
use std::f64::consts::PI;

use crate::detform::char_fn_det;
use crate::special::erf;
use crate::{Error, GroupSpec, Result};

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Relative agreement required between successive panel refinements.
pub const L2_AGREEMENT: f64 = 1e-6;
const MAX_PANELS: usize = 256;

/// Tensor Gauss–Legendre grid over [−R, R]^m.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct L2Grid {
    pub radius: f64,
    /// Initial number of panels per axis; doubled until two levels agree.
    pub panels: usize,
}

impl Default for L2Grid {
    fn default() -> Self {
        L2Grid { radius: 6.0, panels: 3 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct L2Distance {
    pub value: f64,
    /// ∫ over the grid box of |F − e^{−‖ξ‖²/2}|².
    pub inside: f64,
    /// ∫ of e^{−‖ξ‖²} outside the box, added analytically.
    pub gaussian_tail: f64,
    pub panels: usize,
    /// Relative change at the last refinement.
    pub refinement_change: f64,
}

/// Nodes and weights of `panels` 8-point Gauss–Legendre panels on [a, b].
fn composite_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(8 * panels);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            out.push((mid - 0.5 * h * x, 0.5 * h * w));
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

fn box_integral(spec: &GroupSpec, m: usize, radius: f64, panels: usize) -> Result<f64> {
    let gap = |xi: &[f64]| -> Result<f64> {
        let r2: f64 = xi.iter().map(|x| x * x).sum();
        Ok((char_fn_det(spec, xi)? - (-0.5 * r2).exp()).norm_sqr())
    };
    // The integrand is even under ξ ↦ −ξ, so only half of the box is visited.
    let half = composite_rule(0.0, radius, panels);
    if m == 1 {
        let mut acc = 0.0;
        for &(x, w) in &half {
            acc += w * gap(&[x])?;
        }
        return Ok(2.0 * acc);
    }
    let full = composite_rule(-radius, radius, 2 * panels);
    let mut acc = 0.0;
    for &(x, wx) in &full {
        for &(y, wy) in &half {
            acc += wx * wy * gap(&[x, y])?;
        }
    }
    Ok(2.0 * acc)
}

/// (∫_{ℝ^m} |F(ξ) − e^{−‖ξ‖²/2}|² dξ)^{1/2} for m ≤ 2, integrating over the
/// box [−R, R]^m and adding only the Gaussian part of the integrand outside it.
pub fn l2_distance_exact(spec: &GroupSpec, m: usize, grid: L2Grid) -> Result<L2Distance> {
    if !(1..=2).contains(&m) {
        return Err(Error::InvalidArgument(format!("l2 distance needs m in 1..=2, got {m}")));
    }
    let mf = m as f64;
    let lambda1 = spec.density_index() as f64 / (2.0 * mf * (mf.ln() + 1.0).sqrt());
    if grid.radius < lambda1 {
        return Err(Error::InvalidArgument(format!(
            "grid radius {} is below Lambda1 = {lambda1}",
            grid.radius
        )));
    }
    let inside_mass = (PI.sqrt() * erf(grid.radius)).powi(m as i32);
    let gaussian_tail = (PI.powf(0.5 * mf) - inside_mass).max(0.0);

    let mut panels = grid.panels.max(1);
    let mut prev = box_integral(spec, m, grid.radius, panels)?;
    loop {
        let next = box_integral(spec, m, grid.radius, 2 * panels)?;
        panels *= 2;
        let change = (next - prev).abs() / next.abs().max(f64::MIN_POSITIVE);
        if change <= L2_AGREEMENT {
            return Ok(L2Distance {
                value: (next + gaussian_tail).sqrt(),
                inside: next,
                gaussian_tail,
                panels,
                refinement_change: change,
            });
        }
        if panels >= MAX_PANELS {
            return Err(Error::NonConvergence {
                what: "L2 distance quadrature",
                previous: prev,
                last: next,
            });
        }
        prev = next;
    }
}
