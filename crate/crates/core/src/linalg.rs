//! Dense complex determinants by LU with partial pivoting.

use num_complex::Complex64;
use serde::Serialize;

/// Pivot-magnitude ratio above which a determinant is flagged as ill-conditioned.
pub const CONDITION_WARN_RATIO: f64 = 1e12;

/// Determinant stored as log-magnitude plus unit phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogDet {
    pub ln_abs: f64,
    pub phase: Complex64,
}

impl LogDet {
    pub const ONE: LogDet = LogDet {
        ln_abs: 0.0,
        phase: Complex64 { re: 1.0, im: 0.0 },
    };

    pub fn from_value(z: Complex64) -> Self {
        let r = z.norm();
        if r == 0.0 {
            LogDet {
                ln_abs: f64::NEG_INFINITY,
                phase: Complex64::new(1.0, 0.0),
            }
        } else {
            LogDet {
                ln_abs: r.ln(),
                phase: z / r,
            }
        }
    }

    pub fn value(&self) -> Complex64 {
        self.phase * self.ln_abs.exp()
    }

    pub fn mul(&self, other: &LogDet) -> LogDet {
        LogDet {
            ln_abs: self.ln_abs + other.ln_abs,
            phase: self.phase * other.phase,
        }
    }

    pub fn scale(&self, factor: f64) -> LogDet {
        self.mul(&LogDet::from_value(Complex64::new(factor, 0.0)))
    }
}

/// Result of a determinant evaluation with its conditioning diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct DetValue {
    pub log_det: LogDet,
    /// max |pivot| / min |pivot|; infinite for singular matrices.
    pub pivot_ratio: f64,
    pub warning: Option<String>,
}

impl DetValue {
    pub fn value(&self) -> Complex64 {
        self.log_det.value()
    }
}

/// Determinant of a row-major n×n matrix. The input is consumed as scratch.
pub fn det(mut a: Vec<Complex64>, n: usize) -> DetValue {
    assert_eq!(a.len(), n * n, "matrix buffer does not match size");
    let mut ln_abs = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    let mut max_piv: f64 = 0.0;
    let mut min_piv = f64::INFINITY;
    for col in 0..n {
        let (piv_row, piv_abs) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        max_piv = max_piv.max(piv_abs);
        min_piv = min_piv.min(piv_abs);
        if piv_abs == 0.0 {
            return DetValue {
                log_det: LogDet::from_value(Complex64::new(0.0, 0.0)),
                pivot_ratio: f64::INFINITY,
                warning: Some("matrix is singular".into()),
            };
        }
        if piv_row != col {
            for k in 0..n {
                a.swap(piv_row * n + k, col * n + k);
            }
            phase = -phase;
        }
        let piv = a[col * n + col];
        ln_abs += piv_abs.ln();
        phase *= piv / piv_abs;
        for r in col + 1..n {
            let f = a[r * n + col] / piv;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col + 1..n {
                let sub = f * a[col * n + k];
                a[r * n + k] -= sub;
            }
        }
    }
    let pivot_ratio = if n == 0 { 1.0 } else { max_piv / min_piv };
    let warning = (pivot_ratio > CONDITION_WARN_RATIO)
        .then(|| format!("ill-conditioned determinant (pivot ratio {pivot_ratio:.3e})"));
    DetValue {
        log_det: LogDet { ln_abs, phase },
        pivot_ratio,
        warning,
    }
}
