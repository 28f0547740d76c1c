use serde::Serialize;

/// One inequality instance `lhs ≤ rhs`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub gate: String,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs, in log units when `log_scale` is set.
    pub margin: f64,
    pub log_scale: bool,
    pub pass: bool,
}

impl Check {
    /// `lhs ≤ rhs + slack`.
    pub fn le(name: &str, gate: &str, lhs: f64, rhs: f64, slack: f64) -> Check {
        Check {
            name: name.to_string(),
            gate: gate.to_string(),
            lhs,
            rhs,
            margin: rhs - lhs,
            log_scale: false,
            pass: lhs <= rhs + slack,
        }
    }

    /// Same comparison on logarithms.
    pub fn le_log(name: &str, gate: &str, ln_lhs: f64, ln_rhs: f64, slack: f64) -> Check {
        Check {
            log_scale: true,
            ..Check::le(name, gate, ln_lhs, ln_rhs, slack)
        }
    }
}

const KEPT_FAILURES: usize = 16;

/// Tally of a randomized inequality suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub name: String,
    pub gate: String,
    pub trials: usize,
    /// Draws whose gate did not hold.
    pub skipped: usize,
    pub violations: usize,
    /// Check with the smallest margin seen.
    pub worst: Option<Check>,
    pub failures: Vec<Check>,
    /// Reported for information only; does not count towards pass/fail.
    pub diagnostic: bool,
}

impl SuiteSummary {
    pub fn new(name: &str, gate: &str) -> Self {
        SuiteSummary {
            name: name.to_string(),
            gate: gate.to_string(),
            trials: 0,
            skipped: 0,
            violations: 0,
            worst: None,
            failures: Vec::new(),
            diagnostic: false,
        }
    }

    pub fn diagnostic(mut self) -> Self {
        self.diagnostic = true;
        self
    }

    pub fn record(&mut self, check: Check) {
        self.trials += 1;
        if !check.pass {
            self.violations += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(check.clone());
            }
        }
        let tighter = match &self.worst {
            None => true,
            Some(w) => check.margin < w.margin || (w.margin.is_nan() && !check.margin.is_nan()),
        };
        if tighter {
            self.worst = Some(check);
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.trials > 0
    }
}

/// The worst (smallest-margin) check of a group, used to fold several
/// sub-checks of one randomized trial into a single record.
pub fn worst_of(checks: Vec<Check>) -> Option<Check> {
    let failing = checks.iter().any(|c| !c.pass);
    let mut it = checks.into_iter();
    let first = it.next()?;
    let mut worst = it.fold(first, |w, c| if c.margin < w.margin { c } else { w });
    worst.pass = !failing;
    Some(worst)
}
