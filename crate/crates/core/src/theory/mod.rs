//! Executable versions of the analytic objects and probability bounds
//! behind the recovery threshold.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod analytic;
pub mod checks;
pub mod normal;

pub use analytic::{
    analytic_grid_checks, f_alpha, final_expression, final_function_check, g_alpha_beta,
    second_branch_knee, union_bound_diagnostic, UnionBoundDiagnostic, UnionBoundRow,
};
pub use checks::{
    bivariate_check, bivariate_tail_bounds, event_a_check, event_a_estimate, hanson_wright_demo,
    max_tc_gaussian_check, BivariateTail, EventAEstimate, HansonWrightFit, MatrixKind,
};
pub use normal::{phi_bar, phi_bar_inv};

/// Outcome of one lemma check. `margin = bound − observed`; the check passes
/// when `margin ≥ −tolerance`, with `tolerance` three standard errors for
/// Monte Carlo checks and zero for deterministic ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub observed: f64,
    pub bound: f64,
    pub margin: f64,
    pub samples: u64,
    pub tolerance: f64,
    pub pass: bool,
    pub confidence_note: String,
}

impl BoundCheck {
    pub fn new(
        name: impl Into<String>,
        observed: f64,
        bound: f64,
        samples: u64,
        tolerance: f64,
        confidence_note: String,
    ) -> Self {
        let margin = bound - observed;
        Self {
            name: name.into(),
            observed,
            bound,
            margin,
            samples,
            tolerance,
            pass: margin >= -tolerance,
            confidence_note,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain record serializes")
    }
}

/// `ρ² = (4 log n − log log n − a_n)/n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub n: usize,
    pub a_n: f64,
    pub rho: f64,
}

impl ThresholdSpec {
    pub fn new(n: usize, a_n: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("n = {n} must be at least 3")));
        }
        let nf = n as f64;
        let num = 4.0 * nf.ln() - nf.ln().ln() - a_n;
        if !(num > 0.0 && num < nf) || !a_n.is_finite() {
            return Err(Error::Domain(format!(
                "a_n = {a_n} puts rho^2 = {} outside (0, 1)",
                num / nf
            )));
        }
        Ok(Self {
            n,
            a_n,
            rho: (num / nf).sqrt(),
        })
    }

    /// `t_n = √(4 log n − log log n − a_n) = ρ√n`.
    pub fn t_n(&self) -> f64 {
        self.rho * (self.n as f64).sqrt()
    }
}

/// `exp(a_n/2) / (4√(2π))`.
pub fn predicted_transposition_mean(spec: &ThresholdSpec) -> f64 {
    (spec.a_n / 2.0).exp() / (4.0 * (2.0 * PI).sqrt())
}

/// `(1−c)²·m²/s`, a lower bound on `P(Y ≥ c·m)` for `m = E[Y]`, `s = E[Y²]`.
pub fn paley_zygmund_bound(mean: f64, second_moment: f64, c: f64) -> Result<f64> {
    if !(mean > 0.0) || !(second_moment >= mean * mean) || !second_moment.is_finite() {
        return Err(Error::InvalidInput(format!(
            "need mean > 0 and second moment >= mean^2, got {mean} and {second_moment}"
        )));
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Domain(format!("c = {c} is outside [0, 1]")));
    }
    Ok((1.0 - c).powi(2) * mean * mean / second_moment)
}
