//! Closed-form functions of the correlation-corrected first moment argument.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::edge_displacement_bounds;

use super::BoundCheck;

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {x} is outside [0, 1]")))
    }
}

/// `α²` for `α < 1/2`, `α² − (2α−1)²/2` otherwise.
pub fn f_alpha(alpha: f64) -> Result<f64> {
    check_unit("alpha", alpha)?;
    Ok(if alpha < 0.5 {
        alpha * alpha
    } else {
        alpha * alpha - 0.5 * (2.0 * alpha - 1.0).powi(2)
    })
}

/// `β²/2 + (1−2α)β + α²` on `0 ≤ β ≤ α ≤ 1`.
pub fn g_alpha_beta(alpha: f64, beta: f64) -> Result<f64> {
    check_unit("alpha", alpha)?;
    if !(0.0..=alpha).contains(&beta) {
        return Err(Error::Domain(format!("beta = {beta} is outside [0, {alpha}]")));
    }
    Ok(0.5 * beta * beta + (1.0 - 2.0 * alpha) * beta + alpha * alpha)
}

/// Minimizer of `g(α, ·)` on `[0, α]`.
pub fn g_argmin(alpha: f64) -> Result<f64> {
    check_unit("alpha", alpha)?;
    Ok((2.0 * alpha - 1.0).max(0.0))
}

/// `α(2−α) − √(2α(α(2−α) − f(α)))`.
pub fn final_expression(alpha: f64) -> Result<f64> {
    let v = alpha * (2.0 - alpha);
    let inner = 2.0 * alpha * (v - f_alpha(alpha)?);
    Ok(v - inner.max(0.0).sqrt())
}

/// The cubic `α³ − 4α² + 4α − 1` whose sign decides `f(α) ≥ α² − α³/2` on
/// the second branch; its roots in `[0, 1]` are `(3−√5)/2` and `1`.
pub fn second_branch_reduction(alpha: f64) -> f64 {
    ((alpha - 4.0) * alpha + 4.0) * alpha - 1.0
}

/// Root of [`second_branch_reduction`] in `(0, 1/2)` by bisection.
pub fn second_branch_knee() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if second_branch_reduction(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimum of [`final_expression`] over a closed uniform grid of `[0, 1]`;
/// the check holds when the minimum is at least `−1e-12`.
pub fn final_function_check(grid_size: usize) -> Result<BoundCheck> {
    if grid_size < 2 {
        return Err(Error::Domain("grid_size must be at least 2".into()));
    }
    let mut min = f64::INFINITY;
    let mut at = 0.0;
    for k in 0..grid_size {
        let alpha = k as f64 / (grid_size - 1) as f64;
        let v = final_expression(alpha)?;
        if v < min {
            min = v;
            at = alpha;
        }
    }
    Ok(BoundCheck::new(
        "final_function",
        -min,
        1e-12,
        grid_size as u64,
        0.0,
        format!(
            "min {min:.3e} at alpha {at:.6}; second-branch knee {:.12}",
            second_branch_knee()
        ),
    ))
}

/// Dense-grid checks of `f` and `g`: continuity at 1/2, `0 ≤ f ≤ α(2−α)`,
/// and `min_β g(α, β) = f(α)` up to the β-grid resolution.
pub fn analytic_grid_checks(alpha_points: usize, beta_points: usize) -> Result<Vec<BoundCheck>> {
    if alpha_points < 2 || beta_points < 2 {
        return Err(Error::Domain("grids need at least 2 points".into()));
    }
    let first_branch = |a: f64| a * a;
    let jump = (f_alpha(0.5)? - first_branch(0.5)).abs();
    let mut worst_upper = f64::NEG_INFINITY;
    let mut worst_gap = 0.0f64;
    let mut max_step = 0.0f64;
    for k in 0..alpha_points {
        let alpha = k as f64 / (alpha_points - 1) as f64;
        let f = f_alpha(alpha)?;
        worst_upper = worst_upper.max(f - alpha * (2.0 - alpha)).max(-f);
        let mut gmin = f64::INFINITY;
        for m in 0..beta_points {
            let beta = (alpha * m as f64 / (beta_points - 1) as f64).min(alpha);
            gmin = gmin.min(g_alpha_beta(alpha, beta)?);
        }
        // g has unit curvature in β, so a grid of spacing h misses the
        // minimum by at most h²/2
        let h = alpha / (beta_points - 1) as f64;
        max_step = max_step.max(0.5 * h * h);
        worst_gap = worst_gap.max((gmin - f).abs());
    }
    Ok(vec![
        BoundCheck::new("f_continuity", jump, 1e-12, 2, 0.0, "f at the knee from both branches".into()),
        BoundCheck::new(
            "f_sandwich",
            worst_upper,
            0.0,
            alpha_points as u64,
            0.0,
            "max of f - alpha(2-alpha) and -f".into(),
        ),
        BoundCheck::new(
            "g_minimum",
            worst_gap,
            max_step + 1e-12,
            (alpha_points * beta_points) as u64,
            0.0,
            "max |min_beta g - f| against the grid resolution".into(),
        ),
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionBoundRow {
    pub d: usize,
    /// `d·log n`, the bound on `log #S_{n,d}`.
    pub log_count_bound: f64,
    /// `log(C(n,d)·D_d)`.
    pub log_count: f64,
    /// Displaced edges used for the row: `2(n−2)` at `d = 2`, otherwise
    /// the smallest value compatible with `d`.
    pub d_edge: f64,
    /// `−(ρ²/4)·d·n/2` and `−(ρ²/4)·d·n`, the band endpoints.
    pub log_term_band_low: f64,
    pub log_term_band_high: f64,
    /// `log_count_bound − (ρ²/4)·d_edge`.
    pub log_partial_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionBoundDiagnostic {
    pub n: usize,
    pub rho: f64,
    pub rows: Vec<UnionBoundRow>,
    /// `n log n − ρ²n²/8`.
    pub derangement_term: f64,
    pub naive_bound_explodes: bool,
}

fn ln_derangements(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => f64::NEG_INFINITY,
        // D_d = round(d!/e), relative error below 1/(d+1)!
        _ if d <= 20 => (crate::perm::derangement_number(d).expect("fits in u128") as f64).ln(),
        _ => libm::lgamma(d as f64 + 1.0) - 1.0,
    }
}

pub fn union_bound_diagnostic(n: usize, rho: f64) -> Result<UnionBoundDiagnostic> {
    if n < 3 {
        return Err(Error::Domain(format!("n = {n} must be at least 3")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho = {rho} is outside (0, 1)")));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let r2 = rho * rho;
    let rows = (2..=n)
        .map(|d| {
            let df = d as f64;
            let ln_binom = libm::lgamma(nf + 1.0) - libm::lgamma(df + 1.0) - libm::lgamma(nf - df + 1.0);
            let d_edge = if d == 2 {
                2.0 * (nf - 2.0)
            } else {
                edge_displacement_bounds(n, d).0
            };
            UnionBoundRow {
                d,
                log_count_bound: df * ln_n,
                log_count: ln_binom + ln_derangements(d),
                d_edge,
                log_term_band_low: -0.25 * r2 * df * nf / 2.0,
                log_term_band_high: -0.25 * r2 * df * nf,
                log_partial_sum: df * ln_n - 0.25 * r2 * d_edge,
            }
        })
        .collect();
    let derangement_term = nf * ln_n - r2 * nf * nf / 8.0;
    Ok(UnionBoundDiagnostic {
        n,
        rho,
        rows,
        derangement_term,
        naive_bound_explodes: derangement_term > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_examples() {
        assert!((f_alpha(0.3).unwrap() - 0.09).abs() < 1e-15);
        assert_eq!(f_alpha(1.0).unwrap(), 0.5);
        assert_eq!(f_alpha(0.5).unwrap(), 0.25);
        assert!((f_alpha(0.5 - 1e-13).unwrap() - 0.25).abs() < 1e-12);
        assert!((f_alpha(0.8).unwrap() - 0.46).abs() < 1e-15);
        assert!(f_alpha(1.1).is_err());
        assert!(f_alpha(-0.1).is_err());
    }

    #[test]
    fn g_examples() {
        for a in [0.0, 0.2, 0.7, 1.0] {
            assert_eq!(g_alpha_beta(a, 0.0).unwrap(), a * a);
        }
        let grid_min = (0..=10_000)
            .map(|k| g_alpha_beta(0.8, 0.8 * k as f64 / 10_000.0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((grid_min - 0.46).abs() < 1e-8);
        let (mut best, mut arg) = (f64::INFINITY, -1.0);
        for k in 0..=1000 {
            let b = 0.4 * k as f64 / 1000.0;
            let v = g_alpha_beta(0.4, b).unwrap();
            if v < best {
                best = v;
                arg = b;
            }
        }
        assert_eq!(arg, 0.0);
        assert_eq!(g_argmin(0.4).unwrap(), 0.0);
        assert!((g_argmin(0.8).unwrap() - 0.6).abs() < 1e-15);
        assert!(g_alpha_beta(0.4, 0.5).is_err());
    }

    #[test]
    fn final_function() {
        assert_eq!(final_expression(0.0).unwrap(), 0.0);
        assert!(final_expression(1.0).unwrap().abs() < 1e-15);
        let c = final_function_check(100_000).unwrap();
        assert!(c.pass, "{c:?}");
        let knee = second_branch_knee();
        assert!((knee - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!(second_branch_reduction(knee - 1e-3) < 0.0);
        assert!(second_branch_reduction(knee + 1e-3) > 0.0);
        assert!(second_branch_reduction(1.0).abs() < 1e-15);
        assert!(final_function_check(1).is_err());
    }

    #[test]
    fn reduction_is_equivalent_on_second_branch() {
        // f(α) ≥ α² − α³/2 exactly when the cubic is nonnegative
        for k in 0..=1000 {
            let a = 0.5 + 0.5 * k as f64 / 1000.0;
            let lhs = f_alpha(a).unwrap() - (a * a - a * a * a / 2.0);
            assert!((lhs - second_branch_reduction(a) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_checks_pass() {
        for c in analytic_grid_checks(1000, 1000).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn union_bound_regimes() {
        let n = 10_000usize;
        let ln = (n as f64).ln();
        let strong = union_bound_diagnostic(n, (9.0 * ln / n as f64).sqrt()).unwrap();
        assert!(strong.derangement_term < 0.0);
        assert!(!strong.naive_bound_explodes);
        let weak = union_bound_diagnostic(n, (5.0 * ln / n as f64).sqrt()).unwrap();
        assert!(weak.derangement_term > 0.0);
        assert!(weak.naive_bound_explodes);
        assert!(weak.rows[..10].iter().all(|r| r.log_partial_sum < 0.0));
        assert_eq!(weak.rows[0].d, 2);
        assert_eq!(weak.rows[0].d_edge, 2.0 * (n as f64 - 2.0));
        assert_eq!(weak.rows.len(), n - 1);
        for r in &weak.rows {
            assert!(r.log_count <= r.log_count_bound + 1e-9);
        }
        assert!(union_bound_diagnostic(2, 0.5).is_err());
        assert!(union_bound_diagnostic(10, 1.0).is_err());
    }
}
