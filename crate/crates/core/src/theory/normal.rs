//! Standard normal tail and its inverse, through the complementary error
//! function (`libm::erfc`, a port of the musl implementation).

use std::f64::consts::{PI, SQRT_2};

use statrs::function::erf::erfc_inv;

/// `Φ̄(x) = P(N(0,1) > x) = erfc(x/√2)/2`.
pub fn phi_bar(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Φ̄⁻¹(p)` for `p ∈ (0, 1)`: a rational-approximation start refined by
/// two Newton steps on `Φ̄`.
pub fn phi_bar_inv(p: f64) -> f64 {
    let mut x = SQRT_2 * erfc_inv(2.0 * p);
    if !x.is_finite() {
        return x;
    }
    for _ in 0..2 {
        let d = phi(x);
        if d == 0.0 {
            break;
        }
        x += (phi_bar(x) - p) / d;
    }
    x
}

/// `P(Z₁ > t, Z₂ > t)` for standard Gaussians with correlation `α ∈ [0, 1)`,
/// by composite Simpson quadrature of `∫_t^∞ φ(z) Φ̄((t − αz)/√(1−α²)) dz`.
pub fn bivariate_upper_orthant(alpha: f64, t: f64) -> f64 {
    if alpha >= 1.0 {
        return phi_bar(t);
    }
    let s = (1.0 - alpha * alpha).sqrt();
    let f = |z: f64| phi(z) * phi_bar((t - alpha * z) / s);
    let (lo, hi) = (t, t.max(0.0) + 40.0);
    let m = 20_000;
    let h = (hi - lo) / m as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + k as f64 * h);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values from a 40-digit evaluation of the normal cdf
    const TAIL: [(f64, f64); 10] = [
        (0.0, 0.5),
        (0.5, 0.308_537_538_725_986_9),
        (1.0, 0.158_655_253_931_457_05),
        (2.0, 0.022_750_131_948_179_207),
        (3.0, 0.001_349_898_031_630_094_5),
        (4.0, 3.167_124_183_311_992e-5),
        (5.0, 2.866_515_718_791_939_3e-7),
        (6.0, 9.865_876_450_376_981e-10),
        (8.0, 6.220_960_574_271_784e-16),
        (-1.5, 0.933_192_798_731_141_9),
    ];

    #[test]
    fn tail_matches_reference() {
        for (x, want) in TAIL {
            let got = phi_bar(x);
            assert!(((got - want) / want).abs() <= 1e-14, "x = {x}: {got} vs {want}");
        }
    }

    #[test]
    fn inverse_matches_reference() {
        assert_eq!(phi_bar_inv(0.5), 0.0);
        for (p, want) in [(1e-3, 3.090_232_306_167_813_5), (1e-10, 6.361_340_902_404_056)] {
            assert!((phi_bar_inv(p) - want).abs() <= 1e-14 * want, "{p}");
        }
        for x in [-2.0, 0.3, 1.7, 4.5, 7.0] {
            assert!((phi_bar_inv(phi_bar(x)) - x).abs() < 1e-9);
        }
    }

    #[test]
    fn bivariate_quadrature() {
        for (a, t, want) in [
            (0.25, 2.0, 0.001_681_849_169_882_45),
            (0.5, 3.0, 8.188_966_183_219_21e-5),
            (0.25, 3.5, 9.621_998_787_147_68e-7),
        ] {
            let got = bivariate_upper_orthant(a, t);
            assert!(((got - want) / want).abs() < 1e-9, "{a} {t}: {got}");
        }
        let t: f64 = 1.3;
        assert!((bivariate_upper_orthant(0.0, t) / phi_bar(t).powi(2) - 1.0).abs() < 1e-12);
        assert_eq!(bivariate_upper_orthant(1.0, t), phi_bar(t));
    }
}
