//! Monte Carlo checks of the concentration and deviation lemmas.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{c_pair, expected_c};
use crate::error::{Error, Result};
use crate::model::{GaussianStream, SeedSpec, WignerMatrix};
use crate::perm::{EdgeIndex, Permutation};

use super::normal::{bivariate_upper_orthant, phi_bar, phi_bar_inv};
use super::BoundCheck;

fn stream(seed: u64, salt: u64) -> GaussianStream<ChaCha8Rng> {
    GaussianStream::new(SeedSpec::new(seed, salt).rng())
}

fn binomial_se(p: f64, m: u64) -> f64 {
    (p * (1.0 - p) / m as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventAEstimate {
    pub n: usize,
    /// `max |c_{σ,σ'} − E c_{σ,σ'}| / (d√(n log n))` over all sampled pairs.
    pub c_hat: f64,
    pub samples: u64,
}

/// Samples `trials` matrices and, for each listed `d`, `pairs_per_d` pairs of
/// permutations from `S_{n,d}` plus the diagonal pair `(σ, σ)`.
pub fn event_a_estimate(
    n: usize,
    d_list: &[usize],
    pairs_per_d: usize,
    trials: usize,
    seed: u64,
) -> Result<EventAEstimate> {
    if d_list.is_empty() {
        return Err(Error::InvalidInput("d_list is empty".into()));
    }
    if trials == 0 || pairs_per_d == 0 {
        return Err(Error::InvalidInput("trials and pairs_per_d must be positive".into()));
    }
    if let Some(&d) = d_list.iter().find(|&&d| d < 2 || d > n) {
        return Err(Error::Domain(format!("d = {d} is outside 2..={n}")));
    }
    let scale = (n as f64 * (n as f64).ln()).sqrt();
    let mut g = stream(seed, 0);
    let mut c_hat = 0.0f64;
    let mut samples = 0u64;
    for _ in 0..trials {
        let a = WignerMatrix::sample(n, &mut g);
        for &d in d_list {
            for _ in 0..pairs_per_d {
                let s = Permutation::random_with_displacement(n, d, g.rng_mut())?;
                let t = Permutation::random_with_displacement(n, d, g.rng_mut())?;
                for (x, y) in [(&s, &t), (&s, &s)] {
                    let dev = (c_pair(x, y, &a)? - expected_c(x, y)? as f64).abs();
                    c_hat = c_hat.max(dev / (d as f64 * scale));
                    samples += 1;
                }
            }
        }
    }
    Ok(EventAEstimate { n, c_hat, samples })
}

/// Stability of the event constant: `Ĉ(n) ≤ 1.5·Ĉ(⌊n/4⌋)`, both estimated
/// with the same sampling budget.
pub fn event_a_check(
    n: usize,
    d_list: &[usize],
    pairs_per_d: usize,
    trials: usize,
    seed: u64,
) -> Result<BoundCheck> {
    let small = event_a_estimate(n / 4, d_list, pairs_per_d, trials, seed)?;
    let large = event_a_estimate(n, d_list, pairs_per_d, trials, seed.wrapping_add(1))?;
    Ok(BoundCheck::new(
        format!("event_a_stability/n={n}"),
        large.c_hat,
        1.5 * small.c_hat,
        small.samples + large.samples,
        0.0,
        format!("C_hat({}) = {:.4}, C_hat({n}) = {:.4}", n / 4, small.c_hat, large.c_hat),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    /// `(I − Σ)ᵀ(I − Σ')` for the edge actions of two random transpositions
    /// of `[dimension]`; the Gaussian vector lives on the `C(dimension, 2)` edges.
    PermutationDifference,
    /// A symmetric Gaussian matrix of size `dimension`.
    RandomSymmetric,
    Identity,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HansonWrightFit {
    pub kind: MatrixKind,
    pub size: usize,
    pub frobenius: f64,
    pub operator: f64,
    pub trace: f64,
    /// Smallest `c` with empirical exceedance at most `2δ`.
    pub c_hat: f64,
    pub check: BoundCheck,
}

fn edge_difference_matrix(n: usize, s: &Permutation, t: &Permutation) -> Result<DMatrix<f64>> {
    let edges: Vec<EdgeIndex> = EdgeIndex::all(n).collect();
    let index = |e: EdgeIndex| {
        let (i, j) = (e.i() - 1, e.j() - 1);
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    };
    let big_n = edges.len();
    let mut sig = DMatrix::zeros(big_n, big_n);
    let mut sig2 = DMatrix::zeros(big_n, big_n);
    for (k, &e) in edges.iter().enumerate() {
        sig[(k, index(s.edge_apply(e)?))] = 1.0;
        sig2[(k, index(t.edge_apply(e)?))] = 1.0;
    }
    let id = DMatrix::<f64>::identity(big_n, big_n);
    Ok((&id - sig).transpose() * (&id - sig2))
}

fn random_transposition<R: Rng>(n: usize, rng: &mut R) -> Result<Permutation> {
    let i = rng.random_range(1..=n);
    let mut j = rng.random_range(1..n);
    if j >= i {
        j += 1;
    }
    Permutation::transposition(n, i, j)
}

/// Fits the Hanson–Wright constant: with `L = log(1/δ)` and
/// `S = ‖M‖_F√L + ‖M‖_op·L`, returns the smallest `c` such that
/// `|XᵀMX − Tr M| > c·S` on at most a `2δ` fraction of draws.
pub fn hanson_wright_demo(
    dimension: usize,
    kind: MatrixKind,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<HansonWrightFit> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Domain(format!("delta = {delta} is outside (0, 1/2)")));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let mut g = stream(seed, 1);
    let m = match kind {
        MatrixKind::PermutationDifference => {
            if dimension < 3 {
                return Err(Error::Domain("need at least 3 vertices".into()));
            }
            let s = random_transposition(dimension, g.rng_mut())?;
            let t = random_transposition(dimension, g.rng_mut())?;
            edge_difference_matrix(dimension, &s, &t)?
        }
        MatrixKind::RandomSymmetric => WignerMatrix::sample(dimension, &mut g).as_matrix().clone(),
        MatrixKind::Identity => DMatrix::identity(dimension, dimension),
        MatrixKind::Zero => DMatrix::zeros(dimension, dimension),
    };
    let size = m.nrows();
    let frobenius = m.norm();
    let operator = if size == 0 {
        0.0
    } else {
        m.clone().singular_values().max()
    };
    let trace = m.trace();
    let l = (1.0 / delta).ln();
    let scale = frobenius * l.sqrt() + operator * l;
    let mut ratios = Vec::with_capacity(trials);
    let mut x = DVector::zeros(size);
    for _ in 0..trials {
        for v in x.iter_mut() {
            *v = g.next_gaussian();
        }
        let q = x.dot(&(&m * &x));
        let dev = (q - trace).abs();
        ratios.push(if scale > 0.0 { dev / scale } else { 0.0 });
    }
    ratios.sort_by(|a, b| b.total_cmp(a));
    let allowed = (2.0 * delta * trials as f64).floor() as usize;
    let c_hat = ratios.get(allowed).copied().unwrap_or(0.0);
    let exceed = ratios.iter().filter(|&&r| r > c_hat).count() as f64 / trials as f64;
    let name = format!("hanson_wright/{}", serde_json::to_value(kind)?.as_str().unwrap_or("?"));
    Ok(HansonWrightFit {
        kind,
        size,
        frobenius,
        operator,
        trace,
        c_hat,
        check: BoundCheck::new(
            name,
            exceed,
            2.0 * delta,
            trials as u64,
            0.0,
            format!("fitted c = {c_hat:.4}, |M|_F = {frobenius:.3}, |M|_op = {operator:.3}"),
        ),
    })
}

/// `P(max_i Z_i > √(2(v−c) log N) + 2√(v log log N)) ≤ 2/log N` for `N`
/// Gaussians with common variance `v` and pairwise covariance `c`.
///
/// Uses `max Z = √c·ξ₀ + √(v−c)·max ξ_i`; the maximum of `N` independent
/// standard Gaussians is drawn exactly as `Φ̄⁻¹(1 − U^{1/N})`.
pub fn max_tc_gaussian_check(
    big_n: u64,
    v: f64,
    c: f64,
    trials: u64,
    seed: u64,
) -> Result<BoundCheck> {
    if big_n < 16 {
        return Err(Error::Domain(format!("N = {big_n} must be at least 16")));
    }
    if !(v > 0.0) || !(0.0..=v).contains(&c) {
        return Err(Error::Domain(format!("need 0 <= c <= v and v > 0, got c = {c}, v = {v}")));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let ln_n = (big_n as f64).ln();
    let threshold = (2.0 * (v - c) * ln_n).sqrt() + 2.0 * (v * ln_n.ln()).sqrt();
    let mut g = stream(seed, 2);
    let mut hits = 0u64;
    for _ in 0..trials {
        let u = loop {
            let u: f64 = g.next_uniform();
            if u > 0.0 {
                break u;
            }
        };
        let tail = -(u.ln() / big_n as f64).exp_m1();
        let max_xi = phi_bar_inv(tail);
        let z = c.sqrt() * g.next_gaussian() + (v - c).sqrt() * max_xi;
        hits += u64::from(z > threshold);
    }
    let observed = hits as f64 / trials as f64;
    let bound = 2.0 / ln_n;
    Ok(BoundCheck::new(
        format!("max_tc_gaussian/N={big_n},v={v},c={c}"),
        observed,
        bound,
        trials,
        3.0 * binomial_se(bound, trials),
        format!("threshold {threshold:.4}"),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BivariateTail {
    pub alpha: f64,
    pub t: f64,
    pub exact_mc: f64,
    pub mc_se: f64,
    pub samples: u64,
    /// Quadrature value of the same probability.
    pub quadrature: f64,
    /// `e^{−2t²} + Φ̄(t)²`, reported when `αt < 0.1`.
    pub bound_i: Option<f64>,
    /// `(1+α)/(√(2π)t)·exp(−t²/(1+α))`.
    pub bound_ii: f64,
}

pub fn bivariate_tail_bounds(alpha: f64, t: f64, samples: u64, seed: u64) -> Result<BivariateTail> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} is outside [0, 1]")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let s = (1.0 - alpha * alpha).sqrt();
    let mut g = stream(seed, 3);
    let mut hits = 0u64;
    for _ in 0..samples {
        let z1 = g.next_gaussian();
        let z2 = alpha * z1 + s * g.next_gaussian();
        hits += u64::from(z1 > t && z2 > t);
    }
    let p = hits as f64 / samples as f64;
    let bound_ii = (1.0 + alpha) / ((2.0 * std::f64::consts::PI).sqrt() * t) * (-t * t / (1.0 + alpha)).exp();
    Ok(BivariateTail {
        alpha,
        t,
        exact_mc: p,
        mc_se: binomial_se(p, samples),
        samples,
        quadrature: bivariate_upper_orthant(alpha, t),
        bound_i: (alpha * t < 0.1).then(|| (-2.0 * t * t).exp() + phi_bar(t).powi(2)),
        bound_ii,
    })
}

/// Monte Carlo value against bound (ii) at three standard errors.
pub fn bivariate_check(alpha: f64, t: f64, samples: u64, seed: u64) -> Result<BoundCheck> {
    let r = bivariate_tail_bounds(alpha, t, samples, seed)?;
    Ok(BoundCheck::new(
        format!("bivariate_ii/alpha={alpha},t={t}"),
        r.exact_mc,
        r.bound_ii,
        samples,
        3.0 * r.mc_se,
        format!("quadrature {:.6e}", r.quadrature),
    ))
}
