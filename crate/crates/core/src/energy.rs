//! Energy functionals over permutations.
//!
//! Every sum runs over unordered pairs `i < j`; the diagonal never enters.
//! With `C[i][j] = B[π(i)][π(j)]`,
//!
//! ```text
//! ℒ(π)   = Σ_{i<j} (C_ij − ρ A_ij)²
//! qap(π) = 2 Σ_{i<j} A_ij C_ij
//! ℒ(π)   = Σ B² + ρ² Σ A² − ρ·qap(π)
//! ```
//!
//! so minimizing the loss and maximizing the QAP objective coincide for
//! `ρ > 0`.
//!
//! For the identity-planted problem the relative energy of `σ` is
//! `δ(σ) = ℒ(σ⁻¹) − ℒ(id) = ρ² v_σ − 2ρ√(1−ρ²) X_σ` with
//! `X_σ = −Σ_{i<j} H_ij (A_ij − A_σ(i)σ(j))`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::model::{check_rho, WignerMatrix};
use crate::perm::{EdgeIndex, Permutation};

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

fn pair_sum(n: usize, mut term: impl FnMut(usize, usize) -> f64) -> f64 {
    let mut s = CompensatedSum::new();
    for i in 0..n {
        for j in (i + 1)..n {
            s.add(term(i, j));
        }
    }
    s.value()
}

fn check_square(a: &WignerMatrix, b: &WignerMatrix, p: &Permutation) -> Result<usize> {
    let n = a.n();
    check_dim(n, b.n())?;
    check_dim(n, p.n())?;
    Ok(n)
}

pub fn loss(pi: &Permutation, a: &WignerMatrix, b: &WignerMatrix, rho: f64) -> Result<f64> {
    let n = check_square(a, b, pi)?;
    let p = pi.zero_based();
    Ok(pair_sum(n, |i, j| {
        let r = b.get(p[i], p[j]) - rho * a.get(i, j);
        r * r
    }))
}

pub fn qap_objective(pi: &Permutation, a: &WignerMatrix, b: &WignerMatrix) -> Result<f64> {
    let n = check_square(a, b, pi)?;
    let p = pi.zero_based();
    Ok(2.0 * pair_sum(n, |i, j| a.get(i, j) * b.get(p[i], p[j])))
}

/// `ℒ(pi) − ℒ(reference)`.
pub fn relative_energy(
    pi: &Permutation,
    reference: &Permutation,
    a: &WignerMatrix,
    b: &WignerMatrix,
    rho: f64,
) -> Result<f64> {
    check_dim(pi.n(), reference.n())?;
    let n = check_square(a, b, pi)?;
    let (p, q) = (pi.zero_based(), reference.zero_based());
    Ok(pair_sum(n, |i, j| {
        let x = b.get(p[i], p[j]) - rho * a.get(i, j);
        let y = b.get(q[i], q[j]) - rho * a.get(i, j);
        (x - y) * (x + y)
    }))
}

/// `ρ² v_σ + 2ρ√(1−ρ²) Σ H_ij (A_ij − A_σ(i)σ(j))`, which equals
/// `relative_energy(σ⁻¹, id, A, B, ρ)` when `B` was built from `(A, H)`
/// with identity planting.
pub fn delta_decomposed(
    sigma: &Permutation,
    a: &WignerMatrix,
    h: &WignerMatrix,
    rho: f64,
) -> Result<f64> {
    check_rho(rho)?;
    let v = v_sigma(sigma, a)?;
    let x = latent_field(sigma, a, h)?;
    Ok(rho * rho * v - 2.0 * rho * (1.0 - rho * rho).sqrt() * x)
}

/// `X_σ = −Σ_{i<j} H_ij (A_ij − A_σ(i)σ(j))`; given `A` this is a centered
/// Gaussian with variance `v_σ`.
pub fn latent_field(sigma: &Permutation, a: &WignerMatrix, h: &WignerMatrix) -> Result<f64> {
    let n = check_square(a, h, sigma)?;
    let s = sigma.zero_based();
    Ok(-pair_sum(n, |i, j| h.get(i, j) * (a.get(i, j) - a.get(s[i], s[j]))))
}

/// Recovers `X_σ` from an observed relative energy.
pub fn latent_from_delta(delta: f64, v_sigma: f64, rho: f64) -> Result<f64> {
    let denom = 2.0 * rho * (1.0 - rho * rho).sqrt();
    if denom == 0.0 {
        return Err(Error::Degenerate(format!(
            "latent field is not identifiable at rho = {rho}"
        )));
    }
    Ok((rho * rho * v_sigma - delta) / denom)
}

pub fn v_sigma(sigma: &Permutation, a: &WignerMatrix) -> Result<f64> {
    check_dim(a.n(), sigma.n())?;
    let s = sigma.zero_based();
    Ok(pair_sum(a.n(), |i, j| {
        let d = a.get(i, j) - a.get(s[i], s[j]);
        d * d
    }))
}

pub fn c_pair(sigma: &Permutation, sigma2: &Permutation, a: &WignerMatrix) -> Result<f64> {
    check_dim(a.n(), sigma.n())?;
    check_dim(a.n(), sigma2.n())?;
    let (s, t) = (sigma.zero_based(), sigma2.zero_based());
    Ok(pair_sum(a.n(), |i, j| {
        let x = a.get(i, j);
        (x - a.get(s[i], s[j])) * (x - a.get(t[i], t[j]))
    }))
}

/// `#(D^E_σ ∩ D^E_σ') + #(D^E_σ ∩ D^E_σ' ∩ F^E_{σ⁻¹∘σ'})`.
pub fn expected_c(sigma: &Permutation, sigma2: &Permutation) -> Result<u64> {
    let (both, both_agree) = Permutation::common_deranged_edges(sigma, sigma2)?;
    Ok((both + both_agree) as u64)
}

pub fn alpha_corr(tau: &Permutation, tau2: &Permutation, a: &WignerMatrix) -> Result<f64> {
    let v1 = v_sigma(tau, a)?;
    let v2 = v_sigma(tau2, a)?;
    if v1 <= 0.0 || v2 <= 0.0 {
        return Err(Error::Degenerate(
            "alpha is undefined for a zero-variance permutation".into(),
        ));
    }
    let r = c_pair(tau, tau2, a)? / (v1 * v2).sqrt();
    Ok(r.clamp(-1.0, 1.0))
}

/// `−ℒ(π) / (2(1−ρ²))`.
pub fn log_posterior_unnorm(
    pi: &Permutation,
    a: &WignerMatrix,
    b: &WignerMatrix,
    rho: f64,
) -> Result<f64> {
    check_rho(rho)?;
    if rho >= 1.0 {
        return Err(Error::Degenerate(
            "posterior temperature diverges at rho = 1".into(),
        ));
    }
    Ok(-loss(pi, a, b, rho)? / (2.0 * (1.0 - rho * rho)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub loss: f64,
    pub qap: f64,
    pub relative: f64,
    /// Absent at `ρ = 1`.
    pub log_posterior_unnorm: Option<f64>,
}

pub fn energy_report(
    pi: &Permutation,
    reference: &Permutation,
    a: &WignerMatrix,
    b: &WignerMatrix,
    rho: f64,
) -> Result<EnergyReport> {
    let l = loss(pi, a, b, rho)?;
    let relative = if pi == reference {
        0.0
    } else {
        relative_energy(pi, reference, a, b, rho)?
    };
    Ok(EnergyReport {
        loss: l,
        qap: qap_objective(pi, a, b)?,
        relative,
        log_posterior_unnorm: (rho < 1.0).then(|| -l / (2.0 * (1.0 - rho * rho))),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceStat {
    pub v_sigma: f64,
    pub v_sigma2: f64,
    pub c_pair: f64,
    pub expected_c: u64,
    /// Absent when either variance vanishes.
    pub alpha: Option<f64>,
}

pub fn covariance_stat(
    sigma: &Permutation,
    sigma2: &Permutation,
    a: &WignerMatrix,
) -> Result<CovarianceStat> {
    let v1 = v_sigma(sigma, a)?;
    let v2 = v_sigma(sigma2, a)?;
    let c = c_pair(sigma, sigma2, a)?;
    Ok(CovarianceStat {
        v_sigma: v1,
        v_sigma2: v2,
        c_pair: c,
        expected_c: expected_c(sigma, sigma2)?,
        alpha: (v1 > 0.0 && v2 > 0.0).then(|| (c / (v1 * v2).sqrt()).clamp(-1.0, 1.0)),
    })
}

/// Change of `Σ_{i<j} A_ij C_ij` when positions `a` and `b` of `C` are
/// swapped, in O(n). Indices are 0-based.
#[inline]
pub(crate) fn swap_gain(a: &WignerMatrix, c: &WignerMatrix, x: usize, y: usize) -> f64 {
    let (ax, ay) = (a.row(x), a.row(y));
    let (cx, cy) = (c.row(x), c.row(y));
    let mut s = 0.0;
    for k in 0..ax.len() {
        if k != x && k != y {
            s += (ax[k] - ay[k]) * (cy[k] - cx[k]);
        }
    }
    s
}

/// `δ(τ) = ℒ(τ) − ℒ(id)` for the transposition `τ = (i j)` (1-based), in O(n).
pub fn transposition_delta(
    a: &WignerMatrix,
    b: &WignerMatrix,
    rho: f64,
    i: usize,
    j: usize,
) -> Result<f64> {
    check_dim(a.n(), b.n())?;
    let e = EdgeIndex::new(i, j)?;
    if e.j() > a.n() {
        return Err(Error::InvalidInput(format!("{e} is out of range for n = {}", a.n())));
    }
    Ok(-2.0 * rho * swap_gain(a, b, e.i() - 1, e.j() - 1))
}

/// `δ(τ)` for every transposition of the identity-planted problem, in the
/// lexicographic order of `enumerate_transpositions`.
///
/// Uses `G = A·B`: the swap gain of `(x, y)` is
/// `G_xy + G_yx − G_xx − G_yy + 2 A_xy B_xy`.
pub fn all_transposition_deltas(a: &WignerMatrix, b: &WignerMatrix, rho: f64) -> Result<Vec<f64>> {
    check_dim(a.n(), b.n())?;
    let n = a.n();
    let g = product(a, b);
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for x in 0..n {
        for y in (x + 1)..n {
            let gain = gain_from_product(&g, a, b, x, y);
            out.push(-2.0 * rho * gain);
        }
    }
    Ok(out)
}

pub(crate) fn product(a: &WignerMatrix, b: &WignerMatrix) -> DMatrix<f64> {
    a.as_matrix() * b.as_matrix()
}

#[inline]
pub(crate) fn gain_from_product(
    g: &DMatrix<f64>,
    a: &WignerMatrix,
    c: &WignerMatrix,
    x: usize,
    y: usize,
) -> f64 {
    g[(x, y)] + g[(y, x)] - g[(x, x)] - g[(y, y)] + 2.0 * a.get(x, y) * c.get(x, y)
}
