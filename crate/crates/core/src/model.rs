//! Correlated Gaussian Wigner model.
//!
//! `A` and `H` are independent symmetric matrices with i.i.d. standard
//! Gaussian entries above the diagonal and zeros on it. Given a planted
//! permutation `π*`, the second matrix is
//!
//! ```text
//! B[π*(i)][π*(j)] = ρ·A[i][j] + √(1-ρ²)·H[π*(i)][π*(j)]      (i < j)
//! ```
//!
//! so every matched pair `(A_ij, B_{π*(i)π*(j)})` has correlation `ρ`.
//!
//! # Reproducibility
//!
//! A trial's stream is `ChaCha8Rng::seed_from_u64(derive_trial_seed(spec))`.
//! Gaussians come from the Marsaglia polar method on 53-bit uniforms in
//! `(-1, 1)`, consuming one accepted pair per two variates. Draw order is
//! fixed: `A` upper triangle row-major, then `H` upper triangle row-major,
//! then a Fisher–Yates shuffle for `π*` (uniform mode only). Matrix indices
//! are 0-based; permutation interfaces are 1-based.

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::perm::Permutation;

/// Symmetric real matrix with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerMatrix {
    entries: DMatrix<f64>,
}

impl WignerMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            entries: DMatrix::zeros(n, n),
        }
    }

    /// Builds from the row-major upper triangle `(0,1), (0,2), ..., (n-2,n-1)`.
    pub fn from_upper_triangle(n: usize, values: &[f64]) -> Result<Self> {
        check_dim(n * n.saturating_sub(1) / 2, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let mut m = DMatrix::zeros(n, n);
        let mut it = values.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = *it.next().expect("length checked");
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(Self { entries: m })
    }

    /// Wraps a dense matrix after checking symmetry, zero diagonal and
    /// finiteness.
    pub fn from_dense(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
        let n = m.nrows();
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal at {i}")));
            }
            for j in (i + 1)..n {
                if !m[(i, j)].is_finite() || m[(i, j)] != m[(j, i)] {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) is non-finite or asymmetric"
                    )));
                }
            }
        }
        Ok(Self { entries: m })
    }

    /// Samples i.i.d. standard Gaussian upper-triangle entries.
    pub fn sample<R: RngCore>(n: usize, gauss: &mut GaussianStream<R>) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = gauss.next_gaussian();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self { entries: m }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Row `i` as a contiguous slice (column-major storage of a symmetric
    /// matrix makes column `i` equal to row `i`).
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.entries.as_slice()[i * n..(i + 1) * n]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.entries[(i, j)]);
            }
        }
        out
    }

    /// `M'[i][j] = M[σ(i)][σ(j)]`.
    pub fn relabeled(&self, sigma: &Permutation) -> Result<Self> {
        check_dim(self.n(), sigma.n())?;
        let p = sigma.zero_based();
        let n = self.n();
        let src = &self.entries;
        Ok(Self {
            entries: DMatrix::from_fn(n, n, |i, j| src[(p[i], p[j])]),
        })
    }
}

/// How the planted permutation is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PlantedMode {
    Uniform,
    #[default]
    Identity,
}

/// Master seed plus trial index; the per-trial seed is a pure function of both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(derive_trial_seed(*self))
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer applied to `master ^ (trial + 1)·γ`, with `γ` the
/// 64-bit golden-ratio constant. For a fixed master seed the map is a
/// bijection of the trial index.
pub fn derive_trial_seed(spec: SeedSpec) -> u64 {
    let mut z = spec.master_seed ^ spec.trial_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard Gaussian variates by the Marsaglia polar method.
pub struct GaussianStream<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: RngCore> GaussianStream<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    #[inline]
    fn symmetric_uniform(&mut self) -> f64 {
        // 53 random bits mapped to (-1, 1)
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 0.5) * (2.0 / (1u64 << 53) as f64) - 1.0
    }

    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = self.symmetric_uniform();
            let v = self.symmetric_uniform();
            let s = u * u + v * v;
            if s < 1.0 && s > 0.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.next_gaussian();
        }
    }

    pub fn rng_mut(&mut self) -> &mut R {
        &mut self.rng
    }

    /// Uniform in `[0, 1)` from the underlying stream.
    pub fn next_uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// A planted triple `(A, B, π*)` with its coupling strength and seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub a: WignerMatrix,
    pub b: WignerMatrix,
    /// The `H` used to build `B`, when retained.
    pub noise: Option<WignerMatrix>,
    pub planted: Permutation,
    pub rho: f64,
    pub seed: SeedSpec,
    pub planted_mode: PlantedMode,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// Assembles `B` from `A`, `H` and `π*`.
    pub fn assemble(
        a: WignerMatrix,
        noise: WignerMatrix,
        planted: Permutation,
        rho: f64,
        seed: SeedSpec,
        planted_mode: PlantedMode,
    ) -> Result<Self> {
        check_rho(rho)?;
        let n = a.n();
        check_dim(n, noise.n())?;
        check_dim(n, planted.n())?;
        let s = (1.0 - rho * rho).sqrt();
        let p = planted.zero_based();
        let mut b = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let (k, l) = (p[i], p[j]);
                let v = rho * a.get(i, j) + s * noise.get(k, l);
                b[(k, l)] = v;
                b[(l, k)] = v;
            }
        }
        Ok(Self {
            a,
            b: WignerMatrix { entries: b },
            noise: Some(noise),
            planted,
            rho,
            seed,
            planted_mode,
        })
    }

    /// The equivalent identity-planted problem: `B'[i][j] = B[π*(i)][π*(j)]`
    /// and `H'` likewise, so that `ℒ_B(π) = ℒ_{B'}(π*⁻¹∘π)`.
    pub fn recentered(&self) -> Result<Self> {
        Ok(Self {
            a: self.a.clone(),
            b: self.b.relabeled(&self.planted)?,
            noise: self
                .noise
                .as_ref()
                .map(|h| h.relabeled(&self.planted))
                .transpose()?,
            planted: Permutation::identity(self.n()),
            rho: self.rho,
            seed: self.seed,
            planted_mode: PlantedMode::Identity,
        })
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::Domain(format!("rho = {rho} is outside [0, 1]")))
    }
}

/// Samples one instance of the model. Deterministic given `seed`.
pub fn sample_instance(
    n: usize,
    rho: f64,
    seed: SeedSpec,
    planted_mode: PlantedMode,
) -> Result<Instance> {
    if n < 2 {
        return Err(Error::Domain(format!("n = {n} must be at least 2")));
    }
    check_rho(rho)?;
    let mut gauss = GaussianStream::new(seed.rng());
    let a = WignerMatrix::sample(n, &mut gauss);
    let h = WignerMatrix::sample(n, &mut gauss);
    let planted = match planted_mode {
        PlantedMode::Identity => Permutation::identity(n),
        PlantedMode::Uniform => Permutation::random(n, gauss.rng_mut()),
    };
    Instance::assemble(a, h, planted, rho, seed, planted_mode)
}
