use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::all_transposition_deltas;
use crate::error::{Error, Result};
use crate::model::{derive_trial_seed, sample_instance, PlantedMode, SeedSpec};
use crate::perm::Permutation;
use crate::solvers::{brute_force_map_with_cap, spectral_align, transposition_descent, DEFAULT_BRUTE_FORCE_CAP};

/// Signal level of a cell: `γ = nρ²/log n` or raw `ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signal {
    Gamma(f64),
    Rho(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseConfig {
    pub n: Vec<usize>,
    pub gamma: Vec<f64>,
    pub rho: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Largest n solved by exhaustive MAP.
    pub brute_cap: usize,
    /// Largest n solved by spectral start plus transposition descent.
    pub local_max_n: usize,
    pub sweeps: usize,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        Self {
            n: Vec::new(),
            gamma: Vec::new(),
            rho: Vec::new(),
            trials: 50,
            seed: 0,
            brute_cap: DEFAULT_BRUTE_FORCE_CAP,
            local_max_n: 500,
            sweeps: 10_000,
        }
    }
}

impl PhaseConfig {
    /// Cells in output order: for each n, γ levels then ρ levels.
    pub fn cells(&self) -> Vec<(usize, Signal)> {
        let mut out = Vec::new();
        for &n in &self.n {
            out.extend(self.gamma.iter().map(|&g| (n, Signal::Gamma(g))));
            out.extend(self.rho.iter().map(|&r| (n, Signal::Rho(r))));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub n: usize,
    pub gamma: f64,
    pub rho: f64,
    pub trials: usize,
    /// Exhaustive MAP equals π*; absent when n exceeds the brute-force cap.
    pub exact_recovery_freq: Option<f64>,
    /// Spectral start plus descent equals π*; absent above `local_max_n`.
    pub local_recovery_freq: Option<f64>,
    /// Some transposition has `δ(τ) < 0`.
    pub converse_witness_freq: f64,
    /// No strict witness but some `δ(τ) = 0`.
    pub tie_witness_freq: f64,
    /// Overlap of the local estimate with π*, or of the exhaustive one when
    /// only that ran.
    pub mean_overlap: Option<f64>,
    pub seed: u64,
    pub exact_hits: Option<usize>,
    pub local_hits: Option<usize>,
    pub witness_trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub n: usize,
    pub signal: Signal,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct PhaseGridReport {
    pub points: Vec<PhasePoint>,
    pub skipped: Vec<SkippedCell>,
}

struct TrialOutcome {
    exact: Option<bool>,
    local: Option<bool>,
    overlap: Option<f64>,
    witness: bool,
    tie: bool,
}

/// Seed of trial `t` at size `n`. It does not depend on the signal level, so
/// all cells of one `n` share `(A, H, π*)` and differ only in `ρ`.
fn trial_seed(master: u64, n: usize, t: usize) -> SeedSpec {
    SeedSpec::new(derive_trial_seed(SeedSpec::new(master, n as u64)), t as u64)
}

fn run_trial(n: usize, rho: f64, seed: SeedSpec, cfg: &PhaseConfig) -> Result<TrialOutcome> {
    let inst = sample_instance(n, rho, seed, PlantedMode::Uniform)?;
    let mut overlap = None;
    let exact = if n <= cfg.brute_cap {
        let r = brute_force_map_with_cap(&inst.a, &inst.b, rho, cfg.brute_cap)?;
        overlap = Some(Permutation::overlap(&r.pi_hat, &inst.planted)?);
        Some(r.pi_hat == inst.planted)
    } else {
        None
    };
    let local = if n <= cfg.local_max_n {
        let start = spectral_align(&inst.a, &inst.b)?.pi_hat;
        let r = transposition_descent(&inst.a, &inst.b, rho, &start, cfg.sweeps)?;
        overlap = Some(Permutation::overlap(&r.pi_hat, &inst.planted)?);
        Some(r.pi_hat == inst.planted)
    } else {
        None
    };
    let rc = inst.recentered()?;
    let deltas = all_transposition_deltas(&rc.a, &rc.b, rho)?;
    let witness = deltas.iter().any(|&d| d < 0.0);
    let tie = !witness && deltas.iter().any(|&d| d == 0.0);
    Ok(TrialOutcome {
        exact,
        local,
        overlap,
        witness,
        tie,
    })
}

fn resolve(n: usize, signal: Signal) -> std::result::Result<(f64, f64), String> {
    if n < 2 {
        return Err(format!("n = {n} is below 2"));
    }
    let ln = (n as f64).ln();
    match signal {
        Signal::Gamma(g) => {
            if !(g >= 0.0) {
                return Err(format!("gamma = {g} is negative"));
            }
            let r2 = g * ln / n as f64;
            if r2 > 1.0 {
                Err(format!("gamma = {g} implies rho^2 = {r2} > 1"))
            } else {
                Ok((g, r2.sqrt()))
            }
        }
        Signal::Rho(r) => {
            if (0.0..=1.0).contains(&r) {
                Ok((n as f64 * r * r / ln, r))
            } else {
                Err(format!("rho = {r} is outside [0, 1]"))
            }
        }
    }
}

fn fraction(count: usize, trials: usize) -> f64 {
    count as f64 / trials as f64
}

pub fn run_phase_grid(cfg: &PhaseConfig) -> Result<PhaseGridReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let mut report = PhaseGridReport::default();
    for (n, signal) in cfg.cells() {
        let (gamma, rho) = match resolve(n, signal) {
            Ok(v) => v,
            Err(reason) => {
                report.skipped.push(SkippedCell { n, signal, reason });
                continue;
            }
        };
        let outcomes = (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(n, rho, trial_seed(cfg.seed, n, t), cfg))
            .collect::<Result<Vec<_>>>()?;
        let count = |f: &dyn Fn(&TrialOutcome) -> Option<bool>| -> Option<usize> {
            let v: Option<Vec<bool>> = outcomes.iter().map(f).collect();
            v.map(|v| v.into_iter().filter(|&b| b).count())
        };
        let exact_hits = count(&|o| o.exact);
        let local_hits = count(&|o| o.local);
        let witness_trials = outcomes.iter().filter(|o| o.witness).count();
        let ties = outcomes.iter().filter(|o| o.tie).count();
        let overlaps: Option<Vec<f64>> = outcomes.iter().map(|o| o.overlap).collect();
        report.points.push(PhasePoint {
            n,
            gamma,
            rho,
            trials: cfg.trials,
            exact_recovery_freq: exact_hits.map(|h| fraction(h, cfg.trials)),
            local_recovery_freq: local_hits.map(|h| fraction(h, cfg.trials)),
            converse_witness_freq: fraction(witness_trials, cfg.trials),
            tie_witness_freq: fraction(ties, cfg.trials),
            mean_overlap: overlaps.map(|v| v.iter().sum::<f64>() / v.len() as f64),
            seed: cfg.seed,
            exact_hits,
            local_hits,
            witness_trials,
        });
    }
    Ok(report)
}
