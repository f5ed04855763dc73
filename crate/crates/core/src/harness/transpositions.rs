use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::all_transposition_deltas;
use crate::error::{Error, Result};
use crate::model::{sample_instance, PlantedMode, SeedSpec, WignerMatrix};
use crate::theory::{paley_zygmund_bound, predicted_transposition_mean, ThresholdSpec};

/// Threshold on `max_τ |v_τ − 4(n−2)| / √(n log n)` above which a draw of
/// `A` is flagged as outside the concentration event.
pub const DEFAULT_C_FLAG: f64 = 16.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranspositionExperiment {
    pub spec: ThresholdSpec,
    pub trials: usize,
    pub seed: u64,
    /// `X = #{τ : δ(τ) < 0}` per trial.
    pub x_values: Vec<u64>,
    pub mean_x: f64,
    /// Unbiased sample variance.
    pub var_x: f64,
    pub second_moment: f64,
    pub predicted_mean: f64,
    /// `P(X ≥ mean/2) ≥ mean²/(4 E[X²])` from the empirical moments; absent
    /// when no trial had a witness.
    pub pz_lower_bound: Option<f64>,
    pub p_x_ge_half_mean: f64,
    pub p_x_positive: f64,
    /// `max_τ |v_τ − 4(n−2)| / √(n log n)` per trial.
    pub c_stat: Vec<f64>,
    pub c_threshold: f64,
    pub c_flagged: usize,
}

/// `max_τ |v_τ − 4(n−2)| / √(n log n)` using
/// `v_(a b) = 2(|A_a|² + |A_b|² − 2(A²)_ab − 2A_ab²)`.
fn concentration_stat(a: &WignerMatrix) -> f64 {
    let m = a.as_matrix();
    let n = m.nrows();
    let sq = m * m;
    let expect = 4.0 * (n as f64 - 2.0);
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            let axy = m[(x, y)];
            let v = 2.0 * (sq[(x, x)] + sq[(y, y)] - 2.0 * sq[(x, y)] - 2.0 * axy * axy);
            worst = worst.max((v - expect).abs());
        }
    }
    let nf = n as f64;
    worst / (nf * nf.ln()).sqrt()
}

/// Counts improving transpositions of the identity-planted model at
/// `ρ² = (4 log n − log log n − a_n)/n`.
pub fn run_transposition_experiment(
    spec: &ThresholdSpec,
    trials: usize,
    seed: u64,
) -> Result<TranspositionExperiment> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let rows = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(u64, f64)> {
            let inst = sample_instance(spec.n, spec.rho, SeedSpec::new(seed, t as u64), PlantedMode::Identity)?;
            let deltas = all_transposition_deltas(&inst.a, &inst.b, spec.rho)?;
            let x = deltas.iter().filter(|&&d| d < 0.0).count() as u64;
            Ok((x, concentration_stat(&inst.a)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (x_values, c_stat): (Vec<u64>, Vec<f64>) = rows.into_iter().unzip();
    let tf = trials as f64;
    let mean_x = x_values.iter().map(|&x| x as f64).sum::<f64>() / tf;
    let second_moment = x_values.iter().map(|&x| (x as f64).powi(2)).sum::<f64>() / tf;
    let var_x = if trials > 1 {
        x_values.iter().map(|&x| (x as f64 - mean_x).powi(2)).sum::<f64>() / (tf - 1.0)
    } else {
        0.0
    };
    let frac = |f: &dyn Fn(u64) -> bool| x_values.iter().filter(|&&x| f(x)).count() as f64 / tf;
    Ok(TranspositionExperiment {
        spec: *spec,
        trials,
        seed,
        mean_x,
        var_x,
        second_moment,
        predicted_mean: predicted_transposition_mean(spec),
        pz_lower_bound: (mean_x > 0.0)
            .then(|| paley_zygmund_bound(mean_x, second_moment, 0.5))
            .transpose()?,
        p_x_ge_half_mean: frac(&|x| x as f64 >= 0.5 * mean_x),
        p_x_positive: frac(&|x| x >= 1),
        c_flagged: c_stat.iter().filter(|&&c| c > DEFAULT_C_FLAG).count(),
        c_threshold: DEFAULT_C_FLAG,
        x_values,
        c_stat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::v_sigma;
    use crate::model::GaussianStream;
    use crate::perm::Permutation;

    #[test]
    fn stat_matches_direct_v() {
        let n = 9;
        let mut g = GaussianStream::new(SeedSpec::new(5, 0).rng());
        let a = WignerMatrix::sample(n, &mut g);
        let mut worst = 0.0f64;
        for x in 1..=n {
            for y in (x + 1)..=n {
                let v = v_sigma(&Permutation::transposition(n, x, y).unwrap(), &a).unwrap();
                worst = worst.max((v - 4.0 * (n as f64 - 2.0)).abs());
            }
        }
        let direct = worst / (n as f64 * (n as f64).ln()).sqrt();
        assert!((concentration_stat(&a) - direct).abs() < 1e-10);
    }

    #[test]
    fn moments_and_paley_zygmund() {
        let spec = ThresholdSpec::new(150, 6.0).unwrap();
        let e = run_transposition_experiment(&spec, 30, 9).unwrap();
        assert_eq!(e.x_values.len(), 30);
        assert!(e.second_moment >= e.mean_x * e.mean_x);
        if let Some(pz) = e.pz_lower_bound {
            assert!(e.p_x_ge_half_mean >= pz);
        }
        assert_eq!(e.c_flagged, 0);
        assert_eq!(e, run_transposition_experiment(&spec, 30, 9).unwrap());
    }

    #[test]
    fn above_threshold_has_no_witnesses() {
        let spec = ThresholdSpec::new(1000, -10.0).unwrap();
        let e = run_transposition_experiment(&spec, 8, 4).unwrap();
        assert!(e.mean_x <= 0.1, "{}", e.mean_x);
    }
}
