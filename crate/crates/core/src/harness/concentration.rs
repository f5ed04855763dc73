use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::theory::{
    analytic_grid_checks, bivariate_check, event_a_check, final_function_check, hanson_wright_demo,
    max_tc_gaussian_check, BoundCheck, MatrixKind,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticGrid {
    pub alpha_points: usize,
    pub beta_points: usize,
    pub final_grid: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventAConfig {
    pub n: usize,
    pub d: Vec<usize>,
    pub pairs: usize,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HansonWrightConfig {
    pub dimension: usize,
    pub kind: MatrixKind,
    pub delta: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxTcConfig {
    pub big_n: u64,
    pub v: f64,
    pub c: f64,
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BivariateConfig {
    pub alpha: Vec<f64>,
    pub t: Vec<f64>,
    pub samples: u64,
}

/// Which lemma checks to run. Absent sections are skipped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcentrationConfig {
    pub seed: u64,
    pub analytic: Option<AnalyticGrid>,
    pub event_a: Option<EventAConfig>,
    pub hanson_wright: Vec<HansonWrightConfig>,
    pub max_tc: Vec<MaxTcConfig>,
    pub bivariate: Option<BivariateConfig>,
}

impl Default for ConcentrationConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            analytic: Some(AnalyticGrid {
                alpha_points: 2001,
                beta_points: 2001,
                final_grid: 100_000,
            }),
            event_a: Some(EventAConfig {
                n: 200,
                d: vec![2, 3, 5, 10],
                pairs: 20,
                trials: 10,
            }),
            hanson_wright: [
                (40, MatrixKind::PermutationDifference),
                (80, MatrixKind::RandomSymmetric),
                (80, MatrixKind::Identity),
            ]
            .into_iter()
            .map(|(dimension, kind)| HansonWrightConfig {
                dimension,
                kind,
                delta: 0.01,
                trials: 4000,
            })
            .collect(),
            max_tc: vec![
                MaxTcConfig {
                    big_n: 1_000_000,
                    v: 1.0,
                    c: 0.0,
                    trials: 20_000,
                },
                MaxTcConfig {
                    big_n: 1_000_000,
                    v: 1.0,
                    c: 0.5,
                    trials: 20_000,
                },
            ],
            bivariate: Some(BivariateConfig {
                alpha: vec![0.0, 0.25, 0.5, 0.75, 1.0],
                t: vec![0.5, 1.0, 2.0, 3.0],
                samples: 200_000,
            }),
        }
    }
}

impl ConcentrationConfig {
    /// Deterministic checks only; no sampling.
    pub fn analytic_only() -> Self {
        Self {
            seed: 0,
            analytic: Self::default().analytic,
            event_a: None,
            hanson_wright: Vec::new(),
            max_tc: Vec::new(),
            bivariate: None,
        }
    }
}

/// Runs the configured checks in a fixed order: analytic, event A,
/// Hanson–Wright, max of correlated Gaussians, bivariate tails. Each
/// sampled check draws from its own sub-seed.
pub fn run_concentration_suite(cfg: &ConcentrationConfig) -> Result<Vec<BoundCheck>> {
    let mut out = Vec::new();
    let mut salt = 0u64;
    let mut next_seed = || {
        salt += 1;
        cfg.seed.wrapping_mul(0x100).wrapping_add(salt)
    };
    if let Some(g) = &cfg.analytic {
        out.extend(analytic_grid_checks(g.alpha_points, g.beta_points)?);
        out.push(final_function_check(g.final_grid)?);
    }
    if let Some(e) = &cfg.event_a {
        out.push(event_a_check(e.n, &e.d, e.pairs, e.trials, next_seed())?);
    }
    for h in &cfg.hanson_wright {
        out.push(hanson_wright_demo(h.dimension, h.kind, h.delta, h.trials, next_seed())?.check);
    }
    for m in &cfg.max_tc {
        out.push(max_tc_gaussian_check(m.big_n, m.v, m.c, m.trials, next_seed())?);
    }
    if let Some(b) = &cfg.bivariate {
        for &alpha in &b.alpha {
            for &t in &b.t {
                out.push(bivariate_check(alpha, t, b.samples, next_seed())?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_subset_needs_no_samples() {
        let checks = run_concentration_suite(&ConcentrationConfig::analytic_only()).unwrap();
        assert_eq!(checks.len(), 4);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn empty_config_is_empty_report() {
        let cfg: ConcentrationConfig = serde_json::from_str(r#"{"analytic": null, "event_a": null, "hanson_wright": [], "max_tc": [], "bivariate": null}"#).unwrap();
        assert!(run_concentration_suite(&cfg).unwrap().is_empty());
        assert!(serde_json::from_str::<ConcentrationConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn default_suite_passes() {
        let checks = run_concentration_suite(&ConcentrationConfig::default()).unwrap();
        assert_eq!(checks.len(), 4 + 1 + 3 + 2 + 20);
        for c in &checks {
            assert!(c.pass, "{}", c.to_json_line());
        }
    }
}
