//! Seeded Monte Carlo experiments: recovery phase grids, the transposition
//! count, and lemma suites.
//!
//! Trials run on the rayon pool and are collected in trial order, so every
//! output is a pure function of the configuration and master seed.

use crate::error::{Error, Result};

pub mod concentration;
pub mod output;
pub mod phase;
pub mod transpositions;

pub use concentration::{run_concentration_suite, ConcentrationConfig};
pub use output::{phase_csv, write_json_lines, PHASE_CSV_HEADER};
pub use phase::{run_phase_grid, PhaseConfig, PhaseGridReport, PhasePoint, Signal, SkippedCell};
pub use transpositions::{run_transposition_experiment, TranspositionExperiment, DEFAULT_C_FLAG};

pub const THREADS_ENV: &str = "WIGNER_ALIGN_THREADS";

/// Worker pool sized by `WIGNER_ALIGN_THREADS`, defaulting to the available
/// parallelism.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Error::InvalidInput(format!("{THREADS_ENV} = {v:?} is not a positive integer")))?,
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot build thread pool: {e}")))
}
