//! Alignment solvers: exhaustive MAP, steepest transposition descent, the
//! Hungarian algorithm and a spectral baseline.
//!
//! Ties are broken towards the lexicographically least image where the
//! solver can observe them.

use serde::{Deserialize, Serialize};

use crate::perm::Permutation;

mod brute;
mod descent;
mod hungarian;
mod low_energy;
mod spectral;

pub use brute::{brute_force_map, brute_force_map_with_cap, DEFAULT_BRUTE_FORCE_CAP};
pub use descent::{transposition_descent, transposition_descent_traced};
pub use hungarian::{hungarian, lap_align, AssignmentProblem, Sense};
pub use low_energy::low_energy_set;
pub use spectral::spectral_align;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    #[serde(with = "one_based")]
    pub pi_hat: Permutation,
    /// Loss at `pi_hat`.
    pub objective: f64,
    /// Number of co-optimal permutations; exact solvers only.
    pub ties: Option<u64>,
    pub iterations: u64,
    pub exact: bool,
}

pub(crate) mod one_based {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::perm::Permutation;

    pub fn serialize<S: Serializer>(p: &Permutation, s: S) -> Result<S::Ok, S::Error> {
        p.images().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Permutation, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Permutation::from_one_based(&v).map_err(serde::de::Error::custom)
    }
}

/// Relative tolerance used to call two loss values equal.
pub(crate) const TIE_RTOL: f64 = 1e-12;

pub(crate) fn tie_tol(v: f64) -> f64 {
    TIE_RTOL * v.abs().max(1.0)
}
