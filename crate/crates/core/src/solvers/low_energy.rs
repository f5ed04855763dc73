use crate::energy::loss;
use crate::error::{check_dim, Error, Result};
use crate::model::{check_rho, WignerMatrix};
use crate::perm::{count_with_displacement, enumerate_with_displacement_budget, Permutation, DEFAULT_ENUMERATION_BUDGET};

/// All `σ` with `d_σ ≤ d_max` and `δ(σ) = ℒ(σ⁻¹) − ℒ(id) ≤ 0`, with their
/// `δ`, for an identity-planted problem. Streams by increasing `d`, each
/// displacement class in lexicographic order.
pub fn low_energy_set<'a>(
    a: &'a WignerMatrix,
    b: &'a WignerMatrix,
    rho: f64,
    d_max: usize,
) -> Result<impl Iterator<Item = (Permutation, f64)> + 'a> {
    check_rho(rho)?;
    let n = a.n();
    check_dim(n, b.n())?;
    let d_max = d_max.min(n);
    let mut total: u128 = 0;
    for d in (0..=d_max).filter(|&d| d != 1) {
        total = total
            .checked_add(count_with_displacement(n, d)?)
            .ok_or(Error::Overflow("low-energy enumeration size"))?;
    }
    if total > DEFAULT_ENUMERATION_BUDGET {
        return Err(Error::EnumerationTooLarge {
            count: total,
            budget: DEFAULT_ENUMERATION_BUDGET,
        });
    }
    let base = loss(&Permutation::identity(n), a, b, rho)?;
    let classes = (0..=d_max)
        .filter(|&d| d != 1)
        .map(|d| enumerate_with_displacement_budget(n, d, DEFAULT_ENUMERATION_BUDGET))
        .collect::<Result<Vec<_>>>()?;
    Ok(classes.into_iter().flatten().filter_map(move |s| {
        if s.is_identity() {
            return Some((s, 0.0));
        }
        let delta = loss(&s.inverse(), a, b, rho).expect("dimensions checked") - base;
        (delta <= 0.0).then_some((s, delta))
    }))
}
