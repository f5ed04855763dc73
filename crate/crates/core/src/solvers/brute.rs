use crate::energy::CompensatedSum;
use crate::error::{check_dim, Error, Result};
use crate::model::{check_rho, WignerMatrix};
use crate::perm::{next_permutation, Permutation};

use super::{tie_tol, SolveResult};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 9;

pub fn brute_force_map(a: &WignerMatrix, b: &WignerMatrix, rho: f64) -> Result<SolveResult> {
    brute_force_map_with_cap(a, b, rho, DEFAULT_BRUTE_FORCE_CAP)
}

/// Minimizes the loss over all of `S_n`. The reported permutation is the
/// lexicographically least one within tie tolerance of the minimum.
pub fn brute_force_map_with_cap(
    a: &WignerMatrix,
    b: &WignerMatrix,
    rho: f64,
    cap: usize,
) -> Result<SolveResult> {
    check_rho(rho)?;
    let n = a.n();
    check_dim(n, b.n())?;
    if n > cap {
        return Err(Error::EnumerationTooLarge {
            count: (1..=n as u128).product(),
            budget: (1..=cap as u128).product(),
        });
    }
    let pairs: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, rho * a.get(i, j)))
        .collect();
    let eval = |p: &[usize]| -> f64 {
        let mut s = CompensatedSum::new();
        for &(i, j, ra) in &pairs {
            let r = b.get(p[i], p[j]) - ra;
            s.add(r * r);
        }
        s.value()
    };

    let mut p: Vec<usize> = (0..n).collect();
    let mut losses = Vec::new();
    loop {
        losses.push(eval(&p));
        if !next_permutation(&mut p) {
            break;
        }
    }
    let best = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = tie_tol(best);
    let mut ties = 0u64;
    let mut first = None;
    for (k, &l) in losses.iter().enumerate() {
        if l <= best + tol {
            ties += 1;
            first.get_or_insert(k);
        }
    }
    // replay the lexicographic stream up to the winning rank
    let rank = first.expect("S_n is nonempty");
    let mut p: Vec<usize> = (0..n).collect();
    for _ in 0..rank {
        next_permutation(&mut p);
    }
    Ok(SolveResult {
        objective: losses[rank],
        pi_hat: Permutation::from_zero_based(p)?,
        ties: Some(ties),
        iterations: losses.len() as u64,
        exact: true,
    })
}
