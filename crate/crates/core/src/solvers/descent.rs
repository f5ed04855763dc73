use nalgebra::DMatrix;

use crate::energy::{gain_from_product, loss, product};
use crate::error::{check_dim, Result};
use crate::model::{check_rho, WignerMatrix};
use crate::perm::Permutation;

use super::{tie_tol, SolveResult};

/// Steepest descent over the transposition neighbourhood `π ↦ π∘(x y)`.
///
/// Each round scores all `n(n-1)/2` moves from the gain matrix
/// `G = A·C`, `C[i][j] = B[π(i)][π(j)]`, accepts the best strictly
/// improving one and updates `C` and `G` in O(n²). Stops at a local
/// minimum or after `max_sweeps` rounds.
pub fn transposition_descent(
    a: &WignerMatrix,
    b: &WignerMatrix,
    rho: f64,
    start: &Permutation,
    max_sweeps: usize,
) -> Result<SolveResult> {
    Ok(transposition_descent_traced(a, b, rho, start, max_sweeps)?.0)
}

/// As [`transposition_descent`], also returning the incrementally tracked
/// loss after each accepted move.
pub fn transposition_descent_traced(
    a: &WignerMatrix,
    b: &WignerMatrix,
    rho: f64,
    start: &Permutation,
    max_sweeps: usize,
) -> Result<(SolveResult, Vec<f64>)> {
    check_rho(rho)?;
    let n = a.n();
    check_dim(n, b.n())?;
    check_dim(n, start.n())?;
    let mut pi = start.zero_based().to_vec();
    let mut c = b.relabeled(start)?;
    let mut g = product(a, &c);
    let mut current = loss(start, a, b, rho)?;
    let mut trace = Vec::new();
    let mut iterations = 0u64;

    for _ in 0..max_sweeps {
        let tol = tie_tol(current);
        let mut best: Option<(f64, usize, usize)> = None;
        for x in 0..n {
            for y in (x + 1)..n {
                let change = -2.0 * rho * gain_from_product(&g, a, &c, x, y);
                if change >= -tol {
                    continue;
                }
                best = match best {
                    None => Some((change, x, y)),
                    Some((bc, bx, by)) => {
                        if change < bc || (change == bc && swapped_less(&pi, (x, y), (bx, by))) {
                            Some((change, x, y))
                        } else {
                            Some((bc, bx, by))
                        }
                    }
                };
            }
        }
        let Some((change, x, y)) = best else { break };
        apply_swap(a, &mut c, &mut g, x, y);
        pi.swap(x, y);
        current += change;
        trace.push(current);
        iterations += 1;
    }
    let pi_hat = Permutation::from_zero_based(pi)?;
    let objective = loss(&pi_hat, a, b, rho)?;
    Ok((
        SolveResult {
            pi_hat,
            objective,
            ties: None,
            iterations,
            exact: false,
        },
        trace,
    ))
}

/// Whether `π∘(x y)` precedes `π∘(x' y')` lexicographically.
fn swapped_less(pi: &[usize], m1: (usize, usize), m2: (usize, usize)) -> bool {
    let mut p = pi.to_vec();
    p.swap(m1.0, m1.1);
    let mut q = pi.to_vec();
    q.swap(m2.0, m2.1);
    p < q
}

/// Swaps positions `x`, `y` of `C` and refreshes `G = A·C`.
fn apply_swap(a: &WignerMatrix, c: &mut WignerMatrix, g: &mut DMatrix<f64>, x: usize, y: usize) {
    let n = a.n();
    let old = c.as_matrix().clone();
    // columns j ∉ {x, y} of C change only in rows x and y
    let dcol: Vec<f64> = (0..n).map(|j| old[(y, j)] - old[(x, j)]).collect();
    let dax: Vec<f64> = (0..n).map(|i| a.get(i, x) - a.get(i, y)).collect();
    for j in 0..n {
        if j == x || j == y {
            continue;
        }
        let d = dcol[j];
        for (gi, da) in g.column_mut(j).iter_mut().zip(&dax) {
            *gi += da * d;
        }
    }
    let mut m = old;
    m.swap_rows(x, y);
    m.swap_columns(x, y);
    *c = WignerMatrix::from_dense(m).expect("a relabeling stays symmetric");
    let am = a.as_matrix();
    for j in [x, y] {
        let col = am * c.as_matrix().column(j);
        g.set_column(j, &col);
    }
}
