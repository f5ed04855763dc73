use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::energy::loss;
use crate::error::{check_dim, Error, Result};
use crate::model::WignerMatrix;

use super::{hungarian, AssignmentProblem, Sense, SolveResult};

/// Full-spectrum eigenvector matching.
///
/// Eigenpairs of `A` and `B` are paired by eigenvalue rank. For each pair
/// the sign of `v_k` is chosen so that the sorted entries of `u_k` and
/// `±v_k` are closest in L2, and the similarity `S = Σ_k s_k u_k v_kᵀ` is
/// rounded to a permutation by maximum-weight assignment. The loss is
/// reported at `ρ = 1`-free scale, i.e. with the caller-independent
/// `ℒ(π̂, A, B, 0)`; use [`crate::energy::loss`] for a specific `ρ`.
pub fn spectral_align(a: &WignerMatrix, b: &WignerMatrix) -> Result<SolveResult> {
    let n = a.n();
    check_dim(n, b.n())?;
    let (_, u) = sorted_eigen(a)?;
    let (_, v) = sorted_eigen(b)?;
    let mut signed = v.clone();
    for k in 0..n {
        if prefers_flip(&u.column(k).into_owned(), &v.column(k).into_owned()) {
            signed.column_mut(k).neg_mut();
        }
    }
    let s = &u * signed.transpose();
    let (pi_hat, _) = hungarian(&AssignmentProblem::new(s, Sense::Maximize)?)?;
    let objective = loss(&pi_hat, a, b, 0.0)?;
    Ok(SolveResult {
        pi_hat,
        objective,
        ties: None,
        iterations: 0,
        exact: false,
    })
}

/// Eigenvalues in decreasing order with matching eigenvector columns.
fn sorted_eigen(m: &WignerMatrix) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.n();
    let eig = SymmetricEigen::try_new(m.as_matrix().clone(), f64::EPSILON, 10_000).ok_or_else(|| {
        Error::Numerical(format!("symmetric eigensolver did not converge for n = {n}"))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    if vecs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvector".into()));
    }
    Ok((vals, vecs))
}

fn prefers_flip(u: &DVector<f64>, v: &DVector<f64>) -> bool {
    let sorted = |it: &mut dyn Iterator<Item = f64>| {
        let mut x: Vec<f64> = it.collect();
        x.sort_by(f64::total_cmp);
        x
    };
    let su = sorted(&mut u.iter().copied());
    let sp = sorted(&mut v.iter().copied());
    let sn = sorted(&mut v.iter().map(|x| -x));
    let dist = |s: &[f64]| su.iter().zip(s).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
    dist(&sn) < dist(&sp)
}
