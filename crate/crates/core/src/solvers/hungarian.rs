use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::perm::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Square cost matrix; assigning row `i` to column `j` contributes `cost[(i, j)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentProblem {
    pub cost: DMatrix<f64>,
    pub sense: Sense,
}

impl AssignmentProblem {
    pub fn new(cost: DMatrix<f64>, sense: Sense) -> Result<Self> {
        if !cost.is_square() {
            return Err(Error::InvalidInput(format!(
                "cost matrix is {}x{}, not square",
                cost.nrows(),
                cost.ncols()
            )));
        }
        if cost.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("cost matrix has a non-finite entry".into()));
        }
        Ok(Self { cost, sense })
    }
}

/// Shortest augmenting path Hungarian algorithm with row/column potentials,
/// O(n³). Returns the assignment `i ↦ j` and the sum of selected entries in
/// row order.
pub fn hungarian(problem: &AssignmentProblem) -> Result<(Permutation, f64)> {
    let AssignmentProblem { cost, sense } = AssignmentProblem::new(problem.cost.clone(), problem.sense)?;
    let n = cost.nrows();
    if n == 0 {
        return Ok((Permutation::identity(0), 0.0));
    }
    let sign = match sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let c = |i: usize, j: usize| sign * cost[(i - 1, j - 1)];

    // 1-based arrays; column 0 is a virtual start column
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = c(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            if j1 == 0 {
                return Err(Error::Numerical("assignment search stalled".into()));
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut image = vec![0usize; n];
    for j in 1..=n {
        image[row_of[j] - 1] = j - 1;
    }
    let value = image.iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum();
    Ok((Permutation::from_zero_based(image)?, value))
}

/// Maximizes `Σ_i ⟨u_i, v_π(i)⟩` over permutations, rows being the vectors.
pub fn lap_align(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<Permutation> {
    check_dim(u.nrows(), v.nrows())?;
    check_dim(u.ncols(), v.ncols())?;
    let cost = u * v.transpose();
    Ok(hungarian(&AssignmentProblem::new(cost, Sense::Maximize)?)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GaussianStream;
    use crate::perm::enumerate_all;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn solve(rows: &[&[f64]], sense: Sense) -> (Vec<usize>, f64) {
        let n = rows.len();
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let (p, v) = hungarian(&AssignmentProblem::new(m, sense).unwrap()).unwrap();
        (p.images(), v)
    }

    #[test]
    fn two_by_two() {
        assert_eq!(solve(&[&[1.0, 2.0], &[3.0, 5.0]], Sense::Minimize), (vec![2, 1], 5.0));
        assert_eq!(solve(&[&[1.0, 2.0], &[3.0, 5.0]], Sense::Maximize), (vec![1, 2], 6.0));
    }

    #[test]
    fn identity_dominant() {
        let n = 6;
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { -10.0 } else { 0.0 });
        let (p, v) = hungarian(&AssignmentProblem::new(m, Sense::Minimize).unwrap()).unwrap();
        assert!(p.is_identity());
        assert_eq!(v, -10.0 * n as f64);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(AssignmentProblem::new(DMatrix::zeros(2, 3), Sense::Minimize).is_err());
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(AssignmentProblem::new(m.clone(), Sense::Minimize).is_err());
        let raw = AssignmentProblem { cost: m, sense: Sense::Minimize };
        assert!(hungarian(&raw).is_err());
    }

    fn oracle(m: &DMatrix<f64>, sense: Sense) -> f64 {
        let n = m.nrows();
        let vals = enumerate_all(n).map(|p| {
            p.zero_based().iter().enumerate().map(|(i, &j)| m[(i, j)]).sum::<f64>()
        });
        match sense {
            Sense::Minimize => vals.fold(f64::INFINITY, f64::min),
            Sense::Maximize => vals.fold(f64::NEG_INFINITY, f64::max),
        }
    }

    #[test]
    fn matches_exhaustive_oracle() {
        let mut g = GaussianStream::new(ChaCha8Rng::seed_from_u64(17));
        for k in 0..100 {
            let m = DMatrix::from_fn(7, 7, |_, _| g.next_gaussian());
            let sense = if k % 2 == 0 { Sense::Minimize } else { Sense::Maximize };
            let (_, v) = hungarian(&AssignmentProblem::new(m.clone(), sense).unwrap()).unwrap();
            assert_eq!(v, oracle(&m, sense));
        }
    }

    fn permute_rows(u: &DMatrix<f64>, sigma: &Permutation) -> DMatrix<f64> {
        // row σ(i) of the result is row i of u
        let inv = sigma.inverse();
        let p = inv.zero_based();
        DMatrix::from_fn(u.nrows(), u.ncols(), |r, c| u[(p[r], c)])
    }

    #[test]
    fn lap_align_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut g = GaussianStream::new(ChaCha8Rng::seed_from_u64(6));
        let u = DMatrix::from_fn(10, 4, |_, _| g.next_gaussian());
        assert!(lap_align(&u, &u).unwrap().is_identity());
        let s = Permutation::random(10, &mut rng);
        assert_eq!(lap_align(&u, &permute_rows(&u, &s)).unwrap(), s);
        assert!(lap_align(&u, &DMatrix::zeros(9, 4)).is_err());
    }

    #[test]
    fn lap_align_with_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut g = GaussianStream::new(ChaCha8Rng::seed_from_u64(9));
        let mut hits = 0;
        for _ in 0..100 {
            let u = DMatrix::from_fn(50, 20, |_, _| g.next_gaussian());
            let s = Permutation::random(50, &mut rng);
            let v = permute_rows(&u, &s).map(|x| x + 0.1 * g.next_gaussian());
            hits += usize::from(lap_align(&u, &v).unwrap() == s);
        }
        assert!(hits >= 95, "{hits}");
    }
}
