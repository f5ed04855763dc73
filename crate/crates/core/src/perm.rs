//! Permutations of `[n] = {1, ..., n}` and their action on unordered vertex
//! pairs (edges).
//!
//! Every public interface speaks 1-based vertex labels. Storage is 0-based;
//! [`Permutation::zero_based`] exposes it for numeric kernels.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{check_dim, Error, Result};

/// Default cap on the number of permutations a single enumeration may yield.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// A permutation of `[n]` with its displaced-point count cached.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
    displaced: usize,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
            displaced: 0,
        }
    }

    /// Builds a permutation from 0-based images, validating bijectivity.
    pub fn from_zero_based(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || seen[v] {
                return Err(Error::InvalidInput(format!(
                    "image is not a bijection of [{n}]"
                )));
            }
            seen[v] = true;
        }
        Ok(Self::from_zero_based_unchecked(image))
    }

    /// Builds a permutation from 1-based images `image[i-1] = σ(i)`.
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        if image.contains(&0) {
            return Err(Error::InvalidInput("1-based image contains 0".into()));
        }
        Self::from_zero_based(image.iter().map(|&v| v - 1).collect())
    }

    pub(crate) fn from_zero_based_unchecked(image: Vec<usize>) -> Self {
        let displaced = image.iter().enumerate().filter(|&(i, &v)| i != v).count();
        Self { image, displaced }
    }

    /// The transposition exchanging the 1-based points `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i == j || i == 0 || j == 0 || i > n || j > n {
            return Err(Error::InvalidInput(format!(
                "transposition ({i} {j}) is not valid in S_{n}"
            )));
        }
        let mut image: Vec<usize> = (0..n).collect();
        image.swap(i - 1, j - 1);
        Ok(Self { image, displaced: 2 })
    }

    /// Uniformly random permutation of `[n]`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(rng);
        Self::from_zero_based_unchecked(image)
    }

    /// Uniformly random element of `S_{n,d}`: a uniform `d`-subset of points,
    /// deranged uniformly by rejection.
    pub fn random_with_displacement<R: Rng + ?Sized>(
        n: usize,
        d: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if d > n || d == 1 {
            return Err(Error::Domain(format!("S_{{{n},{d}}} is empty")));
        }
        let mut points: Vec<usize> = (0..n).collect();
        points.shuffle(rng);
        let support = &points[..d];
        let mut targets = support.to_vec();
        loop {
            targets.shuffle(rng);
            if support.iter().zip(&targets).all(|(a, b)| a != b) {
                break;
            }
        }
        let mut image: Vec<usize> = (0..n).collect();
        for (&s, &t) in support.iter().zip(&targets) {
            image[s] = t;
        }
        Ok(Self { image, displaced: d })
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    /// `σ(i)` for a 1-based point `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1] + 1
    }

    /// 1-based image list.
    pub fn images(&self) -> Vec<usize> {
        self.image.iter().map(|v| v + 1).collect()
    }

    /// 0-based image list for numeric kernels.
    pub fn zero_based(&self) -> &[usize] {
        &self.image
    }

    /// Number of unfixed points `d_σ`.
    pub fn displaced(&self) -> usize {
        self.displaced
    }

    /// Number of fixed points `f_σ = n - d_σ`.
    pub fn fixed(&self) -> usize {
        self.n() - self.displaced
    }

    pub fn is_identity(&self) -> bool {
        self.displaced == 0
    }

    /// 1-based fixed points, increasing.
    pub fn fixed_points(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&i| self.apply(i) == i).collect()
    }

    /// 1-based unfixed points, increasing.
    pub fn unfixed_points(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&i| self.apply(i) != i).collect()
    }

    /// `a ∘ b`, i.e. `i ↦ a(b(i))`.
    pub fn compose(a: &Self, b: &Self) -> Result<Self> {
        check_dim(a.n(), b.n())?;
        Ok(Self::from_zero_based_unchecked(
            b.image.iter().map(|&v| a.image[v]).collect(),
        ))
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Self {
            image: inv,
            displaced: self.displaced,
        }
    }

    /// Fraction of points on which `a` and `b` agree.
    pub fn overlap(a: &Self, b: &Self) -> Result<f64> {
        check_dim(a.n(), b.n())?;
        if a.n() == 0 {
            return Err(Error::Domain("overlap of empty permutations".into()));
        }
        let agree = a.image.iter().zip(&b.image).filter(|(x, y)| x == y).count();
        Ok(agree as f64 / a.n() as f64)
    }

    /// Image of an edge under the induced edge permutation `σ^E`.
    pub fn edge_apply(&self, e: EdgeIndex) -> Result<EdgeIndex> {
        if e.j > self.n() {
            return Err(Error::InvalidInput(format!(
                "edge {e} has an endpoint outside [{}]",
                self.n()
            )));
        }
        Ok(EdgeIndex::canonical(self.apply(e.i), self.apply(e.j)))
    }

    /// Counts of unfixed and fixed edges, by iterating all `C(n, 2)` pairs.
    pub fn edge_action_summary(&self) -> EdgeActionSummary {
        let p = &self.image;
        let n = self.n();
        let mut d_edge = 0;
        let mut f_edge = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if edge_fixed(p, i, j) {
                    f_edge += 1;
                } else {
                    d_edge += 1;
                }
            }
        }
        EdgeActionSummary { d_edge, f_edge }
    }

    /// `(#(D^E_a ∩ D^E_b), #(D^E_a ∩ D^E_b ∩ F^E_{a⁻¹∘b}))`.
    pub fn common_deranged_edges(a: &Self, b: &Self) -> Result<(usize, usize)> {
        check_dim(a.n(), b.n())?;
        let rel = Self::compose(&a.inverse(), b)?;
        let (pa, pb, pr) = (&a.image, &b.image, &rel.image);
        let n = a.n();
        let mut both = 0;
        let mut both_and_rel_fixed = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if !edge_fixed(pa, i, j) && !edge_fixed(pb, i, j) {
                    both += 1;
                    if edge_fixed(pr, i, j) {
                        both_and_rel_fixed += 1;
                    }
                }
            }
        }
        Ok((both, both_and_rel_fixed))
    }
}

#[inline]
fn edge_fixed(p: &[usize], i: usize, j: usize) -> bool {
    let (a, b) = (p[i], p[j]);
    (a == i && b == j) || (a == j && b == i)
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.image.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "]")
    }
}

/// An unordered vertex pair `{i, j}`, stored 1-based with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeIndex {
    i: usize,
    j: usize,
}

impl EdgeIndex {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b || a == 0 || b == 0 {
            return Err(Error::InvalidInput(format!("{{{a},{b}}} is not an edge")));
        }
        Ok(Self::canonical(a, b))
    }

    fn canonical(a: usize, b: usize) -> Self {
        Self {
            i: a.min(b),
            j: a.max(b),
        }
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// All edges of `[n]` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = EdgeIndex> {
        (1..=n).flat_map(move |i| ((i + 1)..=n).map(move |j| EdgeIndex { i, j }))
    }
}

impl fmt::Display for EdgeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.i, self.j)
    }
}

/// Number of unfixed (`d_edge`) and fixed (`f_edge`) edges of `σ^E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeActionSummary {
    pub d_edge: usize,
    pub f_edge: usize,
}

/// Tight bounds on `d^E_σ` given `d_σ = d` in `S_n`:
/// `d(n - d/2 - 1) ≤ d^E ≤ d(n - (d+1)/2)`.
///
/// They follow from `C(n-d, 2) ≤ f^E ≤ C(n-d, 2) + d/2`. The lower end is
/// attained by products of disjoint transpositions, the upper end by
/// permutations without 2-cycles.
pub fn edge_displacement_bounds(n: usize, d: usize) -> (f64, f64) {
    let (n, d) = (n as f64, d as f64);
    (d * (n - d / 2.0 - 1.0), d * (n - (d + 1.0) / 2.0))
}

/// `N = n(n-1)/2`.
pub fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Derangement number `D_m` via `D_m = (m-1)(D_{m-1} + D_{m-2})`.
pub fn derangement_number(m: usize) -> Result<u128> {
    let (mut prev, mut cur) = (1u128, 0u128);
    if m == 0 {
        return Ok(1);
    }
    for k in 2..=m {
        let next = (prev.checked_add(cur))
            .and_then(|s| s.checked_mul((k - 1) as u128))
            .ok_or(Error::Overflow("derangement number"))?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

pub fn binomial(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for t in 0..k {
        // acc * (n - t) is divisible by (t + 1) at every step.
        acc = acc
            .checked_mul((n - t) as u128)
            .ok_or(Error::Overflow("binomial coefficient"))?
            / (t + 1) as u128;
    }
    Ok(acc)
}

/// `#S_{n,d} = C(n, n-d) · D_d`.
pub fn count_with_displacement(n: usize, d: usize) -> Result<u128> {
    if d > n {
        return Ok(0);
    }
    binomial(n, n - d)?
        .checked_mul(derangement_number(d)?)
        .ok_or(Error::Overflow("#S_{n,d}"))
}

/// Streams every permutation with exactly `d` unfixed points, in
/// lexicographic order of the image list.
pub fn enumerate_with_displacement(n: usize, d: usize) -> Result<DisplacementEnumerator> {
    enumerate_with_displacement_budget(n, d, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_with_displacement_budget(
    n: usize,
    d: usize,
    budget: u128,
) -> Result<DisplacementEnumerator> {
    if d > n {
        return Err(Error::Domain(format!("d = {d} exceeds n = {n}")));
    }
    if d == 1 {
        return Err(Error::Domain("S_{n,1} is empty".into()));
    }
    let count = count_with_displacement(n, d)?;
    if count > budget {
        return Err(Error::EnumerationTooLarge { count, budget });
    }
    Ok(DisplacementEnumerator::new(n, d))
}

/// Depth-first lexicographic search with a completion test at every node,
/// so no branch dead-ends.
pub struct DisplacementEnumerator {
    n: usize,
    d: usize,
    image: Vec<usize>,
    used: Vec<bool>,
    // next candidate value to try at each depth
    cursor: Vec<usize>,
    depth: usize,
    unfixed: usize,
    done: bool,
}

impl DisplacementEnumerator {
    fn new(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            image: vec![usize::MAX; n],
            used: vec![false; n],
            cursor: vec![0; n + 1],
            depth: 0,
            unfixed: 0,
            done: false,
        }
    }

    /// Whether positions `depth+1..n` can be completed with exactly
    /// `d - unfixed` more unfixed points.
    fn completable(&self, depth: usize, unfixed: usize) -> bool {
        if unfixed > self.d {
            return false;
        }
        let need = self.d - unfixed;
        let remaining = self.n - depth - 1;
        if need > remaining {
            return false;
        }
        let fixable = ((depth + 1)..self.n).filter(|&p| !self.used[p]).count();
        let forced = remaining - fixable;
        need >= forced && !(need == 1 && forced == 0)
    }
}

impl Iterator for DisplacementEnumerator {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        if self.n == 0 {
            self.done = true;
            return (self.d == 0).then(|| Permutation::identity(0));
        }
        loop {
            let depth = self.depth;
            // undo the previous choice at this depth, if any
            let prev = self.image[depth];
            if prev != usize::MAX {
                self.used[prev] = false;
                if prev != depth {
                    self.unfixed -= 1;
                }
                self.image[depth] = usize::MAX;
            }
            let mut advanced = false;
            while self.cursor[depth] < self.n {
                let v = self.cursor[depth];
                self.cursor[depth] += 1;
                if self.used[v] {
                    continue;
                }
                let unfixed = self.unfixed + usize::from(v != depth);
                self.used[v] = true;
                if self.completable(depth, unfixed) {
                    self.image[depth] = v;
                    self.unfixed = unfixed;
                    advanced = true;
                    break;
                }
                self.used[v] = false;
            }
            if advanced {
                if depth + 1 == self.n {
                    return Some(Permutation {
                        image: self.image.clone(),
                        displaced: self.d,
                    });
                }
                self.depth += 1;
                self.cursor[self.depth] = 0;
            } else if depth == 0 {
                self.done = true;
                return None;
            } else {
                self.depth -= 1;
            }
        }
    }
}

/// All `n(n-1)/2` transpositions, ordered lexicographically by their 2-cycle
/// `(i j)` with `i < j`.
pub fn enumerate_transpositions(n: usize) -> impl Iterator<Item = Permutation> {
    EdgeIndex::all(n).map(move |e| {
        Permutation::transposition(n, e.i(), e.j()).expect("valid edge endpoints")
    })
}

/// Streams all of `S_n` in lexicographic order of the image list.
pub fn enumerate_all(n: usize) -> LexPermutations {
    LexPermutations {
        current: Some((0..n).collect()),
    }
}

pub struct LexPermutations {
    current: Option<Vec<usize>>,
}

impl Iterator for LexPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.current.take()?;
        let out = Permutation::from_zero_based_unchecked(cur.clone());
        let mut nxt = cur;
        if next_permutation(&mut nxt) {
            self.current = Some(nxt);
        }
        Some(out)
    }
}

/// Advances `a` to the next permutation in lexicographic order; returns
/// `false` (leaving `a` untouched) when `a` is the last one.
pub fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_one_based(images).unwrap()
    }

    #[test]
    fn compose_examples() {
        let id = Permutation::identity(5);
        let t12 = Permutation::transposition(5, 1, 2).unwrap();
        let t23 = Permutation::transposition(5, 2, 3).unwrap();
        assert_eq!(Permutation::compose(&id, &t12).unwrap(), t12);
        assert_eq!(Permutation::compose(&t12, &t12).unwrap(), id);
        // (1 2)∘(2 3): 1→2, 2→3, 3→1
        let c = Permutation::compose(&t12, &t23).unwrap();
        let table: Vec<usize> = (1..=5).map(|i| t12.apply(t23.apply(i))).collect();
        assert_eq!(c.images(), table);
        assert_eq!(c.images(), vec![2, 3, 1, 4, 5]);
        assert_eq!(c.displaced(), 3);
    }

    #[test]
    fn compose_size_mismatch() {
        let a = Permutation::identity(3);
        let b = Permutation::identity(4);
        assert!(matches!(
            Permutation::compose(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Permutation::overlap(&a, &b).is_err());
        assert!(Permutation::common_deranged_edges(&a, &b).is_err());
    }

    #[test]
    fn inverse_examples() {
        let id = Permutation::identity(5);
        assert_eq!(id.inverse(), id);
        let t = Permutation::transposition(5, 1, 2).unwrap();
        assert_eq!(t.inverse(), t);
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::from_one_based(&[1, 1, 2]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Permutation::from_one_based(&[1, 4, 2]).is_err());
        assert!(Permutation::transposition(4, 2, 2).is_err());
        assert!(Permutation::transposition(4, 2, 5).is_err());
    }

    #[test]
    fn overlap_examples() {
        let id5 = Permutation::identity(5);
        let t = Permutation::transposition(5, 1, 2).unwrap();
        assert_eq!(Permutation::overlap(&t, &t).unwrap(), 1.0);
        assert_eq!(Permutation::overlap(&id5, &t).unwrap(), 0.6);
        let der = perm(&[2, 1, 4, 3]);
        assert_eq!(Permutation::overlap(&Permutation::identity(4), &der).unwrap(), 0.0);
    }

    #[test]
    fn edge_apply_examples() {
        let id = Permutation::identity(5);
        let t = Permutation::transposition(5, 1, 2).unwrap();
        let e12 = EdgeIndex::new(1, 2).unwrap();
        assert_eq!(id.edge_apply(e12).unwrap(), e12);
        assert_eq!(
            t.edge_apply(EdgeIndex::new(1, 3).unwrap()).unwrap(),
            EdgeIndex::new(2, 3).unwrap()
        );
        assert_eq!(t.edge_apply(e12).unwrap(), e12);
        assert!(t.edge_apply(EdgeIndex::new(1, 6).unwrap()).is_err());
        assert!(EdgeIndex::new(3, 3).is_err());
        assert_eq!(EdgeIndex::new(4, 2).unwrap(), EdgeIndex::new(2, 4).unwrap());
    }

    #[test]
    fn edge_summary_examples() {
        let t = Permutation::transposition(5, 1, 2).unwrap();
        let s = t.edge_action_summary();
        assert_eq!(s.d_edge, 6);
        assert_eq!(s.d_edge + s.f_edge, 10);
        let id = Permutation::identity(7);
        assert_eq!(
            id.edge_action_summary(),
            EdgeActionSummary { d_edge: 0, f_edge: 21 }
        );
    }

    #[test]
    fn sandwich_is_tight_on_both_ends() {
        // disjoint transpositions attain the lower end, a full cycle the upper.
        let n = 8;
        let t = perm(&[2, 1, 4, 3, 5, 6, 7, 8]);
        let (lo, _) = edge_displacement_bounds(n, t.displaced());
        assert_eq!(t.edge_action_summary().d_edge as f64, lo);
        let c = perm(&[2, 3, 4, 5, 1, 6, 7, 8]);
        let (_, hi) = edge_displacement_bounds(n, c.displaced());
        assert_eq!(c.edge_action_summary().d_edge as f64, hi);
    }

    #[test]
    fn transposition_violates_shifted_lower_bound() {
        // d(n - d/2) would exceed the true d^E = 2(n-2) of a transposition.
        for n in 3..10 {
            let t = Permutation::transposition(n, 1, 2).unwrap();
            let de = t.edge_action_summary().d_edge;
            assert_eq!(de, 2 * (n - 2));
            assert!((de as f64) < 2.0 * (n as f64 - 1.0));
        }
    }

    #[test]
    fn sandwich_holds_exhaustively() {
        for n in 2..=7 {
            for s in enumerate_all(n) {
                let (lo, hi) = edge_displacement_bounds(n, s.displaced());
                let de = s.edge_action_summary().d_edge as f64;
                assert!(lo <= de && de <= hi, "{s} breaks the sandwich");
            }
        }
    }

    #[test]
    fn band_holds_exhaustively_away_from_full_derangement() {
        for n in 2..=7 {
            for s in enumerate_all(n) {
                let d = s.displaced() as f64;
                let de = s.edge_action_summary().d_edge as f64;
                assert!(de <= d * n as f64);
                if s.displaced() + 2 <= n {
                    assert!(de >= d * n as f64 / 2.0, "{s}");
                }
            }
        }
        // (1 2)(3 4) in S_4 sits below d·n/2.
        assert_eq!(perm(&[2, 1, 4, 3]).edge_action_summary().d_edge, 4);
    }

    #[test]
    fn common_deranged_edge_examples() {
        let t12 = Permutation::transposition(6, 1, 2).unwrap();
        let t34 = Permutation::transposition(6, 3, 4).unwrap();
        assert_eq!(Permutation::common_deranged_edges(&t12, &t34).unwrap(), (4, 0));
        let t12 = Permutation::transposition(5, 1, 2).unwrap();
        let t23 = Permutation::transposition(5, 2, 3).unwrap();
        assert_eq!(Permutation::common_deranged_edges(&t12, &t23).unwrap(), (3, 0));
    }

    #[test]
    fn common_deranged_edges_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..1000 {
            let n = 5 + k % 46;
            let s = Permutation::random(n, &mut rng);
            let de = s.edge_action_summary().d_edge;
            assert_eq!(Permutation::common_deranged_edges(&s, &s).unwrap(), (de, de));
        }
    }

    #[test]
    fn vertex_to_edge_permutation_is_injective() {
        for n in 3..=5 {
            let actions: HashSet<Vec<EdgeIndex>> = enumerate_all(n)
                .map(|s| EdgeIndex::all(n).map(|e| s.edge_apply(e).unwrap()).collect())
                .collect();
            assert_eq!(actions.len(), enumerate_all(n).count());
        }
    }

    #[test]
    fn derangement_numbers() {
        let expect = [1u128, 0, 1, 2, 9, 44, 265, 1854, 14833, 133496];
        for (m, &e) in expect.iter().enumerate() {
            assert_eq!(derangement_number(m).unwrap(), e);
        }
        assert!(derangement_number(34).is_ok());
        assert!(matches!(derangement_number(40), Err(Error::Overflow(_))));
    }

    #[test]
    fn enumeration_counts() {
        let brute: Vec<_> = enumerate_all(4).filter(|p| p.displaced() == 4).collect();
        assert_eq!(brute.len(), 9);
        let listed: Vec<_> = enumerate_with_displacement(4, 4).unwrap().collect();
        assert_eq!(listed, brute);

        let s52: Vec<_> = enumerate_with_displacement(5, 2).unwrap().collect();
        assert_eq!(s52.len(), 10);
        assert!(s52.iter().all(|p| p.displaced() == 2));

        let s50: Vec<_> = enumerate_with_displacement(5, 0).unwrap().collect();
        assert_eq!(s50, vec![Permutation::identity(5)]);
    }

    #[test]
    fn enumeration_matches_filter_and_partitions_sn() {
        for n in 1..=7usize {
            let all: Vec<_> = enumerate_all(n).collect();
            let mut total = 0;
            for d in (0..=n).filter(|&d| d != 1) {
                let listed: Vec<_> = enumerate_with_displacement(n, d).unwrap().collect();
                let filtered: Vec<_> = all.iter().filter(|p| p.displaced() == d).cloned().collect();
                assert_eq!(listed, filtered, "n={n} d={d}");
                assert_eq!(listed.len() as u128, count_with_displacement(n, d).unwrap());
                assert!((listed.len() as f64) <= (n as f64).powi(d as i32));
                total += listed.len();
            }
            assert_eq!(total, all.len());
        }
        assert_eq!(enumerate_all(7).count(), 5040);
    }

    #[test]
    fn enumeration_guards() {
        assert!(matches!(
            enumerate_with_displacement(5, 1),
            Err(Error::Domain(_))
        ));
        assert!(enumerate_with_displacement(5, 6).is_err());
        assert!(matches!(
            enumerate_with_displacement_budget(12, 12, 1000),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn transposition_enumeration() {
        assert_eq!(enumerate_transpositions(3).count(), 3);
        assert_eq!(enumerate_transpositions(5).count(), 10);
        let ts: Vec<_> = enumerate_transpositions(20).collect();
        let distinct: HashSet<_> = ts.iter().cloned().collect();
        assert_eq!(ts.len(), 190);
        assert_eq!(distinct.len(), 190);
        assert!(ts.iter().all(|t| t.displaced() == 2));
        let first: Vec<_> = enumerate_transpositions(4).map(|t| t.unfixed_points()).collect();
        assert_eq!(
            first,
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
    }

    #[test]
    fn random_with_displacement_lands_in_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [0, 2, 3, 7, 10] {
            for _ in 0..50 {
                let p = Permutation::random_with_displacement(10, d, &mut rng).unwrap();
                assert_eq!(p.displaced(), d);
                assert_eq!(p, Permutation::from_zero_based(p.zero_based().to_vec()).unwrap());
            }
        }
        assert!(Permutation::random_with_displacement(10, 1, &mut rng).is_err());
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(seed in any::<u64>(), n in 1usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = Permutation::random(n, &mut rng);
            let id = Permutation::identity(n);
            prop_assert_eq!(Permutation::compose(&s, &s.inverse()).unwrap(), id.clone());
            prop_assert_eq!(Permutation::compose(&s.inverse(), &s).unwrap(), id);
            let mut sorted = s.images();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (1..=n).collect::<Vec<_>>());
            prop_assert_eq!(s.displaced() + s.fixed(), n);
        }

        #[test]
        fn overlap_equals_relative_fixed_points(seed in any::<u64>(), n in 1usize..30) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Permutation::random(n, &mut rng);
            let b = Permutation::random(n, &mut rng);
            let rel = Permutation::compose(&a.inverse(), &b).unwrap();
            prop_assert_eq!(Permutation::overlap(&a, &b).unwrap(), rel.fixed() as f64 / n as f64);
        }

        #[test]
        fn edge_map_is_a_bijection(seed in any::<u64>(), n in 3usize..25) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = Permutation::random(n, &mut rng);
            let images: HashSet<_> = EdgeIndex::all(n).map(|e| s.edge_apply(e).unwrap()).collect();
            prop_assert_eq!(images.len(), edge_count(n));
            let summary = s.edge_action_summary();
            prop_assert_eq!(summary.d_edge + summary.f_edge, edge_count(n));
        }
    }
}
