//! Minimum-weight searches for logical operators.
//!
//! Every search here answers the same question: given a check matrix `C` and a
//! stabiliser matrix `S` whose rows lie in `ker C`, what is the least weight of
//! a vector in `ker C \ rowspace S`? Classical distances use an empty `S`; CSS
//! distances use `(Hz, Hx)` and `(Hx, Hz)`; infinite-bias distances of rotated
//! codes use the effective matrices built in [`super::RotatedCode`].
//!
//! Three exact strategies are tried in order:
//!
//! 1. Gray-code enumeration of `ker C` when its dimension is within
//!    [`SearchBudget::enumeration_log2`].
//! 2. A cycle search when every column of `C` has weight ≤ 2. Columns are then
//!    edges of a graph (weight-1 columns attach to a shared boundary vertex),
//!    `ker C` is its cycle space, and candidates of the form
//!    `path(v,x) + (x,y) + path(y,v)` over all BFS roots `v` contain a
//!    minimum-weight cycle outside any subspace.
//! 3. Exhaustive search over supports of weight ≤ [`SearchBudget::max_weight`],
//!    capped by [`SearchBudget::max_candidates`].
//!
//! When none of them settles the value, a randomised information-set search
//! supplies an upper bound.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gf2::{self, BinaryMatrix, BinaryVector};

/// An interval `[lower, upper]` known to contain a distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistanceBound {
    pub lower: usize,
    pub upper: Option<usize>,
}

impl DistanceBound {
    pub fn exact(d: usize) -> Self {
        Self { lower: d, upper: Some(d) }
    }

    pub fn is_exact(&self) -> bool {
        self.upper == Some(self.lower)
    }

    /// The distance when it is known exactly.
    pub fn value(&self) -> Option<usize> {
        self.is_exact().then_some(self.lower)
    }

    /// Bound on the minimum of two distances.
    pub fn min(self, other: Self) -> Self {
        let upper = match (self.upper, other.upper) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let lower = self.lower.min(other.lower);
        Self { lower: upper.map_or(lower, |u| lower.min(u)), upper }
    }
}

impl fmt::Display for DistanceBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) if u == self.lower => write!(f, "{u}"),
            Some(u) if self.lower <= 1 => write!(f, "<={u}"),
            Some(u) => write!(f, "{}..={u}", self.lower),
            None => write!(f, ">={}", self.lower),
        }
    }
}

/// Limits for the distance searches.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// Enumerate `ker C` outright when its dimension is at most this.
    pub enumeration_log2: u32,
    /// Largest support weight tried by the exhaustive search.
    pub max_weight: usize,
    /// Cap on supports visited by the exhaustive search.
    pub max_candidates: u64,
    /// Rounds of randomised information-set search for an upper bound.
    pub random_rounds: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { enumeration_log2: 24, max_weight: 6, max_candidates: 200_000_000, random_rounds: 64, seed: 0x5eed }
    }
}

impl SearchBudget {
    pub fn with_max_weight(max_weight: usize) -> Self {
        Self { max_weight, ..Self::default() }
    }
}

/// The quotient `ker C / rowspace S` with a basis of coset representatives
/// and a dual certificate for fast membership tests.
pub(crate) struct LogicalSpace {
    n: usize,
    /// Basis of `rowspace S` (rows independent).
    stabilisers: Vec<BinaryVector>,
    /// Coset representatives: `ker C = span(stabilisers) ⊕ span(representatives)`.
    pub(crate) representatives: Vec<BinaryVector>,
    /// `k × n` matrix `P` with `P·s = 0` on `S` and `P·qᵀ = I` on the representatives,
    /// so `v ∈ ker C` is a nontrivial logical iff `P·v ≠ 0`.
    certificate: BinaryMatrix,
}

/// Incremental echelon basis supporting "insert if independent".
struct EchelonBasis {
    rows: Vec<(usize, BinaryVector)>,
}

impl EchelonBasis {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    /// Inserts `v` if it is independent of the current span.
    fn insert(&mut self, v: &BinaryVector) -> bool {
        let mut w = v.clone();
        for (p, row) in &self.rows {
            if w.get(*p) {
                w.xor_assign(row);
            }
        }
        let lead = w.iter_ones().next();
        match lead {
            Some(p) => {
                for (_, row) in self.rows.iter_mut() {
                    if row.get(p) {
                        row.xor_assign(&w);
                    }
                }
                self.rows.push((p, w));
                true
            }
            None => false,
        }
    }
}

impl LogicalSpace {
    pub(crate) fn new(checks: &BinaryMatrix, stabilisers: &BinaryMatrix) -> Self {
        let n = checks.cols();
        debug_assert_eq!(stabilisers.cols(), n);
        let mut echelon = EchelonBasis::new();
        let mut stab_basis = Vec::new();
        for r in 0..stabilisers.rows() {
            let v = stabilisers.row(r);
            if echelon.insert(&v) {
                stab_basis.push(v);
            }
        }
        let mut representatives = Vec::new();
        for v in gf2::nullspace_basis(checks) {
            if echelon.insert(&v) {
                representatives.push(v);
            }
        }
        let certificate = dual_certificate(n, &stab_basis, &representatives);
        Self { n, stabilisers: stab_basis, representatives, certificate }
    }

    pub(crate) fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub(crate) fn kernel_dim(&self) -> usize {
        self.representatives.len() + self.stabilisers.len()
    }

    #[inline]
    pub(crate) fn is_logical(&self, v: &BinaryVector) -> bool {
        (0..self.certificate.rows()).any(|r| {
            self.certificate.row_words(r).iter().zip(v.words()).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1
                == 1
        })
    }

    /// Minimum weight over all of `ker C \ S` by Gray-code enumeration.
    fn enumerate(&self) -> usize {
        let basis: Vec<&BinaryVector> = self.stabilisers.iter().chain(&self.representatives).collect();
        let s = self.stabilisers.len();
        let total: u64 = 1u64 << basis.len();
        let mut v = BinaryVector::zeros(self.n);
        let mut best = usize::MAX;
        for i in 1..total {
            let bit = i.trailing_zeros() as usize;
            gf2::xor_words(v.words_mut(), basis[bit].words());
            let gray = i ^ (i >> 1);
            if gray >> s != 0 {
                best = best.min(v.weight());
            }
        }
        best
    }
}

/// Builds `P` with rows orthogonal to `stabilisers` and `P·repsᵀ = I`.
fn dual_certificate(n: usize, stabilisers: &[BinaryVector], reps: &[BinaryVector]) -> BinaryMatrix {
    let k = reps.len();
    if k == 0 {
        return BinaryMatrix::zeros(0, n);
    }
    let s_mat = BinaryMatrix::from_vectors(n, stabilisers);
    let dual = gf2::nullspace_basis(&s_mat);
    let dual_mat = BinaryMatrix::from_vectors(n, &dual);
    let reps_mat = BinaryMatrix::from_vectors(n, reps);
    // Mᵀ = reps · dualᵀ  (k × dim)
    let m_t = reps_mat.mul(&dual_mat.transpose()).expect("shapes agree");
    let red = gf2::row_reduce(&m_t);
    assert_eq!(red.rank(), k, "coset representatives must pair nondegenerately with S^perp");
    let picked = BinaryMatrix::from_vectors(n, &red.pivots.iter().map(|&p| dual[p].clone()).collect::<Vec<_>>());
    red.transform.transpose().mul(&picked).expect("shapes agree")
}

/// Exact minimum over a cycle space; `None` when some column has weight > 2.
fn cycle_search(checks: &BinaryMatrix, space: &LogicalSpace) -> Option<usize> {
    let n = checks.cols();
    let t = checks.transpose();
    let boundary = checks.rows();
    let vertices = boundary + 1;
    let mut edges = Vec::with_capacity(n);
    let mut best = usize::MAX;
    for c in 0..n {
        let ends: Vec<usize> = t.row_ones(c).collect();
        match ends[..] {
            [] => {
                // A zero column is a weight-one kernel vector by itself.
                if space.is_logical(&BinaryVector::from_support(n, &[c])) {
                    best = 1;
                }
            }
            [a] => edges.push((a, boundary, c)),
            [a, b] => edges.push((a, b, c)),
            _ => return None,
        }
    }
    if best == 1 {
        return Some(1);
    }
    let mut adjacency = vec![Vec::new(); vertices];
    for &(a, b, c) in &edges {
        adjacency[a].push((b, c));
        adjacency[b].push((a, c));
    }
    let mut dist = vec![usize::MAX; vertices];
    let mut paths: Vec<BinaryVector> = vec![BinaryVector::zeros(n); vertices];
    let mut queue = std::collections::VecDeque::new();
    let mut cand = BinaryVector::zeros(n);
    for root in 0..vertices {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[root] = 0;
        paths[root].clear();
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &(w, c) in &adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    let mut p = paths[u].clone();
                    p.set(c, true);
                    paths[w] = p;
                    queue.push_back(w);
                }
            }
        }
        for &(a, b, c) in &edges {
            if dist[a] == usize::MAX || dist[b] == usize::MAX || dist[a] + dist[b] + 1 >= best {
                continue;
            }
            cand.clone_from(&paths[a]);
            cand.xor_assign(&paths[b]);
            cand.flip(c);
            let w = cand.weight();
            if w > 0 && w < best && space.is_logical(&cand) {
                best = w;
            }
        }
    }
    Some(best)
}

/// Exhaustive search of weight-`w` supports. Returns `Ok(Some(w))` when a
/// logical is found, `Ok(None)` when none exists at that weight, and `Err(())`
/// when the candidate cap was hit.
fn search_weight(
    columns: &[BinaryVector],
    space: &LogicalSpace,
    n: usize,
    w: usize,
    budget: &mut u64,
) -> Result<bool, ()> {
    fn rec(
        columns: &[BinaryVector],
        space: &LogicalSpace,
        start: usize,
        left: usize,
        synd: &mut BinaryVector,
        support: &mut Vec<usize>,
        n: usize,
        budget: &mut u64,
    ) -> Result<bool, ()> {
        if left == 0 {
            if *budget == 0 {
                return Err(());
            }
            *budget -= 1;
            if synd.is_zero() {
                return Ok(space.is_logical(&BinaryVector::from_support(n, support)));
            }
            return Ok(false);
        }
        for c in start..=n - left {
            synd.xor_assign(&columns[c]);
            support.push(c);
            let found = rec(columns, space, c + 1, left - 1, synd, support, n, budget);
            support.pop();
            synd.xor_assign(&columns[c]);
            if found? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    let rows = columns.first().map_or(0, BinaryVector::len);
    let mut synd = BinaryVector::zeros(rows);
    rec(columns, space, 0, w, &mut synd, &mut Vec::with_capacity(w), n, budget)
}

/// Upper bound from random information sets: eliminate `C` in a random
/// column order and test each resulting sparse kernel vector.
fn information_set_bound(checks: &BinaryMatrix, space: &LogicalSpace, rounds: usize, seed: u64) -> Option<usize> {
    let n = checks.cols();
    let mut best = space.representatives.iter().map(BinaryVector::weight).min();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..rounds {
        order.shuffle(&mut rng);
        let mut m = checks.clone();
        let pivots = gf2::eliminate(&mut m, order.iter().copied(), None);
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for &free in order.iter().filter(|&&c| !is_pivot[c]) {
            let mut v = BinaryVector::zeros(n);
            v.set(free, true);
            for (i, &p) in pivots.iter().enumerate() {
                if m.get(i, free) {
                    v.set(p, true);
                }
            }
            let w = v.weight();
            if best.is_none_or(|b| w < b) && space.is_logical(&v) {
                best = Some(w);
            }
        }
    }
    best
}

/// Least weight of a vector in `ker checks` outside `rowspace stabilisers`;
/// `None` when that set is empty.
pub fn min_logical_weight(
    checks: &BinaryMatrix,
    stabilisers: &BinaryMatrix,
    budget: &SearchBudget,
) -> Option<DistanceBound> {
    let space = LogicalSpace::new(checks, stabilisers);
    if space.dim() == 0 {
        return None;
    }
    if space.kernel_dim() as u32 <= budget.enumeration_log2 {
        return Some(DistanceBound::exact(space.enumerate()));
    }
    if let Some(d) = cycle_search(checks, &space) {
        return Some(DistanceBound::exact(d));
    }
    let n = checks.cols();
    let upper = information_set_bound(checks, &space, budget.random_rounds, budget.seed);
    let t = checks.transpose();
    let columns: Vec<BinaryVector> = (0..n).map(|c| t.row(c)).collect();
    let mut remaining = budget.max_candidates;
    let mut lower = 1;
    let cap = budget.max_weight.min(upper.map_or(usize::MAX, |u| u - 1));
    for w in 1..=cap.min(n) {
        match search_weight(&columns, &space, n, w, &mut remaining) {
            Ok(true) => return Some(DistanceBound::exact(w)),
            Ok(false) => lower = w + 1,
            Err(()) => break,
        }
    }
    Some(DistanceBound { lower, upper })
}
