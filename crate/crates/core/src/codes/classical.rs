use std::collections::VecDeque;
use std::fmt;

use super::distance::{min_logical_weight, DistanceBound, SearchBudget};
use crate::gf2::{self, BinaryMatrix};

/// A classical linear code `ker H` with its `[n, k, d]` parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCode {
    pub h: BinaryMatrix,
    pub n: usize,
    pub k: usize,
    pub d: Option<DistanceBound>,
}

impl fmt::Display for ClassicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            Some(d) => write!(f, "[{},{},{}]", self.n, self.k, d),
            None => write!(f, "[{},{}]", self.n, self.k),
        }
    }
}

/// Parameters of `ker h`; `d` is searched up to weight `dmax` unless the code
/// is small enough to enumerate.
pub fn classical_params(h: &BinaryMatrix, dmax: usize) -> ClassicalCode {
    let n = h.cols();
    let k = n - gf2::rank(h);
    let d = min_logical_weight(h, &BinaryMatrix::zeros(0, n), &SearchBudget::with_max_weight(dmax));
    ClassicalCode { h: h.clone(), n, k, d }
}

/// Length of the shortest cycle in the Tanner graph of `h`, if any.
pub fn tanner_girth(h: &BinaryMatrix) -> Option<usize> {
    let (m, n) = (h.rows(), h.cols());
    let t = h.transpose();
    // Vertices: checks 0..m, bits m..m+n.
    let neighbours = |v: usize| -> Vec<usize> {
        if v < m {
            h.row_ones(v).map(|c| m + c).collect()
        } else {
            t.row_ones(v - m).collect()
        }
    };
    let adjacency: Vec<Vec<usize>> = (0..m + n).map(neighbours).collect();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; m + n];
    let mut parent = vec![usize::MAX; m + n];
    let mut queue = VecDeque::new();
    for root in 0..m + n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[root] = 0;
        parent[root] = usize::MAX;
        queue.clear();
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            if 2 * dist[u] >= best {
                break;
            }
            for &w in &adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}
