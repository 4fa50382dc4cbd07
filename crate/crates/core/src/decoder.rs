//! Belief propagation with ordered-statistics post-processing.
//!
//! BP is the product-sum algorithm in the log-likelihood domain with a
//! flooding schedule. When it fails to satisfy the syndrome, OSD sorts the
//! columns by BP's posterior error probability, solves `H·x = s` on the first
//! independent columns in that order, and optionally sweeps all patterns on the
//! `osd_order` most likely non-basis columns.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, BinaryMatrix, BinaryVector};

const PRIOR_FLOOR: f64 = 1e-12;
const MAX_OSD_ORDER: usize = 15;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    #[default]
    Parallel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoderConfig {
    /// BP iteration cap; `None` selects `max(32, N/10)`.
    pub max_iterations: Option<usize>,
    pub osd_order: usize,
    pub llr_clip: f64,
    pub schedule: Schedule,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self { max_iterations: None, osd_order: 0, llr_clip: 30.0, schedule: Schedule::Parallel }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == Some(0) {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if self.osd_order > MAX_OSD_ORDER {
            return Err(Error::Config(format!("osd_order {} exceeds {MAX_OSD_ORDER}", self.osd_order)));
        }
        if !(self.llr_clip > 0.0 && self.llr_clip.is_finite()) {
            return Err(Error::Config(format!("llr_clip must be positive, got {}", self.llr_clip)));
        }
        Ok(())
    }

    pub fn iterations_for(&self, n: usize) -> usize {
        self.max_iterations.unwrap_or_else(|| (n / 10).max(32))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub recovery: BinaryVector,
    /// BP alone satisfied the syndrome.
    pub converged: bool,
    /// Posterior error probability of each bit after BP.
    pub soft_probs: Vec<f64>,
    pub used_osd: bool,
    pub iterations: usize,
}

/// Edge lists of a Tanner graph plus the dense matrix for OSD.
#[derive(Debug)]
struct Graph {
    m: usize,
    n: usize,
    /// Edges sorted by check; check `c` owns `check_start[c]..check_start[c+1]`.
    check_start: Vec<usize>,
    edge_bit: Vec<usize>,
    /// For each bit, the ids of its edges.
    bit_start: Vec<usize>,
    bit_edges: Vec<usize>,
    /// `[H | 0]`: the last column receives the syndrome.
    augmented: BinaryMatrix,
}

impl Graph {
    fn new(h: &BinaryMatrix) -> Self {
        let (m, n) = (h.rows(), h.cols());
        let mut check_start = Vec::with_capacity(m + 1);
        let mut edge_bit = Vec::new();
        check_start.push(0);
        for r in 0..m {
            edge_bit.extend(h.row_ones(r));
            check_start.push(edge_bit.len());
        }
        let mut degree = vec![0usize; n];
        for &b in &edge_bit {
            degree[b] += 1;
        }
        let mut bit_start = vec![0usize; n + 1];
        for b in 0..n {
            bit_start[b + 1] = bit_start[b] + degree[b];
        }
        let mut fill = bit_start.clone();
        let mut bit_edges = vec![0usize; edge_bit.len()];
        for (e, &b) in edge_bit.iter().enumerate() {
            bit_edges[fill[b]] = e;
            fill[b] += 1;
        }
        let augmented = h.hstack(&BinaryMatrix::zeros(m, 1)).expect("same height");
        Self { m, n, check_start, edge_bit, bit_start, bit_edges, augmented }
    }
}

/// BP+OSD decoder for one parity-check matrix. Owns its message buffers, so
/// use one instance per thread; clones share the graph.
#[derive(Clone, Debug)]
pub struct BpOsdDecoder {
    graph: Arc<Graph>,
    cfg: DecoderConfig,
    prior_llr: Vec<f64>,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    tanh_buf: Vec<f64>,
    posterior: Vec<f64>,
    hard: BinaryVector,
    work: BinaryMatrix,
    order: Vec<usize>,
}

impl BpOsdDecoder {
    pub fn new(h: &BinaryMatrix, cfg: DecoderConfig) -> Result<Self> {
        cfg.validate()?;
        let graph = Graph::new(h);
        let edges = graph.edge_bit.len();
        let max_check_degree = graph.check_start.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
        Ok(Self {
            prior_llr: vec![0.0; graph.n],
            v2c: vec![0.0; edges],
            c2v: vec![0.0; edges],
            tanh_buf: vec![0.0; 2 * max_check_degree + 2],
            posterior: vec![0.0; graph.n],
            hard: BinaryVector::zeros(graph.n),
            work: graph.augmented.clone(),
            order: (0..graph.n).collect(),
            graph: Arc::new(graph),
            cfg,
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn check_matrix(&self) -> BinaryMatrix {
        self.graph.augmented.columns(0, self.graph.n)
    }

    fn check_inputs(&self, syndrome: &BinaryVector, priors: &[f64]) -> Result<()> {
        if syndrome.len() != self.graph.m {
            return Err(Error::Dimension { expected: self.graph.m, found: syndrome.len(), context: "syndrome" });
        }
        if priors.len() != self.graph.n {
            return Err(Error::Dimension { expected: self.graph.n, found: priors.len(), context: "priors" });
        }
        if priors.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Domain("priors must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn syndrome_matches(&self, syndrome: &BinaryVector) -> bool {
        let g = &*self.graph;
        (0..g.m).all(|c| {
            let parity = g.edge_bit[g.check_start[c]..g.check_start[c + 1]].iter().filter(|&&b| self.hard.get(b)).count() & 1;
            (parity == 1) == syndrome.get(c)
        })
    }

    /// Runs BP; returns `(converged, iterations)`. Results are left in
    /// `self.hard` and `self.posterior` (as LLRs).
    fn run_bp(&mut self, syndrome: &BinaryVector, priors: &[f64]) -> (bool, usize) {
        let clip = self.cfg.llr_clip;
        let g = Arc::clone(&self.graph);
        for (l, &p) in self.prior_llr.iter_mut().zip(priors) {
            let p = p.clamp(PRIOR_FLOOR, 1.0 - PRIOR_FLOOR);
            *l = ((1.0 - p) / p).ln().clamp(-clip, clip);
        }
        for (e, &b) in g.edge_bit.iter().enumerate() {
            self.v2c[e] = self.prior_llr[b];
        }
        let max_iter = self.cfg.iterations_for(g.n);
        for it in 1..=max_iter {
            // Check-to-variable: leave-one-out tanh products via prefix/suffix.
            for c in 0..g.m {
                let (start, end) = (g.check_start[c], g.check_start[c + 1]);
                let d = end - start;
                if d == 0 {
                    continue;
                }
                let sign = if syndrome.get(c) { -1.0 } else { 1.0 };
                let (prefix, suffix) = self.tanh_buf.split_at_mut(d + 1);
                prefix[0] = 1.0;
                for i in 0..d {
                    prefix[i + 1] = prefix[i] * (0.5 * self.v2c[start + i]).tanh();
                }
                suffix[d] = 1.0;
                for i in (0..d).rev() {
                    suffix[i] = suffix[i + 1] * (0.5 * self.v2c[start + i]).tanh();
                }
                for i in 0..d {
                    let t = sign * prefix[i] * suffix[i + 1];
                    self.c2v[start + i] = (2.0 * t.atanh()).clamp(-clip, clip);
                }
            }
            // Variable-to-check and posteriors.
            for b in 0..g.n {
                let edges = &g.bit_edges[g.bit_start[b]..g.bit_start[b + 1]];
                let total = self.prior_llr[b] + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
                for &e in edges {
                    self.v2c[e] = (total - self.c2v[e]).clamp(-clip, clip);
                }
                self.posterior[b] = total;
                self.hard.set(b, total < 0.0);
            }
            if self.syndrome_matches(syndrome) {
                return (true, it);
            }
        }
        (false, max_iter)
    }

    /// BP only: `(hard decision, posterior probabilities, converged)`.
    pub fn bp(&mut self, syndrome: &BinaryVector, priors: &[f64]) -> Result<(BinaryVector, Vec<f64>, bool)> {
        self.check_inputs(syndrome, priors)?;
        let (converged, _) = self.run_bp(syndrome, priors);
        Ok((self.hard.clone(), self.posterior.iter().map(|&l| llr_to_prob(l)).collect(), converged))
    }

    /// OSD on the given posterior probabilities.
    pub fn osd(&mut self, syndrome: &BinaryVector, soft: &[f64]) -> Result<BinaryVector> {
        self.check_inputs(syndrome, soft)?;
        let llrs: Vec<f64> = soft.iter().map(|&p| prob_to_llr(p)).collect();
        self.osd_from_llrs(syndrome, &llrs)
    }

    fn osd_from_llrs(&mut self, syndrome: &BinaryVector, llrs: &[f64]) -> Result<BinaryVector> {
        let g = Arc::clone(&self.graph);
        let n = g.n;
        // Descending error probability is ascending LLR; sort_by is stable.
        self.order.clear();
        self.order.extend(0..n);
        self.order.sort_by(|&a, &b| llrs[a].total_cmp(&llrs[b]));
        for r in 0..g.m {
            self.work.row_words_mut(r).copy_from_slice(g.augmented.row_words(r));
            self.work.set(r, n, syndrome.get(r));
        }
        let pivots = gf2::eliminate(&mut self.work, self.order.iter().copied(), None);
        let rank = pivots.len();
        if (rank..g.m).any(|r| self.work.get(r, n)) {
            return Err(Error::UnsatisfiableSyndrome);
        }
        let mut solution = BinaryVector::zeros(n);
        for (i, &p) in pivots.iter().enumerate() {
            solution.set(p, self.work.get(i, n));
        }
        let lambda = self.cfg.osd_order;
        if lambda == 0 || rank == n {
            return Ok(solution);
        }
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = self.order.iter().copied().filter(|&c| !is_pivot[c]).take(lambda).collect();
        let columns: Vec<BinaryVector> =
            free.iter().map(|&t| BinaryVector::from_bits((0..rank).map(|i| self.work.get(i, t)))).collect();
        let pivot_llr: Vec<f64> = pivots.iter().map(|&p| llrs[p]).collect();
        let base = BinaryVector::from_bits((0..rank).map(|i| self.work.get(i, n)));
        let cost_of = |y: &BinaryVector, free_cost: f64| y.iter_ones().map(|i| pivot_llr[i]).sum::<f64>() + free_cost;
        let mut y = base.clone();
        let mut best = (cost_of(&y, 0.0), 0u32);
        let mut free_cost = 0.0;
        let mut pattern = 0u32;
        for i in 1u32..(1 << free.len()) {
            let bit = i.trailing_zeros() as usize;
            y.xor_assign(&columns[bit]);
            pattern ^= 1 << bit;
            if pattern & (1 << bit) != 0 {
                free_cost += llrs[free[bit]];
            } else {
                free_cost -= llrs[free[bit]];
            }
            let cost = cost_of(&y, free_cost);
            if cost < best.0 {
                best = (cost, pattern);
            }
        }
        if best.1 != 0 {
            let mut y = base;
            for (bit, &t) in free.iter().enumerate() {
                if best.1 & (1 << bit) != 0 {
                    y.xor_assign(&columns[bit]);
                    solution.set(t, true);
                }
            }
            for (i, &p) in pivots.iter().enumerate() {
                solution.set(p, y.get(i));
            }
        }
        Ok(solution)
    }

    /// BP, falling back to OSD when BP does not satisfy the syndrome.
    pub fn decode(&mut self, syndrome: &BinaryVector, priors: &[f64]) -> Result<DecodeResult> {
        self.check_inputs(syndrome, priors)?;
        let (converged, iterations) = self.run_bp(syndrome, priors);
        let soft_probs: Vec<f64> = self.posterior.iter().map(|&l| llr_to_prob(l)).collect();
        if converged {
            return Ok(DecodeResult { recovery: self.hard.clone(), converged, soft_probs, used_osd: false, iterations });
        }
        let llrs = self.posterior.clone();
        let recovery = self.osd_from_llrs(syndrome, &llrs)?;
        Ok(DecodeResult { recovery, converged, soft_probs, used_osd: true, iterations })
    }
}

fn llr_to_prob(l: f64) -> f64 {
    1.0 / (1.0 + l.exp())
}

fn prob_to_llr(p: f64) -> f64 {
    let p = p.clamp(PRIOR_FLOOR, 1.0 - PRIOR_FLOOR);
    ((1.0 - p) / p).ln()
}

pub fn bp_decode(
    h: &BinaryMatrix,
    syndrome: &BinaryVector,
    priors: &[f64],
    cfg: &DecoderConfig,
) -> Result<(BinaryVector, Vec<f64>, bool)> {
    BpOsdDecoder::new(h, cfg.clone())?.bp(syndrome, priors)
}

pub fn osd_postprocess(h: &BinaryMatrix, syndrome: &BinaryVector, soft: &[f64], cfg: &DecoderConfig) -> Result<BinaryVector> {
    BpOsdDecoder::new(h, cfg.clone())?.osd(syndrome, soft)
}

pub fn bp_osd_decode(h: &BinaryMatrix, syndrome: &BinaryVector, priors: &[f64], cfg: &DecoderConfig) -> Result<DecodeResult> {
    BpOsdDecoder::new(h, cfg.clone())?.decode(syndrome, priors)
}
