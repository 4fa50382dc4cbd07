//! Dense, bit-packed linear algebra over GF(2).
//!
//! Rows are stored as contiguous runs of `u64` words, so row operations during
//! elimination are word-wide XORs. Elimination always picks the leftmost
//! available pivot column and the topmost candidate row, which makes pivot
//! sets (and therefore OSD bases and logical bases) reproducible.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector {
    len: usize,
    words: Vec<u64>,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    /// Builds a vector from any iterator of truthy values (`0`/`1`, `bool`).
    pub fn from_bits<I, B>(bits: I) -> Self
    where
        I: IntoIterator<Item = B>,
        B: Into<u8>,
    {
        let bits: Vec<u8> = bits.into_iter().map(Into::into).collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector of length `len` with ones at `support`.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    /// Returns a vector of `len` bits taken from raw packed words. Bits past
    /// `len` in the final word are cleared.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = Self { len, words };
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        xor_words(&mut self.words, &other.words);
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + t)
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Bits `start..end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        let mut out = Self::zeros(end - start);
        for i in self.iter_ones().filter(|&i| i >= start && i < end) {
            out.set(i - start, true);
        }
        out
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryVector({self})")
    }
}

impl std::str::FromStr for BinaryVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Parse { line: 1, column: 1, message: format!("unexpected character {other:?}") }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(bits))
    }
}

#[inline]
pub(crate) fn xor_words(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

/// A dense matrix over GF(2), row-major with each row padded to whole words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of `0`/`1` values. All rows must share a length.
    pub fn from_rows<R, B>(rows: &[R]) -> Self
    where
        R: AsRef<[B]>,
        B: Copy + Into<u8>,
    {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &b) in row.iter().enumerate() {
                if b.into() & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Stacks vectors (all of length `cols`) as rows.
    pub fn from_vectors(cols: usize, vectors: &[BinaryVector]) -> Self {
        let mut m = Self::zeros(vectors.len(), cols);
        for (i, v) in vectors.iter().enumerate() {
            assert_eq!(v.len(), cols);
            m.row_words_mut(i).copy_from_slice(v.words());
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    #[inline]
    pub(crate) fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BinaryVector {
        BinaryVector { len: self.cols, words: self.row_words(r).to_vec() }
    }

    pub fn column(&self, c: usize) -> BinaryVector {
        let mut v = BinaryVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn row_vectors(&self) -> Vec<BinaryVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    /// `row[dst] ^= row[src]`.
    #[inline]
    pub fn add_row(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        xor_words(b, a);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|r| self.row_words(r).iter().map(|w| w.count_ones() as usize).sum())
            .collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut out = vec![0; self.cols];
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                out[c] += 1;
            }
        }
        out
    }

    /// Column indices of the ones in row `r`.
    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(r).iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + t)
            })
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `self · v` over GF(2).
    pub fn matvec(&self, v: &BinaryVector) -> Result<BinaryVector> {
        if v.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, found: v.len(), context: "matvec" });
        }
        let mut out = BinaryVector::zeros(self.rows);
        self.matvec_into(v, &mut out);
        Ok(out)
    }

    /// Unchecked `self · v` written into `out`; lengths must already agree.
    pub fn matvec_into(&self, v: &BinaryVector, out: &mut BinaryVector) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            out.set(r, parity & 1 == 1);
        }
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension { expected: self.cols, found: other.rows, context: "matrix product" });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.row_ones(r) {
                let (dst, src) = (r * out.stride, k * other.stride);
                xor_words(&mut out.data[dst..dst + out.stride], &other.data[src..src + other.stride]);
            }
        }
        Ok(out)
    }

    /// Kronecker (tensor) product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                for rr in 0..other.rows {
                    for cc in other.row_ones(rr) {
                        out.set(r * other.rows + rr, c * other.cols + cc, true);
                    }
                }
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension { expected: self.rows, found: other.rows, context: "hstack" });
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                out.set(r, c, true);
            }
            for c in other.row_ones(r) {
                out.set(r, self.cols + c, true);
            }
        }
        Ok(out)
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension { expected: self.cols, found: other.cols, context: "vstack" });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self { rows: self.rows + other.rows, cols: self.cols, stride: self.stride, data })
    }

    /// Block-diagonal `diag(self, other)`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                out.set(r, c, true);
            }
        }
        for r in 0..other.rows {
            for c in other.row_ones(r) {
                out.set(self.rows + r, self.cols + c, true);
            }
        }
        out
    }

    /// Columns `start..end` as a new matrix.
    pub fn columns(&self, start: usize, end: usize) -> Self {
        let mut out = Self::zeros(self.rows, end - start);
        for r in 0..self.rows {
            for c in self.row_ones(r).filter(|&c| c >= start && c < end) {
                out.set(r, c - start, true);
            }
        }
        out
    }

    /// The listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    /// Rows with at least one nonzero entry.
    pub fn nonzero_rows(&self) -> Self {
        let keep: Vec<_> = (0..self.rows).filter(|&r| self.row_words(r).iter().any(|&w| w != 0)).collect();
        let mut out = Self::zeros(keep.len(), self.cols);
        for (i, &r) in keep.iter().enumerate() {
            out.row_words_mut(i).copy_from_slice(self.row_words(r));
        }
        out
    }

    pub fn row_reduce(&self) -> RowReduction {
        row_reduce(self)
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            if r + 1 < self.rows {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

/// Output of Gauss-Jordan elimination: `rref = transform · M`.
#[derive(Clone, Debug)]
pub struct RowReduction {
    pub rref: BinaryMatrix,
    /// Pivot columns in increasing order; row `i` of `rref` has its pivot at `pivots[i]`.
    pub pivots: Vec<usize>,
    /// Invertible `rows × rows` matrix recording the row operations.
    pub transform: BinaryMatrix,
}

impl RowReduction {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// In-place Gauss-Jordan elimination over the columns in `order`. Returns the
/// pivot columns (in the order visited). Row operations are mirrored on
/// `shadow` when given.
pub(crate) fn eliminate(
    m: &mut BinaryMatrix,
    order: impl IntoIterator<Item = usize>,
    mut shadow: Option<&mut BinaryMatrix>,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in order {
        if next == m.rows {
            break;
        }
        let Some(p) = (next..m.rows).find(|&r| m.get(r, c)) else {
            continue;
        };
        m.swap_rows(next, p);
        if let Some(s) = shadow.as_deref_mut() {
            s.swap_rows(next, p);
        }
        for r in 0..m.rows {
            if r != next && m.get(r, c) {
                m.add_row(next, r);
                if let Some(s) = shadow.as_deref_mut() {
                    s.add_row(next, r);
                }
            }
        }
        pivots.push(c);
        next += 1;
    }
    pivots
}

/// Reduced row-echelon form with leftmost-pivot, topmost-row ordering.
pub fn row_reduce(m: &BinaryMatrix) -> RowReduction {
    let mut rref = m.clone();
    let mut transform = BinaryMatrix::identity(m.rows);
    let pivots = eliminate(&mut rref, 0..m.cols, Some(&mut transform));
    RowReduction { rref, pivots, transform }
}

pub fn rank(m: &BinaryMatrix) -> usize {
    let mut work = m.clone();
    eliminate(&mut work, 0..m.cols, None).len()
}

/// A basis of `{v : M·v = 0}` with `cols − rank` vectors, one per free column.
pub fn nullspace_basis(m: &BinaryMatrix) -> Vec<BinaryVector> {
    let mut rref = m.clone();
    let pivots = eliminate(&mut rref, 0..m.cols, None);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = BinaryVector::zeros(m.cols);
            v.set(free, true);
            for (i, &p) in pivots.iter().enumerate() {
                if rref.get(i, free) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// Whether `v` is a GF(2) combination of the rows of `m`.
pub fn in_rowspace(m: &BinaryMatrix, v: &BinaryVector) -> Result<bool> {
    if v.len() != m.cols {
        return Err(Error::Dimension { expected: m.cols, found: v.len(), context: "in_rowspace" });
    }
    Ok(RowSpace::new(m).contains(v))
}

/// A reduced basis of a row space, for repeated membership tests.
#[derive(Clone, Debug)]
pub struct RowSpace {
    rref: BinaryMatrix,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(m: &BinaryMatrix) -> Self {
        let mut rref = m.clone();
        let pivots = eliminate(&mut rref, 0..m.cols, None);
        let rank = pivots.len();
        let mut basis = BinaryMatrix::zeros(rank, m.cols);
        for r in 0..rank {
            basis.row_words_mut(r).copy_from_slice(rref.row_words(r));
        }
        Self { rref: basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &BinaryMatrix {
        &self.rref
    }

    /// Reduces `v` against the basis in place; the remainder is zero iff `v`
    /// was in the span.
    pub fn reduce(&self, v: &mut BinaryVector) {
        for (i, &p) in self.pivots.iter().enumerate() {
            if v.get(p) {
                xor_words(v.words_mut(), self.rref.row_words(i));
            }
        }
    }

    pub fn contains(&self, v: &BinaryVector) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }
}

/// Inverse of a square matrix, if it is invertible.
pub fn inverse(m: &BinaryMatrix) -> Option<BinaryMatrix> {
    if m.rows != m.cols {
        return None;
    }
    let red = row_reduce(m);
    (red.rank() == m.rows).then_some(red.transform)
}
