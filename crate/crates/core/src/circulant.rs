//! The ring of circulants 𝔽₂[x]/(xᴸ − 1) and protograph matrices over it.
//!
//! A [`RingElement`] is a sum of cyclic shift permutations λᵗ, stored as a
//! sorted set of shifts. The empty set is the zero element, which lifts to an
//! all-zero block; it is distinct from λ⁰, which lifts to the identity.
//!
//! Protograph text format:
//!
//! ```text
//! L=13
//! (0) (11) 0 (7,12)
//! ```
//!
//! One header line `L=<int>`, then one line per row with whitespace-separated
//! entries. Each entry is either `0` (the zero element) or a parenthesised,
//! comma-separated list of shifts. `#` starts a comment line. The emitter
//! writes sorted shifts, single spaces and a trailing newline, and
//! `emit(parse(emit(p))) == emit(p)` holds byte for byte.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

/// An element of the circulant ring with lift size `L`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    lift: usize,
    shifts: Vec<usize>,
}

fn check_lift(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::LiftSize { left: a, right: b })
    }
}

impl RingElement {
    pub fn zero(lift: usize) -> Self {
        assert!(lift > 0, "lift size must be positive");
        Self { lift, shifts: Vec::new() }
    }

    /// The single permutation λᵗ; `t` is reduced modulo `lift`.
    pub fn monomial(lift: usize, t: usize) -> Self {
        Self::from_shifts(lift, [t])
    }

    pub fn one(lift: usize) -> Self {
        Self::monomial(lift, 0)
    }

    /// Sum of λᵗ over `shifts`, with GF(2) coefficients: a shift listed twice cancels.
    pub fn from_shifts(lift: usize, shifts: impl IntoIterator<Item = usize>) -> Self {
        assert!(lift > 0, "lift size must be positive");
        let mut parity = vec![false; lift];
        for t in shifts {
            parity[t % lift] ^= true;
        }
        Self::from_parity(lift, &parity)
    }

    fn from_parity(lift: usize, parity: &[bool]) -> Self {
        let shifts = parity.iter().enumerate().filter_map(|(t, &b)| b.then_some(t)).collect();
        Self { lift, shifts }
    }

    pub fn lift_size(&self) -> usize {
        self.lift
    }

    pub fn shifts(&self) -> &[usize] {
        &self.shifts
    }

    pub fn weight(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_zero(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_lift(self.lift, other.lift)?;
        Ok(Self::from_shifts(self.lift, self.shifts.iter().chain(&other.shifts).copied()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_lift(self.lift, other.lift)?;
        let l = self.lift;
        let products = self.shifts.iter().flat_map(|&a| other.shifts.iter().map(move |&b| (a + b) % l));
        Ok(Self::from_shifts(l, products))
    }

    /// t ↦ −t mod L; lifts to the matrix transpose.
    pub fn transpose(&self) -> Self {
        let l = self.lift;
        Self::from_shifts(l, self.shifts.iter().map(|&t| (l - t) % l))
    }

    /// The L×L binary matrix Σ λᵗ; λᵗ has row r set at column (r + t) mod L.
    pub fn lift(&self) -> BinaryMatrix {
        let l = self.lift;
        let mut m = BinaryMatrix::zeros(l, l);
        for &t in &self.shifts {
            for r in 0..l {
                m.flip(r, (r + t) % l);
            }
        }
        m
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shifts.is_empty() {
            return f.write_str("0");
        }
        f.write_str("(")?;
        for (i, t) in self.shifts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}@L{}", self.lift)
    }
}

/// A matrix over the circulant ring with a common lift size.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Protograph {
    rows: usize,
    cols: usize,
    lift: usize,
    entries: Vec<RingElement>,
}

impl Protograph {
    pub fn zeros(rows: usize, cols: usize, lift: usize) -> Self {
        Self { rows, cols, lift, entries: vec![RingElement::zero(lift); rows * cols] }
    }

    /// The identity protograph Eₘ.
    pub fn identity(m: usize, lift: usize) -> Self {
        let mut p = Self::zeros(m, m, lift);
        for i in 0..m {
            p.entries[i * m + i] = RingElement::one(lift);
        }
        p
    }

    /// Builds a protograph from rows of shift lists; an empty list is zero.
    pub fn from_shift_lists(lift: usize, rows: &[Vec<Vec<usize>>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged protograph rows");
            entries.extend(row.iter().map(|s| RingElement::from_shifts(lift, s.iter().copied())));
        }
        Self { rows: rows.len(), cols, lift, entries }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<RingElement>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension { expected: rows * cols, found: entries.len(), context: "protograph entries" });
        }
        let lift = entries.first().map_or(1, RingElement::lift_size);
        for e in &entries {
            check_lift(lift, e.lift)?;
        }
        Ok(Self { rows, cols, lift, entries })
    }

    /// 1×1 protograph holding `element`.
    pub fn scalar(element: RingElement) -> Self {
        Self { rows: 1, cols: 1, lift: element.lift, entries: vec![element] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn lift_size(&self) -> usize {
        self.lift
    }

    pub fn get(&self, r: usize, c: usize) -> &RingElement {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: RingElement) -> Result<()> {
        check_lift(self.lift, e.lift)?;
        self.entries[r * self.cols + c] = e;
        Ok(())
    }

    /// (Aᵀ)ᵢⱼ = (Aⱼᵢ)ᵀ.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows, self.lift);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c).transpose();
            }
        }
        out
    }

    /// Kronecker product with ring multiplication entrywise.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_lift(self.lift, other.lift)?;
        let (rows, cols) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Self::zeros(rows, cols, self.lift);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.get(r, c);
                if a.is_zero() {
                    continue;
                }
                for rr in 0..other.rows {
                    for cc in 0..other.cols {
                        let b = other.get(rr, cc);
                        if !b.is_zero() {
                            out.entries[(r * other.rows + rr) * cols + c * other.cols + cc] = a.mul(b)?;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_lift(self.lift, other.lift)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension { expected: self.rows * self.cols, found: other.rows * other.cols, context: "protograph sum" });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(Self { entries, ..self.clone() })
    }

    /// Protograph matrix product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_lift(self.lift, other.lift)?;
        if self.cols != other.rows {
            return Err(Error::Dimension { expected: self.cols, found: other.rows, context: "protograph product" });
        }
        let mut out = Self::zeros(self.rows, other.cols, self.lift);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = RingElement::zero(self.lift);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(r, k).mul(other.get(k, c))?)?;
                }
                out.entries[r * other.cols + c] = acc;
            }
        }
        Ok(out)
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        check_lift(self.lift, other.lift)?;
        if self.rows != other.rows {
            return Err(Error::Dimension { expected: self.rows, found: other.rows, context: "protograph hstack" });
        }
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            entries.extend_from_slice(&self.entries[r * self.cols..(r + 1) * self.cols]);
            entries.extend_from_slice(&other.entries[r * other.cols..(r + 1) * other.cols]);
        }
        Ok(Self { rows: self.rows, cols, lift: self.lift, entries })
    }

    /// The binary lift 𝔅(A): each entry becomes its L×L circulant block.
    pub fn lift(&self) -> BinaryMatrix {
        let l = self.lift;
        let mut m = BinaryMatrix::zeros(self.rows * l, self.cols * l);
        for r in 0..self.rows {
            for c in 0..self.cols {
                for &t in self.get(r, c).shifts() {
                    for i in 0..l {
                        m.flip(r * l + i, c * l + (i + t) % l);
                    }
                }
            }
        }
        m
    }

    /// W[i][j] = weight of entry (i, j).
    pub fn weight_enumerator(&self) -> Vec<Vec<usize>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c).weight()).collect()).collect()
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Protograph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "L={}", self.lift)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Protograph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

impl FromStr for Protograph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lift = None;
        let mut rows: Vec<Vec<RingElement>> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some(l) = lift else {
                let value = trimmed
                    .strip_prefix("L=")
                    .ok_or_else(|| perr(lineno, 1, "expected header `L=<int>`"))?;
                let l: usize = value.trim().parse().map_err(|_| perr(lineno, 3, format!("bad lift size {value:?}")))?;
                if l == 0 {
                    return Err(perr(lineno, 3, "lift size must be positive"));
                }
                lift = Some(l);
                continue;
            };
            let row = parse_row(line, lineno, l)?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(perr(lineno, 1, format!("row has {} entries, expected {}", row.len(), first.len())));
                }
            }
            rows.push(row);
        }
        let lift = lift.ok_or_else(|| perr(1, 1, "missing header `L=<int>`"))?;
        let cols = rows.first().map_or(0, Vec::len);
        Ok(Self { rows: rows.len(), cols, lift, entries: rows.into_iter().flatten().collect() })
    }
}

fn parse_row(line: &str, lineno: usize, lift: usize) -> Result<Vec<RingElement>> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b' ' | b'\t' | b'\r' => i += 1,
            b'0' if bytes.get(i + 1).is_none_or(|b| b.is_ascii_whitespace()) => {
                out.push(RingElement::zero(lift));
                i += 1;
            }
            b'(' => {
                let close = line[i..].find(')').ok_or_else(|| perr(lineno, i + 1, "unclosed `(`"))? + i;
                let mut shifts = Vec::new();
                let mut col = i + 2;
                for tok in line[i + 1..close].split(',') {
                    let t = tok.trim();
                    let s: usize = t.parse().map_err(|_| perr(lineno, col, format!("bad shift {t:?}")))?;
                    if s >= lift {
                        return Err(perr(lineno, col, format!("shift {s} not reduced modulo L={lift}")));
                    }
                    if shifts.contains(&s) {
                        return Err(perr(lineno, col, format!("duplicate shift {s}")));
                    }
                    shifts.push(s);
                    col += tok.len() + 1;
                }
                out.push(RingElement::from_shifts(lift, shifts));
                i = close + 1;
            }
            _ => return Err(perr(lineno, i + 1, format!("unexpected character {:?}", line[i..].chars().next().unwrap()))),
        }
    }
    Ok(out)
}
