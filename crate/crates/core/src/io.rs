//! Text formats for binary matrices.
//!
//! **alist** (MacKay's sparse format):
//!
//! ```text
//! n m                       columns, rows
//! cmax rmax                 largest column / row weight
//! w_1 .. w_n                column weights
//! v_1 .. v_m                row weights
//! n lines                   1-based row indices of each column, zero padded to max(cmax, 1)
//! m lines                   1-based column indices of each row, zero padded to max(rmax, 1)
//! ```
//!
//! The writer always pads with zeros; the reader accepts padded and unpadded
//! lists and cross-checks the column section against the row section.
//!
//! **dense**: one row per line, entries `0`/`1`, optionally separated by
//! whitespace. Blank lines and lines starting with `#` are ignored. The writer
//! emits unseparated digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Tokens of a line with 1-based column positions.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace().map(move |tok| (tok.as_ptr() as usize - line.as_ptr() as usize + 1, tok))
}

fn numbers(lineno: usize, line: &str) -> Result<Vec<usize>> {
    tokens(line)
        .map(|(col, tok)| tok.parse::<usize>().map_err(|_| parse_err(lineno, col, format!("expected an integer, found {tok:?}"))))
        .collect()
}

pub fn write_alist(m: &BinaryMatrix) -> String {
    let t = m.transpose();
    let col_w = m.col_weights();
    let row_w = m.row_weights();
    let cmax = col_w.iter().copied().max().unwrap_or(0);
    let rmax = row_w.iter().copied().max().unwrap_or(0);
    let join = |xs: &[usize]| xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.cols(), m.rows());
    let _ = writeln!(out, "{cmax} {rmax}");
    let _ = writeln!(out, "{}", join(&col_w));
    let _ = writeln!(out, "{}", join(&row_w));
    let padded = |ones: Vec<usize>, width: usize| {
        let mut v: Vec<usize> = ones.into_iter().map(|i| i + 1).collect();
        v.resize(width, 0);
        join(&v)
    };
    for c in 0..m.cols() {
        let _ = writeln!(out, "{}", padded(t.row_ones(c).collect(), cmax.max(1)));
    }
    for r in 0..m.rows() {
        let _ = writeln!(out, "{}", padded(m.row_ones(r).collect(), rmax.max(1)));
    }
    out
}

pub fn parse_alist(text: &str) -> Result<BinaryMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let mut next = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (no, line) = lines.next().ok_or_else(|| parse_err(0, 0, format!("unexpected end of input, expected {what}")))?;
        Ok((no, numbers(no, line)?))
    };
    let (no, dims) = next("dimensions")?;
    let [n, m] = dims[..] else {
        return Err(parse_err(no, 1, "expected `n m`"));
    };
    let (no, maxes) = next("maximum weights")?;
    if maxes.len() != 2 {
        return Err(parse_err(no, 1, "expected `cmax rmax`"));
    }
    let (no, col_w) = next("column weights")?;
    if col_w.len() != n {
        return Err(parse_err(no, 1, format!("expected {n} column weights, found {}", col_w.len())));
    }
    let (no, row_w) = next("row weights")?;
    if row_w.len() != m {
        return Err(parse_err(no, 1, format!("expected {m} row weights, found {}", row_w.len())));
    }
    let mut h = BinaryMatrix::zeros(m, n);
    for (c, &w) in col_w.iter().enumerate() {
        let (no, idx) = next("column list")?;
        let ones: Vec<usize> = idx.into_iter().filter(|&i| i != 0).collect();
        if ones.len() != w {
            return Err(parse_err(no, 1, format!("column {} lists {} entries, weight says {w}", c + 1, ones.len())));
        }
        for r in ones {
            if r > m {
                return Err(parse_err(no, 1, format!("row index {r} exceeds {m}")));
            }
            h.set(r - 1, c, true);
        }
    }
    // The row section is redundant; when present it must agree.
    for (r, &w) in row_w.iter().enumerate() {
        let Ok((no, idx)) = next("row list") else {
            if r == 0 {
                break;
            }
            return Err(parse_err(0, 0, "truncated row section"));
        };
        let ones: Vec<usize> = idx.into_iter().filter(|&i| i != 0).collect();
        if ones.len() != w {
            return Err(parse_err(no, 1, format!("row {} lists {} entries, weight says {w}", r + 1, ones.len())));
        }
        for c in ones {
            if c == 0 || c > n || !h.get(r, c - 1) {
                return Err(parse_err(no, 1, format!("row {} entry {c} disagrees with column section", r + 1)));
            }
        }
    }
    Ok(h)
}

pub fn write_dense(m: &BinaryMatrix) -> String {
    let mut s = m.to_string();
    if m.rows() > 0 {
        s.push('\n');
    }
    s
}

pub fn parse_dense(text: &str) -> Result<BinaryMatrix> {
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for (col, ch) in line.chars().enumerate() {
            match ch {
                '0' => row.push(0),
                '1' => row.push(1),
                c if c.is_whitespace() || c == ',' => {}
                other => return Err(parse_err(i + 1, col + 1, format!("unexpected character {other:?}"))),
            }
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(i + 1, 1, format!("row has {} entries, expected {}", row.len(), first.len())));
            }
        }
        rows.push(row);
    }
    Ok(BinaryMatrix::from_rows(&rows))
}

/// Reads a matrix, choosing the format from the extension (`.alist` or anything
/// else for dense).
pub fn read_matrix(path: impl AsRef<Path>) -> Result<BinaryMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "alist") {
        parse_alist(&text)
    } else {
        parse_dense(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SEED_16_4_6: &str = include_str!("../../../data/mkmn_16_4_6.txt");

    #[test]
    fn dense_reads_spaced_and_packed() {
        let a = parse_dense("1 1 0\n0 1 1\n# comment\n\n1 0 1\n").unwrap();
        let b = parse_dense("110\n011\n101").unwrap();
        assert_eq!(a, b);
        assert_eq!(write_dense(&a), "110\n011\n101\n");
    }

    #[test]
    fn dense_reports_position() {
        match parse_dense("110\n0x1\n") {
            Err(Error::Parse { line: 2, column: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_dense("110\n01\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn alist_known_layout() {
        let h = parse_dense("110\n011\n101").unwrap();
        let text = write_alist(&h);
        assert_eq!(text, "3 3\n2 2\n2 2 2\n2 2 2\n1 3\n1 2\n2 3\n1 2\n2 3\n1 3\n");
        assert_eq!(parse_alist(&text).unwrap(), h);
    }

    #[test]
    fn alist_accepts_unpadded_and_rejects_inconsistent() {
        let text = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 3\n";
        let h = parse_alist(text).unwrap();
        assert_eq!(h.to_string(), "110\n011");
        let bad = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 3\n2 3\n";
        assert!(matches!(parse_alist(bad), Err(Error::Parse { line: 8, .. })));
    }

    #[test]
    fn seed_matrix_survives_both_formats() {
        let h = parse_dense(SEED_16_4_6).unwrap();
        assert_eq!((h.rows(), h.cols()), (12, 16));
        assert_eq!(parse_alist(&write_alist(&h)).unwrap(), h);
        assert_eq!(parse_dense(&write_dense(&h)).unwrap(), h);
    }

    proptest! {
        #[test]
        fn formats_roundtrip(r in 1usize..20, c in 1usize..20, seed in any::<u64>()) {
            let mut m = BinaryMatrix::zeros(r, c);
            let mut s = seed;
            for i in 0..r { for j in 0..c {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                m.set(i, j, s >> 61 == 0);
            }}
            prop_assert_eq!(parse_alist(&write_alist(&m)).unwrap(), m.clone());
            prop_assert_eq!(parse_dense(&write_dense(&m)).unwrap(), m);
        }
    }
}
