//! Classical and quantum code constructions.
//!
//! Check-matrix convention: `hx` holds the X-type stabilisers and `hz` the
//! Z-type stabilisers, so X errors are detected by `hz` (`s_X = Hz·e_X`) and Z
//! errors by `hx`. For seeds `H1 (m1×n1)` and `H2 (m2×n2)` the hypergraph
//! product is
//!
//! ```text
//! Hx = [ H1 ⊗ I_n2 | I_m1 ⊗ H2ᵀ ]
//! Hz = [ I_n1 ⊗ H2 | H1ᵀ ⊗ I_m2 ]
//! ```
//!
//! with the first `n1·n2` qubits forming sector one. The lifted product has the
//! same block form over the circulant ring, with identity protographs in place
//! of identity matrices, and is lifted afterwards.

mod bundle;
mod classical;
pub mod distance;

use crate::circulant::{Protograph, RingElement};
use crate::error::{Error, Result};
use crate::gf2::{self, BinaryMatrix, BinaryVector};

pub use bundle::{read_bundle, write_bundle, CodeBundle};
pub use classical::{classical_params, tanner_girth, ClassicalCode};
pub use distance::{min_logical_weight, DistanceBound, SearchBudget};

/// A CSS code with its logical basis and sector bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    hx: BinaryMatrix,
    hz: BinaryMatrix,
    lx: BinaryMatrix,
    lz: BinaryMatrix,
    sector1_size: usize,
}

impl CssCode {
    /// Validates commutation and derives a logical basis.
    pub fn new(hx: BinaryMatrix, hz: BinaryMatrix, sector1_size: usize) -> Result<Self> {
        if hx.cols() != hz.cols() {
            return Err(Error::Dimension { expected: hx.cols(), found: hz.cols(), context: "CSS check matrices" });
        }
        if sector1_size > hx.cols() {
            return Err(Error::Dimension { expected: hx.cols(), found: sector1_size, context: "sector one size" });
        }
        let (lx, lz) = css_logicals(&hx, &hz)?;
        Ok(Self { hx, hz, lx, lz, sector1_size })
    }

    /// Assembles a code from stored parts, checking every invariant.
    pub fn from_parts(
        hx: BinaryMatrix,
        hz: BinaryMatrix,
        lx: BinaryMatrix,
        lz: BinaryMatrix,
        sector1_size: usize,
    ) -> Result<Self> {
        let code = Self::new(hx, hz, sector1_size)?;
        let n = code.n();
        if lx.cols() != n || lz.cols() != n || lx.rows() != code.k() || lz.rows() != code.k() {
            return Err(Error::Domain("logical basis has the wrong shape".into()));
        }
        let candidate = Self { lx, lz, ..code };
        candidate.validate()?;
        Ok(candidate)
    }

    pub fn n(&self) -> usize {
        self.hx.cols()
    }

    pub fn k(&self) -> usize {
        self.lx.rows()
    }

    pub fn hx(&self) -> &BinaryMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &BinaryMatrix {
        &self.hz
    }

    pub fn lx(&self) -> &BinaryMatrix {
        &self.lx
    }

    pub fn lz(&self) -> &BinaryMatrix {
        &self.lz
    }

    pub fn sector1_size(&self) -> usize {
        self.sector1_size
    }

    /// Checks commutation, K = N − rank Hx − rank Hz, and the logical basis
    /// conditions (kernel membership, independence modulo stabilisers, and an
    /// invertible pairing `Lx·Lzᵀ`).
    pub fn validate(&self) -> Result<()> {
        if !self.hx.mul(&self.hz.transpose())?.is_zero() {
            return Err(Error::NotACssCode);
        }
        let k = self.n() - gf2::rank(&self.hx) - gf2::rank(&self.hz);
        if self.lx.rows() != k || self.lz.rows() != k {
            return Err(Error::Domain(format!("expected {k} logicals, found {}/{}", self.lx.rows(), self.lz.rows())));
        }
        if !self.hz.mul(&self.lx.transpose())?.is_zero() || !self.hx.mul(&self.lz.transpose())?.is_zero() {
            return Err(Error::Domain("logical operators do not commute with the stabilisers".into()));
        }
        if gf2::rank(&self.hx.vstack(&self.lx)?) != gf2::rank(&self.hx) + k
            || gf2::rank(&self.hz.vstack(&self.lz)?) != gf2::rank(&self.hz) + k
        {
            return Err(Error::Domain("logical operators are not independent of the stabilisers".into()));
        }
        if gf2::rank(&self.lx.mul(&self.lz.transpose())?) != k {
            return Err(Error::Domain("logical pairing is degenerate".into()));
        }
        Ok(())
    }
}

/// Logical bases `(Lx, Lz)`: `Lx` spans `ker Hz / rowspace Hx`, `Lz` spans
/// `ker Hx / rowspace Hz`, normalised so that `Lx·Lzᵀ = I`.
pub fn css_logicals(hx: &BinaryMatrix, hz: &BinaryMatrix) -> Result<(BinaryMatrix, BinaryMatrix)> {
    if hx.cols() != hz.cols() {
        return Err(Error::Dimension { expected: hx.cols(), found: hz.cols(), context: "css_logicals" });
    }
    if !hx.mul(&hz.transpose())?.is_zero() {
        return Err(Error::NotACssCode);
    }
    let n = hx.cols();
    let coset_reps = |checks: &BinaryMatrix, stabs: &BinaryMatrix| {
        distance::LogicalSpace::new(checks, stabs).representatives
    };
    let lx = BinaryMatrix::from_vectors(n, &coset_reps(hz, hx));
    let lz = BinaryMatrix::from_vectors(n, &coset_reps(hx, hz));
    if lx.rows() == 0 {
        return Ok((lx, lz));
    }
    // Lx·(Q·Lz)ᵀ = I with Q = (Lx·Lzᵀ)⁻ᵀ.
    let pairing = lx.mul(&lz.transpose())?;
    let inv = gf2::inverse(&pairing).ok_or_else(|| Error::Domain("degenerate logical pairing".into()))?;
    let lz = inv.transpose().mul(&lz)?;
    Ok((lx, lz))
}

/// A CSS code together with the set of Hadamard-rotated qubits.
///
/// The stored matrices stay in CSS form; the rotation only changes how physical
/// Pauli errors map onto the two decoding problems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotatedCode {
    css: CssCode,
    rotated: BinaryVector,
}

impl RotatedCode {
    /// No qubits rotated: plain CSS decoding.
    pub fn unrotated(css: CssCode) -> Self {
        let rotated = BinaryVector::zeros(css.n());
        Self { css, rotated }
    }

    pub fn with_rotation(css: CssCode, rotated: BinaryVector) -> Result<Self> {
        if rotated.len() != css.n() {
            return Err(Error::Dimension { expected: css.n(), found: rotated.len(), context: "rotation mask" });
        }
        Ok(Self { css, rotated })
    }

    pub fn css(&self) -> &CssCode {
        &self.css
    }

    pub fn into_css(self) -> CssCode {
        self.css
    }

    pub fn n(&self) -> usize {
        self.css.n()
    }

    pub fn k(&self) -> usize {
        self.css.k()
    }

    pub fn rotation_mask(&self) -> &BinaryVector {
        &self.rotated
    }

    pub fn rotated_qubits(&self) -> Vec<usize> {
        self.rotated.iter_ones().collect()
    }

    #[inline]
    pub fn is_rotated(&self, qubit: usize) -> bool {
        self.rotated.get(qubit)
    }

    /// Toggles a Hadamard on every sector-two qubit.
    pub fn hadamard_rotate(mut self) -> Self {
        for q in self.css.sector1_size()..self.css.n() {
            self.rotated.flip(q);
        }
        self
    }

    /// The full stabiliser matrix in symplectic form `(X part, Z part)`, each
    /// `(M_Z + M_X) × N`, after applying the rotation. Rows of `Hz` come first,
    /// then rows of `Hx`.
    pub fn symplectic_checks(&self) -> (BinaryMatrix, BinaryMatrix) {
        let (hx, hz) = (self.css.hx(), self.css.hz());
        let n = self.n();
        let rows = hx.rows() + hz.rows();
        let mut xs = BinaryMatrix::zeros(rows, n);
        let mut zs = BinaryMatrix::zeros(rows, n);
        for r in 0..hz.rows() {
            for c in hz.row_ones(r) {
                if self.is_rotated(c) { xs.set(r, c, true) } else { zs.set(r, c, true) }
            }
        }
        for r in 0..hx.rows() {
            for c in hx.row_ones(r) {
                if self.is_rotated(c) { zs.set(hz.rows() + r, c, true) } else { xs.set(hz.rows() + r, c, true) }
            }
        }
        (xs, zs)
    }

    /// Checks and stabilisers governing physical single-type errors: for
    /// `Pauli::X` the conditions on X-only operators, for `Pauli::Z` on Z-only
    /// operators. Returns `(checks, stabilisers)`.
    pub fn single_type_problem(&self, kind: PauliKind) -> (BinaryMatrix, BinaryMatrix) {
        let (hx, hz) = (self.css.hx(), self.css.hz());
        // An X-only physical error is a CSS-frame X error on unrotated qubits and
        // a CSS-frame Z error on rotated ones.
        let (detect_plain, detect_rot, stab_plain, stab_rot) = match kind {
            PauliKind::X => (hz, hx, hx, hz),
            PauliKind::Z => (hx, hz, hz, hx),
        };
        let plain: Vec<usize> = (0..self.n()).filter(|&q| !self.is_rotated(q)).collect();
        let rot: Vec<usize> = (0..self.n()).filter(|&q| self.is_rotated(q)).collect();
        let checks = mask_columns(detect_plain, &rot).vstack(&mask_columns(detect_rot, &plain)).expect("same width");
        let stabs = rowspace_supported_on(stab_plain, &rot)
            .vstack(&rowspace_supported_on(stab_rot, &plain))
            .expect("same width");
        (checks, stabs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliKind {
    X,
    Z,
}

/// `m` with the listed columns cleared.
fn mask_columns(m: &BinaryMatrix, cleared: &[usize]) -> BinaryMatrix {
    let mut out = m.clone();
    for r in 0..m.rows() {
        for &c in cleared {
            out.set(r, c, false);
        }
    }
    out.nonzero_rows()
}

/// Basis of the vectors in `rowspace m` that vanish on `excluded`.
fn rowspace_supported_on(m: &BinaryMatrix, excluded: &[usize]) -> BinaryMatrix {
    let mut work = m.clone();
    let mut inside = vec![true; m.cols()];
    for &c in excluded {
        inside[c] = false;
    }
    let order = excluded.iter().copied().chain((0..m.cols()).filter(|&c| inside[c]));
    let pivots = gf2::eliminate(&mut work, order, None);
    let keep: Vec<usize> = pivots.iter().enumerate().filter(|(_, &p)| inside[p]).map(|(i, _)| i).collect();
    let mut out = BinaryMatrix::zeros(keep.len(), m.cols());
    for (i, &r) in keep.iter().enumerate() {
        out.row_words_mut(i).copy_from_slice(work.row_words(r));
    }
    out
}

/// Distance bounds for a (possibly rotated) code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantumDistance {
    /// Minimum weight of any nontrivial logical Pauli.
    pub d: Option<DistanceBound>,
    /// Minimum weight of a logical made only of physical X operators.
    pub x_only: Option<DistanceBound>,
    /// Minimum weight of a logical made only of physical Z operators.
    pub z_only: Option<DistanceBound>,
}

/// Searches for minimum-weight logical operators within `budget`.
///
/// The full distance uses the CSS pair, which the rotation leaves unchanged
/// (a Hadamard maps a Pauli to one of equal support).
pub fn quantum_distance(code: &RotatedCode, budget: &SearchBudget) -> QuantumDistance {
    let css = code.css();
    let dx = min_logical_weight(css.hz(), css.hx(), budget);
    let dz = min_logical_weight(css.hx(), css.hz(), budget);
    let d = match (dx, dz) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let single = |kind| {
        let (c, s) = code.single_type_problem(kind);
        min_logical_weight(&c, &s, budget)
    };
    QuantumDistance { d, x_only: single(PauliKind::X), z_only: single(PauliKind::Z) }
}

/// Number of nontrivial logical Paulis of each weight `0..=max_weight`,
/// counted over arbitrary X/Y/Z supports of the rotated stabiliser group.
/// Exponential; for small codes only.
pub fn logical_weight_histogram(code: &RotatedCode, max_weight: usize) -> Vec<u64> {
    let (xs, zs) = code.symplectic_checks();
    let n = code.n();
    let m = xs.rows();
    let stabs = gf2::RowSpace::new(&xs.hstack(&zs).expect("same height"));
    // Syndrome columns: X on qubit j anticommutes with rows having Z there, etc.
    let xt = xs.transpose();
    let zt = zs.transpose();
    let synd: Vec<[BinaryVector; 3]> = (0..n)
        .map(|j| {
            let x = zt.row(j);
            let z = xt.row(j);
            let mut y = x.clone();
            y.xor_assign(&z);
            [x, y, z]
        })
        .collect();
    let mut counts = vec![0u64; max_weight + 1];
    let mut syndrome = BinaryVector::zeros(m);
    let mut ops: Vec<(usize, usize)> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        start: usize,
        n: usize,
        max_weight: usize,
        synd: &[[BinaryVector; 3]],
        syndrome: &mut BinaryVector,
        ops: &mut Vec<(usize, usize)>,
        stabs: &gf2::RowSpace,
        counts: &mut [u64],
    ) {
        if !ops.is_empty() && syndrome.is_zero() {
            let mut v = BinaryVector::zeros(2 * n);
            for &(q, p) in ops.iter() {
                // p: 0 = X, 1 = Y, 2 = Z
                if p <= 1 {
                    v.set(q, true);
                }
                if p >= 1 {
                    v.set(n + q, true);
                }
            }
            if !stabs.contains(&v) {
                counts[ops.len()] += 1;
            }
        }
        if ops.len() == max_weight {
            return;
        }
        for q in start..n {
            for p in 0..3 {
                syndrome.xor_assign(&synd[q][p]);
                ops.push((q, p));
                rec(q + 1, n, max_weight, synd, syndrome, ops, stabs, counts);
                ops.pop();
                syndrome.xor_assign(&synd[q][p]);
            }
        }
    }
    rec(0, n, max_weight, &synd, &mut syndrome, &mut ops, &stabs, &mut counts);
    counts
}

/// `Hx = [H1⊗I | I⊗H2ᵀ]`, `Hz = [I⊗H2 | H1ᵀ⊗I]`, sector one of size `n1·n2`.
pub fn hypergraph_product(h1: &BinaryMatrix, h2: &BinaryMatrix) -> CssCode {
    let (m1, n1) = (h1.rows(), h1.cols());
    let (m2, n2) = (h2.rows(), h2.cols());
    let hx = h1
        .kron(&BinaryMatrix::identity(n2))
        .hstack(&BinaryMatrix::identity(m1).kron(&h2.transpose()))
        .expect("block heights agree");
    let hz = BinaryMatrix::identity(n1)
        .kron(h2)
        .hstack(&h1.transpose().kron(&BinaryMatrix::identity(m2)))
        .expect("block heights agree");
    CssCode::new(hx, hz, n1 * n2).expect("hypergraph products always commute")
}

/// The quantum protograph of the lifted product, as the nonzero block rows
/// `(A_X, A_Z)` = `([A1⊗E | E⊗A2ᵀ], [E⊗A2 | A1ᵀ⊗E])`.
pub fn lifted_product_protograph(a1: &Protograph, a2: &Protograph) -> Result<(Protograph, Protograph)> {
    if a1.lift_size() != a2.lift_size() {
        return Err(Error::LiftSize { left: a1.lift_size(), right: a2.lift_size() });
    }
    let l = a1.lift_size();
    let e = |m| Protograph::identity(m, l);
    let (m1, n1, m2, n2) = (a1.rows(), a1.cols(), a2.rows(), a2.cols());
    let ax = a1.tensor(&e(n2))?.hstack(&e(m1).tensor(&a2.transpose())?)?;
    let az = e(n1).tensor(a2)?.hstack(&a1.transpose().tensor(&e(m2))?)?;
    Ok((ax, az))
}

/// Lifted product of two protographs over the same ring.
pub fn lifted_product(a1: &Protograph, a2: &Protograph) -> Result<CssCode> {
    let (ax, az) = lifted_product_protograph(a1, a2)?;
    let sector1 = a1.lift_size() * a1.cols() * a2.cols();
    CssCode::new(ax.lift(), az.lift(), sector1)
}

/// Applies a Hadamard to every sector-two qubit.
pub fn hadamard_rotate(code: CssCode) -> RotatedCode {
    RotatedCode::unrotated(code).hadamard_rotate()
}

/// The rotated stabiliser protograph in symplectic form `(X part, Z part)`:
///
/// ```text
/// X part = [ 0        | A1ᵀ ⊗ E ]     Z part = [ E ⊗ A2 | 0        ]
///          [ A1 ⊗ E   | 0       ]              [ 0      | E ⊗ A2ᵀ  ]
/// ```
///
/// Row order matches [`RotatedCode::symplectic_checks`].
pub fn bias_tailored_protograph(a1: &Protograph, a2: &Protograph) -> Result<(Protograph, Protograph)> {
    if a1.lift_size() != a2.lift_size() {
        return Err(Error::LiftSize { left: a1.lift_size(), right: a2.lift_size() });
    }
    let l = a1.lift_size();
    let e = |m| Protograph::identity(m, l);
    let (m1, n1, m2, n2) = (a1.rows(), a1.cols(), a2.rows(), a2.cols());
    let (s1, s2) = (n1 * n2, m1 * m2);
    let (top, bottom) = (n1 * m2, m1 * n2);
    let top_x = Protograph::zeros(top, s1, l).hstack(&a1.transpose().tensor(&e(m2))?)?;
    let bottom_x = a1.tensor(&e(n2))?.hstack(&Protograph::zeros(bottom, s2, l))?;
    let top_z = e(n1).tensor(a2)?.hstack(&Protograph::zeros(top, s2, l))?;
    let bottom_z = Protograph::zeros(bottom, s1, l).hstack(&e(m1).tensor(&a2.transpose())?)?;
    Ok((vstack(&top_x, &bottom_x), vstack(&top_z, &bottom_z)))
}

fn vstack(a: &Protograph, b: &Protograph) -> Protograph {
    let mut entries = Vec::with_capacity((a.rows() + b.rows()) * a.cols());
    for p in [a, b] {
        for r in 0..p.rows() {
            for c in 0..p.cols() {
                entries.push(p.get(r, c).clone());
            }
        }
    }
    Protograph::from_entries(a.rows() + b.rows(), a.cols(), entries).expect("same width and lift")
}

/// Lifted product followed by a Hadamard rotation of sector two.
pub fn bias_tailored_lifted_product(a1: &Protograph, a2: &Protograph) -> Result<RotatedCode> {
    Ok(hadamard_rotate(lifted_product(a1, a2)?))
}

/// The twisted-toric seed protographs `([λ⁰+λ^{n2}], [λ⁰+λ¹])` over `L = n1·n2`.
pub fn twisted_toric_seeds(n1: usize, n2: usize) -> Result<(Protograph, Protograph)> {
    if n1 < 2 || n2 < 1 {
        return Err(Error::Domain(format!("twisted toric lattice needs n1 >= 2 and n2 >= 1, got {n1}x{n2}")));
    }
    let l = n1 * n2;
    Ok((
        Protograph::scalar(RingElement::from_shifts(l, [0, n2])),
        Protograph::scalar(RingElement::from_shifts(l, [0, 1])),
    ))
}

/// XZZX toric code with twisted boundaries on an `n1 × n2` lattice, `N = 2·n1·n2`.
pub fn xzzx_twisted_toric(n1: usize, n2: usize) -> Result<RotatedCode> {
    let (a1, a2) = twisted_toric_seeds(n1, n2)?;
    bias_tailored_lifted_product(&a1, &a2)
}

/// The same twisted toric code without the Hadamard rotation.
pub fn css_twisted_toric(n1: usize, n2: usize) -> Result<CssCode> {
    let (a1, a2) = twisted_toric_seeds(n1, n2)?;
    lifted_product(&a1, &a2)
}

/// Closed-loop repetition code of length `n`.
pub fn repetition_code(n: usize) -> BinaryMatrix {
    Protograph::scalar(RingElement::from_shifts(n, [0, 1])).lift()
}

/// CSS toric code: hypergraph product of two closed-loop repetition codes.
pub fn toric_code(n1: usize, n2: usize) -> CssCode {
    hypergraph_product(&repetition_code(n1), &repetition_code(n2))
}
