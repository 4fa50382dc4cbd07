//! Biased Pauli channels, per-qubit priors, error sampling and capacity bounds.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::RotatedCode;
use crate::error::{Error, Result};
use crate::gf2::BinaryVector;

/// Independent single-qubit Pauli channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliChannel {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliChannel {
    pub fn new(px: f64, py: f64, pz: f64) -> Result<Self> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !(ok(px) && ok(py) && ok(pz) && px + py + pz <= 1.0 + 1e-12) {
            return Err(Error::Domain(format!("invalid Pauli channel ({px}, {py}, {pz})")));
        }
        Ok(Self { px, py, pz })
    }

    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(p / 3.0, p / 3.0, p / 3.0)
    }

    pub fn total(&self) -> f64 {
        self.px + self.py + self.pz
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.px,
            Axis::Y => self.py,
            Axis::Z => self.pz,
        }
    }

    /// `p_axis / (sum of the other two)`; infinite when the others vanish.
    pub fn bias(&self, axis: Axis) -> f64 {
        let others = self.total() - self.get(axis);
        if others <= 0.0 {
            f64::INFINITY
        } else {
            self.get(axis) / others
        }
    }

    /// Channel seen by a Hadamard-rotated qubit.
    pub fn hadamard(&self) -> Self {
        Self { px: self.pz, py: self.py, pz: self.px }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            other => Err(Error::Domain(format!("unknown Pauli axis {other:?}"))),
        }
    }
}

/// Total error rate `p` split with bias `eta` towards `axis`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiasSpec {
    pub axis: Axis,
    pub eta: f64,
    pub p: f64,
}

impl BiasSpec {
    pub fn new(axis: Axis, eta: f64, p: f64) -> Self {
        Self { axis, eta, p }
    }
}

/// `p_axis = p·η/(1+η)`, the other two `p/(2(1+η))`; `η = ∞` puts all weight on `axis`.
pub fn channel_from_bias(spec: BiasSpec) -> Result<PauliChannel> {
    let BiasSpec { axis, eta, p } = spec;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("error rate {p} outside [0, 1]")));
    }
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::Domain(format!("bias {eta} must be positive")));
    }
    let (main, other) = if eta.is_infinite() { (p, 0.0) } else { (p * eta / (1.0 + eta), p / (2.0 * (1.0 + eta))) };
    let (px, py, pz) = match axis {
        Axis::X => (main, other, other),
        Axis::Y => (other, main, other),
        Axis::Z => (other, other, main),
    };
    PauliChannel::new(px, py, pz)
}

/// Per-qubit marginals for the two decoding rounds.
///
/// `px_eff[j]` is the probability that the CSS-frame X component of qubit `j`
/// is set, `pz_eff[j]` likewise for Z. On rotated qubits the roles of `px` and
/// `pz` are exchanged.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitPriors {
    pub px_eff: Vec<f64>,
    pub pz_eff: Vec<f64>,
    /// The CSS-frame channel seen by each qubit.
    channels: Vec<PauliChannel>,
}

impl QubitPriors {
    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn channel(&self, qubit: usize) -> PauliChannel {
        self.channels[qubit]
    }
}

/// Priors with the first `sector1` qubits unrotated and the rest rotated.
pub fn rotated_priors(channel: PauliChannel, n: usize, sector1: usize) -> QubitPriors {
    let mask = BinaryVector::from_support(n, &(sector1.min(n)..n).collect::<Vec<_>>());
    priors_with_mask(channel, &mask)
}

/// Priors for an arbitrary rotation mask.
pub fn priors_with_mask(channel: PauliChannel, rotated: &BinaryVector) -> QubitPriors {
    let channels: Vec<PauliChannel> =
        (0..rotated.len()).map(|j| if rotated.get(j) { channel.hadamard() } else { channel }).collect();
    QubitPriors {
        px_eff: channels.iter().map(|c| c.px + c.py).collect(),
        pz_eff: channels.iter().map(|c| c.pz + c.py).collect(),
        channels,
    }
}

/// Priors for a code under `channel`, following its rotation mask.
pub fn code_priors(code: &RotatedCode, channel: PauliChannel) -> QubitPriors {
    priors_with_mask(channel, code.rotation_mask())
}

/// Draws a CSS-frame error `(e_X, e_Z)`.
///
/// Per qubit a single uniform `u` is compared against the qubit's CSS-frame
/// channel: X-only below `px`, Z-only below `px + pz`, Y below `px + pz + py`.
/// The marginals are `P(e_X[j]) = px_eff[j]` and `P(e_Z[j]) = pz_eff[j]`.
pub fn sample_error(priors: &QubitPriors, rng: &mut impl Rng) -> (BinaryVector, BinaryVector) {
    let n = priors.len();
    let mut ex = BinaryVector::zeros(n);
    let mut ez = BinaryVector::zeros(n);
    sample_error_into(priors, rng, &mut ex, &mut ez);
    (ex, ez)
}

/// As [`sample_error`], reusing the output buffers.
pub fn sample_error_into(priors: &QubitPriors, rng: &mut impl Rng, ex: &mut BinaryVector, ez: &mut BinaryVector) {
    ex.clear();
    ez.clear();
    for (j, c) in priors.channels.iter().enumerate() {
        let u: f64 = rng.random();
        if u < c.px {
            ex.set(j, true);
        } else if u < c.px + c.pz {
            ez.set(j, true);
        } else if u < c.px + c.pz + c.py {
            ex.set(j, true);
            ez.set(j, true);
        }
    }
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

pub fn binary_entropy(p: f64) -> f64 {
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// `1 − H(p)`.
pub fn shannon_limit(p: f64) -> f64 {
    1.0 - binary_entropy(p)
}

/// `1 − H(1−p, px, py, pz)`.
pub fn hashing_rate(channel: &PauliChannel) -> f64 {
    let p = channel.total();
    1.0 + xlog2x(1.0 - p) + xlog2x(channel.px) + xlog2x(channel.py) + xlog2x(channel.pz)
}

/// Smallest `p` with `hashing_rate(channel_from_bias(axis, eta, p)) = r`.
///
/// The rate is convex in `p` at fixed bias, so it falls monotonically from 1 at
/// `p = 0` to a single minimum and the root lies on that descending branch.
/// The minimum is located by golden-section search and the root bracketed
/// between `10⁻⁶` and the minimiser, then bisected to `10⁻⁶`.
pub fn hashing_probability(r: f64, axis: Axis, eta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("rate {r} outside [0, 1)")));
    }
    let rate = |p: f64| -> Result<f64> { Ok(hashing_rate(&channel_from_bias(BiasSpec::new(axis, eta, p))?)) };
    let (mut a, mut b) = (1e-6, 1.0);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (rate(c)?, rate(d)?);
    while b - a > 1e-9 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = rate(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = rate(d)?;
        }
    }
    let p_min = 0.5 * (a + b);
    let r_min = rate(p_min)?;
    // At infinite bias the minimum is the tangent root p = 1/2, r = 0.
    if r_min > r + 1e-9 {
        return Err(Error::NoSolution(format!("rate {r} is below the channel minimum {r_min:.6} at bias {eta}")));
    }
    let (mut lo, mut hi) = (1e-6, p_min);
    if rate(lo)? <= r {
        return Ok(lo);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if rate(mid)? > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
