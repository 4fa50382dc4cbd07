//! Monte Carlo decoding trials and their aggregation.
//!
//! A trial samples a CSS-frame error, decodes the X component against `Hz`
//! and the Z component against `Hx` (in an order set by [`UpdateMode`]), and
//! fails when either residual anticommutes with a logical operator.
//!
//! Randomness: trial `i` of a point draws from
//! `ChaCha8Rng::seed_from_u64(point_seed)` on stream `i`, so every trial is
//! reproducible on its own. Trials run in fixed-size batches; the
//! minimum-failure stopping rule is checked only between batches, which makes
//! results independent of the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::RotatedCode;
use crate::decoder::{BpOsdDecoder, DecoderConfig};
use crate::error::{Error, Result};
use crate::gf2::BinaryVector;
use crate::noise::{channel_from_bias, code_priors, sample_error_into, Axis, BiasSpec, PauliChannel, QubitPriors};

/// Which round, if any, feeds its result into the priors of the other.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    /// Decode both rounds with their marginal priors.
    #[default]
    Off,
    /// Decode X first and condition the Z priors on its recovery.
    XToZ,
    /// Decode Z first and condition the X priors on its recovery.
    ZToX,
}

impl std::fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UpdateMode::Off => "off",
            UpdateMode::XToZ => "x_to_z",
            UpdateMode::ZToX => "z_to_x",
        })
    }
}

impl std::str::FromStr for UpdateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(UpdateMode::Off),
            "x_to_z" => Ok(UpdateMode::XToZ),
            "z_to_x" => Ok(UpdateMode::ZToX),
            other => Err(Error::Config(format!("unknown update mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub success: bool,
    /// Support size of the residual Pauli `r' = (r'_X, r'_Z)`.
    pub residual_weight: usize,
    /// On failure the residual is a logical operator; its weight bounds `D`.
    pub min_logical_weight_observed: Option<usize>,
}

/// Conditional Z-priors given the X-round recovery, per qubit:
/// `pz / (1 − px − py)` where `r_X = 0` and `py / (px + py)` where `r_X = 1`,
/// with each qubit's channel taken in the CSS frame (so `px` and `pz` are
/// exchanged on rotated qubits). Impossible events get probability 0.
pub fn channel_update(rx: &BinaryVector, priors: &QubitPriors) -> Vec<f64> {
    let mut out = vec![0.0; priors.len()];
    channel_update_into(rx, priors, UpdateMode::XToZ, &mut out);
    out
}

fn conditional(flagged: bool, same: f64, y: f64, other: f64) -> f64 {
    let (num, den) = if flagged { (y, same + y) } else { (other, 1.0 - same - y) };
    if den <= 0.0 {
        0.0
    } else {
        (num / den).clamp(0.0, 1.0)
    }
}

fn channel_update_into(first: &BinaryVector, priors: &QubitPriors, mode: UpdateMode, out: &mut [f64]) {
    for (j, o) in out.iter_mut().enumerate() {
        let c = priors.channel(j);
        *o = match mode {
            UpdateMode::XToZ => conditional(first.get(j), c.px, c.py, c.pz),
            UpdateMode::ZToX => conditional(first.get(j), c.pz, c.py, c.px),
            UpdateMode::Off => unreachable!(),
        };
    }
}

/// Per-worker trial state: decoders for both rounds and scratch buffers.
#[derive(Clone, Debug)]
pub struct TrialRunner {
    code: RotatedCode,
    dec_x: BpOsdDecoder,
    dec_z: BpOsdDecoder,
    lx_rows: Vec<BinaryVector>,
    lz_rows: Vec<BinaryVector>,
    ex: BinaryVector,
    ez: BinaryVector,
    sx: BinaryVector,
    sz: BinaryVector,
    updated: Vec<f64>,
}

impl TrialRunner {
    pub fn new(code: &RotatedCode, cfg: &DecoderConfig) -> Result<Self> {
        let css = code.css();
        let n = css.n();
        Ok(Self {
            dec_x: BpOsdDecoder::new(css.hz(), cfg.clone())?,
            dec_z: BpOsdDecoder::new(css.hx(), cfg.clone())?,
            lx_rows: css.lx().row_vectors(),
            lz_rows: css.lz().row_vectors(),
            ex: BinaryVector::zeros(n),
            ez: BinaryVector::zeros(n),
            sx: BinaryVector::zeros(css.hz().rows()),
            sz: BinaryVector::zeros(css.hx().rows()),
            updated: vec![0.0; n],
            code: code.clone(),
        })
    }

    /// Decodes the given CSS-frame error.
    pub fn decode_error(
        &mut self,
        ex: &BinaryVector,
        ez: &BinaryVector,
        priors: &QubitPriors,
        update: UpdateMode,
    ) -> Result<TrialOutcome> {
        let css = self.code.css();
        css.hz().matvec_into(ex, &mut self.sx);
        css.hx().matvec_into(ez, &mut self.sz);
        let (rx, rz) = match update {
            UpdateMode::Off => {
                let rx = self.dec_x.decode(&self.sx, &priors.px_eff)?.recovery;
                let rz = self.dec_z.decode(&self.sz, &priors.pz_eff)?.recovery;
                (rx, rz)
            }
            UpdateMode::XToZ => {
                let rx = self.dec_x.decode(&self.sx, &priors.px_eff)?.recovery;
                channel_update_into(&rx, priors, update, &mut self.updated);
                let rz = self.dec_z.decode(&self.sz, &self.updated)?.recovery;
                (rx, rz)
            }
            UpdateMode::ZToX => {
                let rz = self.dec_z.decode(&self.sz, &priors.pz_eff)?.recovery;
                channel_update_into(&rz, priors, update, &mut self.updated);
                let rx = self.dec_x.decode(&self.sx, &self.updated)?.recovery;
                (rx, rz)
            }
        };
        let mut res_x = rx;
        res_x.xor_assign(ex);
        let mut res_z = rz;
        res_z.xor_assign(ez);
        let failure = self.lz_rows.iter().any(|l| l.dot(&res_x)) || self.lx_rows.iter().any(|l| l.dot(&res_z));
        let residual_weight = res_x.words().iter().zip(res_z.words()).map(|(a, b)| (a | b).count_ones() as usize).sum();
        Ok(TrialOutcome {
            success: !failure,
            residual_weight,
            min_logical_weight_observed: failure.then_some(residual_weight),
        })
    }

    /// Samples and decodes one error.
    pub fn run(&mut self, priors: &QubitPriors, update: UpdateMode, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
        let mut ex = std::mem::replace(&mut self.ex, BinaryVector::zeros(0));
        let mut ez = std::mem::replace(&mut self.ez, BinaryVector::zeros(0));
        sample_error_into(priors, rng, &mut ex, &mut ez);
        let out = self.decode_error(&ex, &ez, priors, update);
        self.ex = ex;
        self.ez = ez;
        out
    }
}

/// One trial from scratch. Prefer [`TrialRunner`] in loops.
pub fn run_trial(
    code: &RotatedCode,
    channel: PauliChannel,
    cfg: &DecoderConfig,
    update: UpdateMode,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    TrialRunner::new(code, cfg)?.run(&code_priors(code, channel), update, rng)
}

/// Trial budget and stopping rule for one point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunLimits {
    /// Maximum number of trials.
    pub trials: u64,
    /// Stop after the first batch that brings the failure count to this
    /// value; `0` always runs all trials.
    pub min_failures: u64,
    pub batch_size: u64,
}

impl Default for RunLimits {
    fn default() -> Self {
        Self { trials: 10_000, min_failures: 100, batch_size: 1024 }
    }
}

impl RunLimits {
    /// Exactly `trials` trials, no early stop.
    pub fn fixed(trials: u64) -> Self {
        Self { trials, min_failures: 0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub n: usize,
    pub k: usize,
    pub spec: BiasSpec,
    pub trials: u64,
    pub failures: u64,
    pub update: UpdateMode,
    pub seed: u64,
    pub decoder: DecoderConfig,
    pub min_logical_weight: Option<usize>,
}

impl ExperimentResult {
    /// Block error rate.
    pub fn p_l(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }

    /// Word error rate `1 − (1 − P_L)^{1/K}`.
    pub fn p_w(&self) -> f64 {
        word_error_rate(self.p_l(), self.k)
    }

    pub fn stderr_l(&self) -> f64 {
        let p = self.p_l();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Binomial standard error of `P_L` pushed through `dP_W/dP_L`.
    pub fn stderr_w(&self) -> f64 {
        let p = self.p_l();
        if self.k == 0 || p >= 1.0 {
            return 0.0;
        }
        let k = self.k as f64;
        self.stderr_l() * (1.0 - p).powf(1.0 / k - 1.0) / k
    }
}

pub fn word_error_rate(p_l: f64, k: usize) -> f64 {
    if k <= 1 {
        return p_l;
    }
    1.0 - (1.0 - p_l).powf(1.0 / k as f64)
}

#[derive(Clone, Copy, Default)]
struct Tally {
    trials: u64,
    failures: u64,
    min_weight: Option<usize>,
}

impl Tally {
    fn merge(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            failures: self.failures + o.failures,
            min_weight: match (self.min_weight, o.min_weight) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        }
    }
}

/// Runs independent trials at one noise point.
pub fn run_experiment(
    code: &RotatedCode,
    spec: BiasSpec,
    cfg: &DecoderConfig,
    update: UpdateMode,
    limits: RunLimits,
    seed: u64,
) -> Result<ExperimentResult> {
    limits.validate()?;
    cfg.validate()?;
    if code.k() == 0 {
        return Err(Error::Domain("code encodes no logical qubits".into()));
    }
    let channel = channel_from_bias(spec)?;
    let priors = code_priors(code, channel);
    let runner = TrialRunner::new(code, cfg)?;
    let mut total = Tally::default();
    let mut next = 0u64;
    while next < limits.trials {
        let end = (next + limits.batch_size).min(limits.trials);
        let batch = (next..end)
            .into_par_iter()
            .map_init(
                || runner.clone(),
                |r, i| -> Result<Tally> {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(i);
                    let out = r.run(&priors, update, &mut rng)?;
                    Ok(Tally { trials: 1, failures: (!out.success) as u64, min_weight: out.min_logical_weight_observed })
                },
            )
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
        total = total.merge(batch);
        next = end;
        if limits.min_failures > 0 && total.failures >= limits.min_failures {
            break;
        }
    }
    Ok(ExperimentResult {
        n: code.n(),
        k: code.k(),
        spec,
        trials: total.trials,
        failures: total.failures,
        update,
        seed,
        decoder: cfg.clone(),
        min_logical_weight: total.min_weight,
    })
}

/// SplitMix64 finaliser applied to `seed + index`.
pub fn point_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One experiment per bias value at fixed total `p`; point `i` uses
/// `point_seed(seed, i)`.
#[allow(clippy::too_many_arguments)]
pub fn bias_sweep(
    code: &RotatedCode,
    axis: Axis,
    etas: &[f64],
    p: f64,
    cfg: &DecoderConfig,
    update: UpdateMode,
    limits: RunLimits,
    seed: u64,
) -> Result<Vec<ExperimentResult>> {
    etas.iter()
        .enumerate()
        .map(|(i, &eta)| run_experiment(code, BiasSpec::new(axis, eta, p), cfg, update, limits, point_seed(seed, i as u64)))
        .collect()
}
