//! JSON experiment configurations and the CSV result format.
//!
//! A configuration names a code recipe, a grid of `(p, eta)` points, decoder
//! settings, a trial budget and a seed:
//!
//! ```json
//! {
//!   "code": { "kind": "xzzx_toric", "n1": 8, "n2": 7 },
//!   "axis": "X",
//!   "eta": [0.5, 10, "inf"],
//!   "p": [0.06],
//!   "trials": 100000,
//!   "seed": 7,
//!   "update": "x_to_z"
//! }
//! ```
//!
//! The emitted CSV starts with `#` comment lines carrying the schema version,
//! the crate version, the SHA-256 of the canonical configuration and the
//! configuration itself, then one header row and one row per point. Rows are
//! pure functions of the configuration, so reruns are byte-identical.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::circulant::Protograph;
use crate::codes::{
    bias_tailored_lifted_product, css_twisted_toric, hypergraph_product, lifted_product, read_bundle, toric_code,
    xzzx_twisted_toric, RotatedCode,
};
use crate::decoder::DecoderConfig;
use crate::error::{Error, Result};
use crate::io::read_matrix;
use crate::noise::{Axis, BiasSpec};
use crate::sim::{point_seed, run_experiment, ExperimentResult, RunLimits, UpdateMode};

pub const CSV_SCHEMA: u32 = 1;

pub const CSV_COLUMNS: &[&str] = &[
    "code_name",
    "N",
    "K",
    "axis",
    "eta",
    "p",
    "trials",
    "failures",
    "P_L",
    "P_W",
    "stderr_PW",
    "err3_PW",
    "update",
    "seed",
    "max_iterations",
    "osd_order",
    "llr_clip",
    "min_logical_weight",
];

/// How to build the code under test. Relative paths resolve against the
/// directory of the configuration file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodeRecipe {
    /// XZZX-rotated twisted toric code on an `n1 × n2` lattice.
    XzzxToric { n1: usize, n2: usize },
    /// The same lattice without the Hadamard rotation.
    CssToric { n1: usize, n2: usize },
    /// Ordinary toric code, the product of two closed repetition codes.
    Toric { n1: usize, n2: usize },
    /// Hypergraph product of two classical check matrices.
    Hgp { h1: PathBuf, h2: PathBuf },
    /// CSS lifted product of two protographs.
    LiftedProduct { a1: PathBuf, a2: PathBuf },
    /// Lifted product with the second sector Hadamard-rotated.
    BiasTailored { a1: PathBuf, a2: PathBuf },
    /// A bundle previously written by `build`.
    Bundle { dir: PathBuf },
}

fn read_protograph(path: &Path) -> Result<Protograph> {
    fs::read_to_string(path)?.parse()
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "?".into(), |s| s.to_string_lossy().into_owned())
}

impl CodeRecipe {
    pub fn build(&self, base: &Path) -> Result<RotatedCode> {
        let at = |p: &PathBuf| base.join(p);
        Ok(match self {
            CodeRecipe::XzzxToric { n1, n2 } => xzzx_twisted_toric(*n1, *n2)?,
            CodeRecipe::CssToric { n1, n2 } => RotatedCode::unrotated(css_twisted_toric(*n1, *n2)?),
            CodeRecipe::Toric { n1, n2 } => RotatedCode::unrotated(toric_code(*n1, *n2)),
            CodeRecipe::Hgp { h1, h2 } => {
                RotatedCode::unrotated(hypergraph_product(&read_matrix(at(h1))?, &read_matrix(at(h2))?))
            }
            CodeRecipe::LiftedProduct { a1, a2 } => {
                RotatedCode::unrotated(lifted_product(&read_protograph(&at(a1))?, &read_protograph(&at(a2))?)?)
            }
            CodeRecipe::BiasTailored { a1, a2 } => {
                bias_tailored_lifted_product(&read_protograph(&at(a1))?, &read_protograph(&at(a2))?)?
            }
            CodeRecipe::Bundle { dir } => read_bundle(at(dir))?.code,
        })
    }

    /// Compact JSON form, as stored in bundle manifests.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("recipe serialises")
    }

    /// Short identifier without commas, usable as a CSV cell or directory name.
    pub fn default_name(&self) -> String {
        match self {
            CodeRecipe::XzzxToric { n1, n2 } => format!("xzzx-toric-{n1}x{n2}"),
            CodeRecipe::CssToric { n1, n2 } => format!("css-toric-{n1}x{n2}"),
            CodeRecipe::Toric { n1, n2 } => format!("toric-{n1}x{n2}"),
            CodeRecipe::Hgp { h1, h2 } => format!("hgp-{}-{}", stem(h1), stem(h2)),
            CodeRecipe::LiftedProduct { a1, a2 } => format!("lp-{}-{}", stem(a1), stem(a2)),
            CodeRecipe::BiasTailored { a1, a2 } => format!("bt-{}-{}", stem(a1), stem(a2)),
            CodeRecipe::Bundle { dir } => stem(dir),
        }
    }
}

fn default_axis() -> Axis {
    Axis::X
}

fn default_min_failures() -> u64 {
    RunLimits::default().min_failures
}

fn default_batch_size() -> u64 {
    RunLimits::default().batch_size
}

/// Bias values serialise as numbers, with `"inf"` for infinite bias.
mod eta_list {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Eta {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(etas: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(etas.len()))?;
        for &eta in etas {
            if eta.is_infinite() {
                seq.serialize_element("inf")?;
            } else {
                seq.serialize_element(&eta)?;
            }
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
        Vec::<Eta>::deserialize(d)?
            .into_iter()
            .map(|e| match e {
                Eta::Number(x) => Ok(x),
                Eta::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
                Eta::Text(t) => Err(serde::de::Error::custom(format!("bias {t:?} is neither a number nor \"inf\""))),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label for the `code_name` column; defaults to the recipe's name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub code: CodeRecipe,
    #[serde(default = "default_axis")]
    pub axis: Axis,
    #[serde(with = "eta_list")]
    pub eta: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(default)]
    pub decoder: DecoderConfig,
    pub trials: u64,
    #[serde(default = "default_min_failures")]
    pub min_failures: u64,
    #[serde(default = "default_batch_size")]
    pub batch_size: u64,
    pub seed: u64,
    #[serde(default)]
    pub update: UpdateMode,
    /// CSV destination; not part of the configuration hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// One `(p, eta)` grid point and the seed it runs with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub index: u64,
    pub p: f64,
    pub eta: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.limits().validate()?;
        self.decoder.validate()?;
        if self.eta.is_empty() || self.p.is_empty() {
            return Err(Error::Config("eta and p grids must be non-empty".into()));
        }
        if let Some(eta) = self.eta.iter().find(|e| e.is_nan() || **e <= 0.0) {
            return Err(Error::Config(format!("bias {eta} must be positive")));
        }
        if let Some(p) = self.p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Config(format!("error rate {p} outside [0, 1]")));
        }
        if self.code_name().contains([',', '\n', '"']) {
            return Err(Error::Config("code name may not contain commas, quotes or newlines".into()));
        }
        Ok(())
    }

    pub fn limits(&self) -> RunLimits {
        RunLimits { trials: self.trials, min_failures: self.min_failures, batch_size: self.batch_size }
    }

    pub fn code_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.code.default_name())
    }

    /// Canonical single-line JSON with `output` removed.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        serde_json::to_string(&c).expect("configuration serialises")
    }

    /// Hex SHA-256 of [`canonical_json`](Self::canonical_json).
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes()).iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Grid points, `p` outer and `eta` inner.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::with_capacity(self.p.len() * self.eta.len());
        for &p in &self.p {
            for &eta in &self.eta {
                let index = out.len() as u64;
                out.push(SweepPoint { index, p, eta, seed: point_seed(self.seed, index) });
            }
        }
        out
    }

    pub fn run_point(&self, code: &RotatedCode, point: &SweepPoint) -> Result<ExperimentResult> {
        run_experiment(
            code,
            BiasSpec::new(self.axis, point.eta, point.p),
            &self.decoder,
            self.update,
            self.limits(),
            point.seed,
        )
    }

    /// Comment block and column header that open every CSV for this
    /// configuration.
    pub fn csv_header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# schema={CSV_SCHEMA}");
        let _ = writeln!(s, "# artifact=biased-qldpc {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "# config_sha256={}", self.hash());
        let _ = writeln!(s, "# config={}", self.canonical_json());
        let _ = writeln!(s, "{}", CSV_COLUMNS.join(","));
        s
    }
}

fn fmt_eta(eta: f64) -> String {
    if eta.is_infinite() {
        "inf".into()
    } else {
        eta.to_string()
    }
}

/// One data row, newline-terminated.
pub fn csv_row(code_name: &str, axis: Axis, r: &ExperimentResult) -> String {
    let d = &r.decoder;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        code_name,
        r.n,
        r.k,
        axis,
        fmt_eta(r.spec.eta),
        r.spec.p,
        r.trials,
        r.failures,
        r.p_l(),
        r.p_w(),
        r.stderr_w(),
        3.0 * r.stderr_w(),
        r.update,
        r.seed,
        d.iterations_for(r.n),
        d.osd_order,
        d.llr_clip,
        r.min_logical_weight.map_or(String::new(), |w| w.to_string()),
    )
}

/// `(eta, p)` cells of the data rows in `text`, as written.
fn completed_points(text: &str) -> BTreeSet<(String, String)> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("code_name,"))
        .filter_map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            (cells.len() == CSV_COLUMNS.len()).then(|| (cells[4].to_string(), cells[5].to_string()))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub computed: usize,
    pub skipped: usize,
}

/// Runs every point and streams header and rows into `out`.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    code: &RotatedCode,
    out: &mut impl std::io::Write,
    mut on_point: impl FnMut(&ExperimentResult),
) -> Result<Vec<ExperimentResult>> {
    cfg.validate()?;
    out.write_all(cfg.csv_header().as_bytes())?;
    let name = cfg.code_name();
    let mut results = Vec::new();
    for point in cfg.points() {
        let r = cfg.run_point(code, &point)?;
        out.write_all(csv_row(&name, cfg.axis, &r).as_bytes())?;
        out.flush()?;
        on_point(&r);
        results.push(r);
    }
    Ok(results)
}

/// Like [`run_sweep`] but appends to `path`, skipping points already present.
///
/// An existing file must carry exactly this configuration's header; a
/// trailing partial line left by an interrupted run is discarded.
pub fn resume_sweep(
    cfg: &ExperimentConfig,
    code: &RotatedCode,
    path: &Path,
    mut on_point: impl FnMut(&ExperimentResult),
) -> Result<SweepSummary> {
    cfg.validate()?;
    let header = cfg.csv_header();
    let done = match fs::read_to_string(path) {
        Ok(mut text) => {
            if !text.starts_with(&header) {
                return Err(Error::Config(format!(
                    "{} was written by a different configuration; refusing to append",
                    path.display()
                )));
            }
            if !text.ends_with('\n') {
                let keep = text.rfind('\n').map_or(0, |i| i + 1);
                text.truncate(keep);
                fs::write(path, &text)?;
            }
            completed_points(&text)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            fs::write(path, &header)?;
            BTreeSet::new()
        }
        Err(e) => return Err(e.into()),
    };
    let mut file = fs::OpenOptions::new().append(true).open(path)?;
    let name = cfg.code_name();
    let mut summary = SweepSummary::default();
    for point in cfg.points() {
        if done.contains(&(fmt_eta(point.eta), point.p.to_string())) {
            summary.skipped += 1;
            continue;
        }
        let r = cfg.run_point(code, &point)?;
        file.write_all(csv_row(&name, cfg.axis, &r).as_bytes())?;
        file.flush()?;
        on_point(&r);
        summary.computed += 1;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "code": { "kind": "xzzx_toric", "n1": 3, "n2": 2 },
        "eta": [0.5, "inf"],
        "p": [0.05, 0.1],
        "trials": 300,
        "seed": 11,
        "update": "x_to_z"
    }"#;

    #[test]
    fn parse_fills_defaults() {
        let cfg = ExperimentConfig::from_json(SMALL).unwrap();
        assert_eq!(cfg.axis, Axis::X);
        assert_eq!(cfg.eta, vec![0.5, f64::INFINITY]);
        assert_eq!(cfg.decoder, DecoderConfig::default());
        assert_eq!(cfg.limits(), RunLimits { trials: 300, ..RunLimits::default() });
        assert_eq!(cfg.code_name(), "xzzx-toric-3x2");
    }

    #[test]
    fn json_round_trip() {
        let cfg = ExperimentConfig::from_json(SMALL).unwrap();
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.hash(), cfg.hash());
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            SMALL.replace("\"trials\": 300", "\"trials\": 0"),
            SMALL.replace("\"seed\": 11", "\"seed\": 11, \"sed\": 1"),
            SMALL.replace("\"inf\"", "\"lots\""),
            SMALL.replace("[0.05, 0.1]", "[]"),
            SMALL.replace("0.5,", "-1,"),
            SMALL.replace("\"n2\": 2", "\"n2\": 2, \"n3\": 1"),
        ];
        for text in bad {
            assert!(matches!(ExperimentConfig::from_json(&text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn output_path_does_not_change_hash() {
        let mut cfg = ExperimentConfig::from_json(SMALL).unwrap();
        let h = cfg.hash();
        cfg.output = Some("elsewhere.csv".into());
        assert_eq!(cfg.hash(), h);
        cfg.seed += 1;
        assert_ne!(cfg.hash(), h);
    }

    #[test]
    fn points_have_distinct_seeds() {
        let cfg = ExperimentConfig::from_json(SMALL).unwrap();
        let pts = cfg.points();
        assert_eq!(pts.len(), 4);
        assert_eq!((pts[1].p, pts[1].eta), (0.05, f64::INFINITY));
        let seeds: BTreeSet<u64> = pts.iter().map(|p| p.seed).collect();
        assert_eq!(seeds.len(), 4);
    }

    #[test]
    fn resume_skips_completed_points() {
        let cfg = ExperimentConfig::from_json(SMALL).unwrap();
        let code = cfg.code.build(Path::new(".")).unwrap();
        let mut full = Vec::new();
        run_sweep(&cfg, &code, &mut full, |_| {}).unwrap();
        let full = String::from_utf8(full).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        // Header, two finished rows and a torn third one.
        let lines: Vec<&str> = full.lines().collect();
        let header_len = cfg.csv_header().lines().count();
        let partial = format!("{}\n{}", lines[..header_len + 2].join("\n"), &lines[header_len + 2][..5]);
        fs::write(&path, partial).unwrap();
        let s = resume_sweep(&cfg, &code, &path, |_| {}).unwrap();
        assert_eq!(s, SweepSummary { computed: 2, skipped: 2 });
        assert_eq!(fs::read_to_string(&path).unwrap(), full);

        let s = resume_sweep(&cfg, &code, &path, |_| {}).unwrap();
        assert_eq!(s, SweepSummary { computed: 0, skipped: 4 });
    }

    #[test]
    fn resume_refuses_foreign_file() {
        let cfg = ExperimentConfig::from_json(SMALL).unwrap();
        let code = cfg.code.build(Path::new(".")).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        fs::write(&path, "# schema=1\nsomething else\n").unwrap();
        assert!(matches!(resume_sweep(&cfg, &code, &path, |_| {}), Err(Error::Config(_))));
    }
}
