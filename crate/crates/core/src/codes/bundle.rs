//! On-disk code bundles.
//!
//! A bundle is a directory holding
//!
//! ```text
//! hx.alist  hz.alist    check matrices
//! lx.txt    lz.txt      logical bases, dense text
//! manifest.txt          key=value metadata
//! ```
//!
//! Manifest keys: `format` (currently `1`), `name`, `N`, `K`, `D` (a distance
//! bound such as `3`, `<=20` or `unknown`), `sector1_size`, `rotated`
//! (`none`, `sector2`, or a comma-separated qubit list) and `recipe`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{CssCode, RotatedCode};
use crate::error::{Error, Result};
use crate::gf2::BinaryVector;
use crate::io::{parse_alist, parse_dense, write_alist, write_dense};

const FORMAT: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeBundle {
    pub name: String,
    pub code: RotatedCode,
    /// Free-form distance annotation, stored verbatim.
    pub distance: String,
    pub recipe: String,
}

impl CodeBundle {
    pub fn new(name: impl Into<String>, code: RotatedCode, recipe: impl Into<String>) -> Self {
        Self { name: name.into(), code, distance: "unknown".into(), recipe: recipe.into() }
    }

    fn rotation_field(&self) -> String {
        let css = self.code.css();
        let rotated = self.code.rotated_qubits();
        if rotated.is_empty() {
            "none".into()
        } else if rotated.iter().copied().eq(css.sector1_size()..css.n()) {
            "sector2".into()
        } else {
            rotated.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
        }
    }

    pub fn manifest(&self) -> String {
        let css = self.code.css();
        let mut s = String::new();
        let _ = writeln!(s, "format={FORMAT}");
        let _ = writeln!(s, "name={}", self.name);
        let _ = writeln!(s, "N={}", css.n());
        let _ = writeln!(s, "K={}", css.k());
        let _ = writeln!(s, "D={}", self.distance);
        let _ = writeln!(s, "sector1_size={}", css.sector1_size());
        let _ = writeln!(s, "rotated={}", self.rotation_field());
        let _ = writeln!(s, "recipe={}", self.recipe);
        s
    }
}

pub fn write_bundle(bundle: &CodeBundle, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let css = bundle.code.css();
    fs::write(dir.join("hx.alist"), write_alist(css.hx()))?;
    fs::write(dir.join("hz.alist"), write_alist(css.hz()))?;
    fs::write(dir.join("lx.txt"), write_dense(css.lx()))?;
    fs::write(dir.join("lz.txt"), write_dense(css.lz()))?;
    fs::write(dir.join("manifest.txt"), bundle.manifest())?;
    Ok(())
}

fn parse_manifest(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            column: 1,
            message: "expected key=value".into(),
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn read_bundle(dir: impl AsRef<Path>) -> Result<CodeBundle> {
    let dir = dir.as_ref();
    let manifest = parse_manifest(&fs::read_to_string(dir.join("manifest.txt"))?)?;
    let field = |k: &str| manifest.get(k).cloned().ok_or_else(|| Error::Config(format!("manifest is missing `{k}`")));
    let number = |k: &str| -> Result<usize> {
        field(k)?.parse().map_err(|_| Error::Config(format!("manifest field `{k}` is not a count")))
    };
    if field("format")? != FORMAT {
        return Err(Error::Config(format!("unsupported bundle format {}", field("format")?)));
    }
    let hx = parse_alist(&fs::read_to_string(dir.join("hx.alist"))?)?;
    let hz = parse_alist(&fs::read_to_string(dir.join("hz.alist"))?)?;
    let mut lx = parse_dense(&fs::read_to_string(dir.join("lx.txt"))?)?;
    let mut lz = parse_dense(&fs::read_to_string(dir.join("lz.txt"))?)?;
    let n = hx.cols();
    // An empty dense file parses as 0×0.
    if lx.rows() == 0 {
        lx = crate::gf2::BinaryMatrix::zeros(0, n);
    }
    if lz.rows() == 0 {
        lz = crate::gf2::BinaryMatrix::zeros(0, n);
    }
    let css = CssCode::from_parts(hx, hz, lx, lz, number("sector1_size")?)?;
    if css.n() != number("N")? || css.k() != number("K")? {
        return Err(Error::Config("manifest N/K disagree with the stored matrices".into()));
    }
    let rotated = match field("rotated")?.as_str() {
        "none" => BinaryVector::zeros(n),
        "sector2" => BinaryVector::from_support(n, &(css.sector1_size()..n).collect::<Vec<_>>()),
        list => {
            let qubits = list
                .split(',')
                .map(|q| q.trim().parse::<usize>().ok().filter(|&q| q < n))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Config(format!("bad rotation list `{list}`")))?;
            BinaryVector::from_support(n, &qubits)
        }
    };
    Ok(CodeBundle {
        name: field("name")?,
        code: RotatedCode::with_rotation(css, rotated)?,
        distance: field("D")?,
        recipe: field("recipe")?,
    })
}
