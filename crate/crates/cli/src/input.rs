//! Reading input files: every file is hashed, then parsed with the path of
//! the offending field kept for error messages.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use adsquake::earthquake::{CurveRef, WeightedMulticurve};
use adsquake::files::{MulticurveFile, SurfaceFile, SCHEMA_VERSION};
use adsquake::solver::Support;
use adsquake::surface::{BlockDecomposition, ConeSurface};
use adsquake::word::CurveClass;

use crate::report::Failure;

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Default)]
pub struct Inputs {
    pub digests: Vec<InputDigest>,
}

impl Inputs {
    pub fn read<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let sha256 = hex::encode(Sha256::digest(&bytes));
        log::info!("read {} ({} bytes, sha256 {sha256})", path.display(), bytes.len());
        self.digests.push(InputDigest { path: path.display().to_string(), sha256 });
        let de = &mut serde_json::Deserializer::from_slice(&bytes);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Failure::Input(format!("{}: at `{}`: {}", path.display(), e.path(), e.inner())))
    }

    pub fn surface(&mut self, path: &Path) -> Result<ConeSurface, Failure> {
        let f: SurfaceFile = self.read(path)?;
        f.build().map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }

    pub fn multicurve(&mut self, path: &Path, d: &BlockDecomposition) -> Result<WeightedMulticurve, Failure> {
        let f: MulticurveFile = self.read(path)?;
        f.build(d).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

/// `reference` read relative to the directory of the file that names it.
pub fn resolve(from: &Path, reference: &Path) -> PathBuf {
    match from.parent() {
        Some(dir) if reference.is_relative() => dir.join(reference),
        _ => reference.to_path_buf(),
    }
}

pub fn check_version(path: &Path, version: u32) -> Result<(), Failure> {
    if version != SCHEMA_VERSION {
        return Err(Failure::Input(format!(
            "{}: at `version`: schema version {version}, expected {SCHEMA_VERSION}",
            path.display()
        )));
    }
    Ok(())
}

/// Support curves by pants index or word; repeats are kept.
pub fn support(s: &ConeSurface, refs: &[CurveRef]) -> Result<Support, Failure> {
    let d: &Arc<BlockDecomposition> = s.decomposition();
    let mut curves = Vec::with_capacity(refs.len());
    for r in refs {
        let c = match r {
            CurveRef::Pants(e) if *e < d.n_curves() => d.pants_curve(*e).clone(),
            CurveRef::Pants(e) => return Err(Failure::Input(format!("support: no pants curve {e}"))),
            CurveRef::Word(w) => {
                let c = CurveClass::new(w.clone());
                d.pants_curve_index(&c).map(|e| d.pants_curve(e).clone()).unwrap_or(c)
            }
        };
        curves.push(c);
    }
    Support::new(s, curves).map_err(|e| Failure::Input(format!("support: {e}")))
}

/// `bend.json`: bending data on the future boundary of the convex core.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BendFile {
    pub version: u32,
    pub surface: PathBuf,
    pub multicurve: PathBuf,
}

/// `invert.json`: find weights carrying `source` to `target`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvertFile {
    pub version: u32,
    pub source: PathBuf,
    pub target: PathBuf,
    pub support: Vec<CurveRef>,
    #[serde(default)]
    pub upper: Option<f64>,
    #[serde(default)]
    pub initial: Option<Vec<f64>>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    /// Weights the target was built with, if known.
    #[serde(default)]
    pub expected: Option<Vec<f64>>,
}

/// `mess.json`: a pair of left and right metrics and the support of the
/// earthquake between them.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MessFile {
    pub version: u32,
    pub left: PathBuf,
    pub right: PathBuf,
    pub support: Vec<CurveRef>,
}
