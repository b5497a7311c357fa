//! On-disk forms of surfaces, multicurves and embedding samples. Each file
//! carries a schema version; the JSON Schemas under `schemas/` describe the
//! same shapes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ads::embedding::Mat2;
use crate::ads::EmbeddingSample;
use crate::earthquake::{ComponentSpec, WeightedMulticurve};
use crate::error::{Error, Result};
use crate::surface::decomposition::{Slot, SlotRef};
use crate::surface::{assemble, BlockDecomposition, ConeAngles, ConeSurface, FnCoordinates};
use crate::word::Word;

pub const SCHEMA_VERSION: u32 = 1;

fn check_version(kind: &str, v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::InvalidInput(format!("{kind} file has schema version {v}, expected {SCHEMA_VERSION}")));
    }
    Ok(())
}

/// Marking words of one pants curve, as integer generator strings
/// (`k + 1` for generator `k`, negative for inverses).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkingWords {
    pub curve: Word,
    pub transversal: Word,
    pub twisted: Word,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub version: u32,
    pub genus: usize,
    pub angles: Vec<f64>,
    pub blocks: Vec<[Slot; 3]>,
    /// Slot pairs glued along each pants curve. Optional on input; when
    /// present it must agree with the blocks.
    #[serde(default)]
    pub gluings: Vec<[SlotRef; 2]>,
    #[serde(rename = "fn")]
    pub coords: FnCoordinates,
    /// Optional on input; when present it must agree with the decomposition.
    #[serde(default)]
    pub marking: Vec<MarkingWords>,
}

impl SurfaceFile {
    pub fn from_surface(s: &ConeSurface) -> Self {
        let d = s.decomposition();
        SurfaceFile {
            version: SCHEMA_VERSION,
            genus: d.genus(),
            angles: s.angles().as_slice().to_vec(),
            blocks: d.blocks().to_vec(),
            gluings: d.gluings().iter().map(|g| [g.near, g.far]).collect(),
            coords: s.coords().clone(),
            marking: SurfaceFile::marking_of(d),
        }
    }

    pub fn decomposition(&self) -> Result<BlockDecomposition> {
        check_version("surface", self.version)?;
        let d = BlockDecomposition::new(self.blocks.clone())?;
        if d.genus() != self.genus {
            return Err(Error::InvalidInput(format!("blocks give genus {}, file says {}", d.genus(), self.genus)));
        }
        if !self.gluings.is_empty() {
            let mut want: Vec<_> = d.gluings().iter().map(|g| sorted([g.near, g.far])).collect();
            let mut got: Vec<_> = self.gluings.iter().map(|&p| sorted(p)).collect();
            want.sort_unstable();
            got.sort_unstable();
            if want != got {
                return Err(Error::InvalidInput("gluing pairs do not match the blocks".into()));
            }
        }
        if !self.marking.is_empty() {
            let ours = SurfaceFile::marking_of(&d);
            if ours != self.marking {
                return Err(Error::InvalidInput("marking words do not match the decomposition".into()));
            }
        }
        Ok(d)
    }

    fn marking_of(d: &BlockDecomposition) -> Vec<MarkingWords> {
        d.marking()
            .iter()
            .map(|m| MarkingWords {
                curve: m.curve.word.clone(),
                transversal: m.transversal.word.clone(),
                twisted: m.twisted.word.clone(),
            })
            .collect()
    }

    pub fn build(&self) -> Result<ConeSurface> {
        let d = Arc::new(self.decomposition()?);
        assemble(&d, &self.coords, &ConeAngles::new(self.angles.clone())?)
    }
}

/// Gluing pair with the smaller slot first.
fn sorted(p: [SlotRef; 2]) -> (usize, usize, usize, usize) {
    let (a, b) = ((p[0].block, p[0].slot), (p[1].block, p[1].slot));
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    (a.0, a.1, b.0, b.1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MulticurveFile {
    pub version: u32,
    pub components: Vec<ComponentSpec>,
}

impl MulticurveFile {
    pub fn from_multicurve(lambda: &WeightedMulticurve) -> Self {
        MulticurveFile { version: SCHEMA_VERSION, components: lambda.specs() }
    }

    pub fn build(&self, d: &BlockDecomposition) -> Result<WeightedMulticurve> {
        check_version("multicurve", self.version)?;
        WeightedMulticurve::from_specs(d, &self.components)
    }
}

/// Row-major grid samples of the first fundamental form, the shape operator
/// and the complex structure.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingFile {
    pub version: u32,
    pub h: f64,
    pub nu: usize,
    pub nv: usize,
    pub first: Vec<Mat2>,
    pub shape: Vec<Mat2>,
    pub complex: Vec<Mat2>,
}

impl EmbeddingFile {
    pub fn from_sample(e: &EmbeddingSample) -> Self {
        EmbeddingFile {
            version: SCHEMA_VERSION,
            h: e.h,
            nu: e.nu,
            nv: e.nv,
            first: e.first.clone(),
            shape: e.shape.clone(),
            complex: e.complex.clone(),
        }
    }

    pub fn build(&self) -> Result<EmbeddingSample> {
        check_version("embedding", self.version)?;
        EmbeddingSample::new(self.h, self.nu, self.nv, self.first.clone(), self.shape.clone(), self.complex.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> ConeSurface {
        let d = Arc::new(BlockDecomposition::one_cone_torus());
        assemble(&d, &FnCoordinates::new(&[(1.5, 0.3)]), &ConeAngles::uniform(1, 1.5).unwrap()).unwrap()
    }

    #[test]
    fn surface_round_trip() {
        let s = torus();
        let f = SurfaceFile::from_surface(&s);
        let text = serde_json::to_string(&f).unwrap();
        let back: SurfaceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let t = back.build().unwrap();
        assert_eq!(t.holonomy().len(), s.holonomy().len());
        for (a, b) in t.holonomy().iter().zip(s.holonomy()) {
            assert_eq!(a.entries(), b.entries());
        }
    }

    #[test]
    fn minimal_surface_file() {
        let text = r#"{"version":1,"genus":0,"angles":[1.5707963267948966,1.5707963267948966,1.5707963267948966,1.5707963267948966],
            "blocks":[[{"cone":0},{"cone":1},{"curve":0}],[{"curve":0},{"cone":2},{"cone":3}]],
            "fn":[{"length":1.0,"twist":0.0}]}"#;
        let f: SurfaceFile = serde_json::from_str(text).unwrap();
        assert_eq!(f.build().unwrap().decomposition().n_cones(), 4);
    }

    #[test]
    fn mismatches_are_rejected() {
        let mut f = SurfaceFile::from_surface(&torus());
        f.genus = 0;
        assert!(f.build().is_err());
        let mut f = SurfaceFile::from_surface(&torus());
        f.version = 2;
        assert!(f.build().is_err());
        let mut f = SurfaceFile::from_surface(&torus());
        f.marking[0].transversal = Word(vec![1]);
        assert!(f.build().is_err());
        let mut f = SurfaceFile::from_surface(&torus());
        f.gluings[0][1].slot = 2;
        assert!(f.build().is_err());
        assert!(serde_json::from_str::<MulticurveFile>(r#"{"version":1,"components":[],"extra":0}"#).is_err());
    }

    #[test]
    fn multicurve_round_trip() {
        let s = torus();
        let lam = WeightedMulticurve::on_pants_curves(s.decomposition(), &[(0, 0.7)]).unwrap();
        let f = MulticurveFile::from_multicurve(&lam);
        let back: MulticurveFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back.build(s.decomposition()).unwrap(), lam);
    }
}
