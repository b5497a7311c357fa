//! Marked hyperbolic cone surfaces assembled from generalized pants.

pub mod area;
pub mod block;
pub mod decomposition;
pub mod margin;
pub mod tiling;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::{Isometry, IsometryClass};
use crate::word::CurveClass;

pub use area::{developed_polygons, gauss_bonnet_area, triangulated_area};
pub use block::{build_block, build_cone_pants, build_pants, BlockGeometry, SlotShape};
pub use decomposition::{BlockDecomposition, EdgeKind, Gluing, MarkedCurve, Slot, SlotRef, TreeStep};
pub use margin::singular_margin;

/// Tolerance for relator and peripheral-angle postconditions.
pub const HOLONOMY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ConeAngles(Vec<f64>);

impl ConeAngles {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        for (i, t) in theta.iter().enumerate() {
            if !(*t > 0.0 && *t < std::f64::consts::PI) {
                return Err(Error::InvalidInput(format!("cone angle {i} = {t} is not in (0, pi)")));
            }
        }
        Ok(ConeAngles(theta))
    }

    pub fn uniform(n: usize, theta: f64) -> Result<Self> {
        ConeAngles::new(vec![theta; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for ConeAngles {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ConeAngles::new(v)
    }
}

impl From<ConeAngles> for Vec<f64> {
    fn from(a: ConeAngles) -> Self {
        a.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnPair {
    pub length: f64,
    pub twist: f64,
}

/// Fenchel-Nielsen coordinates, one (length, twist) pair per pants curve.
/// Twists are in units of hyperbolic length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FnCoordinates(pub Vec<FnPair>);

impl FnCoordinates {
    pub fn new(pairs: &[(f64, f64)]) -> Self {
        FnCoordinates(pairs.iter().map(|&(length, twist)| FnPair { length, twist }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn length(&self, e: usize) -> f64 {
        self.0[e].length
    }

    pub fn twist(&self, e: usize) -> f64 {
        self.0[e].twist
    }

    pub fn with_twist(&self, e: usize, t: f64) -> Self {
        let mut c = self.clone();
        c.0[e].twist = t;
        c
    }

    /// Largest coordinate-wise deviation.
    pub fn distance(&self, other: &FnCoordinates) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a.length - b.length).abs().max((a.twist - b.twist).abs()))
            .fold(0.0, f64::max)
    }
}

/// A marked hyperbolic structure with cone points: block data, coordinates and
/// the holonomy of the marking generators.
#[derive(Clone, Debug)]
pub struct ConeSurface {
    angles: ConeAngles,
    decomposition: Arc<BlockDecomposition>,
    coords: FnCoordinates,
    holonomy: Vec<Isometry>,
    placements: Vec<Isometry>,
    blocks: Vec<BlockGeometry>,
}

fn block_shapes(d: &BlockDecomposition, coords: &FnCoordinates, angles: &ConeAngles, b: usize) -> [SlotShape; 3] {
    d.blocks()[b].map(|s| match s {
        Slot::Cone(i) => SlotShape::Cone(angles.as_slice()[i]),
        Slot::Curve(e) => SlotShape::Boundary(coords.length(e)),
    })
}

fn diag(x: f64) -> Isometry {
    let e = (0.5 * x).exp();
    Isometry::from_raw([e, 0.0, 0.0, 1.0 / e])
}

const HALF_TURN: Isometry = Isometry::from_const([0.0, 1.0, -1.0, 0.0]);

/// Holonomy images of a decomposition's generators as a plain vector.
pub type Representation = Vec<Isometry>;

/// Builds the marked surface: blocks are placed along the spanning tree, each
/// child glued to its parent across the shared axis and shifted by the twist.
pub fn assemble(d: &Arc<BlockDecomposition>, coords: &FnCoordinates, angles: &ConeAngles) -> Result<ConeSurface> {
    if coords.len() != d.n_curves() {
        return Err(Error::InvalidInput(format!(
            "{} Fenchel-Nielsen pairs given for {} pants curves",
            coords.len(),
            d.n_curves()
        )));
    }
    if angles.len() != d.n_cones() {
        return Err(Error::InvalidInput(format!("{} cone angles given for {} cone points", angles.len(), d.n_cones())));
    }
    for (e, p) in coords.0.iter().enumerate() {
        if !(p.length > 0.0 && p.length.is_finite() && p.twist.is_finite()) {
            return Err(Error::InvalidInput(format!("pants curve {e}: length {} twist {}", p.length, p.twist)));
        }
    }
    let n_blocks = d.blocks().len();
    let blocks: Vec<BlockGeometry> =
        (0..n_blocks).map(|b| build_block(block_shapes(d, coords, angles, b))).collect::<Result<_>>()?;

    let crossing = |g: &Gluing| -> Isometry {
        let fa = blocks[g.near.block].frames[g.near.slot].expect("glued slot is a boundary");
        let fb = blocks[g.far.block].frames[g.far.slot].expect("glued slot is a boundary");
        fa * HALF_TURN * diag(coords.twist(g.curve)) * fb.inverse()
    };

    let mut placements = vec![Isometry::IDENTITY; n_blocks];
    for st in d.frame_walk() {
        let c = crossing(d.gluing(st.curve));
        placements[st.block] = placements[st.parent] * if st.forward { c } else { c.inverse() };
    }

    let mut holonomy = vec![Isometry::IDENTITY; d.n_generators()];
    for b in 0..n_blocks {
        for k in 0..3 {
            holonomy[decomposition::end_generator(b, k)] = blocks[b].ends[k].conjugate_by(&placements[b]);
        }
    }
    for g in d.gluings() {
        if let EdgeKind::Hnn { generator } = g.kind {
            holonomy[generator] = placements[g.near.block] * crossing(g) * placements[g.far.block].inverse();
        }
    }

    let residual = relator_residual(d, &holonomy).max(peripheral_residual(d, &holonomy, angles)?);
    let tol = HOLONOMY_TOL * conditioning(holonomy.iter().chain(&placements));
    if residual > tol {
        return Err(Error::Assembly { residual, tol });
    }
    Ok(ConeSurface { angles: angles.clone(), decomposition: d.clone(), coords: coords.clone(), holonomy, placements, blocks })
}

/// Square of the largest matrix entry, at least 1. Round-off in products of
/// these matrices grows with it, so residual tolerances are scaled by it.
pub fn conditioning<'a>(ms: impl IntoIterator<Item = &'a Isometry>) -> f64 {
    let big = ms.into_iter().flat_map(|g| g.entries()).fold(1.0, |m: f64, x| m.max(x.abs()));
    big * big
}

/// Largest distance from the identity over all relators.
pub fn relator_residual(d: &BlockDecomposition, rep: &[Isometry]) -> f64 {
    d.relators().iter().map(|r| r.eval(rep).distance_to_identity()).fold(0.0, f64::max)
}

/// Largest deviation of peripheral rotation angles from the prescribed ones.
pub fn peripheral_residual(d: &BlockDecomposition, rep: &[Isometry], angles: &ConeAngles) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (p, theta) in d.peripherals().iter().zip(angles.as_slice()) {
        match p.word.eval(rep).classify() {
            IsometryClass::Elliptic { angle } => worst = worst.max((angle - theta).abs()),
            other => {
                return Err(Error::ClassMismatch { expected: "elliptic", found: other.to_string() });
            }
        }
    }
    Ok(worst)
}

/// Geodesic length of `gamma` at coordinates whose twists may be far too large
/// to assemble directly. Each twist is brought into `[-l/2, l/2]` by whole
/// turns and `gamma` is rewritten by the matching automorphisms.
pub fn marked_length(
    d: &Arc<BlockDecomposition>,
    coords: &FnCoordinates,
    angles: &ConeAngles,
    gamma: &CurveClass,
) -> Result<f64> {
    let mut reduced = coords.clone();
    let mut word = gamma.word.clone();
    for e in 0..d.n_curves() {
        let (l, t) = (coords.length(e), coords.twist(e));
        let n = (t / l).round();
        if n != 0.0 {
            if n.abs() > i32::MAX as f64 {
                return Err(Error::InvalidInput(format!("twist {t} on curve {e} is out of range")));
            }
            reduced.0[e].twist = t - n * l;
            word = word.substitute(&d.twist_automorphism(e, n as i32));
        }
    }
    let s = assemble(d, &reduced, angles)?;
    let word = word.cyclically_reduced();
    let log_trace = word.log_abs_trace(s.holonomy());
    if log_trace > 20.0 {
        // 2 acosh(x / 2) = 2 ln x up to O(x^-2).
        return Ok(2.0 * log_trace);
    }
    length_of(s.holonomy(), &CurveClass { word, ..gamma.clone() })
}

/// Geodesic length of a non-peripheral class under a representation.
pub fn length_of(rep: &[Isometry], gamma: &CurveClass) -> Result<f64> {
    if let Some(i) = gamma.peripheral {
        return Err(Error::InvalidInput(format!("{gamma} is peripheral to cone point {i}")));
    }
    gamma.word.eval(rep).translation_length()
}

impl ConeSurface {
    pub fn angles(&self) -> &ConeAngles {
        &self.angles
    }

    pub fn decomposition(&self) -> &Arc<BlockDecomposition> {
        &self.decomposition
    }

    pub fn coords(&self) -> &FnCoordinates {
        &self.coords
    }

    pub fn holonomy(&self) -> &[Isometry] {
        &self.holonomy
    }

    /// Isometry placing block `b` of the developed picture.
    pub fn placement(&self, b: usize) -> Isometry {
        self.placements[b]
    }

    pub fn block(&self, b: usize) -> &BlockGeometry {
        &self.blocks[b]
    }

    pub fn genus(&self) -> usize {
        self.decomposition.genus()
    }

    pub fn eval(&self, gamma: &CurveClass) -> Isometry {
        gamma.word.eval(&self.holonomy)
    }

    pub fn geodesic_length(&self, gamma: &CurveClass) -> Result<f64> {
        length_of(&self.holonomy, gamma)
    }

    pub fn length_spectrum(&self, system: &[CurveClass]) -> Result<LengthSpectrum> {
        LengthSpectrum::of(&self.holonomy, system)
    }

    /// Spectrum over the decomposition's determining system.
    pub fn spectrum(&self) -> Result<LengthSpectrum> {
        self.length_spectrum(&self.decomposition.determining_system())
    }

    pub fn relator_residual(&self) -> f64 {
        relator_residual(&self.decomposition, &self.holonomy)
    }

    pub fn peripheral_residual(&self) -> f64 {
        peripheral_residual(&self.decomposition, &self.holonomy, &self.angles).unwrap_or(f64::INFINITY)
    }

    /// Rotation angles of the peripheral loops, in cone order.
    pub fn peripheral_angles(&self) -> Result<Vec<f64>> {
        peripheral_angles(&self.decomposition, &self.holonomy)
    }
}

pub fn peripheral_angles(d: &BlockDecomposition, rep: &[Isometry]) -> Result<Vec<f64>> {
    d.peripherals().iter().map(|p| p.word.eval(rep).rotation_angle()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub curve: CurveClass,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LengthSpectrum(pub Vec<SpectrumEntry>);

impl LengthSpectrum {
    pub fn of(rep: &[Isometry], system: &[CurveClass]) -> Result<Self> {
        system
            .iter()
            .map(|c| Ok(SpectrumEntry { curve: c.clone(), length: length_of(rep, c)? }))
            .collect::<Result<Vec<_>>>()
            .map(LengthSpectrum)
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.0.iter().map(|e| e.length).collect()
    }

    /// Max componentwise difference; errors if the curve systems differ.
    pub fn distance(&self, other: &LengthSpectrum) -> Result<f64> {
        if self.0.len() != other.0.len() || self.0.iter().zip(&other.0).any(|(a, b)| a.curve.word != b.curve.word) {
            return Err(Error::Incomparable("length spectra over different curve systems".into()));
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| (a.length - b.length).abs()).fold(0.0, f64::max))
    }
}

fn check_comparable(d1: &BlockDecomposition, a1: &ConeAngles, d2: &BlockDecomposition, a2: &ConeAngles) -> Result<()> {
    if d1 != d2 {
        return Err(Error::Incomparable("surfaces carry different markings".into()));
    }
    if a1.len() != a2.len() || a1.as_slice().iter().zip(a2.as_slice()).any(|(x, y)| (x - y).abs() > 1e-12) {
        return Err(Error::Incomparable("surfaces have different cone angles".into()));
    }
    Ok(())
}

/// Largest spectrum difference over the determining system.
pub fn teich_distance(s1: &ConeSurface, s2: &ConeSurface) -> Result<f64> {
    check_comparable(&s1.decomposition, &s1.angles, &s2.decomposition, &s2.angles)?;
    s1.spectrum()?.distance(&s2.spectrum()?)
}

pub fn equals_in_teich(s1: &ConeSurface, s2: &ConeSurface, tol: f64) -> Result<bool> {
    Ok(teich_distance(s1, s2)? <= tol)
}

/// Spectrum distance between two representations of the same decomposition.
pub fn representation_distance(d: &BlockDecomposition, r1: &[Isometry], r2: &[Isometry]) -> Result<f64> {
    let sys = d.determining_system();
    LengthSpectrum::of(r1, &sys)?.distance(&LengthSpectrum::of(r2, &sys)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn four_cone(l: f64, t: f64) -> ConeSurface {
        let d = Arc::new(BlockDecomposition::cone_sphere(4).unwrap());
        assemble(&d, &FnCoordinates::new(&[(l, t)]), &ConeAngles::uniform(4, PI / 2.0).unwrap()).unwrap()
    }

    #[test]
    fn four_cone_sphere_peripherals() {
        let s = four_cone(1.0, 0.0);
        for p in s.decomposition().peripherals() {
            let tr = s.eval(p).abs_trace();
            assert!((tr - 2.0 * (PI / 4.0).cos()).abs() < 1e-12);
        }
        assert!(s.relator_residual() < 1e-12);
        let c = s.decomposition().pants_curve(0).clone();
        assert!((s.geodesic_length(&c).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.geodesic_length(&c.inverse()).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.geodesic_length(&c.power(2)).unwrap() - 2.0).abs() < 1e-12);
        let p = s.decomposition().peripherals()[0].clone();
        assert!(s.geodesic_length(&p).is_err());
    }

    #[test]
    fn full_twist_changes_marked_transversal_only() {
        let a = four_cone(1.0, 0.2);
        let b = four_cone(1.0, 1.2);
        let sa = a.spectrum().unwrap().lengths();
        let sb = b.spectrum().unwrap().lengths();
        assert!((sa[0] - sb[0]).abs() < 1e-12);
        // The twisted transversal of one picks up a full twist relative to the other.
        assert!((sa[1] - sb[1]).abs() > 1e-3);
        assert!(!equals_in_teich(&a, &b, 1e-8).unwrap());
        let c = four_cone(1.0 + 1e-7, 0.2);
        assert!(!equals_in_teich(&a, &c, 1e-8).unwrap());
        assert!(equals_in_teich(&a, &a, 0.0).unwrap());
    }

    #[test]
    fn twisted_transversal_is_a_full_twist_back() {
        for (d, l) in [(BlockDecomposition::cone_sphere(4).unwrap(), 1.0), (BlockDecomposition::one_cone_torus(), 1.5)] {
            let d = Arc::new(d);
            let a = ConeAngles::uniform(d.n_cones(), PI / 2.0).unwrap();
            let m = &d.marking()[0];
            for t in [-0.7, 0.0, 0.4] {
                let at = |t: f64| assemble(&d, &FnCoordinates::new(&[(l, t)]), &a).unwrap();
                let lt = at(t).geodesic_length(&m.twisted).unwrap();
                let lb = at(t - l).geodesic_length(&m.transversal).unwrap();
                assert!((lt - lb).abs() < 1e-10, "{lt} {lb}");
            }
        }
    }

    #[test]
    fn twist_automorphism_matches_whole_turns() {
        let cases = [
            (BlockDecomposition::cone_sphere(4).unwrap(), vec![(1.0, 0.3)], vec![PI / 2.0; 4]),
            (BlockDecomposition::one_cone_torus(), vec![(1.5, 0.3)], vec![PI / 2.0]),
            (BlockDecomposition::cone_sphere(5).unwrap(), vec![(1.0, 0.3), (1.4, -0.2)], vec![1.0, 1.5, 2.0, 2.5, 0.7]),
            (BlockDecomposition::genus_two(), vec![(1.0, 0.1), (1.2, -0.4), (0.9, 0.0)], vec![]),
        ];
        for (d, fnc, angles) in cases {
            let d = Arc::new(d);
            let coords = FnCoordinates::new(&fnc);
            let angles = ConeAngles::new(angles).unwrap();
            let base = assemble(&d, &coords, &angles).unwrap();
            for e in 0..d.n_curves() {
                for n in [-2, -1, 1, 2] {
                    let shifted = coords.with_twist(e, coords.twist(e) + n as f64 * coords.length(e));
                    let s = assemble(&d, &shifted, &angles).unwrap();
                    let phi = d.twist_automorphism(e, n);
                    for g in d.determining_system() {
                        let direct = s.geodesic_length(&g).unwrap();
                        let moved = base.geodesic_length(&CurveClass::new(g.word.substitute(&phi))).unwrap();
                        assert!((direct - moved).abs() < 1e-9 * direct.max(1.0), "{e} {n} {g}: {direct} {moved}");
                        let reduced = marked_length(&d, &shifted, &angles, &g).unwrap();
                        assert!((direct - reduced).abs() < 1e-9 * direct.max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn marked_length_reaches_large_twists() {
        let d = Arc::new(BlockDecomposition::cone_sphere(4).unwrap());
        let angles = ConeAngles::uniform(4, PI / 2.0).unwrap();
        let tr = d.marking()[0].transversal.clone();
        let mut prev = 0.0;
        for t in [10.0, 40.0, 400.0] {
            let l = marked_length(&d, &FnCoordinates::new(&[(1.0, -t)]), &angles, &tr).unwrap();
            // Two crossings, each adding about the twist.
            assert!(l > 2.0 * t - 10.0 && l > prev, "{t} {l}");
            prev = l;
        }
    }

    #[test]
    fn torus_relator_residual() {
        let d = Arc::new(BlockDecomposition::one_cone_torus());
        let s = assemble(&d, &FnCoordinates::new(&[(1.5, 0.3)]), &ConeAngles::new(vec![PI / 2.0]).unwrap()).unwrap();
        assert!(s.relator_residual() < 1e-9);
        assert!(s.peripheral_residual() < 1e-10);
    }

    #[test]
    fn genus_two_closed() {
        let d = Arc::new(BlockDecomposition::genus_two());
        let s = assemble(&d, &FnCoordinates::new(&[(1.0, 0.2), (2.0, -0.4), (1.5, 0.0)]), &ConeAngles::new(vec![]).unwrap())
            .unwrap();
        assert!(s.relator_residual() < 1e-9);
        for (e, l) in [1.0, 2.0, 1.5].iter().enumerate() {
            let c = s.decomposition().pants_curve(e).clone();
            assert!((s.geodesic_length(&c).unwrap() - l).abs() < 1e-10);
        }
    }

    #[test]
    fn conjugation_invariance() {
        let s = four_cone(1.3, 0.4);
        let g = crate::hyp::rotation_about(crate::hyp::HypPoint::new(0.3, 2.0).unwrap(), 1.0);
        let conj: Vec<Isometry> = s.holonomy().iter().map(|h| h.conjugate_by(&g)).collect();
        assert!(representation_distance(s.decomposition(), s.holonomy(), &conj).unwrap() < 1e-10);
    }
}
