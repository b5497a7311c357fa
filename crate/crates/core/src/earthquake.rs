//! Right and left earthquakes along weighted multicurves.
//!
//! Two independent routes: shifting Fenchel-Nielsen twists, and composing
//! translations along the lifted leaves crossed by the marking paths. On
//! orbifold angles a third route intersects straight developed segments with
//! enumerated leaf lifts.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::{dist, GeodesicLine, HypPoint, Isometry};
use crate::surface::decomposition::end_generator;
use crate::surface::margin::is_orbifold;
use crate::surface::tiling::Tiling;
use crate::surface::{
    assemble, length_of, marked_length, peripheral_residual, relator_residual, BlockDecomposition, ConeSurface, EdgeKind,
    FnCoordinates, LengthSpectrum,
};
use crate::word::{CurveClass, Word};

/// Weights below this are dropped.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Direction of an earthquake: which way the far side of a leaf moves as seen
/// from the near side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

impl Side {
    /// Signed translation applied along an oriented crossed leaf, and the
    /// shift applied to the Fenchel-Nielsen twist.
    fn sign(self) -> f64 {
        match self {
            Side::Right => -1.0,
            Side::Left => 1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    pub curve: CurveClass,
    pub weight: f64,
    /// Pants curve index when the component is a pants curve.
    pub pants: Option<usize>,
}

/// Disjoint, pairwise non-isotopic, non-peripheral simple closed curves with
/// positive weights.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedMulticurve {
    components: Vec<Component>,
}

/// A curve named either by pants-curve index or by a generator word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveRef {
    Pants(usize),
    Word(Word),
}

/// One entry of a multicurve file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub curve: CurveRef,
    pub weight: f64,
}

impl WeightedMulticurve {
    pub fn empty() -> Self {
        WeightedMulticurve { components: Vec::new() }
    }

    pub fn new(d: &BlockDecomposition, components: Vec<(CurveClass, f64)>) -> Result<Self> {
        let mut kept: Vec<Component> = Vec::new();
        for (curve, weight) in components {
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidInput(format!("weight {weight} of {curve} is not a positive number")));
            }
            if weight < WEIGHT_FLOOR {
                log::info!("dropping component {curve} with weight {weight:e} below {WEIGHT_FLOOR:e}");
                continue;
            }
            if !curve.simple {
                return Err(Error::InvalidInput(format!("{curve} is not certified simple")));
            }
            if curve.peripheral.is_some() {
                return Err(Error::InvalidInput(format!("{curve} is peripheral")));
            }
            let pants = d.pants_curve_index(&curve);
            for other in &kept {
                let disjoint = match (pants, other.pants) {
                    (Some(a), Some(b)) if a == b => {
                        return Err(Error::InvalidInput(format!("{curve} and {} are isotopic", other.curve)));
                    }
                    (Some(_), Some(_)) => true,
                    (Some(a), None) => d.intersection(&other.curve, a)? == 0,
                    (None, Some(b)) => d.intersection(&curve, b)? == 0,
                    (None, None) => {
                        return Err(Error::Unsupported(format!(
                            "no disjointness certificate for {curve} and {}",
                            other.curve
                        )));
                    }
                };
                if !disjoint {
                    return Err(Error::InvalidInput(format!("{curve} meets {}", other.curve)));
                }
            }
            kept.push(Component { curve, weight, pants });
        }
        Ok(WeightedMulticurve { components: kept })
    }

    /// Multicurve on pants curves given by index.
    pub fn on_pants_curves(d: &BlockDecomposition, weights: &[(usize, f64)]) -> Result<Self> {
        let mut comps = Vec::new();
        for &(e, w) in weights {
            if e >= d.n_curves() {
                return Err(Error::InvalidInput(format!("no pants curve {e}")));
            }
            comps.push((d.pants_curve(e).clone(), w));
        }
        WeightedMulticurve::new(d, comps)
    }

    pub fn from_specs(d: &BlockDecomposition, specs: &[ComponentSpec]) -> Result<Self> {
        let mut comps = Vec::new();
        for s in specs {
            let curve = match &s.curve {
                CurveRef::Pants(e) => {
                    if *e >= d.n_curves() {
                        return Err(Error::InvalidInput(format!("no pants curve {e}")));
                    }
                    d.pants_curve(*e).clone()
                }
                CurveRef::Word(w) => {
                    let c = CurveClass::new(w.clone());
                    match d.pants_curve_index(&c) {
                        Some(e) => d.pants_curve(e).clone(),
                        None => c,
                    }
                }
            };
            comps.push((curve, s.weight));
        }
        WeightedMulticurve::new(d, comps)
    }

    pub fn specs(&self) -> Vec<ComponentSpec> {
        self.components
            .iter()
            .map(|c| ComponentSpec {
                curve: match c.pants {
                    Some(e) => CurveRef::Pants(e),
                    None => CurveRef::Word(c.curve.word.clone()),
                },
                weight: c.weight,
            })
            .collect()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidInput(format!("scale factor {k} is not positive")));
        }
        let mut out = self.clone();
        out.components.iter_mut().for_each(|c| c.weight *= k);
        Ok(out)
    }

    /// Weight on each pants curve; errors if a component is not a pants curve.
    pub fn pants_weights(&self, d: &BlockDecomposition) -> Result<Vec<f64>> {
        let mut w = vec![0.0; d.n_curves()];
        for c in &self.components {
            let e = c.pants.ok_or_else(|| {
                Error::Unsupported(format!("{} is not a pants curve of the decomposition", c.curve))
            })?;
            w[e] += c.weight;
        }
        Ok(w)
    }

    /// Intersection mass `sum w_i i(gamma, c_i)`.
    pub fn mass(&self, d: &BlockDecomposition, gamma: &CurveClass) -> Result<f64> {
        let mut m = 0.0;
        for c in &self.components {
            let e = c.pants.ok_or_else(|| {
                Error::Unsupported(format!("intersection with {} is not known", c.curve))
            })?;
            m += c.weight * d.intersection(gamma, e)? as f64;
        }
        Ok(m)
    }
}

/// Fenchel-Nielsen coordinates after the earthquake, without assembling.
pub fn shifted_coords(s: &ConeSurface, lambda: &WeightedMulticurve, side: Side) -> Result<FnCoordinates> {
    let w = lambda.pants_weights(s.decomposition())?;
    let mut coords = s.coords().clone();
    for (e, we) in w.iter().enumerate() {
        coords.0[e].twist += side.sign() * we;
    }
    Ok(coords)
}

fn twist_shift(s: &ConeSurface, lambda: &WeightedMulticurve, side: Side) -> Result<ConeSurface> {
    assemble(s.decomposition(), &shifted_coords(s, lambda, side)?, s.angles())
}

/// Earthquake by shifting twists. With `strict`, components that are not pants
/// curves are an error; otherwise the cocycle route is tried with a notice.
pub fn earthquake_twist(s: &ConeSurface, lambda: &WeightedMulticurve, side: Side, strict: bool) -> Result<ConeSurface> {
    match lambda.pants_weights(s.decomposition()) {
        Ok(_) => twist_shift(s, lambda, side),
        Err(e) if strict => Err(e),
        Err(e) => {
            log::warn!("twist route unavailable ({e}); falling back to the cocycle route");
            earthquake_cocycle(s, lambda, side)?.into_surface()
        }
    }
}

pub fn right_earthquake_twist(s: &ConeSurface, lambda: &WeightedMulticurve) -> Result<ConeSurface> {
    earthquake_twist(s, lambda, Side::Right, false)
}

pub fn left_earthquake(s: &ConeSurface, lambda: &WeightedMulticurve) -> Result<ConeSurface> {
    earthquake_twist(s, lambda, Side::Left, false)
}

/// A leaf lift crossed by a path, oriented so that the path crosses it from
/// its left to its right. The leaf is the image of the upward imaginary axis
/// under `frame`.
#[derive(Clone, Copy, Debug)]
pub struct Crossing {
    pub frame: Isometry,
    pub weight: f64,
}

const HALF_TURN: Isometry = Isometry::from_const([0.0, 1.0, -1.0, 0.0]);

impl Crossing {
    pub fn from_leaf(leaf: &GeodesicLine, weight: f64) -> Crossing {
        Crossing { frame: leaf.frame(), weight }
    }

    pub fn leaf(&self) -> GeodesicLine {
        GeodesicLine::imaginary_axis().image(&self.frame)
    }

    /// The translation `u(l, a)` for this crossing.
    pub fn factor(&self, side: Side) -> Isometry {
        let e = (0.5 * side.sign() * self.weight).exp();
        let shift = Isometry::new(e, 0.0, 0.0, 1.0 / e).expect("unimodular");
        self.frame * shift * self.frame.inverse()
    }

    fn image(&self, g: &Isometry) -> Crossing {
        Crossing { frame: *g * self.frame, weight: self.weight }
    }

    fn reversed(&self) -> Crossing {
        Crossing { frame: self.frame * HALF_TURN, weight: self.weight }
    }
}

/// Composes `u(l_1, a_1) ... u(l_k, a_k)` in crossing order.
pub fn compose_crossings(crossings: &[Crossing], side: Side) -> Isometry {
    crossings.iter().fold(Isometry::IDENTITY, |acc, c| acc * c.factor(side))
}

/// Crossing lists of the marking paths, from the basepoint in the centre block.
#[derive(Clone, Debug)]
pub struct MarkingPaths {
    /// Path from the basepoint to the interior point of each block.
    pub to_block: Vec<Vec<Crossing>>,
    /// Path from the basepoint to its translate, per generator.
    pub generators: Vec<Vec<Crossing>>,
}

/// The leaf between the two sides of gluing `curve`, oriented so that a path
/// from its near block to its far block crosses it from left to right.
fn gluing_leaf(s: &ConeSurface, curve: usize, weight: f64) -> Crossing {
    let g = s.decomposition().gluing(curve);
    let frame = s.block(g.near.block).frames[g.near.slot].expect("glued slot is a boundary");
    // The near block lies to the right of the axis of its end.
    Crossing { frame: s.placement(g.near.block) * frame, weight }.reversed()
}

/// Crossings from `g y` back to `g x_0` for a path from `x_0` to `y`.
fn returning<'a>(path: &'a [Crossing], g: &Isometry) -> impl Iterator<Item = Crossing> + 'a {
    let g = *g;
    path.iter().rev().map(move |c| c.image(&g).reversed())
}

pub fn marking_paths(s: &ConeSurface, weights: &[f64]) -> Result<MarkingPaths> {
    let d = s.decomposition();
    let n_blocks = d.blocks().len();
    let mut to_block: Vec<Vec<Crossing>> = vec![Vec::new(); n_blocks];
    for st in d.frame_walk() {
        let mut path = to_block[st.parent].clone();
        if weights[st.curve] > 0.0 {
            let leaf = gluing_leaf(s, st.curve, weights[st.curve]);
            path.push(if st.forward { leaf } else { leaf.reversed() });
        }
        to_block[st.block] = path;
    }
    let mut generators = vec![Vec::new(); d.n_generators()];
    for b in 0..n_blocks {
        for k in 0..3 {
            let gen = end_generator(b, k);
            let g = s.holonomy()[gen];
            // Out to the block, around the end inside the block, and back.
            let mut path = to_block[b].clone();
            path.extend(returning(&to_block[b], &g));
            generators[gen] = path;
        }
    }
    for gl in d.gluings() {
        if let EdgeKind::Hnn { generator } = gl.kind {
            let g = s.holonomy()[generator];
            let mut path = to_block[gl.near.block].clone();
            if weights[gl.curve] > 0.0 {
                path.push(gluing_leaf(s, gl.curve, weights[gl.curve]));
            }
            path.extend(returning(&to_block[gl.far.block], &g));
            generators[generator] = path;
        }
    }
    Ok(MarkingPaths { to_block, generators })
}

/// Holonomy after an earthquake, as images of the marking generators, with
/// the deformed block placements.
#[derive(Clone, Debug)]
pub struct DeformedHolonomy {
    base: ConeSurface,
    side: Side,
    images: Vec<Isometry>,
    /// `beta(x_0, y_b) P_b` per block.
    placements: Vec<Isometry>,
    /// `beta(x_0, gamma x_0)` per generator.
    factors: Vec<Isometry>,
}

/// Earthquake by composing translations along crossed leaves.
pub fn earthquake_cocycle(s: &ConeSurface, lambda: &WeightedMulticurve, side: Side) -> Result<DeformedHolonomy> {
    let d = s.decomposition();
    let weights = lambda.pants_weights(d).map_err(|e| Error::Cocycle(e.to_string()))?;
    let paths = marking_paths(s, &weights)?;
    let factors: Vec<Isometry> = paths.generators.iter().map(|p| compose_crossings(p, side)).collect();
    let outward: Vec<Isometry> = paths.to_block.iter().map(|p| compose_crossings(p, side)).collect();
    let placements: Vec<Isometry> = outward.iter().enumerate().map(|(b, f)| *f * s.placement(b)).collect();
    // The same products as `factor * h`, regrouped so that rotation angles
    // survive round-off: an end generator is the block's own end conjugated by
    // the deformed placement.
    let mut images = vec![Isometry::IDENTITY; d.n_generators()];
    for (b, q) in placements.iter().enumerate() {
        for k in 0..3 {
            images[end_generator(b, k)] = s.block(b).ends[k].conjugate_by(q);
        }
    }
    for gl in d.gluings() {
        if let EdgeKind::Hnn { generator } = gl.kind {
            let mut near = paths.to_block[gl.near.block].clone();
            if weights[gl.curve] > 0.0 {
                near.push(gluing_leaf(s, gl.curve, weights[gl.curve]));
            }
            images[generator] =
                compose_crossings(&near, side) * s.holonomy()[generator] * outward[gl.far.block].inverse();
        }
    }
    let out = DeformedHolonomy { base: s.clone(), side, images, placements, factors };
    let residual = out.relator_residual();
    if residual > crate::surface::HOLONOMY_TOL * out.scale() {
        return Err(Error::Cocycle(format!("deformed relator residual {residual:.3e}")));
    }
    Ok(out)
}

pub fn right_earthquake_cocycle(s: &ConeSurface, lambda: &WeightedMulticurve) -> Result<DeformedHolonomy> {
    earthquake_cocycle(s, lambda, Side::Right)
}

pub fn left_earthquake_cocycle(s: &ConeSurface, lambda: &WeightedMulticurve) -> Result<DeformedHolonomy> {
    earthquake_cocycle(s, lambda, Side::Left)
}

const HALF_TURN_INV: Isometry = Isometry::from_const([0.0, -1.0, 1.0, 0.0]);

impl DeformedHolonomy {
    pub fn base(&self) -> &ConeSurface {
        &self.base
    }

    /// Squared largest entry among images and placements: products of the
    /// crossing factors lose this much relative to machine precision.
    pub fn scale(&self) -> f64 {
        crate::surface::conditioning(self.images.iter().chain(&self.placements))
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn images(&self) -> &[Isometry] {
        &self.images
    }

    pub fn placements(&self) -> &[Isometry] {
        &self.placements
    }

    pub fn factors(&self) -> &[Isometry] {
        &self.factors
    }

    pub fn decomposition(&self) -> &Arc<BlockDecomposition> {
        self.base.decomposition()
    }

    pub fn eval(&self, gamma: &CurveClass) -> Isometry {
        gamma.word.eval(&self.images)
    }

    pub fn geodesic_length(&self, gamma: &CurveClass) -> Result<f64> {
        length_of(&self.images, gamma)
    }

    pub fn spectrum(&self) -> Result<LengthSpectrum> {
        LengthSpectrum::of(&self.images, &self.decomposition().determining_system())
    }

    pub fn relator_residual(&self) -> f64 {
        relator_residual(self.decomposition(), &self.images)
    }

    pub fn peripheral_residual(&self) -> Result<f64> {
        peripheral_residual(self.decomposition(), &self.images, self.base.angles())
    }

    /// Twists read off the deformed gluing maps.
    pub fn twists(&self) -> Result<Vec<f64>> {
        let s = &self.base;
        let d = s.decomposition();
        let mut out = Vec::with_capacity(d.n_curves());
        for g in d.gluings() {
            let fa = s.block(g.near.block).frames[g.near.slot].expect("glued slot is a boundary");
            let fb = s.block(g.far.block).frames[g.far.slot].expect("glued slot is a boundary");
            let far = match g.kind {
                EdgeKind::Tree => self.placements[g.far.block],
                EdgeKind::Hnn { generator } => self.images[generator] * self.placements[g.far.block],
            };
            let glue = self.placements[g.near.block].inverse() * far;
            let m = (HALF_TURN_INV * fa.inverse() * glue * fb).entries();
            if m[1].abs().max(m[2].abs()) > 1e-8 * self.scale() {
                return Err(Error::Cocycle(format!(
                    "gluing of curve {} is not a translation along the shared axis",
                    g.curve
                )));
            }
            out.push(2.0 * m[0].abs().ln());
        }
        Ok(out)
    }

    /// The Fenchel-Nielsen point of the deformed structure, checked against
    /// the deformed images.
    pub fn into_surface(self) -> Result<ConeSurface> {
        let twists = self.twists()?;
        let mut coords: FnCoordinates = self.base.coords().clone();
        for (e, t) in twists.into_iter().enumerate() {
            coords.0[e].twist = t;
        }
        let out = assemble(self.base.decomposition(), &coords, self.base.angles())?;
        let gap = out.holonomy().iter().zip(&self.images).map(|(a, b)| a.distance(b)).fold(0.0, f64::max);
        if gap > 1e-8 * self.scale() {
            return Err(Error::Cocycle(format!("reassembled holonomy differs by {gap:.3e}")));
        }
        Ok(out)
    }
}

/// Lifts of multicurve leaves meeting a ball, for orbifold angles where the
/// developed lifts are pairwise disjoint lines.
#[derive(Clone, Debug)]
pub struct LeafLifts {
    pub lines: Vec<(GeodesicLine, f64)>,
}

impl LeafLifts {
    /// All lifts of the components meeting the ball of `radius` about `centre`.
    /// Leaves run along tile sides, so they are read off the tiles near the ball.
    pub fn enumerate(s: &ConeSurface, lambda: &WeightedMulticurve, centre: HypPoint, radius: f64) -> Result<LeafLifts> {
        if !is_orbifold(s) {
            return Err(Error::Unsupported("leaf lifts are only enumerated for angles 2 pi / k".into()));
        }
        let weights = lambda.pants_weights(s.decomposition())?;
        let tiling = Tiling::new(s)?;
        let reach = radius + tiling.tiles.iter().map(|t| t.diameter()).fold(0.0, f64::max);
        let mut lines = Vec::new();
        let mut keys = HashSet::new();
        for (t, g) in tiling.instances_near(centre, reach, 400_000)? {
            let tile = &tiling.tiles[t];
            for (j, c) in tile.curves.iter().enumerate() {
                let Some(e) = *c else { continue };
                if weights[e] <= 0.0 {
                    continue;
                }
                let (u, v) = tile.side(j);
                let line = GeodesicLine::through(g.apply(u), g.apply(v))?;
                if crate::hyp::dist_to_geodesic(centre, &line) > radius {
                    continue;
                }
                let (a, b) = line.canonical();
                if keys.insert((round_bp(a), round_bp(b))) {
                    lines.push((line, weights[e]));
                }
            }
        }
        Ok(LeafLifts { lines })
    }

    /// Leaves crossed by the segment from `x` to `y`, in order from `x`.
    pub fn crossings(&self, x: HypPoint, y: HypPoint) -> Result<Vec<Crossing>> {
        let seg = GeodesicLine::through(x, y)?;
        let mut hits = Vec::new();
        for (line, w) in &self.lines {
            let (sx, sy) = (line.signed_distance(x), line.signed_distance(y));
            if sx.abs() < 1e-9 || sy.abs() < 1e-9 {
                return Err(Error::Degenerate("segment endpoint on a leaf".into()));
            }
            if sx * sy > 0.0 {
                continue;
            }
            let p = seg.intersection(line).ok_or_else(|| Error::Degenerate("leaf tangent to segment".into()))?;
            // Crossing from left (negative side) to right.
            let leaf = if sx < 0.0 { *line } else { line.reversed() };
            hits.push((dist(x, p), Crossing::from_leaf(&leaf, *w)));
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        if hits.windows(2).any(|h| (h[1].0 - h[0].0).abs() < 1e-12) {
            return Err(Error::Degenerate("two leaves crossed at the same point".into()));
        }
        Ok(hits.into_iter().map(|(_, c)| c).collect())
    }

    /// `beta(x, y)` along the straight segment.
    pub fn beta(&self, x: HypPoint, y: HypPoint, side: Side) -> Result<Isometry> {
        Ok(compose_crossings(&self.crossings(x, y)?, side))
    }
}

fn round_bp(p: crate::hyp::BoundaryPoint) -> Option<i64> {
    match p {
        crate::hyp::BoundaryPoint::Finite(x) => Some((x * 1e7).round() as i64),
        crate::hyp::BoundaryPoint::Infinity => None,
    }
}

/// Earthquake by straight developed segments from the basepoint `x0` to its
/// translates, with up to eight basepoint perturbations on degenerate paths.
pub fn earthquake_segments(
    s: &ConeSurface,
    lambda: &WeightedMulticurve,
    side: Side,
    x0: HypPoint,
) -> Result<Vec<Isometry>> {
    let mut last = None;
    for attempt in 0..=8 {
        let x = if attempt == 0 {
            x0
        } else {
            let a = attempt as f64;
            HypPoint::new(x0.x() + 1e-4 * a * (1.3 * a).cos(), x0.y() * (1.0 + 1e-4 * a * (1.3 * a).sin()))?
        };
        match segment_images(s, lambda, side, x) {
            Ok(v) => return Ok(v),
            Err(e @ Error::Degenerate(_)) => {
                log::debug!("segment route degenerate at attempt {attempt}: {e}");
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Cocycle(format!("basepoint perturbations exhausted: {}", last.expect("an attempt failed"))))
}

fn segment_images(s: &ConeSurface, lambda: &WeightedMulticurve, side: Side, x0: HypPoint) -> Result<Vec<Isometry>> {
    let mut out = Vec::with_capacity(s.holonomy().len());
    for h in s.holonomy() {
        let y = h.apply(x0);
        let mid = GeodesicLine::through(x0, y).map(|l| l.point_at(x0, 0.5 * dist(x0, y))).unwrap_or(x0);
        let lifts = LeafLifts::enumerate(s, lambda, mid, 0.5 * dist(x0, y) + 1e-6)?;
        out.push(lifts.beta(x0, y, side)? * *h);
    }
    Ok(out)
}

/// Residual of `beta(g x, g y) = h(g) beta(x, y) h(g)^{-1}` over the marking
/// generators and the given point pairs, on orbifold angles.
#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceReport {
    pub residual: f64,
    pub pairs: usize,
    pub passed: bool,
}

pub fn equivariance_check(s: &ConeSurface, lambda: &WeightedMulticurve, pairs: &[(HypPoint, HypPoint)]) -> Result<EquivarianceReport> {
    let mut residual: f64 = 0.0;
    let mut count = 0;
    for h in s.holonomy() {
        for &(x, y) in pairs {
            let (gx, gy) = (h.apply(x), h.apply(y));
            let span = |a: HypPoint, b: HypPoint| -> Result<LeafLifts> {
                let mid = GeodesicLine::through(a, b)?.point_at(a, 0.5 * dist(a, b));
                LeafLifts::enumerate(s, lambda, mid, 0.5 * dist(a, b) + 1e-6)
            };
            let here = span(x, y)?.beta(x, y, Side::Right)?;
            let there = span(gx, gy)?.beta(gx, gy, Side::Right)?;
            residual = residual.max(there.distance(&here.conjugate_by(h)));
            count += 1;
        }
    }
    Ok(EquivarianceReport { residual, pairs: count, passed: residual < 1e-8 })
}

/// Lengths before and after a right earthquake and the intersection mass.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LengthInequality {
    pub before: f64,
    pub after: f64,
    pub mass: f64,
}

impl LengthInequality {
    pub fn slack(&self) -> f64 {
        self.before + self.after - self.mass
    }
}

/// Lengths of `gamma` before and after the right earthquake, and the mass
/// `i(lambda, gamma)`. The lower bound `before + after >= mass` must hold.
pub fn length_inequality_check(s: &ConeSurface, lambda: &WeightedMulticurve, gamma: &CurveClass) -> Result<LengthInequality> {
    let mass = lambda.mass(s.decomposition(), gamma)?;
    let before = s.geodesic_length(gamma)?;
    let after = marked_length(s.decomposition(), &shifted_coords(s, lambda, Side::Right)?, s.angles(), gamma)?;
    Ok(LengthInequality { before, after, mass })
}
