//! Distance on the surface from a closed geodesic to the cone points.
//!
//! The nearest cone point is reached by a geodesic segment leaving the curve
//! orthogonally. These segments are traced through the tiling as windows of
//! orthogonal rays, so the result is a distance on the surface even when the
//! holonomy group is not discrete. For orbifold angles the holonomy orbit of
//! the cone points gives the same number and serves as a cross-check.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyp::{dist, dist_to_geodesic, GeodesicLine, HypPoint, Isometry};
use crate::word::CurveClass;

use super::tiling::Tiling;
use super::{developed_polygons, ConeSurface};

#[derive(Clone, Copy, Debug)]
pub struct MarginOptions {
    /// Orbit cut-off radius as a multiple of the fundamental-domain diameter.
    pub radius_factor: f64,
    /// Orbit word-length cap; `None` means twice the number of generators.
    pub max_word_length: Option<usize>,
    /// Hard cap on enumerated tiles or group elements.
    pub max_nodes: usize,
}

impl Default for MarginOptions {
    fn default() -> Self {
        MarginOptions { radius_factor: 3.0, max_word_length: None, max_nodes: 200_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginReport {
    pub margin: f64,
    /// Cone point realizing the margin.
    pub cone: usize,
    pub per_cone: Vec<f64>,
    /// Tiles or group elements visited.
    pub elements: usize,
    /// True when the enumeration hit `max_nodes` before finishing.
    pub truncated: bool,
}

impl MarginReport {
    fn from_per_cone(per_cone: Vec<f64>, elements: usize, truncated: bool) -> MarginReport {
        let (cone, margin) = per_cone
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one cone point");
        MarginReport { margin, cone, per_cone, elements, truncated }
    }
}

fn check_curve(s: &ConeSurface, gamma: &CurveClass) -> Result<()> {
    if !gamma.simple {
        return Err(Error::Unsupported(format!("{gamma} is not certified simple")));
    }
    if gamma.peripheral.is_some() {
        return Err(Error::InvalidInput(format!("{gamma} is peripheral")));
    }
    if s.decomposition().n_cones() == 0 {
        return Err(Error::InvalidInput("surface has no cone points".into()));
    }
    Ok(())
}

/// True when every cone angle is `2 pi / k` for an integer `k`.
pub fn is_orbifold(s: &ConeSurface) -> bool {
    s.angles().as_slice().iter().all(|t| {
        let k = TAU / t;
        (k - k.round()).abs() < 1e-9
    })
}

pub fn singular_margin(s: &ConeSurface, gamma: &CurveClass) -> Result<MarginReport> {
    singular_margin_with(s, gamma, MarginOptions::default())
}

/// Pants curves are handled by ray windows; other simple curves only on
/// orbifolds, through the orbit enumeration.
pub fn singular_margin_with(s: &ConeSurface, gamma: &CurveClass, opts: MarginOptions) -> Result<MarginReport> {
    check_curve(s, gamma)?;
    if s.decomposition().pants_curve_index(gamma).is_some() {
        return window_margin(s, gamma, opts);
    }
    if is_orbifold(s) {
        return orbit_margin(s, gamma, opts);
    }
    Err(Error::Unsupported(format!("margin of {gamma}: only pants curves are supported off orbifold angles")))
}

/// Fermi coordinates about an oriented line: arclength of the foot and signed
/// distance.
struct Fermi {
    frame_inv: Isometry,
}

impl Fermi {
    fn new(line: &GeodesicLine) -> Fermi {
        Fermi { frame_inv: line.frame().inverse() }
    }

    fn t(&self, p: HypPoint) -> f64 {
        let q = self.frame_inv.apply(p);
        q.x().hypot(q.y()).ln()
    }

    fn r(&self, p: HypPoint) -> f64 {
        let q = self.frame_inv.apply(p);
        (q.x() / q.y()).asinh()
    }

    fn point(&self, t: f64, r: f64) -> HypPoint {
        let w = HypPoint::new(t.exp() * r.tanh(), t.exp() / r.cosh()).expect("finite Fermi coordinates");
        self.frame_inv.inverse().apply(w)
    }
}

struct Window {
    bound: f64,
    tile: usize,
    transform: Isometry,
    entry: usize,
    lo: f64,
    hi: f64,
    sign: f64,
}

/// Ray-window propagation for a pants curve.
pub fn window_margin(s: &ConeSurface, gamma: &CurveClass, opts: MarginOptions) -> Result<MarginReport> {
    check_curve(s, gamma)?;
    let tiling = Tiling::new(s)?;
    let h = s.eval(gamma);
    let period = h.translation_length()?;
    let axis = h.axis()?;
    let fermi = Fermi::new(&axis);
    let origin = axis.frame().apply(HypPoint::i());

    let start = tiling.along(&axis, origin, period);
    for sign in [1.0, -1.0] {
        let gap = Tiling::coverage_gap(&start, period, sign);
        if gap > 1e-7 {
            return Err(Error::Inconsistent(format!("{gamma} is not covered by tile sides (gap {gap:.3e})")));
        }
    }

    let developed = |tile: usize, g: &Isometry| -> Vec<HypPoint> {
        tiling.tiles[tile].verts.iter().map(|p| g.apply(*p)).collect()
    };
    let lower_bound = |verts: &[HypPoint]| -> f64 {
        let near = verts.iter().map(|p| fermi.r(*p).abs()).fold(f64::INFINITY, f64::min);
        let mut diam: f64 = 0.0;
        for a in 0..verts.len() {
            for b in a + 1..verts.len() {
                diam = diam.max(dist(verts[a], verts[b]));
            }
        }
        (near - diam).max(0.0)
    };
    let side_t = |verts: &[HypPoint], j: usize, lo: f64, hi: f64| -> (f64, f64) {
        let (u, v) = (verts[j], verts[(j + 1) % verts.len()]);
        let line = GeodesicLine::through(u, v).expect("distinct vertices");
        let (a, b) = (fermi.t(line.point_at(u, lo)), fermi.t(line.point_at(u, hi)));
        (a.min(b), a.max(b))
    };

    let mut heap = BinaryHeap::new();
    let mut windows = Vec::new();
    fn push(windows: &mut Vec<Window>, heap: &mut BinaryHeap<(Reverse<u64>, usize)>, w: Window) {
        heap.push((Reverse((w.bound * 1e12) as u64), windows.len()));
        windows.push(w);
    }
    for (piece, sign) in &start {
        let g = piece.transform;
        let verts = developed(piece.tile, &g);
        let (lo, hi) = side_t(&verts, piece.side, 0.0, dist(verts[piece.side], verts[(piece.side + 1) % verts.len()]));
        let (lo, hi) = (lo.max(0.0), hi.min(period));
        if hi - lo > 1e-12 {
            let w = Window { bound: 0.0, tile: piece.tile, transform: g, entry: piece.side, lo, hi, sign: sign.signum() };
            push(&mut windows, &mut heap, w);
        }
    }

    let n_cones = s.decomposition().n_cones();
    let mut per_cone = vec![f64::INFINITY; n_cones];
    let mut visited = 0usize;
    let mut truncated = false;
    while let Some((_, idx)) = heap.pop() {
        let w = &windows[idx];
        let worst = per_cone.iter().copied().fold(0.0, f64::max);
        if w.bound > worst {
            break;
        }
        visited += 1;
        if visited > opts.max_nodes {
            truncated = true;
            break;
        }
        let (tile, g, entry, lo, hi, sign) = (w.tile, w.transform, w.entry, w.lo, w.hi, w.sign);
        let verts = developed(tile, &g);
        let cones = &tiling.tiles[tile].cones;
        for (v, c) in verts.iter().zip(cones) {
            if let Some(c) = c {
                let t = fermi.t(*v);
                if t >= lo - 1e-12 && t <= hi + 1e-12 {
                    per_cone[*c] = per_cone[*c].min(fermi.r(*v).abs());
                }
            }
        }
        let centre = tiling.tiles[tile].centre();
        let centre = g.apply(centre);
        for j in 0..verts.len() {
            if j == entry {
                continue;
            }
            let (u, v) = (verts[j], verts[(j + 1) % verts.len()]);
            let side_line = GeodesicLine::through(u, v)?;
            let mid = side_line.point_at(u, 0.5 * dist(u, v));
            let step = fermi.point(fermi.t(mid), fermi.r(mid) + sign * 1e-6);
            // Exit sides have the tile behind them as the rays move outward.
            let inside = side_line.signed_distance(centre).signum();
            if side_line.signed_distance(step) * inside > 0.0 {
                continue;
            }
            for piece in &tiling.neighbours[tile][j] {
                let (plo, phi) = side_t(&verts, j, piece.lo, piece.hi);
                let (nlo, nhi) = (plo.max(lo), phi.min(hi));
                if nhi - nlo <= 1e-12 {
                    continue;
                }
                let ng = g * piece.transform;
                let next = Window {
                    bound: lower_bound(&developed(piece.tile, &ng)),
                    tile: piece.tile,
                    transform: ng,
                    entry: piece.side,
                    lo: nlo,
                    hi: nhi,
                    sign,
                };
                push(&mut windows, &mut heap, next);
            }
        }
    }
    if per_cone.iter().any(|d| !d.is_finite()) {
        return Err(Error::Inconsistent(format!("margin of {gamma}: some cone point was never reached")));
    }
    Ok(MarginReport::from_per_cone(per_cone, visited, truncated))
}

/// Distance from the axis to the holonomy orbit of the cone points, over
/// translates of bounded word length within a radius proportional to the
/// fundamental-domain diameter. On a surface whose angles are not of the form
/// `2 pi / k` the orbit is dense and this is not a distance on the surface.
pub fn orbit_margin(s: &ConeSurface, gamma: &CurveClass, opts: MarginOptions) -> Result<MarginReport> {
    check_curve(s, gamma)?;
    let d = s.decomposition();
    let h = s.eval(gamma);
    let period = h.translation_length()?;
    let axis = h.axis()?;
    let cones: Vec<HypPoint> = d.peripherals().iter().map(|p| s.eval(p).fixed_point()).collect::<Result<_>>()?;

    let polys = developed_polygons(s);
    let verts: Vec<HypPoint> = polys.iter().flatten().copied().collect();
    let base = s.block(0).interior;
    let diameter = verts.iter().map(|v| dist(base, *v)).fold(0.0, f64::max) * 2.0;
    let radius = opts.radius_factor * diameter;

    // Coordinates adapted to the axis: signed distance and arclength of the foot.
    let frame = axis.frame();
    let frame_inv = frame.inverse();
    let origin = axis.foot(base);
    let origin_height = frame_inv.apply(origin).y();
    let coords = |p: HypPoint| -> (f64, f64) {
        let q = frame_inv.apply(p);
        ((q.x() / q.y()).asinh(), (q.x().hypot(q.y()) / origin_height).ln())
    };
    // Powers of the curve's holonomy move any translate into one period, so
    // the axial window is one period widened by a diameter on each side.
    let inside = |p: HypPoint, reach: f64| -> bool {
        let (r, t) = coords(p);
        r.abs() <= reach && t >= -diameter && t <= period + diameter
    };
    let key = |p: HypPoint| -> (i64, i64) {
        let (r, t) = coords(p);
        ((r * 1e6).round() as i64, (t * 1e6).round() as i64)
    };
    // Translates are expanded nearest-to-the-axis first, so a node cap only
    // discards the far part of the region.
    let priority = |p: HypPoint| -> u64 {
        let (r, t) = coords(p);
        let excess = (-t).max(t - period).max(0.0);
        (r.abs().hypot(excess) * 1e9) as u64
    };

    let gens: Vec<Isometry> = s.holonomy().iter().flat_map(|g| [*g, g.inverse()]).collect();
    let max_len = opts.max_word_length.unwrap_or(2 * d.n_generators());
    let mut per_cone = vec![f64::INFINITY; cones.len()];
    let mut seen = HashSet::new();
    let mut elements = vec![(Isometry::IDENTITY, 0usize)];
    let mut heap = BinaryHeap::from([(Reverse(priority(base)), 0usize)]);
    seen.insert(key(base));
    let mut truncated = false;
    while let Some((_, idx)) = heap.pop() {
        let (g, len) = elements[idx];
        for (i, c) in cones.iter().enumerate() {
            per_cone[i] = per_cone[i].min(dist_to_geodesic(g.apply(*c), &axis));
        }
        if len == max_len || truncated {
            continue;
        }
        // A tile farther than the best margin plus a diameter cannot hold a
        // closer cone point.
        let best = per_cone.iter().copied().fold(f64::INFINITY, f64::min);
        let reach = radius.min(best + diameter);
        for s_ in &gens {
            let next = g * *s_;
            let p = next.apply(base);
            if !inside(p, reach) || !seen.insert(key(p)) {
                continue;
            }
            if seen.len() > opts.max_nodes {
                truncated = true;
                break;
            }
            elements.push((next, len + 1));
            heap.push((Reverse(priority(p)), elements.len() - 1));
        }
    }
    Ok(MarginReport::from_per_cone(per_cone, elements.len(), truncated))
}
