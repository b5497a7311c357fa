//! The tiling of the plane by developed half-blocks, with the adjacency across
//! every tile side. Adjacency is found geometrically among short holonomy
//! words and validated by checking that the neighbours cover each side.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::hyp::{dist, dist_to_geodesic, GeodesicLine, HypPoint, Isometry};

use super::{block::centroid, ConeSurface, Slot, SlotShape};

const ON_LINE_TOL: f64 = 1e-8;
const OVERLAP_TOL: f64 = 1e-9;

/// One developed half-block.
#[derive(Clone, Debug)]
pub struct Tile {
    pub block: usize,
    pub verts: Vec<HypPoint>,
    /// Cone index of each vertex that is a cone point.
    pub cones: Vec<Option<usize>>,
    /// Pants curve carried by each side, for sides on boundary axes.
    pub curves: Vec<Option<usize>>,
}

impl Tile {
    pub fn side(&self, j: usize) -> (HypPoint, HypPoint) {
        (self.verts[j], self.verts[(j + 1) % self.verts.len()])
    }

    pub fn centre(&self) -> HypPoint {
        centroid(&self.verts)
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.verts;
        let mut d: f64 = 0.0;
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                d = d.max(dist(v[a], v[b]));
            }
        }
        d
    }
}

/// The part of a side `[lo, hi]` (arclength from the side's first vertex)
/// shared with `transform` applied to side `side` of tile `tile`.
#[derive(Clone, Copy, Debug)]
pub struct Piece {
    pub tile: usize,
    pub transform: Isometry,
    pub side: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug)]
pub struct Tiling {
    pub tiles: Vec<Tile>,
    /// `neighbours[tile][side]`, ordered by `lo`.
    pub neighbours: Vec<Vec<Vec<Piece>>>,
    /// Holonomy words tried as side pairings.
    pub candidates: Vec<Isometry>,
}

/// The two half-blocks of every block in developed position: the block's own
/// polygon and its mirror image across mirror 0.
pub fn developed_tiles(s: &ConeSurface) -> Vec<Tile> {
    let d = s.decomposition();
    let mut out = Vec::new();
    for (b, slots) in d.blocks().iter().enumerate() {
        let g = s.block(b);
        let mut verts = Vec::new();
        let mut cones = Vec::new();
        let mut curves = Vec::new();
        for k in 0..3 {
            match (g.shapes[k], slots[k]) {
                (SlotShape::Cone(_), Slot::Cone(c)) => {
                    verts.push(g.anchors[k]);
                    cones.push(Some(c));
                    curves.push(None);
                }
                (_, slot) => {
                    let axis = g.ends[k].axis().expect("boundary end is hyperbolic");
                    let next_mirror = g.mirrors[(k + 1) % 3].line();
                    verts.push(g.anchors[k]);
                    verts.push(axis.foot(next_mirror.frame().apply(HypPoint::i())));
                    cones.extend([None, None]);
                    let Slot::Curve(e) = slot else { unreachable!("boundary slot carries a curve") };
                    curves.extend([Some(e), None]);
                }
            }
        }
        let n = verts.len();
        let mirror = g.mirrors[0];
        let mut twin: Vec<HypPoint> = verts.iter().map(|p| mirror.apply(*p)).collect();
        let mut twin_cones = cones.clone();
        twin.reverse();
        twin_cones.reverse();
        // Reversal sends side i to side n - 2 - i.
        let twin_curves = (0..n).map(|j| curves[(2 * n - 2 - j) % n]).collect();
        let place = s.placement(b);
        out.push(Tile { block: b, verts: verts.iter().map(|p| place.apply(*p)).collect(), cones, curves });
        out.push(Tile {
            block: b,
            verts: twin.iter().map(|p| place.apply(*p)).collect(),
            cones: twin_cones,
            curves: twin_curves,
        });
    }
    out
}

#[derive(Default)]
struct UniqueIsometries {
    seen: HashSet<[i64; 4]>,
    list: Vec<Isometry>,
}

impl UniqueIsometries {
    fn push(&mut self, g: Isometry) {
        let key = g.entries().map(|x| (x * 1e7).round() as i64);
        if self.seen.insert(key) {
            self.list.push(g);
        }
    }
}

/// Identity, products of up to two generators, and the same with a power of a
/// boundary holonomy (long enough to absorb the twists) inserted anywhere.
fn candidate_words(s: &ConeSurface) -> Vec<Isometry> {
    let d = s.decomposition();
    let letters: Vec<Isometry> = s.holonomy().iter().flat_map(|g| [*g, g.inverse()]).collect();
    let mut short = vec![Isometry::IDENTITY];
    for a in &letters {
        short.push(*a);
        for b in &letters {
            short.push(*a * *b);
        }
    }
    let mut out = UniqueIsometries::default();
    short.iter().for_each(|g| out.push(*g));
    let coords = s.coords();
    let reach = (0..coords.len()).map(|e| coords.twist(e).abs() / coords.length(e)).fold(0.0, f64::max);
    let k_max = reach.ceil() as i32 + 2;
    for gl in d.gluings() {
        for slot in [gl.near, gl.far] {
            let c = s.holonomy()[super::decomposition::end_generator(slot.block, slot.slot)];
            for k in -k_max..=k_max {
                let ck = c.pow(k);
                for g in &short {
                    out.push(ck * *g);
                    out.push(*g * ck);
                }
                for a in &letters {
                    for b in &letters {
                        out.push(*a * ck * *b);
                    }
                }
            }
        }
    }
    out.list
}

/// Tiles (under candidate transforms) having a side on `line`, on the side of
/// `line` opposite to `away` (or on both sides if `away` is `None`), with the
/// overlap measured in arclength from `from`.
fn pieces_on_line(
    tiles: &[Tile],
    candidates: &[Isometry],
    line: &GeodesicLine,
    from: HypPoint,
    len: f64,
    away: Option<f64>,
) -> Vec<(Piece, f64)> {
    let frame_inv = line.frame().inverse();
    let base_height = frame_inv.apply(from).y();
    let param = |p: HypPoint| (frame_inv.apply(p).y() / base_height).ln();
    let mut out = Vec::new();
    for (q, tile) in tiles.iter().enumerate() {
        let centre = tile.centre();
        for a in candidates {
            let c = a.apply(centre);
            let side_sign = line.signed_distance(c);
            if let Some(sign) = away {
                if side_sign * sign >= 0.0 {
                    continue;
                }
            }
            for j in 0..tile.verts.len() {
                let (u, v) = tile.side(j);
                let (u, v) = (a.apply(u), a.apply(v));
                if dist_to_geodesic(u, line) > ON_LINE_TOL || dist_to_geodesic(v, line) > ON_LINE_TOL {
                    continue;
                }
                let (su, sv) = (param(u), param(v));
                let lo = su.min(sv).max(0.0);
                let hi = su.max(sv).min(len);
                if hi - lo > OVERLAP_TOL {
                    out.push((Piece { tile: q, transform: *a, side: j, lo, hi }, side_sign));
                }
            }
        }
    }
    out.sort_by(|x, y| x.0.lo.total_cmp(&y.0.lo));
    out
}

/// Largest gap left uncovered in `[0, len]` by the intervals.
fn coverage_gap(intervals: impl Iterator<Item = (f64, f64)>, len: f64) -> f64 {
    let mut iv: Vec<(f64, f64)> = intervals.collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reached = 0.0;
    let mut gap: f64 = 0.0;
    for (lo, hi) in iv {
        gap = gap.max(lo - reached);
        reached = f64::max(reached, hi);
    }
    gap.max(len - reached)
}

impl Tiling {
    pub fn new(s: &ConeSurface) -> Result<Tiling> {
        let tiles = developed_tiles(s);
        let candidates = candidate_words(s);
        let mut neighbours = Vec::with_capacity(tiles.len());
        for tile in &tiles {
            let centre = tile.centre();
            let mut per_side = Vec::with_capacity(tile.verts.len());
            for j in 0..tile.verts.len() {
                let (u, v) = tile.side(j);
                let line = GeodesicLine::through(u, v)?;
                let len = dist(u, v);
                let here = line.signed_distance(centre);
                let pieces: Vec<Piece> = pieces_on_line(&tiles, &candidates, &line, u, len, Some(here))
                    .into_iter()
                    .map(|(p, _)| p)
                    .collect();
                let gap = coverage_gap(pieces.iter().map(|p| (p.lo, p.hi)), len);
                if gap > 1e-7 {
                    return Err(Error::Inconsistent(format!(
                        "tiling: side {j} of a tile of block {} has an uncovered stretch of length {gap:.3e}",
                        tile.block
                    )));
                }
                per_side.push(pieces);
            }
            neighbours.push(per_side);
        }
        Ok(Tiling { tiles, neighbours, candidates })
    }

    /// Tiles with a side along the segment of `line` of length `len` starting
    /// at the foot of `from`, with the signed distance of each tile's centre.
    pub fn along(&self, line: &GeodesicLine, from: HypPoint, len: f64) -> Vec<(Piece, f64)> {
        pieces_on_line(&self.tiles, &self.candidates, line, line.foot(from), len, None)
    }

    /// Tile instances whose centre lies within `radius` of `centre`, found by
    /// walking across sides and identified by position. Only meaningful when
    /// the developed tiles do not overlap, i.e. for orbifold angles.
    pub fn instances_near(&self, centre: HypPoint, radius: f64, max_nodes: usize) -> Result<Vec<(usize, Isometry)>> {
        let reach = radius + self.tiles.iter().map(|t| t.diameter()).fold(0.0, f64::max);
        let key = |t: usize, g: &Isometry| {
            let c = g.apply(self.tiles[t].centre());
            (t, (c.x() * 1e7).round() as i64, (c.y() * 1e7).round() as i64)
        };
        let mut seen = HashSet::from([key(0, &Isometry::IDENTITY)]);
        let mut queue = std::collections::VecDeque::from([(0usize, Isometry::IDENTITY)]);
        let mut out = Vec::new();
        while let Some((t, g)) = queue.pop_front() {
            if dist(g.apply(self.tiles[t].centre()), centre) <= radius {
                out.push((t, g));
            }
            for pieces in &self.neighbours[t] {
                for p in pieces {
                    let ng = g * p.transform;
                    if dist(ng.apply(self.tiles[p.tile].centre()), centre) > reach || !seen.insert(key(p.tile, &ng)) {
                        continue;
                    }
                    if seen.len() > max_nodes {
                        return Err(Error::Inconsistent(format!("more than {max_nodes} tiles within {radius:.2}")));
                    }
                    queue.push_back((p.tile, ng));
                }
            }
        }
        Ok(out)
    }

    pub fn coverage_gap(pieces: &[(Piece, f64)], len: f64, sign: f64) -> f64 {
        coverage_gap(pieces.iter().filter(|(_, s)| s * sign > 0.0).map(|(p, _)| (p.lo, p.hi)), len)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::surface::{assemble, BlockDecomposition, ConeAngles, FnCoordinates};

    #[test]
    fn fixtures_tile_without_gaps() {
        let cases = [
            (BlockDecomposition::cone_sphere(4).unwrap(), vec![(1.0, 0.3)], vec![PI / 2.0; 4]),
            (BlockDecomposition::one_cone_torus(), vec![(1.5, 0.3)], vec![PI / 2.0]),
            (BlockDecomposition::cone_sphere(5).unwrap(), vec![(1.0, 2.3), (1.4, -0.2)], vec![1.0, 1.5, 2.0, 2.5, 0.7]),
            (BlockDecomposition::genus_two(), vec![(1.0, 0.1), (1.2, -0.4), (0.9, 0.0)], vec![]),
        ];
        for (d, fnc, ang) in cases {
            let s = assemble(&Arc::new(d), &FnCoordinates::new(&fnc), &ConeAngles::new(ang).unwrap()).unwrap();
            let t = Tiling::new(&s).map_err(|e| format!("{fnc:?} {e}")).unwrap();
            for tile in &t.tiles {
                for (j, c) in tile.curves.iter().enumerate() {
                    if let Some(e) = c {
                        // Each half-block carries half of each boundary curve.
                        let (u, v) = tile.side(j);
                        assert!((dist(u, v) - 0.5 * s.coords().length(*e)).abs() < 1e-9);
                    }
                }
            }
            for (i, sides) in t.neighbours.iter().enumerate() {
                for pieces in sides {
                    assert!(!pieces.is_empty(), "tile {i}");
                }
            }
        }
    }
}
