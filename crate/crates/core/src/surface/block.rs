//! Generalized pants: three slots, each a cone point or a geodesic boundary,
//! built as the double of a polygon cut out by three mirror lines.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::{GeodesicLine, HypPoint, Isometry, Reflection};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotShape {
    /// Cone point of the given total angle.
    Cone(f64),
    /// Geodesic boundary of the given length.
    Boundary(f64),
}

impl SlotShape {
    fn gram_entry(self) -> f64 {
        match self {
            SlotShape::Cone(theta) => -(0.5 * theta).cos(),
            SlotShape::Boundary(l) => -(0.5 * l).cosh(),
        }
    }
}

/// A block placed in standard position. End `k` is `X_k X_{k+1}` for the
/// mirrors `X_0, X_1, X_2`, so `ends[0] ends[1] ends[2] = 1`. Cone ends are
/// counterclockwise rotations; the block lies to the right of every oriented
/// boundary axis.
#[derive(Clone, Debug)]
pub struct BlockGeometry {
    pub shapes: [SlotShape; 3],
    pub mirrors: [Reflection; 3],
    pub ends: [Isometry; 3],
    /// For boundary slots: takes the upward imaginary axis onto the end's axis
    /// and `i` onto the marker where mirror `k` meets that axis.
    pub frames: [Option<Isometry>; 3],
    /// Cone vertex or boundary marker of each slot.
    pub anchors: [HypPoint; 3],
    /// A point in the interior of the block.
    pub interior: HypPoint,
}

fn hyperboloid(p: HypPoint) -> [f64; 3] {
    let (x, y) = (p.x(), p.y());
    let r2 = x * x + y * y;
    [(1.0 + r2) / (2.0 * y), x / y, (r2 - 1.0) / (2.0 * y)]
}

/// Lorentzian barycenter of a set of points.
pub fn centroid(points: &[HypPoint]) -> HypPoint {
    let mut s = [0.0; 3];
    for p in points {
        let h = hyperboloid(*p);
        s.iter_mut().zip(h).for_each(|(a, b)| *a += b);
    }
    let n = (s[0] * s[0] - s[1] * s[1] - s[2] * s[2]).sqrt();
    let den = s[0] - s[2];
    HypPoint::new(s[1] / den, n / den).expect("barycenter of hyperboloid points lies on the upper sheet")
}

fn check_shape(s: SlotShape) -> Result<()> {
    match s {
        SlotShape::Cone(t) if !(t > 0.0 && t < PI) => {
            Err(Error::InvalidInput(format!("cone angle {t} outside (0, pi)")))
        }
        SlotShape::Boundary(l) if !(l > 0.0 && l.is_finite()) => {
            Err(Error::InvalidInput(format!("boundary length {l} must be positive")))
        }
        _ => Ok(()),
    }
}

/// Three unit spacelike vectors of R^{2,1} with pairings `g01`, `g12`, `g20`,
/// found by Gram-Schmidt against the form diag(1, 1, -1), then read as
/// traceless matrices [[p, s + t], [s - t, -p]].
fn mirrors_from_gram(shapes: &[SlotShape; 3]) -> Result<[Reflection; 3]> {
    let (g01, g12, g20) = (shapes[0].gram_entry(), shapes[1].gram_entry(), shapes[2].gram_entry());
    let q = 1.0 - g01 * g01;
    let (x1, x2) = if q > 0.0 {
        let r = q.sqrt();
        let alpha = (g12 - g01 * g20) / r;
        let beta2 = g20 * g20 + alpha * alpha - 1.0;
        ([g01, r, 0.0], (alpha, beta2, true))
    } else {
        let r = (-q).sqrt();
        let alpha = (g01 * g20 - g12) / r;
        let beta2 = 1.0 - g20 * g20 + alpha * alpha;
        ([g01, 0.0, r], (alpha, beta2, false))
    };
    let (alpha, beta2, spacelike_first) = x2;
    if !(beta2 > 1e-14) {
        return Err(Error::Existence(format!(
            "slot data {shapes:?} has no hyperbolic realization; \
             three cone slots need half-angles summing below pi"
        )));
    }
    let beta = beta2.sqrt();
    let x2 = if spacelike_first { [g20, alpha, beta] } else { [g20, beta, alpha] };
    let vecs = [[1.0, 0.0, 0.0], x1, x2];
    let mut out = Vec::with_capacity(3);
    for [p, s, t] in vecs {
        out.push(Reflection::from_traceless(p, s + t, s - t)?);
    }
    Ok([out[0], out[1], out[2]])
}

fn mirror_flip(x: &Reflection) -> Reflection {
    let [a, b, c, _] = x.matrix();
    Reflection::from_traceless(a, -b, -c).expect("conjugating a reflection gives a reflection")
}

struct Oriented {
    cone_ok: Vec<bool>,
    side_ok: Vec<bool>,
}

fn analyse(shapes: &[SlotShape; 3], mirrors: &[Reflection; 3]) -> Result<(BlockGeometry, Oriented)> {
    let ends = [mirrors[0].compose(&mirrors[1]), mirrors[1].compose(&mirrors[2]), mirrors[2].compose(&mirrors[0])];
    let mut anchors = [HypPoint::i(); 3];
    let mut axes: [Option<GeodesicLine>; 3] = [None; 3];
    for k in 0..3 {
        match shapes[k] {
            SlotShape::Cone(_) => anchors[k] = ends[k].fixed_point()?,
            SlotShape::Boundary(_) => {
                let ax = ends[k].axis()?;
                let on_mirror = mirrors[k].line().frame().apply(HypPoint::i());
                anchors[k] = ax.foot(on_mirror);
                axes[k] = Some(ax);
            }
        }
    }
    let interior = centroid(&anchors);
    let mut oriented = Oriented { cone_ok: vec![], side_ok: vec![] };
    let mut frames = [None; 3];
    for k in 0..3 {
        match shapes[k] {
            SlotShape::Cone(theta) => {
                let angle = ends[k].rotation_angle()?;
                oriented.cone_ok.push((angle - theta).abs() < (angle - (TAU - theta)).abs());
            }
            SlotShape::Boundary(_) => {
                let ax = axes[k].expect("boundary slot has an axis");
                oriented.side_ok.push(ax.signed_distance(interior) > 0.0);
                let f = ax.frame();
                let y0 = f.inverse().apply(anchors[k]).y();
                let s = y0.sqrt();
                frames[k] = Some(f * Isometry::from_raw([s, 0.0, 0.0, 1.0 / s]));
            }
        }
    }
    let geom = BlockGeometry { shapes: *shapes, mirrors: *mirrors, ends, frames, anchors, interior };
    Ok((geom, oriented))
}

pub fn build_block(shapes: [SlotShape; 3]) -> Result<BlockGeometry> {
    for s in shapes {
        check_shape(s)?;
    }
    let raw = mirrors_from_gram(&shapes)?;
    // Recentre so the block sits around i; keeps matrix entries small.
    let (g0, _) = analyse(&shapes, &raw)?;
    let c = Isometry::point_frame(g0.interior).inverse();
    let mirrors = raw.map(|x| x.conjugate_by(&c));
    let (geom, o) = analyse(&shapes, &mirrors)?;
    let wrong = match (o.cone_ok.first(), o.side_ok.first()) {
        (Some(ok), _) => !ok,
        (None, Some(ok)) => !ok,
        (None, None) => unreachable!("a block has three slots"),
    };
    let (geom, o) = if wrong {
        let flipped = [mirror_flip(&mirrors[0]), mirror_flip(&mirrors[1]), mirror_flip(&mirrors[2])];
        analyse(&shapes, &flipped)?
    } else {
        (geom, o)
    };
    if o.cone_ok.iter().chain(&o.side_ok).any(|ok| !ok) {
        return Err(Error::Existence(format!("block {shapes:?} has inconsistent end orientations")));
    }
    Ok(geom)
}

/// Two cone points of angles `theta1`, `theta2` (fixed points of `A`, `B`) and a
/// boundary of length `l` (axis of `C`), with `A B C = 1`, normalized so the
/// fixed point of `A` is `i` and that of `B` lies above it on the imaginary axis.
pub fn build_cone_pants(theta1: f64, theta2: f64, l: f64) -> Result<[Isometry; 3]> {
    let g = build_block([SlotShape::Cone(theta1), SlotShape::Cone(theta2), SlotShape::Boundary(l)])?;
    let (p1, p2) = (g.anchors[0], g.anchors[1]);
    let line = GeodesicLine::through(p1, p2)?;
    let f = line.frame();
    let s = f.inverse().apply(p1).y().sqrt();
    let n = (f * Isometry::from_raw([s, 0.0, 0.0, 1.0 / s])).inverse();
    Ok(g.ends.map(|e| e.conjugate_by(&n)))
}

/// Pants with geodesic boundaries of the given lengths; the three ends multiply to 1.
pub fn build_pants(l1: f64, l2: f64, l3: f64) -> Result<[Isometry; 3]> {
    Ok(build_block([SlotShape::Boundary(l1), SlotShape::Boundary(l2), SlotShape::Boundary(l3)])?.ends)
}
