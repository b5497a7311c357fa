//! Area: the Gauss-Bonnet value and an independent quadrature over the
//! developed fundamental domain.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::hyp::{dist, HypPoint, Isometry};

use super::block::centroid;
use super::tiling::developed_tiles;
use super::ConeSurface;

/// `sum(2 pi - theta_i) - 2 pi chi` for a closed surface of the given genus.
pub fn gauss_bonnet_area(angles: &[f64], genus: usize) -> Result<f64> {
    let chi = 2.0 - 2.0 * genus as f64;
    let a = angles.iter().map(|t| TAU - t).sum::<f64>() - TAU * chi;
    if !(a > 0.0) {
        return Err(Error::NoHyperbolicStructure(format!("Gauss-Bonnet area {a} is not positive")));
    }
    Ok(a)
}

/// The two mirror-image polygons of every block, in developed position. Their
/// union is a fundamental domain for the surface.
pub fn developed_polygons(s: &ConeSurface) -> Vec<Vec<HypPoint>> {
    developed_tiles(s).into_iter().map(|t| t.verts).collect()
}

fn to_klein(p: HypPoint) -> [f64; 2] {
    let (u, v) = p.to_disk();
    let f = 2.0 / (1.0 + u * u + v * v);
    [f * u, f * v]
}

// Degree-5 seven-point rule on the reference triangle (barycentric weights).
const TRI_RULE: [(f64, f64, f64, f64); 7] = {
    const A1: f64 = 0.059715871789769820;
    const B1: f64 = 0.470142064105115090;
    const A2: f64 = 0.797426985353087322;
    const B2: f64 = 0.101286507323456339;
    const W0: f64 = 0.225;
    const W1: f64 = 0.132394152788506181;
    const W2: f64 = 0.125939180544827153;
    [
        (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, W0),
        (A1, B1, B1, W1),
        (B1, A1, B1, W1),
        (B1, B1, A1, W1),
        (A2, B2, B2, W2),
        (B2, A2, B2, W2),
        (B2, B2, A2, W2),
    ]
};

fn klein_density(p: [f64; 2]) -> f64 {
    (1.0 - p[0] * p[0] - p[1] * p[1]).powf(-1.5)
}

fn tri_integral(a: [f64; 2], b: [f64; 2], c: [f64; 2], depth: u32) -> f64 {
    if depth > 0 {
        let mid = |p: [f64; 2], q: [f64; 2]| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        return tri_integral(a, ab, ca, depth - 1)
            + tri_integral(ab, b, bc, depth - 1)
            + tri_integral(ca, bc, c, depth - 1)
            + tri_integral(ab, bc, ca, depth - 1);
    }
    let jac = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs();
    TRI_RULE
        .iter()
        .map(|&(x, y, z, w)| {
            let p = [x * a[0] + y * b[0] + z * c[0], x * a[1] + y * b[1] + z * c[1]];
            w * klein_density(p)
        })
        .sum::<f64>()
        * jac
}

/// Hyperbolic area of a convex geodesic polygon by quadrature of the area form
/// in the Klein model over a fan triangulation. The polygon is first moved so
/// its centroid sits at the centre of the disk.
pub fn polygon_area_quadrature(poly: &[HypPoint], depth: u32) -> f64 {
    let recentre = Isometry::point_frame(centroid(poly)).inverse();
    let k: Vec<[f64; 2]> = poly.iter().map(|p| to_klein(recentre.apply(*p))).collect();
    (1..k.len() - 1).map(|i| tri_integral(k[0], k[i], k[i + 1], depth)).sum()
}

/// Hyperbolic area of a convex geodesic polygon from the angle defects of a
/// fan triangulation.
pub fn polygon_area_defect(poly: &[HypPoint]) -> f64 {
    let angle = |opp: f64, s1: f64, s2: f64| {
        ((s1.cosh() * s2.cosh() - opp.cosh()) / (s1.sinh() * s2.sinh())).clamp(-1.0, 1.0).acos()
    };
    (1..poly.len() - 1)
        .map(|i| {
            let (p, q, r) = (poly[0], poly[i], poly[i + 1]);
            let (a, b, c) = (dist(q, r), dist(p, r), dist(p, q));
            PI - angle(a, b, c) - angle(b, a, c) - angle(c, a, b)
        })
        .sum()
}

/// Total quadrature area of the developed fundamental domain.
pub fn triangulated_area(s: &ConeSurface, depth: u32) -> f64 {
    developed_polygons(s).iter().map(|p| polygon_area_quadrature(p, depth)).sum()
}
