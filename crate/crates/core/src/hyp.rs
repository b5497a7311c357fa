//! Upper half-plane geometry: points, boundary points, oriented geodesics,
//! PSL(2,R) isometries and reflections.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `| |tr| - 2 |` below which an isometry is reported parabolic.
pub const PARABOLIC_TOL: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct HypPoint {
    x: f64,
    y: f64,
}

impl HypPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidInput(format!("point ({x}, {y}) is not in the upper half-plane")));
        }
        Ok(HypPoint { x, y })
    }

    pub(crate) fn new_unchecked(x: f64, y: f64) -> Self {
        debug_assert!(y > 0.0, "y = {y}");
        HypPoint { x, y }
    }

    pub fn i() -> Self {
        HypPoint { x: 0.0, y: 1.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Image in the Poincare disk under the Cayley map z -> (z - i)/(z + i).
    pub fn to_disk(&self) -> (f64, f64) {
        let (x, y) = (self.x, self.y);
        let den = x * x + (y + 1.0) * (y + 1.0);
        ((x * x + y * y - 1.0) / den, -2.0 * x / den)
    }
}

impl TryFrom<[f64; 2]> for HypPoint {
    type Error = Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        HypPoint::new(v[0], v[1])
    }
}

impl From<HypPoint> for [f64; 2] {
    fn from(p: HypPoint) -> Self {
        [p.x, p.y]
    }
}

pub fn dist(p: HypPoint, q: HypPoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    2.0 * ((dx * dx + dy * dy).sqrt() / (2.0 * (p.y * q.y).sqrt())).asinh()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

/// Unit homogeneous coordinates (u, v) of a point u/v of RP^1, with v >= 0.
type Homog = [f64; 2];

fn homog_normalize(h: Homog) -> Homog {
    let n = h[0].hypot(h[1]);
    let (u, v) = (h[0] / n, h[1] / n);
    if v < 0.0 || (v == 0.0 && u < 0.0) {
        [-u, -v]
    } else {
        [u, v]
    }
}

/// |sin| of the angle between two homogeneous points; zero iff they coincide.
fn homog_gap(p: Homog, q: Homog) -> f64 {
    (p[0] * q[1] - p[1] * q[0]).abs()
}

impl BoundaryPoint {
    fn homog(self) -> Homog {
        match self {
            BoundaryPoint::Finite(x) => homog_normalize([x, 1.0]),
            BoundaryPoint::Infinity => [1.0, 0.0],
        }
    }

    fn from_homog(h: Homog) -> Self {
        if h[1].abs() <= 1e-15 * h[0].abs() {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(h[0] / h[1])
        }
    }
}

/// Oriented complete geodesic, stored by its ideal endpoints.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(try_from = "LineRepr", into = "LineRepr")]
pub struct GeodesicLine {
    start: Homog,
    end: Homog,
}

#[derive(Serialize, Deserialize)]
struct LineRepr {
    start: BoundaryPoint,
    end: BoundaryPoint,
}

impl TryFrom<LineRepr> for GeodesicLine {
    type Error = Error;
    fn try_from(r: LineRepr) -> Result<Self> {
        GeodesicLine::new(r.start, r.end)
    }
}

impl From<GeodesicLine> for LineRepr {
    fn from(g: GeodesicLine) -> Self {
        LineRepr { start: g.start(), end: g.end() }
    }
}

impl GeodesicLine {
    pub fn new(start: BoundaryPoint, end: BoundaryPoint) -> Result<Self> {
        let (s, e) = (start.homog(), end.homog());
        if !(s[0].is_finite() && e[0].is_finite()) || homog_gap(s, e) < 1e-14 {
            return Err(Error::InvalidInput("geodesic endpoints must be distinct".into()));
        }
        Ok(GeodesicLine { start: s, end: e })
    }

    fn from_homog(start: Homog, end: Homog) -> Self {
        GeodesicLine { start: homog_normalize(start), end: homog_normalize(end) }
    }

    /// The imaginary axis, oriented from 0 to infinity.
    pub fn imaginary_axis() -> Self {
        GeodesicLine { start: [0.0, 1.0], end: [1.0, 0.0] }
    }

    /// The geodesic through two distinct points, oriented from `p` to `q`.
    pub fn through(p: HypPoint, q: HypPoint) -> Result<Self> {
        if dist(p, q) < 1e-14 {
            return Err(Error::InvalidInput("points coincide".into()));
        }
        // Move p to i, then q onto the imaginary axis above i.
        let f = Isometry::point_frame(p);
        let q1 = f.inverse().apply(q);
        // Rotation about i taking q1 onto the upward imaginary axis.
        let w = q1.to_disk();
        let phi = w.1.atan2(w.0);
        // In the disk the upward axis from 0 points along (1, 0).
        let r = rotation_about(HypPoint::i(), -phi);
        let g = f * r.inverse();
        Ok(GeodesicLine::imaginary_axis().image(&g))
    }

    pub fn start(&self) -> BoundaryPoint {
        BoundaryPoint::from_homog(self.start)
    }

    pub fn end(&self) -> BoundaryPoint {
        BoundaryPoint::from_homog(self.end)
    }

    pub fn reversed(&self) -> Self {
        GeodesicLine { start: self.end, end: self.start }
    }

    /// Unoriented canonical form: finite endpoints ordered increasingly, infinity last.
    pub fn canonical(&self) -> (BoundaryPoint, BoundaryPoint) {
        let (a, b) = (self.start(), self.end());
        match (a, b) {
            (BoundaryPoint::Infinity, _) => (b, a),
            (BoundaryPoint::Finite(x), BoundaryPoint::Finite(y)) if y < x => (b, a),
            _ => (a, b),
        }
    }

    /// Endpoint distance to another oriented line (0 iff equal with orientation).
    pub fn oriented_gap(&self, other: &GeodesicLine) -> f64 {
        homog_gap(self.start, other.start).max(homog_gap(self.end, other.end))
    }

    /// Endpoint distance ignoring orientation.
    pub fn unoriented_gap(&self, other: &GeodesicLine) -> f64 {
        self.oriented_gap(other).min(self.oriented_gap(&other.reversed()))
    }

    /// An isometry taking the imaginary axis (0 -> infinity) onto this line.
    pub fn frame(&self) -> Isometry {
        let (s, e) = (self.start, self.end);
        let det = e[0] * s[1] - s[0] * e[1];
        let sgn = if det < 0.0 { -1.0 } else { 1.0 };
        Isometry::from_raw([e[0], sgn * s[0], e[1], sgn * s[1]])
    }

    pub fn image(&self, f: &Isometry) -> Self {
        GeodesicLine::from_homog(f.apply_homog(self.start), f.apply_homog(self.end))
    }

    /// Signed distance from `p`: positive on the right of the line when
    /// traversed from start to end.
    pub fn signed_distance(&self, p: HypPoint) -> f64 {
        let q = self.frame().inverse().apply(p);
        (q.x / q.y).asinh()
    }

    /// Orthogonal projection of `p` onto the line.
    pub fn foot(&self, p: HypPoint) -> HypPoint {
        let f = self.frame();
        let q = f.inverse().apply(p);
        f.apply(HypPoint::new_unchecked(0.0, q.x.hypot(q.y)))
    }

    /// Point at signed arclength `s` from the foot of `base`.
    pub fn point_at(&self, base: HypPoint, s: f64) -> HypPoint {
        let f = self.frame();
        let q = f.inverse().apply(base);
        f.apply(HypPoint::new_unchecked(0.0, q.x.hypot(q.y) * s.exp()))
    }

    pub fn contains(&self, p: HypPoint, tol: f64) -> bool {
        dist_to_geodesic(p, self) <= tol
    }

    pub fn intersection(&self, other: &GeodesicLine) -> Option<HypPoint> {
        let r = Reflection::across(self).compose(&Reflection::across(other));
        match r.classify() {
            IsometryClass::Elliptic { .. } => r.fixed_point().ok(),
            _ => None,
        }
    }
}

impl PartialEq for GeodesicLine {
    fn eq(&self, other: &Self) -> bool {
        self.oriented_gap(other) < 1e-12
    }
}

pub fn dist_to_geodesic(p: HypPoint, g: &GeodesicLine) -> f64 {
    g.signed_distance(p).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum IsometryClass {
    Identity,
    Elliptic { angle: f64 },
    Parabolic,
    Hyperbolic { length: f64 },
}

impl IsometryClass {
    pub fn name(&self) -> &'static str {
        match self {
            IsometryClass::Identity => "identity",
            IsometryClass::Elliptic { .. } => "elliptic",
            IsometryClass::Parabolic => "parabolic",
            IsometryClass::Hyperbolic { .. } => "hyperbolic",
        }
    }
}

impl fmt::Display for IsometryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsometryClass::Elliptic { angle } => write!(f, "elliptic({angle})"),
            IsometryClass::Hyperbolic { length } => write!(f, "hyperbolic({length})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Orientation-preserving isometry of H^2: a unimodular real matrix modulo sign,
/// stored row-major with the first nonzero entry positive.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Isometry {
    m: [f64; 4],
}

impl TryFrom<[f64; 4]> for Isometry {
    type Error = Error;
    /// Entries already unimodular to 1e-12 are kept bit-for-bit, so serialized
    /// isometries round-trip exactly.
    fn try_from(v: [f64; 4]) -> Result<Self> {
        let det = v[0] * v[3] - v[1] * v[2];
        if (det - 1.0).abs() <= 1e-12 {
            return Ok(Isometry { m: sign_canonical(v) });
        }
        Isometry::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Isometry> for [f64; 4] {
    fn from(f: Isometry) -> Self {
        f.m
    }
}

fn sign_canonical(mut m: [f64; 4]) -> [f64; 4] {
    if let Some(first) = m.iter().find(|x| **x != 0.0) {
        if *first < 0.0 {
            m.iter_mut().for_each(|x| *x = -*x);
        }
    }
    m
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry { m: [1.0, 0.0, 0.0, 1.0] };

    /// Normalizes a matrix with positive determinant.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::InvalidInput(format!("matrix determinant {det} is not positive")));
        }
        Ok(Isometry::from_raw([a, b, c, d]))
    }

    /// Entries must already be unimodular and sign-canonical.
    pub(crate) const fn from_const(m: [f64; 4]) -> Self {
        Isometry { m }
    }

    pub(crate) fn from_raw(m: [f64; 4]) -> Self {
        let det = m[0] * m[3] - m[1] * m[2];
        let s = 1.0 / det.sqrt();
        Isometry { m: sign_canonical([m[0] * s, m[1] * s, m[2] * s, m[3] * s]) }
    }

    pub fn entries(&self) -> [f64; 4] {
        self.m
    }

    pub fn det(&self) -> f64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn trace(&self) -> f64 {
        self.m[0] + self.m[3]
    }

    pub fn abs_trace(&self) -> f64 {
        self.trace().abs()
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.m;
        Isometry { m: sign_canonical([d, -b, -c, a]) }
    }

    pub fn compose(&self, g: &Isometry) -> Self {
        let [a, b, c, d] = self.m;
        let [e, f, g2, h] = g.m;
        Isometry::from_raw([a * e + b * g2, a * f + b * h, c * e + d * g2, c * f + d * h])
    }

    pub fn conjugate_by(&self, g: &Isometry) -> Self {
        *g * *self * g.inverse()
    }

    pub fn pow(&self, n: i32) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        (0..n.unsigned_abs()).fold(Isometry::IDENTITY, |acc, _| acc * base)
    }

    /// Sign-insensitive max-entry distance.
    pub fn distance(&self, other: &Isometry) -> f64 {
        let plus = self.m.iter().zip(&other.m).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let minus = self.m.iter().zip(&other.m).map(|(x, y)| (x + y).abs()).fold(0.0, f64::max);
        plus.min(minus)
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn distance_to_identity(&self) -> f64 {
        self.distance(&Isometry::IDENTITY)
    }

    pub fn apply(&self, p: HypPoint) -> HypPoint {
        let [a, b, c, d] = self.m;
        let (x, y) = (p.x, p.y);
        let (nr, ni) = (a * x + b, a * y);
        let (dr, di) = (c * x + d, c * y);
        let m2 = dr * dr + di * di;
        HypPoint::new_unchecked((nr * dr + ni * di) / m2, self.det() * y / m2)
    }

    fn apply_homog(&self, h: Homog) -> Homog {
        let [a, b, c, d] = self.m;
        [a * h[0] + b * h[1], c * h[0] + d * h[1]]
    }

    pub fn apply_boundary(&self, p: BoundaryPoint) -> BoundaryPoint {
        BoundaryPoint::from_homog(homog_normalize(self.apply_homog(p.homog())))
    }

    /// `tr^2 - 4`, evaluated in the better-conditioned of two equivalent forms.
    fn discriminant(&self) -> f64 {
        let [a, b, c, d] = self.m;
        let t = a + d;
        if t.abs() > 3.0 {
            t * t - 4.0
        } else {
            (a - d) * (a - d) + 4.0 * b * c
        }
    }

    pub fn classify(&self) -> IsometryClass {
        if self.distance_to_identity() <= IDENTITY_TOL {
            return IsometryClass::Identity;
        }
        let t = self.abs_trace();
        if (t - 2.0).abs() <= PARABOLIC_TOL {
            return IsometryClass::Parabolic;
        }
        let disc = self.discriminant();
        if t < 2.0 {
            let c = self.m[2];
            let half = 0.5 * self.trace();
            let s = if half.abs() < 0.9 {
                ((1.0 - half) * (1.0 + half)).sqrt()
            } else {
                (-disc).max(0.0).sqrt() * 0.5
            };
            // Derivative at the fixed point is (c z0 + d)^(-2), c z0 + d = tr/2 + i sgn(c) s.
            let arg = (c.signum() * s).atan2(self.trace() * 0.5);
            IsometryClass::Elliptic { angle: (-2.0 * arg).rem_euclid(TAU) }
        } else {
            IsometryClass::Hyperbolic { length: 2.0 * (disc.max(0.0).sqrt() * 0.5).asinh() }
        }
    }

    pub fn translation_length(&self) -> Result<f64> {
        match self.classify() {
            IsometryClass::Hyperbolic { length } => Ok(length),
            other => Err(Error::ClassMismatch { expected: "hyperbolic", found: other.to_string() }),
        }
    }

    pub fn rotation_angle(&self) -> Result<f64> {
        match self.classify() {
            IsometryClass::Elliptic { angle } => Ok(angle),
            other => Err(Error::ClassMismatch { expected: "elliptic", found: other.to_string() }),
        }
    }

    pub fn fixed_point(&self) -> Result<HypPoint> {
        let class = self.classify();
        if !matches!(class, IsometryClass::Elliptic { .. }) {
            return Err(Error::ClassMismatch { expected: "elliptic", found: class.to_string() });
        }
        let [a, _, c, d] = self.m;
        let s = (-self.discriminant()).max(0.0).sqrt();
        Ok(HypPoint::new_unchecked((a - d) / (2.0 * c), s / (2.0 * c.abs())))
    }

    /// Translation axis, oriented from the repelling to the attracting fixed point.
    pub fn axis(&self) -> Result<GeodesicLine> {
        let class = self.classify();
        if !matches!(class, IsometryClass::Hyperbolic { .. }) {
            return Err(Error::ClassMismatch { expected: "hyperbolic", found: class.to_string() });
        }
        let t = self.trace();
        let sq = self.discriminant().max(0.0).sqrt();
        let big = 0.5 * (t + t.signum() * sq);
        let small = 1.0 / big;
        Ok(GeodesicLine::from_homog(self.eigenvector(small), self.eigenvector(big)))
    }

    fn eigenvector(&self, lambda: f64) -> Homog {
        let [a, b, c, d] = self.m;
        let v1 = [b, lambda - a];
        let v2 = [lambda - d, c];
        if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) {
            v1
        } else {
            v2
        }
    }

    /// An isometry taking i to `p` (x + y z).
    pub(crate) fn point_frame(p: HypPoint) -> Isometry {
        let s = p.y.sqrt();
        Isometry::from_raw([s, p.x / s, 0.0, 1.0 / s])
    }
}

impl Mul for Isometry {
    type Output = Isometry;
    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(&rhs)
    }
}

impl PartialEq for Isometry {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, 1e-12)
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.m;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

pub fn classify(f: &Isometry) -> IsometryClass {
    f.classify()
}

pub fn compose(f: &Isometry, g: &Isometry) -> Isometry {
    f.compose(g)
}

/// Counterclockwise rotation by `theta` about `p`.
pub fn rotation_about(p: HypPoint, theta: f64) -> Isometry {
    let (s, c) = (0.5 * theta).sin_cos();
    let r = Isometry::from_raw([c, s, -s, c]);
    let f = Isometry::point_frame(p);
    f * r * f.inverse()
}

/// Translation by signed length `l` along `g` (positive moves towards the end point).
pub fn translation_along(g: &GeodesicLine, l: f64) -> Isometry {
    let f = g.frame();
    let e = (0.5 * l).exp();
    f * Isometry::from_raw([e, 0.0, 0.0, 1.0 / e]) * f.inverse()
}

pub fn axis(f: &Isometry) -> Result<GeodesicLine> {
    f.axis()
}

pub fn fixed_point(f: &Isometry) -> Result<HypPoint> {
    f.fixed_point()
}

/// Orientation-reversing isometry z -> (a conj(z) + b)/(c conj(z) + d) with det = -1.
#[derive(Clone, Copy, Debug)]
pub struct Reflection {
    m: [f64; 4],
}

impl Reflection {
    /// From a traceless matrix [[alpha, beta], [gamma, -alpha]] with alpha^2 + beta gamma > 0.
    pub fn from_traceless(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let q = alpha * alpha + beta * gamma;
        if !(q > 0.0) {
            return Err(Error::InvalidInput("traceless matrix is not a reflection".into()));
        }
        let s = 1.0 / q.sqrt();
        Ok(Reflection { m: [alpha * s, beta * s, gamma * s, -alpha * s] })
    }

    pub fn across(g: &GeodesicLine) -> Self {
        let f = g.frame();
        let [a, b, c, d] = f.m;
        // f diag(-1, 1) f^{-1}
        let m = [-a * d - b * c, 2.0 * a * b, -2.0 * c * d, b * c + a * d];
        Reflection { m }
    }

    pub fn matrix(&self) -> [f64; 4] {
        self.m
    }

    pub fn apply(&self, p: HypPoint) -> HypPoint {
        let [a, b, c, d] = self.m;
        let (x, y) = (p.x, -p.y);
        let (nr, ni) = (a * x + b, a * y);
        let (dr, di) = (c * x + d, c * y);
        let m2 = dr * dr + di * di;
        HypPoint::new_unchecked((nr * dr + ni * di) / m2, -y / m2)
    }

    /// The mirror line; orientation runs from the -1 to the +1 eigendirection.
    pub fn line(&self) -> GeodesicLine {
        let [a, b, c, d] = self.m;
        let eig = |l: f64| {
            let v1 = [b, l - a];
            let v2 = [l - d, c];
            if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) {
                v1
            } else {
                v2
            }
        };
        GeodesicLine::from_homog(eig(-1.0), eig(1.0))
    }

    /// self after other.
    pub fn compose(&self, other: &Reflection) -> Isometry {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = other.m;
        Isometry::from_raw([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn conjugate_by(&self, g: &Isometry) -> Reflection {
        let [a, b, c, d] = g.m;
        let gi = [d, -b, -c, a];
        let mul = |x: [f64; 4], y: [f64; 4]| {
            [
                x[0] * y[0] + x[1] * y[2],
                x[0] * y[1] + x[1] * y[3],
                x[2] * y[0] + x[3] * y[2],
                x[2] * y[1] + x[3] * y[3],
            ]
        };
        Reflection { m: mul(mul(g.m, self.m), gi) }
    }

    /// Lorentzian pairing 1/2 tr(X Y); equals -cos(angle) or -cosh(distance) up to sign.
    pub fn pairing(&self, other: &Reflection) -> f64 {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = other.m;
        0.5 * (a * e + b * g + c * f + d * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rot_i(theta: f64) -> Isometry {
        let (s, c) = (0.5 * theta).sin_cos();
        Isometry::new(c, s, -s, c).unwrap()
    }

    #[test]
    fn classify_standard_forms() {
        for &theta in &[0.3, PI / 2.0, 2.0, PI, 4.0, 6.0] {
            match rot_i(theta).classify() {
                IsometryClass::Elliptic { angle } => assert!((angle - theta).abs() < 1e-12, "{angle} vs {theta}"),
                other => panic!("{other}"),
            }
        }
        let l: f64 = 1.7;
        let h = Isometry::new((l / 2.0).exp(), 0.0, 0.0, (-l / 2.0).exp()).unwrap();
        assert!((h.translation_length().unwrap() - l).abs() < 1e-12);
        assert_eq!(Isometry::new(1.0, 1.0, 0.0, 1.0).unwrap().classify(), IsometryClass::Parabolic);
        assert_eq!(Isometry::IDENTITY.classify(), IsometryClass::Identity);
    }

    #[test]
    fn elliptic_angle_is_counterclockwise() {
        // A small counterclockwise rotation about i moves 2i towards negative x.
        let r = rotation_about(HypPoint::i(), 0.1);
        let p = r.apply(HypPoint::new(0.0, 2.0).unwrap());
        assert!(p.x() < 0.0);
    }

    #[test]
    fn rotation_about_matches_standard_matrix() {
        let r = rotation_about(HypPoint::i(), 1.1);
        assert!(r.approx_eq(&rot_i(1.1), 1e-15));
        let eps = 1e-3;
        let p = HypPoint::new(0.4, 1.3).unwrap();
        let id = rotation_about(p, TAU - eps) * rotation_about(p, eps);
        assert_eq!(id.classify(), IsometryClass::Identity);
    }

    #[test]
    fn rotation_about_2i_is_conjugate() {
        // The dilation z -> 2z takes i to 2i.
        let t = Isometry::new(2f64.sqrt(), 0.0, 0.0, 1.0 / 2f64.sqrt()).unwrap();
        let expect = t * rot_i(PI / 2.0) * t.inverse();
        let got = rotation_about(HypPoint::new(0.0, 2.0).unwrap(), PI / 2.0);
        assert!(got.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn fixed_point_and_axis() {
        let p = HypPoint::new(-0.7, 0.4).unwrap();
        let r = rotation_about(p, 2.5);
        let q = r.fixed_point().unwrap();
        assert!(dist(p, q) < 1e-12);
        let g = GeodesicLine::new(BoundaryPoint::Finite(3.0), BoundaryPoint::Finite(-1.0)).unwrap();
        let t = translation_along(&g, 0.8);
        assert!(t.axis().unwrap().oriented_gap(&g) < 1e-12);
        assert!(t.inverse().axis().unwrap().oriented_gap(&g.reversed()) < 1e-12);
        assert!(rotation_about(p, 1.0).axis().is_err());
        assert!(t.fixed_point().is_err());
    }

    #[test]
    fn translation_along_imaginary_axis() {
        let l: f64 = 0.9;
        let t = translation_along(&GeodesicLine::imaginary_axis(), l);
        let e = Isometry::new((l / 2.0).exp(), 0.0, 0.0, (-l / 2.0).exp()).unwrap();
        assert!(t.approx_eq(&e, 1e-14));
        let g = GeodesicLine::new(BoundaryPoint::Infinity, BoundaryPoint::Finite(2.0)).unwrap();
        let back = translation_along(&g, 1.3) * translation_along(&g, -1.3);
        assert_eq!(back.classify(), IsometryClass::Identity);
    }

    #[test]
    fn distances() {
        let i = HypPoint::i();
        assert!((dist(i, HypPoint::new(0.0, 1f64.exp()).unwrap()) - 1.0).abs() < 1e-15);
        let ax = GeodesicLine::imaginary_axis();
        assert!(dist_to_geodesic(i, &ax) < 1e-15);
        let p = HypPoint::new(1.0, 1.0).unwrap();
        // Independent oracle: minimize dist(p, i e^s) over s by golden section.
        let f = |s: f64| dist(p, HypPoint::new(0.0, s.exp()).unwrap());
        let (mut lo, mut hi) = (-5.0, 5.0);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if f(a) < f(b) {
                hi = b
            } else {
                lo = a
            }
        }
        let oracle = f(0.5 * (lo + hi));
        assert!((dist_to_geodesic(p, &ax) - oracle).abs() < 1e-10);
        assert!((oracle - 1f64.asinh()).abs() < 1e-10);
    }

    #[test]
    fn signed_distance_side() {
        // Upward imaginary axis: points with x > 0 are on the right.
        let ax = GeodesicLine::imaginary_axis();
        assert!(ax.signed_distance(HypPoint::new(1.0, 1.0).unwrap()) > 0.0);
        assert!(ax.reversed().signed_distance(HypPoint::new(1.0, 1.0).unwrap()) < 0.0);
    }

    #[test]
    fn line_through_points() {
        let p = HypPoint::new(0.3, 0.7).unwrap();
        let q = HypPoint::new(-1.2, 2.1).unwrap();
        let g = GeodesicLine::through(p, q).unwrap();
        assert!(dist_to_geodesic(p, &g) < 1e-12);
        assert!(dist_to_geodesic(q, &g) < 1e-12);
        // Orientation: moving along the line from p's foot by +d(p,q) reaches q.
        let r = g.point_at(p, dist(p, q));
        assert!(dist(r, q) < 1e-10);
    }

    #[test]
    fn reflections() {
        let g = GeodesicLine::new(BoundaryPoint::Finite(-2.0), BoundaryPoint::Finite(1.0)).unwrap();
        let x = Reflection::across(&g);
        assert!(x.line().unoriented_gap(&g) < 1e-12);
        let p = HypPoint::new(0.1, 0.2).unwrap();
        let q = x.apply(p);
        assert!(dist(x.apply(q), p) < 1e-12);
        assert!((g.signed_distance(p) + g.signed_distance(q)).abs() < 1e-12);
        let h = GeodesicLine::imaginary_axis();
        let y = Reflection::across(&h);
        let c = g.intersection(&h).unwrap();
        assert!(g.contains(c, 1e-12) && h.contains(c, 1e-12));
        // Two reflections in lines at angle a compose to a rotation by 2a.
        let r = x.compose(&y);
        let a = r.rotation_angle().unwrap();
        let cos_half = x.pairing(&y).abs();
        assert!(((a / 2.0).cos().abs() - cos_half).abs() < 1e-12);
    }

    #[test]
    fn serde_round_trip() {
        let r = rotation_about(HypPoint::new(0.2, 3.0).unwrap(), 1.0);
        let s = serde_json::to_string(&r).unwrap();
        let back: Isometry = serde_json::from_str(&s).unwrap();
        assert_eq!(back.entries(), r.entries());
        assert!(serde_json::from_str::<Isometry>("[1, 0, 0, -1]").is_err());
        assert!(serde_json::from_str::<HypPoint>("[0, -1]").is_err());
    }
}
