//! Jacobi fields orthogonal to a timelike geodesic of AdS space, by
//! differentiating a family of numerically integrated geodesics.
//!
//! The chart is `(tau, y, z)` on `-x0^2 - x1^2 + y^2 + z^2 = -1` with
//! `x0 + i x1 = rho e^{i tau}`, `rho^2 = 1 + y^2 + z^2`, so that
//! `g = -rho^2 dtau^2 + dy^2 + dz^2 - (y dy + z dz)^2 / rho^2`.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};

type V3 = Vector3<f64>;

fn metric(x: &V3) -> Matrix3<f64> {
    let (y, z) = (x[1], x[2]);
    let r2 = 1.0 + y * y + z * z;
    Matrix3::new(-r2, 0.0, 0.0, 0.0, 1.0 - y * y / r2, -y * z / r2, 0.0, -y * z / r2, 1.0 - z * z / r2)
}

/// `d_k g` for `k = tau, y, z`.
fn metric_derivatives(x: &V3) -> [Matrix3<f64>; 3] {
    let (y, z) = (x[1], x[2]);
    let r4 = (1.0 + y * y + z * z).powi(2);
    let dy = Matrix3::new(
        -2.0 * y,
        0.0,
        0.0,
        0.0,
        -2.0 * y * (1.0 + z * z) / r4,
        -z * (1.0 + z * z - y * y) / r4,
        0.0,
        -z * (1.0 + z * z - y * y) / r4,
        2.0 * y * z * z / r4,
    );
    let dz = Matrix3::new(
        -2.0 * z,
        0.0,
        0.0,
        0.0,
        2.0 * y * y * z / r4,
        -y * (1.0 + y * y - z * z) / r4,
        0.0,
        -y * (1.0 + y * y - z * z) / r4,
        -2.0 * z * (1.0 + y * y) / r4,
    );
    [Matrix3::zeros(), dy, dz]
}

/// `Gamma(u, w)^a = Gamma^a_bc u^b w^c`.
fn gamma(x: &V3, u: &V3, w: &V3) -> V3 {
    let inv = metric(x).try_inverse().expect("chart metric is nondegenerate");
    let dg = metric_derivatives(x);
    let mut low = V3::zeros();
    for d in 0..3 {
        let mut s = 0.0;
        for b in 0..3 {
            for c in 0..3 {
                s += (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]) * u[b] * w[c];
            }
        }
        low[d] = 0.5 * s;
    }
    inv * low
}

/// Geodesic position and velocity with vectors parallel along it.
#[derive(Clone)]
struct State {
    x: V3,
    v: V3,
    w: Vec<V3>,
}

impl State {
    fn rate(&self) -> State {
        State {
            x: self.v,
            v: -gamma(&self.x, &self.v, &self.v),
            w: self.w.iter().map(|w| -gamma(&self.x, &self.v, w)).collect(),
        }
    }

    fn axpy(&self, h: f64, k: &State) -> State {
        State {
            x: self.x + k.x * h,
            v: self.v + k.v * h,
            w: self.w.iter().zip(&k.w).map(|(a, b)| a + b * h).collect(),
        }
    }

    fn rk4(&self, h: f64) -> State {
        let k1 = self.rate();
        let k2 = self.axpy(0.5 * h, &k1).rate();
        let k3 = self.axpy(0.5 * h, &k2).rate();
        let k4 = self.axpy(h, &k3).rate();
        State {
            x: self.x + (k1.x + k2.x * 2.0 + k3.x * 2.0 + k4.x) * (h / 6.0),
            v: self.v + (k1.v + k2.v * 2.0 + k3.v * 2.0 + k4.v) * (h / 6.0),
            w: (0..self.w.len()).map(|i| self.w[i] + (k1.w[i] + k2.w[i] * 2.0 + k3.w[i] * 2.0 + k4.w[i]) * (h / 6.0)).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiReport {
    /// Largest distance between the closed form and the numerical field, in
    /// the Riemannian norm `g + 2 g(T, .)^2`.
    pub deviation: f64,
    /// Smallest norm of the closed form `cos(s) v0 + sin(s) v1` at the
    /// sampled `s` in `(0, s_max)`.
    pub min_norm: f64,
    /// Norm of the closed form at `s_max`.
    pub end_norm: f64,
    pub steps: usize,
}

const BASE: [f64; 3] = [0.3, 0.4, -0.2];
const DIRECTION: [f64; 3] = [1.0, 0.35, -0.5];
const STEPS: usize = 600;
const EPS: f64 = 1e-5;

/// Unit tangent at the base point and an orthonormal frame of its
/// orthogonal complement.
fn frame(x: &V3, dir: &V3) -> (V3, V3, V3) {
    let g = metric(x);
    let ip = |a: &V3, b: &V3| (a.transpose() * g * b)[0];
    let t = dir / (-ip(dir, dir)).sqrt();
    let project = |u: V3| u + t * ip(&t, &u);
    let e1 = project(V3::new(0.0, 1.0, 0.0));
    let e1 = e1 / ip(&e1, &e1).sqrt();
    let e2 = project(V3::new(0.0, 0.0, 1.0));
    let e2 = e2 - e1 * ip(&e1, &e2);
    let e2 = e2 / ip(&e2, &e2).sqrt();
    (t, e1, e2)
}

/// Compares `J(s) = cos(s) v0 + sin(s) v1` with the variation field of the
/// geodesics starting at `exp(eps v0)` with velocity perturbed by `eps v1`,
/// along a unit-speed timelike geodesic. `v0`, `v1` are components in an
/// orthonormal frame of the orthogonal complement of the tangent, parallel
/// transported along the geodesic.
pub fn jacobi_check(v0: [f64; 2], v1: [f64; 2], s_max: f64) -> Result<JacobiReport> {
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(Error::InvalidInput(format!("arc length {s_max}")));
    }
    let x0 = V3::from(BASE);
    let (t, e1, e2) = frame(&x0, &V3::from(DIRECTION));
    let a0 = e1 * v0[0] + e2 * v0[1];
    let a1 = e1 * v1[0] + e2 * v1[1];
    let dv = a1 - gamma(&x0, &a0, &t);

    let mut base = State { x: x0, v: t, w: vec![a0, a1] };
    let mut plus = State { x: x0 + a0 * EPS, v: t + dv * EPS, w: vec![] };
    let mut minus = State { x: x0 - a0 * EPS, v: t - dv * EPS, w: vec![] };
    let h = s_max / STEPS as f64;
    let mut deviation: f64 = 0.0;
    let mut min_norm = f64::INFINITY;
    let mut end_norm = 0.0;
    for step in 1..=STEPS {
        base = base.rk4(h);
        plus = plus.rk4(h);
        minus = minus.rk4(h);
        let s = step as f64 * h;
        let g = metric(&base.x);
        let tl = g * base.v;
        let norm = |u: &V3| ((u.transpose() * g * u)[0] + 2.0 * tl.dot(u).powi(2)).max(0.0).sqrt();
        let closed = base.w[0] * s.cos() + base.w[1] * s.sin();
        let numeric = (plus.x - minus.x) / (2.0 * EPS);
        deviation = deviation.max(norm(&(closed - numeric)));
        if step < STEPS {
            min_norm = min_norm.min(norm(&closed));
        } else {
            end_norm = norm(&closed);
        }
    }
    Ok(JacobiReport { deviation, min_norm, end_norm, steps: STEPS })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn metric_derivatives_match_differences() {
        let x = V3::new(0.1, 0.7, -0.4);
        let h = 1e-6;
        let d = metric_derivatives(&x);
        for k in 0..3 {
            let mut e = V3::zeros();
            e[k] = h;
            let fd = (metric(&(x + e)) - metric(&(x - e))) / (2.0 * h);
            assert!((fd - d[k]).amax() < 1e-9, "{k}");
        }
    }

    #[test]
    fn frame_is_orthonormal() {
        let x = V3::from(BASE);
        let (t, e1, e2) = frame(&x, &V3::from(DIRECTION));
        let g = metric(&x);
        let ip = |a: &V3, b: &V3| (a.transpose() * g * b)[0];
        assert!((ip(&t, &t) + 1.0).abs() < 1e-14);
        assert!((ip(&e1, &e1) - 1.0).abs() < 1e-14 && (ip(&e2, &e2) - 1.0).abs() < 1e-14);
        assert!(ip(&t, &e1).abs() < 1e-14 && ip(&t, &e2).abs() < 1e-14 && ip(&e1, &e2).abs() < 1e-14);
    }

    #[test]
    fn pure_position_field_vanishes_at_quarter_turn() {
        let r = jacobi_check([0.6, -0.8], [0.0, 0.0], FRAC_PI_2).unwrap();
        assert!(r.deviation < 1e-6, "{r:?}");
        assert!(r.end_norm < 1e-12 && r.min_norm > 0.0, "{r:?}");
    }

    #[test]
    fn pure_velocity_field_does_not_vanish() {
        let r = jacobi_check([0.0, 0.0], [0.3, 0.9], FRAC_PI_2).unwrap();
        assert!(r.deviation < 1e-6, "{r:?}");
        assert!(r.min_norm > 1e-4 && (r.end_norm - 0.9f64.hypot(0.3)).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn random_fields_with_acute_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let v0 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let mut v1 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            if v0[0] * v1[0] + v0[1] * v1[1] < 0.0 {
                v1 = [-v1[0], -v1[1]];
            }
            let r = jacobi_check(v0, v1, FRAC_PI_2).unwrap();
            assert!(r.deviation < 1e-6 && r.min_norm > 0.0, "{r:?}");
        }
    }
}
