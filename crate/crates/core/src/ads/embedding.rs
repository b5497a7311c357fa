//! Spacelike surfaces in AdS space sampled on a grid: the metric of the
//! normal flow and the left and right metrics `I((E +- JB) ., (E +- JB) .)`.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector4};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::curvature::{brioschi, constant_curvature_deviation, riemann};
use crate::error::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

fn to_m(m: &Mat2) -> Matrix2<f64> {
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

fn from_m(m: &Matrix2<f64>) -> Mat2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

/// Rotation by a quarter turn for the metric `i`, positive from the first
/// coordinate direction to the second.
pub fn complex_structure(i: &Matrix2<f64>) -> Matrix2<f64> {
    let s = i.determinant().sqrt();
    Matrix2::new(-i[(0, 1)], -i[(1, 1)], i[(0, 0)], i[(0, 1)]) / s
}

/// First fundamental form `I`, shape operator `B` and complex structure `J`
/// on an `nu x nv` grid of spacing `h`; node `(i, j)` is at index `i nv + j`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSample {
    pub h: f64,
    pub nu: usize,
    pub nv: usize,
    pub first: Vec<Mat2>,
    pub shape: Vec<Mat2>,
    pub complex: Vec<Mat2>,
}

impl EmbeddingSample {
    pub fn new(h: f64, nu: usize, nv: usize, first: Vec<Mat2>, shape: Vec<Mat2>, complex: Vec<Mat2>) -> Result<Self> {
        let s = EmbeddingSample { h, nu, nv, first, shape, complex };
        s.validate()?;
        Ok(s)
    }

    /// Builds `J` from `I`.
    pub fn from_forms(h: f64, nu: usize, nv: usize, first: Vec<Mat2>, shape: Vec<Mat2>) -> Result<Self> {
        let complex = first.iter().map(|i| from_m(&complex_structure(&to_m(i)))).collect();
        Self::new(h, nu, nv, first, shape, complex)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nu * self.nv;
        if !(self.h > 0.0) || n == 0 || [&self.first, &self.shape, &self.complex].iter().any(|v| v.len() != n) {
            return Err(Error::InvalidInput(format!("grid {}x{} with spacing {} and mismatched samples", self.nu, self.nv, self.h)));
        }
        for k in 0..n {
            let (i, b, j) = self.forms(k);
            let sym = (i[(0, 1)] - i[(1, 0)]).abs();
            if !(i.determinant() > 0.0 && i[(0, 0)] > 0.0) || sym > 1e-12 * i.norm() {
                return Err(Error::InvalidInput(format!("sample {k}: I is not positive definite and symmetric")));
            }
            let ib = i * b;
            if (ib[(0, 1)] - ib[(1, 0)]).abs() > 1e-10 * ib.norm().max(1.0) {
                return Err(Error::InvalidInput(format!("sample {k}: B is not self-adjoint for I")));
            }
            if (j * j + Matrix2::identity()).amax() > 1e-12 {
                return Err(Error::InvalidInput(format!("sample {k}: J^2 is not -E")));
            }
            if (j.transpose() * i * j - i).amax() > 1e-10 * i.amax() {
                return Err(Error::InvalidInput(format!("sample {k}: J is not I-orthogonal")));
            }
        }
        Ok(())
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    /// `(I, B, J)` at flat index `k`.
    pub fn forms(&self, k: usize) -> (Matrix2<f64>, Matrix2<f64>, Matrix2<f64>) {
        (to_m(&self.first[k]), to_m(&self.shape[k]), to_m(&self.complex[k]))
    }

    fn map_metric(&self, f: impl Fn(Matrix2<f64>, Matrix2<f64>, Matrix2<f64>) -> Result<Matrix2<f64>>) -> Result<MetricSample> {
        let metric = (0..self.nu * self.nv)
            .map(|k| {
                let (i, b, j) = self.forms(k);
                f(i, b, j).map(|m| from_m(&m))
            })
            .collect::<Result<_>>()?;
        Ok(MetricSample { h: self.h, nu: self.nu, nv: self.nv, metric })
    }
}

/// A Riemannian metric sampled on the grid of an [`EmbeddingSample`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricSample {
    pub h: f64,
    pub nu: usize,
    pub nv: usize,
    pub metric: Vec<Mat2>,
}

impl MetricSample {
    pub fn at(&self, i: usize, j: usize) -> Matrix2<f64> {
        to_m(&self.metric[i * self.nv + j])
    }

    /// Gaussian curvature at an interior node.
    pub fn curvature(&self, i: usize, j: usize) -> f64 {
        let g = |a: i32, b: i32| self.at((i as i32 + a) as usize, (j as i32 + b) as usize);
        brioschi(&g, self.h)
    }

    /// Largest `|K - k|` over interior nodes.
    pub fn curvature_deviation(&self, k: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 1..self.nu.saturating_sub(1) {
            for j in 1..self.nv.saturating_sub(1) {
                worst = worst.max((self.curvature(i, j) - k).abs());
            }
        }
        worst
    }
}

fn flow_operator(b: &Matrix2<f64>, t: f64) -> Result<Matrix2<f64>> {
    let m = Matrix2::identity() * t.cos() + b * t.sin();
    if m.determinant().abs() < 1e-12 {
        return Err(Error::Degenerate(format!("cos(t) E + sin(t) B is singular at t = {t}")));
    }
    Ok(m)
}

/// Metric `I((cos t E + sin t B) ., (cos t E + sin t B) .)` of the surface at
/// distance `t` along the normal flow.
pub fn normal_flow_metric(e: &EmbeddingSample, t: f64) -> Result<MetricSample> {
    e.map_metric(|i, b, _| {
        let m = flow_operator(&b, t)?;
        Ok(m.transpose() * i * m)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowCurvatureReport {
    /// Largest deviation of the Lorentzian metric `-dt^2 + I_t` from
    /// constant curvature -1.
    pub max_deviation: f64,
    /// Largest `|K_I + 1 + det B|`.
    pub gauss_residual: f64,
    /// Whether the Gauss equation holds to 1e-4.
    pub gauss_ok: bool,
    pub points: usize,
}

/// Curvature of `-dt^2 + I_t` by central differences in `(t, u, v)`, with the
/// grid spacing also used in `t`. Interior nodes two steps from the edge.
pub fn flow_curvature_check(e: &EmbeddingSample, t: f64) -> Result<FlowCurvatureReport> {
    if e.nu < 5 || e.nv < 5 {
        return Err(Error::InvalidInput("flow curvature needs a grid of at least 5x5".into()));
    }
    let h = e.h;
    let mut max_deviation: f64 = 0.0;
    let mut gauss_residual: f64 = 0.0;
    let mut points = 0;
    for i in 2..e.nu - 2 {
        for j in 2..e.nv - 2 {
            let g = |o: [i32; 3]| {
                let k = e.index((i as i32 + o[1]) as usize, (j as i32 + o[2]) as usize);
                let (first, b, _) = e.forms(k);
                let m = match flow_operator(&b, t + o[0] as f64 * h) {
                    Ok(m) => m,
                    Err(_) => return Matrix3::from_element(f64::NAN),
                };
                let s = m.transpose() * first * m;
                Matrix3::new(-1.0, 0.0, 0.0, 0.0, s[(0, 0)], s[(0, 1)], 0.0, s[(1, 0)], s[(1, 1)])
            };
            let dev = constant_curvature_deviation(&riemann::<3>(&g, h), &g([0, 0, 0]), -1.0);
            if !dev.is_finite() {
                return Err(Error::Degenerate(format!("focal point near node ({i}, {j}) at t = {t}")));
            }
            max_deviation = max_deviation.max(dev);
            let first = |a: i32, b: i32| to_m(&e.first[e.index((i as i32 + a) as usize, (j as i32 + b) as usize)]);
            let k_i = brioschi(&first, h);
            let (_, b, _) = e.forms(e.index(i, j));
            gauss_residual = gauss_residual.max((k_i + 1.0 + b.determinant()).abs());
            points += 1;
        }
    }
    Ok(FlowCurvatureReport { max_deviation, gauss_residual, gauss_ok: gauss_residual < 1e-4, points })
}

/// The left and right metrics `I((E + JB) ., (E + JB) .)` and
/// `I((E - JB) ., (E - JB) .)`.
pub fn mu_from_embedding(e: &EmbeddingSample) -> Result<(MetricSample, MetricSample)> {
    let pull = |sign: f64| {
        e.map_metric(|i, b, j| {
            let m = Matrix2::identity() + j * b * sign;
            if m.determinant().abs() < 1e-10 {
                return Err(Error::Degenerate(format!("E {} JB is singular", if sign > 0.0 { '+' } else { '-' })));
            }
            Ok(m.transpose() * i * m)
        })
    };
    Ok((pull(1.0)?, pull(-1.0)?))
}

fn lorentz(x: &Vector4<f64>, y: &Vector4<f64>) -> f64 {
    -x[0] * y[0] - x[1] * y[1] + x[2] * y[2] + x[3] * y[3]
}

/// Euclidean vector orthogonal to `x`, `y`, `z` (the cofactor expansion).
fn cross4(x: &Vector4<f64>, y: &Vector4<f64>, z: &Vector4<f64>) -> Vector4<f64> {
    let m = Matrix4::from_columns(&[Vector4::zeros(), *x, *y, *z]).transpose();
    Vector4::from_fn(|a, _| {
        let minor = m.remove_row(0).remove_column(a);
        let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
        sign * minor.determinant()
    })
}

/// Position and first and second derivatives of a parametrized surface.
pub struct Jet {
    pub x: Vector4<f64>,
    pub d: [Vector4<f64>; 2],
    pub dd: [[Vector4<f64>; 2]; 2],
}

/// The surface `cos f(u,v) p(u,v) + sin f(u,v) n` in AdS space, realized as
/// `-x0^2 - x1^2 + x2^2 + x3^2 = -1`, where `p` is a totally geodesic plane in
/// Fermi coordinates, `n` its unit normal and `f` a sum of plane waves
/// `a sin(alpha u + beta v + phi)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeGraph {
    pub waves: Vec<[f64; 4]>,
}

impl TimeGraph {
    pub fn random(rng: &mut impl Rng, n: usize, amplitude: f64) -> Self {
        let waves = (0..n)
            .map(|_| {
                [
                    rng.gen_range(-amplitude..amplitude),
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                ]
            })
            .collect();
        TimeGraph { waves }
    }

    /// `f` with its first and second derivatives: `(f, [f_u, f_v], [[f_uu, f_uv], [f_uv, f_vv]])`.
    fn height(&self, u: f64, v: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let mut f = 0.0;
        let mut df = [0.0; 2];
        let mut ddf = [[0.0; 2]; 2];
        for &[a, al, be, ph] in &self.waves {
            let (s, c) = (al * u + be * v + ph).sin_cos();
            let k = [al, be];
            f += a * s;
            for i in 0..2 {
                df[i] += a * k[i] * c;
                for j in 0..2 {
                    ddf[i][j] -= a * k[i] * k[j] * s;
                }
            }
        }
        (f, df, ddf)
    }

    pub fn jet(&self, u: f64, v: f64) -> Jet {
        let (chu, shu, chv, shv) = (u.cosh(), u.sinh(), v.cosh(), v.sinh());
        let p = Vector4::new(chu * chv, 0.0, shu * chv, shv);
        let dp = [Vector4::new(shu * chv, 0.0, chu * chv, 0.0), Vector4::new(chu * shv, 0.0, shu * shv, chv)];
        let puv = Vector4::new(shu * shv, 0.0, chu * shv, 0.0);
        let ddp = [[Vector4::new(chu * chv, 0.0, shu * chv, 0.0), puv], [puv, p]];
        let n = Vector4::new(0.0, 1.0, 0.0, 0.0);
        let (f, df, ddf) = self.height(u, v);
        let (s, c) = f.sin_cos();
        let x = p * c + n * s;
        let d = [0, 1].map(|i| -p * (s * df[i]) + dp[i] * c + n * (c * df[i]));
        let dd = [0, 1].map(|i| {
            [0, 1].map(|j| {
                -p * (c * df[i] * df[j] + s * ddf[i][j]) - dp[j] * (s * df[i]) - dp[i] * (s * df[j]) + ddp[i][j] * c
                    + n * (c * ddf[i][j] - s * df[i] * df[j])
            })
        });
        Jet { x, d, dd }
    }

    /// `(I, B)` at `(u, v)`, with `B` defined by `dN = d sigma . B` for the
    /// future unit normal `N`, so that the normal flow is
    /// `cos(t) sigma + sin(t) N`.
    pub fn forms(&self, u: f64, v: f64) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
        let jet = self.jet(u, v);
        let first = Matrix2::from_fn(|i, j| lorentz(&jet.d[i], &jet.d[j]));
        if !(first.determinant() > 0.0 && first[(0, 0)] > 0.0) {
            return Err(Error::Degenerate(format!("surface is not spacelike at ({u}, {v})")));
        }
        let c = cross4(&jet.x, &jet.d[0], &jet.d[1]);
        let mut normal = Vector4::new(-c[0], -c[1], c[2], c[3]);
        let nn = lorentz(&normal, &normal);
        normal /= (-nn).sqrt();
        if normal[1] < 0.0 {
            normal = -normal;
        }
        let second = Matrix2::from_fn(|i, j| -lorentz(&normal, &jet.dd[i][j]));
        let inv = first.try_inverse().ok_or_else(|| Error::Degenerate("singular first fundamental form".into()))?;
        Ok((first, inv * second))
    }

    /// Samples an `n x n` grid of spacing `h` centred at `(u0, v0)`.
    pub fn sample(&self, u0: f64, v0: f64, h: f64, n: usize) -> Result<EmbeddingSample> {
        let half = (n as f64 - 1.0) / 2.0;
        let mut first = Vec::with_capacity(n * n);
        let mut shape = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = self.forms(u0 + (i as f64 - half) * h, v0 + (j as f64 - half) * h)?;
                first.push(from_m(&a));
                shape.push(from_m(&b));
            }
        }
        // Self-adjointness holds exactly; restore it after round-off.
        for k in 0..n * n {
            let (i, b) = (to_m(&first[k]), to_m(&shape[k]));
            let ib = i * b;
            let sym = (ib + ib.transpose()) * 0.5;
            shape[k] = from_m(&(i.try_inverse().expect("positive definite") * sym));
        }
        EmbeddingSample::from_forms(h, n, n, first, shape)
    }
}
