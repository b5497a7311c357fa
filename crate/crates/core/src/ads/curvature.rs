//! Curvature of sampled metrics by central differences.

use nalgebra::{Matrix2, SMatrix};

/// `R[a][b][c][d] = g_ae R^e_bcd` with `R(X_c, X_d) X_b = R^e_bcd X_e`, so that
/// constant curvature `k` reads `k (g_ac g_bd - g_ad g_bc)`.
pub type Riemann<const N: usize> = [[[[f64; N]; N]; N]; N];

type Christoffel<const N: usize> = [[[f64; N]; N]; N];

fn offset<const N: usize>(base: [i32; N], k: usize, s: i32) -> [i32; N] {
    let mut o = base;
    o[k] += s;
    o
}

fn christoffel<const N: usize>(g: &dyn Fn([i32; N]) -> SMatrix<f64, N, N>, at: [i32; N], h: f64) -> Christoffel<N> {
    let inv = g(at).try_inverse().unwrap_or_else(|| SMatrix::from_element(f64::NAN));
    let dg: Vec<SMatrix<f64, N, N>> = (0..N).map(|k| (g(offset(at, k, 1)) - g(offset(at, k, -1))) / (2.0 * h)).collect();
    let mut out = [[[0.0; N]; N]; N];
    for a in 0..N {
        for b in 0..N {
            for c in 0..N {
                out[a][b][c] =
                    0.5 * (0..N).map(|d| inv[(a, d)] * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)])).sum::<f64>();
            }
        }
    }
    out
}

/// Riemann tensor at grid offset zero of a metric given on integer offsets
/// with spacing `h`. Reads offsets up to two steps along each axis and one
/// step along two axes at once.
pub fn riemann<const N: usize>(g: &dyn Fn([i32; N]) -> SMatrix<f64, N, N>, h: f64) -> Riemann<N> {
    let zero = [0i32; N];
    let gam = christoffel(g, zero, h);
    let dgam: Vec<Christoffel<N>> = (0..N)
        .map(|k| {
            let (p, m) = (christoffel(g, offset(zero, k, 1), h), christoffel(g, offset(zero, k, -1), h));
            let mut d = [[[0.0; N]; N]; N];
            for a in 0..N {
                for b in 0..N {
                    for c in 0..N {
                        d[a][b][c] = (p[a][b][c] - m[a][b][c]) / (2.0 * h);
                    }
                }
            }
            d
        })
        .collect();
    let mut up = [[[[0.0; N]; N]; N]; N];
    for a in 0..N {
        for b in 0..N {
            for c in 0..N {
                for d in 0..N {
                    let mut r = dgam[c][a][d][b] - dgam[d][a][c][b];
                    for e in 0..N {
                        r += gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b];
                    }
                    up[a][b][c][d] = r;
                }
            }
        }
    }
    let g0 = g(zero);
    let mut low = [[[[0.0; N]; N]; N]; N];
    for a in 0..N {
        for b in 0..N {
            for c in 0..N {
                for d in 0..N {
                    low[a][b][c][d] = (0..N).map(|e| g0[(a, e)] * up[e][b][c][d]).sum();
                }
            }
        }
    }
    low
}

/// Sectional curvature of the coordinate plane `(a, b)`.
pub fn sectional<const N: usize>(r: &Riemann<N>, g: &SMatrix<f64, N, N>, a: usize, b: usize) -> f64 {
    r[a][b][a][b] / (g[(a, a)] * g[(b, b)] - g[(a, b)] * g[(a, b)])
}

/// Largest deviation of `r` from constant curvature `k`, each component
/// scaled by the metric so that coordinate sectional curvatures enter as
/// `|K - k|`.
pub fn constant_curvature_deviation<const N: usize>(r: &Riemann<N>, g: &SMatrix<f64, N, N>, k: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..N {
        for b in 0..N {
            for c in 0..N {
                for d in 0..N {
                    let want = k * (g[(a, c)] * g[(b, d)] - g[(a, d)] * g[(b, c)]);
                    let size = (g[(a, a)] * g[(b, b)] * g[(c, c)] * g[(d, d)]).abs().sqrt().max(f64::MIN_POSITIVE);
                    worst = worst.max((r[a][b][c][d] - want).abs() / size);
                }
            }
        }
    }
    for a in 0..N {
        for b in a + 1..N {
            worst = worst.max((sectional(r, g, a, b) - k).abs());
        }
    }
    worst
}

/// Gaussian curvature at offset zero by the Brioschi formula, from the first
/// fundamental form on a grid of spacing `h`.
pub fn brioschi(g: &dyn Fn(i32, i32) -> Matrix2<f64>, h: f64) -> f64 {
    let part = |i: i32, j: i32| {
        let m = g(i, j);
        (m[(0, 0)], m[(0, 1)], m[(1, 1)])
    };
    let (e, f, gg) = part(0, 0);
    let d_u = |k: fn((f64, f64, f64)) -> f64| (k(part(1, 0)) - k(part(-1, 0))) / (2.0 * h);
    let d_v = |k: fn((f64, f64, f64)) -> f64| (k(part(0, 1)) - k(part(0, -1))) / (2.0 * h);
    let d_uu = |k: fn((f64, f64, f64)) -> f64| (k(part(1, 0)) - 2.0 * k(part(0, 0)) + k(part(-1, 0))) / (h * h);
    let d_vv = |k: fn((f64, f64, f64)) -> f64| (k(part(0, 1)) - 2.0 * k(part(0, 0)) + k(part(0, -1))) / (h * h);
    let d_uv = |k: fn((f64, f64, f64)) -> f64| {
        (k(part(1, 1)) - k(part(1, -1)) - k(part(-1, 1)) + k(part(-1, -1))) / (4.0 * h * h)
    };
    let (fe, ff, fg): (fn((f64, f64, f64)) -> f64, fn((f64, f64, f64)) -> f64, fn((f64, f64, f64)) -> f64) =
        (|p| p.0, |p| p.1, |p| p.2);
    let (e_u, e_v, f_u, f_v, g_u, g_v) = (d_u(fe), d_v(fe), d_u(ff), d_v(ff), d_u(fg), d_v(fg));
    let a = nalgebra::Matrix3::new(
        -0.5 * d_vv(fe) + d_uv(ff) - 0.5 * d_uu(fg),
        0.5 * e_u,
        f_u - 0.5 * e_v,
        f_v - 0.5 * g_u,
        e,
        f,
        0.5 * g_v,
        f,
        gg,
    );
    let b = nalgebra::Matrix3::new(0.0, 0.5 * e_v, 0.5 * g_u, 0.5 * e_v, e, f, 0.5 * g_u, f, gg);
    (a.determinant() - b.determinant()) / (e * gg - f * f).powi(2)
}
