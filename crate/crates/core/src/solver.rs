//! Inversion of the right earthquake map on a fixed support, and the local
//! rigidity and properness probes around it.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::ads::{from_bending, left_right_metrics, BendData, GhmcData};
use crate::earthquake::{earthquake_twist, length_inequality_check, LengthInequality, Side, WeightedMulticurve};
use crate::error::{Error, Result};
use crate::surface::{marked_length, teich_distance, ConeSurface, FnCoordinates};
use crate::word::CurveClass;

pub const SOLVER_TOL: f64 = 1e-9;
pub const FD_STEP: f64 = 1e-6;
/// Tolerance of the round trip through `mess_inverse`.
pub const MESS_TOL: f64 = 1e-7;
/// Smallest singular value below which the weight Jacobian counts as singular.
pub const RIGIDITY_TOL: f64 = 1e-6;

/// Curves carrying the unknown weights. Entries must be pants curves and may
/// repeat, in which case their weights add up.
#[derive(Clone, Debug, Serialize)]
pub struct Support {
    curves: Vec<CurveClass>,
    pants: Vec<usize>,
}

impl Support {
    pub fn new(s: &ConeSurface, curves: Vec<CurveClass>) -> Result<Self> {
        let d = s.decomposition();
        let pants = curves
            .iter()
            .map(|c| {
                d.pants_curve_index(c)
                    .ok_or_else(|| Error::Unsupported(format!("support curve {c} is not a pants curve")))
            })
            .collect::<Result<_>>()?;
        Ok(Support { curves, pants })
    }

    pub fn pants_curves(s: &ConeSurface, indices: &[usize]) -> Result<Self> {
        let d = s.decomposition();
        if let Some(&e) = indices.iter().find(|&&e| e >= d.n_curves()) {
            return Err(Error::InvalidInput(format!("no pants curve {e}")));
        }
        Self::new(s, indices.iter().map(|&e| d.pants_curve(e).clone()).collect())
    }

    /// The support and weights of a multicurve.
    pub fn of(s: &ConeSurface, lambda: &WeightedMulticurve) -> Result<(Self, Vec<f64>)> {
        let support = Self::new(s, lambda.components().iter().map(|c| c.curve.clone()).collect())?;
        Ok((support, lambda.components().iter().map(|c| c.weight).collect()))
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn curves(&self) -> &[CurveClass] {
        &self.curves
    }

    /// The multicurve with weights `w`, repeated curves merged.
    pub fn multicurve(&self, s: &ConeSurface, w: &[f64]) -> Result<WeightedMulticurve> {
        let d = s.decomposition();
        let mut per = vec![0.0; d.n_curves()];
        for (&e, &x) in self.pants.iter().zip(w) {
            per[e] += x;
        }
        let pairs: Vec<(usize, f64)> = per.into_iter().enumerate().filter(|&(_, x)| x != 0.0).collect();
        WeightedMulticurve::on_pants_curves(d, &pairs)
    }

    /// Coordinates of the right earthquake with weights `w`. Defined for
    /// every real `w`, so that difference quotients may step below zero.
    fn shifted(&self, s: &ConeSurface, w: &[f64]) -> FnCoordinates {
        let mut c = s.coords().clone();
        for (&e, &x) in self.pants.iter().zip(w) {
            c.0[e].twist -= x;
        }
        c
    }

    /// Determining spectrum of the right earthquake with weights `w`.
    fn spectrum(&self, s: &ConeSurface, w: &[f64]) -> Result<DVector<f64>> {
        let d = s.decomposition();
        let c = self.shifted(s, w);
        let lengths: Vec<f64> =
            d.determining_system().iter().map(|g| marked_length(d, &c, s.angles(), g)).collect::<Result<_>>()?;
        Ok(DVector::from_vec(lengths))
    }
}

fn jacobian(s: &ConeSurface, support: &Support, w: &[f64], central: bool) -> Result<DMatrix<f64>> {
    let base = if central { None } else { Some(support.spectrum(s, w)?) };
    let column = |k: usize| -> Result<DVector<f64>> {
        let mut p = w.to_vec();
        p[k] += FD_STEP;
        let fp = support.spectrum(s, &p)?;
        match &base {
            Some(f0) => Ok((fp - f0) / FD_STEP),
            None => {
                p[k] -= 2.0 * FD_STEP;
                Ok((fp - support.spectrum(s, &p)?) / (2.0 * FD_STEP))
            }
        }
    };
    #[cfg(feature = "parallel")]
    let cols: Vec<DVector<f64>> = {
        use rayon::prelude::*;
        (0..w.len()).into_par_iter().map(column).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let cols: Vec<DVector<f64>> = (0..w.len()).map(column).collect::<Result<_>>()?;
    let rows = s.decomposition().determining_system().len();
    Ok(if cols.is_empty() { DMatrix::zeros(rows, 0) } else { DMatrix::from_columns(&cols) })
}

fn singular_values(j: &DMatrix<f64>) -> (f64, f64) {
    if j.ncols() == 0 {
        return (0.0, 0.0);
    }
    let sv = j.clone().svd(false, false).singular_values;
    (sv.min(), sv.max())
}

/// Find weights `w >= 0` on `support` with `E^r_w(source) = target`.
#[derive(Clone, Debug)]
pub struct InversionProblem {
    pub source: ConeSurface,
    pub target: ConeSurface,
    pub support: Support,
    pub upper: f64,
    pub tol: f64,
    pub initial: Option<Vec<f64>>,
    pub max_iterations: usize,
}

impl InversionProblem {
    pub fn new(source: ConeSurface, target: ConeSurface, support: Support) -> Self {
        InversionProblem { source, target, support, upper: 100.0, tol: SOLVER_TOL, initial: None, max_iterations: 200 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub residual: f64,
    pub damping: f64,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverReport {
    pub weights: Vec<f64>,
    /// Spectrum distance between `E^r_w(source)` and the target, recomputed
    /// from an assembled surface at the returned weights.
    pub residual: f64,
    pub iterations: usize,
    pub condition: f64,
    /// Some weight sits at the upper bound.
    pub at_bound: bool,
    pub starts: usize,
    pub trace: Vec<TraceRow>,
}

struct Run {
    weights: Vec<f64>,
    residual: f64,
    iterations: usize,
    trace: Vec<TraceRow>,
}

fn levenberg_marquardt(p: &InversionProblem, target: &DVector<f64>, start: Vec<f64>) -> Result<Run> {
    let s = &p.source;
    let n = p.support.len();
    let eval = |w: &[f64]| -> Result<(DVector<f64>, f64)> {
        let r = p.support.spectrum(s, w)? - target;
        let c = 0.5 * r.norm_squared();
        Ok((r, c))
    };
    let project = |w: &mut [f64]| w.iter_mut().for_each(|x| *x = x.clamp(0.0, p.upper));
    let mut w = start;
    project(&mut w);
    let (mut r, mut cost) = eval(&w)?;
    let mut damping = 1e-3;
    let mut pinned = vec![0usize; n];
    let mut trace = Vec::new();
    let mut it = 0;
    while it < p.max_iterations {
        let res = r.amax();
        trace.push(TraceRow { iteration: it, residual: res, damping, weights: w.clone() });
        if res <= 0.25 * p.tol {
            break;
        }
        it += 1;
        let active: Vec<usize> = (0..n).filter(|&k| pinned[k] < 3).collect();
        if active.is_empty() {
            break;
        }
        let full = jacobian(s, &p.support, &w, false)?;
        let j = DMatrix::from_fn(full.nrows(), active.len(), |a, b| full[(a, active[b])]);
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &r;
        let mut accepted = false;
        while damping < 1e12 {
            let m = &jtj + DMatrix::identity(active.len(), active.len()) * damping;
            let Some(step) = m.lu().solve(&(-&g)) else {
                damping *= 10.0;
                continue;
            };
            for alpha in [1.0, 0.5, 0.25] {
                let mut trial = w.clone();
                for (b, &k) in active.iter().enumerate() {
                    trial[k] += alpha * step[b];
                }
                project(&mut trial);
                let Ok((tr, tc)) = eval(&trial) else { continue };
                if tc < cost {
                    (w, r, cost) = (trial, tr, tc);
                    accepted = true;
                    break;
                }
            }
            if accepted {
                damping = (damping / 10.0).max(1e-12);
                break;
            }
            damping *= 10.0;
        }
        for k in 0..n {
            pinned[k] = if w[k] == 0.0 { pinned[k] + 1 } else { 0 };
        }
        if !accepted {
            break;
        }
    }
    Ok(Run { residual: r.amax(), weights: w, iterations: it, trace })
}

/// Recomputes the residual from an assembled earthquake, falling back to
/// marked lengths when the twists are too large to assemble.
fn recomputed_residual(p: &InversionProblem, w: &[f64]) -> Result<f64> {
    let lambda = p.support.multicurve(&p.source, w)?;
    match earthquake_twist(&p.source, &lambda, Side::Right, true) {
        Ok(moved) => teich_distance(&moved, &p.target),
        Err(Error::Assembly { .. }) => {
            let target = p.target.spectrum()?.lengths();
            Ok(p.support.spectrum(&p.source, w)?.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        }
        Err(e) => Err(e),
    }
}

/// Damped Gauss-Newton on the determining spectrum, started at zero (or the
/// supplied guess) and then at a coarse grid of starts if that fails.
pub fn invert_earthquake(p: &InversionProblem) -> Result<SolverReport> {
    teich_distance(&p.source, &p.target)?;
    let n = p.support.len();
    let target = DVector::from_vec(p.target.spectrum()?.lengths());
    let mut starts = vec![p.initial.clone().unwrap_or_else(|| vec![0.0; n])];
    if n <= 3 {
        let grid = [0.25, 1.0, 2.5, 6.0];
        let mut idx = vec![0usize; n];
        'grid: loop {
            starts.push(idx.iter().map(|&i| grid[i]).collect());
            for k in 0..n {
                idx[k] += 1;
                if idx[k] < grid.len() {
                    continue 'grid;
                }
                idx[k] = 0;
            }
            break;
        }
    }
    let mut best: Option<Run> = None;
    let mut tried = 0;
    let mut total_iterations = 0;
    for start in starts {
        tried += 1;
        let run = levenberg_marquardt(p, &target, start)?;
        total_iterations += run.iterations;
        let done = run.residual <= p.tol;
        if best.as_ref().map_or(true, |b| run.residual < b.residual) {
            best = Some(run);
        }
        if done {
            break;
        }
        log::info!("start {tried} stalled; trying the next one");
    }
    let run = best.expect("at least one start");
    let residual = recomputed_residual(p, &run.weights)?;
    if !(residual <= p.tol) {
        return Err(Error::NonConvergence { residual, iterations: total_iterations, weights: run.weights });
    }
    let (lo, hi) = singular_values(&jacobian(&p.source, &p.support, &run.weights, false)?);
    let at_bound = run.weights.iter().any(|&x| x >= p.upper);
    if at_bound {
        log::warn!("a weight reached the upper bound {}; the solution may lie beyond it", p.upper);
    }
    Ok(SolverReport {
        weights: run.weights,
        residual,
        iterations: total_iterations,
        condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        at_bound,
        starts: tried,
        trace: run.trace,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub condition: f64,
    /// The Jacobian has full column rank to within `RIGIDITY_TOL`.
    pub passed: bool,
}

/// Central-difference Jacobian of the determining spectrum in the weights at
/// `w`, and its extreme singular values.
pub fn local_rigidity_check(s: &ConeSurface, support: &Support, w: &[f64]) -> Result<RigidityReport> {
    if w.len() != support.len() {
        return Err(Error::InvalidInput(format!("{} weights for {} curves", w.len(), support.len())));
    }
    if let Some(x) = w.iter().find(|&&x| !(x > 0.05)) {
        return Err(Error::InvalidInput(format!("weight {x} is not interior (> 0.05)")));
    }
    let (sigma_min, sigma_max) = singular_values(&jacobian(s, support, w, true)?);
    Ok(RigidityReport {
        sigma_min,
        sigma_max,
        condition: if sigma_min > 0.0 { sigma_max / sigma_min } else { f64::INFINITY },
        passed: sigma_min > RIGIDITY_TOL,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub scale: f64,
    pub before: f64,
    pub after: f64,
    /// `scale * lambda(gamma) - before`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub curve: Option<CurveClass>,
    pub rows: Vec<ProbeRow>,
    /// All bounds hold and the curve is crossed, so lengths grow at least
    /// linearly along the ray.
    pub diverges: bool,
    pub notice: Option<String>,
}

/// Lengths of the first determining curve crossed by `direction` after right
/// earthquakes along `k * direction`, against the lower bound
/// `k lambda(gamma) - l(gamma)`.
pub fn properness_probe(s: &ConeSurface, direction: &WeightedMulticurve, scales: &[f64]) -> Result<ProbeReport> {
    let d = s.decomposition();
    let mut gamma = None;
    for c in d.determining_system() {
        if direction.mass(d, &c)? > 0.0 {
            gamma = Some(c);
            break;
        }
    }
    let Some(gamma) = gamma else {
        return Ok(ProbeReport {
            curve: None,
            rows: vec![],
            diverges: false,
            notice: Some("no determining curve crosses the direction; inconclusive".into()),
        });
    };
    let mut rows = Vec::with_capacity(scales.len());
    for &k in scales {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidInput(format!("scale {k}")));
        }
        let li = if k == 0.0 {
            let before = s.geodesic_length(&gamma)?;
            LengthInequality { before, after: before, mass: 0.0 }
        } else {
            length_inequality_check(s, &direction.scaled(k)?, &gamma)?
        };
        let bound = li.mass - li.before;
        rows.push(ProbeRow { scale: k, before: li.before, after: li.after, bound, holds: li.after >= bound - 1e-9 });
    }
    let diverges = rows.iter().all(|r| r.holds);
    Ok(ProbeReport { curve: Some(gamma), rows, diverges, notice: None })
}

#[derive(Clone, Debug, Serialize)]
pub struct MessInverse {
    pub data: GhmcData,
    /// Bending weights `lambda / 2` on the support.
    pub bending: Vec<f64>,
    pub solver: SolverReport,
    pub left_residual: f64,
    pub right_residual: f64,
}

/// The holonomy pair whose left and right metrics are `mu_l` and `mu_r`:
/// with `E^r_lambda(mu_l) = mu_r`, bend `h_+ = E^r_{lambda/2}(mu_l)` along
/// `lambda / 2`.
pub fn mess_inverse(mu_l: &ConeSurface, mu_r: &ConeSurface, support: &Support) -> Result<MessInverse> {
    let solver = invert_earthquake(&InversionProblem::new(mu_l.clone(), mu_r.clone(), support.clone()))?;
    let bending: Vec<f64> = solver.weights.iter().map(|w| 0.5 * w).collect();
    let lambda_plus = support.multicurve(mu_l, &bending)?;
    let h_plus = earthquake_twist(mu_l, &lambda_plus, Side::Right, true)?;
    let data = from_bending(&BendData { h_plus, lambda_plus })?;
    let (l, r) = left_right_metrics(&data)?;
    let (left_residual, right_residual) = (teich_distance(&l, mu_l)?, teich_distance(&r, mu_r)?);
    if left_residual.max(right_residual) > MESS_TOL {
        return Err(Error::Inconsistent(format!(
            "rebuilt metrics differ by {left_residual:.3e} (left) and {right_residual:.3e} (right)"
        )));
    }
    Ok(MessInverse { data, bending, solver, left_residual, right_residual })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::ads::holonomy_to_fn;
    use crate::hyp::{rotation_about, HypPoint, Isometry};
    use crate::surface::{assemble, BlockDecomposition, ConeAngles};

    fn four_cone() -> ConeSurface {
        let d = Arc::new(BlockDecomposition::cone_sphere(4).unwrap());
        assemble(&d, &FnCoordinates::new(&[(1.0, 0.0)]), &ConeAngles::uniform(4, PI / 2.0).unwrap()).unwrap()
    }

    fn torus() -> ConeSurface {
        let d = Arc::new(BlockDecomposition::one_cone_torus());
        assemble(&d, &FnCoordinates::new(&[(1.5, 0.3)]), &ConeAngles::uniform(1, PI / 2.0).unwrap()).unwrap()
    }

    fn five_cone() -> ConeSurface {
        let d = Arc::new(BlockDecomposition::cone_sphere(5).unwrap());
        let angles = ConeAngles::new(vec![1.0, 1.5, 2.0, 2.5, 0.7]).unwrap();
        assemble(&d, &FnCoordinates::new(&[(1.0, 0.3), (1.4, -0.2)]), &angles).unwrap()
    }

    fn planted(s: &ConeSurface, support: &Support, w: &[f64]) -> InversionProblem {
        let target = earthquake_twist(s, &support.multicurve(s, w).unwrap(), Side::Right, true).unwrap();
        InversionProblem::new(s.clone(), target, support.clone())
    }

    #[test]
    fn identity_target_gives_zero() {
        for s in [four_cone(), torus()] {
            let sup = Support::pants_curves(&s, &[0]).unwrap();
            let r = invert_earthquake(&InversionProblem::new(s.clone(), s.clone(), sup)).unwrap();
            assert!(r.weights[0].abs() < 1e-9 && r.residual < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn planted_weights_are_recovered() {
        for s in [four_cone(), torus()] {
            let sup = Support::pants_curves(&s, &[0]).unwrap();
            for w in [0.05, 0.5, 1.7, 3.0] {
                let r = invert_earthquake(&planted(&s, &sup, &[w])).unwrap();
                assert!((r.weights[0] - w).abs() < 1e-6, "{w} {r:?}");
                assert!(r.residual <= SOLVER_TOL);
            }
        }
        let s = five_cone();
        let sup = Support::pants_curves(&s, &[0, 1]).unwrap();
        let r = invert_earthquake(&planted(&s, &sup, &[0.3, 1.1])).unwrap();
        assert!((r.weights[0] - 0.3).abs() < 1e-6 && (r.weights[1] - 1.1).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn unreachable_target_fails_loudly() {
        let s = five_cone();
        let sup = Support::pants_curves(&s, &[0]).unwrap();
        let target = earthquake_twist(&s, &Support::pants_curves(&s, &[1]).unwrap().multicurve(&s, &[0.7]).unwrap(), Side::Right, true).unwrap();
        let err = invert_earthquake(&InversionProblem::new(s, target, sup)).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }), "{err}");
        // A left earthquake needs negative weights.
        let s = four_cone();
        let sup = Support::pants_curves(&s, &[0]).unwrap();
        let target = earthquake_twist(&s, &sup.multicurve(&s, &[0.4]).unwrap(), Side::Left, true).unwrap();
        assert!(invert_earthquake(&InversionProblem::new(s, target, sup)).is_err());
    }

    #[test]
    fn residual_grows_along_rays() {
        let s = four_cone();
        let sup = Support::pants_curves(&s, &[0]).unwrap();
        let target = DVector::from_vec(s.spectrum().unwrap().lengths());
        let res: Vec<f64> =
            [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&k| (sup.spectrum(&s, &[k * 0.5]).unwrap() - &target).norm()).collect();
        assert!(res.windows(2).skip(1).all(|p| p[1] > p[0]), "{res:?}");
    }

    #[test]
    fn rigidity_and_duplicated_curves() {
        let s = four_cone();
        let sup = Support::pants_curves(&s, &[0]).unwrap();
        let r = local_rigidity_check(&s, &sup, &[0.5]).unwrap();
        assert!(r.passed, "{r:?}");
        let dup = Support::pants_curves(&s, &[0, 0]).unwrap();
        let r = local_rigidity_check(&s, &dup, &[0.5, 0.2]).unwrap();
        assert!(!r.passed && r.sigma_min < 1e-8, "{r:?}");
        assert!(local_rigidity_check(&s, &sup, &[0.01]).is_err());
    }

    #[test]
    fn rigidity_survives_basepoint_change() {
        let s = torus();
        let sup = Support::pants_curves(&s, &[0]).unwrap();
        let a = local_rigidity_check(&s, &sup, &[0.8]).unwrap().sigma_min;
        let c = rotation_about(HypPoint::new(0.7, 0.6).unwrap(), 2.0);
        let moved: Vec<Isometry> = s.holonomy().iter().map(|g| g.conjugate_by(&c)).collect();
        let coords = holonomy_to_fn(&moved, s.decomposition()).unwrap();
        let t = assemble(s.decomposition(), &coords, s.angles()).unwrap();
        let b = local_rigidity_check(&t, &sup, &[0.8]).unwrap().sigma_min;
        assert!((a - b).abs() < 0.1 * a, "{a} {b}");
    }

    #[test]
    fn probe_bounds() {
        let s = four_cone();
        let dir = WeightedMulticurve::on_pants_curves(s.decomposition(), &[(0, 1.0)]).unwrap();
        let p = properness_probe(&s, &dir, &[0.0, 1.0, 10.0, 100.0]).unwrap();
        assert!(p.diverges, "{p:?}");
        assert!(p.rows[0].bound < 0.0);
        let mass = p.rows[1].bound + p.rows[1].before;
        assert!(mass > 0.0);
        for r in &p.rows[1..] {
            assert!(r.before + r.after - r.scale * mass >= -1e-9, "{r:?}");
        }
        assert!(p.rows[3].after > 50.0 * mass);
        let empty = properness_probe(&s, &WeightedMulticurve::empty(), &[1.0]).unwrap();
        assert!(empty.notice.is_some() && !empty.diverges);
    }

    #[test]
    fn mess_inverse_round_trip() {
        let s = four_cone();
        let sup = Support::pants_curves(&s, &[0]).unwrap();
        let same = mess_inverse(&s, &s, &sup).unwrap();
        assert!(same.bending[0].abs() < 1e-9);
        let lambda_plus = sup.multicurve(&s, &[0.35]).unwrap();
        let g = from_bending(&BendData { h_plus: s.clone(), lambda_plus }).unwrap();
        let (mu_l, mu_r) = left_right_metrics(&g).unwrap();
        let back = mess_inverse(&mu_l, &mu_r, &sup).unwrap();
        assert!((back.bending[0] - 0.35).abs() < 1e-6, "{:?}", back.bending);
        assert!((back.solver.weights[0] - 0.7).abs() < 1e-6);
        for a in back.data.particle_angles().unwrap() {
            assert!((a - PI / 2.0).abs() < 1e-10);
        }
    }
}
