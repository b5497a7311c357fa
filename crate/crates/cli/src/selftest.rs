//! Quick versions of the acceptance checks on the fixtures compiled into the
//! binary, deterministic given `--seed`.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use adsquake::ads::{diagram_check, flow_curvature_check, from_bending, jacobi_check, left_right_metrics, BendData};
use adsquake::earthquake::{earthquake_cocycle, earthquake_twist, length_inequality_check, Side, WeightedMulticurve};
use adsquake::files::{EmbeddingFile, MulticurveFile, SurfaceFile};
use adsquake::solver::{invert_earthquake, local_rigidity_check, mess_inverse, InversionProblem, Support};
use adsquake::surface::{gauss_bonnet_area, teich_distance, triangulated_area, ConeSurface};
use adsquake::volume::{cos_sin_integral, cos_squared_integral, omega_volume_closed, omega_volume_numeric, bending_length};

use crate::report::{Failure, Report};
use crate::Options;

const FOUR: &str = include_str!("../../../fixtures/four_cone_sphere.json");
const TORUS: &str = include_str!("../../../fixtures/one_cone_torus.json");
const FIVE: &str = include_str!("../../../fixtures/five_cone_sphere.json");
const TWO: &str = include_str!("../../../fixtures/two_pants_curves.json");
const FINE: &str = include_str!("../../../fixtures/embedding.json");
const COARSE: &str = include_str!("../../../fixtures/embedding_coarse.json");

fn parse<T: serde::de::DeserializeOwned>(name: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Internal(format!("embedded {name}: {e}")))
}

fn surface(name: &str, text: &str) -> Result<ConeSurface, Failure> {
    Ok(parse::<SurfaceFile>(name, text)?.build()?)
}

fn single(s: &ConeSurface, w: f64) -> Result<WeightedMulticurve, Failure> {
    Ok(WeightedMulticurve::on_pants_curves(s.decomposition(), &[(0, w)])?)
}

pub fn run(o: &Options) -> Result<Report, Failure> {
    let four = surface("four_cone_sphere", FOUR)?;
    let torus = surface("one_cone_torus", TORUS)?;
    let five = surface("five_cone_sphere", FIVE)?;
    let two = parse::<MulticurveFile>("two_pants_curves", TWO)?.build(five.decomposition())?;
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let mut r = Report::new("selftest", Vec::new());
    r.notes.push(format!("seed {}", o.seed));

    let mut inverse: f64 = 0.0;
    let mut gap: f64 = 0.0;
    let mut slack = f64::INFINITY;
    let mut weights: f64 = 0.0;
    let mut rigidity = f64::INFINITY;
    for s in [&four, &torus] {
        for _ in 0..10 {
            let lam = single(s, rng.gen_range(0.05..=3.0))?;
            let back = earthquake_twist(&earthquake_twist(s, &lam, Side::Right, true)?, &lam, Side::Left, true)?;
            inverse = inverse.max(teich_distance(&back, s)?);
            let tw = earthquake_twist(s, &lam, Side::Right, true)?;
            gap = gap.max(tw.spectrum()?.distance(&earthquake_cocycle(s, &lam, Side::Right)?.spectrum()?)?);
            for gamma in s.decomposition().determining_system() {
                slack = slack.min(length_inequality_check(s, &lam, &gamma)?.slack());
            }
        }
        let sup = Support::pants_curves(s, &[0])?;
        for w in [0.3, 1.2, 2.7] {
            let target = earthquake_twist(s, &single(s, w)?, Side::Right, true)?;
            match invert_earthquake(&InversionProblem::new(s.clone(), target, sup.clone())) {
                Ok(rep) => weights = weights.max((rep.weights[0] - w).abs()),
                Err(_) => weights = f64::INFINITY,
            }
            rigidity = rigidity.min(local_rigidity_check(s, &sup, &[w])?.sigma_min);
        }
    }
    let w2 = [rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)];
    let sup2 = Support::pants_curves(&five, &[0, 1])?;
    let lam2 = sup2.multicurve(&five, &w2)?;
    let target = earthquake_twist(&five, &lam2, Side::Right, true)?;
    gap = gap.max(target.spectrum()?.distance(&earthquake_cocycle(&five, &lam2, Side::Right)?.spectrum()?)?);
    match invert_earthquake(&InversionProblem::new(five.clone(), target, sup2.clone())) {
        Ok(rep) => weights = weights.max(rep.weights.iter().zip(&w2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)),
        Err(_) => weights = f64::INFINITY,
    }
    rigidity = rigidity.min(local_rigidity_check(&five, &sup2, &w2)?.sigma_min);
    r.check("inverse_law", inverse, 1e-8);
    r.check("route_gap", gap, 1e-8);
    r.check("length_inequality_violation", (-slack).max(0.0), 1e-9);
    r.check("inversion_weight_error", weights, 1e-6);
    r.check("rigidity_inverse_sigma_min", 1.0 / rigidity, 1e6);

    let b = BendData { h_plus: five.clone(), lambda_plus: two.clone() };
    let d = diagram_check(&b)?;
    r.check("diagram", d.left.max(d.right).max(d.doubled), 1e-7);
    let g = from_bending(&b)?;
    let (mu_l, mu_r) = left_right_metrics(&g)?;
    let m = mess_inverse(&mu_l, &mu_r, &sup2)?;
    r.check("mess_round_trip", m.left_residual.max(m.right_residual), 1e-7);

    r.check("cos_squared_integral", (cos_squared_integral(10_000) - std::f64::consts::FRAC_PI_4).abs(), 1e-10);
    r.check("cos_sin_integral", (cos_sin_integral(10_000) - 0.5).abs(), 1e-10);
    let area = gauss_bonnet_area(five.angles().as_slice(), 0)?;
    let closed = omega_volume_closed(area, bending_length(&five, &two)?)?;
    r.check("volume_quadrature", (omega_volume_numeric(&five, &two, 10_000)?.value - closed).abs(), 1e-6);
    r.check("triangulated_area", (triangulated_area(&four, 6) - gauss_bonnet_area(four.angles().as_slice(), 0)?).abs(), 1e-6);

    let fine = flow_curvature_check(&parse::<EmbeddingFile>("embedding", FINE)?.build()?, 0.5)?;
    let coarse = flow_curvature_check(&parse::<EmbeddingFile>("embedding_coarse", COARSE)?.build()?, 0.5)?;
    r.check("flow_curvature", fine.max_deviation, 1e-4);
    r.check("flow_refinement_ratio_offset", (coarse.max_deviation / fine.max_deviation - 4.0).abs(), 0.5);
    let mut jacobi: f64 = 0.0;
    for _ in 0..10 {
        let v0 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let v1 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        jacobi = jacobi.max(jacobi_check(v0, v1, FRAC_PI_2)?.deviation);
    }
    r.check("jacobi", jacobi, 1e-6);
    Ok(r)
}
