//! Acceptance criteria 1 to 10, one line each. Runs from the shipped
//! fixtures under `fixtures/` and fixed seeds.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use adsquake::ads::{
    diagram_check, flow_curvature_check, from_bending, jacobi_check, left_right_metrics, BendData, GhmcData,
};
use adsquake::earthquake::{earthquake_cocycle, earthquake_twist, length_inequality_check, Side, WeightedMulticurve};
use adsquake::files::{EmbeddingFile, MulticurveFile, SurfaceFile};
use adsquake::solver::{invert_earthquake, local_rigidity_check, mess_inverse, properness_probe, InversionProblem, Support};
use adsquake::surface::{
    assemble, equals_in_teich, gauss_bonnet_area, representation_distance, teich_distance, triangulated_area,
    ConeAngles, ConeSurface, FnCoordinates,
};
use adsquake::volume::{
    bending_length, cos_sin_integral, cos_squared_integral, omega_volume_closed, omega_volume_numeric,
    total_volume_identity,
};
use adsquake::Result;

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn read<T: serde::de::DeserializeOwned>(name: &str) -> T {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

struct Fixtures {
    four: ConeSurface,
    torus: ConeSurface,
    five: ConeSurface,
    pants: MulticurveFile,
    two: MulticurveFile,
    fine: EmbeddingFile,
    coarse: EmbeddingFile,
}

impl Fixtures {
    fn load() -> Fixtures {
        let surface = |name: &str| read::<SurfaceFile>(name).build().unwrap_or_else(|e| panic!("{name}: {e}"));
        Fixtures {
            four: surface("four_cone_sphere.json"),
            torus: surface("one_cone_torus.json"),
            five: surface("five_cone_sphere.json"),
            pants: read("pants_curve.json"),
            two: read("two_pants_curves.json"),
            fine: read("embedding.json"),
            coarse: read("embedding_coarse.json"),
        }
    }

    /// The two surfaces with a single pants curve.
    fn single(&self) -> [&ConeSurface; 2] {
        [&self.four, &self.torus]
    }
}

fn single(s: &ConeSurface, w: f64) -> WeightedMulticurve {
    WeightedMulticurve::on_pants_curves(s.decomposition(), &[(0, w)]).unwrap()
}

/// Same topology and angles as `s` with new coordinates.
fn recoordinate(s: &ConeSurface, coords: &[(f64, f64)]) -> Result<ConeSurface> {
    assemble(s.decomposition(), &FnCoordinates::new(coords), s.angles())
}

fn random_coords(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n).map(|_| (rng.gen_range(0.5..2.5), rng.gen_range(-1.0..1.0))).collect()
}

/// Random pants-supported multicurve on `s` with weights in `[lo, hi]`.
fn random_lambda(rng: &mut ChaCha8Rng, s: &ConeSurface, lo: f64, hi: f64) -> WeightedMulticurve {
    let ws: Vec<(usize, f64)> = (0..s.decomposition().n_curves()).map(|e| (e, rng.gen_range(lo..=hi))).collect();
    WeightedMulticurve::on_pants_curves(s.decomposition(), &ws).unwrap()
}

fn angle_drift(found: &[f64], want: &ConeAngles) -> f64 {
    found.iter().zip(want.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn inverse_law(f: &Fixtures) -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for s in f.single() {
        for _ in 0..50 {
            let lam = single(s, rng.gen_range(0.05..=3.0));
            let back = earthquake_twist(&earthquake_twist(s, &lam, Side::Right, true)?, &lam, Side::Left, true)?;
            // The same composition through the cocycle, which never touches
            // the twist coordinates directly.
            let moved = earthquake_cocycle(s, &lam, Side::Right)?.into_surface()?;
            let back_co = earthquake_cocycle(&moved, &lam, Side::Left)?.into_surface()?;
            for b in [&back, &back_co] {
                worst = worst.max(teich_distance(b, s)?);
                failures += usize::from(!equals_in_teich(b, s, 1e-8)?);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(failures == 0 && secs < 10.0, format!("100 cases on two routes, max distance {worst:.2e}, {failures} over 1e-8, {secs:.2}s (< 10s)"))
}

fn routes_agree(f: &Fixtures) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let surfaces = [&f.four, &f.torus, &f.five];
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let s = surfaces[k % 3];
        let lam = random_lambda(&mut rng, s, 0.05, 3.0);
        let side = if k % 2 == 0 { Side::Right } else { Side::Left };
        let tw = earthquake_twist(s, &lam, side, true)?.spectrum()?;
        let co = earthquake_cocycle(s, &lam, side)?.spectrum()?;
        worst = worst.max(tw.distance(&co)?);
    }
    outcome(worst <= 1e-8, format!("50 cases, max spectrum gap {worst:.2e} (<= 1e-8)"))
}

fn length_inequality(f: &Fixtures) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bases = [&f.four, &f.torus, &f.five];
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    let mut done = 0;
    while done < 1000 {
        let base = bases[done % 3];
        let Ok(h) = recoordinate(base, &random_coords(&mut rng, base.decomposition().n_curves())) else { continue };
        let lam = random_lambda(&mut rng, &h, 0.05, 5.0);
        let sys = h.decomposition().determining_system();
        let gamma = &sys[rng.gen_range(0..sys.len())];
        let slack = length_inequality_check(&h, &lam, gamma)?.slack();
        worst = worst.min(slack);
        violations += usize::from(slack < -1e-9);
        done += 1;
    }
    let mut rows = 0;
    let mut probe_ok = true;
    for (s, m) in [(&f.four, &f.pants), (&f.torus, &f.pants), (&f.five, &f.two)] {
        let rep = properness_probe(s, &m.build(s.decomposition())?, &[1.0, 10.0, 100.0])?;
        probe_ok &= rep.curve.is_some() && rep.diverges;
        rows += rep.rows.len();
    }
    outcome(
        violations == 0 && probe_ok,
        format!("1000 triples, min slack {worst:.3e}, {violations} below -1e-9; {rows} scaled bounds hold: {probe_ok}"),
    )
}

fn inversion_grid(f: &Fixtures) -> Result<Outcome> {
    let start = Instant::now();
    let grid = [0.2, 0.9, 1.6, 2.3, 3.0];
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut failures = 0;
    let mut check = |s: &ConeSurface, planted: &[f64], support: &Support| -> Result<()> {
        let lam = support.multicurve(s, planted)?;
        let target = earthquake_twist(s, &lam, Side::Right, true)?;
        cases += 1;
        match invert_earthquake(&InversionProblem::new(s.clone(), target, support.clone())) {
            Ok(r) => {
                let err = r.weights.iter().zip(planted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                worst = worst.max(err);
                failures += usize::from(err > 1e-6);
            }
            Err(_) => failures += 1,
        }
        Ok(())
    };
    for s in f.single() {
        let sup = Support::pants_curves(s, &[0])?;
        // One curve, so the 25 grid points are spread along a single axis.
        for k in 0..25 {
            check(s, &[0.2 + 2.8 * k as f64 / 24.0], &sup)?;
        }
    }
    let sup = Support::pants_curves(&f.five, &[0, 1])?;
    for &a in &grid {
        for &b in &grid {
            check(&f.five, &[a, b], &sup)?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && secs < 60.0,
        format!("{cases} inversions, max weight error {worst:.2e}, {failures} failed, {secs:.2}s (< 60s)"),
    )
}

/// Twenty bending data on randomized surfaces of the three fixture shapes.
fn bend_data(f: &Fixtures) -> Vec<BendData> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bases = [&f.four, &f.torus, &f.five];
    let mut out = Vec::new();
    while out.len() < 20 {
        let base = bases[out.len() % 3];
        let Ok(h_plus) = recoordinate(base, &random_coords(&mut rng, base.decomposition().n_curves())) else { continue };
        let lambda_plus = random_lambda(&mut rng, &h_plus, 0.05, 1.5);
        out.push(BendData { h_plus, lambda_plus });
    }
    out
}

fn support_of(b: &BendData) -> Result<Support> {
    let d = b.h_plus.decomposition();
    Support::pants_curves(&b.h_plus, &(0..d.n_curves()).collect::<Vec<_>>())
}

fn mess_round_trip(data: &[BendData]) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for b in data {
        let g = from_bending(b)?;
        let (mu_l, mu_r) = left_right_metrics(&g)?;
        let back = mess_inverse(&mu_l, &mu_r, &support_of(b)?)?;
        let d = g.decomposition();
        let (l2, r2) = left_right_metrics(&back.data)?;
        worst = worst
            .max(representation_distance(d, back.data.rho_l(), g.rho_l())?)
            .max(representation_distance(d, back.data.rho_r(), g.rho_r())?)
            .max(teich_distance(&l2, &mu_l)?)
            .max(teich_distance(&r2, &mu_r)?);
    }
    outcome(worst <= 1e-7, format!("{} instances, max spectrum gap {worst:.2e} (<= 1e-7)", data.len()))
}

fn diagram(data: &[BendData]) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for b in data {
        let r = diagram_check(b)?;
        worst = worst.max(r.left).max(r.right).max(r.doubled);
        failures += usize::from(!r.passed);
    }
    outcome(failures == 0 && worst <= 1e-7, format!("{} instances x 3 identities, max residual {worst:.2e} (<= 1e-7)", data.len()))
}

fn volume(f: &Fixtures) -> Result<Outcome> {
    let c2 = (cos_squared_integral(10_000) - FRAC_PI_4).abs();
    let cs = (cos_sin_integral(10_000) - 0.5).abs();
    let mut quad: f64 = 0.0;
    for (s, m) in [(&f.four, &f.pants), (&f.torus, &f.pants), (&f.five, &f.two)] {
        let lam = m.build(s.decomposition())?;
        let area = gauss_bonnet_area(s.angles().as_slice(), s.genus())?;
        let closed = omega_volume_closed(area, bending_length(s, &lam)?)?;
        quad = quad.max((omega_volume_numeric(s, &lam, 10_000)?.value - closed).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut identity: f64 = 0.0;
    let mut tried = 0;
    while tried < 200 {
        let n = rng.gen_range(1..7);
        let genus = rng.gen_range(0..3usize);
        let angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        let Ok(a) = gauss_bonnet_area(&angles, genus) else { continue };
        let id = total_volume_identity(&angles, genus, a, a, rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))?;
        identity = identity.max(id.residual);
        tried += 1;
    }
    let area = (triangulated_area(&f.four, 6) - gauss_bonnet_area(f.four.angles().as_slice(), 0)?).abs();
    let passed = c2 <= 1e-10 && cs <= 1e-10 && quad <= 1e-6 && identity <= 1e-12 && area <= 1e-6;
    outcome(
        passed,
        format!(
            "integrals {c2:.1e}, {cs:.1e} (<= 1e-10); quadrature {quad:.1e} (<= 1e-6); identity {identity:.1e} (<= 1e-12); area {area:.1e} (<= 1e-6)"
        ),
    )
}

fn local_formulas(f: &Fixtures) -> Result<Outcome> {
    let fine = flow_curvature_check(&f.fine.build()?, 0.5)?;
    let coarse = flow_curvature_check(&f.coarse.build()?, 0.5)?;
    let ratio = coarse.max_deviation / fine.max_deviation;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut deviation: f64 = 0.0;
    let mut min_norm = f64::INFINITY;
    for _ in 0..100 {
        let v0 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let mut v1 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if v0[0] * v1[0] + v0[1] * v1[1] < 0.0 {
            v1 = [-v1[0], -v1[1]];
        }
        let r = jacobi_check(v0, v1, FRAC_PI_2)?;
        deviation = deviation.max(r.deviation);
        min_norm = min_norm.min(r.min_norm);
    }
    let passed = fine.max_deviation < 1e-4 && fine.gauss_ok && (3.5..=4.5).contains(&ratio) && deviation < 1e-6 && min_norm > 0.0;
    outcome(
        passed,
        format!(
            "flow curvature {:.2e} (< 1e-4), refinement ratio {ratio:.3} in [3.5, 4.5]; jacobi {deviation:.2e} (< 1e-6), min |J| {min_norm:.2e} on 100 pairs",
            fine.max_deviation
        ),
    )
}

fn angles_preserved(f: &Fixtures, data: &[BendData]) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut outputs = 0;
    for k in 0..30 {
        let s = [&f.four, &f.torus, &f.five][k % 3];
        let lam = random_lambda(&mut rng, s, 0.05, 3.0);
        for side in [Side::Right, Side::Left] {
            worst = worst.max(angle_drift(&earthquake_twist(s, &lam, side, true)?.peripheral_angles()?, s.angles()));
            worst = worst.max(earthquake_cocycle(s, &lam, side)?.peripheral_residual()?);
            outputs += 2;
        }
    }
    let particles = |g: &GhmcData| -> Result<f64> { Ok(angle_drift(&g.particle_angles()?, g.angles())) };
    for b in data {
        let g = from_bending(b)?;
        let (mu_l, mu_r) = left_right_metrics(&g)?;
        let back = mess_inverse(&mu_l, &mu_r, &support_of(b)?)?;
        worst = worst.max(particles(&g)?).max(particles(&back.data)?);
        outputs += 2;
    }
    outcome(worst <= 1e-10, format!("{outputs} outputs, max angle drift {worst:.2e} (<= 1e-10)"))
}

fn rigidity(f: &Fixtures) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut sigma = f64::INFINITY;
    for k in 0..20 {
        let s = [&f.four, &f.torus, &f.five][k % 3];
        let n = s.decomposition().n_curves();
        let sup = Support::pants_curves(s, &(0..n).collect::<Vec<_>>())?;
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        sigma = sigma.min(local_rigidity_check(s, &sup, &w)?.sigma_min);
    }
    let c = f.four.decomposition().pants_curve(0).clone();
    let dup = local_rigidity_check(&f.four, &Support::new(&f.four, vec![c.clone(), c])?, &[0.5, 0.7])?;
    outcome(
        sigma > 1e-6 && !dup.passed,
        format!("min sigma {sigma:.3e} (> 1e-6) at 20 points; duplicated curve sigma_min {:.1e}, flagged {}", dup.sigma_min, !dup.passed),
    )
}

fn main() -> ExitCode {
    // libtest flags such as --nocapture or a filter are accepted and ignored.
    let f = Fixtures::load();
    let data = bend_data(&f);
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<Outcome> + '_>)> = vec![
        ("1 earthquake inverse law", Box::new(|| inverse_law(&f))),
        ("2 twist and cocycle routes", Box::new(|| routes_agree(&f))),
        ("3 length inequality", Box::new(|| length_inequality(&f))),
        ("4 inversion of planted weights", Box::new(|| inversion_grid(&f))),
        ("5 holonomy pair round trip", Box::new(|| mess_round_trip(&data))),
        ("6 diagram identities", Box::new(|| diagram(&data))),
        ("7 volumes", Box::new(|| volume(&f))),
        ("8 local formulas", Box::new(|| local_formulas(&f))),
        ("9 angle preservation", Box::new(|| angles_preserved(&f, &data))),
        ("10 local rigidity", Box::new(|| rigidity(&f))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!("{} criterion {name}: {detail} [{:.2}s]", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
