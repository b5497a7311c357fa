use std::path::Path;

use serde::Serialize;

use adsquake::ads::ghmc::ANGLE_TOL;
use adsquake::ads::{diagram_check, from_bending, left_right_metrics, BendData, GhmcData};
use adsquake::earthquake::{earthquake_cocycle, earthquake_twist, Side};
use adsquake::files::SurfaceFile;
use adsquake::solver::{invert_earthquake, mess_inverse, properness_probe, InversionProblem, SolverReport, MESS_TOL, SOLVER_TOL};
use adsquake::surface::{conditioning, gauss_bonnet_area, triangulated_area, ConeAngles, ConeSurface, LengthSpectrum};
use adsquake::volume::volume_report;
use adsquake::Error;

use crate::input::{check_version, resolve, support, BendFile, Inputs, InvertFile, MessFile};
use crate::report::{Failure, Report};
use crate::Options;

fn angle_drift(found: &[f64], want: &ConeAngles) -> f64 {
    found.iter().zip(want.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn particle_drift(g: &GhmcData) -> Result<f64, Failure> {
    Ok(angle_drift(&g.particle_angles()?, g.angles()))
}

#[derive(Serialize)]
struct Built {
    surface: SurfaceFile,
    holonomy: Vec<adsquake::hyp::Isometry>,
    spectrum: LengthSpectrum,
    conditioning: f64,
    area: f64,
    triangulated_area: f64,
}

pub fn build(path: &Path, o: &Options) -> Result<Report, Failure> {
    let mut inputs = Inputs::default();
    let s = inputs.surface(path)?;
    let mut r = Report::new("build", inputs.digests);
    let cond = conditioning(s.holonomy());
    let tol = o.tol.unwrap_or(1e-9);
    r.check("relator", s.relator_residual(), tol * cond);
    r.check("peripheral_angle", s.peripheral_residual(), ANGLE_TOL);
    let area = gauss_bonnet_area(s.angles().as_slice(), s.genus())?;
    let tri = triangulated_area(&s, 6);
    r.check("area", (tri - area).abs(), 1e-6);
    r.set_result(&Built {
        surface: SurfaceFile::from_surface(&s),
        holonomy: s.holonomy().to_vec(),
        spectrum: s.spectrum()?,
        conditioning: cond,
        area,
        triangulated_area: tri,
    });
    Ok(r)
}

#[derive(Serialize)]
struct Moved {
    side: Side,
    surface: SurfaceFile,
    spectrum: LengthSpectrum,
}

pub fn earthquake(surface: &Path, multicurve: &Path, side: Side, o: &Options) -> Result<Report, Failure> {
    let mut inputs = Inputs::default();
    let s = inputs.surface(surface)?;
    let lambda = inputs.multicurve(multicurve, s.decomposition())?;
    let mut r = Report::new("earthquake", inputs.digests);
    let out = earthquake_twist(&s, &lambda, side, o.strict)?;
    r.check("angle_drift", angle_drift(&out.peripheral_angles()?, s.angles()), ANGLE_TOL);
    if lambda.pants_weights(s.decomposition()).is_ok() {
        let co = earthquake_cocycle(&s, &lambda, side)?;
        r.check("route_gap", out.spectrum()?.distance(&co.spectrum()?)?, o.tol.unwrap_or(1e-8));
    } else {
        r.notes.push("multicurve is not pants-supported; the cocycle route was not compared".into());
    }
    let file = SurfaceFile::from_surface(&out);
    r.artifact("surface.json", &file);
    r.set_result(&Moved { side, surface: file, spectrum: out.spectrum()? });
    Ok(r)
}

fn trace_csv(rep: &SolverReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let n = rep.weights.len();
    let mut header = vec!["iteration".to_string(), "residual".into(), "damping".into()];
    header.extend((0..n).map(|k| format!("w{k}")));
    w.write_record(&header).expect("in-memory write");
    for row in &rep.trace {
        let mut rec = vec![row.iteration.to_string(), format!("{:e}", row.residual), format!("{:e}", row.damping)];
        rec.extend(row.weights.iter().map(|x| x.to_string()));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn emit_trace(r: &mut Report, rep: &SolverReport, o: &Options) {
    if !o.trace {
        return;
    }
    let csv = trace_csv(rep);
    if o.out.is_some() {
        r.artifacts.push(("trace.csv".into(), csv));
    } else {
        eprint!("{csv}");
    }
}

/// Non-convergence is a tolerance failure with the residual it stopped at.
fn solver_failure(r: &mut Report, e: Error, tol: f64) -> Result<(), Failure> {
    match e {
        Error::NonConvergence { residual, iterations, weights } => {
            r.check("solver_residual", residual, tol);
            r.notes.push(format!("solver stopped after {iterations} iterations at weights {weights:?}"));
            Ok(())
        }
        e => Err(e.into()),
    }
}

pub fn invert(path: &Path, o: &Options) -> Result<Report, Failure> {
    let mut inputs = Inputs::default();
    let f: InvertFile = inputs.read(path)?;
    check_version(path, f.version)?;
    let source = inputs.surface(&resolve(path, &f.source))?;
    let target = inputs.surface(&resolve(path, &f.target))?;
    let sup = support(&source, &f.support)?;
    let mut r = Report::new("invert", inputs.digests);
    let mut p = InversionProblem::new(source, target, sup);
    p.tol = o.tol.unwrap_or(SOLVER_TOL);
    p.upper = f.upper.unwrap_or(p.upper);
    p.initial = f.initial;
    p.max_iterations = f.max_iterations.unwrap_or(p.max_iterations);
    match invert_earthquake(&p) {
        Ok(rep) => {
            r.check("solver_residual", rep.residual, p.tol);
            if let Some(want) = &f.expected {
                if want.len() != rep.weights.len() {
                    return Err(Failure::Input(format!("{}: at `expected`: {} weights for {} curves", path.display(), want.len(), rep.weights.len())));
                }
                let err = rep.weights.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                r.check("weight_error", err, 1e-6);
            }
            emit_trace(&mut r, &rep, o);
            r.set_result(&rep);
        }
        Err(e) => solver_failure(&mut r, e, p.tol)?,
    }
    Ok(r)
}

fn bend_data(path: &Path, inputs: &mut Inputs) -> Result<BendData, Failure> {
    let f: BendFile = inputs.read(path)?;
    check_version(path, f.version)?;
    let h_plus = inputs.surface(&resolve(path, &f.surface))?;
    let lambda_plus = inputs.multicurve(&resolve(path, &f.multicurve), h_plus.decomposition())?;
    Ok(BendData { h_plus, lambda_plus })
}

#[derive(Serialize)]
struct Diagram {
    report: adsquake::ads::DiagramReport,
    left: SurfaceFile,
    right: SurfaceFile,
}

pub fn diagram(path: &Path, o: &Options) -> Result<Report, Failure> {
    let mut inputs = Inputs::default();
    let b = bend_data(path, &mut inputs)?;
    let mut r = Report::new("diagram", inputs.digests);
    let tol = o.tol.unwrap_or(adsquake::ads::ghmc::DIAGRAM_TOL);
    let rep = diagram_check(&b)?;
    r.check("left", rep.left, tol);
    r.check("right", rep.right, tol);
    r.check("doubled", rep.doubled, tol);
    let g = from_bending(&b)?;
    r.check("particle_angle_drift", particle_drift(&g)?, ANGLE_TOL);
    let (mu_l, mu_r) = left_right_metrics(&g)?;
    let (left, right) = (SurfaceFile::from_surface(&mu_l), SurfaceFile::from_surface(&mu_r));
    r.artifact("left.json", &left);
    r.artifact("right.json", &right);
    r.set_result(&Diagram { report: rep, left, right });
    Ok(r)
}

#[derive(Serialize)]
struct Mess {
    bending: Vec<f64>,
    h_plus: SurfaceFile,
    data: GhmcData,
    solver: SolverReport,
}

pub fn mess(path: &Path, o: &Options) -> Result<Report, Failure> {
    let mut inputs = Inputs::default();
    let f: MessFile = inputs.read(path)?;
    check_version(path, f.version)?;
    let mu_l = inputs.surface(&resolve(path, &f.left))?;
    let mu_r = inputs.surface(&resolve(path, &f.right))?;
    let sup = support(&mu_l, &f.support)?;
    let mut r = Report::new("mess-inverse", inputs.digests);
    let tol = o.tol.unwrap_or(MESS_TOL);
    let m = match mess_inverse(&mu_l, &mu_r, &sup) {
        Ok(m) => m,
        Err(e) => {
            solver_failure(&mut r, e, SOLVER_TOL)?;
            return Ok(r);
        }
    };
    r.check("left", m.left_residual, tol);
    r.check("right", m.right_residual, tol);
    r.check("particle_angle_drift", particle_drift(&m.data)?, ANGLE_TOL);
    emit_trace(&mut r, &m.solver, o);
    let lambda_plus = sup.multicurve(&mu_l, &m.bending)?;
    let h_plus = SurfaceFile::from_surface(&earthquake_twist(&mu_l, &lambda_plus, Side::Right, true)?);
    r.artifact("h_plus.json", &h_plus);
    r.set_result(&Mess { bending: m.bending, h_plus, data: m.data, solver: m.solver });
    Ok(r)
}

pub fn volume(surface: &Path, multicurve: &Path, past_length: Option<f64>, o: &Options) -> Result<Report, Failure> {
    let mut inputs = Inputs::default();
    let s = inputs.surface(surface)?;
    let lambda = inputs.multicurve(multicurve, s.decomposition())?;
    let mut r = Report::new("volume", inputs.digests);
    let rep = volume_report(&s, &lambda, o.resolution.unwrap_or(10_000), past_length)?;
    r.check("quadrature", (rep.numeric.value - rep.closed).abs(), o.tol.unwrap_or(1e-6));
    if let Some(id) = &rep.identity {
        r.check("identity", id.residual, 1e-12);
    }
    r.set_result(&rep);
    Ok(r)
}

pub fn probe(surface: &Path, multicurve: &Path, scales: &[f64], o: &Options) -> Result<Report, Failure> {
    let mut inputs = Inputs::default();
    let s: ConeSurface = inputs.surface(surface)?;
    let lambda = inputs.multicurve(multicurve, s.decomposition())?;
    let mut r = Report::new("probe", inputs.digests);
    let rep = properness_probe(&s, &lambda, scales)?;
    // Shortfall below the linear lower bound; positive means a violation.
    let shortfall = rep.rows.iter().map(|row| row.bound - row.after).fold(f64::NEG_INFINITY, f64::max);
    if rep.curve.is_some() {
        r.check("shortfall", shortfall, o.tol.unwrap_or(1e-9));
    }
    r.notes.extend(rep.notice.clone());
    r.set_result(&rep);
    Ok(r)
}
