//! Browser bindings for a sphere with four equal cone points. Each export
//! takes the slider values and returns a JSON string for the page to render.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use adsquake::ads::{diagram_check, BendData};
use adsquake::earthquake::{earthquake_cocycle, earthquake_twist, Side, WeightedMulticurve};
use adsquake::surface::{assemble, conditioning, gauss_bonnet_area, BlockDecomposition, ConeAngles, ConeSurface, FnCoordinates};
use adsquake::Result;

fn sphere(theta: f64, length: f64, twist: f64) -> Result<ConeSurface> {
    let d = std::sync::Arc::new(BlockDecomposition::cone_sphere(4)?);
    assemble(&d, &FnCoordinates::new(&[(length, twist)]), &ConeAngles::uniform(4, theta)?)
}

fn along_curve(s: &ConeSurface, weight: f64) -> Result<WeightedMulticurve> {
    WeightedMulticurve::on_pants_curves(s.decomposition(), &[(0, weight)])
}

#[derive(Serialize)]
pub struct Summary {
    pub lengths: Vec<f64>,
    pub area: f64,
    pub conditioning: f64,
    pub relator: f64,
    pub peripheral: f64,
}

pub fn summary(theta: f64, length: f64, twist: f64) -> Result<Summary> {
    let s = sphere(theta, length, twist)?;
    Ok(Summary {
        lengths: s.spectrum()?.lengths(),
        area: gauss_bonnet_area(s.angles().as_slice(), 0)?,
        conditioning: conditioning(s.holonomy()),
        relator: s.relator_residual(),
        peripheral: s.peripheral_residual(),
    })
}

#[derive(Serialize)]
pub struct Path {
    pub weights: Vec<f64>,
    /// One row per weight: lengths of the determining curves after a right earthquake.
    pub lengths: Vec<Vec<f64>>,
    /// Largest gap between the twist and cocycle routes along the path.
    pub route_gap: f64,
}

pub fn earthquake_path(theta: f64, length: f64, twist: f64, max_weight: f64, samples: usize) -> Result<Path> {
    let s = sphere(theta, length, twist)?;
    let n = samples.max(2);
    let mut p = Path { weights: Vec::with_capacity(n), lengths: Vec::with_capacity(n), route_gap: 0.0 };
    for k in 0..n {
        let w = max_weight * k as f64 / (n - 1) as f64;
        let lam = along_curve(&s, w)?;
        let moved = earthquake_twist(&s, &lam, Side::Right, true)?.spectrum()?;
        let co = earthquake_cocycle(&s, &lam, Side::Right)?.spectrum()?;
        p.route_gap = p.route_gap.max(moved.distance(&co)?);
        p.weights.push(w);
        p.lengths.push(moved.lengths());
    }
    Ok(p)
}

#[derive(Serialize)]
pub struct Diagram {
    pub left: f64,
    pub right: f64,
    pub doubled: f64,
}

pub fn diagram(theta: f64, length: f64, twist: f64, bending: f64) -> Result<Diagram> {
    let h_plus = sphere(theta, length, twist)?;
    let lambda_plus = along_curve(&h_plus, bending)?;
    let r = diagram_check(&BendData { h_plus, lambda_plus })?;
    Ok(Diagram { left: r.left, right: r.right, doubled: r.doubled })
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = summary)]
pub fn summary_js(theta: f64, length: f64, twist: f64) -> std::result::Result<String, JsError> {
    to_js(summary(theta, length, twist))
}

#[wasm_bindgen(js_name = earthquakePath)]
pub fn earthquake_path_js(theta: f64, length: f64, twist: f64, max_weight: f64, samples: usize) -> std::result::Result<String, JsError> {
    to_js(earthquake_path(theta, length, twist, max_weight, samples))
}

#[wasm_bindgen(js_name = diagram)]
pub fn diagram_js(theta: f64, length: f64, twist: f64, bending: f64) -> std::result::Result<String, JsError> {
    to_js(diagram(theta, length, twist, bending))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_area_matches_angles() {
        let s = summary(1.0, 1.2, 0.3).unwrap();
        assert!((s.area - (4.0 * std::f64::consts::PI - 4.0)).abs() < 1e-12);
        assert!(s.peripheral < 1e-10);
    }

    #[test]
    fn path_starts_at_the_surface() {
        let p = earthquake_path(1.0, 1.2, 0.3, 2.0, 5).unwrap();
        assert_eq!(p.weights.len(), 5);
        assert_eq!(p.lengths[0], summary(1.0, 1.2, 0.3).unwrap().lengths);
        assert!(p.route_gap < 1e-8);
    }

    #[test]
    fn diagram_closes() {
        let d = diagram(1.5, 1.0, 0.0, 0.8).unwrap();
        assert!(d.left.max(d.right).max(d.doubled) < 1e-7);
    }

    #[test]
    fn bad_angle_is_an_error() {
        assert!(summary(4.0, 1.0, 0.0).is_err());
    }
}
