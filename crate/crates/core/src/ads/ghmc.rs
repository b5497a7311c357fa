//! Holonomy pairs of globally hyperbolic AdS manifolds with particles, built
//! from the bending data of the future boundary of the convex core.

use std::sync::Arc;

use serde::Serialize;

use crate::earthquake::{earthquake_cocycle, earthquake_twist, Side, WeightedMulticurve};
use crate::error::{Error, Result};
use crate::hyp::{rotation_about, HypPoint, Isometry};
use crate::surface::{
    assemble, conditioning, peripheral_residual, relator_residual, teich_distance, BlockDecomposition, ConeAngles,
    ConeSurface, HOLONOMY_TOL,
};

use super::recovery::holonomy_to_fn;

/// Angle agreement demanded of every peripheral rotation.
pub const ANGLE_TOL: f64 = 1e-10;

/// Left and right holonomies of a GHMC manifold with particles, in the marking
/// of `decomposition`.
#[derive(Clone, Debug, Serialize)]
pub struct GhmcData {
    decomposition: Arc<BlockDecomposition>,
    angles: ConeAngles,
    rho_l: Vec<Isometry>,
    rho_r: Vec<Isometry>,
}

impl GhmcData {
    pub fn new(
        decomposition: Arc<BlockDecomposition>,
        angles: ConeAngles,
        rho_l: Vec<Isometry>,
        rho_r: Vec<Isometry>,
    ) -> Result<Self> {
        let d = &decomposition;
        for (name, rho) in [("left", &rho_l), ("right", &rho_r)] {
            if rho.len() != d.n_generators() {
                return Err(Error::InvalidInput(format!("{name} holonomy has {} images", rho.len())));
            }
            let tol = HOLONOMY_TOL * conditioning(rho.iter());
            let r = relator_residual(d, rho);
            if r > tol {
                return Err(Error::Inconsistent(format!("{name} holonomy relator residual {r:.3e}")));
            }
            let p = peripheral_residual(d, rho, &angles)?;
            if p > ANGLE_TOL {
                return Err(Error::NotARotation(format!("{name} holonomy moves a cone angle by {p:.3e}")));
            }
        }
        Ok(GhmcData { decomposition, angles, rho_l, rho_r })
    }

    pub fn decomposition(&self) -> &Arc<BlockDecomposition> {
        &self.decomposition
    }

    pub fn angles(&self) -> &ConeAngles {
        &self.angles
    }

    pub fn rho_l(&self) -> &[Isometry] {
        &self.rho_l
    }

    pub fn rho_r(&self) -> &[Isometry] {
        &self.rho_r
    }

    /// Rotation angle shared by the two factors around each particle.
    pub fn particle_angles(&self) -> Result<Vec<f64>> {
        self.decomposition
            .peripherals()
            .iter()
            .map(|p| decompose_rotation_pair((p.word.eval(&self.rho_l), p.word.eval(&self.rho_r))))
            .collect()
    }
}

/// Induced metric and bending lamination of the future boundary of the convex core.
#[derive(Clone, Debug)]
pub struct BendData {
    pub h_plus: ConeSurface,
    pub lambda_plus: WeightedMulticurve,
}

/// The holonomy pair bent along `lambda_plus`: the left factor is the left
/// earthquake cocycle applied to the holonomy of `h_plus`, the right factor
/// the right one.
pub fn from_bending(b: &BendData) -> Result<GhmcData> {
    let left = earthquake_cocycle(&b.h_plus, &b.lambda_plus, Side::Left)?;
    let right = earthquake_cocycle(&b.h_plus, &b.lambda_plus, Side::Right)?;
    GhmcData::new(
        b.h_plus.decomposition().clone(),
        b.h_plus.angles().clone(),
        left.images().to_vec(),
        right.images().to_vec(),
    )
}

/// The hyperbolic cone surfaces `(mu_l, mu_r)` with holonomies `rho_l`, `rho_r`.
pub fn left_right_metrics(g: &GhmcData) -> Result<(ConeSurface, ConeSurface)> {
    let d = g.decomposition();
    let left = assemble(d, &holonomy_to_fn(&g.rho_l, d)?, &g.angles)?;
    let right = assemble(d, &holonomy_to_fn(&g.rho_r, d)?, &g.angles)?;
    Ok((left, right))
}

/// Residuals of the three earthquake identities relating the boundary data
/// to the left and right metrics.
#[derive(Clone, Debug, Serialize)]
pub struct DiagramReport {
    /// `mu_l` against the left earthquake of `h_plus`.
    pub left: f64,
    /// `mu_r` against the right earthquake of `h_plus`.
    pub right: f64,
    /// `mu_r` against the right earthquake of `mu_l` along twice the lamination.
    pub doubled: f64,
    pub tol: f64,
    pub passed: bool,
}

pub const DIAGRAM_TOL: f64 = 1e-7;

/// Rebuilds `(mu_l, mu_r)` from the bent holonomy and compares them with
/// earthquakes computed on the twist route.
pub fn diagram_check(b: &BendData) -> Result<DiagramReport> {
    let (mu_l, mu_r) = left_right_metrics(&from_bending(b)?)?;
    let lam = &b.lambda_plus;
    let left = teich_distance(&mu_l, &earthquake_twist(&b.h_plus, lam, Side::Left, true)?)?;
    let right = teich_distance(&mu_r, &earthquake_twist(&b.h_plus, lam, Side::Right, true)?)?;
    let doubled = teich_distance(&mu_r, &earthquake_twist(&mu_l, &lam.scaled(2.0)?, Side::Right, true)?)?;
    let passed = left.max(right).max(doubled) <= DIAGRAM_TOL;
    Ok(DiagramReport { left, right, doubled, tol: DIAGRAM_TOL, passed })
}

/// Rotations by the same angle `theta` about `axis_l` and `axis_r`: the
/// holonomy of a particle of angle `theta`.
pub fn pure_rotation_pair(theta: f64, axis_l: HypPoint, axis_r: HypPoint) -> Result<(Isometry, Isometry)> {
    if !(theta > 0.0 && theta < std::f64::consts::TAU) {
        return Err(Error::InvalidInput(format!("rotation angle {theta} outside (0, 2 pi)")));
    }
    Ok((rotation_about(axis_l, theta), rotation_about(axis_r, theta)))
}

/// The common rotation angle of a pair, or an error if the factors are not
/// rotations by the same angle.
pub fn decompose_rotation_pair(pair: (Isometry, Isometry)) -> Result<f64> {
    let a = pair.0.rotation_angle().map_err(|e| Error::NotARotation(format!("left factor: {e}")))?;
    let b = pair.1.rotation_angle().map_err(|e| Error::NotARotation(format!("right factor: {e}")))?;
    if (a - b).abs() > ANGLE_TOL {
        return Err(Error::NotARotation(format!("left angle {a} and right angle {b} differ")));
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::earthquake::left_earthquake;
    use crate::surface::{equals_in_teich, FnCoordinates, LengthSpectrum};

    fn four_cone(t: f64) -> ConeSurface {
        let d = Arc::new(BlockDecomposition::cone_sphere(4).unwrap());
        assemble(&d, &FnCoordinates::new(&[(1.0, t)]), &ConeAngles::uniform(4, PI / 2.0).unwrap()).unwrap()
    }

    fn bend(w: f64) -> BendData {
        let h = four_cone(0.0);
        let lambda_plus = WeightedMulticurve::on_pants_curves(h.decomposition(), &[(0, w)]).unwrap();
        BendData { h_plus: h, lambda_plus }
    }

    #[test]
    fn zero_bending_is_fuchsian() {
        let b = bend(0.0);
        let g = from_bending(&b).unwrap();
        for ((l, r), h) in g.rho_l().iter().zip(g.rho_r()).zip(b.h_plus.holonomy()) {
            assert!(l.distance(h) < 1e-14 && r.distance(h) < 1e-14);
        }
        let (mu_l, mu_r) = left_right_metrics(&g).unwrap();
        assert!(equals_in_teich(&mu_l, &b.h_plus, 1e-9).unwrap());
        assert!(equals_in_teich(&mu_r, &b.h_plus, 1e-9).unwrap());
        let rep = diagram_check(&b).unwrap();
        assert!(rep.left.max(rep.right).max(rep.doubled) < 1e-9);
    }

    #[test]
    fn bending_keeps_particle_angles() {
        let g = from_bending(&bend(0.25)).unwrap();
        for a in g.particle_angles().unwrap() {
            assert!((a - PI / 2.0).abs() < ANGLE_TOL);
        }
    }

    #[test]
    fn left_factor_is_the_left_earthquake() {
        let b = bend(0.25);
        let g = from_bending(&b).unwrap();
        let system = b.h_plus.decomposition().determining_system();
        let got = LengthSpectrum::of(g.rho_l(), &system).unwrap();
        let want = left_earthquake(&b.h_plus, &b.lambda_plus).unwrap().length_spectrum(&system).unwrap();
        assert!(got.distance(&want).unwrap() < 1e-9);
        let (mu_l, mu_r) = left_right_metrics(&g).unwrap();
        let (sl, sr) = (mu_l.spectrum().unwrap().lengths(), mu_r.spectrum().unwrap().lengths());
        assert!((sl[1] - sr[1]).abs() > 1e-3);
    }

    #[test]
    fn diagram_identities() {
        for w in [0.25, 0.5, 1.3] {
            let rep = diagram_check(&bend(w)).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn rotation_pairs() {
        let (p, q) = (HypPoint::new(0.3, 1.2).unwrap(), HypPoint::new(-1.0, 0.4).unwrap());
        for theta in [PI / 2.0, 0.3, 2.9, 4.0] {
            let pair = pure_rotation_pair(theta, p, q).unwrap();
            assert!((decompose_rotation_pair(pair).unwrap() - theta).abs() < 1e-10);
            let c = rotation_about(HypPoint::new(2.0, 3.0).unwrap(), 1.1);
            let moved = (pair.0.conjugate_by(&c), pair.1.conjugate_by(&c));
            assert!((decompose_rotation_pair(moved).unwrap() - theta).abs() < 1e-10);
        }
        let mixed = (rotation_about(p, PI / 2.0), rotation_about(q, PI / 3.0));
        assert!(matches!(decompose_rotation_pair(mixed), Err(Error::NotARotation(_))));
        assert!(pure_rotation_pair(0.0, p, q).is_err());
    }
}
