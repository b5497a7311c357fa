//! Volumes of the domains at time distance at most pi/2 from a boundary
//! component of the convex core, and the identity they add up to.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::Serialize;

use crate::earthquake::WeightedMulticurve;
use crate::error::{Error, Result};
use crate::numeric::simpson;
use crate::surface::{gauss_bonnet_area, ConeSurface};

/// `sum w_i l(c_i)`.
pub fn bending_length(s: &ConeSurface, lambda: &WeightedMulticurve) -> Result<f64> {
    lambda.components().iter().map(|c| Ok(c.weight * s.geodesic_length(&c.curve)?)).sum()
}

/// `(pi / 4) A + L / 2`.
pub fn omega_volume_closed(area: f64, length: f64) -> Result<f64> {
    if !(area >= 0.0 && length >= 0.0) {
        return Err(Error::InvalidInput(format!("area {area} and length {length} must be nonnegative")));
    }
    Ok(FRAC_PI_4 * area + 0.5 * length)
}

/// `int_0^{pi/2} cos^2 r dr` with `n` Simpson panels.
pub fn cos_squared_integral(n: usize) -> f64 {
    simpson(|r| r.cos().powi(2), 0.0, FRAC_PI_2, n)
}

/// `int_0^{pi/2} cos r sin r dr` with `n` Simpson panels.
pub fn cos_sin_integral(n: usize) -> f64 {
    simpson(|r| r.cos() * r.sin(), 0.0, FRAC_PI_2, n)
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericVolume {
    pub value: f64,
    /// Same quantity with half the panels.
    pub coarse: f64,
    pub panels: usize,
    /// `|value - coarse|` stayed below 1e-6.
    pub converged: bool,
}

/// The domain over the regular part of the surface contributes area times the
/// integral of `cos^2`; the wedge over each bending line contributes its
/// length times its weight times the integral of `cos sin`.
pub fn omega_volume_numeric(s: &ConeSurface, lambda: &WeightedMulticurve, panels: usize) -> Result<NumericVolume> {
    if panels < 4 {
        return Err(Error::InvalidInput(format!("{panels} quadrature panels")));
    }
    lambda.pants_weights(s.decomposition())?;
    let area = gauss_bonnet_area(s.angles().as_slice(), s.genus())?;
    let length = bending_length(s, lambda)?;
    let at = |n: usize| area * cos_squared_integral(n) + length * cos_sin_integral(n);
    let (value, coarse) = (at(panels), at(panels / 2));
    let converged = (value - coarse).abs() < 1e-6;
    if !converged {
        log::warn!("quadrature with {panels} panels moved by {:.3e} from half the panels", (value - coarse).abs());
    }
    Ok(NumericVolume { value, coarse, panels, converged })
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeIdentity {
    /// `Vol(M) + Vol(C(M)) = Vol(Omega_+) + Vol(Omega_-)`, from the two domains.
    pub lhs: f64,
    /// `(pi / 2) A + L(lambda) / 2` with `A` the Gauss-Bonnet area.
    pub rhs: f64,
    pub residual: f64,
    /// The right-hand side with `+2 pi chi` in place of `-2 pi chi`, which
    /// disagrees with Gauss-Bonnet whenever `chi != 0`.
    pub plus_chi_rhs: f64,
}

/// Assembles `Vol(M) + Vol(C(M))` from the two domain volumes and compares it
/// with the closed form in the cone angles and the total bending length.
pub fn total_volume_identity(
    angles: &[f64],
    genus: usize,
    area_plus: f64,
    area_minus: f64,
    length_plus: f64,
    length_minus: f64,
) -> Result<VolumeIdentity> {
    let area = gauss_bonnet_area(angles, genus)?;
    for (name, a) in [("future", area_plus), ("past", area_minus)] {
        if (a - area).abs() > 1e-8 {
            return Err(Error::Inconsistent(format!("{name} boundary area {a} is not the Gauss-Bonnet area {area}")));
        }
    }
    // Omega_+ sits over the past boundary and Omega_- over the future one.
    let lhs = omega_volume_closed(area_minus, length_minus)? + omega_volume_closed(area_plus, length_plus)?;
    let length = length_plus + length_minus;
    let rhs = FRAC_PI_2 * area + 0.5 * length;
    let chi = 2.0 - 2.0 * genus as f64;
    let plus_chi_rhs = FRAC_PI_2 * (TAU * chi + angles.iter().map(|t| TAU - t).sum::<f64>()) + 0.5 * length;
    Ok(VolumeIdentity { lhs, rhs, residual: (lhs - rhs).abs(), plus_chi_rhs })
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    pub area: f64,
    pub bending_length: f64,
    pub closed: f64,
    pub numeric: NumericVolume,
    /// Present when the past bending length is known.
    pub identity: Option<VolumeIdentity>,
}

/// Volume of the domain over a boundary component with metric `s` and bending
/// `lambda`; with `past_length`, also the total identity.
pub fn volume_report(
    s: &ConeSurface,
    lambda: &WeightedMulticurve,
    panels: usize,
    past_length: Option<f64>,
) -> Result<VolumeReport> {
    let area = gauss_bonnet_area(s.angles().as_slice(), s.genus())?;
    let length = bending_length(s, lambda)?;
    let identity = past_length
        .map(|lm| total_volume_identity(s.angles().as_slice(), s.genus(), area, area, length, lm))
        .transpose()?;
    Ok(VolumeReport {
        area,
        bending_length: length,
        closed: omega_volume_closed(area, length)?,
        numeric: omega_volume_numeric(s, lambda, panels)?,
        identity,
    })
}

/// `pi^2 / 2`, the volume over the four-cone sphere with right angles.
pub const FOUR_RIGHT_ANGLES_VOLUME: f64 = PI * PI / 2.0;

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::surface::{assemble, BlockDecomposition, ConeAngles, FnCoordinates};

    fn five_cone() -> ConeSurface {
        let d = Arc::new(BlockDecomposition::cone_sphere(5).unwrap());
        let angles = ConeAngles::new(vec![1.0, 1.5, 2.0, 2.5, 0.7]).unwrap();
        assemble(&d, &FnCoordinates::new(&[(1.0, 0.3), (1.4, -0.2)]), &angles).unwrap()
    }

    #[test]
    fn stated_integrals() {
        assert!((cos_squared_integral(10_000) - FRAC_PI_4).abs() < 1e-10);
        assert!((cos_sin_integral(10_000) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn closed_form_examples() {
        assert!((omega_volume_closed(TAU, 0.0).unwrap() - FOUR_RIGHT_ANGLES_VOLUME).abs() < 1e-15);
        assert_eq!(omega_volume_closed(0.0, 2.0).unwrap(), 1.0);
        assert!(omega_volume_closed(-1.0, 0.0).is_err());
    }

    #[test]
    fn bending_length_is_linear() {
        let s = five_cone();
        let d = s.decomposition();
        assert_eq!(bending_length(&s, &WeightedMulticurve::empty()).unwrap(), 0.0);
        let a = WeightedMulticurve::on_pants_curves(d, &[(0, 0.5)]).unwrap();
        assert!((bending_length(&s, &a).unwrap() - 0.5).abs() < 1e-12);
        let b = WeightedMulticurve::on_pants_curves(d, &[(1, 0.7)]).unwrap();
        let ab = WeightedMulticurve::on_pants_curves(d, &[(0, 0.5), (1, 0.7)]).unwrap();
        let sum = bending_length(&s, &a).unwrap() + bending_length(&s, &b).unwrap();
        assert!((bending_length(&s, &ab).unwrap() - sum).abs() < 1e-12);
        let k = 3.7;
        assert!((bending_length(&s, &ab.scaled(k).unwrap()).unwrap() - k * sum).abs() < 1e-11);
    }

    #[test]
    fn quadrature_converges_to_closed_form() {
        let s = five_cone();
        let lam = WeightedMulticurve::on_pants_curves(s.decomposition(), &[(0, 0.4), (1, 1.2)]).unwrap();
        let area = gauss_bonnet_area(s.angles().as_slice(), 0).unwrap();
        let closed = omega_volume_closed(area, bending_length(&s, &lam).unwrap()).unwrap();
        let v = omega_volume_numeric(&s, &lam, 10_000).unwrap();
        assert!(v.converged && (v.value - closed).abs() < 1e-6);
        let e1 = (omega_volume_numeric(&s, &lam, 8).unwrap().value - closed).abs();
        let e2 = (omega_volume_numeric(&s, &lam, 16).unwrap().value - closed).abs();
        assert!(e1 / e2 > 3.5, "{e1} {e2}");
    }

    #[test]
    fn identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(3..7);
            let genus = rng.gen_range(0..3usize);
            let angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
            let Ok(a) = gauss_bonnet_area(&angles, genus) else { continue };
            let (lp, lm) = (rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0));
            let id = total_volume_identity(&angles, genus, a, a, lp, lm).unwrap();
            assert!(id.residual <= 1e-12, "{id:?}");
        }
        let id = total_volume_identity(&[FRAC_PI_2; 4], 0, TAU, TAU, 0.5, 0.5).unwrap();
        assert!((id.rhs - FRAC_PI_2 * TAU - 0.5).abs() < 1e-14);
        assert!(total_volume_identity(&[FRAC_PI_2; 4], 0, TAU + 1e-6, TAU, 0.0, 0.0).is_err());
    }
}
