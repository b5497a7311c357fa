//! Fenchel-Nielsen coordinates from a holonomy representation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hyp::Isometry;
use crate::numeric::{brent_min, brent_root};
use crate::surface::{
    assemble, length_of, marked_length, peripheral_angles, relator_residual, BlockDecomposition, ConeAngles,
    FnCoordinates, FnPair, LengthSpectrum, HOLONOMY_TOL,
};

/// Agreement required between the input and the reassembled spectrum.
pub const RECOVERY_TOL: f64 = 1e-8;

/// Widens `[centre - r, centre + r]` on one side until `f` exceeds `target`.
fn bracket(f: &impl Fn(f64) -> Result<f64>, centre: f64, step: f64, dir: f64, target: f64) -> Result<f64> {
    let mut r = step;
    for _ in 0..12 {
        let t = centre + dir * r;
        if f(t)? > target {
            return Ok(t);
        }
        r *= 2.0;
    }
    Err(Error::Recovery(format!("no twist within {r:.1} of {centre:.3} reaches transversal length {target:.6}")))
}

/// Recovers the coordinates of `rep` in the marking of `d`. Lengths come from
/// the pants-curve traces. Each twist solves `L_transversal(t) = observed` on
/// both sides of its minimum, and the branch is the one whose twisted
/// transversal also matches; the root is taken on whichever of the two length
/// functions is steeper there.
pub fn holonomy_to_fn(rep: &[Isometry], d: &Arc<BlockDecomposition>) -> Result<FnCoordinates> {
    if rep.len() != d.n_generators() {
        return Err(Error::InvalidInput(format!("{} images for {} generators", rep.len(), d.n_generators())));
    }
    let scale = crate::surface::conditioning(rep);
    let residual = relator_residual(d, rep);
    if residual > HOLONOMY_TOL * scale {
        return Err(Error::Recovery(format!("relator residual {residual:.3e}")));
    }
    let angles = ConeAngles::new(peripheral_angles(d, rep)?)?;
    let lengths: Vec<f64> = (0..d.n_curves()).map(|e| length_of(rep, d.pants_curve(e))).collect::<Result<_>>()?;
    let mut coords = FnCoordinates(lengths.iter().map(|&length| FnPair { length, twist: 0.0 }).collect());

    for e in 0..d.n_curves() {
        let m = &d.marking()[e];
        let l = lengths[e];
        let (a, b) = (length_of(rep, &m.transversal)?, length_of(rep, &m.twisted)?);
        let base = coords.clone();
        let f = |t: f64| marked_length(d, &base.with_twist(e, t), &angles, &m.transversal);
        // The twisted transversal at t is the transversal at t - l.
        let g = |t: f64| f(t - l);
        let t_min = brent_min(&f, -3.0 * l, 3.0 * l, 1e-10)?;
        let f_min = f(t_min)?;
        if a < f_min - RECOVERY_TOL {
            return Err(Error::Recovery(format!(
                "curve {e}: transversal length {a:.9} below its minimum {f_min:.9} over twists"
            )));
        }
        let mut candidates = Vec::with_capacity(2);
        for dir in [-1.0, 1.0] {
            let far = bracket(&f, t_min, l, dir, a)?;
            let t = if (a - f_min).abs() < 1e-14 { t_min } else { brent_root(|t| Ok(f(t)? - a), t_min.min(far), t_min.max(far), 1e-15)? };
            candidates.push(t);
        }
        let mismatch = |t: f64| Ok::<f64, Error>((g(t)? - b).abs());
        let (m0, m1) = (mismatch(candidates[0])?, mismatch(candidates[1])?);
        let mut t = if m0 <= m1 { candidates[0] } else { candidates[1] };
        if m0.min(m1) > 1e-6 * b.max(1.0) {
            return Err(Error::Recovery(format!("curve {e}: neither twist branch matches the twisted transversal")));
        }
        // Near the transversal's minimum the twisted one pins the twist better.
        let slope = |h: &dyn Fn(f64) -> Result<f64>, t: f64| Ok::<f64, Error>(((h(t + 1e-6)? - h(t - 1e-6)?) / 2e-6).abs());
        if slope(&g, t)? > slope(&f, t)? {
            let g_min = t_min + l;
            let dir = if t < g_min { -1.0 } else { 1.0 };
            let far = bracket(&g, g_min, l, dir, b)?;
            t = brent_root(|t| Ok(g(t)? - b), g_min.min(far), g_min.max(far), 1e-15)?;
        }
        coords.0[e].twist = t;
    }

    let system = d.determining_system();
    let target = LengthSpectrum::of(rep, &system)?;
    let got = assemble(d, &coords, &angles)?.length_spectrum(&system)?;
    let dist = got.distance(&target)?;
    if dist > RECOVERY_TOL * scale.sqrt() {
        return Err(Error::Recovery(format!("reassembled spectrum differs by {dist:.3e}")));
    }
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::hyp::{rotation_about, HypPoint};

    fn cases() -> Vec<(Arc<BlockDecomposition>, ConeAngles)> {
        vec![
            (Arc::new(BlockDecomposition::cone_sphere(4).unwrap()), ConeAngles::uniform(4, PI / 2.0).unwrap()),
            (Arc::new(BlockDecomposition::one_cone_torus()), ConeAngles::uniform(1, PI / 2.0).unwrap()),
            (
                Arc::new(BlockDecomposition::cone_sphere(5).unwrap()),
                ConeAngles::new(vec![1.0, 1.5, 2.0, 2.5, 0.7]).unwrap(),
            ),
            (Arc::new(BlockDecomposition::genus_two()), ConeAngles::new(vec![]).unwrap()),
        ]
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (d, angles) in cases() {
            for _ in 0..6 {
                let pairs: Vec<(f64, f64)> =
                    (0..d.n_curves()).map(|_| (rng.gen_range(0.5..3.0), rng.gen_range(-2.0..2.0))).collect();
                let coords = FnCoordinates::new(&pairs);
                let s = assemble(&d, &coords, &angles).unwrap();
                let back = holonomy_to_fn(s.holonomy(), &d).unwrap();
                assert!(back.distance(&coords) < 1e-8, "{coords:?} {back:?}");
            }
        }
    }

    #[test]
    fn conjugate_representation_gives_same_coordinates() {
        let (d, angles) = cases().swap_remove(1);
        let coords = FnCoordinates::new(&[(1.5, 0.3)]);
        let s = assemble(&d, &coords, &angles).unwrap();
        let c = rotation_about(HypPoint::new(0.4, 1.3).unwrap(), 0.7);
        let rep: Vec<Isometry> = s.holonomy().iter().map(|g| g.conjugate_by(&c)).collect();
        assert!(holonomy_to_fn(&rep, &d).unwrap().distance(&coords) < 1e-9);
    }

    #[test]
    fn full_twist_branches_are_told_apart() {
        let (d, angles) = cases().swap_remove(0);
        for t in [0.2, 0.5, 0.8] {
            for shift in [0.0, 1.0, -1.0] {
                let coords = FnCoordinates::new(&[(1.0, t + shift)]);
                let s = assemble(&d, &coords, &angles).unwrap();
                let back = holonomy_to_fn(s.holonomy(), &d).unwrap();
                assert!((back.twist(0) - (t + shift)).abs() < 1e-8, "{t} {shift} {}", back.twist(0));
            }
        }
    }

    #[test]
    fn rejects_broken_representations() {
        let (d, angles) = cases().swap_remove(0);
        let s = assemble(&d, &FnCoordinates::new(&[(1.0, 0.0)]), &angles).unwrap();
        let mut rep = s.holonomy().to_vec();
        rep[0] = rep[0] * rotation_about(HypPoint::i(), 1e-3);
        assert!(holonomy_to_fn(&rep, &d).is_err());
        assert!(holonomy_to_fn(&rep[1..], &d).is_err());
    }
}
