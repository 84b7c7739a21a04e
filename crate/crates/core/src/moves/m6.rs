//! The six-ball move from the icosahedral configuration to the FCC or HCP
//! configuration through an equatorial ring.
//!
//! Phase 1 slides the two polar triangles along their meridians onto the
//! parallels where each triangle is mutually touching. Phase 2 lowers the six
//! band balls to the equator at constant meridian speed while each triangle
//! turns just enough to stay clear of the band ball rising beneath it.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use serde::{Deserialize, Serialize};

use super::path::{verify_path, DeformationPath, Segment};
use crate::config::{dod_band_height, dod_face_height, named, triangle_polar_angle, NamedConfig};
use crate::error::{Error, Result};
use crate::geom::{angle_from_radius, angular_distance, UnitVector, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum M6Variant {
    Fcc,
    Hcp,
}

impl M6Variant {
    fn south_sign(self) -> f64 {
        match self {
            M6Variant::Fcc => 1.0,
            M6Variant::Hcp => -1.0,
        }
    }

    pub fn target(self) -> NamedConfig {
        match self {
            M6Variant::Fcc => NamedConfig::Fcc,
            M6Variant::Hcp => NamedConfig::Hcp,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Geometry {
    theta: f64,
    /// Triangle polar angle in the icosahedron.
    alpha0: f64,
    /// Triangle polar angle at the end of phase 1.
    alpha1: f64,
    /// Mutual-touching polar angle.
    alpha_p: f64,
    /// Polar angle of the northern band balls at the start.
    beta0: f64,
    eps: f64,
    ramp: f64,
    south_sign: f64,
}

impl Geometry {
    fn new(variant: M6Variant, eps: f64, ramp: f64) -> Result<Self> {
        let theta = FRAC_PI_3;
        let alpha0 = dod_face_height().acos();
        let alpha1 = triangle_polar_angle(theta + eps);
        if !(eps >= 0.0) || alpha1 > alpha0 {
            return Err(Error::Domain(format!("interior margin {eps} out of range")));
        }
        Ok(Geometry {
            theta,
            alpha0,
            alpha1,
            alpha_p: triangle_polar_angle(theta),
            beta0: dod_band_height().acos(),
            eps,
            ramp,
            south_sign: variant.south_sign(),
        })
    }

    fn band_polar(&self, t: f64) -> f64 {
        self.beta0 + t * (FRAC_PI_2 - self.beta0)
    }

    fn triangle_polar(&self, t: f64) -> f64 {
        let psi = 1.0 - (1.0 - t).powf(self.ramp);
        self.alpha1 + psi * (self.alpha_p - self.alpha1)
    }

    /// Smallest longitude increment keeping a triangle ball at least
    /// θ + eps(1 − t)² from the band ball rising on its original meridian.
    ///
    /// The margin must vanish quadratically: the clearance left on the other
    /// side, towards the descending band ball, is itself O((1 − t)²).
    fn increment(&self, t: f64) -> f64 {
        let sep = self.theta + self.eps * (1.0 - t) * (1.0 - t);
        let a = self.triangle_polar(t);
        let b = PI - self.band_polar(t);
        let c = (sep.cos() - a.cos() * b.cos()) / (a.sin() * b.sin());
        if c >= 1.0 {
            0.0
        } else {
            c.max(-1.0).acos()
        }
    }

    fn points(&self, tri_polar: f64, band_polar: f64, phi: f64) -> Vec<UnitVector> {
        let deg = PI / 180.0;
        let mut pts = Vec::with_capacity(12);
        for k in 0..3 {
            pts.push(UnitVector::from_spherical(
                tri_polar,
                (120.0 * k as f64) * deg + phi,
            ));
        }
        for m in 0..6 {
            let polar = if m % 2 == 0 {
                PI - band_polar
            } else {
                band_polar
            };
            pts.push(UnitVector::from_spherical(polar, (60.0 * m as f64) * deg));
        }
        for k in 0..3 {
            pts.push(UnitVector::from_spherical(
                PI - tri_polar,
                (60.0 + 120.0 * k as f64) * deg + self.south_sign * phi,
            ));
        }
        pts
    }

    fn phase1(&self, t: f64) -> Vec<UnitVector> {
        self.points(
            self.alpha0 + t * (self.alpha1 - self.alpha0),
            self.beta0,
            0.0,
        )
    }

    fn phase2(&self, t: f64) -> Vec<UnitVector> {
        self.points(
            self.triangle_polar(t),
            self.band_polar(t),
            self.increment(t),
        )
    }
}

/// Longitude increment of the northern triangle during phase 2 of the
/// boundary variant.
pub fn polar_increment(t: f64) -> f64 {
    Geometry::new(M6Variant::Fcc, 0.0, 1.0)
        .expect("boundary geometry")
        .increment(t.clamp(0.0, 1.0))
}

fn build(variant: M6Variant, r: f64, eps: f64, ramp: f64) -> Result<DeformationPath> {
    let g = Geometry::new(variant, eps, ramp)?;
    let mut path = DeformationPath::new(r).with_target(named(&variant.target())?);
    let params = serde_json::json!({ "variant": variant, "interior_eps": eps, "ramp": ramp });
    path.push(Segment::new("m6-phase1", params.clone(), move |t| {
        g.phase1(t)
    }))?;
    path.push(Segment::new("m6-phase2", params, move |t| g.phase2(t)))?;
    Ok(path)
}

/// Samples per segment used to pick the interior ramp.
const RAMP_SAMPLES: usize = 2001;

/// DOD → FCC/HCP. With `interior_eps > 0` the path stays strictly inside the
/// configuration space until its final instant; the steepness of the
/// triangle's latitude ramp is doubled until sampling confirms this.
///
/// The geometry is that of r = 1 for every admissible r ≤ 1.
pub fn m6_path(variant: M6Variant, r: f64, interior_eps: f64) -> Result<DeformationPath> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if r > 1.0 {
        return Err(Error::InfeasibleMove(format!(
            "the equatorial six-ring needs r <= 1, got {r}"
        )));
    }
    if interior_eps == 0.0 {
        return build(variant, r, 0.0, 1.0);
    }
    let limit = angle_from_radius(r)?;
    let mut ramp = 1.0;
    loop {
        let path = build(variant, r, interior_eps, ramp)?;
        let rep = verify_path(&path, RAMP_SAMPLES)?;
        if rep.is_valid() && rep.interior_min_separation > limit {
            return Ok(path);
        }
        if ramp >= 64.0 {
            return Err(Error::Numeric(format!(
                "no interior ramp found for margin {interior_eps}; interior separation {:.3e} below limit",
                limit - rep.interior_min_separation
            )));
        }
        ramp *= 2.0;
    }
}

/// Isosceles-triangle distances at phase-2 time t: A and B are the two band
/// balls flanking the northern triangle ball (longitudes 0 and 60 degrees),
/// O the point of the touching parallel on their perpendicular bisector
/// nearest longitude 30 degrees. Returns (|AO|, |BO|).
pub fn bisector_distances(t: f64) -> (f64, f64) {
    let g = Geometry::new(M6Variant::Fcc, 0.0, 1.0).expect("boundary geometry");
    let beta = g.band_polar(t);
    let a = UnitVector::from_spherical(PI - beta, 0.0);
    let b = UnitVector::from_spherical(beta, FRAC_PI_3);
    let n: Vec3 = a.vec() - b.vec();
    let alpha = g.alpha_p;
    // n · (sinα cosλ, sinα sinλ, cosα) = 0
    let amp = alpha.sin() * n.x.hypot(n.y);
    let delta = n.y.atan2(n.x);
    let c = (-n.z * alpha.cos() / amp).clamp(-1.0, 1.0).acos();
    let target = PI / 6.0;
    let lon = [delta + c, delta - c]
        .into_iter()
        .min_by(|x, y| {
            let dx = crate::maximin::wrap_angle(x - target).abs();
            let dy = crate::maximin::wrap_angle(y - target).abs();
            dx.total_cmp(&dy)
        })
        .expect("two candidates");
    let o = UnitVector::from_spherical(alpha, lon);
    (angular_distance(&a, &o), angular_distance(&b, &o))
}

/// |AO| = |BO| > π/3 at every grid time in (0, 1), and |AO| non-increasing
/// along the sorted grid.
pub fn bisector_clearance_check(t_grid: &[f64]) -> bool {
    let mut ts: Vec<f64> = t_grid.to_vec();
    ts.sort_by(f64::total_cmp);
    let mut prev = f64::INFINITY;
    for t in ts {
        if !(t > 0.0 && t < 1.0) {
            return false;
        }
        let (ao, bo) = bisector_distances(t);
        if (ao - bo).abs() > 1e-12 || ao <= FRAC_PI_3 || ao > prev + 1e-15 {
            return false;
        }
        prev = ao;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::align;

    /// Tangency by bisection on the separation itself.
    fn increment_by_bisection(t: f64) -> f64 {
        let g = Geometry::new(M6Variant::Fcc, 0.0, 1.0).unwrap();
        let beta = PI - g.band_polar(t);
        let obstacle = UnitVector::from_spherical(beta, 0.0);
        let clear = |phi: f64| {
            angular_distance(&UnitVector::from_spherical(g.alpha_p, phi), &obstacle) >= FRAC_PI_3
        };
        if clear(0.0) {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, FRAC_PI_2);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if clear(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn increment_matches_bisection() {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!(
                (polar_increment(t) - increment_by_bisection(t)).abs() < 1e-12,
                "t = {t}"
            );
        }
    }

    #[test]
    fn increment_profile() {
        assert_eq!(polar_increment(0.0), 0.0);
        assert!((polar_increment(1.0) - PI / 6.0).abs() < 1e-8);
        let mut prev = 0.0;
        for i in 0..=1000 {
            let p = polar_increment(i as f64 / 1000.0);
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn endpoints() {
        for v in [M6Variant::Fcc, M6Variant::Hcp] {
            let p = m6_path(v, 1.0, 0.0).unwrap();
            let dod = named(&NamedConfig::Dod).unwrap();
            assert!(align(&p.start().unwrap(), &dod).rms < 1e-14);
            assert!(align(&p.end().unwrap(), &named(&v.target()).unwrap()).rms < 1e-8);
        }
    }

    #[test]
    fn radius_bounds() {
        assert!(matches!(
            m6_path(M6Variant::Fcc, 1.05, 0.0),
            Err(Error::InfeasibleMove(_))
        ));
        assert!(m6_path(M6Variant::Fcc, 0.9, 0.0).is_ok());
        assert!(m6_path(M6Variant::Fcc, 1.0, 0.5).is_err());
        assert!(m6_path(M6Variant::Fcc, 1.0, -1e-3).is_err());
    }

    #[test]
    fn boundary_variant_is_valid() {
        let rep = verify_path(&m6_path(M6Variant::Fcc, 1.0, 0.0).unwrap(), 2000).unwrap();
        assert!(
            rep.is_valid(),
            "{:?}",
            &rep.violation_times[..rep.violation_times.len().min(5)]
        );
        assert!(rep.endpoint_match_rms.unwrap() < 1e-8);
    }

    #[test]
    fn interior_variant_stays_inside() {
        for v in [M6Variant::Fcc, M6Variant::Hcp] {
            let p = m6_path(v, 1.0, 1e-3).unwrap();
            let rep = verify_path(&p, 5000).unwrap();
            assert!(rep.is_valid());
            assert!(
                rep.interior_min_separation > FRAC_PI_3,
                "{:e}",
                rep.interior_min_separation - FRAC_PI_3
            );
            assert!(rep.endpoint_match_rms.unwrap() < 1e-8);
        }
    }

    #[test]
    fn withheld_rotation_collides() {
        let g = Geometry::new(M6Variant::Fcc, 0.0, 1.0).unwrap();
        let mut p = m6_path(M6Variant::Fcc, 1.0, 0.0).unwrap();
        let start = p.segments()[0].clone();
        p = DeformationPath::new(1.0);
        p.push(start).unwrap();
        p.push(Segment::new("frozen", serde_json::Value::Null, move |t| {
            g.points(g.triangle_polar(t), g.band_polar(t), 0.0)
        }))
        .unwrap();
        assert!(!verify_path(&p, 500).unwrap().is_valid());
    }

    #[test]
    fn bisector_examples() {
        let (ao, bo) = bisector_distances(0.5);
        assert!(ao > FRAC_PI_3);
        assert!((ao - bo).abs() < 1e-12);
        // the excess over π/3 vanishes quadratically in 1 − t
        let (near_end, _) = bisector_distances(1.0 - 1e-4);
        assert!(near_end - FRAC_PI_3 < 1e-8 && near_end > FRAC_PI_3);
        let grid: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
        assert!(bisector_clearance_check(&grid));
        assert!(!bisector_clearance_check(&[0.0]));
    }
}
