//! The five-ball move: the ring around a pole is pulled in to touch the pole,
//! turned by a fifth of a revolution, and released, cycling five labels.

use std::f64::consts::{PI, TAU};

use super::path::{DeformationPath, Segment};
use crate::config::{named, Configuration, NamedConfig};
use crate::error::{Error, Result};
use crate::geom::{angle_from_radius, angular_distance, Rotation, UnitVector, Vec3};

/// Orthonormal frame with the pole as third axis. The second axis is
/// negated for the reverse direction, so the frame may be left-handed.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PoleFrame {
    axes: [Vec3; 3],
}

impl PoleFrame {
    fn new(pole: Vec3, meridian: Vec3, direction: i32) -> Self {
        let e3 = pole.normalize();
        let e1 = (meridian - e3 * meridian.dot(&e3)).normalize();
        let e2 = e3.cross(&e1) * direction as f64;
        PoleFrame { axes: [e1, e2, e3] }
    }

    pub(crate) fn to_world(self, polar: f64, lon: f64) -> UnitVector {
        let [e1, e2, e3] = self.axes;
        UnitVector::normalize(
            e1 * (polar.sin() * lon.cos()) + e2 * (polar.sin() * lon.sin()) + e3 * polar.cos(),
        )
    }

    pub(crate) fn local(&self, u: &UnitVector) -> (f64, f64) {
        let v = u.vec();
        let [e1, e2, e3] = self.axes;
        let z = v.dot(&e3).clamp(-1.0, 1.0);
        let lon = v.dot(&e2).atan2(v.dot(&e1)).rem_euclid(TAU);
        (z.acos(), lon)
    }

    pub(crate) fn pole(&self) -> Vec3 {
        self.axes[2]
    }

    pub(crate) fn handedness(&self) -> f64 {
        self.axes[0]
            .cross(&self.axes[1])
            .dot(&self.axes[2])
            .signum()
    }
}

/// Labels of an icosahedral configuration seen from one pole.
#[derive(Clone, Debug)]
pub(crate) struct PolarChart {
    pub frame: PoleFrame,
    pub pole: usize,
    pub antipode: usize,
    /// Neighbors of the pole, by increasing local longitude from the
    /// smallest-label neighbor.
    pub upper: [usize; 5],
    /// Neighbors of the antipode; `lower[i]` follows `upper[i]` in longitude.
    pub lower: [usize; 5],
}

impl PolarChart {
    pub(crate) fn new(start: &Configuration, pole: usize, direction: i32) -> Result<Self> {
        let n = start.n();
        if n != 12 {
            return Err(Error::Domain(format!(
                "the five-ball move needs 12 points, got {n}"
            )));
        }
        if pole >= n {
            return Err(Error::Domain(format!("pole {pole} out of range")));
        }
        if direction != 1 && direction != -1 {
            return Err(Error::Domain(format!(
                "direction must be +1 or -1, got {direction}"
            )));
        }
        let p = start.point(pole);
        let by_distance = |from: UnitVector| {
            let mut d: Vec<(usize, f64)> = (0..n)
                .map(|k| (k, angular_distance(&from, &start.point(k))))
                .collect();
            d.sort_by(|a, b| a.1.total_cmp(&b.1));
            d
        };
        let from_pole = by_distance(p);
        let (antipode, far) = from_pole[n - 1];
        if far < PI - 1e-6 {
            return Err(Error::Domain(format!(
                "point {pole} has no antipodal partner"
            )));
        }
        let mut upper: Vec<usize> = from_pole[1..6].iter().map(|&(k, _)| k).collect();
        let first = *upper.iter().min().expect("five neighbors");
        let frame = PoleFrame::new(p.vec(), start.point(first).vec(), direction);
        let lon = |k: usize| {
            if k == first {
                0.0
            } else {
                frame.local(&start.point(k)).1
            }
        };
        upper.sort_by(|a, b| lon(*a).total_cmp(&lon(*b)));
        let mut lower = [0; 5];
        for (i, slot) in lower.iter_mut().enumerate() {
            let want = lon(upper[i]) + PI / 5.0;
            *slot = (0..n)
                .filter(|&k| k != pole && k != antipode && !upper.contains(&k))
                .min_by(|&a, &b| {
                    let da = (lon(a) - want + PI).rem_euclid(TAU) - PI;
                    let db = (lon(b) - want + PI).rem_euclid(TAU) - PI;
                    da.abs().total_cmp(&db.abs())
                })
                .expect("five lower points");
        }
        let mut seen = lower.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != 5 {
            return Err(Error::Domain(
                "configuration is not icosahedral around the pole".into(),
            ));
        }
        Ok(PolarChart {
            frame,
            pole,
            antipode,
            upper: upper.try_into().expect("five"),
            lower,
        })
    }

    /// Chart order: pole, upper ring, lower ring, antipode.
    pub(crate) fn order(&self) -> [usize; 12] {
        let mut o = [0; 12];
        o[0] = self.pole;
        o[1..6].copy_from_slice(&self.upper);
        o[6..11].copy_from_slice(&self.lower);
        o[11] = self.antipode;
        o
    }

    /// Permutation induced by one turn: upper[i] ends where upper[i+1] started.
    pub(crate) fn cycle(&self) -> Vec<usize> {
        let mut images: Vec<usize> = (0..12).collect();
        for i in 0..5 {
            images[self.upper[i]] = self.upper[(i + 1) % 5];
        }
        images
    }
}

/// Longitude clearance between adjacent ring balls pulled in to touch the
/// pole: 2π/5 minus the longitude difference at which two balls at polar
/// angle θ touch.
pub fn zeta_gap(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    2.0 * PI / 5.0 - ((c - c * c) / (s * s)).clamp(-1.0, 1.0).acos()
}

/// Five-ball move about `pole` of the icosahedral configuration.
pub fn m5_path(pole: usize, direction: i32, r: f64) -> Result<DeformationPath> {
    m5_path_from(&named(&NamedConfig::Dod)?, pole, direction, r)
}

/// Five-ball move about `pole` starting from any configuration that is
/// icosahedral around that pole. The upper ring slides along meridians onto
/// the parallel touching the pole and the lower ring onto the parallel
/// touching the antipode; the pole cluster turns by 2π/5 in the frame's
/// positive sense; then the rings slide back.
pub fn m5_path_from(
    start: &Configuration,
    pole: usize,
    direction: i32,
    r: f64,
) -> Result<DeformationPath> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if r > 1.0 {
        return Err(Error::InfeasibleMove(format!(
            "upper and lower rings meet on a meridian; the plain move needs r <= 1, got {r}"
        )));
    }
    let chart = PolarChart::new(start, pole, direction)?;
    let theta = angle_from_radius(r)?;
    let local: Vec<(f64, f64)> = start
        .points()
        .iter()
        .map(|u| chart.frame.local(u))
        .collect();
    let base: Vec<UnitVector> = start.points().to_vec();
    let (upper, lower) = (chart.upper, chart.lower);

    let slide = {
        let local = local.clone();
        let frame = chart.frame;
        move |t: f64| -> Vec<UnitVector> {
            let mut pts = base.clone();
            for &k in &upper {
                let (a, lon) = local[k];
                pts[k] = frame.to_world(a + t * (theta - a), lon);
            }
            for &k in &lower {
                let (a, lon) = local[k];
                pts[k] = frame.to_world(a + t * (PI - theta - a), lon);
            }
            pts
        }
    };
    let turn_angle = 2.0 * PI / 5.0;
    let axis = chart.frame.pole() * chart.frame.handedness();
    let mut cluster = upper.to_vec();
    cluster.push(pole);

    let params = serde_json::json!({ "pole": pole, "direction": direction, "theta": theta });
    let mut path = DeformationPath::new(r);
    let s1 = slide.clone();
    path.push(Segment::new("m5-contract", params.clone(), s1))?;

    let contracted = slide(1.0);
    let c2 = cluster.clone();
    path.push(Segment::new("m5-turn", params.clone(), move |t| {
        let rot = Rotation::about_axis(axis, turn_angle * t);
        let mut pts = contracted.clone();
        for &k in &c2 {
            pts[k] = crate::geom::rotate(&rot, &pts[k]);
        }
        pts
    }))?;

    let s3 = slide.clone();
    let rot = Rotation::about_axis(axis, turn_angle);
    path.push(Segment::new("m5-release", params, move |t| {
        let mut pts = s3(1.0 - t);
        for &k in &cluster {
            pts[k] = crate::geom::rotate(&rot, &pts[k]);
        }
        pts
    }))?;

    let cycle = chart.cycle();
    let target = Configuration::new(cycle.iter().map(|&k| start.point(k)).collect())?;
    Ok(path.with_target(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::align;
    use crate::moves::path::verify_path;

    #[test]
    fn zeta_closed_form() {
        let z = zeta_gap(PI / 3.0);
        assert!((z - (2.0 * PI / 5.0 - (1.0f64 / 3.0).acos())).abs() < 1e-15);
        assert!(z > 0.025 && z < 0.026);
    }

    #[test]
    fn charts_of_the_icosahedron() {
        let dod = named(&NamedConfig::Dod).unwrap();
        for p in 0..12 {
            let c = PolarChart::new(&dod, p, 1).unwrap();
            let mut all = c.order().to_vec();
            all.sort_unstable();
            assert_eq!(all, (0..12).collect::<Vec<_>>());
            for i in 0..5 {
                let (a, lon) = c.frame.local(&dod.point(c.upper[i]));
                assert!((a - 2f64.atan()).abs() < 1e-12);
                let off = (lon - 0.4 * PI * i as f64 + PI).rem_euclid(TAU) - PI;
                assert!(off.abs() < 1e-12, "pole {p}");
                let (b, lon) = c.frame.local(&dod.point(c.lower[i]));
                assert!((b - (PI - 2f64.atan())).abs() < 1e-12);
                assert!((lon - 0.4 * PI * (i as f64 + 0.5)).abs() < 1e-12);
            }
        }
        assert!(PolarChart::new(&dod, 12, 1).is_err());
        assert!(PolarChart::new(&dod, 0, 0).is_err());
    }

    #[test]
    fn move_at_unit_radius() {
        let p = m5_path(0, 1, 1.0).unwrap();
        let rep = verify_path(&p, 2000).unwrap();
        assert!(rep.is_valid(), "{:?}", rep.violation_times.first());
        assert!(rep.min_separation >= PI / 3.0 - 1e-9);
        assert!(rep.endpoint_match_rms.unwrap() < 1e-12);
    }

    #[test]
    fn contracted_ring_gap() {
        let p = m5_path(3, 1, 1.0).unwrap();
        let end = p.at(0, 1.0).unwrap();
        let chart = PolarChart::new(&named(&NamedConfig::Dod).unwrap(), 3, 1).unwrap();
        for i in 0..5 {
            let a = end.point(chart.upper[i]);
            let b = end.point(chart.upper[(i + 1) % 5]);
            assert!((angular_distance(&end.point(3), &a) - PI / 3.0).abs() < 1e-12);
            let (_, la) = chart.frame.local(&a);
            let (_, lb) = chart.frame.local(&b);
            let gap = (lb - la).rem_euclid(TAU) - (1.0f64 / 3.0).acos();
            assert!((gap - zeta_gap(PI / 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn halfway_turn_is_the_named_configuration() {
        let p = m5_path(0, 1, 1.0).unwrap();
        let mid = p.at(1, 0.5).unwrap();
        let chart = PolarChart::new(&named(&NamedConfig::Dod).unwrap(), 0, 1).unwrap();
        let ordered =
            Configuration::new(chart.order().iter().map(|&k| mid.point(k)).collect()).unwrap();
        let half = named(&NamedConfig::M5Halfway).unwrap();
        // up to a turn about the pole, which alignment absorbs
        assert!(align(&ordered, &half).rms < 1e-12);
    }

    #[test]
    fn reverse_direction_inverts() {
        let dod = named(&NamedConfig::Dod).unwrap();
        let a = PolarChart::new(&dod, 5, 1).unwrap().cycle();
        let b = PolarChart::new(&dod, 5, -1).unwrap().cycle();
        for k in 0..12 {
            assert_eq!(b[a[k]], k);
        }
        let p = m5_path(5, -1, 1.0).unwrap();
        assert!(verify_path(&p, 500).unwrap().endpoint_match_rms.unwrap() < 1e-12);
    }

    #[test]
    fn radius_bounds() {
        assert!(matches!(m5_path(0, 1, 1.01), Err(Error::InfeasibleMove(_))));
        assert!(m5_path(0, 1, 0.0).is_err());
        let p = m5_path(2, 1, 0.7).unwrap();
        assert!(verify_path(&p, 500).unwrap().is_valid());
    }
}
