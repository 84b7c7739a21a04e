//! Labeled point configurations on the sphere and the reference charts.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{angular_distance, rotate, Rotation, UnitVector, Vec3};

/// Default tolerance for deciding that a pair is in contact.
pub const CONTACT_TOL: f64 = 1e-9;
/// Default tolerance for equality modulo rotation.
pub const EQUIV_TOL: f64 = 1e-7;

/// Ordered points on S²; the label of a point is its index.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    points: Vec<UnitVector>,
}

impl Configuration {
    pub fn new(points: Vec<UnitVector>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidConfiguration(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        Ok(Configuration { points })
    }

    /// Normalizes raw vectors; fails on any zero vector.
    pub fn from_vecs(vs: &[Vec3]) -> Result<Self> {
        Self::new(
            vs.iter()
                .map(|v| UnitVector::from_vec(*v))
                .collect::<Result<_>>()?,
        )
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> UnitVector {
        self.points[i]
    }

    pub fn vecs(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| p.vec()).collect()
    }

    pub fn rotate_all(&self, r: &Rotation) -> Configuration {
        Configuration {
            points: self.points.iter().map(|p| rotate(r, p)).collect(),
        }
    }

    /// Configuration whose point `images[k]` is this configuration's point `k`.
    pub fn relabeled(&self, images: &[usize]) -> Configuration {
        let mut pts = self.points.clone();
        for (k, &img) in images.iter().enumerate() {
            pts[img] = self.points[k];
        }
        Configuration { points: pts }
    }

    /// The closest pair and its separation.
    pub fn closest_pair(&self) -> (usize, usize, f64) {
        let mut best = (0, 1, f64::INFINITY);
        for i in 0..self.n() {
            for j in (i + 1)..self.n() {
                let d = angular_distance(&self.points[i], &self.points[j]);
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        best
    }

    pub fn min_separation(&self) -> f64 {
        self.closest_pair().2
    }
}

/// Half the minimum pairwise separation.
pub fn injectivity_radius(u: &Configuration) -> Result<f64> {
    let (i, j, d) = u.closest_pair();
    if d <= 1e-10 {
        return Err(Error::InvalidConfiguration(format!(
            "points {i} and {j} coincide"
        )));
    }
    Ok(0.5 * d)
}

/// Whether `u` is a configuration of non-overlapping spheres of radius `r`.
pub fn is_member(u: &Configuration, r: f64) -> bool {
    match (injectivity_radius(u), crate::geom::angle_from_radius(r)) {
        (Ok(rho), Ok(theta)) => 2.0 * rho >= theta - 1e-12,
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContactGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub contact_angle: f64,
    pub tolerance: f64,
}

impl ContactGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(i, j) in &self.edges {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Pairs at separation `theta` within `tol`.
pub fn contact_graph(u: &Configuration, theta: f64, tol: f64) -> Result<ContactGraph> {
    let mut edges = Vec::new();
    for i in 0..u.n() {
        for j in (i + 1)..u.n() {
            let d = angular_distance(&u.points[i], &u.points[j]);
            if d < theta - tol {
                return Err(Error::Overlap {
                    i,
                    j,
                    angle: d,
                    limit: theta,
                });
            }
            if d <= theta + tol {
                edges.push((i, j));
            }
        }
    }
    Ok(ContactGraph {
        n: u.n(),
        edges,
        contact_angle: theta,
        tolerance: tol,
    })
}

/// Reference configurations.
///
/// Charts:
/// - `Dod`: icosahedron with two faces parallel to the xy-plane. Labels 0..2
///   are the north face at z = h, longitudes 0, 120, 240 degrees; labels
///   3..8 are the equatorial band at longitudes 0, 60, ..., 300 alternating
///   south (even offset) and north; labels 9..11 the south face at
///   longitudes 60, 180, 300.
/// - `Fcc`, `Hcp`: north triangle (0..2) at longitudes 30, 150, 270 on the
///   mutual-touching parallel, equatorial ring (3..8) at longitudes
///   0, 60, ..., 300, south triangle (9..11) at 90, 210, 330 for `Fcc` and
///   30, 150, 270 for `Hcp`. These are the endpoints of the six-ball move
///   started from `Dod`, with labels carried along.
/// - `Tet`: (±1, ±1, ±1) with an even number of minus signs.
/// - `Oct`: +x, -x, +y, -y, +z, -z.
/// - `Ring(n)`: equator, point k at longitude 2πk/n.
/// - `Theta5(a)`: poles (labels 0 and 4) and three equatorial points
///   (labels 1..3) at longitudes 0, a0, a0 + a1.
/// - `M5Halfway`: pole 0 = north, 1..5 upper ring at polar angle π/3 and
///   longitudes 36 + 72k degrees, 6..10 lower ring at polar angle 2π/3 on
///   the same longitudes, 11 = south.
#[derive(Clone, Debug, PartialEq)]
pub enum NamedConfig {
    Dod,
    Fcc,
    Hcp,
    Tet,
    Oct,
    Ring(usize),
    Theta5([f64; 3]),
    M5Halfway,
}

/// z-coordinate of the icosahedron faces parallel to the xy-plane.
pub fn dod_face_height() -> f64 {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    phi * phi / (3.0 * phi * phi + 3.0).sqrt()
}

/// z-coordinate of the two equatorial-band layers of the icosahedron chart.
pub fn dod_band_height() -> f64 {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    1.0 / (phi * (3.0 * phi * phi + 3.0).sqrt())
}

/// Polar angle at which three points on one parallel are pairwise `theta` apart.
///
/// From cos θ = cos²α − ½ sin²α, i.e. cos²α = (1 + 2 cos θ)/3.
pub fn triangle_polar_angle(theta: f64) -> f64 {
    ((1.0 + 2.0 * theta.cos()) / 3.0).sqrt().acos()
}

pub(crate) fn dod_points() -> Vec<UnitVector> {
    let h = dod_face_height();
    let b = dod_band_height();
    let mut pts = Vec::with_capacity(12);
    for k in 0..3 {
        pts.push(UnitVector::from_spherical(
            h.acos(),
            (120.0 * k as f64).to_radians(),
        ));
    }
    for k in 0..6 {
        let z = if k % 2 == 0 { -b } else { b };
        pts.push(UnitVector::from_spherical(
            z.acos(),
            (60.0 * k as f64).to_radians(),
        ));
    }
    for k in 0..3 {
        pts.push(UnitVector::from_spherical(
            (-h).acos(),
            (60.0 + 120.0 * k as f64).to_radians(),
        ));
    }
    pts
}

/// The close-packed endpoints: `south_offset` is the longitude of the first
/// south-triangle point in degrees (90 for FCC, 30 for HCP).
fn close_packed(south_offset: f64) -> Vec<UnitVector> {
    let a = triangle_polar_angle(PI / 3.0);
    let mut pts = Vec::with_capacity(12);
    for k in 0..3 {
        pts.push(UnitVector::from_spherical(
            a,
            (30.0 + 120.0 * k as f64).to_radians(),
        ));
    }
    for k in 0..6 {
        pts.push(UnitVector::from_spherical(
            PI / 2.0,
            (60.0 * k as f64).to_radians(),
        ));
    }
    for k in 0..3 {
        pts.push(UnitVector::from_spherical(
            PI - a,
            (south_offset + 120.0 * k as f64).to_radians(),
        ));
    }
    pts
}

pub fn named(name: &NamedConfig) -> Result<Configuration> {
    let pts = match name {
        NamedConfig::Dod => dod_points(),
        NamedConfig::Fcc => close_packed(90.0),
        NamedConfig::Hcp => close_packed(30.0),
        NamedConfig::Tet => [(1., 1., 1.), (1., -1., -1.), (-1., 1., -1.), (-1., -1., 1.)]
            .iter()
            .map(|&(x, y, z)| UnitVector::new(x, y, z))
            .collect::<Result<_>>()?,
        NamedConfig::Oct => [
            (1., 0., 0.),
            (-1., 0., 0.),
            (0., 1., 0.),
            (0., -1., 0.),
            (0., 0., 1.),
            (0., 0., -1.),
        ]
        .iter()
        .map(|&(x, y, z)| UnitVector::new(x, y, z))
        .collect::<Result<_>>()?,
        NamedConfig::Ring(n) => {
            if *n < 3 {
                return Err(Error::Domain(format!("ring needs n >= 3, got {n}")));
            }
            (0..*n)
                .map(|k| UnitVector::from_spherical(PI / 2.0, 2.0 * PI * k as f64 / *n as f64))
                .collect()
        }
        NamedConfig::Theta5(a) => {
            let ok = a.iter().all(|&x| x > PI / 2.0 && x < PI)
                && (a.iter().sum::<f64>() - 2.0 * PI).abs() < 1e-9;
            if !ok {
                return Err(Error::Domain(format!(
                    "theta-graph gaps must lie in (pi/2, pi) and sum to 2pi: {a:?}"
                )));
            }
            vec![
                UnitVector::north(),
                UnitVector::from_spherical(PI / 2.0, 0.0),
                UnitVector::from_spherical(PI / 2.0, a[0]),
                UnitVector::from_spherical(PI / 2.0, a[0] + a[1]),
                UnitVector::south(),
            ]
        }
        NamedConfig::M5Halfway => {
            let mut pts = vec![UnitVector::north()];
            for polar in [PI / 3.0, 2.0 * PI / 3.0] {
                for k in 0..5 {
                    pts.push(UnitVector::from_spherical(
                        polar,
                        (36.0 + 72.0 * k as f64).to_radians(),
                    ));
                }
            }
            pts.push(UnitVector::south());
            pts
        }
    };
    Configuration::new(pts)
}

#[derive(Clone, Copy, Debug)]
pub struct AlignmentResult {
    pub rotation: Rotation,
    pub rms: f64,
}

/// Rotation minimizing Σ‖R uᵢ − wᵢ‖² over SO(3), with the chordal rms residual.
pub fn align(u: &Configuration, w: &Configuration) -> AlignmentResult {
    assert_eq!(u.n(), w.n(), "align needs configurations of equal size");
    let mut h = Matrix3::zeros();
    for (a, b) in u.points.iter().zip(&w.points) {
        h += b.vec() * a.vec().transpose();
    }
    let svd = SVD::new(h, true, true);
    let (su, svt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let d = (su * svt).determinant().signum();
    let m = su * Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, d)) * svt;
    let rotation = Rotation::from_matrix(m).unwrap_or_else(|_| Rotation::identity());
    let ss: f64 = u
        .points
        .iter()
        .zip(&w.points)
        .map(|(a, b)| (rotation.apply_vec(a.vec()) - b.vec()).norm_squared())
        .sum();
    AlignmentResult {
        rotation,
        rms: (ss / u.n() as f64).sqrt(),
    }
}

pub fn equivalent_mod_rotation(u: &Configuration, w: &Configuration, tol: f64) -> bool {
    u.n() == w.n() && align(u, w).rms <= tol
}

/// Searches for a relabeling `images` (point k of `u` ↦ label `images[k]`
/// of `w`) under which `u` and `w` agree modulo rotation.
///
/// Candidate rotations come from sending the closest pair of `u` onto every
/// pair of `w` at the same separation; labels then follow by greedy
/// nearest-point assignment.
pub fn match_up_to_relabeling(
    u: &Configuration,
    w: &Configuration,
    tol: f64,
) -> Option<(Vec<usize>, AlignmentResult)> {
    let mut best: Option<(Vec<usize>, AlignmentResult)> = None;
    for (images, al) in candidate_alignments(u, w) {
        if best.as_ref().is_none_or(|(_, prev)| al.rms < prev.rms) {
            best = Some((images, al));
        }
    }
    best.filter(|(_, al)| al.rms <= tol)
}

/// Every relabeling found by sending the closest pair of `u` onto a pair of
/// `w` at the same separation, with the best rotation for that relabeling.
pub fn candidate_alignments(
    u: &Configuration,
    w: &Configuration,
) -> Vec<(Vec<usize>, AlignmentResult)> {
    if u.n() != w.n() {
        return Vec::new();
    }
    let n = u.n();
    let (a, b, dab) = u.closest_pair();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = angular_distance(&w.points[i], &w.points[j]);
            if (d - dab).abs() > 1e-3 {
                continue;
            }
            let r = frame_rotation(&u.points[a], &u.points[b], &w.points[i], &w.points[j]);
            let moved = u.rotate_all(&r);
            let Some(images) = greedy_assignment(&moved, w) else {
                continue;
            };
            let al = align(&u.relabeled(&images), w);
            out.push((images, al));
        }
    }
    out
}

/// Rotation sending the frame of (p, q) onto the frame of (p2, q2).
fn frame_rotation(p: &UnitVector, q: &UnitVector, p2: &UnitVector, q2: &UnitVector) -> Rotation {
    let frame = |x: Vec3, y: Vec3| {
        let e1 = x;
        let e2 = (y - x * x.dot(&y)).normalize();
        let e3 = e1.cross(&e2);
        Matrix3::from_columns(&[e1, e2, e3])
    };
    let m = frame(p2.vec(), q2.vec()) * frame(p.vec(), q.vec()).transpose();
    Rotation::from_matrix(m).unwrap_or_else(|_| Rotation::identity())
}

/// Greedy nearest-point assignment by increasing distance; `None` if not a bijection.
fn greedy_assignment(u: &Configuration, w: &Configuration) -> Option<Vec<usize>> {
    let n = u.n();
    let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            cand.push(((u.points[k].vec() - w.points[l].vec()).norm(), k, l));
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut images = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, k, l) in cand {
        if images[k] == usize::MAX && !taken[l] {
            images[k] = l;
            taken[l] = true;
        }
    }
    images.iter().all(|&x| x != usize::MAX).then_some(images)
}

/// On-disk configuration format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigFile {
    pub n: usize,
    pub radius: Option<f64>,
    pub points: Vec<[f64; 3]>,
}

impl ConfigFile {
    pub fn from_config(u: &Configuration, radius: Option<f64>) -> Self {
        ConfigFile {
            n: u.n(),
            radius,
            points: u.points.iter().map(|&p| p.into()).collect(),
        }
    }

    /// Validates the file; each point must have norm 1 within 1e-6.
    pub fn to_config(&self) -> Result<Configuration> {
        if self.points.len() != self.n {
            return Err(Error::Parse(format!(
                "n = {} but {} points given",
                self.n,
                self.points.len()
            )));
        }
        let mut pts = Vec::with_capacity(self.n);
        for (k, p) in self.points.iter().enumerate() {
            let v = Vec3::new(p[0], p[1], p[2]);
            if !((v.norm() - 1.0).abs() <= 1e-6) {
                return Err(Error::Parse(format!("point {k} has norm {}", v.norm())));
            }
            pts.push(UnitVector::normalize(v));
        }
        Configuration::new(pts)
    }
}

pub fn config_to_json(u: &Configuration, radius: Option<f64>) -> String {
    serde_json::to_string_pretty(&ConfigFile::from_config(u, radius)).expect("serializable")
}

pub fn config_from_json(s: &str) -> Result<(Configuration, Option<f64>)> {
    let f: ConfigFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((f.to_config()?, f.radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::angle_from_radius;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// All pairwise separations, brute force.
    fn pair_angles(u: &Configuration) -> Vec<f64> {
        let p = u.points();
        let mut out = Vec::new();
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                out.push(p[i].vec().dot(&p[j].vec()).clamp(-1.0, 1.0).acos());
            }
        }
        out
    }

    fn random_config(n: usize, seed: u64) -> Configuration {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vs: Vec<Vec3> = (0..n)
            .map(|_| {
                Vec3::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            })
            .collect();
        Configuration::from_vecs(&vs).unwrap()
    }

    #[test]
    fn injectivity_examples() {
        let ring4 = named(&NamedConfig::Ring(4)).unwrap();
        assert!((injectivity_radius(&ring4).unwrap() - PI / 4.0).abs() < 1e-12);
        let dod = named(&NamedConfig::Dod).unwrap();
        let rho = injectivity_radius(&dod).unwrap();
        assert!((rho - 0.5 * 63.4349_f64.to_radians()).abs() < 1e-5);
        assert!((rho - 0.55357).abs() < 1e-5);
        let fcc = named(&NamedConfig::Fcc).unwrap();
        let brute = pair_angles(&fcc).into_iter().fold(f64::INFINITY, f64::min);
        assert!((injectivity_radius(&fcc).unwrap() - brute / 2.0).abs() < 1e-15);
        assert!((brute - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_rejected() {
        let p = UnitVector::north();
        let u = Configuration::new(vec![p, p, UnitVector::south()]).unwrap();
        assert!(injectivity_radius(&u).is_err());
    }

    #[test]
    fn membership_examples() {
        let dod = named(&NamedConfig::Dod).unwrap();
        assert!(is_member(&dod, 1.0));
        assert!(!is_member(&dod, 1.2));
        assert!(is_member(&named(&NamedConfig::Fcc).unwrap(), 1.0));
        assert!(is_member(&named(&NamedConfig::Hcp).unwrap(), 1.0));
    }

    #[test]
    fn contact_graph_examples() {
        let fcc = named(&NamedConfig::Fcc).unwrap();
        let g = contact_graph(&fcc, PI / 3.0, CONTACT_TOL).unwrap();
        let brute = pair_angles(&fcc)
            .iter()
            .filter(|d| (*d - PI / 3.0).abs() < 1e-9)
            .count();
        assert_eq!(g.edges.len(), 24);
        assert_eq!(brute, 24);
        assert!(g.degrees().iter().all(|&d| d == 4));

        let dod = named(&NamedConfig::Dod).unwrap();
        assert!(contact_graph(&dod, PI / 3.0, CONTACT_TOL)
            .unwrap()
            .is_empty());

        let ring = named(&NamedConfig::Ring(6)).unwrap();
        let g = contact_graph(&ring, PI / 3.0, CONTACT_TOL).unwrap();
        assert_eq!(g.edges.len(), 6);
        for k in 0..6 {
            let (a, b) = (k.min((k + 1) % 6), k.max((k + 1) % 6));
            assert!(g.edges.contains(&(a, b)));
        }
    }

    #[test]
    fn contact_graph_rejects_overlap() {
        let fcc = named(&NamedConfig::Fcc).unwrap();
        assert!(matches!(
            contact_graph(&fcc, 1.1, CONTACT_TOL),
            Err(Error::Overlap { .. })
        ));
    }

    #[test]
    fn hcp_degrees() {
        let hcp = named(&NamedConfig::Hcp).unwrap();
        let g = contact_graph(&hcp, PI / 3.0, CONTACT_TOL).unwrap();
        assert_eq!(g.edges.len(), 24);
        assert!(g.degrees().iter().all(|&d| d == 4));
    }

    #[test]
    fn fcc_vertex_transitive() {
        // every vertex sees the same sorted list of separations
        let fcc = named(&NamedConfig::Fcc).unwrap();
        let profile = |i: usize| {
            let mut v: Vec<i64> = (0..12)
                .filter(|&j| j != i)
                .map(|j| (angular_distance(&fcc.point(i), &fcc.point(j)) * 1e9).round() as i64)
                .collect();
            v.sort();
            v
        };
        let p0 = profile(0);
        for i in 1..12 {
            assert_eq!(profile(i), p0);
        }
    }

    #[test]
    fn dod_chart() {
        let h = dod_face_height();
        assert!((h - 0.79465).abs() < 1e-5);
        let dod = named(&NamedConfig::Dod).unwrap();
        let edge = (1.0 / 5f64.sqrt()).acos();
        assert!((edge.to_degrees() - 63.4349).abs() < 1e-4);
        let angles = pair_angles(&dod);
        assert_eq!(
            angles.iter().filter(|d| (*d - edge).abs() < 1e-6).count(),
            30
        );
        assert!(angles.iter().all(|d| *d > edge - 1e-9));
        let c: Vec3 = dod.points().iter().map(|p| p.vec()).sum();
        assert!(c.norm() < 1e-12);
        assert!(dod.point(0).y().abs() < 1e-15 && dod.point(0).x() > 0.0);
        assert!(dod.point(3).y().abs() < 1e-15 && dod.point(3).x() > 0.0);
        for i in 0..3 {
            assert!((dod.point(i).z() - h).abs() < 1e-12);
            assert!((dod.point(9 + i).z() + h).abs() < 1e-12);
        }
        // antipodal pairs
        for i in 0..12 {
            let anti = (0..12)
                .filter(|&j| (dod.point(i).vec() + dod.point(j).vec()).norm() < 1e-12)
                .count();
            assert_eq!(anti, 1);
        }
    }

    #[test]
    fn named_examples() {
        let tet = named(&NamedConfig::Tet).unwrap();
        let t = (-1.0f64 / 3.0).acos();
        assert!(pair_angles(&tet).iter().all(|d| (d - t).abs() < 1e-12));
        for name in [NamedConfig::Fcc, NamedConfig::Hcp] {
            let u = named(&name).unwrap();
            let m = pair_angles(&u).into_iter().fold(f64::INFINITY, f64::min);
            assert!((m - PI / 3.0).abs() < 1e-12);
        }
        assert!(named(&NamedConfig::Theta5([1.0, 2.0, 2.0 * PI - 3.0])).is_err());
        assert!(named(&NamedConfig::Theta5([2.0, 2.0, 2.0])).is_err());
        assert!(named(&NamedConfig::Theta5([2.0, 2.1, 2.0 * PI - 4.1])).is_ok());
        assert!(named(&NamedConfig::Ring(2)).is_err());
    }

    #[test]
    fn triangle_latitude() {
        for th in [0.3, PI / 3.0, 1.5, 2.0] {
            let a = triangle_polar_angle(th);
            let p = UnitVector::from_spherical(a, 0.0);
            let q = UnitVector::from_spherical(a, 2.0 * PI / 3.0);
            assert!((angular_distance(&p, &q) - th).abs() < 1e-12);
        }
        let a = triangle_polar_angle(PI / 3.0);
        assert!((a.sin() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ring_separation() {
        for n in 3..=20 {
            let u = named(&NamedConfig::Ring(n)).unwrap();
            let rho = injectivity_radius(&u).unwrap();
            assert!((2.0 * rho - 2.0 * PI / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn align_examples() {
        let u = random_config(12, 3);
        let r0 = Rotation::about_axis(Vec3::new(0.3, -1.0, 0.4), 2.1);
        let al = align(&u, &u.rotate_all(&r0));
        assert!(al.rms < 1e-10);
        assert!((al.rotation.matrix() - r0.matrix()).abs().max() < 1e-10);

        let dod = named(&NamedConfig::Dod).unwrap();
        let fcc = named(&NamedConfig::Fcc).unwrap();
        let hcp = named(&NamedConfig::Hcp).unwrap();
        assert!(align(&dod, &fcc).rms > 0.1);
        assert!(!equivalent_mod_rotation(&dod, &fcc, EQUIV_TOL));
        assert!(!equivalent_mod_rotation(&fcc, &hcp, EQUIV_TOL));
        assert!(equivalent_mod_rotation(&u, &u.rotate_all(&r0), EQUIV_TOL));

        let mut pts = u.points().to_vec();
        pts.swap(0, 1);
        let swapped = Configuration::new(pts).unwrap();
        assert!(align(&u, &swapped).rms > 1e-3);
    }

    #[test]
    fn relabel_matching_recovers_permutation() {
        let dod = named(&NamedConfig::Dod).unwrap();
        let images = [5, 2, 9, 0, 11, 1, 3, 10, 4, 8, 6, 7];
        let r = Rotation::about_axis(Vec3::new(1.0, 2.0, 3.0), 0.7);
        let moved = dod.relabeled(&images).rotate_all(&r);
        // moved point images[k] is dod point k, so mapping moved -> dod inverts it
        let (found, al) = match_up_to_relabeling(&moved, &dod, 1e-9).unwrap();
        assert!(al.rms < 1e-12);
        // the icosahedral group makes the labeling unique only up to symmetry
        assert!(align(&moved.relabeled(&found), &dod).rms < 1e-12);

        let generic = Configuration::from_vecs(
            &(0..7)
                .map(|k| {
                    Vec3::new(
                        (k as f64 * 1.3).sin(),
                        (k as f64 * 2.1).cos(),
                        0.3 * k as f64 - 1.0,
                    )
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let perm = [3, 0, 6, 1, 5, 2, 4];
        let moved = generic.relabeled(&perm).rotate_all(&r);
        let (found, _) = match_up_to_relabeling(&moved, &generic, 1e-9).unwrap();
        for k in 0..7 {
            assert_eq!(found[perm[k]], k);
        }
        assert!(match_up_to_relabeling(&named(&NamedConfig::Fcc).unwrap(), &dod, 1e-3).is_none());
    }

    #[test]
    fn json_round_trip() {
        let fcc = named(&NamedConfig::Fcc).unwrap();
        let s = config_to_json(&fcc, Some(1.0));
        let (back, r) = config_from_json(&s).unwrap();
        assert_eq!(r, Some(1.0));
        assert!(align(&back, &fcc).rms < 1e-15);
        assert!(
            config_from_json(r#"{"n":3,"radius":null,"points":[[1,0,0],[0,1,0],[0,0,1.01]]}"#)
                .is_err()
        );
        assert!(config_from_json(r#"{"n":3,"radius":null,"points":[[1,0,0],[0,1,0]]}"#).is_err());
        assert!(config_from_json(
            r#"{"n":3,"radius":null,"points":[[1,0,0],[0,1,0],[0,0,1.0000001]]}"#
        )
        .is_ok());
        assert!(config_from_json(r#"{"n":3,"radius":null"#).is_err());
    }

    #[test]
    fn membership_matches_definition() {
        for seed in 0..50 {
            let u = random_config(8, seed);
            let m = u.min_separation();
            let r_at = crate::geom::radius_from_angle(m).unwrap();
            assert!(is_member(&u, r_at * (1.0 - 1e-9)));
            assert!(!is_member(&u, r_at * (1.0 + 1e-6)));
            assert!(angle_from_radius(r_at).unwrap() - m < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn injectivity_invariant_under_rotation(seed in 0u64..10_000, ax in -1.0..1.0f64, ay in -1.0..1.0f64, ang in -PI..PI) {
            let u = random_config(9, seed);
            let r = Rotation::about_axis(Vec3::new(ax, ay, 0.5), ang);
            let a = injectivity_radius(&u).unwrap();
            let b = injectivity_radius(&u.rotate_all(&r)).unwrap();
            // arccos conditioning at tiny separations
            let slack = if a < 1e-3 { 1e-8 } else { 1e-12 };
            prop_assert!((a - b).abs() < slack);
        }

        #[test]
        fn injectivity_invariant_under_permutation(seed in 0u64..10_000, shift in 1usize..9) {
            let u = random_config(9, seed);
            let images: Vec<usize> = (0..9).map(|k| (k + shift) % 9).collect();
            prop_assert_eq!(injectivity_radius(&u).unwrap(), injectivity_radius(&u.relabeled(&images)).unwrap());
        }
    }
}
