//! Spherical geometry on the unit 2-sphere.
//!
//! Angles are radians throughout. A touching sphere of radius `r` around a
//! unit central sphere has its touching point on S²; two such spheres are
//! disjoint exactly when their touching points are at least
//! `angle_from_radius(r)` apart.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// A point on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", try_from = "[f64; 3]")]
pub struct UnitVector(Vec3);

impl UnitVector {
    /// Normalizes `(x, y, z)`; fails on the zero vector.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vec(Vec3::new(x, y, z))
    }

    pub fn from_vec(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::Domain(format!("cannot normalize {v:?}")));
        }
        Ok(UnitVector(v / n))
    }

    /// Normalizes a vector already known to be far from zero.
    pub(crate) fn normalize(v: Vec3) -> Self {
        UnitVector(v / v.norm())
    }

    /// Point at polar angle `polar` from +z and longitude `lon` from +x.
    pub fn from_spherical(polar: f64, lon: f64) -> Self {
        let (sp, cp) = polar.sin_cos();
        let (sl, cl) = lon.sin_cos();
        UnitVector(Vec3::new(sp * cl, sp * sl, cp))
    }

    pub fn north() -> Self {
        UnitVector(Vec3::z())
    }

    pub fn south() -> Self {
        UnitVector(-Vec3::z())
    }

    pub fn vec(&self) -> Vec3 {
        self.0
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn polar(&self) -> f64 {
        self.0.z.clamp(-1.0, 1.0).acos()
    }

    pub fn longitude(&self) -> f64 {
        self.0.y.atan2(self.0.x)
    }

    /// An orthonormal basis of the tangent plane at this point.
    pub fn tangent_basis(&self) -> (Vec3, Vec3) {
        let u = self.0;
        let helper = if u.x.abs() < 0.6 {
            Vec3::x()
        } else if u.y.abs() < 0.6 {
            Vec3::y()
        } else {
            Vec3::z()
        };
        let e1 = (helper - u * u.dot(&helper)).normalize();
        let e2 = u.cross(&e1);
        (e1, e2)
    }
}

impl From<UnitVector> for [f64; 3] {
    fn from(u: UnitVector) -> Self {
        [u.0.x, u.0.y, u.0.z]
    }
}

impl TryFrom<[f64; 3]> for UnitVector {
    type Error = Error;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        UnitVector::new(a[0], a[1], a[2])
    }
}

/// A tangent vector based at a point of the sphere.
#[derive(Clone, Copy, Debug)]
pub struct TangentVector {
    base: UnitVector,
    direction: Vec3,
}

impl TangentVector {
    /// Projects `direction` onto the tangent plane at `base`.
    pub fn new(base: UnitVector, direction: Vec3) -> Self {
        let u = base.vec();
        TangentVector {
            base,
            direction: direction - u * u.dot(&direction),
        }
    }

    pub fn base(&self) -> UnitVector {
        self.base
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }
}

/// A proper rotation of R³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Rotation by `angle` about `axis` (right-hand rule).
    pub fn about_axis(axis: Vec3, angle: f64) -> Self {
        let k = axis.normalize();
        let (s, c) = angle.sin_cos();
        let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
        Rotation(Matrix3::identity() + kx * s + kx * kx * (1.0 - c))
    }

    /// Accepts `m` if it is orthogonal with determinant +1 within 1e-9.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let err = (m.transpose() * m - Matrix3::identity()).abs().max();
        if err > 1e-9 || (m.determinant() - 1.0).abs() > 1e-9 {
            return Err(Error::Domain("matrix is not a proper rotation".into()));
        }
        Ok(Rotation(m))
    }

    /// Rotation taking unit vector `a` to unit vector `b` about their common normal.
    pub fn between(a: UnitVector, b: UnitVector) -> Self {
        let axis = a.vec().cross(&b.vec());
        let s = axis.norm();
        let c = a.vec().dot(&b.vec());
        if s < 1e-15 {
            if c > 0.0 {
                return Rotation::identity();
            }
            let (e1, _) = a.tangent_basis();
            return Rotation::about_axis(e1, std::f64::consts::PI);
        }
        Rotation::about_axis(axis, s.atan2(c))
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        self.0
    }

    pub fn inverse(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn compose(&self, other: &Rotation) -> Self {
        Rotation(self.0 * other.0)
    }

    pub fn apply_vec(&self, v: Vec3) -> Vec3 {
        self.0 * v
    }
}

/// Central angle between two points, via the clamped dot product.
pub fn angular_distance(u: &UnitVector, v: &UnitVector) -> f64 {
    u.0.dot(&v.0).clamp(-1.0, 1.0).acos()
}

/// Radius of touching spheres whose touching points are `theta` apart.
pub fn radius_from_angle(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::Domain(format!("angle {theta} outside (0, pi)")));
    }
    let s = (theta / 2.0).sin();
    Ok(s / (1.0 - s))
}

/// Minimal separation of touching points for spheres of radius `r`.
pub fn angle_from_radius(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    Ok(2.0 * (r / (1.0 + r)).asin())
}

/// `normalize(u + t * v)`.
pub fn displace(u: &UnitVector, v: &TangentVector, t: f64) -> Result<UnitVector> {
    let w = u.vec() + v.direction() * t;
    let n = w.norm();
    if n < 1e-14 {
        return Err(Error::DegenerateDisplacement);
    }
    Ok(UnitVector(w / n))
}

/// Geodesic exponential map at `u` applied to `t * v`.
pub fn exp_map(u: &UnitVector, v: &TangentVector, t: f64) -> UnitVector {
    let w = v.direction() * t;
    let a = w.norm();
    if a < 1e-300 {
        return *u;
    }
    UnitVector::normalize(u.vec() * a.cos() + w * (a.sin() / a))
}

pub fn rotate(r: &Rotation, u: &UnitVector) -> UnitVector {
    UnitVector::normalize(r.0 * u.0)
}

/// Point at fraction `s` along the minor great-circle arc from `a` to `b`.
pub fn slerp(a: &UnitVector, b: &UnitVector, s: f64) -> UnitVector {
    let omega = angular_distance(a, b);
    if omega < 1e-12 {
        return UnitVector::normalize(a.0 * (1.0 - s) + b.0 * s);
    }
    let so = omega.sin();
    let wa = ((1.0 - s) * omega).sin() / so;
    let wb = (s * omega).sin() / so;
    UnitVector::normalize(a.0 * wa + b.0 * wb)
}

/// Unit tangent at `u` pointing along the geodesic toward `v`.
pub fn unit_tangent_toward(u: &UnitVector, v: &UnitVector) -> Option<Vec3> {
    let w = v.0 - u.0 * u.0.dot(&v.0);
    let n = w.norm();
    if n < 1e-12 {
        None
    } else {
        Some(w / n)
    }
}
