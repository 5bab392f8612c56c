//! Rays, great circles and tripods on the unit sphere.
//!
//! A one-dimensional subspace of R³ meets the unit sphere in two antipodal
//! points. A [`Ray`] stores exactly one of them, chosen by a fixed sign rule
//! (positive `z`, then positive `x`, then positive `y`), so that a subspace
//! has a single stored form and subspace equality is a tolerance comparison
//! on the absolute dot product.
//!
//! "Northern" always means `z > eps` in the coordinates at hand. Frame
//! changes are explicit [`Rotation`]s.

use std::fmt;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

/// Bound on `| |v|² - 1 |` for stored rays.
pub const UNIT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("vector is too short to define a direction")]
    ZeroVector,
    #[error("point is the north pole of the current frame")]
    AtPole,
    #[error("point is not in the open northern hemisphere of the current frame")]
    NotNorthern,
    #[error("tolerance {0} is outside (0, 1e-3)")]
    InvalidTolerance(f64),
    #[error("rays are not orthogonal (|dot| = {dot:e})")]
    NotOrthogonal { dot: f64 },
    #[error("stored vector is not of unit length (|v| = {norm})")]
    NotUnit { norm: f64 },
}

/// Absolute slack used by every geometric predicate.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-9);

    pub fn new(eps: f64) -> Result<Self, GeometryError> {
        if eps > 0.0 && eps < 1e-3 {
            Ok(Tolerance(eps))
        } else {
            Err(GeometryError::InvalidTolerance(eps))
        }
    }

    #[inline]
    pub fn eps(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::DEFAULT
    }
}

impl TryFrom<f64> for Tolerance {
    type Error = GeometryError;
    fn try_from(eps: f64) -> Result<Self, Self::Error> {
        Tolerance::new(eps)
    }
}

impl From<Tolerance> for f64 {
    fn from(t: Tolerance) -> f64 {
        t.0
    }
}

fn has_canonical_sign(v: &Vec3, eps: f64) -> bool {
    v.z > eps
        || (v.z.abs() <= eps && v.x > eps)
        || (v.z.abs() <= eps && v.x.abs() <= eps && v.y > 0.0)
}

/// A one-dimensional subspace of R³, stored as its canonical unit vector.
#[derive(Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[f64; 3]")]
pub struct Ray(Vec3);

impl Ray {
    pub const NORTH: Ray = Ray(Vector3::new(0.0, 0.0, 1.0));

    /// Normalizes `v` and picks the antipode that satisfies the sign rule.
    /// Vectors already unit to within a few ulps are kept as they are.
    pub fn canonicalize(v: Vec3, tol: Tolerance) -> Result<Ray, GeometryError> {
        let norm = v.norm();
        if !(norm > tol.eps()) {
            return Err(GeometryError::ZeroVector);
        }
        let u = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON { v } else { v / norm };
        if has_canonical_sign(&u, tol.eps()) {
            Ok(Ray(u))
        } else {
            Ok(Ray(-u))
        }
    }

    pub fn from_xyz(x: f64, y: f64, z: f64, tol: Tolerance) -> Result<Ray, GeometryError> {
        Ray::canonicalize(Vec3::new(x, y, z), tol)
    }

    /// Takes stored unit coordinates without renormalizing, so that
    /// serialized values survive a round trip bit for bit. The only
    /// adjustment is an exact sign flip when the antipode was stored.
    pub fn from_stored(v: [f64; 3], tol: Tolerance) -> Result<Ray, GeometryError> {
        let v = Vec3::from(v);
        let n2 = v.norm_squared();
        if !((n2 - 1.0).abs() <= 1e-12) {
            return Err(GeometryError::NotUnit { norm: n2.sqrt() });
        }
        if has_canonical_sign(&v, tol.eps()) {
            Ok(Ray(v))
        } else {
            Ok(Ray(-v))
        }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.0.x
    }
    #[inline]
    pub fn y(&self) -> f64 {
        self.0.y
    }
    #[inline]
    pub fn z(&self) -> f64 {
        self.0.z
    }

    #[inline]
    pub fn vec(&self) -> Vec3 {
        self.0
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }

    #[inline]
    pub fn dot(&self, other: &Ray) -> f64 {
        self.0.dot(&other.0)
    }

    /// Same subspace iff `|dot| >= 1 - eps`.
    pub fn same_subspace(&self, other: &Ray, tol: Tolerance) -> bool {
        self.dot(other).abs() >= 1.0 - tol.eps()
    }

    pub fn is_orthogonal(&self, other: &Ray, tol: Tolerance) -> bool {
        self.dot(other).abs() <= tol.eps()
    }

    pub fn is_northern(&self, tol: Tolerance) -> bool {
        self.0.z > tol.eps()
    }

    /// Squared distance from the `z` axis.
    #[inline]
    pub fn rho_sq(&self) -> f64 {
        self.0.x * self.0.x + self.0.y * self.0.y
    }

    /// Checks the precondition shared by every construction that needs
    /// `C(q)`: northern and not the pole.
    pub fn require_northern_off_pole(&self, tol: Tolerance) -> Result<(), GeometryError> {
        self.require_northern(tol)?;
        if self.rho_sq() <= tol.eps() * tol.eps() {
            return Err(GeometryError::AtPole);
        }
        Ok(())
    }

    pub fn require_northern(&self, tol: Tolerance) -> Result<(), GeometryError> {
        if self.is_northern(tol) {
            Ok(())
        } else {
            Err(GeometryError::NotNorthern)
        }
    }
}

impl From<Ray> for [f64; 3] {
    fn from(r: Ray) -> [f64; 3] {
        r.to_array()
    }
}

impl fmt::Debug for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ray({}, {}, {})", self.0.x, self.0.y, self.0.z)
    }
}

/// A great circle, stored by the ray orthogonal to its plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreatCircle {
    pub pole: Ray,
}

impl GreatCircle {
    pub fn residual(&self, p: &Ray) -> f64 {
        p.dot(&self.pole).abs()
    }

    pub fn contains(&self, p: &Ray, tol: Tolerance) -> bool {
        self.residual(p) <= tol.eps()
    }

    /// Point of the circle at parameter `angle`, measured from `start`
    /// (which must lie on the circle).
    pub fn point_at(&self, start: &Ray, angle: f64) -> Vec3 {
        let other = self.pole.vec().cross(&start.vec());
        start.vec() * angle.cos() + other * angle.sin()
    }
}

/// Three pairwise orthogonal rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tripod {
    pub a: Ray,
    pub b: Ray,
    pub c: Ray,
}

impl Tripod {
    pub fn new(a: Ray, b: Ray, c: Ray, tol: Tolerance) -> Result<Tripod, GeometryError> {
        let t = Tripod { a, b, c };
        let worst = t.worst_residual();
        if worst > tol.eps() {
            return Err(GeometryError::NotOrthogonal { dot: worst });
        }
        Ok(t)
    }

    pub fn members(&self) -> [Ray; 3] {
        [self.a, self.b, self.c]
    }

    pub fn worst_residual(&self) -> f64 {
        self.a
            .dot(&self.b)
            .abs()
            .max(self.a.dot(&self.c).abs())
            .max(self.b.dot(&self.c).abs())
    }

    /// Index of the member equal to `r` as a subspace.
    pub fn position(&self, r: &Ray, tol: Tolerance) -> Option<usize> {
        self.members().iter().position(|m| m.same_subspace(r, tol))
    }

    pub fn rotated(&self, rot: &Rotation, tol: Tolerance) -> Tripod {
        Tripod {
            a: rot.apply_ray(&self.a, tol),
            b: rot.apply_ray(&self.b, tol),
            c: rot.apply_ray(&self.c, tol),
        }
    }
}

/// The equator point orthogonal to `q`, `±(q_y, -q_x, 0)/sqrt(q_x² + q_y²)`.
pub fn equator_partner(q: &Ray, tol: Tolerance) -> Result<Ray, GeometryError> {
    q.require_northern_off_pole(tol)?;
    Ray::canonicalize(Vec3::new(q.y(), -q.x(), 0.0), tol)
}

/// `C(q)`: the great circle through `q` and its equator partners. `q` is its
/// northern-most point.
pub fn circle_of(q: &Ray, tol: Tolerance) -> Result<GreatCircle, GeometryError> {
    let e = equator_partner(q, tol)?;
    let pole = Ray::canonicalize(q.vec().cross(&e.vec()), tol)?;
    Ok(GreatCircle { pole })
}

/// The third tripod point `(-q_x, -q_y, (q_x²+q_y²)/q_z)`, normalized.
/// Coincides with the pole of `C(q)`.
pub fn third_point(q: &Ray, tol: Tolerance) -> Result<Ray, GeometryError> {
    q.require_northern_off_pole(tol)?;
    Ray::canonicalize(Vec3::new(-q.x(), -q.y(), q.rho_sq() / q.z()), tol)
}

/// `{q, equator_partner(q), third_point(q)}`.
pub fn complete_tripod(q: &Ray, tol: Tolerance) -> Result<Tripod, GeometryError> {
    let e = equator_partner(q, tol)?;
    let w = third_point(q, tol)?;
    Ok(Tripod { a: *q, b: e, c: w })
}

/// A proper rotation of R³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Rotation {
        Rotation(Matrix3::identity())
    }

    pub fn about_axis(axis: Vec3, angle: f64) -> Rotation {
        let axis = Unit::new_normalize(axis);
        Rotation(*Rotation3::from_axis_angle(&axis, angle).matrix())
    }

    pub fn from_matrix_unchecked(m: Matrix3<f64>) -> Rotation {
        Rotation(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    pub fn apply_ray(&self, r: &Ray, tol: Tolerance) -> Ray {
        Ray::canonicalize(self.apply(&r.vec()), tol).expect("rotations preserve length")
    }

    pub fn inverse(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Rotation) -> Rotation {
        Rotation(self.0 * first.0)
    }

    /// Largest entry of `RᵀR - I`.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).abs().max()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }
}

impl Serialize for Rotation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// Rotation taking `q` to the north pole, about the axis `q × N`.
pub fn rotation_to_pole(q: &Ray, tol: Tolerance) -> Rotation {
    let north = Ray::NORTH.vec();
    let axis = q.vec().cross(&north);
    let s = axis.norm();
    if s <= tol.eps() {
        return Rotation::identity();
    }
    let angle = s.atan2(q.vec().dot(&north));
    Rotation::about_axis(axis, angle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    const TOL: Tolerance = Tolerance::DEFAULT;

    fn ray(x: f64, y: f64, z: f64) -> Ray {
        Ray::from_xyz(x, y, z, TOL).unwrap()
    }

    fn close(a: &Ray, b: [f64; 3], slack: f64) -> bool {
        let d = a.to_array();
        (0..3).all(|i| (d[i] - b[i]).abs() <= slack)
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(ray(0.0, 0.0, -1.0).to_array(), [0.0, 0.0, 1.0]);
        assert_eq!(ray(0.0, -2.0, 0.0).to_array(), [0.0, 1.0, 0.0]);
        assert!(close(&ray(3.0, 0.0, 4.0), [0.6, 0.0, 0.8], 1e-15));
        assert_eq!(
            Ray::from_xyz(0.0, 0.0, 1e-12, TOL),
            Err(GeometryError::ZeroVector)
        );
    }

    #[test]
    fn tolerance_bounds() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(1e-3).is_err());
        assert!(Tolerance::new(-1e-9).is_err());
        assert_eq!(Tolerance::new(1e-6).unwrap().eps(), 1e-6);
    }

    #[test]
    fn equator_partner_examples() {
        let q = ray(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        assert!(close(&equator_partner(&q, TOL).unwrap(), [1.0, 0.0, 0.0], 1e-15));
        let q = ray(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2);
        assert!(close(&equator_partner(&q, TOL).unwrap(), [0.0, 1.0, 0.0], 1e-15));
        assert_eq!(equator_partner(&Ray::NORTH, TOL), Err(GeometryError::AtPole));
        assert_eq!(
            equator_partner(&ray(1.0, 0.0, 0.0), TOL),
            Err(GeometryError::NotNorthern)
        );
    }

    #[test]
    fn circle_of_examples() {
        let q = ray(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let c = circle_of(&q, TOL).unwrap();
        assert!(close(&c.pole, [0.0, -FRAC_1_SQRT_2, FRAC_1_SQRT_2], 1e-15));

        let q = ray(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2);
        let c = circle_of(&q, TOL).unwrap();
        assert!(close(&c.pole, [-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2], 1e-15));
        assert!(c.contains(&ray(0.0, 1.0, 0.0), TOL));
        assert!(c.contains(&q, TOL));
        assert!(!c.contains(&Ray::NORTH, TOL));
    }

    #[test]
    fn complete_tripod_examples() {
        let q = ray(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let t = complete_tripod(&q, TOL).unwrap();
        assert!(close(&t.a, [0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2], 0.0));
        assert!(close(&t.b, [1.0, 0.0, 0.0], 1e-15));
        assert!(close(&t.c, [0.0, -FRAC_1_SQRT_2, FRAC_1_SQRT_2], 1e-15));

        let q = ray(-0.5, FRAC_1_SQRT_2, 0.5);
        let t = complete_tripod(&q, TOL).unwrap();
        let s3 = 3f64.sqrt();
        assert!(close(&t.c, [0.5 / s3, -FRAC_1_SQRT_2 / s3, 1.5 / s3], 1e-15));
        assert!(close(&t.c, [0.28868, -0.40825, 0.86603], 1e-5));
        assert!(t.worst_residual() <= 1e-15);

        assert_eq!(complete_tripod(&Ray::NORTH, TOL), Err(GeometryError::AtPole));
    }

    #[test]
    fn rotation_examples() {
        let r = rotation_to_pole(&Ray::NORTH, TOL);
        assert_eq!(r, Rotation::identity());

        let r = rotation_to_pole(&ray(1.0, 0.0, 0.0), TOL);
        let image = r.apply(&Vec3::new(1.0, 0.0, 0.0));
        assert!((image - Vec3::new(0.0, 0.0, 1.0)).abs().max() <= 1e-12);

        let q = ray(0.0, 0.3f64.sin(), 0.3f64.cos());
        let r = rotation_to_pole(&q, TOL);
        assert!((r.apply(&q.vec()) - Ray::NORTH.vec()).abs().max() <= 1e-9);
        let v = Vec3::new(0.3, -1.7, 2.2);
        assert!((r.apply(&v).norm() - v.norm()).abs() <= 1e-12);
        assert!(r.orthogonality_defect() <= 1e-12);
        assert!((r.determinant() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn from_stored_keeps_bits() {
        let r = ray(0.3, -0.4, 0.5);
        let back = Ray::from_stored(r.to_array(), TOL).unwrap();
        assert_eq!(r.to_array(), back.to_array());
        let flipped = Ray::from_stored((-r.vec()).into(), TOL).unwrap();
        assert_eq!(flipped.to_array(), r.to_array());
        assert!(matches!(
            Ray::from_stored([1.0, 1.0, 0.0], TOL),
            Err(GeometryError::NotUnit { .. })
        ));
    }
}
