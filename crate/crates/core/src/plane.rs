//! Central projection of the northern hemisphere onto the tangent plane
//! `H = {z = 1}` at the north pole.
//!
//! Plane coordinates are 2-vectors with the north pole at the origin. A
//! great circle `C(q)` maps to the line through `h(q)` perpendicular to
//! `h(q)`, and the open half plane away from the origin is the image of the
//! region between `C(q)` and the equator.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Sub, Neg};

use serde::Serialize;

use crate::sphere::{GeometryError, Ray, Tolerance, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanePoint {
    pub u: f64,
    pub v: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { u: 0.0, v: 0.0 };

    pub fn new(u: f64, v: f64) -> PlanePoint {
        PlanePoint { u, v }
    }

    pub fn from_polar(radius: f64, angle: f64) -> PlanePoint {
        PlanePoint::new(radius * angle.cos(), radius * angle.sin())
    }

    #[inline]
    pub fn dot(&self, other: &PlanePoint) -> f64 {
        self.u * other.u + self.v * other.v
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.u.hypot(self.v)
    }

    pub fn angle(&self) -> f64 {
        self.v.atan2(self.u)
    }

    /// Counterclockwise quarter turn.
    pub fn perp(&self) -> PlanePoint {
        PlanePoint::new(-self.v, self.u)
    }

    pub fn distance(&self, other: &PlanePoint) -> f64 {
        (*self - *other).norm()
    }
}

impl Add for PlanePoint {
    type Output = PlanePoint;
    fn add(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.u + o.u, self.v + o.v)
    }
}

impl Sub for PlanePoint {
    type Output = PlanePoint;
    fn sub(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.u - o.u, self.v - o.v)
    }
}

impl Mul<f64> for PlanePoint {
    type Output = PlanePoint;
    fn mul(self, s: f64) -> PlanePoint {
        PlanePoint::new(self.u * s, self.v * s)
    }
}

impl Neg for PlanePoint {
    type Output = PlanePoint;
    fn neg(self) -> PlanePoint {
        PlanePoint::new(-self.u, -self.v)
    }
}

/// `h(C(q))`: the line through `foot` with unit direction `dir ⟂ foot`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneLine {
    pub foot: PlanePoint,
    pub dir: PlanePoint,
}

impl PlaneLine {
    pub fn at(&self, t: f64) -> PlanePoint {
        self.foot + self.dir * t
    }

    pub fn distance_to(&self, p: &PlanePoint) -> f64 {
        let n = self.foot.norm();
        if n == 0.0 {
            return (*p - self.foot).dot(&self.dir.perp()).abs();
        }
        ((p.dot(&self.foot) - self.foot.norm_sq()) / n).abs()
    }
}

/// Position of a point relative to `C(q)` inside the northern hemisphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Side {
    /// Between `C(q)` and the north pole.
    PoleSide,
    OnCircle,
    /// Between `C(q)` and the equator.
    Beyond,
}

/// `h(q) = (q_x/q_z, q_y/q_z)`.
pub fn project(q: &Ray, tol: Tolerance) -> Result<PlanePoint, GeometryError> {
    q.require_northern(tol)?;
    Ok(PlanePoint::new(q.x() / q.z(), q.y() / q.z()))
}

/// Inverse of [`project`].
pub fn unproject(p: PlanePoint) -> Ray {
    Ray::canonicalize(Vec3::new(p.u, p.v, 1.0), Tolerance::DEFAULT)
        .expect("(u, v, 1) has norm at least one")
}

pub fn circle_image_line(q: &Ray, tol: Tolerance) -> Result<PlaneLine, GeometryError> {
    q.require_northern_off_pole(tol)?;
    let foot = project(q, tol)?;
    let dir = foot.perp() * (1.0 / foot.norm());
    Ok(PlaneLine { foot, dir })
}

/// Converts the sphere-space membership slack `eps` (on `|p · pole(C(q))|`)
/// into slack on the plane quantity `h(p)·h(q) - |h(q)|²`.
///
/// With `P = h(p)`, `F = h(q)`, the unnormalized pole of `C(q)` is
/// `(-F, |F|²)` and `p ∝ (P, 1)`, so
/// `p · pole = (|F|² - P·F) / (sqrt(1+|P|²) · |F| · sqrt(1+|F|²))`.
pub fn plane_slack(p: &PlanePoint, f: &PlanePoint, tol: Tolerance) -> f64 {
    tol.eps() * (1.0 + p.norm_sq()).sqrt() * f.norm() * (1.0 + f.norm_sq()).sqrt()
}

pub fn side_of(p: &Ray, q: &Ray, tol: Tolerance) -> Result<Side, GeometryError> {
    q.require_northern_off_pole(tol)?;
    let big_p = project(p, tol)?;
    let f = project(q, tol)?;
    Ok(classify(&big_p, &f, tol))
}

pub(crate) fn classify(p: &PlanePoint, f: &PlanePoint, tol: Tolerance) -> Side {
    let gap = p.dot(f) - f.norm_sq();
    if gap.abs() <= plane_slack(p, f, tol) {
        Side::OnCircle
    } else if gap > 0.0 {
        Side::Beyond
    } else {
        Side::PoleSide
    }
}

/// Polar angle of a northern ray measured from the pole.
pub fn colatitude(q: &Ray) -> f64 {
    q.rho_sq().sqrt().atan2(q.z()).min(FRAC_PI_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::circle_of;
    use std::f64::consts::FRAC_1_SQRT_2;

    const TOL: Tolerance = Tolerance::DEFAULT;

    #[test]
    fn project_examples() {
        assert_eq!(project(&Ray::NORTH, TOL).unwrap(), PlanePoint::ORIGIN);
        let q = Ray::from_xyz(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, TOL).unwrap();
        let p = project(&q, TOL).unwrap();
        assert!((p.u - 1.0).abs() <= 1e-15 && p.v == 0.0);
        let q = Ray::from_xyz(0.6, 0.0, 0.8, TOL).unwrap();
        assert!((project(&q, TOL).unwrap().u - 0.75).abs() <= 1e-15);
        let eq = Ray::from_xyz(1.0, 0.0, 0.0, TOL).unwrap();
        assert_eq!(project(&eq, TOL), Err(GeometryError::NotNorthern));
    }

    #[test]
    fn unproject_examples() {
        assert_eq!(unproject(PlanePoint::ORIGIN).to_array(), [0.0, 0.0, 1.0]);
        let r = unproject(PlanePoint::new(1.0, 0.0)).to_array();
        assert!((r[0] - FRAC_1_SQRT_2).abs() <= 1e-15 && (r[2] - FRAC_1_SQRT_2).abs() <= 1e-15);
        let s = 26f64.sqrt();
        let r = unproject(PlanePoint::new(3.0, 4.0)).to_array();
        for (got, want) in r.iter().zip([3.0 / s, 4.0 / s, 1.0 / s]) {
            assert!((got - want).abs() <= 1e-15);
        }
    }

    #[test]
    fn image_line_examples() {
        let q = unproject(PlanePoint::new(1.0, 0.0));
        let l = circle_image_line(&q, TOL).unwrap();
        assert!((l.dir.u).abs() <= 1e-15 && (l.dir.v - 1.0).abs() <= 1e-15);
        let q = unproject(PlanePoint::new(0.0, 2.0));
        let l = circle_image_line(&q, TOL).unwrap();
        assert!((l.dir.u + 1.0).abs() <= 1e-15 && l.dir.v.abs() <= 1e-15);
        assert_eq!(circle_image_line(&Ray::NORTH, TOL), Err(GeometryError::AtPole));
    }

    #[test]
    fn side_examples() {
        let q = unproject(PlanePoint::new(1.0, 0.0));
        let side = |u, v| side_of(&unproject(PlanePoint::new(u, v)), &q, TOL).unwrap();
        assert_eq!(side(2.0, 0.0), Side::Beyond);
        assert_eq!(side(1.0, 5.0), Side::OnCircle);
        assert_eq!(side(0.5, 0.0), Side::PoleSide);
        assert_eq!(side_of(&q, &Ray::NORTH, TOL), Err(GeometryError::AtPole));
    }

    #[test]
    fn on_circle_matches_sphere_residual() {
        let q = unproject(PlanePoint::new(0.4, -1.3));
        let c = circle_of(&q, TOL).unwrap();
        let p = unproject(PlanePoint::new(0.4, -1.3) + PlanePoint::new(1.3, 0.4) * 2.5);
        assert!(c.residual(&p) <= 1e-15);
        assert_eq!(side_of(&p, &q, TOL).unwrap(), Side::OnCircle);
    }
}
