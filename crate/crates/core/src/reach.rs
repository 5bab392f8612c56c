//! Constructive reachability along great circles `C(q)`.
//!
//! `p` is reachable from `q` when a finite chain `q = q₀, …, qₙ = p` of
//! northern points exists with `qᵢ ∈ C(qᵢ₋₁)`. Two constructions produce
//! such chains:
//!
//! * [`step_one`] handles a target strictly between `C(q)` and the equator
//!   with a single intermediate point, found in the tangent plane by a
//!   right-angle (Thales) condition.
//! * [`shell`] spirals outward from `q` in `n` equal angular steps, each
//!   along the current circle; the radial distance grows by `1/cos(2π/n)`
//!   per step, so after a full turn the spiral sits at
//!   `d₀·cos(2π/n)^(-n)` which tends to `d₀`.
//!
//! [`reach`] composes the two and emits a [`ReachCertificate`] that
//! [`verify_certificate`] checks without trusting the construction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane::{self, circle_image_line, project, unproject, PlanePoint, Side};
use crate::sphere::{circle_of, GeometryError, Ray, Tolerance, Vec3};

/// Largest shell size tried before giving up.
pub const N_MAX: usize = 1_000_000;

/// Smallest shell size.
pub const N_MIN: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReachError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("target lies on the pole side of C(q); Step 1 does not apply")]
    NotReachableDirectly,
    #[error("shell size {0} is below {N_MIN}")]
    BadN(usize),
    #[error("no shell size up to {N_MAX} separates the target (heights too close)")]
    NoSuchN,
    #[error("shell scan found no circle with the target beyond it")]
    Unreachable,
    #[error("target height {target_z} is not below source height {source_z} by more than eps")]
    NotBelow { source_z: f64, target_z: f64 },
    #[error("shell point {index} leaves the northern hemisphere")]
    ShellEscapes { index: usize },
    #[error("certificate parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// A chain `q₀, …, qₙ` with `qᵢ ∈ C(qᵢ₋₁)`, stored as raw coordinates so
/// that a loaded certificate is checked exactly as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachCertificate {
    pub points: Vec<[f64; 3]>,
    pub shell_n: Option<usize>,
    pub eps: Tolerance,
}

impl ReachCertificate {
    pub fn from_rays(rays: &[Ray], shell_n: Option<usize>, eps: Tolerance) -> Self {
        ReachCertificate {
            points: rays.iter().map(Ray::to_array).collect(),
            shell_n,
            eps,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// JSON document with the per-link residuals included for readers;
    /// they are recomputed, not trusted, on load.
    pub fn save(&self) -> String {
        let doc = CertificateDocument {
            eps: self.eps,
            shell_n: self.shell_n,
            points: self.points.clone(),
            residuals: verify_certificate(self, self.eps).residuals,
        };
        let mut s = serde_json::to_string(&doc).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn load(text: &str) -> Result<ReachCertificate, ReachError> {
        let doc: CertificateDocument = serde_json::from_str(text).map_err(|e| ReachError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Ok(ReachCertificate {
            points: doc.points,
            shell_n: doc.shell_n,
            eps: doc.eps,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDocument {
    eps: Tolerance,
    shell_n: Option<usize>,
    points: Vec<[f64; 3]>,
    residuals: Vec<Option<f64>>,
}

/// Shell geometry in the tangent plane: `dᵢ = d₀ / cos(2π/n)^i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellParams {
    n: usize,
    d0: f64,
}

impl ShellParams {
    pub fn new(n: usize, d0: f64) -> Result<ShellParams, ReachError> {
        if n < N_MIN {
            return Err(ReachError::BadN(n));
        }
        Ok(ShellParams { n, d0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step_angle(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn distance(&self, i: usize) -> f64 {
        self.d0 * (-(i as f64) * ln_cos_step(self.n)).exp()
    }

    /// `d_n / d_0 = cos(2π/n)^(-n)`.
    pub fn growth(&self) -> f64 {
        (-(self.n as f64) * ln_cos_step(self.n)).exp()
    }
}

/// `ln cos(2π/n)`, written as `ln(1 - 2 sin²(π/n))` to keep precision for
/// large `n`.
fn ln_cos_step(n: usize) -> f64 {
    let s = (PI / n as f64).sin();
    (-2.0 * s * s).ln_1p()
}

/// Finds `q̃ ∈ C(q)` with `p ∈ C(q̃)`.
///
/// On the line `F + t·r` (`F = h(q)`, `r` its counterclockwise direction),
/// `x = F + t·r` must satisfy `x · (x - P) = 0`, i.e.
/// `t² - (r·P) t + |F|² - F·P = 0`. Beyond `C(q)` the constant term is
/// negative and the nonnegative root is taken.
pub fn step_one(q: &Ray, p: &Ray, tol: Tolerance) -> Result<Ray, ReachError> {
    q.require_northern_off_pole(tol)?;
    let big_p = project(p, tol)?;
    let line = circle_image_line(q, tol)?;
    let f = line.foot;
    match plane::classify(&big_p, &f, tol) {
        Side::PoleSide => Err(ReachError::NotReachableDirectly),
        Side::OnCircle => Ok(*q),
        Side::Beyond => {
            let b = line.dir.dot(&big_p);
            let c = f.norm_sq() - f.dot(&big_p);
            let root = (b * b - 4.0 * c).sqrt();
            // c < 0, so the roots have opposite signs; avoid cancellation.
            let t = if b >= 0.0 {
                0.5 * (b + root)
            } else {
                2.0 * c / (b - root)
            };
            Ok(unproject(line.at(t)))
        }
    }
}

/// The outward spiral `q₀ = q, …, qₙ`.
pub fn shell(q: &Ray, n: usize, tol: Tolerance) -> Result<Vec<Ray>, ReachError> {
    q.require_northern_off_pole(tol)?;
    let f = project(q, tol)?;
    let params = ShellParams::new(n, f.norm())?;
    let phi0 = f.angle();
    let step = params.step_angle();
    let mut points = Vec::with_capacity(n + 1);
    points.push(*q);
    for i in 1..=n {
        let h = PlanePoint::from_polar(params.distance(i), phi0 + step * i as f64);
        let r = unproject(h);
        if !r.is_northern(tol) {
            return Err(ReachError::ShellEscapes { index: i });
        }
        points.push(r);
    }
    Ok(points)
}

/// Smallest `n ≥ 5` with `d₀·cos(2π/n)^(-n) < target·cos(π/n)`.
pub fn min_shell_n(d0: f64, target: f64) -> Result<usize, ReachError> {
    let slack = |n: usize| -> f64 {
        let nf = n as f64;
        d0.ln() - nf * ln_cos_step(n) - target.ln() - (PI / nf).cos().ln()
    };
    if !(slack(N_MAX) < 0.0) {
        return Err(ReachError::NoSuchN);
    }
    // `slack` is decreasing in n.
    let (mut lo, mut hi) = (N_MIN, N_MAX);
    if slack(lo) < 0.0 {
        return Ok(lo);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if slack(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn choose_shell_n(q: &Ray, p: &Ray, tol: Tolerance) -> Result<usize, ReachError> {
    check_below(q, p, tol)?;
    let d0 = project(q, tol)?.norm();
    let target = project(p, tol)?.norm();
    min_shell_n(d0, target)
}

fn check_below(q: &Ray, p: &Ray, tol: Tolerance) -> Result<(), ReachError> {
    q.require_northern_off_pole(tol)?;
    p.require_northern(tol)?;
    if !(p.z() < q.z() - tol.eps()) {
        return Err(ReachError::NotBelow {
            source_z: q.z(),
            target_z: p.z(),
        });
    }
    Ok(())
}

/// Builds a certificate that `p` is reachable from `q` (`p_z < q_z - eps`).
pub fn reach(q: &Ray, p: &Ray, tol: Tolerance) -> Result<ReachCertificate, ReachError> {
    check_below(q, p, tol)?;
    match plane::side_of(p, q, tol)? {
        Side::OnCircle => return Ok(ReachCertificate::from_rays(&[*q, *p], None, tol)),
        Side::Beyond => {
            let mid = step_one(q, p, tol)?;
            return Ok(ReachCertificate::from_rays(&[*q, mid, *p], None, tol));
        }
        Side::PoleSide => {}
    }

    let mut n = choose_shell_n(q, p, tol)?;
    loop {
        let spiral = shell(q, n, tol)?;
        let hit = spiral
            .iter()
            .position(|qi| plane::side_of(p, qi, tol).is_ok_and(|s| s != Side::PoleSide));
        if let Some(i) = hit {
            let mut chain: Vec<Ray> = spiral[..=i].to_vec();
            let mid = step_one(&spiral[i], p, tol)?;
            if !mid.same_subspace(&spiral[i], tol) {
                chain.push(mid);
            }
            chain.push(*p);
            return Ok(ReachCertificate::from_rays(&chain, Some(n), tol));
        }
        if n >= N_MAX {
            return Err(ReachError::Unreachable);
        }
        n = (2 * n).min(N_MAX);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    NotUnit { point: usize, norm: f64 },
    NotNorthern { point: usize, z: f64 },
    /// Link `k` joins `points[k-1]` to `points[k]`.
    OffCircle { link: usize, residual: f64 },
    /// `C(points[k-1])` is undefined (pole or non-northern source).
    NoCircle { link: usize },
}

impl Violation {
    /// The link a violation is charged to; a bad point `i` is charged to
    /// the link entering it (or link 1 for the source).
    pub fn link(&self) -> Option<usize> {
        match *self {
            Violation::Empty => None,
            Violation::NotUnit { point, .. } | Violation::NotNorthern { point, .. } => {
                Some(point.max(1))
            }
            Violation::OffCircle { link, .. } | Violation::NoCircle { link } => Some(link),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub accepted: bool,
    /// `residuals[k-1]` is `|q_k · pole(C(q_{k-1}))|`, `None` if undefined.
    pub residuals: Vec<Option<f64>>,
    pub max_residual: Option<f64>,
    pub min_z: Option<f64>,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn first_bad_link(&self) -> Option<usize> {
        self.violations.iter().filter_map(Violation::link).min()
    }
}

pub fn verify_certificate(c: &ReachCertificate, tol: Tolerance) -> VerificationReport {
    let eps = c.eps.eps();
    let mut violations = Vec::new();
    if c.points.is_empty() {
        return VerificationReport {
            accepted: false,
            residuals: Vec::new(),
            max_residual: None,
            min_z: None,
            violations: vec![Violation::Empty],
        };
    }

    let mut rays: Vec<Option<Ray>> = Vec::with_capacity(c.points.len());
    for (i, raw) in c.points.iter().enumerate() {
        let v = Vec3::from(*raw);
        let norm = v.norm();
        if !((norm - 1.0).abs() <= 1e-9) {
            violations.push(Violation::NotUnit { point: i, norm });
            rays.push(None);
            continue;
        }
        if !(v.z > eps) {
            violations.push(Violation::NotNorthern { point: i, z: v.z });
            rays.push(None);
            continue;
        }
        rays.push(Ray::canonicalize(v, c.eps).ok());
    }

    let mut residuals = Vec::with_capacity(c.points.len().saturating_sub(1));
    for k in 1..c.points.len() {
        let circle = rays[k - 1].as_ref().and_then(|a| circle_of(a, c.eps).ok());
        let residual = match circle {
            Some(circle) => Some(Vec3::from(c.points[k]).dot(&circle.pole.vec()).abs()),
            None => {
                if rays[k - 1].is_some() {
                    violations.push(Violation::NoCircle { link: k });
                }
                None
            }
        };
        if let Some(r) = residual {
            if !(r <= tol.eps()) {
                violations.push(Violation::OffCircle { link: k, residual: r });
            }
        }
        residuals.push(residual);
    }

    let max_residual = residuals.iter().flatten().copied().reduce(f64::max);
    let min_z = c.points.iter().map(|p| p[2]).reduce(f64::min);
    VerificationReport {
        accepted: violations.is_empty(),
        residuals,
        max_residual,
        min_z,
        violations,
    }
}

/// `n·ln(cos(2π/n)) + 2π²/n`, the gap left by the leading term of the
/// expansion of `ln(cos(2π/n)^n)`.
pub fn asymptotic_residual(n: usize) -> Result<f64, ReachError> {
    if n < N_MIN {
        return Err(ReachError::BadN(n));
    }
    let nf = n as f64;
    Ok(nf * ln_cos_step(n) + 2.0 * PI * PI / nf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::{project, unproject};
    use std::f64::consts::FRAC_1_SQRT_2;

    const TOL: Tolerance = Tolerance::DEFAULT;

    fn at(u: f64, v: f64) -> Ray {
        unproject(PlanePoint::new(u, v))
    }

    #[test]
    fn step_one_examples() {
        let q = at(1.0, 0.0);
        let mid = step_one(&q, &at(2.0, 0.0), TOL).unwrap();
        let h = project(&mid, TOL).unwrap();
        assert!((h.u - 1.0).abs() <= 1e-12 && (h.v - 1.0).abs() <= 1e-12);

        let same = step_one(&q, &at(1.0, 5.0), TOL).unwrap();
        assert_eq!(same, q);

        assert_eq!(
            step_one(&q, &at(0.5, 0.0), TOL),
            Err(ReachError::NotReachableDirectly)
        );
    }

    #[test]
    fn shell_examples() {
        let q = at(1.0, 0.0);
        let s = shell(&q, 16, TOL).unwrap();
        assert_eq!(s.len(), 17);
        let last = project(&s[16], TOL).unwrap();
        // cos(π/8)^-16, evaluated at 50 digits.
        assert!((last.norm() - 3.549_396_079_493_484).abs() <= 1e-12);
        assert!(last.v.abs() <= 1e-12 && last.u > 0.0);

        for n in [5, 7, 12] {
            let s = shell(&q, n, TOL).unwrap();
            let d0 = project(&s[0], TOL).unwrap().norm();
            let d1 = project(&s[1], TOL).unwrap().norm();
            assert!((d0 / d1 - (2.0 * PI / n as f64).cos()).abs() <= 1e-12);
        }

        assert!(matches!(shell(&Ray::NORTH, 16, TOL), Err(ReachError::Geometry(GeometryError::AtPole))));
        assert_eq!(shell(&q, 4, TOL), Err(ReachError::BadN(4)));
    }

    #[test]
    fn min_shell_n_examples() {
        // Smallest n by direct high-precision evaluation of the inequality.
        assert_eq!(min_shell_n(1.0, 4.0), Ok(15));
        assert_eq!(min_shell_n(1.0, 1.001), Ok(19_750));
        assert_eq!(min_shell_n(1.0, 1.0 + 1e-15), Err(ReachError::NoSuchN));
    }

    #[test]
    fn reach_examples() {
        let q = Ray::from_xyz(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, TOL).unwrap();
        let p = Ray::from_xyz(0.5, 0.0, 0.5 * 3f64.sqrt() * 0.5, TOL).unwrap();
        let cert = reach(&q, &p, TOL).unwrap();
        assert!(verify_certificate(&cert, TOL).accepted);

        let q = at(1.0, 0.0);
        let on = at(1.0, 5.0);
        assert_eq!(reach(&q, &on, TOL).unwrap().len(), 2);

        assert!(matches!(reach(&on, &q, TOL), Err(ReachError::NotBelow { .. })));
    }

    #[test]
    fn verify_rejects_tampering() {
        let q = Ray::from_xyz(0.1, 0.2, 0.97, TOL).unwrap();
        let p = Ray::from_xyz(-0.5, 0.3, 0.4, TOL).unwrap();
        let mut cert = reach(&q, &p, TOL).unwrap();
        assert!(cert.len() > 3);
        let report = verify_certificate(&cert, TOL);
        assert!(report.accepted, "{report:?}");
        assert!(report.max_residual.unwrap() <= 1e-9);

        cert.points[2][2] = -cert.points[2][2];
        let report = verify_certificate(&cert, TOL);
        assert!(!report.accepted);
        assert_eq!(report.first_bad_link(), Some(2));

        let empty = ReachCertificate { points: vec![], shell_n: None, eps: TOL };
        let report = verify_certificate(&empty, TOL);
        assert!(!report.accepted);
        assert_eq!(report.violations, vec![Violation::Empty]);
    }

    #[test]
    fn certificate_document_round_trip() {
        let q = Ray::from_xyz(0.1, 0.2, 0.97, TOL).unwrap();
        let p = Ray::from_xyz(-0.5, 0.3, 0.4, TOL).unwrap();
        let cert = reach(&q, &p, TOL).unwrap();
        let text = cert.save();
        let back = ReachCertificate::load(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.save(), text);
        assert!(matches!(
            ReachCertificate::load("{\"eps\": 1e-9, \"points\": []}"),
            Err(ReachError::Parse { .. })
        ));
        assert!(matches!(
            ReachCertificate::load("{\"eps\": 0.5, \"shell_n\": null, \"points\": [], \"residuals\": []}"),
            Err(ReachError::Parse { .. })
        ));
    }

    #[test]
    fn asymptotic_residual_examples() {
        // 50-digit evaluations of n·ln cos(2π/n) + 2π²/n.
        assert!((asymptotic_residual(100).unwrap() - -1.300_156_830_282_906e-4).abs() <= 1e-15);
        assert!((asymptotic_residual(1000).unwrap() - -1.298_801_553_707_986e-7).abs() <= 1e-17);
        assert!(asymptotic_residual(1_000_000).unwrap().abs() < 1e-15);
        assert_eq!(asymptotic_residual(4), Err(ReachError::BadN(4)));
    }
}
