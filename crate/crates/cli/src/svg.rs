//! Static SVG drawings of the sphere and tangent-plane constructions.
//!
//! Plane drawings use plane units directly, with `v` flipped to point up.
//! Every marked point is a `<circle class="vertex">` carrying its exact
//! coordinates in `data-u`/`data-v` (plane) or `data-x`/`data-y`/`data-z`
//! (sphere) attributes.

use std::f64::consts::TAU;
use std::fmt::Write;

use ks_core::plane::{circle_image_line, project, PlanePoint};
use ks_core::reach::{shell, step_one};
use ks_core::sphere::{circle_of, equator_partner, GreatCircle, Vec3};
use ks_core::{Ray, Tolerance};

use crate::error::CliError;

struct Svg {
    min: (f64, f64),
    size: (f64, f64),
    stroke: f64,
    body: String,
}

impl Svg {
    fn square(radius: f64) -> Svg {
        Svg {
            min: (-radius, -radius),
            size: (2.0 * radius, 2.0 * radius),
            stroke: radius / 250.0,
            body: String::new(),
        }
    }

    fn line(&mut self, a: PlanePoint, b: PlanePoint, class: &str) {
        let _ = writeln!(
            self.body,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            a.u, -a.v, b.u, -b.v
        );
    }

    fn polyline(&mut self, pts: &[PlanePoint], class: &str) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", p.u, -p.v)).collect();
        let _ = writeln!(self.body, r#"<polyline class="{class}" points="{}"/>"#, coords.join(" "));
    }

    fn polygon(&mut self, pts: &[PlanePoint], class: &str) {
        if pts.len() < 3 {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", p.u, -p.v)).collect();
        let _ = writeln!(self.body, r#"<polygon class="{class}" points="{}"/>"#, coords.join(" "));
    }

    fn ring(&mut self, c: PlanePoint, r: f64, class: &str) {
        let _ = writeln!(self.body, r#"<circle class="{class}" cx="{}" cy="{}" r="{r}"/>"#, c.u, -c.v);
    }

    fn plane_vertex(&mut self, p: PlanePoint, label: &str) {
        let r = 3.0 * self.stroke;
        let _ = writeln!(
            self.body,
            r#"<circle class="vertex" data-label="{label}" data-u="{}" data-v="{}" cx="{}" cy="{}" r="{r}"/>"#,
            p.u, p.v, p.u, -p.v
        );
        self.label(p, label);
    }

    fn sphere_vertex(&mut self, at: PlanePoint, q: &Vec3, label: &str) {
        let r = 3.0 * self.stroke;
        let _ = writeln!(
            self.body,
            r#"<circle class="vertex" data-label="{label}" data-x="{}" data-y="{}" data-z="{}" cx="{}" cy="{}" r="{r}"/>"#,
            q.x, q.y, q.z, at.u, -at.v
        );
        self.label(at, label);
    }

    fn label(&mut self, p: PlanePoint, text: &str) {
        let off = 5.0 * self.stroke;
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="{}">{text}</text>"#,
            p.u + off,
            -p.v - off,
            14.0 * self.stroke
        );
    }

    fn finish(self, title: &str) -> String {
        let s = self.stroke;
        format!(
            concat!(
                r#"<?xml version="1.0" encoding="UTF-8"?>"#,
                "\n",
                r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="600" height="600">"#,
                "\n<title>{}</title>\n<style>\n",
                "line, polyline, circle {{ fill: none; stroke: black; stroke-width: {}; }}\n",
                ".hidden {{ stroke-dasharray: {} {}; stroke: gray; }}\n",
                ".faint {{ stroke: #999; }}\n",
                ".accent {{ stroke: #c03; }}\n",
                ".shade {{ fill: #dde8f5; stroke: none; }}\n",
                "circle.vertex {{ fill: black; stroke: none; }}\n",
                "text {{ font-family: sans-serif; }}\n",
                "</style>\n{}</svg>\n"
            ),
            self.min.0, self.min.1, self.size.0, self.size.1, title, s, 4.0 * s, 3.0 * s, self.body
        )
    }
}

/// Re-reads a drawing and counts its marked points.
pub fn self_check(svg: &str, expected_vertices: usize) -> Result<(), CliError> {
    let doc = roxmltree::Document::parse(svg)
        .map_err(|e| CliError::CheckFailed(format!("generated SVG is malformed: {e}")))?;
    if doc.root_element().tag_name().name() != "svg" {
        return Err(CliError::CheckFailed("generated document is not <svg>".into()));
    }
    let found = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("vertex"))
        .count();
    if found != expected_vertices {
        return Err(CliError::CheckFailed(format!(
            "generated SVG has {found} vertices, expected {expected_vertices}"
        )));
    }
    Ok(())
}

/// Fixed oblique view of the unit sphere.
struct View {
    right: Vec3,
    up: Vec3,
    toward: Vec3,
}

impl View {
    fn oblique() -> View {
        let (el, az) = (0.35f64, -0.9f64);
        let toward = Vec3::new(el.cos() * az.cos(), el.cos() * az.sin(), el.sin());
        let right = Vec3::z().cross(&toward).normalize();
        let up = toward.cross(&right);
        View { right, up, toward }
    }

    fn screen(&self, p: &Vec3) -> PlanePoint {
        PlanePoint::new(p.dot(&self.right), p.dot(&self.up))
    }

    /// Draws a great circle, dashing the far half.
    fn great_circle(&self, svg: &mut Svg, c: &GreatCircle, start: &Ray, class: &str) {
        let mut run: Vec<PlanePoint> = Vec::new();
        let mut front = true;
        for k in 0..=360 {
            let p = c.point_at(start, TAU * k as f64 / 360.0);
            let f = p.dot(&self.toward) >= 0.0;
            if f != front && !run.is_empty() {
                let last = *run.last().unwrap();
                svg.polyline(&run, if front { class } else { "hidden" });
                run = vec![last];
                front = f;
            }
            run.push(self.screen(&p));
        }
        svg.polyline(&run, if front { class } else { "hidden" });
    }
}

/// The sphere with its equator, `C(q)`, `q`, the north pole and the two
/// equator points of `C(q)`.
pub fn render_circle(q: &Ray, tol: Tolerance) -> Result<(String, usize), CliError> {
    q.require_northern_off_pole(tol)?;
    let circle = circle_of(q, tol)?;
    let e = equator_partner(q, tol)?;
    let view = View::oblique();
    let mut svg = Svg::square(1.25);
    svg.ring(PlanePoint::ORIGIN, 1.0, "outline");
    let equator = GreatCircle { pole: Ray::NORTH };
    view.great_circle(&mut svg, &equator, &e, "faint");
    view.great_circle(&mut svg, &circle, q, "accent");
    svg.sphere_vertex(view.screen(&Vec3::z()), &Vec3::z(), "N");
    svg.sphere_vertex(view.screen(&q.vec()), &q.vec(), "q");
    svg.sphere_vertex(view.screen(&e.vec()), &e.vec(), "e");
    svg.sphere_vertex(view.screen(&-e.vec()), &-e.vec(), "-e");
    Ok((svg.finish("The great circle C(q)"), 4))
}

/// Clips the square `[-r, r]²` to the half-plane `x·f ≥ c`.
fn clip_square(r: f64, f: PlanePoint, c: f64) -> Vec<PlanePoint> {
    let square = [
        PlanePoint::new(-r, -r),
        PlanePoint::new(r, -r),
        PlanePoint::new(r, r),
        PlanePoint::new(-r, r),
    ];
    let inside = |p: &PlanePoint| p.dot(&f) >= c;
    let mut out = Vec::new();
    for i in 0..4 {
        let a = square[i];
        let b = square[(i + 1) % 4];
        if inside(&a) {
            out.push(a);
        }
        if inside(&a) != inside(&b) {
            let t = (c - a.dot(&f)) / (b - a).dot(&f);
            out.push(a + (b - a) * t);
        }
    }
    out
}

fn long_segment(foot: PlanePoint, dir: PlanePoint, r: f64) -> (PlanePoint, PlanePoint) {
    let reach = 3.0 * r + foot.norm();
    (foot + dir * -reach, foot + dir * reach)
}

/// The plane `H` seen from above: `h(q)`, the line `h(C(q))` and the
/// half-plane of points further from the pole than `C(q)`.
pub fn render_projection(q: &Ray, p: Option<&Ray>, tol: Tolerance) -> Result<(String, usize), CliError> {
    let line = circle_image_line(q, tol)?;
    let f = line.foot;
    let hp = p.map(|p| project(p, tol)).transpose()?;
    let r = 1.3 * f.norm().max(hp.map_or(0.0, |h| h.norm())).max(1.0) * 1.5;
    let mut svg = Svg::square(r);
    svg.polygon(&clip_square(r, f, f.norm_sq()), "shade");
    svg.line(PlanePoint::new(-r, 0.0), PlanePoint::new(r, 0.0), "faint");
    svg.line(PlanePoint::new(0.0, -r), PlanePoint::new(0.0, r), "faint");
    svg.line(PlanePoint::ORIGIN, f, "hidden");
    let (a, b) = long_segment(f, line.dir, r);
    svg.line(a, b, "accent");
    svg.plane_vertex(PlanePoint::ORIGIN, "N");
    svg.plane_vertex(f, "h(q)");
    let mut n = 2;
    if let Some(hp) = hp {
        svg.plane_vertex(hp, "h(p)");
        n += 1;
    }
    Ok((svg.finish("The plane H viewed from above"), n))
}

/// Right-angle mark at `at` between unit directions `a` and `b`.
fn right_angle(svg: &mut Svg, at: PlanePoint, a: PlanePoint, b: PlanePoint, size: f64) {
    let p1 = at + a * size;
    let p2 = at + a * size + b * size;
    let p3 = at + b * size;
    svg.polyline(&[p1, p2, p3], "mark");
}

fn unit(p: PlanePoint) -> PlanePoint {
    p * (1.0 / p.norm())
}

/// Step 1: `h(q̃)` on `h(C(q))` such that `h(p)` lies on `h(C(q̃))`, with
/// the right angle at `h(q̃)`.
pub fn render_step_one(q: &Ray, p: &Ray, tol: Tolerance) -> Result<(String, usize), CliError> {
    let mid = step_one(q, p, tol)?;
    let f = project(q, tol)?;
    let hp = project(p, tol)?;
    let hm = project(&mid, tol)?;
    let r = 1.3 * f.norm().max(hp.norm()).max(hm.norm());
    let mut svg = Svg::square(r);
    svg.line(PlanePoint::ORIGIN, f, "hidden");
    svg.line(PlanePoint::ORIGIN, hm, "hidden");
    svg.ring(hp * 0.5, hp.norm() * 0.5, "faint");
    let line_q = circle_image_line(q, tol)?;
    let (a, b) = long_segment(line_q.foot, line_q.dir, r);
    svg.line(a, b, "accent");
    if hm.norm() > 0.0 && !mid.same_subspace(q, tol) {
        let line_m = circle_image_line(&mid, tol)?;
        let (a, b) = long_segment(line_m.foot, line_m.dir, r);
        svg.line(a, b, "accent");
    }
    if (hp - hm).norm() > 0.0 && hm.norm() > 0.0 {
        right_angle(&mut svg, hm, unit(-hm), unit(hp - hm), 0.06 * r);
    }
    svg.plane_vertex(PlanePoint::ORIGIN, "N");
    svg.plane_vertex(f, "h(q)");
    svg.plane_vertex(hp, "h(p)");
    svg.plane_vertex(hm, "h(q~)");
    Ok((svg.finish("The point p can be reached from q"), 4))
}

/// The shell `h(q₀), …, h(qₙ)` with the lines `h(C(qᵢ))` and right-angle
/// marks; the view holds `dₙ` with a 10% margin.
pub fn render_shell(q: &Ray, n: usize, tol: Tolerance) -> Result<(String, usize), CliError> {
    let pts = shell(q, n, tol)?;
    let h: Vec<PlanePoint> = pts.iter().map(|p| project(p, tol)).collect::<Result<_, _>>()?;
    let dn = h.iter().map(PlanePoint::norm).fold(0.0, f64::max);
    let r = 1.1 * dn;
    let mut svg = Svg::square(r);
    svg.ring(PlanePoint::ORIGIN, h[0].norm(), "faint");
    for w in h.windows(2) {
        svg.line(PlanePoint::ORIGIN, w[0], "hidden");
        svg.line(w[0], w[1], "accent");
        right_angle(&mut svg, w[0], unit(-w[0]), unit(w[1] - w[0]), 0.02 * r);
    }
    svg.line(PlanePoint::ORIGIN, h[n], "hidden");
    for (i, p) in h.iter().enumerate() {
        svg.plane_vertex(*p, &format!("h(q{i})"));
    }
    Ok((svg.finish(&format!("The shell in the plane H for n={n}")), n + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ks_core::plane::unproject;

    const TOL: Tolerance = Tolerance::DEFAULT;

    fn vertices(svg: &str) -> Vec<(String, f64, f64)> {
        let doc = roxmltree::Document::parse(svg).unwrap();
        doc.descendants()
            .filter(|n| n.attribute("class") == Some("vertex"))
            .filter_map(|n| {
                Some((
                    n.attribute("data-label")?.to_string(),
                    n.attribute("data-u")?.parse().ok()?,
                    n.attribute("data-v")?.parse().ok()?,
                ))
            })
            .collect()
    }

    #[test]
    fn step_one_drawing_has_the_thales_vertex() {
        let q = unproject(PlanePoint::new(1.0, 0.0));
        let p = unproject(PlanePoint::new(2.0, 0.0));
        let (svg, n) = render_step_one(&q, &p, TOL).unwrap();
        self_check(&svg, n).unwrap();
        let v = vertices(&svg);
        let (_, u, w) = v.iter().find(|v| v.0 == "h(q~)").unwrap();
        assert!((u - 1.0).abs() < 1e-12 && (w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shell_drawing_for_sixteen() {
        let q = Ray::from_xyz(0.3, 0.1, 0.9, TOL).unwrap();
        let (svg, n) = render_shell(&q, 16, TOL).unwrap();
        assert_eq!(n, 17);
        self_check(&svg, 17).unwrap();
        let v = vertices(&svg);
        let ratio = 1.0 / (std::f64::consts::PI / 8.0).cos();
        for w in v.windows(2) {
            let (d0, d1) = (w[0].1.hypot(w[0].2), w[1].1.hypot(w[1].2));
            assert!((d1 / d0 - ratio).abs() < 1e-9);
        }
        assert!(render_shell(&q, 4, TOL).is_err());
    }

    #[test]
    fn circle_and_projection_drawings() {
        let q = Ray::from_xyz(0.0, 1.0, 1.0, TOL).unwrap();
        let (svg, n) = render_circle(&q, TOL).unwrap();
        self_check(&svg, n).unwrap();
        let (svg, n) = render_projection(&q, Some(&Ray::from_xyz(0.5, 0.9, 0.3, TOL).unwrap()), TOL).unwrap();
        self_check(&svg, n).unwrap();
        assert!(matches!(
            render_circle(&Ray::NORTH, TOL),
            Err(CliError::Geometry(ks_core::GeometryError::AtPole))
        ));
    }

    #[test]
    fn self_check_rejects_garbage() {
        assert!(self_check("<svg><g></svg>", 0).is_err());
        assert!(self_check("<svg xmlns=\"http://www.w3.org/2000/svg\"/>", 1).is_err());
    }
}
