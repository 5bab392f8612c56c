use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use ks_core::measure::{demo_first_proof, demo_second_proof, extract_triad_system, DerivationTrace};
use ks_core::plane::project;
use ks_core::reach::{reach, shell, verify_certificate, ReachCertificate, ShellParams};
use ks_core::triad::{solve, SolveMode, TriadSystem};
use ks_core::{Ray, Tolerance};

use crate::error::CliError;
use crate::svg;

/// What a command prints, plus an optional failed expectation (exit 1).
pub struct Report {
    pub payload: Value,
    pub failure: Option<String>,
}

impl Report {
    fn ok(payload: Value) -> Report {
        Report { payload, failure: None }
    }

    fn check(payload: Value, passed: bool, why: impl Into<String>) -> Report {
        Report {
            payload,
            failure: (!passed).then(|| why.into()),
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn document(text: &str) -> Value {
    serde_json::from_str(text).expect("documents written here are valid JSON")
}

pub fn cmd_reach(from: &Ray, to: &Ray, out: Option<&Path>, tol: Tolerance) -> Result<Report, CliError> {
    let cert = reach(from, to, tol)?;
    let text = cert.save();
    if let Some(path) = out {
        write(path, &text)?;
    }
    let report = verify_certificate(&cert, tol);
    Ok(Report::check(
        document(&text),
        report.accepted,
        "constructed certificate failed verification",
    ))
}

pub fn cmd_shell(point: &Ray, n: usize, svg_out: Option<&Path>, tol: Tolerance) -> Result<Report, CliError> {
    let pts = shell(point, n, tol)?;
    let plane = pts.iter().map(|p| project(p, tol)).collect::<Result<Vec<_>, _>>()?;
    if let Some(path) = svg_out {
        let (doc, vertices) = svg::render_shell(point, n, tol)?;
        svg::self_check(&doc, vertices)?;
        write(path, &doc)?;
    }
    let params = ShellParams::new(n, plane[0].norm())?;
    Ok(Report::ok(json!({
        "n": n,
        "growth": params.growth(),
        "points": pts.iter().map(Ray::to_array).collect::<Vec<_>>(),
        "plane": plane.iter().map(|p| [p.u, p.v]).collect::<Vec<_>>(),
        "distances": plane.iter().map(|p| p.norm()).collect::<Vec<_>>(),
    })))
}

pub enum Demo {
    First(Ray),
    Second,
}

fn demo_summary(name: &str, t: &DerivationTrace, system: &TriadSystem, tol: Tolerance) -> Result<(Value, bool), CliError> {
    let result = solve(system, SolveMode::Count)?;
    let mut certificates = 0;
    let mut verified = 0;
    for f in t.facts() {
        if let Some(fc) = &f.justification.certificate {
            certificates += 1;
            if verify_certificate(&fc.certificate, tol).accepted {
                verified += 1;
            }
        }
    }
    let witnesses: Vec<Value> = t
        .leaves()
        .map(|b| {
            let pair = b.contradiction;
            json!({
                "branch": b.id,
                "label": b.label,
                "facts": pair.map(|(a, c)| [a, c]),
                "ray": pair.map(|(a, _)| t.facts()[a].ray.to_array()),
            })
        })
        .collect();
    let passed = t.is_closed() && result.count == 0 && result.exhaustive && verified == certificates;
    let summary = json!({
        "proof": name,
        "eps": tol.eps(),
        "closed": t.is_closed(),
        "facts": t.facts().len(),
        "branches": t.branches().len(),
        "leaves": witnesses.len(),
        "rays": system.rays.len(),
        "tripods": system.triads.len(),
        "pairs": system.pairs.len(),
        "certificates": certificates,
        "certificates_verified": verified,
        "count": result.count,
        "exhaustive": result.exhaustive,
        "nodes_explored": result.nodes_explored,
        "witnesses": witnesses,
    });
    Ok((summary, passed))
}

pub fn cmd_demo(which: &Demo, out: Option<&Path>, tol: Tolerance) -> Result<Report, CliError> {
    let (name, trace) = match which {
        Demo::First(pole) => ("first", demo_first_proof(pole, tol)?),
        Demo::Second => ("second", demo_second_proof(tol)?),
    };
    let system = extract_triad_system(&trace)?;
    let (summary, passed) = demo_summary(name, &trace, &system, tol)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let mut trace_text = serde_json::to_string(&trace).expect("trace serializes");
        trace_text.push('\n');
        write(&dir.join("trace.json"), &trace_text)?;
        write(&dir.join("system.json"), &system.save())?;
        let mut s = serde_json::to_string_pretty(&summary).expect("summary serializes");
        s.push('\n');
        write(&dir.join("summary.json"), &s)?;
    }
    Ok(Report::check(summary, passed, "derivation did not yield an uncolourable system"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ColorMode {
    Count,
    Witness,
    ProveNone,
}

pub fn cmd_color(file: &Path, mode: ColorMode) -> Result<Report, CliError> {
    let system = TriadSystem::load(&read(file)?)?;
    let solve_mode = match mode {
        ColorMode::Count => SolveMode::Count,
        ColorMode::Witness => SolveMode::FirstWitness,
        ColorMode::ProveNone => SolveMode::ProveNone,
    };
    let r = solve(&system, solve_mode)?;
    let (passed, why) = match mode {
        ColorMode::Count => (true, ""),
        ColorMode::Witness => (r.witness.is_some(), "no colouring exists"),
        ColorMode::ProveNone => (r.count == 0 && r.exhaustive, "a colouring exists"),
    };
    let mut payload = to_value(&r);
    payload["rays"] = json!(system.rays.len());
    Ok(Report::check(payload, passed, why))
}

pub fn cmd_verify(file: &Path, tol: Tolerance) -> Result<Report, CliError> {
    let text = read(file)?;
    let probe: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", file.display())))?;
    if probe.get("triads").is_some() {
        let system = TriadSystem::parse(&text)?;
        let rep = system.validate();
        let accepted = rep.accepted;
        let mut payload = to_value(&rep);
        payload["kind"] = json!("triad_system");
        return Ok(Report::check(payload, accepted, "system fails orthogonality"));
    }
    let cert = ReachCertificate::load(&text)?;
    let rep = verify_certificate(&cert, tol);
    let first_bad = rep.first_bad_link();
    let mut payload = to_value(&rep);
    payload["kind"] = json!("certificate");
    payload["first_bad_link"] = json!(first_bad);
    let why = match first_bad {
        Some(k) => format!("certificate rejected at link {k}"),
        None => "certificate rejected".to_string(),
    };
    Ok(Report::check(payload, rep.accepted, why))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    Circle,
    Projection,
    Step1,
    Shell,
}

pub fn cmd_render(
    figure: Figure,
    q: &Ray,
    p: Option<&Ray>,
    n: usize,
    svg_out: &Path,
    tol: Tolerance,
) -> Result<Report, CliError> {
    let (doc, vertices) = match figure {
        Figure::Circle => svg::render_circle(q, tol)?,
        Figure::Projection => svg::render_projection(q, p, tol)?,
        Figure::Step1 => {
            let p = p.ok_or_else(|| CliError::Usage("step1 needs --p".into()))?;
            svg::render_step_one(q, p, tol)?
        }
        Figure::Shell => svg::render_shell(q, n, tol)?,
    };
    svg::self_check(&doc, vertices)?;
    write(svg_out, &doc)?;
    Ok(Report::ok(json!({
        "figure": format!("{figure:?}").to_lowercase(),
        "vertices": vertices,
        "svg": svg_out.display().to_string(),
    })))
}

fn random_northern(rng: &mut ChaCha8Rng) -> Ray {
    loop {
        let z: f64 = rng.gen_range(0.01..0.999);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let rho = (1.0 - z * z).sqrt();
        if let Ok(r) = Ray::from_xyz(rho * phi.cos(), rho * phi.sin(), z, Tolerance::DEFAULT) {
            return r;
        }
    }
}

/// `(q, p)` with `p_z < q_z - gap`, drawn from a seeded stream.
pub fn random_pairs(count: usize, seed: u64, gap: f64) -> Vec<(Ray, Ray)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = random_northern(&mut rng);
        let b = random_northern(&mut rng);
        if a.z() > b.z() + gap {
            out.push((a, b));
        } else if b.z() > a.z() + gap {
            out.push((b, a));
        }
    }
    out
}

/// Reach, save, load, save again and verify for seeded random pairs.
pub fn cmd_selfcheck(pairs: usize, seed: u64, tol: Tolerance) -> Result<Report, CliError> {
    let mut accepted = 0;
    let mut failures = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut max_points = 0;
    for (i, (q, p)) in random_pairs(pairs, seed, 1e-3).iter().enumerate() {
        let cert = reach(q, p, tol)?;
        let text = cert.save();
        let back = ReachCertificate::load(&text)?;
        let rep = verify_certificate(&back, tol);
        if rep.accepted && back.save() == text {
            accepted += 1;
        } else {
            failures.push(i);
        }
        max_residual = max_residual.max(rep.max_residual.unwrap_or(0.0));
        max_points = max_points.max(cert.len());
    }
    let passed = failures.is_empty();
    Ok(Report::check(
        json!({
            "pairs": pairs,
            "seed": seed,
            "accepted": accepted,
            "failures": failures,
            "max_residual": max_residual,
            "max_points": max_points,
        }),
        passed,
        "some certificates failed the round trip",
    ))
}

pub fn cmd_codes() -> Report {
    let rows: Vec<Value> = crate::error::EXIT_CODES
        .iter()
        .map(|(c, n, m)| json!({"code": c, "name": n, "meaning": m}))
        .collect();
    Report::ok(Value::Array(rows))
}
