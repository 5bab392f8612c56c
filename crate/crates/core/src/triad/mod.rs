//! Finite systems of rays with tripod and orthogonal-pair constraints, and
//! an exhaustive search for `{0,1}` colourings of them.
//!
//! A colouring gives every tripod exactly one 1 and never gives both rays
//! of an orthogonal pair a 1. A system with no colouring is a finite
//! Kochen–Specker obstruction.

mod solve;

pub use solve::{solve, solve_constraints, ColoringResult, ConstraintSet, SolveMode};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sphere::{GeometryError, Ray, Tolerance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TriadError {
    #[error("system fails orthogonality: {0}")]
    InvalidSystem(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriadSystem {
    pub eps: Tolerance,
    pub rays: Vec<Ray>,
    pub triads: Vec<[usize; 3]>,
    pub pairs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Offence {
    /// `"triad"` or `"pair"`, with its position in the system.
    pub constraint: &'static str,
    pub index: usize,
    /// The offending ray indices.
    pub rays: [usize; 2],
    pub dot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub accepted: bool,
    pub worst_residual: f64,
    pub offences: Vec<Offence>,
}

impl TriadSystem {
    pub fn empty(eps: Tolerance) -> Self {
        TriadSystem {
            eps,
            rays: Vec::new(),
            triads: Vec::new(),
            pairs: Vec::new(),
        }
    }

    pub fn constraints(&self) -> ConstraintSet {
        ConstraintSet::new(self.rays.len(), self.triads.clone(), self.pairs.clone())
    }

    /// Recomputes every constrained dot product.
    pub fn validate(&self) -> ValidationReport {
        let n = self.rays.len();
        let mut worst: f64 = 0.0;
        let mut offences = Vec::new();
        let mut check = |kind: &'static str, index: usize, i: usize, j: usize| {
            if i >= n || j >= n {
                offences.push(Offence {
                    constraint: kind,
                    index,
                    rays: [i, j],
                    dot: f64::NAN,
                });
                return;
            }
            let dot = self.rays[i].dot(&self.rays[j]).abs();
            worst = worst.max(dot);
            if i == j || !(dot <= self.eps.eps()) {
                offences.push(Offence {
                    constraint: kind,
                    index,
                    rays: [i, j],
                    dot,
                });
            }
        };
        for (k, t) in self.triads.iter().enumerate() {
            check("triad", k, t[0], t[1]);
            check("triad", k, t[0], t[2]);
            check("triad", k, t[1], t[2]);
        }
        for (k, p) in self.pairs.iter().enumerate() {
            check("pair", k, p[0], p[1]);
        }
        ValidationReport {
            accepted: offences.is_empty(),
            worst_residual: worst,
            offences,
        }
    }

    /// Canonical JSON document.
    pub fn save(&self) -> String {
        let doc = SystemDocument {
            eps: self.eps.eps(),
            rays: self.rays.iter().map(Ray::to_array).collect(),
            triads: self.triads.clone(),
            pairs: self.pairs.clone(),
        };
        let mut s = serde_json::to_string(&doc).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// Parses a system document and validates it.
    pub fn load(text: &str) -> Result<TriadSystem, TriadError> {
        let system = TriadSystem::parse(text)?;
        let report = system.validate();
        if let Some(o) = report.offences.first() {
            return Err(TriadError::Validation(format!(
                "{} {} rays {:?}: |dot| = {:e}",
                o.constraint, o.index, o.rays, o.dot
            )));
        }
        Ok(system)
    }

    /// Parses a system document, checking only that rays are unit vectors.
    pub fn parse(text: &str) -> Result<TriadSystem, TriadError> {
        let doc: SystemDocument = serde_json::from_str(text).map_err(|e| TriadError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let eps = Tolerance::new(doc.eps).map_err(|e| TriadError::Validation(e.to_string()))?;
        let rays = doc
            .rays
            .iter()
            .enumerate()
            .map(|(i, r)| {
                Ray::from_stored(*r, eps).map_err(|e: GeometryError| {
                    TriadError::Validation(format!("ray {i}: {e}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TriadSystem {
            eps,
            rays,
            triads: doc.triads,
            pairs: doc.pairs,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDocument {
    eps: f64,
    rays: Vec<[f64; 3]>,
    triads: Vec<[usize; 3]>,
    pairs: Vec<[usize; 2]>,
}
