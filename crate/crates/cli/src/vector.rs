use ks_core::sphere::Vec3;
use ks_core::{Ray, Tolerance};

use crate::error::CliError;

/// Splits on commas outside parentheses, so `atan2(1,2),0,1` has three parts.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Parses `X,Y,Z`; each component may be an expression such as `sin(0.3)`.
pub fn parse_vector(s: &str) -> Result<Vec3, CliError> {
    let parts = split_top_level(s);
    if parts.len() != 3 {
        return Err(CliError::Parse(format!("expected X,Y,Z, got {s:?}")));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        let v = meval::eval_str(part.trim())
            .map_err(|e| CliError::Parse(format!("component {part:?}: {e}")))?;
        if !v.is_finite() {
            return Err(CliError::Parse(format!("component {part:?} is not finite")));
        }
        *slot = v;
    }
    Ok(Vec3::from(out))
}

/// Parses and canonicalizes, warning on stderr when the input is visibly
/// not a unit vector.
pub fn parse_ray(s: &str, tol: Tolerance) -> Result<Ray, CliError> {
    let v = parse_vector(s)?;
    let norm = v.norm();
    let ray = Ray::canonicalize(v, tol)?;
    if (norm - 1.0).abs() > 1e-6 {
        eprintln!("warning: {s} has norm {norm}; normalized to {:?}", ray.to_array());
    }
    Ok(ray)
}
