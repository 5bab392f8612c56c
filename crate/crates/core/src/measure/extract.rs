use std::collections::HashSet;

use super::trace::{DerivationTrace, Rule, SplitKind};
use super::MeasureError;
use crate::sphere::{Ray, Tolerance};
use crate::triad::TriadSystem;

struct RayTable {
    tol: Tolerance,
    rays: Vec<Ray>,
}

impl RayTable {
    fn index(&mut self, r: &Ray) -> usize {
        if let Some(i) = self.rays.iter().position(|s| s.same_subspace(r, self.tol)) {
            return i;
        }
        self.rays.push(*r);
        self.rays.len() - 1
    }
}

/// Flattens a closed trace into the rays, tripods and orthogonal pairs its
/// rules relied on, across every branch.
///
/// Rays named by case splits come first, then the rest in fact order.
/// Pairs already implied by a listed triad are dropped.
pub fn extract_triad_system(t: &DerivationTrace) -> Result<TriadSystem, MeasureError> {
    if let Some(&b) = t.open_leaves().first() {
        return Err(MeasureError::OpenBranch(b));
    }
    let tol = t.tolerance();
    let mut table = RayTable { tol, rays: Vec::new() };
    let mut triads: Vec<[usize; 3]> = Vec::new();
    let mut pairs: Vec<[usize; 2]> = Vec::new();
    let mut seen_triads = HashSet::new();

    let mut add_triad = |table: &mut RayTable, members: [Ray; 3]| -> Result<(), MeasureError> {
        let mut idx = members.map(|m| table.index(&m));
        idx.sort_unstable();
        if idx[0] == idx[1] || idx[1] == idx[2] {
            return Err(MeasureError::ExtractionInconsistent);
        }
        if seen_triads.insert(idx) {
            triads.push(idx);
        }
        Ok(())
    };

    for b in t.branches() {
        if let Some(split) = &b.split {
            match &split.kind {
                SplitKind::OneOf { tripod } | SplitKind::ZeroAmong { tripod, .. } => {
                    add_triad(&mut table, tripod.members())?;
                }
                SplitKind::Value { ray } => {
                    table.index(ray);
                }
            }
        }
    }

    for fact in t.facts() {
        let j = &fact.justification;
        let this = table.index(&fact.ray);
        if let Some(tripod) = &j.tripod {
            add_triad(&mut table, tripod.members())?;
        }
        let orthogonal_to_last = matches!(
            j.rule,
            Rule::OrthogonalZero | Rule::CircleZero | Rule::LemmaZero | Rule::StepZero
        );
        if orthogonal_to_last {
            let one = j.premises.last().ok_or(MeasureError::BadPremises)?;
            let other = table.index(&t.facts()[*one].ray);
            if other == this {
                return Err(MeasureError::ExtractionInconsistent);
            }
            pairs.push([this.min(other), this.max(other)]);
        }
    }

    let mut covered = HashSet::new();
    for tr in &triads {
        covered.insert([tr[0], tr[1]]);
        covered.insert([tr[0], tr[2]]);
        covered.insert([tr[1], tr[2]]);
    }
    let mut seen_pairs = HashSet::new();
    pairs.retain(|p| !covered.contains(p) && seen_pairs.insert(*p));

    let system = TriadSystem {
        eps: tol,
        rays: table.rays,
        triads,
        pairs,
    };
    if !system.validate().accepted {
        return Err(MeasureError::ExtractionInconsistent);
    }
    Ok(system)
}
