use thiserror::Error;

use ks_core::measure::MeasureError;
use ks_core::reach::ReachError;
use ks_core::triad::TriadError;
use ks_core::GeometryError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    CheckFailed(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Reach(#[from] ReachError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Triad(#[from] TriadError),
}

/// `(code, name, meaning)` for every exit status `ks` can return.
pub const EXIT_CODES: &[(i32, &str, &str)] = &[
    (0, "ok", "success"),
    (1, "check_failed", "a verification or colouring expectation failed"),
    (2, "usage", "bad command line"),
    (3, "io", "file could not be read or written"),
    (4, "parse", "malformed input document or vector"),
    (5, "validation", "triad system fails orthogonality or index checks"),
    (10, "zero_vector", "vector too short to define a ray"),
    (11, "at_pole", "ray is the north pole where C(q) is undefined"),
    (12, "not_northern", "ray is not in the open northern hemisphere"),
    (13, "invalid_tolerance", "eps outside (0, 1e-3)"),
    (14, "not_orthogonal", "tripod members are not orthogonal"),
    (15, "not_unit", "stored coordinates are not a unit vector"),
    (20, "not_reachable_directly", "target on the pole side of C(q)"),
    (21, "bad_shell_n", "shell size below 5"),
    (22, "no_such_n", "heights too close for any shell size"),
    (23, "unreachable", "shell scan failed"),
    (24, "not_below", "target is not below the source"),
    (25, "shell_escapes", "shell left the northern hemisphere"),
    (30, "premise_not_orthogonal", "ray not orthogonal to the premise"),
    (31, "premise_not_one", "premise does not carry 1"),
    (32, "premise_not_zero", "premise does not carry 0"),
    (33, "bad_premises", "premises do not match the tripod"),
    (34, "not_on_circle", "ray not on C(q)"),
    (35, "bad_pole", "second pole height outside (1/sqrt 2, 1)"),
    (36, "bad_index", "sequence index below 1"),
    (37, "not_in_right_half", "ray not in the right half"),
    (38, "open_branch", "a branch has no contradiction"),
    (39, "branch_closed", "rule applied on a closed branch"),
    (40, "branch_not_leaf", "rule applied on a split branch"),
    (41, "unknown_fact", "fact not visible"),
    (42, "unknown_branch", "no such branch"),
    (43, "no_frame_pole", "frame has no pole fact"),
    (44, "bad_rotation", "rotation does not reach the pole"),
    (45, "extraction_inconsistent", "extracted system not orthogonal"),
];

fn geometry_code(e: &GeometryError) -> i32 {
    match e {
        GeometryError::ZeroVector => 10,
        GeometryError::AtPole => 11,
        GeometryError::NotNorthern => 12,
        GeometryError::InvalidTolerance(_) => 13,
        GeometryError::NotOrthogonal { .. } => 14,
        GeometryError::NotUnit { .. } => 15,
    }
}

fn reach_code(e: &ReachError) -> i32 {
    match e {
        ReachError::Geometry(g) => geometry_code(g),
        ReachError::NotReachableDirectly => 20,
        ReachError::BadN(_) => 21,
        ReachError::NoSuchN => 22,
        ReachError::Unreachable => 23,
        ReachError::NotBelow { .. } => 24,
        ReachError::ShellEscapes { .. } => 25,
        ReachError::Parse { .. } => 4,
    }
}

fn measure_code(e: &MeasureError) -> i32 {
    match e {
        MeasureError::Geometry(g) => geometry_code(g),
        MeasureError::Reach(r) => reach_code(r),
        MeasureError::NotOrthogonal { .. } => 30,
        MeasureError::PremiseNotOne(_) => 31,
        MeasureError::PremiseNotZero(_) => 32,
        MeasureError::BadPremises => 33,
        MeasureError::NotOnCircle { .. } => 34,
        MeasureError::BadPole(_) => 35,
        MeasureError::BadN => 36,
        MeasureError::NotInRightHalf => 37,
        MeasureError::OpenBranch(_) => 38,
        MeasureError::BranchClosed(_) => 39,
        MeasureError::BranchNotLeaf(_) => 40,
        MeasureError::UnknownFact(_) => 41,
        MeasureError::UnknownBranch(_) => 42,
        MeasureError::NoFramePole => 43,
        MeasureError::BadRotation => 44,
        MeasureError::ExtractionInconsistent => 45,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Parse(_) => 4,
            CliError::Geometry(g) => geometry_code(g),
            CliError::Reach(r) => reach_code(r),
            CliError::Measure(m) => measure_code(m),
            CliError::Triad(t) => match t {
                TriadError::Parse { .. } => 4,
                TriadError::InvalidSystem(_) | TriadError::Validation(_) => 5,
            },
        }
    }

    pub fn code_name(&self) -> &'static str {
        let code = self.exit_code();
        EXIT_CODES
            .iter()
            .find(|(c, _, _)| *c == code)
            .map(|(_, n, _)| *n)
            .unwrap_or("unknown")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn every_code_is_documented_once() {
        let codes: HashSet<i32> = EXIT_CODES.iter().map(|c| c.0).collect();
        assert_eq!(codes.len(), EXIT_CODES.len());
        let samples: Vec<CliError> = vec![
            CliError::CheckFailed(String::new()),
            CliError::Usage(String::new()),
            CliError::Io { path: String::new(), source: std::io::Error::other("x") },
            CliError::Parse(String::new()),
            GeometryError::ZeroVector.into(),
            GeometryError::AtPole.into(),
            GeometryError::NotNorthern.into(),
            GeometryError::InvalidTolerance(1.0).into(),
            GeometryError::NotOrthogonal { dot: 1.0 }.into(),
            GeometryError::NotUnit { norm: 2.0 }.into(),
            ReachError::NotReachableDirectly.into(),
            ReachError::BadN(4).into(),
            ReachError::NoSuchN.into(),
            ReachError::Unreachable.into(),
            ReachError::NotBelow { source_z: 0.1, target_z: 0.2 }.into(),
            ReachError::ShellEscapes { index: 1 }.into(),
            MeasureError::NotOrthogonal { dot: 1.0 }.into(),
            MeasureError::PremiseNotOne(0).into(),
            MeasureError::PremiseNotZero(0).into(),
            MeasureError::BadPremises.into(),
            MeasureError::NotOnCircle { residual: 1.0 }.into(),
            MeasureError::BadPole(0.5).into(),
            MeasureError::BadN.into(),
            MeasureError::NotInRightHalf.into(),
            MeasureError::OpenBranch(0).into(),
            MeasureError::BranchClosed(0).into(),
            MeasureError::BranchNotLeaf(0).into(),
            MeasureError::UnknownFact(0).into(),
            MeasureError::UnknownBranch(0).into(),
            MeasureError::NoFramePole.into(),
            MeasureError::BadRotation.into(),
            MeasureError::ExtractionInconsistent.into(),
        ];
        let mut seen = HashSet::new();
        for e in &samples {
            let c = e.exit_code();
            assert!(c != 0 && codes.contains(&c), "{e:?}");
            assert!(seen.insert(c), "duplicate {c}");
        }
        assert_eq!(seen.len() + 1, EXIT_CODES.len() - 1);
        assert_eq!(CliError::from(ReachError::Geometry(GeometryError::AtPole)).exit_code(), 11);
        assert_eq!(CliError::from(TriadError::Validation(String::new())).exit_code(), 5);
    }
}
