//! Two-valued measures on rays, derived one justified fact at a time.
//!
//! A [`DerivationTrace`] records facts `v(ray) ∈ {0, 1}` under a tree of
//! exhaustive case splits. The rules are:
//!
//! | rule | statement |
//! |------|-----------|
//! | orthogonality | a ray orthogonal to a 1 is 0 |
//! | tripod | a tripod has exactly one 1 |
//! | circle | if `v(q) = 0` then `C(q)` is all 0 (orthogonality and tripod steps) |
//! | descent | if `v(q) = 0` then every northern `p` below `q` is 0 (circle steps along a reach certificate) |
//!
//! Every rule corresponds to a triad or orthogonal-pair constraint, so a
//! trace that closes every branch can be flattened by
//! [`extract_triad_system`] into a finite system with no colouring.

mod demo;
mod extract;
mod rules;
mod trace;

pub use demo::{
    clash_witness, cover_index, demo_first_proof, demo_second_proof, qn_sequence,
    seed_north_pole, constant_tripod, first_proof_tripod,
};
pub use extract::extract_triad_system;
pub use trace::{
    Bit, Branch, BranchId, DerivationTrace, FactId, Frame, FramedCertificate, Justification,
    Rule, Split, SplitKind, ValueFact,
};

use thiserror::Error;

use crate::reach::ReachError;
use crate::sphere::GeometryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Reach(#[from] ReachError),
    #[error("ray is not orthogonal to the premise (|dot| = {dot:e})")]
    NotOrthogonal { dot: f64 },
    #[error("premise fact {0} does not carry value 1")]
    PremiseNotOne(FactId),
    #[error("premise fact {0} does not carry value 0")]
    PremiseNotZero(FactId),
    #[error("premise facts do not match the tripod")]
    BadPremises,
    #[error("ray is not on C(q) (residual {residual:e})")]
    NotOnCircle { residual: f64 },
    #[error("new pole height {0} is outside (1/sqrt 2, 1)")]
    BadPole(f64),
    #[error("sequence index must be at least 1")]
    BadN,
    #[error("ray is not in the open right half of the northern hemisphere")]
    NotInRightHalf,
    #[error("branch {0} has no contradiction")]
    OpenBranch(BranchId),
    #[error("branch {0} already ends in a contradiction")]
    BranchClosed(BranchId),
    #[error("branch {0} has been split; add facts to its children")]
    BranchNotLeaf(BranchId),
    #[error("no fact {0} is visible from the current branch")]
    UnknownFact(FactId),
    #[error("no branch {0}")]
    UnknownBranch(BranchId),
    #[error("the current frame has no pole fact")]
    NoFramePole,
    #[error("rotation does not carry the fact to the north pole")]
    BadRotation,
    #[error("merging rays broke orthogonality of an extracted constraint")]
    ExtractionInconsistent,
}
