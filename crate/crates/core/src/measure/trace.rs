use serde::Serialize;

use super::MeasureError;
use crate::reach::ReachCertificate;
use crate::sphere::{Ray, Rotation, Tolerance, Tripod};

pub type FactId = usize;
pub type BranchId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(into = "u8")]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn flip(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl From<Bit> for u8 {
    fn from(b: Bit) -> u8 {
        match b {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `v(N) = 1` for the pole of a fresh frame.
    Seed,
    /// Case hypothesis introduced by a split.
    Assumption,
    /// Orthogonal to a ray with value 1.
    OrthogonalZero,
    /// The remaining member of a tripod whose other two are 0.
    TriadOne,
    /// A tripod member other than the one with value 1.
    TriadZero,
    /// On `C(q)` for a zero `q`.
    CircleZero,
    /// Below a zero, via a reach certificate.
    LemmaZero,
    /// Circle steps over a single Step-1 link.
    StepZero,
}

/// A reach certificate together with the frame its coordinates live in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FramedCertificate {
    /// World-to-frame rotation.
    pub frame: Rotation,
    pub certificate: ReachCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Justification {
    pub rule: Rule,
    pub premises: Vec<FactId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tripod: Option<Tripod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<FramedCertificate>,
}

impl Justification {
    pub(crate) fn bare(rule: Rule, premises: Vec<FactId>) -> Self {
        Justification {
            rule,
            premises,
            tripod: None,
            certificate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueFact {
    /// World coordinates.
    pub ray: Ray,
    pub value: Bit,
    pub branch: BranchId,
    #[serde(flatten)]
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitKind {
    /// Exactly one member carries 1; child `i` assumes member `i` is 1.
    OneOf { tripod: Tripod },
    /// One member is known 0; child `i` assumes the `i`-th remaining
    /// member is 0.
    ZeroAmong { tripod: Tripod, known_zero: FactId },
    /// Child 0 assumes 0, child 1 assumes 1.
    Value { ray: Ray },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Split {
    #[serde(flatten)]
    pub kind: SplitKind,
    pub children: Vec<BranchId>,
}

/// The coordinate frame rules are phrased in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frame {
    /// World-to-frame rotation.
    pub rotation: Rotation,
    /// Fact giving the frame's north pole the value 1.
    pub pole_fact: Option<FactId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub id: BranchId,
    pub parent: Option<BranchId>,
    pub label: String,
    pub assumption: Option<FactId>,
    #[serde(skip)]
    pub frame: Frame,
    pub facts: Vec<FactId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    /// `(earlier, later)`: same ray, opposite values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contradiction: Option<(FactId, FactId)>,
}

impl Branch {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

/// A justified sequence of value assignments, organized as a tree of case
/// splits. Facts are only ever added to the current leaf; everything on the
/// path from the root is visible to it.
#[derive(Debug, Clone, Serialize)]
pub struct DerivationTrace {
    #[serde(rename = "eps")]
    tol: Tolerance,
    facts: Vec<ValueFact>,
    branches: Vec<Branch>,
    #[serde(skip)]
    current: BranchId,
}

impl DerivationTrace {
    pub fn new(tol: Tolerance) -> Self {
        DerivationTrace {
            tol,
            facts: Vec::new(),
            branches: vec![Branch {
                id: 0,
                parent: None,
                label: "root".into(),
                assumption: None,
                frame: Frame {
                    rotation: Rotation::identity(),
                    pole_fact: None,
                },
                facts: Vec::new(),
                split: None,
                contradiction: None,
            }],
            current: 0,
        }
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn facts(&self) -> &[ValueFact] {
        &self.facts
    }

    pub fn fact(&self, id: FactId) -> Result<&ValueFact, MeasureError> {
        self.facts.get(id).ok_or(MeasureError::UnknownFact(id))
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch(&self, id: BranchId) -> &Branch {
        &self.branches[id]
    }

    pub fn current(&self) -> BranchId {
        self.current
    }

    pub fn frame(&self) -> &Frame {
        &self.branches[self.current].frame
    }

    /// The first contradiction found in any branch.
    pub fn contradiction(&self) -> Option<(FactId, FactId)> {
        self.branches.iter().find_map(|b| b.contradiction)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| b.is_leaf())
    }

    pub fn open_leaves(&self) -> Vec<BranchId> {
        self.leaves()
            .filter(|b| b.contradiction.is_none())
            .map(|b| b.id)
            .collect()
    }

    /// Every leaf ends in a contradiction.
    pub fn is_closed(&self) -> bool {
        self.open_leaves().is_empty()
    }

    pub fn current_is_closed(&self) -> bool {
        self.branches[self.current].contradiction.is_some()
    }

    pub fn enter(&mut self, b: BranchId) -> Result<(), MeasureError> {
        if b >= self.branches.len() {
            return Err(MeasureError::UnknownBranch(b));
        }
        self.current = b;
        Ok(())
    }

    /// `true` if `ancestor` is on the path from the root to `b`.
    pub fn is_ancestor_or_self(&self, ancestor: BranchId, mut b: BranchId) -> bool {
        loop {
            if b == ancestor {
                return true;
            }
            match self.branches[b].parent {
                Some(p) => b = p,
                None => return false,
            }
        }
    }

    fn path(&self, mut b: BranchId) -> Vec<BranchId> {
        let mut path = vec![b];
        while let Some(p) = self.branches[b].parent {
            path.push(p);
            b = p;
        }
        path.reverse();
        path
    }

    pub(crate) fn visible(&self, id: FactId) -> bool {
        id < self.facts.len() && self.is_ancestor_or_self(self.facts[id].branch, self.current)
    }

    /// The visible fact about `ray` (world coordinates), if any.
    pub fn lookup(&self, ray: &Ray) -> Option<FactId> {
        self.path(self.current)
            .into_iter()
            .flat_map(|b| self.branches[b].facts.iter().copied())
            .find(|&id| self.facts[id].ray.same_subspace(ray, self.tol))
    }

    pub fn to_world(&self, frame_ray: &Ray) -> Ray {
        self.frame().rotation.inverse().apply_ray(frame_ray, self.tol)
    }

    pub fn to_frame(&self, world_ray: &Ray) -> Ray {
        self.frame().rotation.apply_ray(world_ray, self.tol)
    }

    /// A fact's ray in the current frame.
    pub fn frame_ray(&self, id: FactId) -> Result<Ray, MeasureError> {
        Ok(self.to_frame(&self.fact(id)?.ray))
    }

    pub(crate) fn premise(&self, id: FactId) -> Result<&ValueFact, MeasureError> {
        if !self.visible(id) {
            return Err(MeasureError::UnknownFact(id));
        }
        Ok(&self.facts[id])
    }

    fn require_open_leaf(&self) -> Result<(), MeasureError> {
        let b = &self.branches[self.current];
        if !b.is_leaf() {
            return Err(MeasureError::BranchNotLeaf(self.current));
        }
        if b.contradiction.is_some() {
            return Err(MeasureError::BranchClosed(self.current));
        }
        Ok(())
    }

    /// Records `v(ray) = value` in the current branch. A visible fact about
    /// the same subspace with the same value is returned instead; one with
    /// the opposite value closes the branch.
    pub(crate) fn add_fact(
        &mut self,
        world_ray: Ray,
        value: Bit,
        justification: Justification,
    ) -> Result<FactId, MeasureError> {
        self.require_open_leaf()?;
        if let Some(&bad) = justification.premises.iter().find(|&&p| !self.visible(p)) {
            return Err(MeasureError::UnknownFact(bad));
        }
        let existing = self.lookup(&world_ray);
        if let Some(id) = existing {
            if self.facts[id].value == value {
                return Ok(id);
            }
        }
        let id = self.facts.len();
        self.facts.push(ValueFact {
            ray: world_ray,
            value,
            branch: self.current,
            justification,
        });
        self.branches[self.current].facts.push(id);
        if let Some(old) = existing {
            self.branches[self.current].contradiction = Some((old, id));
        }
        Ok(id)
    }

    /// Marks the current frame's north pole with value 1.
    pub fn seed_pole(&mut self) -> Result<FactId, MeasureError> {
        let pole = self.to_world(&Ray::NORTH);
        let id = self.add_fact(pole, Bit::One, Justification::bare(Rule::Seed, vec![]))?;
        self.branches[self.current].frame.pole_fact = Some(id);
        Ok(id)
    }

    /// Changes the current branch's frame by `relative` (applied after the
    /// current frame). `one_fact` must carry 1 and land on the new pole.
    pub fn repole(&mut self, one_fact: FactId, relative: Rotation) -> Result<(), MeasureError> {
        self.require_open_leaf()?;
        let fact = self.premise(one_fact)?;
        if fact.value != Bit::One {
            return Err(MeasureError::PremiseNotOne(one_fact));
        }
        let rotation = relative.after(&self.frame().rotation);
        let image = rotation.apply_ray(&fact.ray, self.tol);
        if !image.same_subspace(&Ray::NORTH, self.tol) {
            return Err(MeasureError::BadRotation);
        }
        self.branches[self.current].frame = Frame {
            rotation,
            pole_fact: Some(one_fact),
        };
        Ok(())
    }

    fn open_children(
        &mut self,
        kind: SplitKind,
        cases: Vec<(String, Ray, Bit)>,
    ) -> Result<Vec<BranchId>, MeasureError> {
        self.require_open_leaf()?;
        let parent = self.current;
        let frame = self.branches[parent].frame;
        let mut children = Vec::with_capacity(cases.len());
        for (label, _, _) in cases {
            let id = self.branches.len();
            self.branches.push(Branch {
                id,
                parent: Some(parent),
                label,
                assumption: None,
                frame,
                facts: Vec::new(),
                split: None,
                contradiction: None,
            });
            children.push(id);
        }
        self.branches[parent].split = Some(Split {
            kind,
            children: children.clone(),
        });
        Ok(children)
    }

    fn assume(&mut self, child: BranchId, ray: Ray, value: Bit) -> Result<FactId, MeasureError> {
        let saved = self.current;
        self.current = child;
        let id = self.add_fact(ray, value, Justification::bare(Rule::Assumption, vec![]));
        self.current = saved;
        let id = id?;
        self.branches[child].assumption = Some(id);
        Ok(id)
    }

    /// Splits on which member of `tripod` (frame coordinates) carries 1.
    pub fn split_one_of(&mut self, tripod: &Tripod) -> Result<Vec<(BranchId, FactId)>, MeasureError> {
        let world = tripod.rotated(&self.frame().rotation.inverse(), self.tol);
        let cases = world
            .members()
            .iter()
            .enumerate()
            .map(|(i, r)| (format!("member {i} = 1"), *r, Bit::One))
            .collect::<Vec<_>>();
        self.split_with(SplitKind::OneOf { tripod: world }, cases)
    }

    /// Splits on which of the two members other than `known_zero` is 0.
    pub fn split_zero_among(
        &mut self,
        tripod: &Tripod,
        known_zero: FactId,
    ) -> Result<Vec<(BranchId, FactId)>, MeasureError> {
        let zero = self.premise(known_zero)?.clone();
        if zero.value != Bit::Zero {
            return Err(MeasureError::PremiseNotZero(known_zero));
        }
        let world = tripod.rotated(&self.frame().rotation.inverse(), self.tol);
        let at = world
            .position(&zero.ray, self.tol)
            .ok_or(MeasureError::BadPremises)?;
        let cases = world
            .members()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != at)
            .map(|(i, r)| (format!("member {i} = 0"), *r, Bit::Zero))
            .collect::<Vec<_>>();
        self.split_with(
            SplitKind::ZeroAmong {
                tripod: world,
                known_zero,
            },
            cases,
        )
    }

    /// Splits on the value of `ray` (frame coordinates): 0 first, then 1.
    pub fn split_value(&mut self, ray: &Ray) -> Result<Vec<(BranchId, FactId)>, MeasureError> {
        let world = self.to_world(ray);
        let cases = vec![
            ("v = 0".to_string(), world, Bit::Zero),
            ("v = 1".to_string(), world, Bit::One),
        ];
        self.split_with(SplitKind::Value { ray: world }, cases)
    }

    fn split_with(
        &mut self,
        kind: SplitKind,
        cases: Vec<(String, Ray, Bit)>,
    ) -> Result<Vec<(BranchId, FactId)>, MeasureError> {
        let assumptions: Vec<(Ray, Bit)> = cases.iter().map(|(_, r, v)| (*r, *v)).collect();
        let children = self.open_children(kind, cases)?;
        let mut out = Vec::with_capacity(children.len());
        for (child, (ray, value)) in children.into_iter().zip(assumptions) {
            let fact = self.assume(child, ray, value)?;
            out.push((child, fact));
        }
        Ok(out)
    }

    /// Checks that every premise precedes its conclusion and is visible
    /// from the conclusion's branch.
    pub fn check_order(&self) -> Result<(), MeasureError> {
        for (id, f) in self.facts.iter().enumerate() {
            for &p in &f.justification.premises {
                if p >= id || !self.is_ancestor_or_self(self.facts[p].branch, f.branch) {
                    return Err(MeasureError::UnknownFact(p));
                }
            }
        }
        Ok(())
    }
}
