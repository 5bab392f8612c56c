//! Propagation rules. Rays passed in are in the current frame; facts are
//! stored in world coordinates.

use super::trace::{Bit, DerivationTrace, FactId, FramedCertificate, Justification, Rule};
use super::MeasureError;
use crate::plane::{side_of, Side};
use crate::reach::{reach, step_one, ReachCertificate};
use crate::sphere::{circle_of, complete_tripod, equator_partner, Ray, Tripod};

impl DerivationTrace {
    fn pole_fact(&self) -> Result<FactId, MeasureError> {
        self.frame().pole_fact.ok_or(MeasureError::NoFramePole)
    }

    fn zero_premise(&self, id: FactId) -> Result<Ray, MeasureError> {
        let f = self.premise(id)?;
        if f.value != Bit::Zero {
            return Err(MeasureError::PremiseNotZero(id));
        }
        Ok(self.to_frame(&f.ray))
    }

    /// `v(one_fact) = 1` and `p ⟂ that ray` give `v(p) = 0`.
    pub fn rule_orthogonal_zero(&mut self, p: &Ray, one_fact: FactId) -> Result<FactId, MeasureError> {
        let one = self.premise(one_fact)?;
        if one.value != Bit::One {
            return Err(MeasureError::PremiseNotOne(one_fact));
        }
        let world = self.to_world(p);
        let dot = world.dot(&one.ray);
        if dot.abs() > self.tolerance().eps() {
            return Err(MeasureError::NotOrthogonal { dot });
        }
        self.add_fact(world, Bit::Zero, Justification::bare(Rule::OrthogonalZero, vec![one_fact]))
    }

    /// Two members of `trip` at 0 give the third 1.
    pub fn rule_triad_one(&mut self, trip: &Tripod, zero_facts: [FactId; 2]) -> Result<FactId, MeasureError> {
        let tol = self.tolerance();
        let world = trip.rotated(&self.frame().rotation.inverse(), tol);
        let mut hit = [false; 3];
        for &z in &zero_facts {
            let f = self.premise(z)?;
            if f.value != Bit::Zero {
                return Err(MeasureError::PremiseNotZero(z));
            }
            let at = world.position(&f.ray, tol).ok_or(MeasureError::BadPremises)?;
            hit[at] = true;
        }
        if hit.iter().filter(|h| **h).count() != 2 {
            return Err(MeasureError::BadPremises);
        }
        let third = world.members()[hit.iter().position(|h| !h).unwrap()];
        let just = Justification {
            rule: Rule::TriadOne,
            premises: zero_facts.to_vec(),
            tripod: Some(world),
            certificate: None,
        };
        self.add_fact(third, Bit::One, just)
    }

    /// A member of `trip` at 1 gives `member` 0.
    pub fn rule_triad_zero(&mut self, trip: &Tripod, one_fact: FactId, member: &Ray) -> Result<FactId, MeasureError> {
        let tol = self.tolerance();
        let world = trip.rotated(&self.frame().rotation.inverse(), tol);
        let one = self.premise(one_fact)?;
        if one.value != Bit::One {
            return Err(MeasureError::PremiseNotOne(one_fact));
        }
        let at_one = world.position(&one.ray, tol).ok_or(MeasureError::BadPremises)?;
        let target = self.to_world(member);
        let at = world.position(&target, tol).ok_or(MeasureError::BadPremises)?;
        if at == at_one {
            return Err(MeasureError::BadPremises);
        }
        let just = Justification {
            rule: Rule::TriadZero,
            premises: vec![one_fact],
            tripod: Some(world),
            certificate: None,
        };
        self.add_fact(world.members()[at], Bit::Zero, just)
    }

    /// Circle rule as a macro: `v(q) = 0` with `q` northern in the current frame
    /// gives `v(e(q)) = 0` (orthogonal to the pole), then `v(n(q)) = 1` (tripod rule on
    /// `complete_tripod(q)`), then `v(p) = 0` for `p ∈ C(q)` (orthogonal to
    /// `n(q)`). The intermediate facts are recorded.
    pub fn rule_circle_zero(&mut self, q_fact: FactId, p: &Ray) -> Result<FactId, MeasureError> {
        self.circle_link(q_fact, p, Rule::CircleZero, None, None)
    }

    fn circle_link(
        &mut self,
        q_fact: FactId,
        p: &Ray,
        rule: Rule,
        source: Option<FactId>,
        certificate: Option<ReachCertificate>,
    ) -> Result<FactId, MeasureError> {
        let tol = self.tolerance();
        let q = self.zero_premise(q_fact)?;
        q.require_northern_off_pole(tol)?;
        let circle = circle_of(&q, tol)?;
        if !circle.contains(p, tol) {
            return Err(MeasureError::NotOnCircle {
                residual: circle.residual(p),
            });
        }
        if p.same_subspace(&q, tol) && certificate.is_none() {
            return Ok(q_fact);
        }
        let pole = self.pole_fact()?;
        let tripod = complete_tripod(&q, tol)?;
        let e_fact = self.rule_orthogonal_zero(&equator_partner(&q, tol)?, pole)?;
        if self.current_is_closed() {
            return Ok(e_fact);
        }
        let n_fact = self.rule_triad_one(&tripod, [q_fact, e_fact])?;
        if self.current_is_closed() {
            return Ok(n_fact);
        }
        let mut premises = Vec::with_capacity(4);
        premises.extend(source);
        premises.extend([q_fact, e_fact, n_fact]);
        let frame = self.frame().rotation;
        let just = Justification {
            rule,
            premises,
            tripod: Some(tripod.rotated(&frame.inverse(), tol)),
            certificate: certificate.map(|certificate| FramedCertificate { frame, certificate }),
        };
        let world = self.to_world(p);
        self.add_fact(world, Bit::Zero, just)
    }

    /// Walks a certificate with chained [`rule_circle_zero`](Self::rule_circle_zero);
    /// the final link carries `rule` and the certificate.
    fn apply_certificate(
        &mut self,
        q_fact: FactId,
        cert: ReachCertificate,
        rule: Rule,
    ) -> Result<FactId, MeasureError> {
        let tol = self.tolerance();
        let rays: Vec<Ray> = cert
            .points
            .iter()
            .map(|p| Ray::from_stored(*p, tol))
            .collect::<Result<_, _>>()?;
        let (last, middle) = rays[1..].split_last().ok_or(MeasureError::BadPremises)?;
        let mut prev = q_fact;
        for r in middle {
            prev = self.rule_circle_zero(prev, r)?;
            if self.current_is_closed() {
                return Ok(prev);
            }
        }
        self.circle_link(prev, last, rule, Some(q_fact), Some(cert))
    }

    /// Descent: `v(q) = 0` and `p_z < q_z - eps` (current frame) give `v(p) = 0`,
    /// through the points of `reach(q, p)`.
    pub fn rule_lemma_zero(&mut self, q_fact: FactId, p: &Ray) -> Result<FactId, MeasureError> {
        let q = self.zero_premise(q_fact)?;
        let cert = reach(&q, p, self.tolerance())?;
        self.apply_certificate(q_fact, cert, Rule::LemmaZero)
    }

    /// `v(q) = 0` and `p` between `C(q)` and the equator give `v(p) = 0`
    /// through the single Step-1 point. No shell is used.
    pub fn rule_step_zero(&mut self, q_fact: FactId, p: &Ray) -> Result<FactId, MeasureError> {
        let tol = self.tolerance();
        let q = self.zero_premise(q_fact)?;
        let side = side_of(p, &q, tol)?;
        let points = match side {
            Side::PoleSide => return Err(crate::reach::ReachError::NotReachableDirectly.into()),
            Side::OnCircle => vec![q, *p],
            Side::Beyond => vec![q, step_one(&q, p, tol)?, *p],
        };
        let cert = ReachCertificate::from_rays(&points, None, tol);
        self.apply_certificate(q_fact, cert, Rule::StepZero)
    }
}
