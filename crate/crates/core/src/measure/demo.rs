//! The two contradiction derivations, run to completion.
//!
//! Both start from a split on which member of the tripod
//! `{(0,0,1), (1,0,0), (0,1,0)}` carries 1, and rotate that member to the
//! north pole before running the argument, so the resulting traces make no
//! unjustified assumption about any particular ray.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use super::trace::{DerivationTrace, FactId};
use super::MeasureError;
use crate::plane::{side_of, Side};
use crate::sphere::{complete_tripod, rotation_to_pole, third_point, Ray, Tolerance, Tripod, Vec3};

fn fixed(x: f64, y: f64, z: f64, tol: Tolerance) -> Ray {
    Ray::from_xyz(x, y, z, tol).expect("constant is a nonzero vector")
}

fn seed_tripod(tol: Tolerance) -> Tripod {
    Tripod {
        a: Ray::NORTH,
        b: fixed(1.0, 0.0, 0.0, tol),
        c: fixed(0.0, 1.0, 0.0, tol),
    }
}

/// `{(1,0,0), (0,1/√2,1/√2), (0,-1/√2,1/√2)}`: one equator point and two
/// points at height `1/√2`.
pub fn first_proof_tripod(tol: Tolerance) -> Tripod {
    Tripod {
        a: fixed(1.0, 0.0, 0.0, tol),
        b: fixed(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, tol),
        c: fixed(0.0, -FRAC_1_SQRT_2, FRAC_1_SQRT_2, tol),
    }
}

/// `{(-1/2,1/√2,1/2), (-1/2,-1/√2,1/2), (1/√2,0,1/√2)}`: two members in the
/// left half of the northern hemisphere.
pub fn constant_tripod(tol: Tolerance) -> Tripod {
    Tripod {
        a: fixed(-0.5, FRAC_1_SQRT_2, 0.5, tol),
        b: fixed(-0.5, -FRAC_1_SQRT_2, 0.5, tol),
        c: fixed(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, tol),
    }
}

/// A trace holding only `v(N) = 1`.
pub fn seed_north_pole(tol: Tolerance) -> DerivationTrace {
    let mut t = DerivationTrace::new(tol);
    t.seed_pole().expect("fresh trace accepts a seed");
    t
}

/// `q(n) = (sin(1/n), 0, cos(1/n))`.
pub fn qn_sequence(n: usize) -> Result<Ray, MeasureError> {
    if n == 0 {
        return Err(MeasureError::BadN);
    }
    let a = 1.0 / n as f64;
    Ok(fixed(a.sin(), 0.0, a.cos(), Tolerance::DEFAULT))
}

/// Smallest `n` such that `p` lies strictly between `C(q(n))` and the
/// equator, i.e. `tan(1/n) < p_x / p_z`.
pub fn cover_index(p: &Ray, tol: Tolerance) -> Result<usize, MeasureError> {
    if !(p.z() > tol.eps() && p.x() > tol.eps()) {
        return Err(MeasureError::NotInRightHalf);
    }
    let beyond = |n: usize| -> Result<bool, MeasureError> {
        Ok(side_of(p, &qn_sequence(n)?, tol)? == Side::Beyond)
    };
    let guess = (1.0 / (p.x() / p.z()).atan()).floor();
    let mut n = if guess.is_finite() && guess >= 1.0 { guess as usize } else { 1 };
    while n > 1 && beyond(n - 1)? {
        n -= 1;
    }
    while !beyond(n)? {
        n += 1;
    }
    Ok(n)
}

/// The ray at angle `π/4 - θ/2` from the pole, in the plane of the pole
/// and `p_prime`, on the side away from `p_prime` (`θ` the angle from the
/// pole to `p_prime`). Above height `1/√2` for the pole, below it for
/// `p_prime`.
pub fn clash_witness(p_prime: &Ray, tol: Tolerance) -> Result<Ray, MeasureError> {
    p_prime.require_northern_off_pole(tol)?;
    let rho = p_prime.rho_sq().sqrt();
    let theta = rho.atan2(p_prime.z());
    let beta = FRAC_PI_4 - 0.5 * theta;
    let u = Vec3::new(p_prime.x() / rho, p_prime.y() / rho, 0.0);
    Ok(Ray::canonicalize(Vec3::z() * beta.cos() - u * beta.sin(), tol)?)
}

fn check_open(t: &DerivationTrace) -> Result<(), MeasureError> {
    match t.open_leaves().first() {
        Some(&b) => Err(MeasureError::OpenBranch(b)),
        None => Ok(()),
    }
}

/// Runs the first argument with `p_prime` as the second pole.
pub fn demo_first_proof(p_prime: &Ray, tol: Tolerance) -> Result<DerivationTrace, MeasureError> {
    let z = p_prime.z();
    if !(z > FRAC_1_SQRT_2 + tol.eps() && z < 1.0 - tol.eps()) {
        return Err(MeasureError::BadPole(z));
    }
    let mut t = DerivationTrace::new(tol);
    for (child, fact) in t.split_one_of(&seed_tripod(tol))? {
        t.enter(child)?;
        if t.current_is_closed() {
            continue;
        }
        let member = t.frame_ray(fact)?;
        t.repole(fact, rotation_to_pole(&member, tol))?;
        first_proof_in_frame(&mut t, p_prime)?;
    }
    check_open(&t)?;
    Ok(t)
}

/// `v(target) = 1` for `target` above the height of `zero_fact`: both
/// other members of its tripod are 0, the equator partner by orthogonality
/// and the third point by descent.
fn one_above(t: &mut DerivationTrace, zero_fact: FactId, target: &Ray) -> Result<FactId, MeasureError> {
    let tol = t.tolerance();
    let pole = t.frame().pole_fact.ok_or(MeasureError::NoFramePole)?;
    let tri = complete_tripod(target, tol)?;
    let e = t.rule_orthogonal_zero(&tri.b, pole)?;
    if t.current_is_closed() {
        return Ok(e);
    }
    let w = t.rule_lemma_zero(zero_fact, &tri.c)?;
    if t.current_is_closed() {
        return Ok(w);
    }
    t.rule_triad_one(&tri, [e, w])
}

fn first_proof_in_frame(t: &mut DerivationTrace, p_prime: &Ray) -> Result<(), MeasureError> {
    let tol = t.tolerance();
    let pole = t.frame().pole_fact.ok_or(MeasureError::NoFramePole)?;
    let trip = first_proof_tripod(tol);
    let e_fact = t.rule_orthogonal_zero(&trip.a, pole)?;
    if t.current_is_closed() {
        return Ok(());
    }
    let witness = clash_witness(p_prime, tol)?;

    for (child, zero) in t.split_zero_among(&trip, e_fact)? {
        t.enter(child)?;
        if t.current_is_closed() {
            continue;
        }
        // Everything below height 1/√2 is 0, everything above is 1.
        let p_one = one_above(t, zero, p_prime)?;
        if t.current_is_closed() {
            continue;
        }
        one_above(t, zero, &witness)?;
        if t.current_is_closed() {
            continue;
        }

        // The same holds with p_prime as the pole.
        let witness_world = t.to_world(&witness);
        t.repole(p_one, rotation_to_pole(p_prime, tol))?;
        let e2 = t.rule_orthogonal_zero(&trip.a, p_one)?;
        if t.current_is_closed() {
            continue;
        }
        let witness_here = t.to_frame(&witness_world);
        for (grandchild, zero2) in t.split_zero_among(&trip, e2)? {
            t.enter(grandchild)?;
            if t.current_is_closed() {
                continue;
            }
            t.rule_lemma_zero(zero2, &witness_here)?;
        }
    }
    Ok(())
}

/// The `q(n)` index needed to cover the third points of both left-half
/// members of [`constant_tripod`].
pub fn second_proof_n(tol: Tolerance) -> Result<usize, MeasureError> {
    let ct = constant_tripod(tol);
    let mut n = 1;
    for q in [ct.a, ct.b] {
        n = n.max(cover_index(&third_point(&q, tol)?, tol)?);
    }
    Ok(n)
}

/// Runs the second argument.
///
/// Inside each seed frame the rays `c_j = q(n)` rotated by `j-1` steps
/// along the circle `{y = 0}`, `c_0 = N`, end at the equator point
/// `(1,0,0)`. Splitting on `v(c_1), v(c_2), …` in turn locates a pair with
/// `v(c_{j-1}) = 1`, `v(c_j) = 0`; re-poling at `c_{j-1}` puts the zero at
/// `q(n)` (or closer to the pole for the final pair) with positive `x`,
/// which is the configuration the argument starts from.
pub fn demo_second_proof(tol: Tolerance) -> Result<DerivationTrace, MeasureError> {
    let n = second_proof_n(tol)?;
    let mut t = DerivationTrace::new(tol);
    for (child, fact) in t.split_one_of(&seed_tripod(tol))? {
        t.enter(child)?;
        if t.current_is_closed() {
            continue;
        }
        let member = t.frame_ray(fact)?;
        t.repole(fact, rotation_to_pole(&member, tol))?;
        second_proof_in_frame(&mut t, n)?;
    }
    check_open(&t)?;
    Ok(t)
}

fn second_proof_in_frame(t: &mut DerivationTrace, n: usize) -> Result<(), MeasureError> {
    let tol = t.tolerance();
    let pole = t.frame().pole_fact.ok_or(MeasureError::NoFramePole)?;
    let step = 1.0 / n as f64;
    let last = (FRAC_PI_2 / step).ceil() as usize - 1;
    let end_fact = t.rule_orthogonal_zero(&fixed(1.0, 0.0, 0.0, tol), pole)?;
    if t.current_is_closed() {
        return Ok(());
    }
    let mut one = pole;
    for j in 1..=last {
        let angle = j as f64 * step;
        let c = fixed(angle.sin(), 0.0, angle.cos(), tol);
        let cases = t.split_value(&c)?;
        let (zero_child, zero_fact) = cases[0];
        let (one_child, one_fact) = cases[1];
        t.enter(zero_child)?;
        if !t.current_is_closed() {
            second_proof_leaf(t, one, zero_fact)?;
        }
        t.enter(one_child)?;
        if t.current_is_closed() {
            return Ok(());
        }
        one = one_fact;
    }
    second_proof_leaf(t, one, end_fact)
}

/// `v(one) = 1`, `v(zero) = 0`, `zero` on the circle `{y = 0}` of the
/// current frame just past `one`.
fn second_proof_leaf(t: &mut DerivationTrace, one: FactId, zero: FactId) -> Result<(), MeasureError> {
    let tol = t.tolerance();
    let one_ray = t.frame_ray(one)?;
    t.repole(one, rotation_to_pole(&one_ray, tol))?;
    debug_assert!(t.frame_ray(zero)?.x() > tol.eps());

    let ct = constant_tripod(tol);
    let mut left_ones = Vec::with_capacity(2);
    for q in [ct.a, ct.b] {
        let tri = complete_tripod(&q, tol)?;
        let e = t.rule_orthogonal_zero(&tri.b, one)?;
        if t.current_is_closed() {
            return Ok(());
        }
        // The third point lies in the right half, covered by C(zero).
        let w = t.rule_step_zero(zero, &tri.c)?;
        if t.current_is_closed() {
            return Ok(());
        }
        left_ones.push(t.rule_triad_one(&tri, [e, w])?);
        if t.current_is_closed() {
            return Ok(());
        }
    }
    t.rule_triad_zero(&ct, left_ones[0], &ct.b)?;
    Ok(())
}
