#![allow(dead_code)]

use proptest::prelude::*;

use ks_core::{Ray, Tolerance};

pub const TOL: Tolerance = Tolerance::DEFAULT;

pub fn ray_at(colat: f64, azimuth: f64) -> Ray {
    Ray::from_xyz(
        colat.sin() * azimuth.cos(),
        colat.sin() * azimuth.sin(),
        colat.cos(),
        TOL,
    )
    .unwrap()
}

/// Northern rays away from the pole and the equator.
pub fn northern() -> impl Strategy<Value = Ray> {
    (0.01f64..1.55, 0.0f64..std::f64::consts::TAU).prop_map(|(c, a)| ray_at(c, a))
}

/// `(q, p)` with `p_z < q_z - gap`.
pub fn below_pair(gap: f64) -> impl Strategy<Value = (Ray, Ray)> {
    (northern(), northern()).prop_filter_map("heights too close", move |(a, b)| {
        if a.z() > b.z() + gap {
            Some((a, b))
        } else if b.z() > a.z() + gap {
            Some((b, a))
        } else {
            None
        }
    })
}

pub fn any_vector() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-10.0f64..10.0)
        .prop_filter("near zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
}
