#![allow(dead_code)]

use moutard_lab::algebra::{GaussianRational, TriPoly};
use moutard_lab::moutard::HarmonicSeed;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn gauss() -> impl Strategy<Value = GaussianRational> {
    (-6i64..=6, -6i64..=6, 1i64..=4).prop_map(|(a, b, d)| GaussianRational::new(q(a, d), q(b, d)))
}

pub fn rational() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=6).prop_map(|(n, d)| q(n, d))
}

/// Polynomials in `z`, `w` (and `t` when `with_t`) with a handful of terms.
pub fn poly(max_deg: u32, max_terms: usize, with_t: bool) -> impl Strategy<Value = TriPoly> {
    let t_max: u32 = if with_t { 2 } else { 0 };
    prop::collection::vec((gauss(), 0..=max_deg, 0..=max_deg, 0..=t_max), 1..=max_terms)
        .prop_map(|terms| TriPoly::from_terms(terms.into_iter().map(|(c, a, b, t)| (c, [a, b, t]))))
}

/// `p + sigma(p)`: always sigma-fixed.
pub fn real_poly(max_deg: u32, max_terms: usize) -> impl Strategy<Value = TriPoly> {
    poly(max_deg, max_terms, false).prop_map(|p| &p + &p.conj())
}

/// A holomorphic seed of degree between 1 and `max_deg` without constant term.
pub fn seed(max_deg: u32) -> impl Strategy<Value = HarmonicSeed> {
    prop::collection::vec(gauss(), max_deg as usize).prop_filter_map("zero seed", |cs| {
        let p = TriPoly::from_terms(cs.into_iter().enumerate().map(|(k, c)| (c, [k as u32 + 1, 0, 0])));
        (!p.is_zero()).then(|| HarmonicSeed::new(p).unwrap())
    })
}

pub fn random_gauss<R: Rng>(rng: &mut R) -> GaussianRational {
    GaussianRational::new(q(rng.gen_range(-6..=6), rng.gen_range(1..=4)), q(rng.gen_range(-6..=6), rng.gen_range(1..=4)))
}

pub fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    q(rng.gen_range(-40..=40), rng.gen_range(1..=6))
}

/// A nonzero holomorphic seed of degree at most `max_deg`, without constant
/// term.
pub fn random_seed<R: Rng>(rng: &mut R, max_deg: u32) -> HarmonicSeed {
    loop {
        let deg = rng.gen_range(1..=max_deg);
        let p = TriPoly::from_terms((1..=deg).map(|k| (random_gauss(rng), [k, 0, 0])));
        if !p.is_zero() {
            return HarmonicSeed::new(p).unwrap();
        }
    }
}
