//! Published example data: seeds, integration constants and the printed
//! closed forms they are expected to reproduce.

use num_rational::BigRational;

use crate::algebra::{parse_poly, RatFun, TriPoly};
use crate::moutard::HarmonicSeed;
use crate::nv::FlowingSeed;

fn poly(s: &str) -> TriPoly {
    parse_poly(s).expect("fixture polynomial parses")
}

fn seed(s: &str) -> HarmonicSeed {
    HarmonicSeed::new(poly(s)).expect("fixture seed is holomorphic")
}

/// Quadratic example, first seed.
pub fn ord2_p1() -> HarmonicSeed {
    seed("(1 - i/4) z^2 + z/2")
}

pub fn ord2_p2() -> HarmonicSeed {
    seed("(3 - 5i)/4 z^2 + (1 - i)/2 z")
}

/// Integration constant reproducing the quadratic example (fitted, see
/// `moutard::fit_constant`).
pub fn ord2_c() -> BigRational {
    BigRational::from_integer((-20).into())
}

pub const ORD2_G: &str = "160 + 4x^2 + 4y^2 + 16x^3 + 4x^2 y + 16x y^2 + 4y^3 + 17(x^2+y^2)^2";

pub fn ord2_g() -> TriPoly {
    poly(ORD2_G)
}

pub fn ord2_u() -> RatFun {
    RatFun::over_power(poly("-5120(1 + 8x + 2y + 17x^2 + 17y^2)"), &ord2_g(), 2).unwrap()
}

pub fn ord2_psi1() -> RatFun {
    RatFun::new(poly("x + 2x^2 + x y - 2y^2"), ord2_g()).unwrap()
}

pub fn ord2_psi2() -> RatFun {
    RatFun::new(poly("2x + 2y + 3x^2 + 10x y - 3y^2"), ord2_g()).unwrap()
}

/// Cubic example.
pub fn ord3_p1() -> HarmonicSeed {
    seed("(i - 1) z^3 + (1/10 + 3i/20) z^2 + z/2")
}

pub fn ord3_p2() -> HarmonicSeed {
    seed("2i z^3 + (1/4 + i/20) z^2 + (1 - i)/2 z")
}

pub fn ord3_c() -> BigRational {
    BigRational::from_integer((-200).into())
}

pub const ORD3_G: &str = "40000 + 100x^2 + 40x^3 - 387x^4 + 40x^5 + 800x^6 - 60x^2 y - 800x^3 y - 200x^4 y \
    + 100y^2 + 40x y^2 + 26x^2 y^2 + 80x^3 y^2 + 2400x^4 y^2 - 60y^3 - 800x y^3 - 400x^2 y^3 \
    + 413y^4 + 40x y^4 + 2400x^2 y^4 - 200y^5 + 800y^6";

pub fn ord3_g() -> TriPoly {
    poly(ORD3_G)
}

pub fn ord3_u() -> RatFun {
    let f0 = poly(
        "-1280000(25 + 20x - 287x^2 + 60x^3 + 1800x^4 - 30y - 600x y - 300x^2 y \
         + 313y^2 + 60x y^2 + 3600x^2 y^2 - 300y^3 + 1800y^4)",
    );
    RatFun::over_power(f0, &ord3_g(), 2).unwrap()
}

pub fn ord3_psi1() -> RatFun {
    RatFun::new(poly("-10x - 2x^2 + 20x^3 + 6x y + 60x^2 y + 2y^2 - 60x y^2 - 20y^3"), ord3_g()).unwrap()
}

pub fn ord3_psi2() -> RatFun {
    RatFun::new(poly("-10x - 5x^2 - 10y + 2x y + 120x^2 y + 5y^2 - 40y^3"), ord3_g()).unwrap()
}

/// Seeds of the blow-up solution (before the time flow is applied).
pub fn blowup_p1() -> HarmonicSeed {
    seed("i z^2")
}

pub fn blowup_p2() -> HarmonicSeed {
    seed("z^2 + (1 + i) z")
}

pub fn blowup_flowing() -> (FlowingSeed, FlowingSeed) {
    (crate::nv::flow_solve(&blowup_p1()), crate::nv::flow_solve(&blowup_p2()))
}

pub fn blowup_c() -> BigRational {
    BigRational::from_integer((-20).into())
}

/// The base of the printed denominator `H2 = base^2`.
pub const BLOWUP_H2_BASE: &str = "3x^4 + 4x^3 + 6x^2 y^2 + 3y^4 + 4y^3 + 30 - 12t";

pub const BLOWUP_H1: &str = "-12(24t x^2 + 12t x + 24t y^2 + 12t y + x^5 - 3x^4 y + 2x^4 \
    - 2x^3 y^2 - 4x^3 y - 2x^2 y^3 - 60x^2 - 3x y^4 - 4x y^3 - 30x + y^5 + 2y^4 - 60y^2 - 30y)";

pub fn blowup_h2_base() -> TriPoly {
    poly(BLOWUP_H2_BASE)
}

/// The printed `U = H1/H2`.
pub fn blowup_u_printed() -> RatFun {
    RatFun::over_power(poly(BLOWUP_H1), &blowup_h2_base(), 2).unwrap()
}
