//! Quotients of [`TriPoly`]s.
//!
//! The denominator is kept as a product of monic factors with multiplicities,
//! `num / (f1^k1 * f2^k2 * ...)`. Nothing is ever cancelled: there is no
//! polynomial GCD, and two rational functions are compared by bringing them
//! over a common denominator and testing the numerator difference for zero.
//! Keeping the factors separate is what keeps repeated differentiation
//! tractable, since the quotient rule then raises each power by one instead of
//! squaring the whole denominator.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::One;

use super::gaussian::GaussianRational;
use super::tripoly::{TriPoly, Var};
use crate::error::{Error, Result};

/// Relative size below which a denominator value counts as zero.
pub const POLE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, PartialEq, Eq)]
pub struct RatFun {
    num: TriPoly,
    /// Monic, non-constant, pairwise distinct factors with positive powers.
    den: Vec<(TriPoly, u32)>,
}

impl RatFun {
    pub fn zero() -> Self {
        Self::from_poly(TriPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(TriPoly::one())
    }

    pub fn from_poly(p: TriPoly) -> Self {
        Self { num: p, den: Vec::new() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(TriPoly::constant(c))
    }

    /// `num / den`. Fails when `den` is identically zero.
    pub fn new(num: TriPoly, den: TriPoly) -> Result<Self> {
        Self::over_power(num, &den, 1)
    }

    /// `num / base^power`.
    pub fn over_power(num: TriPoly, base: &TriPoly, power: u32) -> Result<Self> {
        if base.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let mut r = Self::from_poly(num);
        r.push_factor(base, power);
        Ok(r)
    }

    fn push_factor(&mut self, f: &TriPoly, power: u32) {
        if power == 0 {
            return;
        }
        let (monic, lc) = f.make_monic();
        let scale = lc.pow(power).inv();
        self.num = self.num.scale(&scale);
        if monic.is_constant() {
            return;
        }
        match self.den.iter_mut().find(|(g, _)| *g == monic) {
            Some(slot) => slot.1 += power,
            None => self.den.push((monic, power)),
        }
    }

    pub fn num(&self) -> &TriPoly {
        &self.num
    }

    pub fn den_factors(&self) -> &[(TriPoly, u32)] {
        &self.den
    }

    /// The expanded denominator polynomial.
    pub fn den(&self) -> TriPoly {
        self.den.iter().fold(TriPoly::one(), |acc, (f, k)| &acc * &f.pow(*k))
    }

    /// True iff the numerator is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    /// Equality as rational functions (common denominator, numerator test).
    pub fn equals(&self, other: &RatFun) -> bool {
        (self - other).is_zero()
    }

    /// True iff `self = c * other` for some nonzero scalar `c`; returns `c`.
    pub fn scalar_ratio(&self, other: &RatFun) -> Option<GaussianRational> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        let q = self / other;
        let (n, d) = (q.num.clone(), q.den());
        let (ln, cn) = n.leading_term()?;
        let (ld, cd) = d.leading_term()?;
        if ln != ld {
            return None;
        }
        let c = &cn / &cd;
        if (&n - &d.scale(&c)).is_zero() {
            Some(c)
        } else {
            None
        }
    }

    fn common_den(a: &[(TriPoly, u32)], b: &[(TriPoly, u32)]) -> Vec<(TriPoly, u32)> {
        let mut out: Vec<(TriPoly, u32)> = a.to_vec();
        for (f, k) in b {
            match out.iter_mut().find(|(g, _)| g == f) {
                Some(slot) => slot.1 = slot.1.max(*k),
                None => out.push((f.clone(), *k)),
            }
        }
        out
    }

    /// Numerator after rewriting `self` over the larger denominator `target`.
    fn lift_num(&self, target: &[(TriPoly, u32)]) -> TriPoly {
        let mut n = self.num.clone();
        for (f, k) in target {
            let have = self.den.iter().find(|(g, _)| g == f).map(|s| s.1).unwrap_or(0);
            if *k > have {
                n = &n * &f.pow(*k - have);
            }
        }
        n
    }

    fn combine(&self, o: &RatFun, subtract: bool) -> RatFun {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if subtract { -o } else { o.clone() };
        }
        let den = Self::common_den(&self.den, &o.den);
        let a = self.lift_num(&den);
        let b = o.lift_num(&den);
        let num = if subtract { &a - &b } else { &a + &b };
        let mut r = RatFun { num, den };
        r.drop_if_zero();
        r
    }

    fn drop_if_zero(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> RatFun {
        let mut r = RatFun { num: self.num.scale(c), den: self.den.clone() };
        r.drop_if_zero();
        r
    }

    pub fn scale_int(&self, c: i64) -> RatFun {
        self.scale(&GaussianRational::from(c))
    }

    pub fn mul_poly(&self, p: &TriPoly) -> RatFun {
        let mut r = RatFun { num: &self.num * p, den: self.den.clone() };
        r.drop_if_zero();
        r
    }

    /// Cancels denominator factors that divide the numerator exactly. Only the
    /// stored factors are tried; no GCD is computed.
    pub fn reduce(&self) -> RatFun {
        let mut num = self.num.clone();
        let mut den = Vec::new();
        for (f, k) in &self.den {
            let mut left = *k;
            while left > 0 {
                match num.div_exact(f) {
                    Some(q) => {
                        num = q;
                        left -= 1;
                    }
                    None => break,
                }
            }
            if left > 0 {
                den.push((f.clone(), left));
            }
        }
        let mut r = RatFun { num, den };
        r.drop_if_zero();
        r
    }

    /// Multiplicative inverse. Fails on the zero function.
    pub fn inv(&self) -> Result<RatFun> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let mut r = RatFun::from_poly(self.den());
        r.push_factor(&self.num, 1);
        Ok(r)
    }

    /// Formal partial derivative by the quotient rule.
    pub fn derive(&self, v: Var) -> RatFun {
        if self.den.is_empty() {
            return RatFun::from_poly(self.num.derive(v));
        }
        // d(n / prod f^k) = (n' prod f - n sum k f' prod_{j!=i} f_j) / prod f^(k+1)
        let factors: Vec<&TriPoly> = self.den.iter().map(|(f, _)| f).collect();
        let full: TriPoly = factors.iter().fold(TriPoly::one(), |acc, f| &acc * *f);
        let mut num = &self.num.derive(v) * &full;
        for (i, (f, k)) in self.den.iter().enumerate() {
            let df = f.derive(v);
            if df.is_zero() {
                continue;
            }
            let others = factors
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(TriPoly::one(), |acc, (_, g)| &acc * *g);
            let term = &(&self.num * &df) * &others;
            num = &num - &term.scale_int(*k as i64);
        }
        let den = self.den.iter().map(|(f, k)| (f.clone(), k + 1)).collect();
        let mut r = RatFun { num, den };
        r.drop_if_zero();
        r
    }

    pub fn derive_n(&self, v: Var, n: u32) -> RatFun {
        (0..n).fold(self.clone(), |f, _| f.derive(v))
    }

    /// The involution sigma applied to numerator and denominator.
    pub fn conj(&self) -> RatFun {
        let mut r = RatFun::from_poly(self.num.conj());
        for (f, k) in &self.den {
            r.push_factor(&f.conj(), *k);
        }
        r
    }

    pub fn is_sigma_fixed(&self) -> bool {
        self.equals(&self.conj())
    }

    /// Exact substitution of a value for one variable.
    pub fn substitute(&self, v: Var, value: &GaussianRational) -> Result<RatFun> {
        let mut r = RatFun::from_poly(self.num.substitute(v, value));
        for (f, k) in &self.den {
            let g = f.substitute(v, value);
            if g.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            r.push_factor(&g, *k);
        }
        Ok(r)
    }

    /// Floating-point value at formal coordinates; poles are reported rather
    /// than returned as infinities.
    pub fn eval(&self, z: Complex64, w: Complex64, t: Complex64) -> Result<Complex64> {
        let mut d = Complex64::one();
        for (f, k) in &self.den {
            let (v, scale) = f.eval_with_scale(z, w, t);
            if v.norm() <= POLE_TOLERANCE * scale || v.norm() == 0.0 {
                return Err(Error::Pole { x: (z.re + w.re) / 2.0, y: (z.im - w.im) / 2.0, t: t.re });
            }
            d *= v.powu(*k);
        }
        Ok(self.num.eval(z, w, t) / d)
    }

    /// Value at the physical point `(x, y, t)`.
    pub fn eval_xyt(&self, x: f64, y: f64, t: f64) -> Result<Complex64> {
        self.eval(Complex64::new(x, y), Complex64::new(x, -y), Complex64::new(t, 0.0))
    }

    /// Leading term of the numerator, for diagnostics on failed identities.
    pub fn describe_numerator(&self) -> String {
        match self.num.leading_term() {
            None => "0".to_string(),
            Some((e, c)) => format!(
                "leading numerator term {} * z^{} w^{} t^{} ({} terms)",
                c,
                e[0],
                e[1],
                e[2],
                self.num.len()
            ),
        }
    }
}

impl From<TriPoly> for RatFun {
    fn from(p: TriPoly) -> Self {
        RatFun::from_poly(p)
    }
}

impl<'a> Add<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn add(self, o: &RatFun) -> RatFun {
        self.combine(o, false)
    }
}

impl<'a> Sub<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn sub(self, o: &RatFun) -> RatFun {
        self.combine(o, true)
    }
}

impl<'a> Mul<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn mul(self, o: &RatFun) -> RatFun {
        if self.is_zero() || o.is_zero() {
            return RatFun::zero();
        }
        let mut r = RatFun { num: &self.num * &o.num, den: self.den.clone() };
        for (f, k) in &o.den {
            r.push_factor(f, *k);
        }
        r
    }
}

/// Panics on division by the zero function; use [`RatFun::inv`] to handle it.
impl<'a> Div<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn div(self, o: &RatFun) -> RatFun {
        let inv = o.inv().expect("division by the zero rational function");
        self * &inv
    }
}

impl Add for RatFun {
    type Output = RatFun;
    fn add(self, o: RatFun) -> RatFun {
        &self + &o
    }
}

impl Sub for RatFun {
    type Output = RatFun;
    fn sub(self, o: RatFun) -> RatFun {
        &self - &o
    }
}

impl Mul for RatFun {
    type Output = RatFun;
    fn mul(self, o: RatFun) -> RatFun {
        &self * &o
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        -&self
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / (", self.num)?;
        for (i, (g, k)) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "({})^{}", g, k)?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_plus_zw() -> TriPoly {
        &TriPoly::one() + &TriPoly::monomial(1.into(), [1, 1, 0])
    }

    #[test]
    fn reduce_cancels_stored_factors() {
        let f = one_plus_zw();
        let g = &TriPoly::z() + &TriPoly::from_int(2);
        let r = RatFun::over_power(&(&f * &g) * &TriPoly::w(), &f, 2).unwrap().mul_poly(&TriPoly::one());
        let red = r.reduce();
        assert!(red.equals(&r));
        assert_eq!(red.den_factors().len(), 1);
        assert_eq!(red.den_factors()[0].1, 1);
        assert!(RatFun::new(f.clone(), f.clone()).unwrap().reduce().is_polynomial());
    }

    #[test]
    fn zero_test_is_numerator_test() {
        let z2 = TriPoly::z().pow(2);
        let f = RatFun::new(&z2 - &z2, one_plus_zw()).unwrap();
        assert!(f.is_zero());
        let g = RatFun::new(TriPoly::z(), one_plus_zw()).unwrap();
        assert!(!g.is_zero());
    }

    #[test]
    fn zero_denominator_is_rejected() {
        assert!(matches!(RatFun::new(TriPoly::z(), TriPoly::zero()), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn equality_is_by_cross_multiplication() {
        let d = one_plus_zw();
        let a = RatFun::new(TriPoly::z(), d.clone()).unwrap();
        let b = RatFun::new(&TriPoly::z() * &d, &d * &d).unwrap();
        assert!(a.equals(&b));
        assert!(!a.equals(&RatFun::new(TriPoly::w(), d).unwrap()));
    }

    #[test]
    fn scalars_are_pulled_out_of_the_denominator() {
        let a = RatFun::new(TriPoly::z(), one_plus_zw().scale_int(3)).unwrap();
        assert_eq!(a.den_factors().len(), 1);
        assert!(a.den_factors()[0].0.lead_coeff().unwrap().is_one());
        let c = RatFun::new(TriPoly::z(), TriPoly::from_int(4)).unwrap();
        assert!(c.is_polynomial());
        assert_eq!(c.num(), &TriPoly::z().scale(&GaussianRational::ratio(1, 4)));
    }

    #[test]
    fn quotient_rule() {
        // d/dz 1/(1+zw) = -w/(1+zw)^2
        let f = RatFun::new(TriPoly::one(), one_plus_zw()).unwrap();
        let expect = RatFun::over_power(-TriPoly::w(), &one_plus_zw(), 2).unwrap();
        assert!(f.derive(Var::Z).equals(&expect));
    }

    #[test]
    fn field_identities() {
        let f = RatFun::new(&TriPoly::z() + &TriPoly::t(), one_plus_zw()).unwrap();
        let g = RatFun::new(TriPoly::w(), &TriPoly::z() - &TriPoly::from_int(2)).unwrap();
        let lhs = &(&f + &g) * &f;
        let rhs = &(&f * &f) + &(&g * &f);
        assert!(lhs.equals(&rhs));
        assert!((&(&f / &g) * &g).equals(&f));
        assert!(f.conj().conj().equals(&f));
    }

    #[test]
    fn poles_are_detected() {
        let f = RatFun::new(TriPoly::one(), &TriPoly::monomial(1.into(), [1, 1, 0]) - &TriPoly::one()).unwrap();
        assert!(matches!(f.eval_xyt(1.0, 0.0, 0.0), Err(Error::Pole { .. })));
        assert!(f.eval_xyt(2.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn scalar_ratio_detects_proportionality() {
        let d = one_plus_zw();
        let a = RatFun::new(TriPoly::z(), d.clone()).unwrap();
        let b = a.scale(&GaussianRational::from_ints(2, -1));
        assert_eq!(b.scalar_ratio(&a), Some(GaussianRational::from_ints(2, -1)));
        assert_eq!(a.scalar_ratio(&RatFun::new(TriPoly::w(), d).unwrap()), None);
    }
}
