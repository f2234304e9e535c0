//! Sparse polynomials in `z`, `w` (standing for z-bar) and `t`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gaussian::GaussianRational;

/// One of the three formal variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Z,
    /// The conjugate variable z-bar, treated as independent of `z`.
    W,
    T,
}

impl Var {
    fn index(self) -> usize {
        match self {
            Var::Z => 0,
            Var::W => 1,
            Var::T => 2,
        }
    }
}

/// Exponent triple `(e_z, e_w, e_t)`.
pub type Monomial = [u32; 3];

/// A polynomial over Q(i) in the variables `z`, `w`, `t`. No zero coefficient
/// is ever stored, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TriPoly {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl TriPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(GaussianRational::from(c))
    }

    pub fn monomial(c: GaussianRational, exps: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { terms }
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; 3];
        e[v.index()] = 1;
        Self::monomial(GaussianRational::one(), e)
    }

    pub fn z() -> Self {
        Self::var(Var::Z)
    }

    pub fn w() -> Self {
        Self::var(Var::W)
    }

    pub fn t() -> Self {
        Self::var(Var::T)
    }

    /// Builds from `(coefficient, exponents)` pairs, merging repeats.
    pub fn from_terms<I: IntoIterator<Item = (GaussianRational, Monomial)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (c, e) in it {
            p.add_term(e, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: Monomial) -> GaussianRational {
        self.terms.get(&e).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff([0, 0, 0])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == [0, 0, 0])
    }

    fn add_term(&mut self, e: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v.index()]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// Total degree in `z` and `w` only (the spatial degree).
    pub fn spatial_degree(&self) -> u32 {
        self.terms.keys().map(|e| e[0] + e[1]).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|e| e[v.index()] > 0)
    }

    /// Leading term in graded-lexicographic order, used in diagnostics.
    pub fn leading_term(&self) -> Option<(Monomial, GaussianRational)> {
        self.terms
            .iter()
            .max_by_key(|(e, _)| (e.iter().sum::<u32>(), **e))
            .map(|(e, c)| (*e, c.clone()))
    }

    /// Coefficient of the largest monomial in the map's fixed order.
    pub fn lead_coeff(&self) -> Option<&GaussianRational> {
        self.terms.values().next_back()
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&GaussianRational::from(c))
    }

    /// Formal partial derivative.
    pub fn derive(&self, v: Var) -> Self {
        let i = v.index();
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = *e;
            ne[i] -= 1;
            out.insert(ne, c.scale(&BigRational::from_integer(e[i].into())));
        }
        Self { terms: out }
    }

    pub fn derive_n(&self, v: Var, n: u32) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derive(v))
    }

    /// Termwise antiderivative; the result has no term free of `v`.
    pub fn antiderivative(&self, v: Var) -> Self {
        let i = v.index();
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = *e;
            ne[i] += 1;
            out.insert(ne, c.scale(&BigRational::new(BigInt::one(), BigInt::from(ne[i]))));
        }
        Self { terms: out }
    }

    /// The involution sigma: swap `z` and `w`, conjugate every coefficient.
    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| ([e[1], e[0], e[2]], c.conj())).collect(),
        }
    }

    pub fn is_sigma_fixed(&self) -> bool {
        self.conj() == *self
    }

    /// Substitutes exact values for a subset of the variables.
    pub fn substitute(&self, v: Var, value: &GaussianRational) -> Self {
        let i = v.index();
        let mut out = Self::zero();
        let mut powers: Vec<GaussianRational> = vec![GaussianRational::one()];
        for (e, c) in &self.terms {
            while powers.len() <= e[i] as usize {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let mut ne = *e;
            ne[i] = 0;
            out.add_term(ne, &(c * &powers[e[i] as usize]));
        }
        out
    }

    /// Exact value at a point.
    pub fn eval_exact(&self, z: &GaussianRational, w: &GaussianRational, t: &GaussianRational) -> GaussianRational {
        self.substitute(Var::Z, z).substitute(Var::W, w).substitute(Var::T, t).constant_term()
    }

    /// Floating-point value at `(z, w, t)`; coefficients are rounded here and
    /// nowhere earlier.
    pub fn eval(&self, z: Complex64, w: Complex64, t: Complex64) -> Complex64 {
        self.eval_with_scale(z, w, t).0
    }

    /// Value together with the sum of absolute term magnitudes, the natural
    /// yardstick for deciding whether a computed value is zero.
    pub fn eval_with_scale(&self, z: Complex64, w: Complex64, t: Complex64) -> (Complex64, f64) {
        let pz = powers(z, self.degree_in(Var::Z));
        let pw = powers(w, self.degree_in(Var::W));
        let pt = powers(t, self.degree_in(Var::T));
        let mut acc = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (e, c) in &self.terms {
            let term = c.to_complex64() * pz[e[0] as usize] * pw[e[1] as usize] * pt[e[2] as usize];
            acc += term;
            scale += term.norm();
        }
        (acc, scale)
    }

    /// Value at the physical point `z = x + iy`, `w = x - iy`.
    pub fn eval_xyt(&self, x: f64, y: f64, t: f64) -> Complex64 {
        self.eval(Complex64::new(x, y), Complex64::new(x, -y), Complex64::new(t, 0.0))
    }

    /// Splits into coefficient polynomials of powers of `t`.
    pub fn t_slices(&self) -> Vec<TriPoly> {
        let deg = self.degree_in(Var::T) as usize;
        let mut out = vec![TriPoly::zero(); deg + 1];
        for (e, c) in &self.terms {
            out[e[2] as usize].add_term([e[0], e[1], 0], c);
        }
        out
    }

    /// Least common multiple of all coefficient denominators.
    pub fn denom_lcm(&self) -> BigInt {
        self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(&c.denom_lcm()))
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    /// Lexicographic division: the remainder is zero iff `d` divides.
    pub fn div_exact(&self, d: &TriPoly) -> Option<TriPoly> {
        let (&de, dc) = d.terms.iter().next_back()?;
        let dc_inv = dc.inv();
        let mut rem = self.clone();
        let mut quot = TriPoly::zero();
        while let Some((&re, rc)) = rem.terms.iter().next_back() {
            if (0..3).any(|k| re[k] < de[k]) {
                return None;
            }
            let q = TriPoly::monomial(rc * &dc_inv, [re[0] - de[0], re[1] - de[1], re[2] - de[2]]);
            rem = &rem - &(&q * d);
            quot = &quot + &q;
        }
        Some(quot)
    }

    /// Multiplies by a nonzero scalar so the largest monomial has coefficient 1;
    /// returns the normalized polynomial and the scalar that was divided out.
    pub fn make_monic(&self) -> (TriPoly, GaussianRational) {
        match self.lead_coeff() {
            None => (TriPoly::zero(), GaussianRational::one()),
            Some(lc) => {
                let lc = lc.clone();
                (self.scale(&lc.inv()), lc)
            }
        }
    }

    pub fn pow(&self, e: u32) -> TriPoly {
        let mut acc = TriPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Maximum absolute value of all real and imaginary coefficient parts.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.re.abs().max(c.im.abs()))
            .max()
            .map(|r| super::gaussian::rat_to_f64(&r))
            .unwrap_or(0.0)
    }

    fn to_gaussian_integers(&self) -> (BigInt, Vec<(Monomial, BigInt, BigInt)>) {
        let d = self.denom_lcm();
        let v = self
            .terms
            .iter()
            .map(|(e, c)| {
                let re = c.re.numer() * (&d / c.re.denom());
                let im = c.im.numer() * (&d / c.im.denom());
                (*e, re, im)
            })
            .collect();
        (d, v)
    }

    fn mul_impl(&self, o: &TriPoly) -> TriPoly {
        if self.is_zero() || o.is_zero() {
            return TriPoly::zero();
        }
        // Multiply over the Gaussian integers and divide once at the end.
        let (da, a) = self.to_gaussian_integers();
        let (db, b) = o.to_gaussian_integers();
        let mut acc: HashMap<Monomial, (BigInt, BigInt)> = HashMap::with_capacity(a.len() * b.len() / 2 + 1);
        for (ea, ra, ia) in &a {
            let a_real = ia.is_zero();
            for (eb, rb, ib) in &b {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                let slot = acc.entry(e).or_insert_with(|| (BigInt::zero(), BigInt::zero()));
                if a_real && ib.is_zero() {
                    slot.0 += ra * rb;
                } else {
                    slot.0 += ra * rb - ia * ib;
                    slot.1 += ra * ib + ia * rb;
                }
            }
        }
        let d = da * db;
        let terms = acc
            .into_iter()
            .filter(|(_, (r, i))| !(r.is_zero() && i.is_zero()))
            .map(|(e, (r, i))| {
                (e, GaussianRational::new(BigRational::new(r, d.clone()), BigRational::new(i, d.clone())))
            })
            .collect();
        TriPoly { terms }
    }

    /// Builds a polynomial given in the real coordinates `x`, `y` (and `t`)
    /// by substituting `x = (z + w)/2`, `y = (z - w)/(2i)`.
    pub fn from_xy_terms(terms: &[(GaussianRational, u32, u32, u32)]) -> TriPoly {
        let half = GaussianRational::ratio(1, 2);
        let x = (&TriPoly::z() + &TriPoly::w()).scale(&half);
        let y = (&TriPoly::z() - &TriPoly::w()).scale(&GaussianRational::new(BigRational::zero(), BigRational::new((-1).into(), 2.into())));
        let mut out = TriPoly::zero();
        for (c, ex, ey, et) in terms {
            let m = &x.pow(*ex) * &y.pow(*ey);
            let m = &m * &TriPoly::monomial(GaussianRational::one(), [0, 0, *et]);
            out = &out + &m.scale(c);
        }
        out
    }
}

fn powers(x: Complex64, n: u32) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(n as usize + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    v.push(acc);
    for _ in 0..n {
        acc *= x;
        v.push(acc);
    }
    v
}

impl<'a> Add<&'a TriPoly> for &'a TriPoly {
    type Output = TriPoly;
    fn add(self, o: &TriPoly) -> TriPoly {
        let (mut big, small) = if self.len() >= o.len() { (self.clone(), o) } else { (o.clone(), self) };
        for (e, c) in &small.terms {
            big.add_term(*e, c);
        }
        big
    }
}

impl<'a> Sub<&'a TriPoly> for &'a TriPoly {
    type Output = TriPoly;
    fn sub(self, o: &TriPoly) -> TriPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, &-c);
        }
        out
    }
}

impl<'a> Mul<&'a TriPoly> for &'a TriPoly {
    type Output = TriPoly;
    fn mul(self, o: &TriPoly) -> TriPoly {
        self.mul_impl(o)
    }
}

impl Add for TriPoly {
    type Output = TriPoly;
    fn add(self, o: TriPoly) -> TriPoly {
        &self + &o
    }
}

impl Sub for TriPoly {
    type Output = TriPoly;
    fn sub(self, o: TriPoly) -> TriPoly {
        &self - &o
    }
}

impl Mul for TriPoly {
    type Output = TriPoly;
    fn mul(self, o: TriPoly) -> TriPoly {
        &self * &o
    }
}

impl Neg for &TriPoly {
    type Output = TriPoly;
    fn neg(self) -> TriPoly {
        TriPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Neg for TriPoly {
    type Output = TriPoly;
    fn neg(self) -> TriPoly {
        -&self
    }
}

impl fmt::Display for TriPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (name, k) in [("z", e[0]), ("w", e[1]), ("t", e[2])] {
                match k {
                    0 => {}
                    1 => write!(f, "*{}", name)?,
                    _ => write!(f, "*{}^{}", name, k)?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TriPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
