//! One-dimensional Darboux transformations, the first Adler-Moser
//! polynomials, and the reduction of a Moutard step to one dimension.
//!
//! Functions of `x` are stored as rational functions of the `z` variable
//! alone, so `d/dx` is `d/dz`.

use num_rational::BigRational;

use crate::algebra::{parse_poly, GaussianRational, RatFun, TriPoly, Var};
use crate::error::{Error, Result};

/// A rational function of one variable `x`.
#[derive(Clone, Debug)]
pub struct RatFun1D(RatFun);

impl RatFun1D {
    pub fn new(f: RatFun) -> Result<Self> {
        let mixed = |p: &TriPoly| p.contains_var(Var::W) || p.contains_var(Var::T);
        if mixed(f.num()) || f.den_factors().iter().any(|(g, _)| mixed(g)) {
            return Err(Error::InvalidParams(format!("{} depends on more than x", f)));
        }
        Ok(Self(f))
    }

    pub fn from_poly(p: TriPoly) -> Result<Self> {
        Self::new(RatFun::from_poly(p))
    }

    pub fn ratio(num: TriPoly, den: TriPoly) -> Result<Self> {
        Self::new(RatFun::new(num, den)?)
    }

    /// Parses a polynomial written in `x`.
    pub fn parse_poly(s: &str) -> Result<Self> {
        if s.contains(['z', 'w', 'y', 't']) {
            return Err(Error::Parse(format!("'{s}': only the variable x is allowed")));
        }
        Self::from_poly(parse_poly(&s.replace('x', "z"))?)
    }

    /// `x`.
    pub fn x() -> Self {
        Self(RatFun::from_poly(TriPoly::z()))
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self(RatFun::constant(c))
    }

    pub fn inner(&self) -> &RatFun {
        &self.0
    }

    pub fn d(&self) -> Self {
        Self(self.0.derive(Var::Z))
    }

    pub fn dd(&self) -> Self {
        Self(self.0.derive_n(Var::Z, 2))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn equals(&self, o: &RatFun1D) -> bool {
        self.0.equals(&o.0)
    }

    pub fn add(&self, o: &RatFun1D) -> Self {
        Self(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &RatFun1D) -> Self {
        Self(&self.0 - &o.0)
    }

    pub fn mul(&self, o: &RatFun1D) -> Self {
        Self(&self.0 * &o.0)
    }

    pub fn div(&self, o: &RatFun1D) -> Result<Self> {
        Ok(Self(&self.0 * &o.0.inv()?))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self(self.0.scale(c))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.0.eval_xyt(x, 0.0, 0.0)?.re)
    }

    /// `(log f)'' = (f f'' - f'^2) / f^2`.
    pub fn log_dd(&self) -> Result<Self> {
        let (d1, d2) = (self.d(), self.dd());
        self.mul(&d2).sub(&d1.mul(&d1)).div(&self.mul(self))
    }
}

impl std::fmt::Display for RatFun1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0.to_string().replace('z', "x"))
    }
}

/// `-f'' + u f - e f`.
pub fn eigen_residual(u: &RatFun1D, f: &RatFun1D, e: &GaussianRational) -> RatFun1D {
    f.dd().scale(&GaussianRational::from(-1)).add(&u.mul(f)).sub(&f.scale(e))
}

/// `u~ = u - 2 (log omega)''` for a zero mode `omega` of `-d^2/dx^2 + u`.
pub fn darboux_transform(u: &RatFun1D, omega: &RatFun1D) -> Result<RatFun1D> {
    let r = eigen_residual(u, omega, &GaussianRational::from(0));
    if !r.is_zero() {
        return Err(Error::NotInKernel(format!("(-d^2/dx^2 + u) omega = {}", r)));
    }
    Ok(u.sub(&omega.log_dd()?.scale(&GaussianRational::from(2))))
}

/// `A phi = -phi' + (omega'/omega) phi`.
pub fn darboux_eigenmap(phi: &RatFun1D, omega: &RatFun1D) -> Result<RatFun1D> {
    let v = omega.d().div(omega)?;
    Ok(phi.d().scale(&GaussianRational::from(-1)).add(&v.mul(phi)))
}

/// Outcome of pushing an eigenfunction through a Darboux step.
#[derive(Clone, Debug)]
pub struct EigenmapCheck {
    pub image: RatFun1D,
    /// `-phi'' + u phi - E phi` for the input.
    pub input_residual: RatFun1D,
    /// `-phi~'' + u~ phi~ - E phi~` for the image.
    pub image_residual: RatFun1D,
}

impl EigenmapCheck {
    /// The map is confirmed when the input is an eigenfunction and so is the
    /// image.
    pub fn holds(&self) -> bool {
        self.input_residual.is_zero() && self.image_residual.is_zero()
    }
}

pub fn check_eigenmap(u: &RatFun1D, omega: &RatFun1D, phi: &RatFun1D, e: &GaussianRational) -> Result<EigenmapCheck> {
    let ut = darboux_transform(u, omega)?;
    let image = darboux_eigenmap(phi, omega)?;
    Ok(EigenmapCheck { input_residual: eigen_residual(u, phi, e), image_residual: eigen_residual(&ut, &image, e), image })
}

/// The Adler-Moser polynomials for `n <= 3`; `taus` holds `tau_2, tau_3`
/// (missing entries are zero).
pub fn adler_moser_theta(n: u32, taus: &[BigRational]) -> Result<RatFun1D> {
    let tau = |k: usize| GaussianRational::real(taus.get(k).cloned().unwrap_or_else(|| BigRational::from_integer(0.into())));
    let x = |e: u32| TriPoly::monomial(GaussianRational::from(1), [e, 0, 0]);
    let (t2, t3) = (tau(0), tau(1));
    let p = match n {
        1 => x(1),
        2 => &x(3) + &TriPoly::constant(t2),
        3 => {
            let mut p = &x(6) + &x(3).scale(&t2.scale(&BigRational::from_integer(5.into())));
            p = &p + &x(1).scale(&t3);
            &p - &TriPoly::constant((&t2 * &t2).scale(&BigRational::from_integer(5.into())))
        }
        _ => return Err(Error::Unsupported(format!("Adler-Moser polynomial of order {n}; only n <= 3 is available"))),
    };
    RatFun1D::from_poly(p)
}

/// `u_n = -2 (log theta_n)''`.
pub fn adler_moser_potential(n: u32, taus: &[BigRational]) -> Result<RatFun1D> {
    Ok(adler_moser_theta(n, taus)?.log_dd()?.scale(&GaussianRational::from(-2)))
}

/// Result of reducing a Moutard step to one dimension.
///
/// The two-dimensional zero modes are `omega = f(x) e^(s y)` and
/// `phi = g(x) e^(r y)` of `-Delta + u(x)`, so `-f'' + u f = s^2 f` and
/// `-g'' + u g = r^2 g`. The exponentials are handled analytically: `f` enters
/// only through `v = f'/f`. The transformed mode is `e^((s+r) y) h(x)` with
/// `h = -(A g)/(s + r)`, which must solve the `x`-equation of the quadrature,
/// `h' + v h = (s - r) g`, and the reduced eigen-equation
/// `-h'' + (u - 2 v') h = r^2 h`.
#[derive(Clone, Debug)]
pub struct ReductionCheck {
    pub h: RatFun1D,
    /// `v' + v^2 - (u - s^2)`; zero iff `f` is an eigenfunction.
    pub riccati_residual: RatFun1D,
    pub g_residual: RatFun1D,
    pub quadrature_residual: RatFun1D,
    pub eigen_residual: RatFun1D,
}

impl ReductionCheck {
    pub fn holds(&self) -> bool {
        self.riccati_residual.is_zero()
            && self.g_residual.is_zero()
            && self.quadrature_residual.is_zero()
            && self.eigen_residual.is_zero()
    }
}

pub fn moutard_reduction(
    u: &RatFun1D,
    v: &RatFun1D,
    s: &BigRational,
    g: &RatFun1D,
    r: &BigRational,
) -> Result<ReductionCheck> {
    let (sg, rg) = (GaussianRational::real(s.clone()), GaussianRational::real(r.clone()));
    let sum = &sg + &rg;
    if sum == GaussianRational::from(0) {
        return Err(Error::InvalidParams("s + r must be nonzero".into()));
    }
    let riccati_residual = v.d().add(&v.mul(v)).sub(&u.sub(&RatFun1D::constant(&sg * &sg)));
    let g_residual = eigen_residual(u, g, &(&rg * &rg));
    let ag = g.d().scale(&GaussianRational::from(-1)).add(&v.mul(g));
    let h = ag.scale(&(-sum.inv()));
    let quadrature_residual = h.d().add(&v.mul(&h)).sub(&g.scale(&(&sg - &rg)));
    let ut = u.sub(&v.d().scale(&GaussianRational::from(2)));
    let eigen_residual = eigen_residual(&ut, &h, &(&rg * &rg));
    Ok(ReductionCheck { h, riccati_residual, g_residual, quadrature_residual, eigen_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn p(s: &str) -> RatFun1D {
        RatFun1D::parse_poly(s).unwrap()
    }

    fn over_x2(c: i64) -> RatFun1D {
        RatFun1D::ratio(TriPoly::from_int(c), TriPoly::monomial(1.into(), [2, 0, 0])).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn first_transform_from_zero() {
        let ut = darboux_transform(&p("0"), &p("x")).unwrap();
        assert!(ut.equals(&over_x2(2)));
    }

    #[test]
    fn second_transform() {
        let omega = adler_moser_theta(2, &[]).unwrap().div(&adler_moser_theta(1, &[]).unwrap()).unwrap();
        let ut = darboux_transform(&over_x2(2), &omega).unwrap();
        assert!(ut.equals(&over_x2(6)));
    }

    #[test]
    fn constant_mode_is_trivial() {
        assert!(darboux_transform(&p("0"), &p("1")).unwrap().is_zero());
    }

    #[test]
    fn not_in_kernel() {
        assert!(matches!(darboux_transform(&p("0"), &p("x^2")), Err(Error::NotInKernel(_))));
    }

    #[test]
    fn eigenmap_annihilates_omega() {
        assert!(darboux_eigenmap(&p("x^2 + 3"), &p("x^2 + 3")).unwrap().is_zero());
    }

    #[test]
    fn eigenmap_on_a_non_eigenfunction() {
        let img = darboux_eigenmap(&p("x^3"), &p("x")).unwrap();
        assert!(img.equals(&p("-2x^2")));
        let c = check_eigenmap(&p("0"), &p("x"), &p("x^3"), &0.into()).unwrap();
        assert!(c.input_residual.equals(&p("-6x")));
        assert!(!c.holds());
    }

    #[test]
    fn eigenmap_at_zero_energy() {
        // x^2 and 1/x span the kernel of -d^2 + 2/x^2; the image lies in the
        // kernel of -d^2 + 6/x^2.
        let u1 = over_x2(2);
        let theta2 = adler_moser_theta(2, &[q(3, 1)]).unwrap();
        let omega = theta2.div(&p("x")).unwrap();
        for phi in [p("x^2"), RatFun1D::ratio(TriPoly::one(), TriPoly::z()).unwrap()] {
            let c = check_eigenmap(&u1, &omega, &phi, &GaussianRational::zero()).unwrap();
            assert!(c.holds());
        }
    }

    #[test]
    fn adler_moser_table() {
        assert!(adler_moser_theta(1, &[]).unwrap().equals(&p("x")));
        assert!(adler_moser_theta(2, &[q(5, 1)]).unwrap().equals(&p("x^3 + 5")));
        assert!(adler_moser_theta(3, &[q(1, 1), q(2, 1)]).unwrap().equals(&p("x^6 + 5x^3 + 2x - 5")));
        assert!(matches!(adler_moser_theta(4, &[]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn potentials_at_zero_parameters() {
        for n in 1..=3u32 {
            let u = adler_moser_potential(n, &[]).unwrap();
            assert!(u.equals(&over_x2((n * (n + 1)) as i64)));
        }
    }

    #[test]
    fn reduction_with_exponential_eigenfunction() {
        // f = (1 + i/x) e^(ix) solves -f'' + (2/x^2) f = f.
        let v = RatFun1D::ratio(parse_poly("i z^2 - z - i").unwrap(), parse_poly("z^2 + i z").unwrap()).unwrap();
        let one = q(1, 1);
        for g in [p("x^2"), RatFun1D::ratio(TriPoly::one(), TriPoly::z()).unwrap()] {
            let r = moutard_reduction(&over_x2(2), &v, &one, &g, &BigRational::zero()).unwrap();
            assert!(r.holds(), "{:?}", r);
        }
        // Free case: f = e^(ix), g = x.
        let v = RatFun1D::constant(GaussianRational::i());
        let r = moutard_reduction(&p("0"), &v, &one, &p("x"), &BigRational::zero()).unwrap();
        assert!(r.holds());
        assert!(r.h.equals(&RatFun1D::from_poly(parse_poly("1 - i z").unwrap()).unwrap()));
    }

    #[test]
    fn reduction_detects_bad_data() {
        let v = RatFun1D::constant(GaussianRational::i());
        let r = moutard_reduction(&p("0"), &v, &q(1, 1), &p("x^2"), &BigRational::zero()).unwrap();
        assert!(!r.g_residual.is_zero());
        assert!(!r.holds());
    }

    #[test]
    fn parse_rejects_other_variables() {
        assert!(RatFun1D::parse_poly("x + y").is_err());
        assert!(RatFun1D::new(RatFun::from_poly(TriPoly::w())).is_err());
    }
}
