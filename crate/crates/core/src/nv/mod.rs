//! Time-dependent (extended) Moutard construction and the Novikov-Veselov
//! equation
//!
//! ```text
//! U_t = d^3 U + dbar^3 U + 3 d(V U) + 3 dbar(conj(V) U),   dbar V = d U
//! ```
//!
//! for operators written as `d dbar + U`. Seeds `p(z, t)` follow the flow
//! `p_t = p_zzz`; the tau function `Phi` then yields `U = 2 d dbar log Phi`
//! and `V = 2 d^2 log Phi`.

mod blowup;

pub use blowup::{blowup_time, singular_set, BlowupReport};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::algebra::{log_dzz_ratio, log_laplacian_ratio, GaussianRational, RatFun, TriPoly, Var};
use crate::error::{Error, Result};
use crate::moutard::{moutard_bracket, HarmonicSeed};

/// Overall sign in front of the spatial part of the NV residual. Fixed by
/// requiring the residual of the published blow-up solution to vanish
/// identically (see the `nv_sign_is_calibrated` test).
pub const NV_SIGN: i64 = 1;

/// Which normalization of the Schrodinger operator a potential refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchrodingerConvention {
    /// `H = -Delta + u`.
    Laplacian,
    /// `H = d dbar + U = Delta/4 - u/4`.
    Wirtinger,
}

impl SchrodingerConvention {
    /// Converts a potential between conventions (`u = -4 U`).
    pub fn convert(self, potential: &RatFun, to: SchrodingerConvention) -> RatFun {
        match (self, to) {
            (a, b) if a == b => potential.clone(),
            (SchrodingerConvention::Wirtinger, SchrodingerConvention::Laplacian) => potential.scale_int(-4),
            _ => potential.scale(&GaussianRational::ratio(-1, 4)),
        }
    }
}

/// A polynomial in `z` and `t` solving `p_t = p_zzz`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowingSeed(TriPoly);

impl FlowingSeed {
    pub fn new(p: TriPoly) -> Result<Self> {
        if p.contains_var(Var::W) {
            return Err(Error::NotHolomorphic(format!("{}", p)));
        }
        let defect = &p.derive(Var::T) - &p.derive_n(Var::Z, 3);
        if !defect.is_zero() {
            return Err(Error::NotOnFlow(format!("p_t - p_zzz = {}", defect)));
        }
        Ok(Self(p))
    }

    pub fn poly(&self) -> &TriPoly {
        &self.0
    }

    /// The seed at `t = 0`.
    pub fn initial(&self) -> HarmonicSeed {
        HarmonicSeed::new(self.0.substitute(Var::T, &GaussianRational::from(0))).expect("t = 0 slice is holomorphic")
    }
}

/// `p(z, t) = sum_k t^k/k! d^{3k} p0 / dz^{3k}`, a finite sum.
pub fn flow_solve(p0: &HarmonicSeed) -> FlowingSeed {
    let mut out = TriPoly::zero();
    let mut term = p0.poly().clone();
    let mut k: u32 = 0;
    let mut fact = BigInt::one();
    while !term.is_zero() {
        let coeff = GaussianRational::real(BigRational::new(BigInt::one(), fact.clone()));
        let tk = TriPoly::monomial(coeff, [0, 0, k]);
        out = &out + &(&term * &tk);
        term = term.derive_n(Var::Z, 3);
        k += 1;
        fact *= BigInt::from(k);
    }
    FlowingSeed(out)
}

/// The `dt` coefficient of the extended Moutard quadrature with
/// `omega = p1 + conj(p1)`, `phi = p2 + conj(p2)` and `V = 0`.
pub fn dt_integrand(p1: &TriPoly, p2: &TriPoly) -> TriPoly {
    let om = p1 + &p1.conj();
    let ph = p2 + &p2.conj();
    let d = |p: &TriPoly, v: Var, n: u32| p.derive_n(v, n);
    let (z, w) = (Var::Z, Var::W);
    let mut out = &(&ph * &d(&om, z, 3)) - &(&om * &d(&ph, z, 3));
    out = &out + &(&(&om * &d(&ph, w, 3)) - &(&ph * &d(&om, w, 3)));
    let hol = &(&d(&ph, z, 2) * &d(&om, z, 1)) - &(&d(&ph, z, 1) * &d(&om, z, 2));
    let anti = &(&d(&ph, w, 2) * &d(&om, w, 1)) - &(&d(&ph, w, 1) * &d(&om, w, 2));
    &out + &(&hol - &anti).scale_int(2)
}

/// The `dt` integrand in the holomorphic form in which it appears inside the
/// tau formula; equals [`dt_integrand`] minus the time derivative of
/// `p1 conj(p2) - p2 conj(p1)`.
pub fn holomorphic_dt_integrand(p1: &TriPoly, p2: &TriPoly) -> TriPoly {
    let d = |p: &TriPoly, v: Var, n: u32| p.derive_n(v, n);
    let (z, w) = (Var::Z, Var::W);
    let (s1, s2) = (p1.conj(), p2.conj());
    let a = &(&d(p1, z, 3) * p2) - &(p1 * &d(p2, z, 3));
    let b = &(&d(p1, z, 1) * &d(p2, z, 2)) - &(&d(p1, z, 2) * &d(p2, z, 1));
    let c = &(&s1 * &d(&s2, w, 3)) - &(&d(&s1, w, 3) * &s2);
    let e = &(&d(&s1, w, 2) * &d(&s2, w, 1)) - &(&d(&s1, w, 1) * &d(&s2, w, 2));
    &(&a + &c) + &(&b + &e).scale_int(2)
}

/// `A + S + T`: the cross term, the spatial quadratures, and the time
/// quadrature of the deficit `D = Theta - d_t(A + S)`, which must not depend
/// on `z` or `w`.
pub fn extended_bracket(p1: &FlowingSeed, p2: &FlowingSeed) -> Result<TriPoly> {
    let spatial = moutard_bracket(&p1.0, &p2.0);
    let theta = dt_integrand(&p1.0, &p2.0);
    let deficit = &theta - &spatial.derive(Var::T);
    if deficit.contains_var(Var::Z) || deficit.contains_var(Var::W) {
        return Err(Error::NotClosed(format!("time deficit depends on space: {}", deficit)));
    }
    Ok(&spatial + &deficit.antiderivative(Var::T))
}

/// `Phi = i (A + S + T) + C`.
pub fn extended_tau(p1: &FlowingSeed, p2: &FlowingSeed, c: &BigRational) -> Result<TriPoly> {
    let b = extended_bracket(p1, p2)?;
    Ok(&b.scale(&GaussianRational::i()) + &TriPoly::constant(GaussianRational::real(c.clone())))
}

/// Exact NV fields derived from a tau function.
#[derive(Clone, Debug)]
pub struct NVSolution {
    pub phi: TriPoly,
    pub u: RatFun,
    pub v: RatFun,
    pub convention: SchrodingerConvention,
}

impl NVSolution {
    /// `dbar V - d U`, identically zero for every tau function.
    pub fn constraint_defect(&self) -> RatFun {
        &self.v.derive(Var::W) - &self.u.derive(Var::Z)
    }

    /// The potential in the `-Delta + u` convention.
    pub fn u_laplacian(&self) -> RatFun {
        self.convention.convert(&self.u, SchrodingerConvention::Laplacian)
    }
}

pub fn nv_fields(phi: &TriPoly) -> Result<NVSolution> {
    if phi.is_zero() {
        return Err(Error::ZeroTau);
    }
    let u = log_laplacian_ratio(phi)?.scale_int(2);
    let v = log_dzz_ratio(phi)?.scale_int(2);
    let sol = NVSolution { phi: phi.clone(), u, v, convention: SchrodingerConvention::Wirtinger };
    let defect = sol.constraint_defect();
    if !defect.is_zero() {
        return Err(Error::NotClosed(format!("dbar V != d U: {}", defect.describe_numerator())));
    }
    Ok(sol)
}

/// `U_t - s (U_zzz + U_www + 3 (V U)_z + 3 (conj(V) U)_w)` with `s = NV_SIGN`.
pub fn nv_residual(sol: &NVSolution) -> RatFun {
    nv_residual_with_sign(sol, NV_SIGN)
}

pub fn nv_residual_with_sign(sol: &NVSolution, sign: i64) -> RatFun {
    let u = &sol.u;
    let vu = &sol.v * u;
    let vbar_u = &sol.v.conj() * u;
    let spatial = &(&u.derive_n(Var::Z, 3) + &u.derive_n(Var::W, 3))
        + &(&vu.derive(Var::Z) + &vbar_u.derive(Var::W)).scale_int(3);
    &u.derive(Var::T) - &spatial.scale_int(sign)
}
