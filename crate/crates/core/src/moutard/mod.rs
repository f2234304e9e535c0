//! Two-step Moutard iteration from harmonic-polynomial seeds.
//!
//! Starting from `H0 = -Delta`, the zero modes `omega_k = p_k + sigma(p_k)` with
//! holomorphic `p_k` generate the transform `theta_1 = tau / omega_1` of
//! `omega_2`, where
//!
//! ```text
//! tau = i * (p1 s(p2) - p2 s(p1) + I - s(I)) + C,   I = int (p1' p2 - p1 p2') dz
//! ```
//!
//! and `s` is the conjugation involution. The second step gives
//! `u = -2 Delta log tau` with zero modes `psi_1 = omega_1/tau`,
//! `psi_2 = -omega_2/tau`.

mod certify;
mod decay;

pub use certify::{certify_nonvanishing, Certificate, Verdict};
pub use decay::{estimate_decay, DECAY_RAY_OFFSET};

use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{log_laplacian_ratio, schrodinger_apply, GaussianRational, RatFun, TriPoly, Var};
use crate::error::{Error, Result};

/// A polynomial in `z` alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicSeed(TriPoly);

impl HarmonicSeed {
    pub fn new(p: TriPoly) -> Result<Self> {
        if p.contains_var(Var::W) || p.contains_var(Var::T) {
            return Err(Error::NotHolomorphic(format!("{}", p)));
        }
        Ok(Self(p))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(crate::algebra::parse_poly(s)?)
    }

    pub fn poly(&self) -> &TriPoly {
        &self.0
    }

    pub fn omega(&self) -> TriPoly {
        harmonic_from_holomorphic(self)
    }
}

/// `omega = p + sigma(p)`, the real harmonic polynomial `2 Re p`.
pub fn harmonic_from_holomorphic(p: &HarmonicSeed) -> TriPoly {
    &p.0 + &p.0.conj()
}

/// The sigma-antisymmetric quadrature bracket
/// `p1 s(p2) - p2 s(p1) + I - s(I)` with `I = int (p1' p2 - p1 p2') dz`.
///
/// Both polynomials may depend on `t`; the antiderivative is in `z` with zero
/// constant term. `moutard_bracket(p2, p1) = -moutard_bracket(p1, p2)`.
pub fn moutard_bracket(p1: &TriPoly, p2: &TriPoly) -> TriPoly {
    let (s1, s2) = (p1.conj(), p2.conj());
    let cross = &(p1 * &s2) - &(p2 * &s1);
    let integrand = &(&p1.derive(Var::Z) * p2) - &(p1 * &p2.derive(Var::Z));
    let i = integrand.antiderivative(Var::Z);
    &cross + &(&i - &i.conj())
}

fn times_i(p: &TriPoly) -> TriPoly {
    p.scale(&GaussianRational::i())
}

/// `tau = i B(p1, p2) + C`, the denominator-cleared product `omega_1 theta_1`.
pub fn static_tau(p1: &HarmonicSeed, p2: &HarmonicSeed, c: &BigRational) -> TriPoly {
    &times_i(&moutard_bracket(&p1.0, &p2.0)) + &TriPoly::constant(GaussianRational::real(c.clone()))
}

/// The Moutard transform of `omega_2` by `omega_1`: `theta_1 = tau / omega_1`.
pub fn moutard_theta(p1: &HarmonicSeed, p2: &HarmonicSeed, c: &BigRational) -> Result<RatFun> {
    let omega1 = p1.omega();
    if omega1.is_zero() {
        return Err(Error::DegenerateSeed("omega_1 = p_1 + conj(p_1) vanishes identically".into()));
    }
    RatFun::new(static_tau(p1, p2, c), omega1)
}

/// Output of the two-step construction.
#[derive(Clone, Debug)]
pub struct MoutardResult {
    pub tau: TriPoly,
    pub u: RatFun,
    pub psi1: RatFun,
    pub psi2: RatFun,
    pub c: BigRational,
    pub omega1: TriPoly,
    pub omega2: TriPoly,
}

impl MoutardResult {
    /// Exact kernel identities for both zero modes.
    pub fn kernel_holds(&self) -> (bool, bool) {
        (verify_kernel(&self.u, &self.psi1), verify_kernel(&self.u, &self.psi2))
    }
}

/// `-2 Delta log tau = -8 d^2/dz dw log tau`.
pub fn potential_from_tau(tau: &TriPoly) -> Result<RatFun> {
    Ok(log_laplacian_ratio(tau)?.scale_int(-8))
}

pub fn two_step_construct(p1: &HarmonicSeed, p2: &HarmonicSeed, c: &BigRational) -> Result<MoutardResult> {
    let omega1 = p1.omega();
    let omega2 = p2.omega();
    if omega1.is_zero() {
        return Err(Error::DegenerateSeed("omega_1 vanishes identically".into()));
    }
    let tau = static_tau(p1, p2, c);
    if tau.is_zero() {
        return Err(Error::ZeroTau);
    }
    let u = potential_from_tau(&tau)?;
    let psi1 = RatFun::new(omega1.clone(), tau.clone())?;
    let psi2 = RatFun::new(-&omega2, tau.clone())?;
    Ok(MoutardResult { tau, u, psi1, psi2, c: c.clone(), omega1, omega2 })
}

/// True iff `(-Delta + u) psi` is exactly zero.
pub fn verify_kernel(u: &RatFun, psi: &RatFun) -> bool {
    schrodinger_apply(u, psi).is_zero()
}

/// The residual `(-Delta + u) psi`, for diagnostics.
pub fn kernel_residual(u: &RatFun, psi: &RatFun) -> RatFun {
    schrodinger_apply(u, psi)
}

/// Integration constant and scale relating a constructed tau to a target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantFit {
    pub c: BigRational,
    /// `tau = scale * target`.
    pub scale: GaussianRational,
}

/// Finds the real constant `C` with `i B(p1, p2) + C = scale * target` for some
/// nonzero scalar. The non-constant parts must be exactly proportional.
pub fn fit_constant(p1: &HarmonicSeed, p2: &HarmonicSeed, target: &TriPoly) -> Result<ConstantFit> {
    let ib = times_i(&moutard_bracket(&p1.0, &p2.0));
    fit_constant_to(&ib, target)
}

/// Shared by the static and time-dependent constructions: `base + C` against
/// `scale * target`.
pub fn fit_constant_to(base: &TriPoly, target: &TriPoly) -> Result<ConstantFit> {
    let zero = GaussianRational::zero();
    let var_part = |p: &TriPoly| &p.clone() - &TriPoly::constant(p.constant_term());
    let (bv, tv) = (var_part(base), var_part(target));
    let (e, tc) = tv
        .leading_term()
        .ok_or_else(|| Error::FitFailure("target has no non-constant terms".into()))?;
    let bc = bv.coeff(e);
    if bc == zero {
        return Err(Error::FitFailure("constructed tau lacks the target's leading monomial".into()));
    }
    let scale = &bc / &tc;
    let diff = &bv - &tv.scale(&scale);
    if !diff.is_zero() {
        return Err(Error::FitFailure(format!(
            "non-constant parts are not proportional; residual has {} terms",
            diff.len()
        )));
    }
    let c = &(&target.constant_term() * &scale) - &base.constant_term();
    if !c.is_real() {
        return Err(Error::FitFailure(format!("fitted constant {} is not real", c)));
    }
    Ok(ConstantFit { c: c.re, scale })
}

/// True iff `psi2 / psi1 = -omega2/omega1` is non-constant, i.e. the two zero
/// modes are linearly independent.
pub fn zero_modes_independent(omega1: &TriPoly, omega2: &TriPoly) -> bool {
    match (omega1.leading_term(), omega2.leading_term()) {
        (Some((e1, c1)), Some((e2, c2))) if e1 == e2 => {
            let ratio = &c2 / &c1;
            !(omega2 - &omega1.scale(&ratio)).is_zero()
        }
        (Some(_), Some(_)) => true,
        _ => false,
    }
}
