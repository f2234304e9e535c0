//! The cube of Moutard transformations and its algebraic superposition
//! formula.
//!
//! Three zero modes `omega_1, omega_2, omega_3` of `d dbar + U_0` are pushed
//! through the edges of a cube. With `tau_ij = i B(p_i, p_j) + C_ij`:
//!
//! ```text
//! omega_2' = tau_12 / omega_1      omega_1' = tau_21 / omega_2
//! theta_1  = tau_13 / omega_1      theta_2  = tau_23 / omega_2
//! theta'   = omega_3 + omega_1 omega_2 (theta_2 - theta_1) / lambda
//! ```
//!
//! where `lambda` is the common value of a pairing identity between the two
//! cross transforms. `theta'` is a zero mode at the far corner, with potential
//! `U_12 = 2 d dbar log tau_12`, obtained without a third quadrature.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{log_laplacian_ratio, GaussianRational, RatFun, TriPoly, Var};
use crate::error::{Error, Result};
use crate::moutard::{moutard_bracket, HarmonicSeed};
use crate::nv::{extended_bracket, FlowingSeed};

/// Which products of seeds and cross transforms are identified as `lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pairing {
    /// `lambda = omega_1 omega_1' = -omega_2 omega_2'`.
    SamePrime,
    /// `lambda = omega_1 omega_2' = -omega_2 omega_1'`.
    CrossPrime,
}

#[derive(Clone, Debug)]
pub struct CubeState {
    pub omega1: TriPoly,
    pub omega2: TriPoly,
    pub omega3: TriPoly,
    pub theta1: RatFun,
    pub theta2: RatFun,
    pub omega1p: RatFun,
    pub omega2p: RatFun,
    pub lambda: RatFun,
    pub pairing: Pairing,
    pub tau12: TriPoly,
    pub c12: BigRational,
    /// Solved so that the pairing identity holds.
    pub c21: BigRational,
    pub c13: BigRational,
    pub c23: BigRational,
}

fn constant(c: &BigRational) -> TriPoly {
    TriPoly::constant(GaussianRational::real(c.clone()))
}

fn tau_from(bracket: &TriPoly, c: &BigRational) -> TriPoly {
    &bracket.scale(&GaussianRational::i()) + &constant(c)
}

/// The real constant `c` with `r0 + c r1 = 0`, if one exists.
fn solve_constant(r0: &TriPoly, r1: &TriPoly) -> Option<BigRational> {
    if r1.is_zero() {
        return r0.is_zero().then(BigRational::zero);
    }
    let q = r0.div_exact(r1)?;
    if !q.is_constant() {
        return None;
    }
    let c = -q.constant_term();
    c.is_real().then_some(c.re)
}

struct Brackets {
    b12: TriPoly,
    b21: TriPoly,
    b13: TriPoly,
    b23: TriPoly,
}

pub fn build_cube(
    p1: &HarmonicSeed,
    p2: &HarmonicSeed,
    p3: &HarmonicSeed,
    c12: &BigRational,
    c13: &BigRational,
    c23: &BigRational,
) -> Result<CubeState> {
    let (a, b, c) = (p1.poly(), p2.poly(), p3.poly());
    let br = Brackets {
        b12: moutard_bracket(a, b),
        b21: moutard_bracket(b, a),
        b13: moutard_bracket(a, c),
        b23: moutard_bracket(b, c),
    };
    assemble([p1.omega(), p2.omega(), p3.omega()], br, c12, c13, c23)
}

/// The same cube for seeds on the flow `p_t = p_zzz`; edge quadratures carry
/// their time parts.
pub fn build_cube_flowing(
    p1: &FlowingSeed,
    p2: &FlowingSeed,
    p3: &FlowingSeed,
    c12: &BigRational,
    c13: &BigRational,
    c23: &BigRational,
) -> Result<CubeState> {
    let br = Brackets {
        b12: extended_bracket(p1, p2)?,
        b21: extended_bracket(p2, p1)?,
        b13: extended_bracket(p1, p3)?,
        b23: extended_bracket(p2, p3)?,
    };
    let om = |p: &FlowingSeed| p.poly() + &p.poly().conj();
    assemble([om(p1), om(p2), om(p3)], br, c12, c13, c23)
}

fn assemble(
    omegas: [TriPoly; 3],
    br: Brackets,
    c12: &BigRational,
    c13: &BigRational,
    c23: &BigRational,
) -> Result<CubeState> {
    let [omega1, omega2, omega3] = omegas;
    for (k, om) in [&omega1, &omega2, &omega3].iter().enumerate() {
        if om.is_zero() {
            return Err(Error::DegenerateSeed(format!("omega_{} vanishes identically", k + 1)));
        }
    }
    let tau12 = tau_from(&br.b12, c12);
    let i_b21 = br.b21.scale(&GaussianRational::i());
    let (o1sq, o2sq) = (&omega1 * &omega1, &omega2 * &omega2);

    // CrossPrime: omega_1 omega_2' + omega_2 omega_1' = tau_12 + tau_21.
    // SamePrime: omega_1 omega_1' + omega_2 omega_2' = 0 after clearing
    // omega_1 omega_2, i.e. omega_1^2 tau_21 + omega_2^2 tau_12 = 0.
    let candidates = [
        (Pairing::CrossPrime, &tau12 + &i_b21, TriPoly::one()),
        (Pairing::SamePrime, &(&o1sq * &i_b21) + &(&o2sq * &tau12), o1sq.clone()),
    ];
    let mut chosen = None;
    for (pairing, r0, r1) in &candidates {
        if let Some(c21) = solve_constant(r0, r1) {
            chosen = Some((*pairing, c21));
            break;
        }
    }
    let (pairing, c21) = chosen.ok_or_else(|| {
        let r = &candidates[0].1;
        Error::PairingFailure(format!("residual tau_12 + i B_21 = {} is not a real constant", r))
    })?;
    let tau21 = tau_from(&br.b21, &c21);

    let omega2p = RatFun::new(tau12.clone(), omega1.clone())?;
    let omega1p = RatFun::new(tau21, omega2.clone())?;
    let theta1 = RatFun::new(tau_from(&br.b13, c13), omega1.clone())?;
    let theta2 = RatFun::new(tau_from(&br.b23, c23), omega2.clone())?;
    let lambda = match pairing {
        Pairing::CrossPrime => omega2p.mul_poly(&omega1),
        Pairing::SamePrime => omega1p.mul_poly(&omega1),
    }
    .reduce();
    Ok(CubeState {
        omega1,
        omega2,
        omega3,
        theta1,
        theta2,
        omega1p,
        omega2p,
        lambda,
        pairing,
        tau12,
        c12: c12.clone(),
        c21,
        c13: c13.clone(),
        c23: c23.clone(),
    })
}

impl CubeState {
    /// `omega_1 omega_2' + omega_2 omega_1'` (CrossPrime) or
    /// `omega_1 omega_1' + omega_2 omega_2'` (SamePrime); zero by construction.
    pub fn pairing_residual(&self) -> RatFun {
        let (a, b) = match self.pairing {
            Pairing::CrossPrime => (self.omega2p.mul_poly(&self.omega1), self.omega1p.mul_poly(&self.omega2)),
            Pairing::SamePrime => (self.omega1p.mul_poly(&self.omega1), self.omega2p.mul_poly(&self.omega2)),
        };
        (&a + &b).reduce()
    }

    /// `U_12 = 2 d dbar log tau_12`, in the `d dbar + U` convention.
    pub fn corner_potential(&self) -> Result<RatFun> {
        Ok(log_laplacian_ratio(&self.tau12)?.scale_int(2))
    }

    /// The far-corner potential reached through omega_1 then omega_2', and
    /// through omega_2 then omega_1'.
    pub fn corner_potentials_by_path(&self) -> Result<(RatFun, RatFun)> {
        let u1 = log_laplacian_ratio(&self.omega1)?.scale_int(2);
        let u2 = log_laplacian_ratio(&self.omega2)?.scale_int(2);
        let a = &u1 + &log_laplacian_of(&self.omega2p)?.scale_int(2);
        let b = &u2 + &log_laplacian_of(&self.omega1p)?.scale_int(2);
        Ok((a, b))
    }

    /// Structural rationality: every field at every corner is a ratio of
    /// polynomials, and the potentials are real.
    pub fn corner_fields_are_real(&self) -> Result<bool> {
        let (a, b) = self.corner_potentials_by_path()?;
        Ok(a.is_sigma_fixed() && b.is_sigma_fixed() && self.corner_potential()?.is_sigma_fixed())
    }
}

/// `d dbar log f` for a rational `f`, from its factored form.
fn log_laplacian_of(f: &RatFun) -> Result<RatFun> {
    let mut out = log_laplacian_ratio(f.num())?;
    for (g, k) in f.den_factors() {
        out = &out - &log_laplacian_ratio(g)?.scale_int(*k as i64);
    }
    Ok(out)
}

/// `theta' = omega_3 + omega_1 omega_2 (theta_2 - theta_1) / lambda`.
pub fn cube_superpose(state: &CubeState) -> Result<RatFun> {
    if state.lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    let diff = (&state.theta2 - &state.theta1).mul_poly(&(&state.omega1 * &state.omega2));
    let ratio = &diff / &state.lambda;
    Ok((&RatFun::from_poly(state.omega3.clone()) + &ratio.reduce()).reduce())
}

/// `(d dbar + U_12) theta'`.
pub fn corner_residual(state: &CubeState, theta_prime: &RatFun) -> Result<RatFun> {
    let u12 = state.corner_potential()?;
    Ok(&theta_prime.derive(Var::Z).derive(Var::W) + &(&u12 * theta_prime))
}

/// True iff `theta` solves the quadrature of a Moutard step with zero modes
/// `omega` (the divisor) and `phi`:
/// `d(omega theta) = -i (omega d phi - phi d omega)` and
/// `dbar(omega theta) = i (omega dbar phi - phi dbar omega)`.
/// The orientation of the step is a convention, so `-theta` is accepted too.
pub fn in_quadrature_family(omega: &RatFun, phi: &RatFun, theta: &RatFun) -> bool {
    let check = |th: &RatFun| {
        let prod = omega * th;
        let i = GaussianRational::i();
        let wz = (omega * &phi.derive(Var::Z)) - (phi * &omega.derive(Var::Z));
        let ww = (omega * &phi.derive(Var::W)) - (phi * &omega.derive(Var::W));
        (&prod.derive(Var::Z) + &wz.scale(&i)).is_zero() && (&prod.derive(Var::W) - &ww.scale(&i)).is_zero()
    };
    check(theta) || check(&-theta)
}

/// Exact check: `theta'` is a zero mode at the far corner and belongs to the
/// family obtained by transforming `theta_1` with `omega_2'`.
pub fn verify_superposition(state: &CubeState, theta_prime: &RatFun) -> bool {
    match corner_residual(state, theta_prime) {
        Ok(r) if r.is_zero() => in_quadrature_family(&state.omega2p, &state.theta1, theta_prime),
        _ => false,
    }
}

/// Independent numeric oracle for the seventh edge: integrates the closed
/// 1-form of the `omega_2'`-step applied to `theta_1` along piecewise-linear
/// paths in `C^2` (with `z`, `w` independent, so generic paths miss the pole
/// curves), and compares with `omega_2' theta'` at the given points.
///
/// Returns the spread of `omega_2' theta' -+ Q` over the points, relative to
/// the magnitude of `Q`; it vanishes when the two agree up to an additive
/// constant, i.e. up to a `c / omega_2'` term in `theta'`.
pub fn seventh_edge_spread(state: &CubeState, theta_prime: &RatFun, points: &[(f64, f64)]) -> Result<f64> {
    let (om, ph) = (&state.omega2p, &state.theta1);
    let i = GaussianRational::i();
    let az = ((om * &ph.derive(Var::Z)) - (ph * &om.derive(Var::Z))).scale(&-&i);
    let aw = ((om * &ph.derive(Var::W)) - (ph * &om.derive(Var::W))).scale(&i);
    let base = (Complex64::new(0.3, 0.2), Complex64::new(0.3, -0.2));
    let detour = (Complex64::new(0.41, 1.13), Complex64::new(-0.77, 0.52));
    let mut diffs = Vec::new();
    let mut scale: f64 = 0.0;
    for &(x, y) in points {
        let target = (Complex64::new(x, y), Complex64::new(x, -y));
        let q = line_integral(&az, &aw, base, detour)? + line_integral(&az, &aw, detour, target)?;
        let f = om.eval(target.0, target.1, Complex64::zero())? * theta_prime.eval(target.0, target.1, Complex64::zero())?;
        scale = scale.max(q.norm()).max(f.norm());
        diffs.push((f - q, f + q));
    }
    let spread = |pick: fn(&(Complex64, Complex64)) -> Complex64| {
        let first = pick(&diffs[0]);
        diffs.iter().map(|d| (pick(d) - first).norm()).fold(0.0, f64::max)
    };
    Ok(spread(|d| d.0).min(spread(|d| d.1)) / scale.max(1.0))
}

const GL_NODES: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Adaptive five-point Gauss-Legendre along a straight segment in `C^2`:
/// a panel is split until halving it changes its value by less than the
/// tolerance, which concentrates nodes where the path passes near a pole.
fn line_integral(az: &RatFun, aw: &RatFun, from: (Complex64, Complex64), to: (Complex64, Complex64)) -> Result<Complex64> {
    let (dz, dw) = (to.0 - from.0, to.1 - from.1);
    let form = |s: f64| -> Result<Complex64> {
        let (z, w) = (from.0 + dz * s, from.1 + dw * s);
        Ok(az.eval(z, w, Complex64::zero())? * dz + aw.eval(z, w, Complex64::zero())? * dw)
    };
    let gl = |a: f64, b: f64| -> Result<Complex64> {
        let mut acc = Complex64::zero();
        for &(node, weight) in &GL_NODES {
            acc += form(0.5 * (a + b) + 0.5 * (b - a) * node)? * (0.5 * (b - a) * weight);
        }
        Ok(acc)
    };
    let panels = 64;
    let mut acc = Complex64::zero();
    let mut stack: Vec<(f64, f64, Complex64, u32)> = Vec::new();
    for k in 0..panels {
        let (a, b) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
        stack.push((a, b, gl(a, b)?, 0));
    }
    while let Some((a, b, whole, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let (left, right) = (gl(a, m)?, gl(m, b)?);
        if depth >= 30 || (left + right - whole).norm() <= 1e-13 * (1.0 + (left + right).norm()) {
            acc += left + right;
        } else {
            stack.push((a, m, left, depth + 1));
            stack.push((m, b, right, depth + 1));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(s: &str) -> HarmonicSeed {
        HarmonicSeed::parse(s).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn linear_cube() -> CubeState {
        build_cube(&seed("z"), &seed("i z"), &seed("z^2"), &q(3, 1), &q(1, 2), &q(-2, 1)).unwrap()
    }

    #[test]
    fn pairing_is_solved_with_opposite_constant() {
        let s = linear_cube();
        assert_eq!(s.pairing, Pairing::CrossPrime);
        assert_eq!(s.c21, q(-3, 1));
        assert!(s.pairing_residual().is_zero());
        assert!(s.lambda.equals(&RatFun::from_poly(s.tau12.clone())));
    }

    #[test]
    fn superposition_solves_corner_equation() {
        let s = linear_cube();
        let tp = cube_superpose(&s).unwrap();
        assert!(corner_residual(&s, &tp).unwrap().is_zero());
        assert!(verify_superposition(&s, &tp));
    }

    #[test]
    fn family_membership_and_negatives() {
        let s = linear_cube();
        let tp = cube_superpose(&s).unwrap();
        assert!(!verify_superposition(&s, &(&tp + &RatFun::one())));
        let shift = s.omega2p.inv().unwrap().scale_int(5);
        assert!(verify_superposition(&s, &(&tp + &shift)));
        // A zero mode at the corner that is not in the theta_1 family.
        let other = s.omega2p.inv().unwrap();
        assert!(!verify_superposition(&s, &(&tp + &other.mul_poly(&TriPoly::z()))));
    }

    #[test]
    fn equal_thetas_collapse_to_omega3() {
        let mut s = linear_cube();
        s.theta2 = s.theta1.clone();
        assert!(cube_superpose(&s).unwrap().equals(&RatFun::from_poly(s.omega3.clone())));
    }

    #[test]
    fn third_seed_equal_to_first() {
        let s = build_cube(&seed("z"), &seed("i z"), &seed("z"), &q(3, 1), &q(1, 2), &q(-2, 1)).unwrap();
        let expect = RatFun::new(constant(&q(1, 2)), s.omega1.clone()).unwrap();
        assert!(s.theta1.equals(&expect));
        let tp = cube_superpose(&s).unwrap();
        assert!(corner_residual(&s, &tp).unwrap().is_zero());
    }

    #[test]
    fn commuting_paths() {
        let s = build_cube(
            &seed("(1 - i/4) z^2 + z/2"),
            &seed("(3 - 5i)/4 z^2 + (1 - i)/2 z"),
            &seed("z"),
            &q(-20, 1),
            &q(1, 1),
            &q(2, 1),
        )
        .unwrap();
        let (a, b) = s.corner_potentials_by_path().unwrap();
        assert!(a.equals(&b));
        assert!(a.equals(&s.corner_potential().unwrap()));
        assert!(s.corner_fields_are_real().unwrap());
        assert!(verify_superposition(&s, &cube_superpose(&s).unwrap()));
    }

    #[test]
    fn zero_lambda() {
        let mut s = linear_cube();
        s.lambda = RatFun::zero();
        assert!(matches!(cube_superpose(&s), Err(Error::ZeroLambda)));
    }

    #[test]
    fn degenerate_seed() {
        let err = build_cube(&seed("i"), &seed("z"), &seed("z^2"), &q(1, 1), &q(1, 1), &q(1, 1));
        assert!(matches!(err, Err(Error::DegenerateSeed(_))));
    }

    #[test]
    fn seventh_edge_agrees_numerically() {
        let s = linear_cube();
        let tp = cube_superpose(&s).unwrap();
        let pts = [(0.7, -0.4), (1.5, 0.9), (-1.2, 0.35), (0.1, 2.0)];
        assert!(seventh_edge_spread(&s, &tp, &pts).unwrap() < 1e-9);
        let off = &tp + &RatFun::from_poly(TriPoly::z());
        assert!(seventh_edge_spread(&s, &off, &pts).unwrap() > 1e-3);
    }

    #[test]
    fn flowing_cube() {
        use crate::nv::flow_solve;
        let (a, b, c) = (flow_solve(&seed("z^3")), flow_solve(&seed("i z^2 + z")), flow_solve(&seed("z^4")));
        let s = build_cube_flowing(&a, &b, &c, &q(2, 1), &q(-1, 3), &q(5, 1)).unwrap();
        let tp = cube_superpose(&s).unwrap();
        assert!(verify_superposition(&s, &tp));
    }
}
