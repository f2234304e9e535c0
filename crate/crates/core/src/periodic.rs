//! Periodic potentials from two Moutard steps over the constant potential
//! `u_0 = -k^2`, with `omega_1 = sin kx` and `omega_2 = sin(ax + by)`,
//! `a^2 + b^2 = k^2`.
//!
//! Everything here is a closed-form numeric evaluator; the derivatives of the
//! tau function are hand-derived and guarded by finite-difference tests.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{linspace, with_pool};

const SIN_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicParams {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub c: f64,
}

impl PeriodicParams {
    pub fn new(a: f64, b: f64, k: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && k.is_finite() && c.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if k == 0.0 {
            return Err(Error::InvalidParams("k must be nonzero".into()));
        }
        if (a * a + b * b - k * k).abs() > 1e-12 * k * k {
            return Err(Error::InvalidParams(format!("a^2 + b^2 = {} differs from k^2 = {}", a * a + b * b, k * k)));
        }
        if (a - k).abs() < 1e-12 || (a + k).abs() < 1e-12 {
            return Err(Error::InvalidParams("a = +-k makes theta_1 degenerate".into()));
        }
        Ok(Self { a, b, k, c })
    }

    /// The demonstrated case `a = 0`, `b = k = 1`, `C = 3`.
    pub fn demo() -> Self {
        Self { a: 0.0, b: 1.0, k: 1.0, c: 3.0 }
    }
}

/// `tau_per = omega_1 theta_1` and its first and second partial derivatives.
#[derive(Clone, Copy, Debug)]
pub struct TauJet {
    pub tau: f64,
    pub tx: f64,
    pub ty: f64,
    pub txx: f64,
    pub tyy: f64,
}

impl TauJet {
    pub fn laplacian(&self) -> f64 {
        self.txx + self.tyy
    }

    /// `Delta log tau = (tau Delta tau - |grad tau|^2) / tau^2`.
    pub fn laplacian_log(&self) -> f64 {
        (self.tau * self.laplacian() - self.tx * self.tx - self.ty * self.ty) / (self.tau * self.tau)
    }
}

/// `tau = (b/2) (cos(phi + kx)/(a + k) - cos(phi - kx)/(a - k) + C)` with
/// `phi = ax + by`.
pub fn tau_jet(p: &PeriodicParams, x: f64, y: f64) -> TauJet {
    let (a, b, k) = (p.a, p.b, p.k);
    let (pp, pm) = (a * x + b * y + k * x, a * x + b * y - k * x);
    let (ap, am) = (a + k, a - k);
    let h = b / 2.0;
    TauJet {
        tau: h * (pp.cos() / ap - pm.cos() / am + p.c),
        tx: h * (-pp.sin() + pm.sin()),
        ty: h * b * (-pp.sin() / ap + pm.sin() / am),
        txx: h * (-ap * pp.cos() + am * pm.cos()),
        tyy: h * b * b * (-pp.cos() / ap + pm.cos() / am),
    }
}

pub fn tau_per(p: &PeriodicParams, x: f64, y: f64) -> f64 {
    tau_jet(p, x, y).tau
}

/// `theta_1 = tau_per / sin kx`.
pub fn periodic_theta(p: &PeriodicParams, x: f64, y: f64) -> Result<f64> {
    let s = (p.k * x).sin();
    if s.abs() < SIN_TOLERANCE {
        return Err(Error::Pole { x, y, t: 0.0 });
    }
    Ok(tau_per(p, x, y) / s)
}

/// `psi_1 = 1/theta_1 = sin kx / tau_per`, smooth wherever `tau_per != 0`.
pub fn periodic_psi(p: &PeriodicParams, x: f64, y: f64) -> Result<f64> {
    let t = tau_per(p, x, y);
    if t.abs() < SIN_TOLERANCE {
        return Err(Error::Pole { x, y, t: 0.0 });
    }
    Ok((p.k * x).sin() / t)
}

/// First-step potential `-k^2 - 2 Delta log sin kx = k^2 + 2 k^2 cot^2 kx`.
pub fn first_step_potential(p: &PeriodicParams, x: f64) -> Result<f64> {
    let s = (p.k * x).sin();
    if s.abs() < SIN_TOLERANCE {
        return Err(Error::Pole { x, y: 0.0, t: 0.0 });
    }
    let cot = (p.k * x).cos() / s;
    Ok(p.k * p.k * (1.0 + 2.0 * cot * cot))
}

/// Second-step potential `-k^2 - 2 Delta log tau_per`, for which `psi_1` is a
/// zero mode.
pub fn periodic_potential(p: &PeriodicParams, x: f64, y: f64) -> Result<f64> {
    Ok(-p.k * p.k - 2.0 * log_laplacian_checked(p, x, y)?)
}

/// The same potential with the constant `+k^2` in place of `-k^2`. Kept for
/// comparison: `psi_1` is not a zero mode of `-Delta` plus this potential.
pub fn periodic_potential_shifted(p: &PeriodicParams, x: f64, y: f64) -> Result<f64> {
    Ok(p.k * p.k - 2.0 * log_laplacian_checked(p, x, y)?)
}

fn log_laplacian_checked(p: &PeriodicParams, x: f64, y: f64) -> Result<f64> {
    let j = tau_jet(p, x, y);
    if j.tau.abs() < SIN_TOLERANCE {
        return Err(Error::Pole { x, y, t: 0.0 });
    }
    Ok(j.laplacian_log())
}

/// A rectangular lattice of evaluation points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub n: usize,
}

impl Lattice {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let xs = linspace(self.x_min, self.x_max, self.n);
        let ys = linspace(self.y_min, self.y_max, self.n);
        xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
    }
}

/// `max |(-Delta_h + V) f|` over the lattice with the five-point Laplacian.
pub fn fd_residual<F, V>(f: F, v: V, lattice: &Lattice, h: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<Complex64> + Sync,
    V: Fn(f64, f64) -> Result<f64> + Sync,
{
    let pts = lattice.points();
    let vals: Vec<Result<f64>> = with_pool(|| {
        pts.par_iter()
            .map(|&(x, y)| {
                let c = f(x, y)?;
                let lap = (f(x + h, y)? + f(x - h, y)? + f(x, y + h)? + f(x, y - h)? - c * 4.0) / (h * h);
                Ok((-lap + c * v(x, y)?).norm())
            })
            .collect()
    });
    vals.into_iter().try_fold(0.0f64, |m, r| Ok(m.max(r?)))
}

/// Residual of `psi_1 = 1/theta_1` against the second-step potential.
pub fn fd_kernel_residual(p: &PeriodicParams, lattice: &Lattice, h: f64) -> Result<f64> {
    let margin = 10.0 * h;
    let min_tau = lattice
        .points()
        .iter()
        .map(|&(x, y)| {
            [(0.0, 0.0), (margin, 0.0), (-margin, 0.0), (0.0, margin), (0.0, -margin)]
                .iter()
                .map(|(dx, dy)| tau_per(p, x + dx, y + dy).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    if min_tau < 1e-6 {
        return Err(Error::InvalidParams(format!("lattice comes within {min_tau:.2e} of a zero of tau_per")));
    }
    fd_residual(|x, y| Ok(periodic_psi(p, x, y)?.into()), |x, y| periodic_potential(p, x, y), lattice, h)
}

/// Finite sums of plane waves `c e^(i(alpha x + beta y))` plus a linear part
/// `lx x + ly y`.
#[derive(Clone, Debug, Default)]
pub struct WaveSum {
    pub waves: Vec<(Complex64, f64, f64)>,
    pub lx: Complex64,
    pub ly: Complex64,
}

impl WaveSum {
    pub fn plane(alpha: f64, beta: f64) -> Self {
        Self { waves: vec![(Complex64::new(1.0, 0.0), alpha, beta)], ..Default::default() }
    }

    /// `sin(alpha x + beta y)`.
    pub fn sine(alpha: f64, beta: f64) -> Self {
        let h = Complex64::new(0.0, -0.5);
        Self { waves: vec![(h, alpha, beta), (-h, -alpha, -beta)], ..Default::default() }
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.waves.iter().map(|(c, a, b)| c * Complex64::new(0.0, a * x + b * y).exp()).sum::<Complex64>()
            + self.lx * x
            + self.ly * y
    }
}

/// `omega theta` for the Moutard step with divisor `omega` applied to `phi`,
/// both sums of plane waves of a common wavenumber, with zero constant.
///
/// For single waves with `m = alpha - i beta`, `omega theta` is
/// `-i (m2 - m1)/(m1 + m2) E1 E2`, or the linear function
/// `2i (beta_1 x - alpha_1 y)` when the two waves are conjugate.
pub fn wave_quadrature(omega: &WaveSum, phi: &WaveSum) -> WaveSum {
    let mut out = WaveSum::default();
    let i = Complex64::new(0.0, 1.0);
    for &(c1, a1, b1) in &omega.waves {
        for &(c2, a2, b2) in &phi.waves {
            let (m1, m2) = (Complex64::new(a1, -b1), Complex64::new(a2, -b2));
            let c = c1 * c2;
            if (m1 + m2).norm() < 1e-12 * (m1.norm() + m2.norm()).max(1.0) {
                out.lx += c * 2.0 * i * b1;
                out.ly -= c * 2.0 * i * a1;
            } else {
                out.waves.push((-i * c * (m2 - m1) / (m1 + m2), a1 + a2, b1 + b2));
            }
        }
    }
    out
}

/// `omega_3 + omega_1 omega_2 (theta_2 - theta_1) / lambda`, pointwise.
pub fn superpose_values(
    omega1: Complex64,
    omega2: Complex64,
    omega3: Complex64,
    theta1: Complex64,
    theta2: Complex64,
    lambda: Complex64,
) -> Complex64 {
    omega3 + omega1 * omega2 * (theta2 - theta1) / lambda
}

/// A zero mode of `-Delta + u~~` obtained from the cube with third seed
/// `e^(i(px + qy))`, `p^2 + q^2 = k^2`; the divisor is `tau_per`.
pub fn periodic_basis_member(params: &PeriodicParams, p: f64, q: f64, x: f64, y: f64) -> Result<Complex64> {
    let k = params.k;
    if (p * p + q * q - k * k).abs() > 1e-12 * k * k {
        return Err(Error::InvalidParams(format!("p^2 + q^2 = {} differs from k^2", p * p + q * q)));
    }
    let w1 = WaveSum::sine(k, 0.0);
    let w2 = WaveSum::sine(params.a, params.b);
    let w3 = WaveSum::plane(p, q);
    let (o1, o2) = (w1.eval(x, y), w2.eval(x, y));
    if o1.norm() < SIN_TOLERANCE || o2.norm() < SIN_TOLERANCE {
        return Err(Error::Pole { x, y, t: 0.0 });
    }
    let lambda = tau_per(params, x, y);
    if lambda.abs() < SIN_TOLERANCE {
        return Err(Error::Pole { x, y, t: 0.0 });
    }
    let th1 = wave_quadrature(&w1, &w3).eval(x, y) / o1;
    let th2 = wave_quadrature(&w2, &w3).eval(x, y) / o2;
    Ok(superpose_values(o1, o2, w3.eval(x, y), th1, th2, lambda.into()))
}

/// Grid scan of `tau_per`; returns the minimum and its location.
pub fn tau_minimum(params: &PeriodicParams, lattice: &Lattice) -> (f64, (f64, f64)) {
    let pts = lattice.points();
    let vals: Vec<f64> = with_pool(|| pts.par_iter().map(|&(x, y)| tau_per(params, x, y)).collect());
    vals.iter().zip(&pts).fold((f64::INFINITY, (0.0, 0.0)), |best, (&v, &pt)| if v < best.0 { (v, pt) } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn interior() -> Lattice {
        Lattice { x_min: 0.3, x_max: PI - 0.3, y_min: 0.3, y_max: PI - 0.3, n: 41 }
    }

    #[test]
    fn theta_at_sample_points() {
        let p = PeriodicParams::demo();
        assert!((periodic_theta(&p, PI / 2.0, 0.0).unwrap() - 1.5).abs() < 1e-12);
        assert!((periodic_theta(&p, PI / 2.0, PI / 2.0).unwrap() - 1.5).abs() < 1e-12);
        assert!(matches!(periodic_theta(&p, 0.0, 0.3), Err(Error::Pole { .. })));
    }

    #[test]
    fn theta_is_affine_in_c() {
        let p0 = PeriodicParams::new(0.6, 0.8, 1.0, 0.0).unwrap();
        let p3 = PeriodicParams { c: 3.0, ..p0 };
        for &(x, y) in &[(0.4, 0.9), (2.0, -1.3)] {
            let d = periodic_theta(&p3, x, y).unwrap() - periodic_theta(&p0, x, y).unwrap();
            assert!((d - 3.0 * p0.b / (2.0 * x.sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn param_validation() {
        assert!(PeriodicParams::new(0.5, 0.5, 1.0, 1.0).is_err());
        assert!(PeriodicParams::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(PeriodicParams::new(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(PeriodicParams::new(0.6, -0.8, 1.0, 1.0).is_ok());
    }

    #[test]
    fn demo_tau_is_closed_form() {
        let p = PeriodicParams::demo();
        for &(x, y) in &[(0.1, 0.2), (1.7, -2.9), (3.0, 3.0)] {
            assert!((tau_per(&p, x, y) - (x.cos() * y.cos() + 1.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn second_step_potential_value() {
        let p = PeriodicParams::demo();
        let j = tau_jet(&p, PI / 2.0, 0.0);
        assert!((j.laplacian_log() + 4.0 / 9.0).abs() < 1e-12);
        assert!((periodic_potential(&p, PI / 2.0, 0.0).unwrap() + 1.0 / 9.0).abs() < 1e-12);
        assert!((periodic_potential_shifted(&p, PI / 2.0, 0.0).unwrap() - 17.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn first_step_potential_values() {
        let p = PeriodicParams::new(0.0, 2.0, 2.0, 1.0).unwrap();
        let x: f64 = 0.4;
        let cot = (2.0 * x).cos() / (2.0 * x).sin();
        assert!((first_step_potential(&p, x).unwrap() - (4.0 + 8.0 * cot * cot)).abs() < 1e-12);
        // theta_1 lies in the kernel of -Delta plus the first-step potential.
        let lat = Lattice { x_min: 0.3, x_max: 1.2, y_min: -1.0, y_max: 1.0, n: 9 };
        for params in [p, PeriodicParams::new(1.2, 1.6, 2.0, 0.7).unwrap()] {
            let res = |h| {
                fd_residual(|x, y| Ok(periodic_theta(&params, x, y)?.into()), |x, _| first_step_potential(&params, x), &lat, h)
                    .unwrap()
            };
            let (r1, r2) = (res(1e-3), res(5e-4));
            assert!(r1 / r2 > 3.5, "{r1} {r2}");
        }
    }

    #[test]
    fn hand_derivatives_match_finite_differences() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let h = 1e-4;
        for _ in 0..100 {
            let a: f64 = rng.gen_range(-0.9..0.9);
            let k: f64 = rng.gen_range(0.5..2.0);
            let p = PeriodicParams::new(a * k, (1.0 - a * a).sqrt() * k, k, rng.gen_range(-3.0..3.0)).unwrap();
            let (x, y) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let j = tau_jet(&p, x, y);
            let t = |x, y| tau_per(&p, x, y);
            let tol = 1e-6 * (1.0 + j.tau.abs());
            assert!(((t(x + h, y) - t(x - h, y)) / (2.0 * h) - j.tx).abs() < tol);
            assert!(((t(x, y + h) - t(x, y - h)) / (2.0 * h) - j.ty).abs() < tol);
            assert!(((t(x + h, y) - 2.0 * j.tau + t(x - h, y)) / (h * h) - j.txx).abs() < 1e-4);
            assert!(((t(x, y + h) - 2.0 * j.tau + t(x, y - h)) / (h * h) - j.tyy).abs() < 1e-4);
        }
    }

    #[test]
    fn periodicity() {
        let p = PeriodicParams::demo();
        for &(x, y) in &[(0.3, 0.4), (-2.2, 1.9), (1.0, -0.7)] {
            let u = periodic_potential(&p, x, y).unwrap();
            assert!((periodic_potential(&p, x + 2.0 * PI / p.k, y).unwrap() - u).abs() < 1e-12);
            assert!((periodic_potential(&p, x, y + 2.0 * PI / p.b).unwrap() - u).abs() < 1e-12);
        }
    }

    #[test]
    fn demo_is_globally_smooth() {
        let p = PeriodicParams::demo();
        let lat = Lattice { x_min: -PI, x_max: PI, y_min: -PI, y_max: PI, n: 201 };
        let (m, _) = tau_minimum(&p, &lat);
        assert!(m >= 0.5 - 1e-12);
        assert!(lat.points().iter().all(|&(x, y)| periodic_potential(&p, x, y).unwrap().is_finite()));
    }

    #[test]
    fn kernel_residual_is_second_order() {
        let p = PeriodicParams::demo();
        let r1 = fd_kernel_residual(&p, &interior(), 1e-3).unwrap();
        let r2 = fd_kernel_residual(&p, &interior(), 5e-4).unwrap();
        assert!(r1 <= 1e-4, "{r1}");
        assert!(r1 / r2 >= 3.5, "{r1} {r2}");
    }

    #[test]
    fn plane_waves_are_eigenfunctions() {
        let (a, b, k) = (0.6, 0.8, 1.0);
        let v = |_: f64, _: f64| Ok(-k * k);
        let r = fd_residual(|x, y| Ok(WaveSum::sine(a, b).eval(x, y)), v, &interior(), 1e-3).unwrap();
        assert!(r <= 1e-6, "{r}");
        let r = fd_residual(|x, y| Ok(WaveSum::sine(k, 0.0).eval(x, y)), v, &interior(), 1e-3).unwrap();
        assert!(r <= 1e-6, "{r}");
    }

    #[test]
    fn wave_quadrature_reproduces_tau() {
        let p = PeriodicParams::new(0.6, 0.8, 1.0, 0.0).unwrap();
        let q = wave_quadrature(&WaveSum::sine(1.0, 0.0), &WaveSum::sine(0.6, 0.8));
        for &(x, y) in &[(0.3, 0.7), (1.1, -0.4)] {
            assert!((q.eval(x, y) - tau_per(&p, x, y)).norm() < 1e-12);
        }
    }

    #[test]
    fn basis_members_are_zero_modes() {
        let p = PeriodicParams::demo();
        let lat = Lattice { x_min: 0.4, x_max: 1.2, y_min: 0.4, y_max: 1.2, n: 7 };
        for &(pw, qw) in &[(1.0, 0.0), (0.0, 1.0), (0.6, 0.8)] {
            let v = periodic_basis_member(&p, pw, qw, 0.7, 0.9).unwrap();
            assert!(v.norm().is_finite());
            let r = fd_residual(|x, y| periodic_basis_member(&p, pw, qw, x, y), |x, y| periodic_potential(&p, x, y), &lat, 1e-3)
                .unwrap();
            assert!(r <= 1e-4, "({pw}, {qw}): {r}");
        }
        assert!(periodic_basis_member(&p, 1.0, 1.0, 0.7, 0.9).is_err());
    }

    #[test]
    fn degenerate_superposition() {
        let (o1, o2, o3, th) = (Complex64::new(0.3, 0.0), Complex64::new(-1.2, 0.0), Complex64::new(0.1, 0.4), Complex64::new(2.0, -1.0));
        assert_eq!(superpose_values(o1, o2, o3, th, th, Complex64::new(1.7, 0.0)), o3);
    }
}
