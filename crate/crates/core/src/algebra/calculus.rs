//! Wirtinger calculus on polynomials and rational functions.
//!
//! With `z = x + iy` and the independent symbol `w` standing for z-bar,
//! `d/dz = (d/dx - i d/dy)/2`, `d/dw = (d/dx + i d/dy)/2` and the Laplacian is
//! `4 d^2/dz dw`.

use super::ratfun::RatFun;
use super::tripoly::{TriPoly, Var};
use crate::error::{Error, Result};

/// Anything that can be formally differentiated in `z`, `w`, `t`.
pub trait Differentiable: Sized + Clone {
    fn wirtinger(&self, dir: Var) -> Self;

    fn wirtinger_n(&self, dir: Var, n: u32) -> Self {
        (0..n).fold(self.clone(), |f, _| f.wirtinger(dir))
    }

    /// `d^2/dz dw`.
    fn dbar_d(&self) -> Self {
        self.wirtinger(Var::Z).wirtinger(Var::W)
    }
}

impl Differentiable for TriPoly {
    fn wirtinger(&self, dir: Var) -> Self {
        self.derive(dir)
    }
}

impl Differentiable for RatFun {
    fn wirtinger(&self, dir: Var) -> Self {
        self.derive(dir)
    }
}

pub fn wirtinger_derive<F: Differentiable>(f: &F, dir: Var) -> F {
    f.wirtinger(dir)
}

/// `d^2/dz dw log tau = (tau tau_zw - tau_z tau_w) / tau^2`.
pub fn log_laplacian_ratio(tau: &TriPoly) -> Result<RatFun> {
    if tau.is_zero() {
        return Err(Error::ZeroTau);
    }
    let tz = tau.derive(Var::Z);
    let tw = tau.derive(Var::W);
    let num = &(tau * &tau.derive(Var::Z).derive(Var::W)) - &(&tz * &tw);
    RatFun::over_power(num, tau, 2)
}

/// `d^2/dz^2 log tau = (tau tau_zz - tau_z^2) / tau^2`.
pub fn log_dzz_ratio(tau: &TriPoly) -> Result<RatFun> {
    if tau.is_zero() {
        return Err(Error::ZeroTau);
    }
    let tz = tau.derive(Var::Z);
    let num = &(tau * &tz.derive(Var::Z)) - &(&tz * &tz);
    RatFun::over_power(num, tau, 2)
}

/// The flat Laplacian `4 d^2/dz dw`.
pub fn laplacian<F: Differentiable + Scalable>(f: &F) -> F {
    f.dbar_d().times(4)
}

/// Integer scaling shared by polynomials and rational functions.
pub trait Scalable {
    fn times(&self, k: i64) -> Self;
}

impl Scalable for TriPoly {
    fn times(&self, k: i64) -> Self {
        self.scale_int(k)
    }
}

impl Scalable for RatFun {
    fn times(&self, k: i64) -> Self {
        self.scale_int(k)
    }
}

/// Applies `-Delta + u` to `psi`.
pub fn schrodinger_apply(u: &RatFun, psi: &RatFun) -> RatFun {
    &(u * psi) - &laplacian(psi)
}
