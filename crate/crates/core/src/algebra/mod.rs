//! Exact arithmetic over Q(i): scalars, sparse polynomials in `z`, `w`, `t`,
//! rational functions, Wirtinger calculus, and the bridge to floating point.

pub mod calculus;
pub mod gaussian;
pub mod parse;
pub mod ratfun;
pub mod serial;
pub mod tripoly;

pub use calculus::{laplacian, log_dzz_ratio, log_laplacian_ratio, schrodinger_apply, wirtinger_derive, Differentiable};
pub use gaussian::GaussianRational;
pub use parse::parse_poly;
pub use ratfun::RatFun;
pub use tripoly::{Monomial, TriPoly, Var};

use num_complex::Complex64;

use crate::error::Result;

/// Numeric evaluation at a physical point `z = x + iy`, `w = x - iy`.
pub trait Evaluate {
    fn evaluate_at(&self, x: f64, y: f64, t: f64) -> Result<Complex64>;
}

impl Evaluate for TriPoly {
    fn evaluate_at(&self, x: f64, y: f64, t: f64) -> Result<Complex64> {
        Ok(self.eval_xyt(x, y, t))
    }
}

impl Evaluate for RatFun {
    fn evaluate_at(&self, x: f64, y: f64, t: f64) -> Result<Complex64> {
        self.eval_xyt(x, y, t)
    }
}

/// True iff the rational function is identically zero.
pub fn ratfun_zero(f: &RatFun) -> bool {
    f.is_zero()
}
