//! Rational soliton potentials of the two-dimensional Schrodinger operator and
//! the Novikov-Veselov equation, built by iterated Moutard transformations and
//! verified as exact identities over Q(i).

pub mod algebra;
pub mod bianchi;
pub mod cli;
pub mod darboux;
pub mod error;
pub mod fixtures;
pub mod grid;
pub mod moutard;
pub mod numeric;
pub mod nv;
pub mod periodic;
pub mod report;
pub mod sigma;

pub use error::{Error, Result};
