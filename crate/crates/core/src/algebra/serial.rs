//! JSON term-list encoding of polynomials and rational functions.
//!
//! A polynomial is `[{"ez":..,"ew":..,"et":..,"re":"p/q","im":"p/q"}, ...]`,
//! terms in ascending exponent order. A rational function is
//! `{"num": [...], "den": [...]}` with the expanded denominator.

use serde::{Deserialize, Serialize};

use super::gaussian::{format_rational, parse_rational, GaussianRational};
use super::ratfun::RatFun;
use super::tripoly::TriPoly;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub ez: u32,
    pub ew: u32,
    pub et: u32,
    pub re: String,
    pub im: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatFunJson {
    pub num: Vec<TermJson>,
    pub den: Vec<TermJson>,
}

pub fn poly_to_json(p: &TriPoly) -> Vec<TermJson> {
    p.terms()
        .map(|(e, c)| TermJson {
            ez: e[0],
            ew: e[1],
            et: e[2],
            re: format_rational(&c.re),
            im: format_rational(&c.im),
        })
        .collect()
}

pub fn poly_from_json(terms: &[TermJson]) -> Result<TriPoly> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let re = parse_rational(&t.re).ok_or_else(|| Error::Parse(format!("bad rational '{}'", t.re)))?;
        let im = parse_rational(&t.im).ok_or_else(|| Error::Parse(format!("bad rational '{}'", t.im)))?;
        out.push((GaussianRational::new(re, im), [t.ez, t.ew, t.et]));
    }
    Ok(TriPoly::from_terms(out))
}

pub fn ratfun_to_json(f: &RatFun) -> RatFunJson {
    RatFunJson { num: poly_to_json(f.num()), den: poly_to_json(&f.den()) }
}

pub fn ratfun_from_json(j: &RatFunJson) -> Result<RatFun> {
    RatFun::new(poly_from_json(&j.num)?, poly_from_json(&j.den)?)
}
