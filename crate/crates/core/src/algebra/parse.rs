//! A small reader for polynomial expressions such as
//! `"(1 - i/4) z^2 + z/2"` or `"160 + 4x^2 + 17(x^2+y^2)^2 - 12t"`.
//!
//! Recognized symbols: `z`, `w` (alias `zbar`), `t`, the real coordinates `x`
//! and `y` (rewritten through `z` and `w`), and the imaginary unit `i`.
//! Juxtaposition multiplies. Division is allowed only by constants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational;
use super::tripoly::TriPoly;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' | '\u{2212}' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            d if d.is_ascii_digit() || d == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Tok::Num(parse_decimal(&text)?));
            }
            a if a.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if word == "zbar" {
                    out.push(Tok::Ident(word));
                } else {
                    // "xy" reads as x*y
                    for ch in word.chars() {
                        out.push(Tok::Ident(ch.to_string()));
                    }
                }
            }
            other => return Err(Error::Parse(format!("unexpected character '{}'", other))),
        }
    }
    Ok(out)
}

fn parse_decimal(text: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad number '{}'", text));
    match text.split_once('.') {
        None => Ok(BigRational::from_integer(text.parse::<BigInt>().map_err(|_| bad())?)),
        Some((a, b)) => {
            if b.contains('.') {
                return Err(bad());
            }
            let digits = format!("{}{}", a, b);
            let n: BigInt = if digits.is_empty() { return Err(bad()) } else { digits.parse().map_err(|_| bad())? };
            let d = BigInt::from(10).pow(b.len() as u32);
            Ok(BigRational::new(n, d))
        }
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<TriPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<TriPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let d = self.power()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(Error::Parse("division by a non-constant or zero expression".into()));
                    }
                    acc = acc.scale(&d.constant_term().inv());
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<TriPoly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<TriPoly> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            match self.bump() {
                Some(Tok::Num(n)) if n.is_integer() && n >= BigRational::zero() => {
                    let e: u32 = n.to_integer().try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(Error::Parse("exponent must be a nonnegative integer".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<TriPoly> {
        match self.bump() {
            Some(Tok::Num(n)) => Ok(TriPoly::constant(GaussianRational::real(n))),
            Some(Tok::Ident(name)) => ident(&name),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing ')'".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {:?}", other))),
        }
    }
}

fn ident(name: &str) -> Result<TriPoly> {
    let half = GaussianRational::ratio(1, 2);
    match name {
        "z" => Ok(TriPoly::z()),
        "w" | "zbar" => Ok(TriPoly::w()),
        "t" => Ok(TriPoly::t()),
        "i" => Ok(TriPoly::constant(GaussianRational::i())),
        "x" => Ok((&TriPoly::z() + &TriPoly::w()).scale(&half)),
        "y" => {
            let minus_half_i = GaussianRational::new(BigRational::zero(), -BigRational::one() / BigRational::from_integer(2.into()));
            Ok((&TriPoly::z() - &TriPoly::w()).scale(&minus_half_i))
        }
        other => Err(Error::Parse(format!("unknown symbol '{}'", other))),
    }
}

/// Parses a polynomial expression into a [`TriPoly`].
pub fn parse_poly(s: &str) -> Result<TriPoly> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}
