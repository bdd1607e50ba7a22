//! Laurent polynomials in `x_1..x_n` (any integer exponent) and polynomials
//! in `y_1..y_n` (non-negative exponents) over arbitrary-precision integers.
//!
//! Terms live in a `BTreeMap` keyed by the exponent vector
//! `(x_1..x_n, y_1..y_n)`, so equality is structural and iteration is in a
//! fixed order. Zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::io::bigint_json;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("division is not exact in the Laurent ring")]
    Inexact,
    #[error("operands have {0} and {1} variables")]
    Arity(usize, usize),
    #[error("column {column}: {message}")]
    Parse { column: usize, message: String },
}

/// Exponent vector `(x_1..x_n, y_1..y_n)`.
pub type Exponents = Box<[i64]>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentExpr {
    n: usize,
    terms: BTreeMap<Exponents, BigInt>,
}

impl LaurentExpr {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(n, vec![0; 2 * n], c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, 1)
    }

    /// `c * x^e[..n] * y^e[n..]`. Panics on a negative `y` exponent.
    pub fn monomial(n: usize, exps: Vec<i64>, c: impl Into<BigInt>) -> Self {
        assert_eq!(exps.len(), 2 * n, "exponent vector length");
        assert!(exps[n..].iter().all(|&e| e >= 0), "negative y exponent");
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps.into_boxed_slice(), c);
        }
        Self { n, terms }
    }

    /// Builds an expression from raw `(exponents, coefficient)` pairs,
    /// summing repeats. Unlike [`LaurentExpr::monomial`] this does not reject
    /// negative `y` exponents, so malformed values can be inspected with
    /// [`LaurentExpr::has_polynomial_coefficients`].
    pub fn from_terms(n: usize, terms: Vec<(Vec<i64>, BigInt)>) -> Self {
        let mut out = Self::zero(n);
        for (e, c) in terms {
            assert_eq!(e.len(), 2 * n, "exponent vector length");
            out.add_term(e.into_boxed_slice(), c);
        }
        out
    }

    pub fn x(n: usize, i: usize) -> Self {
        let mut e = vec![0; 2 * n];
        e[i] = 1;
        Self::monomial(n, e, 1)
    }

    pub fn y(n: usize, j: usize) -> Self {
        let mut e = vec![0; 2 * n];
        e[n + j] = 1;
        Self::monomial(n, e, 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &BigInt)> {
        self.terms.iter().map(|(e, c)| (&e[..], c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_arity(&self, other: &Self) {
        assert_eq!(self.n, other.n, "Laurent expressions over different variable counts");
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplies by the monomial `x^e[..n] y^e[n..]`.
    pub fn shift(&self, e: &[i64]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| {
                let moved: Exponents = k.iter().zip(e).map(|(a, b)| a + b).collect();
                (moved, c.clone())
            })
            .collect();
        Self { n: self.n, terms }
    }

    /// Exact quotient `self / divisor`, or `Inexact` when the divisor does not
    /// divide `self` in `Z[x^+-1][y]`.
    ///
    /// Lex-leading-term division. If an exact quotient exists its Newton
    /// polytope is the Minkowski difference of the two Newton polytopes, so
    /// every quotient exponent lies in the box `[min_a - min_b, max_a - max_b]`;
    /// leaving the box proves inexactness and bounds the loop.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, LaurentError> {
        if self.n != divisor.n {
            return Err(LaurentError::Arity(self.n, divisor.n));
        }
        let Some((lead_b, lead_c)) = divisor.terms.iter().next_back() else {
            return Err(LaurentError::DivisionByZero);
        };
        if self.is_zero() {
            return Ok(Self::zero(self.n));
        }
        let dims = 2 * self.n;
        let bounds = |p: &Self| {
            let mut lo = vec![i64::MAX; dims];
            let mut hi = vec![i64::MIN; dims];
            for e in p.terms.keys() {
                for d in 0..dims {
                    lo[d] = lo[d].min(e[d]);
                    hi[d] = hi[d].max(e[d]);
                }
            }
            (lo, hi)
        };
        let (alo, ahi) = bounds(self);
        let (blo, bhi) = bounds(divisor);
        let mut remainder = self.clone();
        let mut quotient = Self::zero(self.n);
        while let Some((lead_r, lead_rc)) = remainder.terms.iter().next_back() {
            let e: Vec<i64> = lead_r.iter().zip(lead_b.iter()).map(|(a, b)| a - b).collect();
            let in_box = (0..dims).all(|d| e[d] >= alo[d] - blo[d] && e[d] <= ahi[d] - bhi[d]);
            if !in_box || e[self.n..].iter().any(|&v| v < 0) {
                return Err(LaurentError::Inexact);
            }
            let (q, r) = lead_rc.div_rem(lead_c);
            if !r.is_zero() {
                return Err(LaurentError::Inexact);
            }
            let term = Self::monomial(self.n, e, q);
            remainder = &remainder - &(&term * divisor);
            quotient = &quotient + &term;
        }
        Ok(quotient)
    }

    /// Monomial denominator exponents `d_i = max(0, -min x_i)`.
    pub fn denominator(&self) -> Vec<i64> {
        (0..self.n)
            .map(|i| self.terms.keys().map(|e| -e[i]).max().unwrap_or(0).max(0))
            .collect()
    }

    /// `(numerator, d)` with `self = numerator / x^d`, the numerator a
    /// polynomial and no `x_i` with `d_i > 0` dividing it.
    pub fn normal_form(&self) -> (Self, Vec<i64>) {
        let d = self.denominator();
        let mut shift = d.clone();
        shift.extend(std::iter::repeat_n(0, self.n));
        (self.shift(&shift), d)
    }

    /// Every `y` exponent is non-negative. Only values built with
    /// [`LaurentExpr::from_terms`] can fail this.
    pub fn has_polynomial_coefficients(&self) -> bool {
        self.terms.keys().all(|e| e[self.n..].iter().all(|&v| v >= 0))
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| {
                    json!({
                        "x": &e[..self.n],
                        "y": &e[self.n..],
                        "c": bigint_json(c),
                    })
                })
                .collect(),
        )
    }

    /// Parses expressions such as `(x2^2 + y1y2x1 + y1)/(x1x2)` or the
    /// TeX-flavoured `(x_2^2+y_1)/x_1`. Juxtaposition multiplies; the only
    /// division allowed is by a single monomial at the end.
    pub fn parse(n: usize, text: &str) -> Result<Self, LaurentError> {
        let cleaned: Vec<(usize, char)> = text
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace() && !matches!(c, '_' | '{' | '}' | '*'))
            .map(|(i, c)| (i + 1, c))
            .collect();
        let mut p = Parser { n, s: &cleaned, pos: 0 };
        let value = p.expression()?;
        if p.pos != cleaned.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(value)
    }
}

struct Parser<'a> {
    n: usize,
    s: &'a [(usize, char)],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.s.get(self.pos).map(|&(_, c)| c)
    }

    fn error(&self, message: &str) -> LaurentError {
        let column = self.s.get(self.pos).map_or_else(|| self.s.last().map_or(1, |&(i, _)| i + 1), |&(i, _)| i);
        LaurentError::Parse {
            column,
            message: message.to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let digits: String = self.s[start..self.pos].iter().map(|&(_, c)| c).collect();
        digits.parse().ok()
    }

    fn small(&mut self, what: &str) -> Result<i64, LaurentError> {
        let negative = self.eat('-');
        let v = self
            .integer()
            .and_then(|v| i64::try_from(v).ok())
            .ok_or_else(|| self.error(&format!("expected {what}")))?;
        Ok(if negative { -v } else { v })
    }

    fn expression(&mut self) -> Result<LaurentExpr, LaurentError> {
        let numerator = if self.peek() == Some('(') {
            self.pos += 1;
            let s = self.sum()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            s
        } else {
            self.sum()?
        };
        if !self.eat('/') {
            return Ok(numerator);
        }
        let paren = self.eat('(');
        let denominator = self.term()?;
        if paren && !self.eat(')') {
            return Err(self.error("expected `)`"));
        }
        if denominator.len() != 1 {
            return Err(self.error("denominator must be a monomial"));
        }
        let (e, c) = denominator.terms.iter().next().expect("one term");
        if !c.is_one() || e[self.n..].iter().any(|&v| v != 0) {
            return Err(self.error("denominator must be a monic monomial in x"));
        }
        let inverse: Vec<i64> = e.iter().map(|v| -v).collect();
        Ok(numerator.shift(&inverse))
    }

    fn sum(&mut self) -> Result<LaurentExpr, LaurentError> {
        let mut total = LaurentExpr::zero(self.n);
        let mut sign = if self.eat('-') { -1 } else { 1 };
        loop {
            let t = self.term()?;
            total = if sign > 0 { &total + &t } else { &total - &t };
            sign = match self.peek() {
                Some('+') => 1,
                Some('-') => -1,
                _ => return Ok(total),
            };
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<LaurentExpr, LaurentError> {
        let coeff = self.integer();
        let mut e = vec![0i64; 2 * self.n];
        let mut factors = 0;
        while let Some(c @ ('x' | 'y')) = self.peek() {
            self.pos += 1;
            let idx = self.small("a variable index")?;
            if idx < 1 || idx as usize > self.n {
                return Err(self.error(&format!("variable index {idx} out of range 1..{}", self.n)));
            }
            let power = if self.eat('^') { self.small("an exponent")? } else { 1 };
            let slot = if c == 'x' { idx as usize - 1 } else { self.n + idx as usize - 1 };
            e[slot] += power;
            factors += 1;
        }
        if coeff.is_none() && factors == 0 {
            return Err(self.error("expected a term"));
        }
        if e[self.n..].iter().any(|&v| v < 0) {
            return Err(self.error("negative y exponent"));
        }
        Ok(LaurentExpr::monomial(self.n, e, coeff.unwrap_or_else(BigInt::one)))
    }
}

impl Add for &LaurentExpr {
    type Output = LaurentExpr;
    fn add(self, rhs: &LaurentExpr) -> LaurentExpr {
        self.check_arity(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Neg for &LaurentExpr {
    type Output = LaurentExpr;
    fn neg(self) -> LaurentExpr {
        LaurentExpr {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Sub for &LaurentExpr {
    type Output = LaurentExpr;
    fn sub(self, rhs: &LaurentExpr) -> LaurentExpr {
        self + &(-rhs)
    }
}

impl Mul for &LaurentExpr {
    type Output = LaurentExpr;
    // monomials multiply by adding exponents
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &LaurentExpr) -> LaurentExpr {
        self.check_arity(rhs);
        let mut out = LaurentExpr::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, n: usize, e: &[i64]) -> Result<bool, fmt::Error> {
    let mut wrote = false;
    for (slot, &p) in e.iter().enumerate() {
        if p == 0 {
            continue;
        }
        let (name, idx) = if slot < n { ('x', slot + 1) } else { ('y', slot - n + 1) };
        if p == 1 {
            write!(f, "{name}{idx}")?;
        } else {
            write!(f, "{name}{idx}^{p}")?;
        }
        wrote = true;
    }
    Ok(wrote)
}

/// Canonical text: the numerator of the normal form with terms in
/// descending lexicographic order of `(x_1..x_n, y_1..y_n)`, over the
/// monomial denominator, e.g. `(x2^2 + y1)/x1` or `(x2^2 + x1y1y2 + y1)/(x1x2)`.
impl fmt::Display for LaurentExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let (num, d) = self.normal_form();
        let has_den = d.iter().any(|&v| v > 0);
        let wrap = has_den && num.len() > 1;
        if wrap {
            f.write_str("(")?;
        }
        for (idx, (e, c)) in num.terms.iter().rev().enumerate() {
            let magnitude = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let is_constant = e.iter().all(|&v| v == 0);
            if !magnitude.is_one() || is_constant {
                write!(f, "{magnitude}")?;
            }
            write_monomial(f, self.n, e)?;
        }
        if wrap {
            f.write_str(")")?;
        }
        if has_den {
            let mut den = d.clone();
            den.extend(std::iter::repeat_n(0, self.n));
            let factors = d.iter().filter(|&&v| v > 0).count();
            f.write_str("/")?;
            if factors > 1 {
                f.write_str("(")?;
            }
            write_monomial(f, self.n, &den)?;
            if factors > 1 {
                f.write_str(")")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentExpr({self})")
    }
}
