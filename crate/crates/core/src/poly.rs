//! Trivariate Laurent polynomials in `q` (quantum), `t` (homological) and
//! `z` (annular) with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Q,
    T,
    Z,
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Var> {
        match s {
            "q" => Ok(Var::Q),
            "t" => Ok(Var::T),
            "z" => Ok(Var::Z),
            _ => Err(Error::Input(format!("unknown variable {s:?}"))),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::Q => "q",
            Var::T => "t",
            Var::Z => "z",
        })
    }
}

/// Exponent triple. Field order gives the canonical term order: ascending
/// `t`, then `q`, then `z`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub t: i32,
    pub q: i32,
    pub z: i32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { t: 0, q: 0, z: 0 };

    pub fn new(q: i32, t: i32, z: i32) -> Self {
        Monomial { t, q, z }
    }

    pub fn exponent(&self, v: Var) -> i32 {
        match v {
            Var::Q => self.q,
            Var::T => self.t,
            Var::Z => self.z,
        }
    }

    fn with_exponent(mut self, v: Var, e: i32) -> Self {
        match v {
            Var::Q => self.q = e,
            Var::T => self.t = e,
            Var::Z => self.z = e,
        }
        self
    }

    fn times(self, other: Monomial) -> Monomial {
        Monomial {
            t: self.t + other.t,
            q: self.q + other.q,
            z: self.z + other.z,
        }
    }

    /// Sort key of the `paper` style: terms free of a variable come before
    /// terms containing it, then ascending exponent; `t` is compared first.
    fn paper_key(&self) -> (bool, i32, bool, i32, bool, i32) {
        (self.t != 0, self.t, self.q != 0, self.q, self.z != 0, self.z)
    }

    /// Positive- and negative-power factors, in `q`, `t`, `z` order.
    fn factors(&self) -> (Vec<String>, Vec<String>) {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (v, e) in [(Var::Q, self.q), (Var::T, self.t), (Var::Z, self.z)] {
            let target = if e > 0 { &mut num } else { &mut den };
            match e.abs() {
                0 => {}
                1 => target.push(v.to_string()),
                a => target.push(format!("{v}^{a}")),
            }
        }
        (num, den)
    }

    /// Renders `coeff * self` with negative powers as a reciprocal, e.g.
    /// `1/(q^9 t^3)`, `3 q z`, `(q t)/z`. The sign is not included.
    pub(crate) fn render_with(&self, coeff_abs: &Rational) -> String {
        self.render_prefixed(coeff_abs, None)
    }

    /// Same as [`Monomial::render_with`] with an extra leading symbol in the
    /// numerator (used for `V[n]` terms).
    pub(crate) fn render_prefixed(&self, coeff_abs: &Rational, symbol: Option<&str>) -> String {
        let (mut num, den) = self.factors();
        if let Some(sym) = symbol {
            num.insert(0, sym.to_string());
        }
        let mut den = den;
        if !coeff_abs.is_integer() {
            // put the coefficient's denominator in front of the variables
            den.insert(0, coeff_abs.denom().to_string());
        }
        let c_num = coeff_abs.numer().to_string();
        if c_num != "1" || num.is_empty() {
            num.insert(0, c_num);
        }
        if den.is_empty() {
            return num.join(" ");
        }
        let n = if num.len() > 1 {
            format!("({})", num.join(" "))
        } else {
            num.join(" ")
        };
        let d = if den.len() > 1 {
            format!("({})", den.join(" "))
        } else {
            den.join(" ")
        };
        format!("{n}/{d}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    /// Terms ascending by `(t, q, z)`, joined by `" + "` / `" - "`.
    Text,
    /// Compact form with no spaces around the signs, ordered with
    /// variable-free terms first (matches the familiar computer-algebra output,
    /// e.g. `1/q^3+1/q+1/(q^9 t^3)+1/(q^5 t^2)`).
    Paper,
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly3 {
    terms: BTreeMap<Monomial, Rational>,
}

impl LaurentPoly3 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rational::one(), Monomial::ONE)
    }

    pub fn monomial(c: Rational, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// Monomial `q^q t^t z^z` with coefficient 1.
    pub fn qtz(q: i32, t: i32, z: i32) -> Self {
        Self::monomial(Rational::one(), Monomial::new(q, t, z))
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Rational::one(), Monomial::ONE.with_exponent(v, 1))
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(Rational::from_integer(c), Monomial::ONE)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Sets the exponent of `v` to zero in every term, merging coefficients.
    pub fn forget_variable(&self, v: Var) -> LaurentPoly3 {
        let mut out = LaurentPoly3::zero();
        for (m, c) in &self.terms {
            out.add_term(m.with_exponent(v, 0), c.clone());
        }
        out
    }

    /// Substitutes a nonzero rational value for `v`.
    pub fn eval_var(&self, v: Var, value: &Rational) -> LaurentPoly3 {
        assert!(!value.is_zero(), "Laurent evaluation at zero");
        let mut out = LaurentPoly3::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            out.add_term(m.with_exponent(v, 0), c * &value.pow(e));
        }
        out
    }

    /// Multiplies by the monomial `m`.
    pub fn shift(&self, m: Monomial) -> LaurentPoly3 {
        LaurentPoly3 {
            terms: self.terms.iter().map(|(k, c)| (k.times(m), c.clone())).collect(),
        }
    }

    pub fn min_exponent(&self, v: Var) -> Option<i32> {
        self.terms.keys().map(|m| m.exponent(v)).min()
    }

    pub fn max_exponent(&self, v: Var) -> Option<i32> {
        self.terms.keys().map(|m| m.exponent(v)).max()
    }

    /// Sum of all coefficients (the polynomial evaluated at 1,1,1).
    pub fn total(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, c| acc + c)
    }

    /// True when every coefficient is a nonnegative integer.
    pub fn is_nonnegative_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer() && !c.is_negative())
    }

    pub fn format(&self, style: Style) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        if style == Style::Paper {
            terms.sort_by_key(|(m, _)| m.paper_key());
        }
        let (plus, minus) = match style {
            Style::Text => (" + ", " - "),
            Style::Paper => ("+", "-"),
        };
        let mut out = String::new();
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            let body = m.render_with(&c.abs());
            match (idx, c.is_negative()) {
                (0, false) => {}
                (0, true) => out.push('-'),
                (_, false) => out.push_str(plus),
                (_, true) => out.push_str(minus),
            }
            out.push_str(&body);
        }
        out
    }

    /// Parses either rendering style, plus the usual variants found in
    /// hand-written expressions (`*` as multiplication, explicit parentheses
    /// around single factors).
    pub fn parse(s: &str) -> Result<LaurentPoly3> {
        parse::parse_poly(s)
    }
}

impl fmt::Display for LaurentPoly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(Style::Text))
    }
}

impl fmt::Debug for LaurentPoly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(Style::Text))
    }
}

impl FromStr for LaurentPoly3 {
    type Err = Error;
    fn from_str(s: &str) -> Result<LaurentPoly3> {
        LaurentPoly3::parse(s)
    }
}

impl<'a> Add<&'a LaurentPoly3> for &'a LaurentPoly3 {
    type Output = LaurentPoly3;
    fn add(self, rhs: &'a LaurentPoly3) -> LaurentPoly3 {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Add for LaurentPoly3 {
    type Output = LaurentPoly3;
    fn add(self, rhs: LaurentPoly3) -> LaurentPoly3 {
        &self + &rhs
    }
}

impl<'a> Sub<&'a LaurentPoly3> for &'a LaurentPoly3 {
    type Output = LaurentPoly3;
    fn sub(self, rhs: &'a LaurentPoly3) -> LaurentPoly3 {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Sub for LaurentPoly3 {
    type Output = LaurentPoly3;
    fn sub(self, rhs: LaurentPoly3) -> LaurentPoly3 {
        &self - &rhs
    }
}

impl Neg for LaurentPoly3 {
    type Output = LaurentPoly3;
    fn neg(self) -> LaurentPoly3 {
        LaurentPoly3 {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a LaurentPoly3> for &'a LaurentPoly3 {
    type Output = LaurentPoly3;
    fn mul(self, rhs: &'a LaurentPoly3) -> LaurentPoly3 {
        let mut out = LaurentPoly3::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.times(*m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly3 {
    type Output = LaurentPoly3;
    fn mul(self, rhs: LaurentPoly3) -> LaurentPoly3 {
        &self * &rhs
    }
}

mod parse {
    use super::*;

    pub(super) fn parse_poly(s: &str) -> Result<LaurentPoly3> {
        let s: String = s.chars().filter(|c| !c.is_whitespace() || *c == ' ').collect();
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut out = LaurentPoly3::zero();
        for (neg, term) in split_terms(s)? {
            let (c, m) = parse_term(term.trim())?;
            out.add_term(m, if neg { -c } else { c });
        }
        Ok(out)
    }

    /// Splits at top-level `+`/`-` signs (outside parentheses and not part of
    /// an exponent).
    fn split_terms(s: &str) -> Result<Vec<(bool, &str)>> {
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut start = 0usize;
        let mut neg = false;
        let mut prev: Option<u8> = None;
        for (idx, &b) in s.as_bytes().iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 && prev != Some(b'^') => {
                    let chunk = s[start..idx].trim();
                    if !chunk.is_empty() {
                        out.push((neg, chunk));
                    } else if prev.is_some() {
                        return Err(Error::Parse(format!("bad sign placement in {s:?}")));
                    }
                    neg = b == b'-';
                    start = idx + 1;
                }
                _ => {}
            }
            if b != b' ' {
                prev = Some(b);
            }
        }
        if depth != 0 {
            return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
        }
        let chunk = s[start..].trim();
        if chunk.is_empty() {
            return Err(Error::Parse(format!("dangling sign in {s:?}")));
        }
        out.push((neg, chunk));
        Ok(out)
    }

    fn parse_term(term: &str) -> Result<(Rational, Monomial)> {
        let (num, den) = match split_top_level_slash(term) {
            Some((n, d)) => (n, Some(d)),
            None => (term, None),
        };
        let (mut c, mut m) = parse_product(strip_parens(num))?;
        if let Some(d) = den {
            let (dc, dm) = parse_product(strip_parens(d))?;
            c = &c / &dc;
            m = Monomial {
                t: m.t - dm.t,
                q: m.q - dm.q,
                z: m.z - dm.z,
            };
        }
        Ok((c, m))
    }

    fn split_top_level_slash(term: &str) -> Option<(&str, &str)> {
        let mut depth = 0;
        for (idx, ch) in term.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 => return Some((&term[..idx], &term[idx + 1..])),
                _ => {}
            }
        }
        None
    }

    fn strip_parens(s: &str) -> &str {
        let s = s.trim();
        if s.starts_with('(') && s.ends_with(')') {
            &s[1..s.len() - 1]
        } else {
            s
        }
    }

    fn parse_product(s: &str) -> Result<(Rational, Monomial)> {
        let mut c = Rational::one();
        let mut m = Monomial::ONE;
        for tok in s.split([' ', '*']).filter(|t| !t.is_empty()) {
            let tok = strip_parens(tok);
            if tok.chars().next().is_some_and(|ch| ch.is_ascii_digit()) {
                c = &c * &tok.parse::<Rational>()?;
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let e: i32 = strip_parens(e)
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?;
                    (n, e)
                }
                None => (tok, 1),
            };
            let v: Var = name
                .parse()
                .map_err(|_| Error::Parse(format!("unknown factor {tok:?}")))?;
            m = m.with_exponent(v, m.exponent(v) + exp);
        }
        Ok((c, m))
    }
}
