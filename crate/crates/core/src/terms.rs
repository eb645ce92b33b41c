//! The input model: `f` as an exact finite sum of signed monomials.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};

/// `coeff * x1^a * x2^b`, where either power may be taken of `|x_i|`.
///
/// Absolute-value flags are only meaningful on odd exponents; the canonical
/// form clears them on even exponents, where `|x|^a == x^a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialTerm {
    pub coeff: Rational,
    pub a: u32,
    pub b: u32,
    pub abs1: bool,
    pub abs2: bool,
}

impl MonomialTerm {
    pub fn new(coeff: Rational, a: u32, b: u32) -> Self {
        MonomialTerm { coeff, a, b, abs1: false, abs2: false }
    }

    pub fn with_abs(coeff: Rational, a: u32, b: u32, abs1: bool, abs2: bool) -> Self {
        MonomialTerm { coeff, a, b, abs1, abs2 }.canonical()
    }

    fn canonical(mut self) -> Self {
        if self.a % 2 == 0 {
            self.abs1 = false;
        }
        if self.b % 2 == 0 {
            self.abs2 = false;
        }
        self
    }

    fn key(&self) -> (u32, u32, bool, bool) {
        (self.a, self.b, self.abs1, self.abs2)
    }

    pub fn exponents(&self) -> (u32, u32) {
        (self.a, self.b)
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let c = rational::to_f64(&self.coeff);
        c * power(x[0], self.a, self.abs1) * power(x[1], self.b, self.abs2)
    }

    pub fn eval_exact(&self, x: &[Rational; 2]) -> Rational {
        let p1 = rational::pow_u32(&if self.abs1 { x[0].abs() } else { x[0].clone() }, self.a);
        let p2 = rational::pow_u32(&if self.abs2 { x[1].abs() } else { x[1].clone() }, self.b);
        &self.coeff * p1 * p2
    }
}

fn power(x: f64, n: u32, abs: bool) -> f64 {
    let base = if abs { libm::fabs(x) } else { x };
    let mut acc = 1.0;
    let mut b = base;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermsError {
    #[error("f(0,0) must vanish: constant term present")]
    ConstantTerm,
    #[error("empty sum: every coefficient cancelled or no terms were given")]
    Empty,
    #[error("zero denominator in coefficient")]
    ZeroDenominator,
}

/// A canonical finite sum of monomial terms.
///
/// Terms are sorted by `(a, b, abs1, abs2)` with pairwise-distinct keys and
/// nonzero coefficients, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TermSum {
    terms: Vec<MonomialTerm>,
}

impl TermSum {
    /// Canonicalizes `terms`, merging duplicate keys and dropping zeros.
    pub fn new(terms: impl IntoIterator<Item = MonomialTerm>) -> Result<Self, TermsError> {
        let sum = Self::collect(terms);
        if sum.terms.is_empty() {
            return Err(TermsError::Empty);
        }
        if sum.terms.iter().any(|t| t.a == 0 && t.b == 0) {
            return Err(TermsError::ConstantTerm);
        }
        Ok(sum)
    }

    /// Canonical merge without the input checks. Used for derived sums
    /// (quadrant restrictions) which may legitimately be zero.
    fn collect(terms: impl IntoIterator<Item = MonomialTerm>) -> Self {
        let mut acc: BTreeMap<(u32, u32, bool, bool), Rational> = BTreeMap::new();
        for t in terms {
            let t = t.canonical();
            *acc.entry(t.key()).or_insert_with(Rational::zero) += t.coeff;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((a, b, abs1, abs2), coeff)| MonomialTerm { coeff, a, b, abs1, abs2 })
            .collect();
        TermSum { terms }
    }

    /// Convenience constructor for plain monomials `(coeff, a, b)`.
    pub fn from_plain(terms: &[(i64, u32, u32)]) -> Result<Self, TermsError> {
        Self::new(terms.iter().map(|&(c, a, b)| MonomialTerm::new(rational::int(c), a, b)))
    }

    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Only derived sums (see [`TermSum::restrict_quadrant`]) can be zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Distinct exponent pairs, sorted.
    pub fn support(&self) -> Vec<(u32, u32)> {
        let mut s: Vec<(u32, u32)> = self.terms.iter().map(MonomialTerm::exponents).collect();
        s.dedup();
        s
    }

    pub fn sum_abs_coeffs(&self) -> Rational {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.a.max(t.b)).max().unwrap_or(0)
    }

    /// `f(x)` in double precision.
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn eval_exact(&self, x: &[Rational; 2]) -> Rational {
        self.terms.iter().map(|t| t.eval_exact(x)).sum()
    }

    /// `f(s1*u1, s2*u2)` as a plain polynomial in `u1, u2 > 0`.
    pub fn restrict_quadrant(&self, q: QuadrantSign) -> TermSum {
        Self::collect(self.terms.iter().map(|t| {
            let mut coeff = t.coeff.clone();
            if !t.abs1 && q.s1 < 0 && t.a % 2 == 1 {
                coeff = -coeff;
            }
            if !t.abs2 && q.s2 < 0 && t.b % 2 == 1 {
                coeff = -coeff;
            }
            MonomialTerm::new(coeff, t.a, t.b)
        }))
    }

    /// `f(x2, x1)`.
    pub fn swap_variables(&self) -> TermSum {
        Self::collect(
            self.terms
                .iter()
                .map(|t| MonomialTerm { coeff: t.coeff.clone(), a: t.b, b: t.a, abs1: t.abs2, abs2: t.abs1 }),
        )
    }

    /// `c * f` for a nonzero rational `c`.
    pub fn scale(&self, c: &Rational) -> TermSum {
        assert!(!c.is_zero(), "scaling by zero");
        Self::collect(self.terms.iter().map(|t| MonomialTerm { coeff: &t.coeff * c, ..t.clone() }))
    }

    /// Sub-sum over the given exponent pairs.
    pub fn select(&self, support: &[(u32, u32)]) -> TermSum {
        Self::collect(self.terms.iter().filter(|t| support.contains(&t.exponents())).cloned())
    }

    /// Coefficients as a polynomial in `x2` at a fixed `x1`, for a sum with no
    /// absolute-value flags (a quadrant restriction). Index `k` holds the
    /// coefficient of `x2^k`.
    pub fn coeffs_in_x2(&self, x1: f64) -> Vec<f64> {
        let deg = self.terms.iter().map(|t| t.b).max().unwrap_or(0) as usize;
        let mut c = alloc::vec![0.0; deg + 1];
        for t in &self.terms {
            c[t.b as usize] += rational::to_f64(&t.coeff) * power(x1, t.a, t.abs1);
        }
        c
    }

    /// Same as [`TermSum::coeffs_in_x2`] with the roles swapped.
    pub fn coeffs_in_x1(&self, x2: f64) -> Vec<f64> {
        let deg = self.terms.iter().map(|t| t.a).max().unwrap_or(0) as usize;
        let mut c = alloc::vec![0.0; deg + 1];
        for t in &self.terms {
            c[t.a as usize] += rational::to_f64(&t.coeff) * power(x2, t.b, t.abs2);
        }
        c
    }
}

impl fmt::Display for TermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let negative = t.coeff.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = t.coeff.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() {
                factors.push(rational::format(&mag));
            }
            for (name, exp, abs) in [("x1", t.a, t.abs1), ("x2", t.b, t.abs2)] {
                if exp == 0 {
                    continue;
                }
                let base = if abs { alloc::format!("|{name}|") } else { String::from(name) };
                factors.push(if exp == 1 { base } else { alloc::format!("{base}^{exp}") });
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

/// Sign pattern `(s1, s2)` selecting an open quadrant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadrantSign {
    pub s1: i8,
    pub s2: i8,
}

impl QuadrantSign {
    pub const ALL: [QuadrantSign; 4] = [
        QuadrantSign { s1: 1, s2: 1 },
        QuadrantSign { s1: -1, s2: 1 },
        QuadrantSign { s1: -1, s2: -1 },
        QuadrantSign { s1: 1, s2: -1 },
    ];

    pub fn new(s1: i8, s2: i8) -> Self {
        assert!(s1.abs() == 1 && s2.abs() == 1, "quadrant signs must be +1 or -1");
        QuadrantSign { s1, s2 }
    }

    pub fn swapped(self) -> Self {
        QuadrantSign { s1: self.s2, s2: self.s1 }
    }

    pub fn apply(self, u: [f64; 2]) -> [f64; 2] {
        [f64::from(self.s1) * u[0], f64::from(self.s2) * u[1]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("malformed number")]
    BadNumber,
    #[error("exponent must be a nonnegative integer")]
    BadExponent,
    #[error("product of odd plain and odd absolute powers of the same variable is not a monomial")]
    MixedAbs,
    #[error(transparent)]
    Terms(#[from] TermsError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub kind: ParseErrorKind,
}

/// Parses sums such as `"x1^2 - 2*x1*x2 + 1/3*|x2|^3"`.
///
/// Each term is a `*`-separated product of rational literals (`3`, `1/2`,
/// `0.25`), `x1`/`x2` powers and `|x1|`/`|x2|` powers. Repeated factors
/// multiply; duplicate monomials are merged.
pub fn parse_terms(text: &str) -> Result<TermSum, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let terms = p.sum()?;
    TermSum::new(terms).map_err(|e| ParseError { position: 0, kind: e.into() })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Default, Clone, Copy)]
struct VarPower {
    plain: u32,
    abs: u32,
}

impl VarPower {
    fn resolve(self) -> Option<(u32, bool)> {
        match (self.plain % 2, self.abs % 2) {
            (_, 0) => Some((self.plain + self.abs, false)),
            (0, 1) => Some((self.plain + self.abs, true)),
            _ => None,
        }
    }
}

impl Parser<'_> {
    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos, kind })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn unexpected<T>(&mut self) -> Result<T, ParseError> {
        match self.peek() {
            None => self.err(ParseErrorKind::UnexpectedEnd),
            Some(_) => {
                let c = core::str::from_utf8(&self.src[self.pos..])
                    .ok()
                    .and_then(|s| s.chars().next())
                    .unwrap_or('\u{fffd}');
                self.err(ParseErrorKind::UnexpectedChar(c))
            }
        }
    }

    fn sum(&mut self) -> Result<Vec<MonomialTerm>, ParseError> {
        let mut terms = Vec::new();
        let mut negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let mut t = self.term()?;
            if negative {
                t.coeff = -t.coeff;
            }
            terms.push(t);
            match self.peek() {
                None => break,
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                Some(_) => return self.unexpected(),
            }
            self.pos += 1;
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<MonomialTerm, ParseError> {
        let mut coeff = Rational::one();
        let mut vars = [VarPower::default(); 2];
        let start = self.pos;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == b'.' => coeff *= self.number()?,
                Some(b'x') => {
                    let (v, e) = self.var_power(false)?;
                    vars[v].plain += e;
                }
                Some(b'|') => {
                    let (v, e) = self.var_power(true)?;
                    vars[v].abs += e;
                }
                _ => return self.unexpected(),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let (a, abs1) = vars[0].resolve().ok_or(ParseError { position: start, kind: ParseErrorKind::MixedAbs })?;
        let (b, abs2) = vars[1].resolve().ok_or(ParseError { position: start, kind: ParseErrorKind::MixedAbs })?;
        Ok(MonomialTerm::with_abs(coeff, a, b, abs1, abs2))
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn number(&mut self) -> Result<Rational, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let num = String::from(self.digits());
        let mut text = num;
        let save = self.pos;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let den = String::from(self.digits());
            if den.is_empty() {
                return self.err(ParseErrorKind::BadNumber);
            }
            text.push('/');
            text.push_str(&den);
        } else {
            self.pos = save;
        }
        match rational::parse(&text) {
            Some(q) => Ok(q),
            None if text.ends_with("/0") || text.contains("/0/") => Err(ParseError {
                position: start,
                kind: ParseErrorKind::Terms(TermsError::ZeroDenominator),
            }),
            None => Err(ParseError { position: start, kind: ParseErrorKind::BadNumber }),
        }
    }

    fn var_power(&mut self, abs: bool) -> Result<(usize, u32), ParseError> {
        self.skip_ws();
        if abs {
            self.pos += 1;
            self.skip_ws();
        }
        if self.src.get(self.pos) != Some(&b'x') {
            return self.unexpected();
        }
        self.pos += 1;
        let v = match self.src.get(self.pos) {
            Some(b'1') => 0,
            Some(b'2') => 1,
            _ => return self.unexpected(),
        };
        self.pos += 1;
        if abs {
            if self.peek() != Some(b'|') {
                return self.unexpected();
            }
            self.pos += 1;
        }
        let mut exp = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
            exp = match digits.parse::<u32>() {
                Ok(e) => e,
                Err(_) => {
                    self.pos = start;
                    return self.err(ParseErrorKind::BadExponent);
                }
            };
        }
        Ok((v, exp))
    }
}
