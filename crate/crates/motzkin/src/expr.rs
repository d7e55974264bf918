//! A small expression language over the generators.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := atom postfix*
//! postfix := "'" | '^' int
//! atom    := rational | ident | '(' expr ')' | 'E' '(' expr ')'
//! ident   := ('id' | 't' | 'l' | 'r' | 'p' | 'g') int?
//! ```
//!
//! Indices are one-based. Scalars have width 0, generator and `g` atoms
//! width `k`, and `E(x)` one less than `x`; operands of different widths are
//! combined after embedding the narrower one.

use std::collections::BTreeMap;
use std::fmt;

use motzkin_core::algebra::{AlgebraElement, Generator};
use motzkin_core::fock::subproduct_projection;
use motzkin_core::jones_wenzl::JwCache;
use motzkin_core::linalg::{c, identity, Mat};
use motzkin_core::representation::{rep_conditional_expectation, LinearOperator, MotzkinPair, RepGenerators};
use motzkin_core::scalar::{format_scalar, to_f64};
use motzkin_core::{Error, Lambda, Limits, Scalar};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Scalar(Scalar),
    Id,
    Gen(Generator),
    /// `g<j>`; `None` means the ambient width.
    Jw(Option<usize>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Adjoint(Box<Expr>),
    Pow(Box<Expr>, u32),
    E(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e.to_string())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    width: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|ch: char| ch.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<(usize, &'a str)> {
        let start = self.pos;
        let len = self.src[start..].bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some((start, &self.src[start..start + len]))
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let at = self.pos;
        match self.digits() {
            Some((_, s)) => s.parse().or_else(|_| self.err(at, format!("integer {s} is too large"))),
            None => self.err(at, "expected an integer"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let mut x = self.atom()?;
        loop {
            if self.eat('\'') {
                x = Expr::Adjoint(Box::new(x));
            } else if self.eat('^') {
                let at = self.pos;
                let m = self.int()?;
                let m = u32::try_from(m).or_else(|_| self.err(at, "exponent too large"))?;
                x = Expr::Pow(Box::new(x), m);
            } else {
                return Ok(x);
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = match self.peek() {
            None => return self.err(self.src.len(), "unexpected end of input"),
            Some(_) => self.pos,
        };
        if self.eat('(') {
            let inner = self.expr()?;
            if !self.eat(')') {
                return self.err(self.pos, "expected ')'");
            }
            return Ok(inner);
        }
        if let Some((_, num)) = self.digits() {
            let num = num.to_owned();
            let value = if self.src[self.pos..].starts_with('/') {
                self.pos += 1;
                let den_at = self.pos;
                let Some((_, den)) = self.digits() else { return self.err(den_at, "expected a denominator") };
                if den.bytes().all(|b| b == b'0') {
                    return self.err(den_at, "zero denominator");
                }
                motzkin_core::scalar::parse_scalar(&format!("{num}/{den}"))
            } else {
                motzkin_core::scalar::parse_scalar(&num)
            };
            return value.map(Expr::Scalar).or_else(|e| self.err(at, e.to_string()));
        }
        let name_len = self.src[at..].bytes().take_while(u8::is_ascii_alphabetic).count();
        if name_len == 0 {
            let ch = self.src[at..].chars().next().unwrap();
            return self.err(at, format!("unexpected character {ch:?}"));
        }
        let name = &self.src[at..at + name_len];
        self.pos += name_len;
        if name == "E" {
            if !self.eat('(') {
                return self.err(self.pos, "expected '(' after E");
            }
            let inner = self.expr()?;
            if !self.eat(')') {
                return self.err(self.pos, "expected ')'");
            }
            return Ok(Expr::E(Box::new(inner)));
        }
        let index = match self.digits() {
            Some((p, s)) => Some(s.parse::<usize>().or_else(|_| self.err(p, "index too large"))?),
            None => None,
        };
        let k = self.width;
        let check = |max: usize, i: usize| -> Result<usize, ParseError> {
            if i == 0 || i > max {
                self.err(at, format!("index {i} of {name} is out of range for width {k}"))
            } else {
                Ok(i)
            }
        };
        match (name, index) {
            ("id", None) => Ok(Expr::Id),
            ("g", None) => Ok(Expr::Jw(None)),
            ("g", Some(j)) if j <= k => Ok(Expr::Jw(Some(j))),
            ("g", Some(j)) => self.err(at, format!("g{j} does not fit in width {k}")),
            ("t", Some(i)) => Ok(Expr::Gen(Generator::T(check(k.saturating_sub(1), i)?))),
            ("l", Some(i)) => Ok(Expr::Gen(Generator::L(check(k.saturating_sub(1), i)?))),
            ("r", Some(i)) => Ok(Expr::Gen(Generator::R(check(k.saturating_sub(1), i)?))),
            ("p", Some(i)) => Ok(Expr::Gen(Generator::P(check(k, i)?))),
            ("t" | "l" | "r" | "p", None) => self.err(self.pos, format!("{name} needs an index")),
            _ => self.err(at, format!("unknown atom {name:?}")),
        }
    }
}

/// Parses `src` for width `k`, checking every generator index.
pub fn parse_expression(src: &str, k: usize) -> Result<Expr, ParseError> {
    let mut p = Parser { src, pos: 0, width: k };
    let e = p.expr()?;
    if p.peek().is_some() {
        let ch = p.src[p.pos..].chars().next().unwrap();
        return p.err(p.pos, format!("unexpected {ch:?}"));
    }
    Ok(e)
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            _ => 3,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let wrap = self.precedence() < min;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            Expr::Scalar(s) => f.write_str(&format_scalar(s))?,
            Expr::Id => f.write_str("id")?,
            Expr::Gen(g) => write!(f, "{g}")?,
            Expr::Jw(None) => f.write_str("g")?,
            Expr::Jw(Some(j)) => write!(f, "g{j}")?,
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write(f, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                b.write(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.write(f, 2)?;
                f.write_str("*")?;
                b.write(f, 3)?;
            }
            Expr::Adjoint(x) => {
                x.write(f, 3)?;
                f.write_str("'")?;
            }
            Expr::Pow(x, m) => {
                x.write(f, 3)?;
                write!(f, "^{m}")?;
            }
            Expr::E(x) => {
                f.write_str("E(")?;
                x.write(f, 1)?;
                f.write_str(")")?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Canonical form: `parse_expression(&e.to_string(), k) == e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 1)
    }
}

/// Exact evaluation in `M_k(λ⁻¹)`.
pub struct AbstractEvaluator {
    k: usize,
    lambda: Lambda,
    limits: Limits,
    jw: JwCache,
}

impl AbstractEvaluator {
    pub fn new(k: usize, lambda: Lambda, limits: Limits) -> Self {
        let jw = JwCache::with_limits(lambda.clone(), limits);
        AbstractEvaluator { k, lambda, limits, jw }
    }

    fn widen(&self, a: AlgebraElement, b: AlgebraElement) -> motzkin_core::Result<(AlgebraElement, AlgebraElement)> {
        let w = a.width().max(b.width());
        Ok((a.embed_to(w)?, b.embed_to(w)?))
    }

    pub fn eval(&mut self, e: &Expr) -> motzkin_core::Result<AlgebraElement> {
        let lam = self.lambda.clone();
        Ok(match e {
            Expr::Scalar(s) => AlgebraElement::identity(0, lam).scale(s),
            Expr::Id => AlgebraElement::identity(self.k, lam),
            Expr::Gen(g) => AlgebraElement::generator(self.k, *g, lam)?,
            Expr::Jw(j) => self.jw.get(j.unwrap_or(self.k))?.embed_to(self.k)?,
            Expr::Add(a, b) => {
                let (x, y) = {
                    let (x, y) = (self.eval(a)?, self.eval(b)?);
                    self.widen(x, y)
                }?;
                x.add(&y)?
            }
            Expr::Sub(a, b) => {
                let (x, y) = {
                    let (x, y) = (self.eval(a)?, self.eval(b)?);
                    self.widen(x, y)
                }?;
                x.sub(&y)?
            }
            Expr::Mul(a, b) => {
                let (x, y) = {
                    let (x, y) = (self.eval(a)?, self.eval(b)?);
                    self.widen(x, y)
                }?;
                x.multiply(&y, &self.limits)?
            }
            Expr::Adjoint(x) => self.eval(x)?.adjoint(),
            Expr::Pow(x, m) => {
                let base = self.eval(x)?;
                let mut acc = AlgebraElement::identity(base.width(), lam);
                for _ in 0..*m {
                    acc = acc.multiply(&base, &self.limits)?;
                }
                acc
            }
            Expr::E(x) => self.eval(x)?.conditional_expectation()?,
        })
    }
}

/// Numeric evaluation through `π_{v_A,v}`; values are `(width, matrix)`.
pub struct RepEvaluator<'a> {
    k: usize,
    pair: &'a MotzkinPair,
    limits: Limits,
    gens: Option<RepGenerators>,
    projections: BTreeMap<usize, Mat>,
}

impl<'a> RepEvaluator<'a> {
    pub fn new(k: usize, pair: &'a MotzkinPair, limits: Limits) -> Self {
        RepEvaluator { k, pair, limits, gens: None, projections: BTreeMap::new() }
    }

    fn embed(&self, (w, m): (usize, Mat), target: usize) -> (usize, Mat) {
        if w == target {
            return (w, m);
        }
        let extra = self.pair.n().pow((target - w) as u32);
        (target, m.kronecker(&identity(extra)))
    }

    fn widen(&self, a: (usize, Mat), b: (usize, Mat)) -> ((usize, Mat), (usize, Mat)) {
        let w = a.0.max(b.0);
        (self.embed(a, w), self.embed(b, w))
    }

    fn generators(&mut self) -> motzkin_core::Result<&RepGenerators> {
        if self.gens.is_none() {
            self.gens = Some(RepGenerators::new(self.pair, self.k, &self.limits)?);
        }
        Ok(self.gens.as_ref().unwrap())
    }

    pub fn eval(&mut self, e: &Expr) -> motzkin_core::Result<(usize, Mat)> {
        Ok(match e {
            Expr::Scalar(s) => (0, identity(1) * c(to_f64(s))),
            Expr::Id => {
                let dim = self.generators()?.dim();
                (self.k, identity(dim))
            }
            Expr::Gen(g) => (self.k, self.generators()?.get(*g)?.clone()),
            Expr::Jw(j) => {
                let j = j.unwrap_or(self.k);
                if !self.projections.contains_key(&j) {
                    let (g, _) = subproduct_projection(self.pair, j, &self.limits)?;
                    self.projections.insert(j, g.matrix);
                }
                self.embed((j, self.projections[&j].clone()), self.k)
            }
            Expr::Add(a, b) => {
                let (x, y) = {
                    let (x, y) = (self.eval(a)?, self.eval(b)?);
                    self.widen(x, y)
                };
                (x.0, x.1 + y.1)
            }
            Expr::Sub(a, b) => {
                let (x, y) = {
                    let (x, y) = (self.eval(a)?, self.eval(b)?);
                    self.widen(x, y)
                };
                (x.0, x.1 - y.1)
            }
            Expr::Mul(a, b) => {
                let (x, y) = {
                    let (x, y) = (self.eval(a)?, self.eval(b)?);
                    self.widen(x, y)
                };
                (x.0, x.1 * y.1)
            }
            Expr::Adjoint(x) => {
                let (w, m) = self.eval(x)?;
                (w, m.adjoint())
            }
            Expr::Pow(x, m) => {
                let (w, base) = self.eval(x)?;
                let mut acc = identity(base.nrows());
                for _ in 0..*m {
                    acc *= &base;
                }
                (w, acc)
            }
            Expr::E(x) => {
                let (w, m) = self.eval(x)?;
                let op = LinearOperator::tensor(self.pair.n(), w, m);
                let r = rep_conditional_expectation(self.pair, &op, &self.limits)?;
                (w.saturating_sub(1), r.matrix)
            }
        })
    }
}

/// `true` when every coefficient is zero; the empty sum counts as zero.
pub fn is_exact_zero(x: &AlgebraElement) -> bool {
    x.terms().all(|(_, s)| s.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use motzkin_core::scalar::ratio;

    fn p(src: &str, k: usize) -> Expr {
        parse_expression(src, k).unwrap()
    }

    #[test]
    fn precedence() {
        let e = p("t1*t2*t1 - 1/9*t1", 3);
        assert!(matches!(e, Expr::Sub(..)));
        assert_eq!(e.to_string(), "t1*t2*t1 - 1/9*t1");
        assert_eq!(p("l1'", 2), Expr::Adjoint(Box::new(Expr::Gen(Generator::L(1)))));
        assert_eq!(p("t1^2'", 2).to_string(), "t1^2'");
        assert_eq!(p("(t1*t1)^2", 2).to_string(), "(t1*t1)^2");
        assert_eq!(p("t1 - (p1 - p2)", 2).to_string(), "t1 - (p1 - p2)");
        assert_eq!(p(" E( g ) ^2", 2).to_string(), "E(g)^2");
    }

    #[test]
    fn errors_have_offsets() {
        let e = parse_expression("t1 + x2", 2).unwrap_err();
        assert_eq!(e.offset, 5);
        let e = parse_expression("t3", 3).unwrap_err();
        assert_eq!(e.offset, 0);
        let e = parse_expression("t1 * (p1", 2).unwrap_err();
        assert_eq!(e.offset, 8);
        assert!(parse_expression("1/0", 2).is_err());
        assert!(parse_expression("t1 t1", 2).is_err());
        assert!(parse_expression("", 2).is_err());
        assert!(parse_expression("p", 2).is_err());
    }

    #[test]
    fn abstract_zeros() {
        let lam = Lambda::from_ratio(1, 3).unwrap();
        for (src, k) in
            [("t1*t2*t1 - 1/9*t1", 3), ("t1*l1*t1 - 1/3*t1", 2), ("g2*p1", 2), ("t1*t1 - t1", 2), ("l1' - r1", 2)]
        {
            let mut ev = AbstractEvaluator::new(k, lam.clone(), Limits::default());
            let x = ev.eval(&p(src, k)).unwrap();
            assert!(x.is_zero(), "{src}: {x:?}");
        }
    }

    #[test]
    fn expectation_of_g2() {
        let lam = Lambda::from_ratio(1, 4).unwrap();
        let mut ev = AbstractEvaluator::new(2, lam.clone(), Limits::default());
        let x = ev.eval(&p("E(g2)", 2)).unwrap();
        assert_eq!(x.width(), 1);
        let mut e1 = AbstractEvaluator::new(1, lam.clone(), Limits::default());
        let g1 = e1.eval(&p("g1", 1)).unwrap();
        // 1/φ(2) with φ(2) = 3/2 at λ = 1/4
        assert_eq!(x, g1.scale(&ratio(2, 3)));
        // mixed widths embed: E(g2) lives in M_1, p2 in M_2
        let y = ev.eval(&p("E(g2) - 2/3*g1", 2)).unwrap();
        assert!(y.is_zero());
    }
}
