//! Exact arithmetic in the Motzkin algebra `M_k(λ⁻¹)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::config::Limits;
use crate::diagram::{close_right, compose, MotzkinDiagram, Point};
use crate::error::{Error, Result};
use crate::scalar::{format_scalar, pow, Lambda, Scalar};

/// The named generators, with one-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Id,
    T(usize),
    L(usize),
    /// `r_i = l_i*`.
    R(usize),
    P(usize),
}

impl Generator {
    fn check(self, k: usize) -> Result<()> {
        let (name, i, max) = match self {
            Generator::Id => return Ok(()),
            Generator::T(i) => ("t", i, k.saturating_sub(1)),
            Generator::L(i) => ("l", i, k.saturating_sub(1)),
            Generator::R(i) => ("r", i, k.saturating_sub(1)),
            Generator::P(i) => ("p", i, k),
        };
        if i == 0 || i > max {
            return Err(Error::IndexOutOfRange { name, index: i, width: k });
        }
        Ok(())
    }

    /// The underlying diagram; `t_i` additionally carries the factor `λ`.
    pub fn diagram(self, k: usize) -> Result<MotzkinDiagram> {
        use Point::{Bottom as B, Top as T};
        self.check(k)?;
        let vertical = |skip: &[usize]| -> Vec<(Point, Point)> {
            (1..=k).filter(|j| !skip.contains(j)).map(|j| (T(j), B(j))).collect()
        };
        let pairs = match self {
            Generator::Id => vertical(&[]),
            Generator::T(i) => {
                let mut v = vertical(&[i, i + 1]);
                v.push((T(i), T(i + 1)));
                v.push((B(i), B(i + 1)));
                v
            }
            Generator::L(i) => {
                let mut v = vertical(&[i, i + 1]);
                v.push((T(i), B(i + 1)));
                v
            }
            Generator::R(i) => {
                let mut v = vertical(&[i, i + 1]);
                v.push((T(i + 1), B(i)));
                v
            }
            Generator::P(i) => vertical(&[i]),
        };
        MotzkinDiagram::from_pairs(k, &pairs)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Id => f.write_str("id"),
            Generator::T(i) => write!(f, "t{i}"),
            Generator::L(i) => write!(f, "l{i}"),
            Generator::R(i) => write!(f, "r{i}"),
            Generator::P(i) => write!(f, "p{i}"),
        }
    }
}

impl core::str::FromStr for Generator {
    type Err = Error;

    /// Accepts `id`, `1`, or a letter among `t l r p` followed by an index.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid generator token {s:?}"));
        if s == "id" || s == "1" {
            return Ok(Generator::Id);
        }
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str();
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let i: usize = rest.parse().map_err(|_| bad())?;
        match head {
            't' => Ok(Generator::T(i)),
            'l' => Ok(Generator::L(i)),
            'r' => Ok(Generator::R(i)),
            'p' => Ok(Generator::P(i)),
            _ => Err(bad()),
        }
    }
}

/// A finite linear combination of diagrams of one width with exact rational
/// coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    width: usize,
    lambda: Lambda,
    terms: BTreeMap<MotzkinDiagram, Scalar>,
}

impl AlgebraElement {
    pub fn zero(width: usize, lambda: Lambda) -> Self {
        AlgebraElement { width, lambda, terms: BTreeMap::new() }
    }

    pub fn identity(width: usize, lambda: Lambda) -> Self {
        Self::from_diagram(MotzkinDiagram::identity(width), lambda)
    }

    pub fn from_diagram(d: MotzkinDiagram, lambda: Lambda) -> Self {
        let width = d.width();
        let mut terms = BTreeMap::new();
        terms.insert(d, Scalar::one());
        AlgebraElement { width, lambda, terms }
    }

    /// Builds an element from `(diagram, coefficient)` pairs, summing repeats.
    pub fn from_terms(
        width: usize,
        lambda: Lambda,
        terms: impl IntoIterator<Item = (MotzkinDiagram, Scalar)>,
    ) -> Result<Self> {
        let mut out = Self::zero(width, lambda);
        for (d, c) in terms {
            if d.width() != width {
                return Err(Error::WidthMismatch { left: width, right: d.width() });
            }
            out.add_term(d, c);
        }
        Ok(out)
    }

    pub fn generator(width: usize, g: Generator, lambda: Lambda) -> Result<Self> {
        let d = g.diagram(width)?;
        let mut x = Self::from_diagram(d, lambda);
        if let Generator::T(_) = g {
            let l = x.lambda.value().clone();
            x = x.scale(&l);
        }
        Ok(x)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MotzkinDiagram, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coeff(&self, d: &MotzkinDiagram) -> Scalar {
        self.terms.get(d).cloned().unwrap_or_else(Scalar::zero)
    }

    fn add_term(&mut self, d: MotzkinDiagram, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(d) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.width != other.width {
            return Err(Error::WidthMismatch { left: self.width, right: other.width });
        }
        if self.lambda != other.lambda {
            return Err(Error::LambdaMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return Self::zero(self.width, self.lambda.clone());
        }
        let terms = self.terms.iter().map(|(d, c)| (d.clone(), c * s)).collect();
        AlgebraElement { width: self.width, lambda: self.lambda.clone(), terms }
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(d, c)| (d.clone(), -c.clone())).collect();
        AlgebraElement { width: self.width, lambda: self.lambda.clone(), terms }
    }

    /// Product with the default resource limits.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.multiply(other, &Limits::default())
    }

    /// Bilinear extension of diagram stacking; `self` goes on top.
    pub fn multiply(&self, other: &Self, limits: &Limits) -> Result<Self> {
        self.compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.width, self.lambda.clone()));
        }
        // Work with integer numerators over a common denominator so the inner
        // loop never normalises a fraction.
        let (xs, dx) = integer_terms(&self.terms);
        let (ys, dy) = integer_terms(&other.terms);
        let mut acc: BTreeMap<(MotzkinDiagram, u32), BigInt> = BTreeMap::new();
        for (d1, c1) in &xs {
            for (d2, c2) in &ys {
                let key = compose(d1, d2);
                let prod = c1 * c2;
                match acc.get_mut(&key) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(key, prod);
                        limits.check_terms(acc.len())?;
                    }
                }
            }
        }
        let denom = Scalar::from_integer(dx * dy);
        let delta = self.lambda.delta();
        let mut out = Self::zero(self.width, self.lambda.clone());
        for ((d, loops), v) in acc {
            if v.is_zero() {
                continue;
            }
            let c = Scalar::from_integer(v) * pow(&delta, loops) / &denom;
            out.add_term(d, c);
        }
        Ok(out)
    }

    /// `x^m`, with `x^0 = 1`.
    pub fn pow(&self, m: u32) -> Result<Self> {
        let mut acc = Self::identity(self.width, self.lambda.clone());
        for _ in 0..m {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The involution: flip every diagram; rational coefficients are real.
    pub fn adjoint(&self) -> Self {
        self.map_diagrams(self.width, MotzkinDiagram::flip)
    }

    /// The automorphism mirroring every diagram left to right.
    pub fn reflect(&self) -> Self {
        self.map_diagrams(self.width, MotzkinDiagram::mirror)
    }

    /// `ι^h`: append `h` vertical strands on the right.
    pub fn embed(&self, h: usize) -> Self {
        self.map_diagrams(self.width + h, |d| d.embed(h))
    }

    /// Embeds into width `target ≥ width`.
    pub fn embed_to(&self, target: usize) -> Result<Self> {
        if target < self.width {
            return Err(Error::WidthMismatch { left: self.width, right: target });
        }
        Ok(self.embed(target - self.width))
    }

    /// Horizontal juxtaposition, `self` on the left.
    pub fn juxtapose(&self, right: &Self) -> Result<Self> {
        if self.lambda != right.lambda {
            return Err(Error::LambdaMismatch);
        }
        let mut out = Self::zero(self.width + right.width, self.lambda.clone());
        for (d1, c1) in &self.terms {
            for (d2, c2) in &right.terms {
                out.add_term(d1.juxtapose(d2), c1 * c2);
            }
        }
        Ok(out)
    }

    /// `E: M_k → M_{k−1}`: close the rightmost strand, evaluate loops and
    /// dead strands, and multiply by `λ`.
    pub fn conditional_expectation(&self) -> Result<Self> {
        if self.width == 0 {
            return Err(Error::Domain("conditional expectation needs width ≥ 1".into()));
        }
        let delta = self.lambda.delta();
        let lambda = self.lambda.value();
        let mut out = Self::zero(self.width - 1, self.lambda.clone());
        for (d, c) in &self.terms {
            let (e, loops) = close_right(d)?;
            out.add_term(e, c * pow(&delta, loops) * lambda);
        }
        Ok(out)
    }

    fn map_diagrams(&self, width: usize, f: impl Fn(&MotzkinDiagram) -> MotzkinDiagram) -> Self {
        let terms = self.terms.iter().map(|(d, c)| (f(d), c.clone())).collect();
        AlgebraElement { width, lambda: self.lambda.clone(), terms }
    }
}

/// Rewrites rational coefficients as integers over their common denominator.
fn integer_terms(terms: &BTreeMap<MotzkinDiagram, Scalar>) -> (Vec<(&MotzkinDiagram, BigInt)>, BigInt) {
    let denom = terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let out = terms.iter().map(|(d, c)| (d, c.numer() * (&denom / c.denom()))).collect();
    (out, denom)
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}(λ={})[", self.width, self.lambda)?;
        for (i, (d, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}·{:?}", format_scalar(c), d)?;
        }
        f.write_str("]")
    }
}

/// Largest absolute coefficient, handy in failure messages.
pub fn max_abs_coeff(x: &AlgebraElement) -> Scalar {
    x.terms().map(|(_, c)| c.abs()).max().unwrap_or_else(Scalar::zero)
}

/// Formats a short description of a difference element for reports.
pub fn describe_difference(x: &AlgebraElement) -> alloc::string::String {
    if x.is_zero() {
        "0".into()
    } else {
        format!("{} terms, max |coeff| {}", x.len(), format_scalar(&max_abs_coeff(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::enumerate_basis;
    use crate::scalar::{int, ratio};
    use Generator::*;

    fn lam(d: i64) -> Lambda {
        Lambda::from_ratio(1, d).unwrap()
    }

    fn gen(k: usize, g: Generator, l: &Lambda) -> AlgebraElement {
        AlgebraElement::generator(k, g, l.clone()).unwrap()
    }

    #[test]
    fn cup_cap_squares_to_loop() {
        let l = lam(4);
        let u = AlgebraElement::from_diagram(T(1).diagram(2).unwrap(), l.clone());
        assert_eq!(u.mul(&u).unwrap(), u.scale(&int(4)));
        let t = gen(2, T(1), &l);
        assert_eq!(t.mul(&t).unwrap(), t);
    }

    #[test]
    fn derived_projections() {
        let l = lam(3);
        for k in 2..=4 {
            for i in 1..k {
                let li = gen(k, L(i), &l);
                assert_eq!(li.adjoint(), gen(k, R(i), &l));
                assert_eq!(li.adjoint().mul(&li).unwrap(), gen(k, P(i), &l));
            }
            let last = gen(k, L(k - 1), &l);
            assert_eq!(last.mul(&last.adjoint()).unwrap(), gen(k, P(k), &l));
        }
    }

    #[test]
    fn relation_12_and_8() {
        let l = lam(4);
        let t1 = gen(3, T(1), &l);
        let t2 = gen(3, T(2), &l);
        let l1 = gen(3, L(1), &l);
        let lhs = t1.mul(&l1).unwrap().mul(&t1).unwrap();
        assert_eq!(lhs, t1.scale(l.value()));
        let lhs = t1.mul(&t2).unwrap().mul(&t1).unwrap();
        assert_eq!(lhs, t1.scale(&ratio(1, 16)));
    }

    #[test]
    fn associativity_and_adjoint_exhaustive_k2() {
        let l = lam(3);
        let basis: Vec<_> = enumerate_basis(2, &Limits::default())
            .unwrap()
            .into_iter()
            .map(|d| AlgebraElement::from_diagram(d, l.clone()))
            .collect();
        for a in &basis {
            assert_eq!(a.adjoint().adjoint(), *a);
            for b in &basis {
                let ab = a.mul(b).unwrap();
                assert_eq!(ab.adjoint(), b.adjoint().mul(&a.adjoint()).unwrap());
                for c in &basis {
                    assert_eq!(ab.mul(c).unwrap(), a.mul(&b.mul(c).unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn conditional_expectation_values() {
        let l = lam(4);
        for k in 1..=3 {
            let id = AlgebraElement::identity(k, l.clone());
            assert_eq!(id.conditional_expectation().unwrap(), AlgebraElement::identity(k - 1, l.clone()));
            let pk = gen(k, P(k), &l);
            assert_eq!(
                pk.conditional_expectation().unwrap(),
                AlgebraElement::identity(k - 1, l.clone()).scale(l.value())
            );
        }
        let g1 = AlgebraElement::identity(1, l.clone()).sub(&gen(1, P(1), &l)).unwrap();
        let e = g1.conditional_expectation().unwrap();
        assert_eq!(e, AlgebraElement::identity(0, l.clone()).scale(&ratio(3, 4)));
        assert!(AlgebraElement::identity(0, l).conditional_expectation().is_err());
    }

    #[test]
    fn embed_juxtapose_reflect() {
        let l = lam(3);
        let t1 = gen(2, T(1), &l);
        assert_eq!(t1.embed(2), gen(4, T(1), &l));
        assert_eq!(t1.embed(0), t1);
        let p1 = gen(1, P(1), &l);
        assert_eq!(p1.juxtapose(&AlgebraElement::identity(2, l.clone())).unwrap(), gen(3, P(1), &l));
        assert_eq!(gen(4, T(3), &l).reflect(), gen(4, T(1), &l));
        assert_eq!(gen(2, L(1), &l).reflect(), gen(2, R(1), &l));
    }

    #[test]
    fn errors() {
        let l = lam(3);
        assert!(AlgebraElement::generator(2, T(2), l.clone()).is_err());
        assert!(AlgebraElement::generator(2, P(3), l.clone()).is_err());
        assert!(AlgebraElement::generator(2, L(0), l.clone()).is_err());
        let a = AlgebraElement::identity(2, l.clone());
        let b = AlgebraElement::identity(3, l.clone());
        assert!(matches!(a.mul(&b), Err(Error::WidthMismatch { .. })));
        let c = AlgebraElement::identity(2, lam(4));
        assert_eq!(a.add(&c), Err(Error::LambdaMismatch));
    }
}
