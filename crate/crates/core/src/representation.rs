//! Motzkin pairs and the representations `π_{v_A,v}` on `H^{⊗k}`.
//!
//! Basis indices are zero-based here, so `ī = n − 1 − i`. Tensor products
//! order their factors most-significant first: `e_i ⊗ e_j` is basis vector
//! `i·n + j`. Inner products are linear in the first argument.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::algebra::{AlgebraElement, Generator};
use crate::check::Checks;
use crate::config::Limits;
use crate::diagram::{enumerate_basis, MotzkinDiagram};
use crate::error::{Error, Result};
use crate::linalg::{c, identity, sandwich, GramSchmidt, Mat, Vector, C64};
use crate::presentation::{relation_instances, Monomial};
use crate::scalar::{to_f64, Lambda};

/// Tolerance for the construction identities of a pair.
pub const PAIR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MotzkinPair {
    n: usize,
    lambda: Lambda,
    a: Vec<C64>,
    b: Vec<C64>,
}

impl MotzkinPair {
    /// Checks shapes only; the defining identities are left to
    /// [`validate_pair`].
    pub fn new(n: usize, lambda: Lambda, a: Vec<C64>, b: Vec<C64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("n = {n} must be at least 2")));
        }
        if a.len() != n || b.len() != n {
            return Err(Error::Parameter(format!(
                "coefficient vectors have lengths {} and {}, expected {n}",
                a.len(),
                b.len()
            )));
        }
        if a.iter().chain(&b).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parameter("non-finite coefficient".into()));
        }
        Ok(MotzkinPair { n, lambda, a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn a(&self) -> &[C64] {
        &self.a
    }

    pub fn b(&self) -> &[C64] {
        &self.b
    }

    pub fn bar(&self, i: usize) -> usize {
        self.n - 1 - i
    }

    /// `v_A = Σ_i a_i e_i ⊗ e_ī`.
    pub fn v_a(&self) -> Vector {
        let n = self.n;
        let mut v = Vector::zeros(n * n);
        for i in 0..n {
            v[i * n + self.bar(i)] = self.a[i];
        }
        v
    }

    /// `v = Σ_i b_i e_i`.
    pub fn v(&self) -> Vector {
        Vector::from_column_slice(&self.b)
    }

    /// Indices with `|b_i| > tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.n).filter(|&i| self.b[i].norm() > tol).collect()
    }

    /// The rank-one projection `t = v_A v_A*` on `H ⊗ H`.
    pub fn t_matrix(&self) -> Mat {
        let v = self.v_a();
        &v * v.adjoint()
    }

    /// `p = v v*` on `H`.
    pub fn p_matrix(&self) -> Mat {
        let v = self.v();
        &v * v.adjoint()
    }

    /// `l(e_i ⊗ e_j) = e_j ⊗ p(e_i)` on `H ⊗ H`.
    pub fn l_matrix(&self) -> Mat {
        let n = self.n;
        let mut l = Mat::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                for m in 0..n {
                    l[(j * n + m, i * n + j)] = self.b[m] * self.b[i].conj();
                }
            }
        }
        l
    }

    /// `Σ_{h,k} ā_h a_k e_{kh} ⊗ e_{k̄h̄}`, the matrix-unit form of `t`.
    pub fn t_matrix_units(&self) -> Mat {
        let n = self.n;
        let mut t = Mat::zeros(n * n, n * n);
        for h in 0..n {
            for k in 0..n {
                t[(k * n + self.bar(k), h * n + self.bar(h))] += self.a[h].conj() * self.a[k];
            }
        }
        t
    }

    /// `|⟨v ⊗ v, v_A⟩|²`, the weight picked up by closing a strand.
    pub fn closure_weight(&self) -> f64 {
        let n = self.n;
        let mut g = C64::new(0.0, 0.0);
        for i in 0..n {
            g += self.b[i] * self.b[self.bar(i)] * self.a[i].conj();
        }
        g.norm_sqr()
    }
}

/// Validation of the defining identities; every entry carries its residual.
pub fn validate_pair(p: &MotzkinPair) -> Checks {
    let n = p.n;
    let lam = p.lambda.to_f64();
    let (a, b) = (&p.a, &p.b);
    let bar = |i: usize| p.bar(i);
    let mut out = Checks::new();

    let sa: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let sb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    out.residual("sum |a_i|^2 = 1", None, (sa - 1.0).abs(), PAIR_TOL);
    out.residual("sum |b_i|^2 = 1", None, (sb - 1.0).abs(), PAIR_TOL);

    let pairing = (0..n).map(|i| (a[i].conj() * a[bar(i)] - c(lam)).norm()).fold(0.0, f64::max);
    out.residual("conj(a_i) a_ibar = lambda", None, pairing, PAIR_TOL);

    let mut cross: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lhs = a[j].conj() * b[i].conj() * b[bar(j)];
            let rhs = a[bar(i)].conj() * b[j].conj() * b[bar(i)];
            cross = cross.max((lhs - rhs).norm());
        }
    }
    out.residual("cross condition", None, cross, PAIR_TOL);

    let mirror = (0..n).map(|j| (b[j].norm() - b[bar(j)].norm()).abs()).fold(0.0, f64::max);
    out.residual("|b_j| = |b_jbar|", None, mirror, PAIR_TOL);
    let supp = p.support(PAIR_TOL);
    let sym = supp.iter().map(|&j| (a[j] - a[bar(j)]).norm()).fold(0.0, f64::max);
    out.residual("a_j = a_jbar on supp(v)", None, sym, PAIR_TOL);

    let weighted: C64 = (0..n).map(|k| a[bar(k)].conj() * a[k] * b[k].norm_sqr()).sum();
    out.residual("sum conj(a_kbar) a_k |b_k|^2 = lambda", None, (weighted - c(lam)).norm(), PAIR_TOL);

    let mut fifth: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = c(lam) * a[i].conj() * b[k].conj() * b[bar(i)];
                let rhs = a[j].conj() * a[bar(j)] * a[bar(k)].conj() * b[i].conj() * b[bar(k)];
                fifth = fifth.max((lhs - rhs).norm());
            }
        }
    }
    out.residual("three-index condition", None, fifth, PAIR_TOL);
    out
}

/// The example families of pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleFamily {
    /// `n` odd, `v` the middle basis vector.
    I,
    /// `v = (e_1 + e_n)/√2`.
    II,
    /// `v` uniform on the first and last `r` basis vectors.
    III,
}

impl FromStr for ExampleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(ExampleFamily::I),
            "ii" | "2" => Ok(ExampleFamily::II),
            "iii" | "3" => Ok(ExampleFamily::III),
            _ => Err(Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

/// Builds a pair with real positive `a` and real `b`.
///
/// Indices in `supp(v)` and the self-paired middle index get `a = √λ`; the
/// remaining mirror pairs share the leftover weight equally, each solving
/// `x + λ²/x = s` for `x = |a_i|²`.
pub fn build_example_pair(family: ExampleFamily, n: usize, r: usize, lambda: &Lambda) -> Result<MotzkinPair> {
    if n < 2 {
        return Err(Error::Parameter(format!("n = {n} must be at least 2")));
    }
    let lam = lambda.to_f64();
    let mut b = vec![0.0; n];
    let mut fixed = vec![false; n];
    match family {
        ExampleFamily::I => {
            if n % 2 == 0 {
                return Err(Error::Parameter(format!("family i needs odd n, got {n}")));
            }
            b[n / 2] = 1.0;
        }
        ExampleFamily::II | ExampleFamily::III => {
            let r = if family == ExampleFamily::II { 1 } else { r };
            if r == 0 || 2 * r > n {
                return Err(Error::Parameter(format!("need 1 ≤ r and 2r ≤ n, got r = {r}, n = {n}")));
            }
            let w = 1.0 / libm::sqrt(2.0 * r as f64);
            for j in 0..r {
                b[j] = w;
                b[n - 1 - j] = w;
            }
        }
    }
    for i in 0..n {
        fixed[i] = b[i] != 0.0 || i == n - 1 - i;
    }
    let mut a = vec![0.0; n];
    let mut used = 0.0;
    for i in 0..n {
        if fixed[i] {
            a[i] = libm::sqrt(lam);
            used += lam;
        }
    }
    let free: Vec<usize> = (0..n / 2).filter(|&i| !fixed[i]).collect();
    if free.is_empty() {
        if (used - 1.0).abs() > PAIR_TOL {
            return Err(Error::Parameter(format!("no free coefficients and Σ|a_i|² = {used} ≠ 1")));
        }
    } else {
        let s = (1.0 - used) / free.len() as f64;
        if s < 2.0 * lam - PAIR_TOL {
            return Err(Error::Parameter(format!(
                "no real solution: each free pair needs |a_i|² + |a_ī|² = {s:.6} but the minimum is 2λ = {:.6}",
                2.0 * lam
            )));
        }
        let disc = libm::sqrt((s * s - 4.0 * lam * lam).max(0.0));
        let hi = (s + disc) / 2.0;
        let lo = lam * lam / hi;
        for i in free {
            a[i] = libm::sqrt(hi);
            a[n - 1 - i] = libm::sqrt(lo);
        }
    }
    MotzkinPair::new(n, lambda.clone(), a.into_iter().map(c).collect(), b.into_iter().map(c).collect())
}

/// Which tensor powers or Fock spaces an operator maps between.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// `H^{⊗k}` with `dim H = n`.
    Tensor { n: usize, k: usize },
    /// The truncated Fock space `⊕_{k ≤ levels} H_k`.
    Fock { n: usize, levels: usize },
}

impl Space {
    pub fn dim(&self, dims: Option<&[usize]>) -> usize {
        match *self {
            Space::Tensor { n, k } => n.pow(k as u32),
            Space::Fock { .. } => dims.map(|d| d.iter().sum()).unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    pub domain: Space,
    pub codomain: Space,
    pub matrix: Mat,
}

impl LinearOperator {
    pub fn tensor(n: usize, k: usize, matrix: Mat) -> Self {
        LinearOperator { domain: Space::Tensor { n, k }, codomain: Space::Tensor { n, k }, matrix }
    }
}

/// Dense generator matrices of `π_{v_A,v}` at width `k`.
#[derive(Debug, Clone)]
pub struct RepGenerators {
    pub n: usize,
    pub k: usize,
    t: Vec<Mat>,
    l: Vec<Mat>,
    r: Vec<Mat>,
    p: Vec<Mat>,
    id: Mat,
}

impl RepGenerators {
    pub fn new(pair: &MotzkinPair, k: usize, limits: &Limits) -> Result<Self> {
        let n = pair.n;
        let dim = limits.check_dim(n, k)?;
        limits.check_dense(dim)?;
        let (t2, l2, p1) = (pair.t_matrix(), pair.l_matrix(), pair.p_matrix());
        let pw = |e: usize| n.pow(e as u32);
        let mut t = Vec::new();
        let mut l = Vec::new();
        let mut r = Vec::new();
        for i in 1..k {
            t.push(sandwich(pw(i - 1), &t2, pw(k - i - 1)));
            let li = sandwich(pw(i - 1), &l2, pw(k - i - 1));
            r.push(li.adjoint());
            l.push(li);
        }
        let p = (1..=k).map(|i| sandwich(pw(i - 1), &p1, pw(k - i))).collect();
        Ok(RepGenerators { n, k, t, l, r, p, id: identity(dim) })
    }

    pub fn dim(&self) -> usize {
        self.id.nrows()
    }

    pub fn get(&self, g: Generator) -> Result<&Mat> {
        let pick = |v: &'static str, list: &'_ [Mat], i: usize| -> Result<()> {
            if i == 0 || i > list.len() {
                return Err(Error::IndexOutOfRange { name: v, index: i, width: self.k });
            }
            Ok(())
        };
        Ok(match g {
            Generator::Id => &self.id,
            Generator::T(i) => {
                pick("t", &self.t, i)?;
                &self.t[i - 1]
            }
            Generator::L(i) => {
                pick("l", &self.l, i)?;
                &self.l[i - 1]
            }
            Generator::R(i) => {
                pick("r", &self.r, i)?;
                &self.r[i - 1]
            }
            Generator::P(i) => {
                pick("p", &self.p, i)?;
                &self.p[i - 1]
            }
        })
    }

    /// Every non-identity generator, in a fixed order.
    pub fn all(&self) -> Vec<(Generator, &Mat)> {
        let mut out = Vec::new();
        for i in 0..self.t.len() {
            out.push((Generator::T(i + 1), &self.t[i]));
            out.push((Generator::L(i + 1), &self.l[i]));
            out.push((Generator::R(i + 1), &self.r[i]));
        }
        for i in 0..self.p.len() {
            out.push((Generator::P(i + 1), &self.p[i]));
        }
        out
    }

    /// Ordered product of generators; the empty word is the identity.
    pub fn word(&self, word: &[Generator]) -> Result<Mat> {
        let mut acc = self.id.clone();
        for g in word {
            acc *= self.get(*g)?;
        }
        Ok(acc)
    }

    fn monomial(&self, m: &Monomial, lambda: f64) -> Result<Mat> {
        Ok(self.word(&m.word)? * c(libm::pow(lambda, m.lambda_power as f64)))
    }
}

pub fn generator_operator(pair: &MotzkinPair, k: usize, g: Generator, limits: &Limits) -> Result<LinearOperator> {
    let gens = RepGenerators::new(pair, k, limits)?;
    Ok(LinearOperator::tensor(pair.n, k, gens.get(g)?.clone()))
}

pub fn evaluate_word(pair: &MotzkinPair, k: usize, word: &[Generator], limits: &Limits) -> Result<LinearOperator> {
    let gens = RepGenerators::new(pair, k, limits)?;
    Ok(LinearOperator::tensor(pair.n, k, gens.word(word)?))
}

/// Parses whitespace- or comma-separated tokens such as `t1 l2 r1 p3 id`.
pub fn parse_word(src: &str) -> Result<Vec<Generator>> {
    src.split(|ch: char| ch.is_whitespace() || ch == ',').filter(|s| !s.is_empty()).map(Generator::from_str).collect()
}

/// Frobenius residual of every relation instance at width `k`.
pub fn relation_residuals(pair: &MotzkinPair, k: usize, tol: f64, limits: &Limits) -> Result<Checks> {
    if k < 2 {
        return Err(Error::Domain("relations need k ≥ 2".into()));
    }
    let gens = RepGenerators::new(pair, k, limits)?;
    let lam = pair.lambda.to_f64();
    let mut out = Checks::new();
    for inst in relation_instances(k) {
        let lhs = gens.monomial(&inst.lhs, lam)?;
        let rhs = if inst.relation == 0 { lhs.adjoint() } else { gens.monomial(&inst.rhs, lam)? };
        let idx: Vec<String> = inst.indices.iter().map(|i| format!("{i}")).collect();
        let name = format!("({}) {} = {} [{}]", inst.relation, words(&inst.lhs), words(&inst.rhs), idx.join(","));
        out.residual(name, Some(k), (lhs - rhs).norm(), tol);
    }
    Ok(out)
}

fn words(m: &Monomial) -> String {
    let mut s = String::new();
    if m.lambda_power > 0 {
        s.push_str(&format!("lambda^{} ", m.lambda_power));
    }
    let w: Vec<String> = m.word.iter().map(|g| format!("{g}")).collect();
    s.push_str(&w.join(" "));
    s
}

/// Planar evaluation of a single diagram.
///
/// Supported: through strands, arcs between adjacent points on one edge,
/// and isolated points. A top arc emits `λ^{−1/2} v_A`, a bottom arc pairs
/// with `λ^{−1/2} v_A`, an isolated top point emits `v` and an isolated
/// bottom point pairs with `v`.
pub fn evaluate_diagram(pair: &MotzkinPair, d: &MotzkinDiagram, limits: &Limits) -> Result<LinearOperator> {
    let k = d.width();
    let n = pair.n;
    let dim = limits.check_dim(n, k)?;
    limits.check_dense(dim)?;
    enum Feature {
        Through(usize, usize),
        TopArc(usize),
        BottomArc(usize),
        TopPoint(usize),
        BottomPoint(usize),
    }
    let mut features = Vec::new();
    for p in 0..2 * k {
        match d.partner(p) {
            None if p < k => features.push(Feature::TopPoint(p)),
            None => features.push(Feature::BottomPoint(p - k)),
            Some(q) if q < p => {}
            Some(q) => {
                if p < k && q >= k {
                    features.push(Feature::Through(p, q - k));
                } else if q == p + 1 && (q < k || p >= k) {
                    if p < k {
                        features.push(Feature::TopArc(p));
                    } else {
                        features.push(Feature::BottomArc(p - k));
                    }
                } else {
                    return Err(Error::Unsupported(format!(
                        "arc between points {p} and {q} is not between adjacent points"
                    )));
                }
            }
        }
    }
    let s = c(1.0 / libm::sqrt(pair.lambda.to_f64()));
    let digits = |mut x: usize| {
        let mut out = vec![0usize; k];
        for slot in (0..k).rev() {
            out[slot] = x % n;
            x /= n;
        }
        out
    };
    let all: Vec<Vec<usize>> = (0..dim).map(digits).collect();
    let (a, b) = (&pair.a, &pair.b);
    let mut m = Mat::zeros(dim, dim);
    for (row, out) in all.iter().enumerate() {
        for (col, inp) in all.iter().enumerate() {
            let mut v = c(1.0);
            for f in &features {
                v *= match *f {
                    Feature::Through(top, bottom) => {
                        if out[top] == inp[bottom] {
                            c(1.0)
                        } else {
                            c(0.0)
                        }
                    }
                    Feature::TopArc(i) => {
                        if out[i + 1] == pair.bar(out[i]) {
                            s * a[out[i]]
                        } else {
                            c(0.0)
                        }
                    }
                    Feature::BottomArc(i) => {
                        if inp[i + 1] == pair.bar(inp[i]) {
                            s * a[inp[i]].conj()
                        } else {
                            c(0.0)
                        }
                    }
                    Feature::TopPoint(i) => b[out[i]],
                    Feature::BottomPoint(i) => b[inp[i]].conj(),
                };
                if v == c(0.0) {
                    break;
                }
            }
            m[(row, col)] = v;
        }
    }
    Ok(LinearOperator::tensor(n, k, m))
}

/// `Σ c_d π(d)` via [`evaluate_diagram`].
pub fn evaluate_element(pair: &MotzkinPair, x: &AlgebraElement, limits: &Limits) -> Result<Mat> {
    let dim = limits.check_dim(pair.n, x.width())?;
    let mut m = Mat::zeros(dim, dim);
    for (d, coeff) in x.terms() {
        m += evaluate_diagram(pair, d, limits)?.matrix * c(to_f64(coeff));
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanStatus {
    Converged,
    /// Still growing after `max_rounds`; neither a pass nor a failure.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanResult {
    pub dimension: usize,
    pub rounds: usize,
    pub status: SpanStatus,
}

/// Dimension of `π(M_k)` by closing `{1, generators}` under left
/// multiplication by the generators.
pub fn span_dimension(pair: &MotzkinPair, k: usize, max_rounds: usize, limits: &Limits) -> Result<SpanResult> {
    let gens = RepGenerators::new(pair, k, limits)?;
    let mut gs = GramSchmidt::relative(1e-8);
    let dim = gens.dim();
    let as_matrix = |v: &Vector| Mat::from_column_slice(dim, dim, v.as_slice());
    let mut fresh: Vec<usize> = Vec::new();
    let seeds = core::iter::once(gens.get(Generator::Id)?).chain(gens.all().into_iter().map(|(_, m)| m));
    for m in seeds {
        if gs.offer(crate::linalg::vectorize(m)) {
            fresh.push(gs.len() - 1);
        }
    }
    let mut rounds = 0;
    while !fresh.is_empty() {
        if rounds == max_rounds {
            return Ok(SpanResult { dimension: gs.len(), rounds, status: SpanStatus::Inconclusive });
        }
        rounds += 1;
        let mut next = Vec::new();
        for &idx in &fresh {
            let x = as_matrix(&gs.basis()[idx]);
            for (_, g) in gens.all() {
                if gs.offer(crate::linalg::vectorize(&(g * &x))) {
                    next.push(gs.len() - 1);
                }
            }
        }
        fresh = next;
    }
    Ok(SpanResult { dimension: gs.len(), rounds, status: SpanStatus::Converged })
}

/// `Ẽ`: for `x` on `H^{⊗K}`, form
/// `Y = (1⊗p⊗p)(1⊗t)(x⊗1)(1⊗t)(1⊗p⊗p)` on `H^{⊗(K+1)}`, factor it as
/// `Z ⊗ (p⊗p)` and return `λ⁻¹ Z` on `H^{⊗(K−1)}`.
pub fn rep_conditional_expectation(pair: &MotzkinPair, x: &LinearOperator, limits: &Limits) -> Result<LinearOperator> {
    let n = pair.n;
    let kk = match x.domain {
        Space::Tensor { k, .. } if x.domain == x.codomain && k >= 1 => k,
        _ => return Err(Error::Structural("expected an operator on H^{⊗K} with K ≥ 1".into())),
    };
    let big = limits.check_dim(n, kk + 1)?;
    limits.check_dense(big)?;
    if x.matrix.nrows() != n.pow(kk as u32) || !x.matrix.is_square() {
        return Err(Error::Structural("operator size does not match its space".into()));
    }
    let left = n.pow(kk as u32 - 1);
    let vv = pair.v().kronecker(&pair.v());
    let pp = &vv * vv.adjoint();
    let t = sandwich(left, &pair.t_matrix(), 1);
    let cap = sandwich(left, &pp, 1);
    let y = &cap * &t * x.matrix.kronecker(&identity(n)) * &t * &cap;
    // Z = (1 ⊗ ⟨vv|) Y (1 ⊗ |vv⟩)
    let contract = identity(left).kronecker(&vv);
    let z = contract.adjoint() * &y * &contract;
    let rebuilt = z.kronecker(&pp);
    let defect = (&y - &rebuilt).norm();
    if defect > 1e-9 * y.norm().max(1.0) {
        return Err(Error::Structural(format!("trailing slots are not of the form p ⊗ p (defect {defect:.3e})")));
    }
    let lam = pair.lambda.to_f64();
    Ok(LinearOperator::tensor(n, kk - 1, z * c(1.0 / lam)))
}

/// `‖π(E(d)) − Ẽ(π(d))‖` for every basis diagram of `M_k` that the planar
/// evaluator supports; returns the checks and the number of skipped diagrams.
pub fn intertwining_residuals(pair: &MotzkinPair, k: usize, tol: f64, limits: &Limits) -> Result<(Checks, usize)> {
    let mut out = Checks::new();
    let mut skipped = 0;
    for d in enumerate_basis(k, limits)? {
        let x = AlgebraElement::from_diagram(d.clone(), pair.lambda.clone());
        let pd = match evaluate_diagram(pair, &d, limits) {
            Ok(m) => m,
            Err(Error::Unsupported(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let lhs = match evaluate_element(pair, &x.conditional_expectation()?, limits) {
            Ok(m) => m,
            Err(Error::Unsupported(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let rhs = rep_conditional_expectation(pair, &pd, limits)?.matrix;
        out.residual(format!("E intertwining {:?}", d.pairing()), Some(k), (lhs - rhs).norm(), tol);
    }
    Ok((out, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_i() -> MotzkinPair {
        build_example_pair(ExampleFamily::I, 3, 0, &Lambda::from_ratio(1, 3).unwrap()).unwrap()
    }

    fn pair_iii() -> MotzkinPair {
        build_example_pair(ExampleFamily::III, 4, 1, &Lambda::from_ratio(1, 4).unwrap()).unwrap()
    }

    #[test]
    fn example_pairs_are_valid() {
        let p = pair_i();
        let s = 1.0 / libm::sqrt(3.0);
        for z in p.a() {
            assert!((z.re - s).abs() < 1e-7);
        }
        assert_eq!(p.b()[1], c(1.0));
        assert!(validate_pair(&p).all_pass());
        let q = pair_iii();
        for z in q.a() {
            assert!((z.re - 0.5).abs() < 1e-15);
        }
        assert!((q.b()[0].re - libm::sqrt(0.5)).abs() < 1e-15);
        assert!(validate_pair(&q).all_pass());
        let w = build_example_pair(ExampleFamily::III, 6, 1, &Lambda::from_ratio(1, 8).unwrap()).unwrap();
        assert!(validate_pair(&w).all_pass());
        // fixed weight 2/8, two free pairs sharing 3/8 each
        let x = w.a()[1].norm_sqr();
        assert!((x + 1.0 / (64.0 * x) - 0.375).abs() < 1e-12);
        assert!(x > w.a()[4].norm_sqr());
    }

    #[test]
    fn infeasible_pair() {
        let e = build_example_pair(ExampleFamily::III, 4, 1, &Lambda::from_ratio(1, 3).unwrap());
        assert!(matches!(e, Err(Error::Parameter(_))));
        // A hand-made n = 4 pair at λ = 1/3 cannot be normalised.
        let s = libm::sqrt(1.0 / 3.0);
        let p = MotzkinPair::new(
            4,
            Lambda::from_ratio(1, 3).unwrap(),
            vec![c(s); 4],
            vec![c(libm::sqrt(0.5)), c(0.0), c(0.0), c(libm::sqrt(0.5))],
        )
        .unwrap();
        assert!(!validate_pair(&p).all_pass());
    }

    #[test]
    fn local_operators() {
        let p = pair_iii();
        assert!((p.t_matrix() - p.t_matrix_units()).norm() < 1e-12);
        let l = p.l_matrix();
        assert!((&l * l.adjoint() * &l - &l).norm() < 1e-12);
        let pm = p.p_matrix();
        assert!((&pm * &pm - &pm).norm() < 1e-12);
        assert!((p.closure_weight() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn relations_hold() {
        let limits = Limits::default();
        for p in [pair_i(), pair_iii()] {
            for k in 2..=3 {
                let r = relation_residuals(&p, k, 1e-10, &limits).unwrap();
                assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn words_and_diagrams() {
        let limits = Limits::default();
        let p = pair_iii();
        let g = RepGenerators::new(&p, 2, &limits).unwrap();
        use Generator::*;
        let tlt = g.word(&[T(1), L(1), T(1)]).unwrap();
        assert!((tlt - g.get(T(1)).unwrap() * c(0.25)).norm() < 1e-12);
        assert!((g.word(&[]).unwrap() - identity(16)).norm() < 1e-15);
        assert!((g.word(&[L(1), R(1)]).unwrap() - g.get(P(2)).unwrap()).norm() < 1e-12);
        for gen in [Id, T(1), L(1), R(1), P(1), P(2)] {
            let x = AlgebraElement::generator(2, gen, p.lambda().clone()).unwrap();
            let m = evaluate_element(&p, &x, &limits).unwrap();
            assert!((m - g.get(gen).unwrap()).norm() < 1e-12, "{gen}");
        }
        assert_eq!(parse_word("t1, l1 r2").unwrap(), vec![T(1), L(1), R(2)]);
        assert!(parse_word("t1 x2").is_err());
    }

    #[test]
    fn diagrams_multiply_like_matrices_k2() {
        let limits = Limits::default();
        for p in [pair_i(), pair_iii()] {
            let basis = enumerate_basis(2, &limits).unwrap();
            for d1 in &basis {
                for d2 in &basis {
                    let x = AlgebraElement::from_diagram(d1.clone(), p.lambda().clone());
                    let y = AlgebraElement::from_diagram(d2.clone(), p.lambda().clone());
                    let lhs = evaluate_element(&p, &x.mul(&y).unwrap(), &limits).unwrap();
                    let rhs = evaluate_element(&p, &x, &limits).unwrap() * evaluate_element(&p, &y, &limits).unwrap();
                    assert!((lhs - rhs).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn nested_arcs_unsupported() {
        let d = MotzkinDiagram::from_pairing(3, &[2, -1, 0, 5, -1, 3]).unwrap();
        assert!(matches!(evaluate_diagram(&pair_i(), &d, &Limits::default()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn faithful_small() {
        let limits = Limits::default();
        for p in [pair_i(), pair_iii()] {
            let r = span_dimension(&p, 2, 8, &limits).unwrap();
            assert_eq!((r.dimension, r.status), (9, SpanStatus::Converged));
        }
    }

    #[test]
    fn conditional_expectation_intertwines() {
        let limits = Limits::default();
        for p in [pair_i(), pair_iii()] {
            let (checks, skipped) = intertwining_residuals(&p, 2, 1e-10, &limits).unwrap();
            assert_eq!(skipped, 0);
            assert_eq!(checks.items.len(), 9);
            assert!(checks.all_pass(), "{:?}", checks.failures().collect::<Vec<_>>());
            let id = LinearOperator::tensor(p.n(), 3, identity(p.n().pow(3)));
            let e = rep_conditional_expectation(&p, &id, &limits).unwrap();
            assert!((e.matrix - identity(p.n().pow(2))).norm() < 1e-12);
            let g = RepGenerators::new(&p, 3, &limits).unwrap();
            let p3 = LinearOperator::tensor(p.n(), 3, g.get(Generator::P(3)).unwrap().clone());
            let e = rep_conditional_expectation(&p, &p3, &limits).unwrap();
            assert!((e.matrix - identity(p.n().pow(2)) * c(p.lambda().to_f64())).norm() < 1e-12);
        }
    }
}
