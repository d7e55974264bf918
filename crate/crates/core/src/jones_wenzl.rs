//! Motzkin Jones–Wenzl idempotents `g_k`, computed exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::algebra::{describe_difference, AlgebraElement, Generator};
use crate::config::Limits;
use crate::diagram::{enumerate_basis, MotzkinDiagram, Point};
use crate::error::{Error, Result};
use crate::exact::nullspace;
use crate::qpoly::{chebyshev_p, is_generic, phi, shifted_delta};
use crate::scalar::{Lambda, Scalar};

/// `g_0 = 1 ∈ M_0`, `g_1 = 1 − p_1`, and
/// `g_{k+1} = g_k(1 − p_{k+1}) − φ(k)·g_k t_k g_k`.
#[derive(Debug, Clone)]
pub struct JwCache {
    lambda: Lambda,
    limits: Limits,
    g: Vec<AlgebraElement>,
}

impl JwCache {
    pub fn new(lambda: Lambda) -> Self {
        Self::with_limits(lambda, Limits::default())
    }

    pub fn with_limits(lambda: Lambda, limits: Limits) -> Self {
        let g0 = AlgebraElement::identity(0, lambda.clone());
        JwCache { lambda, limits, g: alloc::vec![g0] }
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    /// Computes every `g_j` with `j ≤ k` not yet cached.
    pub fn ensure(&mut self, k: usize) -> Result<()> {
        self.limits.check_width(k)?;
        if k > 5 {
            return Err(Error::ResourceLimit { what: "Jones-Wenzl width", value: k, limit: 5 });
        }
        if !is_generic(self.lambda.value(), k)? {
            return Err(Error::SingularParameter(format!("λ⁻¹ is not {k}-generic")));
        }
        while self.g.len() <= k {
            let next = match self.g.len() {
                1 => {
                    let one = AlgebraElement::identity(1, self.lambda.clone());
                    one.sub(&self.gen(1, Generator::P(1))?)?
                }
                j => standard_step(&self.g[j - 1], &self.limits)?,
            };
            self.g.push(next);
        }
        Ok(())
    }

    /// `g_k`, computing it if needed.
    pub fn get(&mut self, k: usize) -> Result<&AlgebraElement> {
        self.ensure(k)?;
        Ok(&self.g[k])
    }

    /// Already-computed `g_k`.
    pub fn cached(&self, k: usize) -> Option<&AlgebraElement> {
        self.g.get(k)
    }

    fn gen(&self, k: usize, g: Generator) -> Result<AlgebraElement> {
        AlgebraElement::generator(k, g, self.lambda.clone())
    }
}

/// One step of the standard recursion, from `g_k` to `g_{k+1}`.
pub fn standard_step(gk: &AlgebraElement, limits: &Limits) -> Result<AlgebraElement> {
    let k = gk.width();
    let lambda = gk.lambda().clone();
    let g = gk.embed(1);
    let one = AlgebraElement::identity(k + 1, lambda.clone());
    let p = AlgebraElement::generator(k + 1, Generator::P(k + 1), lambda.clone())?;
    let t = AlgebraElement::generator(k + 1, Generator::T(k), lambda.clone())?;
    let first = g.multiply(&one.sub(&p)?, limits)?;
    let gtg = g.multiply(&t, limits)?.multiply(&g, limits)?;
    first.sub(&gtg.scale(&phi(k, &lambda)?))
}

/// The mirrored recursion, `(1 ⊗ g_k)((1 − p_1) ⊗ 1) − φ(k)(1 ⊗ g_k) t_1 (1 ⊗ g_k)`.
pub fn symmetric_step(gk: &AlgebraElement, limits: &Limits) -> Result<AlgebraElement> {
    let k = gk.width();
    let lambda = gk.lambda().clone();
    let g = AlgebraElement::identity(1, lambda.clone()).juxtapose(gk)?;
    let one = AlgebraElement::identity(k + 1, lambda.clone());
    let p = AlgebraElement::generator(k + 1, Generator::P(1), lambda.clone())?;
    let t = AlgebraElement::generator(k + 1, Generator::T(1), lambda.clone())?;
    let first = g.multiply(&one.sub(&p)?, limits)?;
    let gtg = g.multiply(&t, limits)?.multiply(&g, limits)?;
    first.sub(&gtg.scale(&phi(k, &lambda)?))
}

/// `(λ⁻¹−1)P_k(x) / (λ⁻¹P_{k−1}(x))` with `x = (λ⁻¹−1)⁻²`, the factor in
/// `E(g_k) = c·g_{k−1}`.
pub fn expectation_coefficient(k: usize, lambda: &Lambda) -> Result<Scalar> {
    let y = shifted_delta(lambda);
    let x = (&y * &y).recip();
    let den = lambda.delta() * chebyshev_p(k - 1, &x);
    if den.is_zero() {
        return Err(Error::SingularParameter(format!("P_{}(x) = 0", k - 1)));
    }
    Ok(y * chebyshev_p(k, &x) / den)
}

/// One line of a [`JwReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JwCheck {
    pub name: String,
    pub pass: bool,
    /// Informational entries are reported but do not affect the verdict.
    pub asserted: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JwReport {
    pub k: usize,
    pub lambda: Lambda,
    pub terms: usize,
    pub checks: Vec<JwCheck>,
}

impl JwReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass || !c.asserted)
    }
}

struct Checks(Vec<JwCheck>);

impl Checks {
    fn zero(&mut self, name: String, diff: &AlgebraElement) {
        self.push(name, diff.is_zero(), true, describe_difference(diff));
    }

    fn info_zero(&mut self, name: String, diff: &AlgebraElement) {
        self.push(name, diff.is_zero(), false, describe_difference(diff));
    }

    fn push(&mut self, name: String, pass: bool, asserted: bool, detail: String) {
        self.0.push(JwCheck { name, pass, asserted, detail });
    }
}

/// Exact verification of the properties of `g_k`.
pub fn jw_report(cache: &mut JwCache, k: usize) -> Result<JwReport> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    cache.ensure(k)?;
    let limits = cache.limits;
    let lambda = cache.lambda.clone();
    let g = cache.g[k].clone();
    let gen = |w: usize, x: Generator| AlgebraElement::generator(w, x, lambda.clone());
    let mut c = Checks(Vec::new());

    let g2 = g.multiply(&g, &limits)?;
    c.zero("idempotent".into(), &g2.sub(&g)?);
    c.zero("self-adjoint".into(), &g.adjoint().sub(&g)?);
    let id = MotzkinDiagram::identity(k);
    c.push("identity coefficient = 1".into(), g.coeff(&id).is_one(), true, crate::scalar::format_scalar(&g.coeff(&id)));

    for i in 1..k {
        let p = gen(k, Generator::P(i))?;
        c.zero(format!("g p{i} = 0"), &g.multiply(&p, &limits)?);
        c.zero(format!("p{i} g = 0"), &p.multiply(&g, &limits)?);
    }
    let pk = gen(k, Generator::P(k))?;
    c.info_zero(format!("g p{k} = 0"), &g.multiply(&pk, &limits)?);
    for i in 1..k {
        let t = gen(k, Generator::T(i))?;
        c.info_zero(format!("g t{i} = 0"), &g.multiply(&t, &limits)?);
    }

    let coef = expectation_coefficient(k, &lambda)?;
    let e = g.conditional_expectation()?;
    c.push("E(g) coefficient".into(), e == cache.g[k - 1].scale(&coef), true, crate::scalar::format_scalar(&coef));
    c.push("E(g) coefficient = 1/phi".into(), coef.clone() * phi(k, &lambda)? == Scalar::one(), true, String::new());

    for i in 1..k {
        let gi = cache.g[i].embed(k - i);
        c.zero(format!("g{i} g = g"), &gi.multiply(&g, &limits)?.sub(&g)?);
        c.zero(format!("g g{i} = g"), &g.multiply(&gi, &limits)?.sub(&g)?);
    }

    c.zero("reflection invariant".into(), &g.reflect().sub(&g)?);
    if k >= 2 {
        let sym = symmetric_step(&cache.g[k - 1], &limits)?;
        c.zero("symmetric recursion".into(), &sym.sub(&g)?);
    }

    for q in 1..k {
        let p = k - q;
        let gq = &cache.g[q];
        let right = AlgebraElement::identity(p, lambda.clone()).juxtapose(gq)?;
        let left = gq.juxtapose(&AlgebraElement::identity(p, lambda.clone()))?;
        c.zero(format!("g (id{p} x g{q}) = g"), &g.multiply(&right, &limits)?.sub(&g)?);
        c.zero(format!("g (g{q} x id{p}) = g"), &g.multiply(&left, &limits)?.sub(&g)?);
    }

    Ok(JwReport { k, lambda, terms: g.len(), checks: c.0 })
}

/// The projection `q_k = φ(k)·g_k t_k g_k ∈ M_{k+1}` and the element
/// `x = g_k·D`, where `D` caps top points `k, k+1` and leaves bottom points
/// `k, k+1` isolated.
///
/// The partial isometry of the equivalence is `s·x` with `s² = φ(k)·λ`; only
/// squared identities are checked, so everything stays rational.
#[derive(Debug, Clone)]
pub struct QkElement {
    pub q: AlgebraElement,
    pub x: AlgebraElement,
    pub scale_squared: Scalar,
    /// `g_{k−1} p_k p_{k+1}`.
    pub target: AlgebraElement,
}

impl QkElement {
    /// `q² = q`, `q* = q`, `s²·x x* = q`, `s²·x* x = g_{k−1}p_k p_{k+1}`.
    pub fn checks(&self, limits: &Limits) -> Result<[(&'static str, bool); 4]> {
        let q2 = self.q.multiply(&self.q, limits)?;
        let xx = self.x.multiply(&self.x.adjoint(), limits)?.scale(&self.scale_squared);
        let xtx = self.x.adjoint().multiply(&self.x, limits)?.scale(&self.scale_squared);
        Ok([
            ("q^2 = q", q2 == self.q),
            ("q* = q", self.q.adjoint() == self.q),
            ("x x* = q", xx == self.q),
            ("x* x = g p p", xtx == self.target),
        ])
    }
}

pub fn qk_element(cache: &mut JwCache, k: usize) -> Result<QkElement> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    cache.limits.check_width(k + 1)?;
    cache.ensure(k)?;
    let limits = cache.limits;
    let lambda = cache.lambda.clone();
    let w = k + 1;
    let g = cache.g[k].embed(1);
    let t = AlgebraElement::generator(w, Generator::T(k), lambda.clone())?;
    let f = phi(k, &lambda)?;
    let q = g.multiply(&t, &limits)?.multiply(&g, &limits)?.scale(&f);

    use Point::{Bottom as B, Top as T};
    let mut pairs: Vec<(Point, Point)> = (1..k).map(|j| (T(j), B(j))).collect();
    pairs.push((T(k), T(k + 1)));
    let d = AlgebraElement::from_diagram(MotzkinDiagram::from_pairs(w, &pairs)?, lambda.clone());
    let x = g.multiply(&d, &limits)?;

    let pk = AlgebraElement::generator(w, Generator::P(k), lambda.clone())?;
    let pk1 = AlgebraElement::generator(w, Generator::P(k + 1), lambda.clone())?;
    let target = cache.g[k - 1].embed(2).multiply(&pk, &limits)?.multiply(&pk1, &limits)?;
    Ok(QkElement { q, x, scale_squared: f * lambda.value(), target })
}

/// Result of the uniqueness probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniquenessProbe {
    pub k: usize,
    /// Dimension of `{y : y p_i = p_i y = 0 (i < k), g_k y = y}`.
    pub solution_dimension: usize,
    /// Whether that solution space is spanned by `g_k`.
    pub spanned_by_g: bool,
}

impl UniquenessProbe {
    /// The only self-adjoint idempotents in a line `ℚ·g_k` are `0` and `g_k`.
    pub fn unique(&self) -> bool {
        self.solution_dimension == 1 && self.spanned_by_g
    }
}

/// Solves the linear conditions characterising `g_k` exactly over the full
/// diagram basis of `M_k`.
pub fn uniqueness_probe(cache: &mut JwCache, k: usize) -> Result<UniquenessProbe> {
    if !(1..=3).contains(&k) {
        return Err(Error::ResourceLimit { what: "uniqueness probe width", value: k, limit: 3 });
    }
    cache.ensure(k)?;
    let limits = cache.limits;
    let lambda = cache.lambda.clone();
    let basis = enumerate_basis(k, &limits)?;
    let index = |d: &MotzkinDiagram| basis.binary_search(d).expect("basis is complete");
    let g = cache.g[k].clone();
    let ps: Vec<AlgebraElement> =
        (1..k).map(|i| AlgebraElement::generator(k, Generator::P(i), lambda.clone())).collect::<Result<_>>()?;

    // Column j holds the images of basis element j under each linear map.
    let maps = 2 * ps.len() + 1;
    let m = basis.len();
    let mut rows = alloc::vec![alloc::vec![Scalar::zero(); m]; maps * m];
    for (j, d) in basis.iter().enumerate() {
        let y = AlgebraElement::from_diagram(d.clone(), lambda.clone());
        let mut images = Vec::with_capacity(maps);
        for p in &ps {
            images.push(y.multiply(p, &limits)?);
            images.push(p.multiply(&y, &limits)?);
        }
        images.push(g.multiply(&y, &limits)?.sub(&y)?);
        for (b, img) in images.iter().enumerate() {
            for (e, c) in img.terms() {
                rows[b * m + index(e)][j] = c.clone();
            }
        }
    }
    let ns = nullspace(rows, m);
    let spanned_by_g = ns.len() == 1 && {
        let v = &ns[0];
        let mut gv = alloc::vec![Scalar::zero(); m];
        for (d, c) in g.terms() {
            gv[index(d)] = c.clone();
        }
        let pivot = gv.iter().position(|c| !c.is_zero()).unwrap();
        let ratio = &v[pivot] / &gv[pivot];
        v.iter().zip(&gv).all(|(a, b)| *a == &ratio * b)
    };
    Ok(UniquenessProbe { k, solution_dimension: ns.len(), spanned_by_g })
}
