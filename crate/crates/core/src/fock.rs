//! The subproduct system `H_k = G_k H^{⊗k}`, the truncated Fock space
//! `F_N = ⊕_{k ≤ N} H_k` and its creation operators.
//!
//! Levels are built in compressed coordinates. With `B_k` an orthonormal
//! basis of `H_k` and `W = I ⊗ B_k`, the recursion reads
//! `G_{k+1} = W M W*` where
//!
//! ```text
//! M = (I − P) ⊗ I_{d_k} − φ(k)·Y Y*,   Y = W*(v_A ⊗ I_{n^{k−1}}),
//! ```
//!
//! so only the `n·d_k`-dimensional matrix `M` is ever diagonalised. The
//! literal `n^k × n^k` recursion is kept in [`subproduct_projection`] for
//! cross-checking.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Zero;

use crate::check::Checks;
use crate::config::{checked_pow, Limits};
use crate::error::{Error, Result};
use crate::linalg::{
    c, identity, operator_norm, rank_and_gap, round_projection, sandwich, GramSchmidt, Mat, Vector, C64,
};
use crate::qpoly::{dim_subproduct, is_generic, reverse_coefficient, reverse_coefficient_closed, PhiFunction};
use crate::representation::{LinearOperator, MotzkinPair, Space};
use crate::scalar::{to_f64, Scalar};

/// Eigenvalue threshold separating the range of `G_k` from its kernel.
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Eigenvalues this close to 0 or 1 are snapped when rounding.
pub const SNAP: f64 = 1e-6;
/// Required ratio between the smallest kept and largest dropped eigenvalue.
pub const MIN_GAP: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct Level {
    pub k: usize,
    pub dim: usize,
    pub expected: u64,
    /// Spectrum of the compressed matrix (empty at level 0).
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub gap: f64,
    pub rounding: f64,
    pub max_eigen_offset: f64,
    /// Coordinates of `B_k` inside `H ⊗ H_{k−1}`; absent at level 0.
    pub compressed: Option<Mat>,
    /// `B_k` itself, kept while `n^k` stays within `max_dim`.
    pub basis: Option<Mat>,
}

#[derive(Debug, Clone)]
pub struct SubproductData {
    pair: MotzkinPair,
    levels: Vec<Level>,
    phi: PhiFunction,
}

impl SubproductData {
    /// Builds levels `0..=n_levels`.
    pub fn build(pair: &MotzkinPair, n_levels: usize, limits: &Limits) -> Result<Self> {
        let lambda = pair.lambda();
        if !is_generic(lambda.value(), n_levels.max(1))? {
            return Err(Error::SingularParameter(format!("λ⁻¹ is not {n_levels}-generic")));
        }
        let phi = PhiFunction::new(lambda, n_levels + 1)?;
        let n = pair.n();
        let mut levels = vec![Level {
            k: 0,
            dim: 1,
            expected: 1,
            eigenvalues: Vec::new(),
            rank: 1,
            gap: f64::INFINITY,
            rounding: 0.0,
            max_eigen_offset: 0.0,
            compressed: None,
            basis: Some(identity(1)),
        }];
        let p = pair.p_matrix();
        let ip = identity(n) - &p;
        let a = pair.a();
        for k in 0..n_levels {
            let prev = &levels[k];
            let bk = prev.basis.as_ref().ok_or(Error::ResourceLimit {
                what: "n^k",
                value: checked_pow(n, k).unwrap_or(usize::MAX),
                limit: limits.max_dim,
            })?;
            let d = prev.dim;
            let nd = n * d;
            limits.check_dense(nd)?;
            let mut m = ip.kronecker(&identity(d));
            if k >= 1 {
                let tail = n.pow(k as u32 - 1);
                let mut y = Mat::zeros(nd, tail);
                for i in 0..n {
                    let ib = pair.bar(i);
                    for cc in 0..d {
                        for beta in 0..tail {
                            y[(i * d + cc, beta)] = a[i] * bk[(ib * tail + beta, cc)].conj();
                        }
                    }
                }
                m -= &y * y.adjoint() * c(phi.value(Some(k)));
            }
            let rounded = round_projection(&m, SNAP);
            let (rank, gap) = rank_and_gap(&rounded.eigenvalues, RANK_THRESHOLD);
            let expected = dim_subproduct(n, k + 1)?;
            // Gram–Schmidt of G_{k+1} e_α, α lexicographic, in W-coordinates.
            let width = n.pow(k as u32);
            let bstar = bk.adjoint();
            let mut gs = GramSchmidt::absolute(RANK_THRESHOLD);
            'outer: for a1 in 0..n {
                let block = rounded.matrix.columns(a1 * d, d) * &bstar;
                for rest in 0..width {
                    gs.offer(block.column(rest).into_owned());
                    if gs.len() as u64 == expected {
                        break 'outer;
                    }
                }
            }
            if gs.len() as u64 != expected {
                return Err(Error::Consistency(format!(
                    "level {}: found {} basis vectors, expected {expected}",
                    k + 1,
                    gs.len()
                )));
            }
            let cmat = gs.to_matrix(nd);
            let basis = if checked_pow(n, k + 1).is_some_and(|x| x <= limits.max_dim) {
                let dk1 = cmat.ncols();
                let mut b = Mat::zeros(n * bk.nrows(), dk1);
                for i in 0..n {
                    let blk = bk * cmat.rows(i * d, d);
                    b.rows_mut(i * bk.nrows(), bk.nrows()).copy_from(&blk);
                }
                Some(b)
            } else {
                None
            };
            levels.push(Level {
                k: k + 1,
                dim: cmat.ncols(),
                expected,
                eigenvalues: rounded.eigenvalues,
                rank,
                gap,
                rounding: rounded.rounding,
                max_eigen_offset: rounded.max_eigen_offset,
                compressed: Some(cmat),
                basis,
            });
        }
        Ok(SubproductData { pair: pair.clone(), levels, phi })
    }

    pub fn pair(&self) -> &MotzkinPair {
        &self.pair
    }

    pub fn phi(&self) -> &PhiFunction {
        &self.phi
    }

    /// Truncation level `N`.
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.dim).collect()
    }

    fn level(&self, k: usize) -> Result<&Level> {
        self.levels.get(k).ok_or(Error::IndexOutOfRange { name: "level", index: k, width: self.top() })
    }

    /// `B_k`, columns an orthonormal basis of `H_k`.
    pub fn basis(&self, k: usize) -> Result<&Mat> {
        self.level(k)?.basis.as_ref().ok_or(Error::ResourceLimit {
            what: "n^k",
            value: checked_pow(self.pair.n(), k).unwrap_or(usize::MAX),
            limit: 0,
        })
    }

    /// `G_k = B_k B_k*` as a dense matrix.
    pub fn projection(&self, k: usize, limits: &Limits) -> Result<LinearOperator> {
        let dim = limits.check_dim(self.pair.n(), k)?;
        limits.check_dense(dim)?;
        let b = self.basis(k)?;
        Ok(LinearOperator::tensor(self.pair.n(), k, b * b.adjoint()))
    }

    /// The block `H_k → H_{k+1}` of `ξ ↦ G_{k+1}(u ⊗ ξ)`, i.e.
    /// `C_{k+1}* (u ⊗ I_{d_k})`.
    pub fn creation_block(&self, u: &Vector, k: usize) -> Result<Mat> {
        let next = self.level(k + 1)?;
        let cm = next.compressed.as_ref().expect("levels above 0 carry coordinates");
        let d = self.levels[k].dim;
        let mut out = Mat::zeros(next.dim, d);
        for (i, ui) in u.iter().enumerate() {
            if *ui != c(0.0) {
                out += cm.rows(i * d, d).adjoint() * *ui;
            }
        }
        Ok(out)
    }

    /// Rank, gap, orthonormality and co-associativity of every level, plus
    /// agreement with the literal recursion wherever it fits in `limits`.
    pub fn checks(&self, limits: &Limits) -> Result<Checks> {
        let mut out = Checks::new();
        let n = self.pair.n();
        for l in &self.levels[1..] {
            out.flag(format!("rank G_{} = {}", l.k, l.expected), Some(l.k), l.rank as u64 == l.expected);
            out.flag(format!("eigenvalue gap G_{} >= 1e3", l.k), Some(l.k), l.gap >= MIN_GAP);
            out.info(format!("rounding G_{}", l.k), Some(l.k), l.rounding);
            let cm = l.compressed.as_ref().expect("compressed coordinates");
            let ortho = (cm.adjoint() * cm - identity(l.dim)).norm();
            out.residual(format!("B_{}* B_{} = I", l.k, l.k), Some(l.k), ortho, 1e-10);
        }
        let mut literal: Option<Mat> = None;
        for k in 1..=self.top() {
            let Some(dim) = checked_pow(n, k).filter(|&d| d <= limits.max_dense_dim) else { break };
            let _ = dim;
            let g = literal_step(&self.pair, &self.phi, k, literal.as_ref())?;
            let (idem, herm) = crate::linalg::projection_defect(&g.matrix);
            out.residual(format!("G_{k} idempotent"), Some(k), idem, 1e-10);
            out.residual(format!("G_{k} hermitian"), Some(k), herm, 1e-10);
            let b = self.basis(k)?;
            out.residual(format!("G_{k} = B_{k} B_{k}*"), Some(k), (&g.matrix - b * b.adjoint()).norm(), 1e-10);
            literal = Some(g.matrix);
        }
        for total in 2..=self.top() {
            let Ok(b) = self.basis(total) else { break };
            for p in 1..total {
                let q = total - p;
                let (left, right) = coassociativity(b, self.basis(p)?, self.basis(q)?, n, p, q);
                out.residual(format!("G_{total} <= G_{p} ⊗ I"), Some(total), left, 1e-10);
                out.residual(format!("G_{total} <= I ⊗ G_{q}"), Some(total), right, 1e-10);
            }
        }
        Ok(out)
    }
}

/// `‖(G_p ⊗ I)B − B‖` and `‖(I ⊗ G_q)B − B‖` for `B` spanning `H_{p+q}`.
fn coassociativity(b: &Mat, bp: &Mat, bq: &Mat, n: usize, p: usize, q: usize) -> (f64, f64) {
    let (rows, cols) = (n.pow(p as u32), n.pow(q as u32));
    let (mut left, mut right) = (0.0, 0.0);
    let bq_conj = bq.map(|z| z.conj());
    for col in b.column_iter() {
        let x = Mat::from_fn(rows, cols, |i, j| col[i * cols + j]);
        let l = bp * (bp.adjoint() * &x) - &x;
        let r = (&x * &bq_conj) * bq.transpose() - &x;
        left += l.norm_squared();
        right += r.norm_squared();
    }
    (libm::sqrt(left), libm::sqrt(right))
}

/// A projection built by the literal recursion.
#[derive(Debug, Clone)]
pub struct Projection {
    pub matrix: Mat,
    pub rounding: f64,
    pub max_eigen_offset: f64,
}

fn literal_step(pair: &MotzkinPair, phi: &PhiFunction, k: usize, prev: Option<&Mat>) -> Result<Projection> {
    let n = pair.n();
    let ip = identity(n) - pair.p_matrix();
    if k == 1 {
        return Ok(Projection { matrix: ip, rounding: 0.0, max_eigen_offset: 0.0 });
    }
    let gk = prev.ok_or_else(|| Error::Consistency("missing previous level".into()))?;
    let lifted = identity(n).kronecker(gk);
    let t1 = sandwich(1, &pair.t_matrix(), n.pow(k as u32 - 2));
    let first = &lifted * ip.kronecker(&identity(n.pow(k as u32 - 1)));
    let raw = first - &lifted * t1 * &lifted * c(phi.value(Some(k - 1)));
    let r = round_projection(&raw, SNAP);
    Ok(Projection { matrix: r.matrix, rounding: r.rounding, max_eigen_offset: r.max_eigen_offset })
}

/// `G_k` by the matrix recursion
/// `G_{k+1} = (I⊗G_k)((I−P)⊗I) − φ(k)(I⊗G_k)T_1(I⊗G_k)`, `G_1 = I − P`,
/// with spectral rounding whenever `‖G² − G‖ > 1e−12`.
pub fn subproduct_projection(pair: &MotzkinPair, k: usize, limits: &Limits) -> Result<(LinearOperator, Projection)> {
    let dim = limits.check_dim(pair.n(), k)?;
    limits.check_dense(dim)?;
    if !is_generic(pair.lambda().value(), k.max(1))? {
        return Err(Error::SingularParameter(format!("λ⁻¹ is not {k}-generic")));
    }
    if k == 0 {
        let one = Projection { matrix: identity(1), rounding: 0.0, max_eigen_offset: 0.0 };
        return Ok((LinearOperator::tensor(pair.n(), 0, identity(1)), one));
    }
    let phi = PhiFunction::new(pair.lambda(), k)?;
    let mut cur: Option<Projection> = None;
    let mut worst = (0.0f64, 0.0f64);
    for j in 1..=k {
        let next = literal_step(pair, &phi, j, cur.as_ref().map(|p| &p.matrix))?;
        worst = (worst.0.max(next.rounding), worst.1.max(next.max_eigen_offset));
        cur = Some(next);
    }
    let mut g = cur.expect("k ≥ 1");
    g.rounding = worst.0;
    g.max_eigen_offset = worst.1;
    Ok((LinearOperator::tensor(pair.n(), k, g.matrix.clone()), g))
}

/// `B_k`: Gram–Schmidt of `G_k e_α` over the product basis in lexicographic
/// order.
pub fn orthonormal_basis(data: &SubproductData, k: usize) -> Result<Mat> {
    data.basis(k).cloned()
}

/// `⟨a, b⟩ = e^{2πi ab/(2r)}`.
pub fn root_pairing(a: i64, b: i64, r: usize) -> C64 {
    let m = 2 * r as i64;
    let e = (a * b).rem_euclid(m) as f64;
    C64::from_polar(1.0, 2.0 * PI * e / m as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    /// `S_i = S_{v_i}` for `i ∈ J°`.
    Plain,
    /// `S_{j_s} = S_{w_s}`.
    Fourier { s: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Label {
    /// Zero-based basis index `i` (or `j_s`).
    pub index: usize,
    pub kind: LabelKind,
    /// The vector `v_i` or `w_s` in `H`.
    pub vector: Vector,
}

/// Index sets `J`, `J°` and the generating vectors of `H_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeling {
    /// `r = 0` for the centred family.
    pub r: usize,
    /// `j_1, …, j_{2r}` (zero-based).
    pub j: Vec<usize>,
    /// Fourier labels first (`s = 1..2r−1`), then `J°` ascending.
    pub labels: Vec<Label>,
}

impl Labeling {
    /// Reads `r` off `supp(v)`: either a single middle index, or the first
    /// and last `r` indices with equal weights `1/√(2r)`.
    pub fn detect(pair: &MotzkinPair) -> Result<Self> {
        let n = pair.n();
        let tol = 1e-10;
        let supp = pair.support(tol);
        let b = pair.b();
        let r = if supp.len() == 1 && n % 2 == 1 && supp[0] == n / 2 {
            0
        } else {
            let r = supp.len() / 2;
            let expect: Vec<usize> = (0..r).chain(n - r..n).collect();
            let w = 1.0 / libm::sqrt(2.0 * r as f64);
            if r == 0 || supp != expect || supp.iter().any(|&i| (b[i] - c(w)).norm() > tol) {
                return Err(Error::Parameter(
                    "v is neither a middle basis vector nor uniform on the first and last r indices".into(),
                ));
            }
            r
        };
        Self::with_r(n, r)
    }

    pub fn with_r(n: usize, r: usize) -> Result<Self> {
        if 2 * r > n {
            return Err(Error::Parameter(format!("2r = {} exceeds n = {n}", 2 * r)));
        }
        let mut labels = Vec::new();
        let j: Vec<usize> = (0..r).chain(n - r..n).collect();
        if r > 0 {
            let norm = 1.0 / libm::sqrt(2.0 * r as f64);
            for s in 1..2 * r {
                let mut w = Vector::zeros(n);
                for (k, &jk) in j.iter().enumerate() {
                    w[jk] = root_pairing(k as i64 + 1, s as i64, r) * norm;
                }
                labels.push(Label { index: j[s - 1], kind: LabelKind::Fourier { s }, vector: w });
            }
        }
        let centre_only = r == 0;
        for i in r..n - r {
            if centre_only && n % 2 == 1 && i == n / 2 {
                continue;
            }
            let mut v = Vector::zeros(n);
            v[i] = c(1.0);
            labels.push(Label { index: i, kind: LabelKind::Plain, vector: v });
        }
        Ok(Labeling { r, j, labels })
    }

    pub fn plain(&self) -> impl Iterator<Item = (usize, &Label)> {
        self.labels.iter().enumerate().filter(|(_, l)| l.kind == LabelKind::Plain)
    }

    pub fn fourier(&self) -> impl Iterator<Item = (usize, usize, &Label)> {
        self.labels.iter().enumerate().filter_map(|(p, l)| match l.kind {
            LabelKind::Fourier { s } => Some((p, s, l)),
            LabelKind::Plain => None,
        })
    }

    /// Position of the plain label with basis index `i`.
    pub fn plain_position(&self, i: usize) -> Option<usize> {
        self.plain().find(|(_, l)| l.index == i).map(|(p, _)| p)
    }

    /// Position of the Fourier label `s`.
    pub fn fourier_position(&self, s: usize) -> Option<usize> {
        self.fourier().find(|(_, t, _)| *t == s).map(|(p, _, _)| p)
    }
}

/// Creation operators on `F_N`, stored as their level blocks.
#[derive(Debug, Clone)]
pub struct ToeplitzOps {
    data: SubproductData,
    labeling: Labeling,
    offsets: Vec<usize>,
    /// `blocks[label][k]`: `H_k → H_{k+1}` for `k < N`.
    blocks: Vec<Vec<Mat>>,
}

pub fn creation_operators(data: SubproductData) -> Result<ToeplitzOps> {
    let labeling = Labeling::detect(data.pair())?;
    ToeplitzOps::with_labeling(data, labeling)
}

impl ToeplitzOps {
    pub fn with_labeling(data: SubproductData, labeling: Labeling) -> Result<Self> {
        if labeling.labels.len() + 1 != data.pair().n() {
            return Err(Error::Parameter("labeling does not match n".into()));
        }
        let mut offsets = vec![0];
        for d in data.dims() {
            offsets.push(offsets.last().unwrap() + d);
        }
        let top = data.top();
        let blocks = labeling
            .labels
            .iter()
            .map(|l| (0..top).map(|k| data.creation_block(&l.vector, k)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ToeplitzOps { data, labeling, offsets, blocks })
    }

    pub fn data(&self) -> &SubproductData {
        &self.data
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn top(&self) -> usize {
        self.data.top()
    }

    pub fn fock_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn space(&self) -> Space {
        Space::Fock { n: self.data.pair().n(), levels: self.top() }
    }

    pub fn block(&self, label: usize, k: usize) -> &Mat {
        &self.blocks[label][k]
    }

    /// `S_label S_label'*` restricted to `H_m` (zero on `H_0`).
    fn outer(&self, x: usize, y: usize, m: usize) -> Mat {
        let d = self.data.levels[m].dim;
        if m == 0 {
            return Mat::zeros(d, d);
        }
        &self.blocks[x][m - 1] * self.blocks[y][m - 1].adjoint()
    }

    /// `S_x* S_y` on `H_m`, `m < N`.
    fn inner(&self, x: usize, y: usize, m: usize) -> Mat {
        self.blocks[x][m].adjoint() * &self.blocks[y][m]
    }

    /// `S_label` as a matrix on `F_N`.
    pub fn full(&self, label: usize) -> LinearOperator {
        let dim = self.fock_dim();
        let mut m = Mat::zeros(dim, dim);
        for (k, b) in self.blocks[label].iter().enumerate() {
            m.view_mut((self.offsets[k + 1], self.offsets[k]), b.shape()).copy_from(b);
        }
        LinearOperator { domain: self.space(), codomain: self.space(), matrix: m }
    }

    /// `e_m`.
    pub fn level_projection(&self, m: usize) -> Mat {
        let dim = self.fock_dim();
        let mut e = Mat::zeros(dim, dim);
        for i in self.offsets[m]..self.offsets[m + 1] {
            e[(i, i)] = c(1.0);
        }
        e
    }

    /// `f(N̂) = Σ_m f(m) e_m`.
    pub fn function_of_level(&self, f: impl Fn(usize) -> f64) -> Mat {
        let dim = self.fock_dim();
        let mut e = Mat::zeros(dim, dim);
        for m in 0..=self.top() {
            for i in self.offsets[m]..self.offsets[m + 1] {
                e[(i, i)] = c(f(m));
            }
        }
        e
    }

    fn a(&self, i: usize) -> C64 {
        self.data.pair().a()[i]
    }

    /// Coefficients `(x, y, z)` of `Σ z S_x S_y`, the degree-two relation.
    pub fn ideal_coefficients(&self) -> Vec<(usize, usize, C64)> {
        let lab = &self.labeling;
        let mut out = Vec::new();
        if lab.r > 0 {
            let a1 = self.a(lab.j[0]);
            for (p, s, _) in lab.fourier() {
                out.push((p, p, a1 * root_pairing(1, -(s as i64), lab.r)));
            }
        }
        let pair = self.data.pair();
        for (p, l) in lab.plain() {
            let q = lab.plain_position(pair.bar(l.index)).expect("J° is closed under bar");
            out.push((p, q, self.a(l.index)));
        }
        out
    }
}

fn pos_name(ops: &ToeplitzOps, p: usize) -> String {
    let l = &ops.labeling.labels[p];
    match l.kind {
        LabelKind::Plain => format!("{}", l.index + 1),
        LabelKind::Fourier { s } => format!("j{s}"),
    }
}

/// Residuals of the six Toeplitz relations on truncation-exact levels.
///
/// The Fourier-label relation is checked as `S_{j_s'}* S_{j_s} = δ − φλ⟨s−s',1⟩ S_{j_s'} S_{j_s}*`;
/// the transposed product `S_{j_s} S_{j_s'}*` is recorded alongside as an
/// informational value.
pub fn toeplitz_residuals(ops: &ToeplitzOps, tol: f64) -> Checks {
    let mut out = Checks::new();
    let top = ops.top();
    let nl = ops.labeling.labels.len();
    let lam = ops.data.pair().lambda().to_f64();

    for p in 0..nl {
        let s = ops.full(p).matrix;
        for m in 0..=top {
            let r = (ops.level_projection((m + 1).min(top)) * &s - &s * ops.level_projection(m)).norm();
            let r = if m == top { (&s * ops.level_projection(m)).norm() } else { r };
            out.residual(
                format!("covariance e_(m+1) S_{} = S_{} e_m", pos_name(ops, p), pos_name(ops, p)),
                Some(m),
                r,
                tol,
            );
        }
        for kk in 0..4usize {
            let f = |m: usize| 1.0 + 1.0 / ((1.0 + m as f64) * (1.0 + kk as f64));
            let lhs = ops.function_of_level(f) * &s;
            let rhs = &s * ops.function_of_level(|m| f(m + 1));
            out.residual(
                format!("covariance f_{kk} S_{} = S_{} shift(f_{kk})", pos_name(ops, p), pos_name(ops, p)),
                None,
                (lhs - rhs).norm(),
                tol,
            );
        }
    }

    for m in 0..top {
        let d = ops.data.levels[m].dim;
        let mut sum = Mat::zeros(d, d);
        for p in 0..nl {
            sum += ops.outer(p, p, m);
        }
        let target = if m == 0 { Mat::zeros(d, d) } else { identity(d) };
        out.residual("row sum: sum S_i S_i* = 1 - e_0", Some(m), (sum - target).norm(), tol);
    }

    let ideal = ops.ideal_coefficients();
    for m in 0..top.saturating_sub(1) {
        let mut sum = Mat::zeros(ops.data.levels[m + 2].dim, ops.data.levels[m].dim);
        for &(x, y, z) in &ideal {
            sum += &ops.blocks[x][m + 1] * &ops.blocks[y][m] * z;
        }
        out.residual("quadratic relation", Some(m), sum.norm(), tol);
    }

    let pair = ops.data.pair();
    let plain: Vec<(usize, usize)> = ops.labeling.plain().map(|(p, l)| (p, l.index)).collect();
    let fourier: Vec<(usize, usize, usize)> = ops.labeling.fourier().map(|(p, s, l)| (p, s, l.index)).collect();
    let bar_pos = |i: usize| ops.labeling.plain_position(pair.bar(i)).expect("J° closed under bar");
    for m in 0..top {
        let phi = ops.data.phi.value(Some(m));
        let d = ops.data.levels[m].dim;
        for &(pi, i) in &plain {
            for &(pj, j) in &plain {
                let delta = if i == j { identity(d) } else { Mat::zeros(d, d) };
                let rhs = delta - ops.outer(bar_pos(j), bar_pos(i), m) * (ops.a(i).conj() * ops.a(j) * phi);
                out.residual(
                    format!("plain S_{}* S_{}", j + 1, i + 1),
                    Some(m),
                    (ops.inner(pj, pi, m) - rhs).norm(),
                    tol,
                );
            }
        }
        for &(ps, s, js) in &fourier {
            for &(pj, j) in &plain {
                let coeff = ops.a(js).conj() * ops.a(j) * root_pairing(s as i64, 1, ops.labeling.r) * phi;
                let rhs = ops.outer(bar_pos(j), ps, m) * (-coeff);
                out.residual(format!("mixed S_{}* S_j{s}", j + 1), Some(m), (ops.inner(pj, ps, m) - rhs).norm(), tol);
            }
        }
        for &(ps, s, _) in &fourier {
            for &(pt, t, _) in &fourier {
                let delta = if s == t { identity(d) } else { Mat::zeros(d, d) };
                let coeff = root_pairing(s as i64 - t as i64, 1, ops.labeling.r) * (phi * lam);
                let lhs = ops.inner(pt, ps, m);
                let rhs = &delta - ops.outer(pt, ps, m) * coeff;
                out.residual(format!("fourier S_j{t}* S_j{s}"), Some(m), (&lhs - rhs).norm(), tol);
                if s != t {
                    let transposed = delta - ops.outer(ps, pt, m) * coeff;
                    out.info(
                        format!("fourier, transposed ordering: S_j{t}* S_j{s}"),
                        Some(m),
                        (lhs - transposed).norm(),
                    );
                }
            }
        }
    }
    out
}

/// `dim span{S_α S_β* e_k : |α| = |β| = k}`.
pub fn matrix_unit_dimension(ops: &ToeplitzOps, k: usize, limits: &Limits) -> Result<usize> {
    if k >= ops.top() {
        return Err(Error::Domain(format!("matrix units need k < N = {}", ops.top())));
    }
    let nl = ops.labeling.labels.len();
    let words = checked_pow(nl, k).filter(|&w| w <= limits.max_words).ok_or(Error::ResourceLimit {
        what: "(n−1)^k",
        value: checked_pow(nl, k).unwrap_or(usize::MAX),
        limit: limits.max_words,
    })?;
    // S_α e_0 for every word α
    let mut vecs: Vec<Vector> = vec![Vector::from_element(1, c(1.0))];
    for level in 0..k {
        let mut next = Vec::with_capacity(vecs.len() * nl);
        for x in 0..nl {
            for v in &vecs {
                next.push(&ops.blocks[x][level] * v);
            }
        }
        vecs = next;
    }
    debug_assert_eq!(vecs.len(), words);
    let d = ops.data.levels[k].dim;
    let target = d * d;
    let mut gs = GramSchmidt::relative(RANK_THRESHOLD);
    'outer: for x in &vecs {
        for y in &vecs {
            let unit = x * y.adjoint();
            gs.offer(crate::linalg::vectorize(&unit));
            if gs.len() == target {
                break 'outer;
            }
        }
    }
    Ok(gs.len())
}

/// Block-diagonal part of an operator on `F_N`: the exact average over the
/// gauge action `S_i ↦ z S_i`.
pub fn gauge_average(ops: &ToeplitzOps, x: &LinearOperator) -> Result<LinearOperator> {
    let dim = ops.fock_dim();
    if x.matrix.shape() != (dim, dim) {
        return Err(Error::Structural(format!("expected a {dim}×{dim} operator on F_N")));
    }
    let mut out = Mat::zeros(dim, dim);
    for m in 0..=ops.top() {
        let (o, d) = (ops.offsets[m], ops.offsets[m + 1] - ops.offsets[m]);
        out.view_mut((o, o), (d, d)).copy_from(&x.matrix.view((o, o), (d, d)));
    }
    Ok(LinearOperator { domain: ops.space(), codomain: ops.space(), matrix: out })
}

#[derive(Debug, Clone)]
pub struct ReverseIdentity {
    pub k: usize,
    /// `1 − λ − λ²φ(k−1)`, exact.
    pub coefficient: Scalar,
    /// `λ[k+1]_q/[k]_q`.
    pub closed_form: f64,
    /// `‖Σ_i |a_ī|² S_i* e_k S_i − coefficient·e_{k−1}‖`.
    pub residual: f64,
    pub closed_form_residual: f64,
}

pub fn reverse_identity(ops: &ToeplitzOps, k: usize) -> Result<ReverseIdentity> {
    if k < 2 || k > ops.top() {
        return Err(Error::Domain(format!("reverse identity needs 2 ≤ k ≤ N = {}", ops.top())));
    }
    let pair = ops.data.pair();
    let coefficient = reverse_coefficient(k - 1, pair.lambda())?;
    let closed_form = reverse_coefficient_closed(k - 1, pair.lambda());
    let d = ops.data.levels[k - 1].dim;
    let mut sum = Mat::zeros(d, d);
    for (p, l) in ops.labeling.labels.iter().enumerate() {
        let w = pair.a()[pair.bar(l.index)].norm_sqr();
        sum += ops.inner(p, p, k - 1) * c(w);
    }
    let coef = to_f64(&coefficient);
    let residual = (sum - identity(d) * c(coef)).norm();
    Ok(ReverseIdentity { k, coefficient, closed_form, residual, closed_form_residual: (coef - closed_form).abs() })
}

#[derive(Debug, Clone)]
pub struct IdealGenerator {
    /// `(x, y, z)`: the term `z·u_x ⊗ u_y` in label positions.
    pub coefficients: Vec<(usize, usize, C64)>,
    /// The same vector in `H ⊗ H`.
    pub vector: Vector,
    /// `c` with `vector ≈ c·(I−P)^{⊗2} v_A`.
    pub scale: C64,
    pub parallel_residual: f64,
    /// `‖B_2* vector‖`.
    pub orthogonality: f64,
    pub complement_dim: usize,
    /// `‖G_2 − ((I−P)^{⊗2} − ẑẑ*)‖`.
    pub complement_residual: f64,
}

pub fn ideal_generator(ops: &ToeplitzOps) -> Result<IdealGenerator> {
    let pair = ops.data.pair();
    let n = pair.n();
    if ops.top() < 2 {
        return Err(Error::Domain("the ideal generator needs N ≥ 2".into()));
    }
    let coefficients = ops.ideal_coefficients();
    let mut z = Vector::zeros(n * n);
    for &(x, y, w) in &coefficients {
        let (ux, uy) = (&ops.labeling.labels[x].vector, &ops.labeling.labels[y].vector);
        z += ux.kronecker(uy) * w;
    }
    let ip = identity(n) - pair.p_matrix();
    let proj = ip.kronecker(&ip);
    let target = &proj * pair.v_a();
    let tt = target.norm_squared();
    let scale = if tt.is_zero() { c(0.0) } else { target.dotc(&z) / c(tt) };
    let parallel_residual = (&z - &target * scale).norm() / z.norm().max(1.0);
    let b2 = ops.data.basis(2)?;
    let orthogonality = (b2.adjoint() * &z).norm();
    let zh = &z / c(z.norm());
    let complement = &proj - &zh * zh.adjoint();
    let complement_residual = (b2 * b2.adjoint() - complement).norm();
    Ok(IdealGenerator {
        coefficients,
        vector: z,
        scale,
        parallel_residual,
        orthogonality,
        complement_dim: (n - 1) * (n - 1) - 1,
        complement_residual,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct CpRow {
    pub m: usize,
    /// Largest operator-norm residual of the S*S relations with `φ_∞` in place of `φ(m)`.
    pub residual: f64,
    pub phi_m: f64,
    /// `|φ(m) − φ_∞|`.
    pub defect: f64,
    /// `max ‖S S*‖·max |ā_i a_j|` over the same relations.
    pub constant: f64,
    /// `residual / defect`.
    pub factor: f64,
}

/// Cuntz–Pimsner relations with the limit constant `φ_∞`, evaluated on `H_m`.
pub fn cuntz_pimsner_residual(ops: &ToeplitzOps, m: usize) -> Result<CpRow> {
    if m >= ops.top() {
        return Err(Error::Domain(format!("level {m} is not below N = {}", ops.top())));
    }
    let pair = ops.data.pair();
    let lam = pair.lambda().to_f64();
    let phi = ops.data.phi.value(Some(m));
    let inf = ops.data.phi.limit();
    let d = ops.data.levels[m].dim;
    let bar_pos = |i: usize| ops.labeling.plain_position(pair.bar(i)).expect("J° closed under bar");
    let (mut residual, mut norm_max, mut coeff_max) = (0.0f64, 0.0f64, 0.0f64);
    let mut record = |lhs: Mat, delta: bool, outer: Mat, coeff: C64| {
        let rhs = if delta { identity(d) } else { Mat::zeros(d, d) } - &outer * (coeff * inf);
        residual = residual.max(operator_norm(&(lhs - rhs)));
        norm_max = norm_max.max(operator_norm(&outer));
        coeff_max = coeff_max.max(coeff.norm());
    };
    let plain: Vec<(usize, usize)> = ops.labeling.plain().map(|(p, l)| (p, l.index)).collect();
    let fourier: Vec<(usize, usize, usize)> = ops.labeling.fourier().map(|(p, s, l)| (p, s, l.index)).collect();
    for &(pi, i) in &plain {
        for &(pj, j) in &plain {
            record(ops.inner(pj, pi, m), i == j, ops.outer(bar_pos(j), bar_pos(i), m), ops.a(i).conj() * ops.a(j));
        }
        for &(ps, s, js) in &fourier {
            let coeff = ops.a(js).conj() * ops.a(i) * root_pairing(s as i64, 1, ops.labeling.r);
            record(ops.inner(pi, ps, m), false, ops.outer(bar_pos(i), ps, m), coeff);
        }
    }
    for &(ps, s, _) in &fourier {
        for &(pt, t, _) in &fourier {
            let coeff = root_pairing(s as i64 - t as i64, 1, ops.labeling.r) * lam;
            record(ops.inner(pt, ps, m), s == t, ops.outer(pt, ps, m), coeff);
        }
    }
    let defect = (phi - inf).abs();
    let factor = if defect > 0.0 { residual / defect } else { 0.0 };
    Ok(CpRow { m, residual, phi_m: phi, defect, constant: norm_max * coeff_max, factor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::{build_example_pair, ExampleFamily};
    use crate::scalar::{ratio, Lambda};

    fn pair(family: ExampleFamily, n: usize, r: usize, den: i64) -> MotzkinPair {
        build_example_pair(family, n, r, &Lambda::from_ratio(1, den).unwrap()).unwrap()
    }

    #[test]
    fn dims_and_invariants() {
        let limits = Limits::default();
        let data = SubproductData::build(&pair(ExampleFamily::III, 4, 1, 4), 4, &limits).unwrap();
        assert_eq!(data.dims(), vec![1, 3, 8, 21, 55]);
        let checks = data.checks(&limits).unwrap();
        assert!(checks.all_pass(), "{:?}", checks.failures().collect::<Vec<_>>());
        let data = SubproductData::build(&pair(ExampleFamily::I, 3, 0, 3), 4, &limits).unwrap();
        assert_eq!(data.dims(), vec![1, 2, 3, 4, 5]);
        assert!(data.checks(&limits).unwrap().all_pass());
    }

    #[test]
    fn literal_matches_compressed() {
        let limits = Limits::default();
        let p = pair(ExampleFamily::III, 4, 1, 4);
        let data = SubproductData::build(&p, 3, &limits).unwrap();
        let (g, info) = subproduct_projection(&p, 3, &limits).unwrap();
        assert!(info.rounding < 1e-8);
        let b = data.basis(3).unwrap();
        assert!((g.matrix - b * b.adjoint()).norm() < 1e-10);
        let b1 = orthonormal_basis(&data, 1).unwrap();
        assert_eq!(b1.ncols(), 3);
        assert!((b1.adjoint() * p.v()).norm() < 1e-12);
    }

    #[test]
    fn toeplitz_relations_r1() {
        let limits = Limits::default();
        let data = SubproductData::build(&pair(ExampleFamily::III, 4, 1, 4), 5, &limits).unwrap();
        let ops = creation_operators(data).unwrap();
        assert_eq!(ops.fock_dim(), 1 + 3 + 8 + 21 + 55 + 144);
        let r = toeplitz_residuals(&ops, 1e-9);
        assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn toeplitz_relations_centred() {
        let limits = Limits::default();
        let data = SubproductData::build(&pair(ExampleFamily::I, 3, 0, 3), 5, &limits).unwrap();
        let ops = creation_operators(data).unwrap();
        assert!(ops.labeling().fourier().next().is_none());
        let r = toeplitz_residuals(&ops, 1e-9);
        assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn toeplitz_relations_r2() {
        let limits = Limits::default();
        for (n, den) in [(5, 5), (6, 8)] {
            let data = SubproductData::build(&pair(ExampleFamily::III, n, 2, den), 3, &limits).unwrap();
            let ops = creation_operators(data).unwrap();
            let r = toeplitz_residuals(&ops, 1e-9);
            assert!(r.all_pass(), "n={n}: {:?}", r.failures().collect::<Vec<_>>());
            // the transposed ordering of the Fourier relation does not hold once r ≥ 2
            let worst =
                r.items.iter().filter(|c| c.name.contains("transposed")).map(|c| c.residual).fold(0.0, f64::max);
            assert!(worst > 1e-3, "n={n}: {worst}");
        }
    }

    #[test]
    fn matrix_units() {
        let limits = Limits::default();
        let data = SubproductData::build(&pair(ExampleFamily::III, 4, 1, 4), 4, &limits).unwrap();
        let ops = creation_operators(data).unwrap();
        let dims: Vec<usize> = (0..=3).map(|k| matrix_unit_dimension(&ops, k, &limits).unwrap()).collect();
        assert_eq!(dims, vec![1, 9, 64, 441]);
    }

    #[test]
    fn gauge() {
        let limits = Limits::default();
        let data = SubproductData::build(&pair(ExampleFamily::III, 4, 1, 4), 3, &limits).unwrap();
        let ops = creation_operators(data).unwrap();
        let s = ops.full(0);
        assert!(gauge_average(&ops, &s).unwrap().matrix.norm() == 0.0);
        let ss = LinearOperator { matrix: &s.matrix * s.matrix.adjoint(), ..s.clone() };
        assert!((gauge_average(&ops, &ss).unwrap().matrix - &ss.matrix).norm() == 0.0);
        let id = LinearOperator { matrix: identity(ops.fock_dim()), ..s };
        assert_eq!(gauge_average(&ops, &id).unwrap().matrix, id.matrix);
    }

    #[test]
    fn reverse() {
        let limits = Limits::default();
        let data = SubproductData::build(&pair(ExampleFamily::I, 3, 0, 3), 5, &limits).unwrap();
        let ops = creation_operators(data).unwrap();
        let r = reverse_identity(&ops, 2).unwrap();
        assert_eq!(r.coefficient, ratio(1, 2));
        for k in 2..=4 {
            let r = reverse_identity(&ops, k).unwrap();
            assert!(r.residual < 1e-10 && r.closed_form_residual < 1e-10, "{r:?}");
        }
        let data = SubproductData::build(&pair(ExampleFamily::III, 4, 1, 4), 5, &limits).unwrap();
        let ops = creation_operators(data).unwrap();
        let r = reverse_identity(&ops, 2).unwrap();
        assert_eq!(r.coefficient, ratio(2, 3));
        for k in 2..=4 {
            assert!(reverse_identity(&ops, k).unwrap().residual < 1e-10);
        }
    }

    #[test]
    fn ideal() {
        let limits = Limits::default();
        let data = SubproductData::build(&pair(ExampleFamily::III, 4, 1, 4), 2, &limits).unwrap();
        let ops = creation_operators(data).unwrap();
        let g = ideal_generator(&ops).unwrap();
        assert_eq!(g.coefficients.len(), 3);
        assert!((g.coefficients[0].2 - c(-0.5)).norm() < 1e-12);
        assert!(g.parallel_residual < 1e-10 && g.orthogonality < 1e-10 && g.complement_residual < 1e-10);
        assert!((g.scale - c(1.0)).norm() < 1e-10);
        assert_eq!(g.complement_dim, 8);
    }

    #[test]
    fn cuntz_pimsner_trend() {
        let limits = Limits::default();
        let data = SubproductData::build(&pair(ExampleFamily::III, 4, 1, 4), 6, &limits).unwrap();
        let ops = creation_operators(data).unwrap();
        let rows: Vec<CpRow> = (1..=4).map(|m| cuntz_pimsner_residual(&ops, m).unwrap()).collect();
        for w in rows.windows(2) {
            assert!(w[1].residual < w[0].residual, "{rows:?}");
        }
        for r in &rows {
            assert!(r.residual <= r.constant * r.defect + 1e-12);
        }
    }

    #[test]
    fn labels_are_orthonormal() {
        let lab = Labeling::with_r(6, 2).unwrap();
        assert_eq!(lab.labels.len(), 5);
        let mut v = Vector::zeros(6);
        for &j in &lab.j {
            v[j] = c(0.5);
        }
        for (x, lx) in lab.labels.iter().enumerate() {
            assert!(lx.vector.dotc(&v).norm() < 1e-12);
            for (y, ly) in lab.labels.iter().enumerate() {
                let e = if x == y { 1.0 } else { 0.0 };
                assert!((lx.vector.dotc(&ly.vector) - c(e)).norm() < 1e-12);
            }
        }
        assert!(Labeling::with_r(3, 2).is_err());
    }
}
