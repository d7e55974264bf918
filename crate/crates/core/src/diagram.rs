//! Motzkin diagrams: non-crossing partial matchings of `k` top and `k` bottom
//! boundary points.
//!
//! Points are indexed `0..k` along the top edge (left to right) and `k..2k`
//! along the bottom edge (left to right). The canonical encoding is the
//! pairing array itself, with [`ISOLATED`] for unmatched points, so equality,
//! hashing and ordering all act on that array.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::config::Limits;
use crate::error::{Error, Result};

/// Sentinel for an unmatched boundary point.
pub const ISOLATED: i8 = -1;

/// Largest width representable by the `i8` pairing encoding.
pub const MAX_ENCODABLE_WIDTH: usize = 63;

/// A boundary point, one-based as in the usual pictures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Top(usize),
    Bottom(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MotzkinDiagram {
    width: usize,
    pairing: Vec<i8>,
}

impl MotzkinDiagram {
    /// Builds a diagram from its pairing array, validating symmetry,
    /// irreflexivity and planarity.
    pub fn from_pairing(width: usize, pairing: &[i32]) -> Result<Self> {
        if width > MAX_ENCODABLE_WIDTH {
            return Err(Error::InvalidDiagram(format!("width {width} too large")));
        }
        if pairing.len() != 2 * width {
            return Err(Error::InvalidDiagram(format!(
                "pairing has {} entries, expected {}",
                pairing.len(),
                2 * width
            )));
        }
        let mut enc = Vec::with_capacity(pairing.len());
        for (p, &q) in pairing.iter().enumerate() {
            if q == -1 {
                enc.push(ISOLATED);
                continue;
            }
            if q < 0 || q as usize >= 2 * width {
                return Err(Error::InvalidDiagram(format!("partner {q} of point {p} out of range")));
            }
            if q as usize == p {
                return Err(Error::InvalidDiagram(format!("point {p} paired with itself")));
            }
            if pairing[q as usize] != p as i32 {
                return Err(Error::InvalidDiagram(format!("pairing not symmetric at point {p}")));
            }
            enc.push(q as i8);
        }
        let d = MotzkinDiagram { width, pairing: enc };
        if !d.is_planar() {
            return Err(Error::InvalidDiagram("pairing has crossing strands".into()));
        }
        Ok(d)
    }

    /// Builds a diagram from one-based endpoint pairs; unmentioned points are
    /// isolated.
    pub fn from_pairs(width: usize, pairs: &[(Point, Point)]) -> Result<Self> {
        let mut pairing = vec![-1i32; 2 * width];
        for &(a, b) in pairs {
            let (a, b) = (point_index(width, a)?, point_index(width, b)?);
            if pairing[a] != -1 || pairing[b] != -1 {
                return Err(Error::InvalidDiagram("point used twice".into()));
            }
            pairing[a] = b as i32;
            pairing[b] = a as i32;
        }
        Self::from_pairing(width, &pairing)
    }

    pub fn identity(width: usize) -> Self {
        let mut pairing = vec![ISOLATED; 2 * width];
        for i in 0..width {
            pairing[i] = (width + i) as i8;
            pairing[width + i] = i as i8;
        }
        MotzkinDiagram { width, pairing }
    }

    /// The empty diagram of width 0.
    pub fn empty() -> Self {
        MotzkinDiagram { width: 0, pairing: Vec::new() }
    }

    pub(crate) fn from_raw(width: usize, pairing: Vec<i8>) -> Self {
        debug_assert_eq!(pairing.len(), 2 * width);
        MotzkinDiagram { width, pairing }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Partner of each point, `-1` for isolated points.
    pub fn pairing(&self) -> Vec<i32> {
        self.pairing.iter().map(|&p| p as i32).collect()
    }

    pub fn partner(&self, point: usize) -> Option<usize> {
        let q = self.pairing[point];
        (q != ISOLATED).then_some(q as usize)
    }

    /// Number of edges joining a top point to a bottom point.
    pub fn through_strands(&self) -> usize {
        (0..self.width).filter(|&i| matches!(self.partner(i), Some(q) if q >= self.width)).count()
    }

    pub fn isolated_points(&self) -> usize {
        self.pairing.iter().filter(|&&p| p == ISOLATED).count()
    }

    /// Temperley–Lieb diagrams are those without isolated points.
    pub fn is_temperley_lieb(&self) -> bool {
        self.isolated_points() == 0
    }

    /// Checks that the matched pairs form a balanced bracket sequence when
    /// the boundary is read cyclically as `top_1..top_k, bottom_k..bottom_1`.
    pub fn is_planar(&self) -> bool {
        let k = self.width;
        let mut stack: Vec<usize> = Vec::with_capacity(k);
        for pos in 0..2 * k {
            let p = circular_to_point(k, pos);
            let Some(q) = self.partner(p) else { continue };
            if point_to_circular(k, q) > pos {
                stack.push(p);
            } else if stack.pop() != Some(q) {
                return false;
            }
        }
        stack.is_empty()
    }

    /// Reflection in a horizontal line (top ↔ bottom).
    pub fn flip(&self) -> Self {
        let k = self.width;
        let swap = |p: usize| if p < k { p + k } else { p - k };
        let mut pairing = vec![ISOLATED; 2 * k];
        for p in 0..2 * k {
            if let Some(q) = self.partner(p) {
                pairing[swap(p)] = swap(q) as i8;
            }
        }
        MotzkinDiagram { width: k, pairing }
    }

    /// Reflection in a vertical line (left ↔ right).
    pub fn mirror(&self) -> Self {
        let k = self.width;
        let m = |p: usize| if p < k { k - 1 - p } else { k + (2 * k - 1 - p) };
        let mut pairing = vec![ISOLATED; 2 * k];
        for p in 0..2 * k {
            if let Some(q) = self.partner(p) {
                pairing[m(p)] = m(q) as i8;
            }
        }
        MotzkinDiagram { width: k, pairing }
    }

    /// Horizontal juxtaposition: `self` on the left, `right` on the right.
    pub fn juxtapose(&self, right: &MotzkinDiagram) -> Self {
        let (a, b) = (self.width, right.width);
        let k = a + b;
        let left_map = |p: usize| if p < a { p } else { k + (p - a) };
        let right_map = |p: usize| if p < b { a + p } else { k + a + (p - b) };
        let mut pairing = vec![ISOLATED; 2 * k];
        for p in 0..2 * a {
            if let Some(q) = self.partner(p) {
                pairing[left_map(p)] = left_map(q) as i8;
            }
        }
        for p in 0..2 * b {
            if let Some(q) = right.partner(p) {
                pairing[right_map(p)] = right_map(q) as i8;
            }
        }
        MotzkinDiagram { width: k, pairing }
    }

    /// Appends `h` vertical strands on the right.
    pub fn embed(&self, h: usize) -> Self {
        self.juxtapose(&MotzkinDiagram::identity(h))
    }
}

impl fmt::Debug for MotzkinDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}{:?}", self.width, self.pairing)
    }
}

fn point_index(width: usize, p: Point) -> Result<usize> {
    match p {
        Point::Top(i) if (1..=width).contains(&i) => Ok(i - 1),
        Point::Bottom(i) if (1..=width).contains(&i) => Ok(width + i - 1),
        _ => Err(Error::InvalidDiagram(format!("{p:?} out of range for width {width}"))),
    }
}

fn circular_to_point(k: usize, pos: usize) -> usize {
    if pos < k {
        pos
    } else {
        // bottom_k .. bottom_1
        k + (2 * k - 1 - pos)
    }
}

fn point_to_circular(k: usize, p: usize) -> usize {
    if p < k {
        p
    } else {
        2 * k - 1 - (p - k)
    }
}

/// Small union-find over at most a few hundred nodes.
pub(crate) struct Dsu {
    parent: Vec<u16>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n as u16).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb) as u16;
        }
    }
}

/// Per-component bookkeeping while resolving a glued picture.
#[derive(Clone, Default)]
struct Component {
    outer: Vec<usize>,
    dead: bool,
    inner: bool,
}

/// Resolves components into a pairing on the outer points plus a loop count.
///
/// `outer_of(node)` gives the outer point index for nodes on the boundary of
/// the result; `dead(node)` marks inner nodes touching an unmatched point.
fn resolve(
    dsu: &mut Dsu,
    nodes: usize,
    outer_points: usize,
    outer_of: impl Fn(usize) -> Option<usize>,
    dead: impl Fn(usize) -> bool,
) -> (Vec<i8>, u32) {
    let mut comps: Vec<Component> = vec![Component::default(); nodes];
    for v in 0..nodes {
        let r = dsu.find(v);
        match outer_of(v) {
            Some(p) => comps[r].outer.push(p),
            None => {
                comps[r].inner = true;
                comps[r].dead |= dead(v);
            }
        }
    }
    let mut pairing = vec![ISOLATED; outer_points];
    let mut loops = 0u32;
    for c in &comps {
        if c.dead {
            continue;
        }
        match c.outer.as_slice() {
            [a, b] => {
                pairing[*a] = *b as i8;
                pairing[*b] = *a as i8;
            }
            [] if c.inner => loops += 1,
            _ => {}
        }
    }
    (pairing, loops)
}

/// Stacks `upper` on top of `lower`, gluing the bottom row of `upper` to the
/// top row of `lower`.
///
/// Returns the resulting diagram and the number of closed loops. Strands that
/// end at an unmatched glued point are deleted.
pub fn compose(upper: &MotzkinDiagram, lower: &MotzkinDiagram) -> (MotzkinDiagram, u32) {
    let k = upper.width;
    debug_assert_eq!(k, lower.width);
    // nodes: 0..k top of upper, k..2k glued row, 2k..3k bottom of lower
    let mut dsu = Dsu::new(3 * k);
    let up = |p: usize| p; // upper's bottom row k..2k is already the glued row
    let low = |p: usize| p + k;
    for p in 0..2 * k {
        if let Some(q) = upper.partner(p) {
            if p < q {
                dsu.union(up(p), up(q));
            }
        }
        if let Some(q) = lower.partner(p) {
            if p < q {
                dsu.union(low(p), low(q));
            }
        }
    }
    let outer_of = |v: usize| {
        if v < k {
            Some(v)
        } else if v >= 2 * k {
            Some(v - k)
        } else {
            None
        }
    };
    let dead = |v: usize| upper.pairing[v] == ISOLATED || lower.pairing[v - k] == ISOLATED;
    let (pairing, loops) = resolve(&mut dsu, 3 * k, 2 * k, outer_of, dead);
    (MotzkinDiagram::from_raw(k, pairing), loops)
}

/// Joins the rightmost top point to the rightmost bottom point around the
/// right side, producing a diagram of width `k − 1` and a loop count.
pub fn close_right(d: &MotzkinDiagram) -> Result<(MotzkinDiagram, u32)> {
    let k = d.width;
    if k == 0 {
        return Err(Error::Domain("cannot close a width-0 diagram".into()));
    }
    let (top_last, bottom_last) = (k - 1, 2 * k - 1);
    let mut dsu = Dsu::new(2 * k);
    for p in 0..2 * k {
        if let Some(q) = d.partner(p) {
            if p < q {
                dsu.union(p, q);
            }
        }
    }
    dsu.union(top_last, bottom_last);
    let outer_of = |v: usize| {
        if v < k - 1 {
            Some(v)
        } else if v >= k && v < 2 * k - 1 {
            Some(v - 1)
        } else {
            None
        }
    };
    let dead = |v: usize| d.pairing[v] == ISOLATED;
    let (pairing, loops) = resolve(&mut dsu, 2 * k, 2 * (k - 1), outer_of, dead);
    Ok((MotzkinDiagram::from_raw(k - 1, pairing), loops))
}

/// The m-th Motzkin number, `M_0 = 1`,
/// `M_{m+1} = M_m + Σ_{j=0}^{m−1} M_j M_{m−1−j}`.
pub fn motzkin_number(m: usize) -> BigUint {
    let mut table: Vec<BigUint> = Vec::with_capacity(m + 1);
    table.push(BigUint::one());
    for i in 0..m {
        let mut next = table[i].clone();
        for j in 0..i {
            next += &table[j] * &table[i - 1 - j];
        }
        table.push(next);
    }
    table.swap_remove(m)
}

/// Catalan number, counting the Temperley–Lieb diagrams of width `k`.
pub fn catalan_number(k: usize) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * BigUint::from(2 * (2 * i + 1)) / BigUint::from(i + 2);
    }
    c
}

/// All Motzkin diagrams of width `k`, sorted by pairing array.
pub fn enumerate_basis(k: usize, limits: &Limits) -> Result<Vec<MotzkinDiagram>> {
    limits.check_width(k)?;
    if k > MAX_ENCODABLE_WIDTH {
        return Err(Error::ResourceLimit { what: "width", value: k, limit: MAX_ENCODABLE_WIDTH });
    }
    let mut out: Vec<MotzkinDiagram> = interval_matchings(0, 2 * k)
        .into_iter()
        .map(|arcs| {
            let mut pairing = vec![ISOLATED; 2 * k];
            for (a, b) in arcs {
                let (p, q) = (circular_to_point(k, a), circular_to_point(k, b));
                pairing[p] = q as i8;
                pairing[q] = p as i8;
            }
            MotzkinDiagram::from_raw(k, pairing)
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Non-crossing partial matchings of the positions `lo..hi` on a line, as arc
/// lists. The first position is either unmatched or closes an arc whose
/// interior and exterior are independent.
fn interval_matchings(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
    if lo >= hi {
        return vec![Vec::new()];
    }
    let mut out = interval_matchings(lo + 1, hi);
    for j in lo + 1..hi {
        let inner = interval_matchings(lo + 1, j);
        let outer = interval_matchings(j + 1, hi);
        for a in &inner {
            for b in &outer {
                let mut arcs = Vec::with_capacity(1 + a.len() + b.len());
                arcs.push((lo, j));
                arcs.extend_from_slice(a);
                arcs.extend_from_slice(b);
                out.push(arcs);
            }
        }
    }
    out
}
