//! Totally bounded sets, given by ball coverings at every level.
//!
//! A level-`n` ball has radius `2^-n` and is closed. Every set is backed by a
//! covering tree: each [`Node`] stands for a nonempty region of the set lying
//! inside its ball, and the children of a node cover its region. The level-`n`
//! covering is the list of centers at that level.

mod search;
pub mod reference;
#[cfg(test)]
mod tests;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::SetError;
use crate::kernel::lock;
use crate::real::CReal;
use crate::space::{dist_enclosure, point_limit, Point};

pub use search::{hausdorff_tb, tb_dist};
pub(crate) use search::node_key;

/// A ball of a covering tree, with whatever address its cover needs.
#[derive(Clone)]
pub struct Node {
    pub level: u32,
    pub center: Point,
    pub tag: Vec<BigInt>,
    pub inner: Option<Arc<Node>>,
}

impl Node {
    pub fn new(level: u32, center: Point) -> Self {
        Node {
            level,
            center,
            tag: Vec::new(),
            inner: None,
        }
    }

    pub fn with_tag(mut self, tag: Vec<BigInt>) -> Self {
        self.tag = tag;
        self
    }

    pub fn with_inner(mut self, inner: Node) -> Self {
        self.inner = Some(Arc::new(inner));
        self
    }

    pub fn radius(&self) -> Dyadic {
        Dyadic::pow2(-(self.level as i64))
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Node(level {}, {:?})", self.level, self.center)
    }
}

/// A covering tree.
///
/// Implementations guarantee: each node's region is a nonempty part of the
/// set inside the closed ball of radius `2^-level` around its center; the
/// roots (level 0) cover the set; the children (level + 1) of a node cover
/// its region; `member_near` returns a point of the set within
/// `2^(member_slack() - level)` of the center.
pub trait Cover: Send + Sync {
    fn dimension(&self) -> usize;
    fn roots(&self) -> Vec<Node>;
    fn children(&self, node: &Node) -> Vec<Node>;
    fn member_near(&self, node: &Node) -> Point;

    fn member_slack(&self) -> u32 {
        0
    }

    /// Whether one node can be reached through several parents.
    fn shares_children(&self) -> bool {
        false
    }

    /// Centers of the level-`n` covering.
    fn centers(&self, n: u32) -> Vec<Point> {
        let mut frontier = self.roots();
        for _ in 0..n {
            frontier = frontier.iter().flat_map(|node| self.children(node)).collect();
        }
        frontier.into_iter().map(|node| node.center).collect()
    }
}

struct Inner {
    cover: Box<dyn Cover>,
    memo: Mutex<HashMap<u32, Arc<Vec<Point>>>>,
}

/// A totally bounded set. Cheap to clone; clones share the covering memo.
#[derive(Clone)]
pub struct TBSet(Arc<Inner>);

impl TBSet {
    pub fn from_cover(cover: impl Cover + 'static) -> Self {
        TBSet(Arc::new(Inner {
            cover: Box::new(cover),
            memo: Mutex::new(HashMap::new()),
        }))
    }

    /// A set known only through its coverings. The covering tree is recovered
    /// by linking each level-`n` center to the level-`(n+1)` centers that are
    /// not certified to lie farther than `1.5 * 2^-n` away.
    pub fn from_coverings(dimension: usize, covering: impl Fn(u32) -> Vec<Point> + Send + Sync + 'static) -> Self {
        TBSet::from_cover(Arc::new(CenterCover::new(dimension, covering)))
    }

    pub fn dimension(&self) -> usize {
        self.0.cover.dimension()
    }

    /// Level-`n` centers, with exact duplicates removed. Memoized per level.
    pub fn covering(&self, n: u32) -> Arc<Vec<Point>> {
        if let Some(c) = lock(&self.0.memo).get(&n) {
            return c.clone();
        }
        let centers = Arc::new(dedup_exact(self.0.cover.centers(n)));
        lock(&self.0.memo).entry(n).or_insert(centers).clone()
    }

    pub fn roots(&self) -> Vec<Node> {
        self.0.cover.roots()
    }

    pub fn children(&self, node: &Node) -> Vec<Node> {
        self.0.cover.children(node)
    }

    pub fn member_near(&self, node: &Node) -> Point {
        self.0.cover.member_near(node)
    }

    /// `member_near` lands within `2^(member_slack - level)` of the center.
    pub fn member_slack(&self) -> u32 {
        self.0.cover.member_slack()
    }

    /// Whether tree searches must skip nodes they have already seen.
    pub fn shares_children(&self) -> bool {
        self.0.cover.shares_children()
    }

    pub fn same_handle(&self, other: &TBSet) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Decides emptiness from the level-0 covering.
    pub fn is_empty(&self) -> bool {
        self.roots().is_empty()
    }

    fn nonempty(&self) -> Result<(), SetError> {
        if self.is_empty() {
            Err(SetError::Empty)
        } else {
            Ok(())
        }
    }

    /// Exportable level-`n` covering with centers rounded to `2^-precision`.
    pub fn export(&self, n: u32, precision: u32) -> CoveringRecord {
        let centers = self.covering(n).iter().map(|p| export_point(p, precision)).collect();
        CoveringRecord {
            level: n,
            radius_exponent: -(n as i64),
            centers,
            dimension: self.dimension(),
        }
    }
}

impl fmt::Debug for TBSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TBSet(dim {})", self.dimension())
    }
}

/// One level of a covering: balls of radius `2^radius_exponent` around `centers`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringRecord {
    pub level: u32,
    pub radius_exponent: i64,
    pub centers: Vec<Vec<Dyadic>>,
    pub dimension: usize,
}

/// Coordinates that are already dyadic with at most `precision` fractional
/// bits are kept; others are rounded to the nearest multiple of `2^-precision`
/// of a `2^-(precision+1)` approximation (total error at most `2^-precision`).
pub fn export_point(p: &Point, precision: u32) -> Vec<Dyadic> {
    let grid = -(precision as i64);
    p.coords()
        .iter()
        .map(|c| match c.exact() {
            Some(d) if d.exponent() >= grid => d.clone(),
            _ => c.approx_dyadic(precision + 1).round_to(grid),
        })
        .collect()
}

fn dedup_exact(points: Vec<Point>) -> Vec<Point> {
    let mut seen = HashSet::new();
    points
        .into_iter()
        .filter(|p| match p.exact() {
            Some(key) => seen.insert(key),
            None => true,
        })
        .collect()
}

pub fn tb_is_empty(a: &TBSet) -> bool {
    a.is_empty()
}

/// Points of the set whose closed `2^-n` balls cover it.
///
/// Built from the level-`(n+2)` nodes, each replaced by a nearby member
/// (one level deeper for sets whose members are only known loosely).
pub fn tb_centered(a: &TBSet, n: u32) -> Result<Vec<Point>, SetError> {
    a.nonempty()?;
    let depth = n + 2 + u32::from(a.member_slack() > 0);
    let mut frontier = a.roots();
    for _ in 0..depth {
        frontier = frontier.iter().flat_map(|node| a.children(node)).collect();
    }
    Ok(frontier.iter().map(|node| a.member_near(node)).collect())
}

/// A point of a nonempty set.
pub fn tb_choice(a: &TBSet) -> Result<Point, SetError> {
    a.nonempty()?;
    let root = a.roots().into_iter().next().expect("nonempty");
    Ok(a.member_near(&root))
}

/// Hausdorff distance between finite nonempty point lists.
pub fn hausdorff_finite(s: &[Point], t: &[Point]) -> Result<CReal, SetError> {
    if s.is_empty() || t.is_empty() {
        return Err(SetError::Empty);
    }
    let exact = |ps: &[Point]| ps.iter().map(Point::exact).collect::<Option<Vec<_>>>();
    if let (Some(se), Some(te)) = (exact(s), exact(t)) {
        return Ok(CReal::from_dyadic(hausdorff_dyadic(&se, &te)));
    }
    let (s, t) = (s.to_vec(), t.to_vec());
    Ok(CReal::from_fn(move |n| {
        // distance enclosures at n+1 have width <= 2^(1-n); min and max keep it
        let e = n.saturating_add(1);
        let one_sided = |a: &[Point], b: &[Point]| {
            a.iter()
                .map(|x| b.iter().map(|y| dist_enclosure(x, y, e)).reduce(|m, d| m.min(&d)).expect("nonempty"))
                .reduce(|m, d| m.max(&d))
                .expect("nonempty")
        };
        one_sided(&s, &t).max(&one_sided(&t, &s))
    }))
}

/// `max(max_s min_t d(s, t), max_t min_s d(s, t))` on dyadic points.
///
/// Folds the list recurrences `d(x, y::ys) = min(d(x, y), d(x, ys))` and
/// `d(x::xs, T) = max(d(x, T), d(xs, T))` from the left.
fn hausdorff_dyadic(s: &[Vec<Dyadic>], t: &[Vec<Dyadic>]) -> Dyadic {
    let to_list = |x: &[Dyadic], ys: &[Vec<Dyadic>]| {
        ys.iter().map(|y| crate::space::dyadic_dist(x, y)).reduce(Dyadic::min).expect("nonempty")
    };
    let one_sided = |xs: &[Vec<Dyadic>], ys: &[Vec<Dyadic>]| {
        xs.iter().map(|x| to_list(x, ys)).reduce(Dyadic::max).expect("nonempty")
    };
    one_sided(s, t).max(one_sided(t, s))
}

/// The set with no points.
pub fn empty_tb(dimension: usize) -> TBSet {
    TBSet::from_cover(EmptyCover(dimension))
}

struct EmptyCover(usize);

impl Cover for EmptyCover {
    fn dimension(&self) -> usize {
        self.0
    }
    fn roots(&self) -> Vec<Node> {
        Vec::new()
    }
    fn children(&self, _: &Node) -> Vec<Node> {
        Vec::new()
    }
    fn member_near(&self, _: &Node) -> Point {
        unreachable!("the empty set has no nodes")
    }
}

/// `{x}`; the level-`n` center is `x` rounded to `2^-(n+1)`.
pub fn singleton_tb(x: Point) -> TBSet {
    TBSet::from_cover(SingletonCover(x))
}

struct SingletonCover(Point);

impl SingletonCover {
    fn node(&self, level: u32) -> Node {
        Node::new(level, Point::from_dyadics(self.0.approx_dyadic(level + 1)))
    }
}

impl Cover for SingletonCover {
    fn dimension(&self) -> usize {
        self.0.dim()
    }
    fn roots(&self) -> Vec<Node> {
        vec![self.node(0)]
    }
    fn children(&self, node: &Node) -> Vec<Node> {
        vec![self.node(node.level + 1)]
    }
    fn member_near(&self, _: &Node) -> Point {
        self.0.clone()
    }
    fn centers(&self, n: u32) -> Vec<Point> {
        vec![self.node(n).center]
    }
}

/// `A ∪ B`; coverings are concatenated.
pub fn tb_union(a: &TBSet, b: &TBSet) -> Result<TBSet, SetError> {
    if a.dimension() != b.dimension() {
        return Err(SetError::DimensionMismatch(a.dimension(), b.dimension()));
    }
    Ok(TBSet::from_cover(UnionCover(a.clone(), b.clone())))
}

struct UnionCover(TBSet, TBSet);

impl UnionCover {
    fn part(&self, side: i64) -> &TBSet {
        if side == 0 {
            &self.0
        } else {
            &self.1
        }
    }

    fn side_of(node: &Node) -> i64 {
        i64::from(!node.tag[0].is_zero())
    }

    fn wrap(side: i64, nodes: Vec<Node>) -> Vec<Node> {
        nodes
            .into_iter()
            .map(|n| Node::new(n.level, n.center.clone()).with_tag(vec![BigInt::from(side)]).with_inner(n))
            .collect()
    }
}

impl Cover for UnionCover {
    fn dimension(&self) -> usize {
        self.0.dimension()
    }
    fn roots(&self) -> Vec<Node> {
        let mut r = Self::wrap(0, self.0.roots());
        r.extend(Self::wrap(1, self.1.roots()));
        r
    }
    fn children(&self, node: &Node) -> Vec<Node> {
        let side = Self::side_of(node);
        let inner = node.inner.as_ref().expect("union node");
        Self::wrap(side, self.part(side).children(inner))
    }
    fn member_near(&self, node: &Node) -> Point {
        self.part(Self::side_of(node)).member_near(node.inner.as_ref().expect("union node"))
    }
    fn member_slack(&self) -> u32 {
        self.0.member_slack().max(self.1.member_slack())
    }
    fn shares_children(&self) -> bool {
        self.0.shares_children() || self.1.shares_children()
    }
    fn centers(&self, n: u32) -> Vec<Point> {
        let mut c = self.0.covering(n).to_vec();
        c.extend(self.1.covering(n).iter().cloned());
        c
    }
}

/// `c * A + t` for a dyadic `c > 0`.
///
/// The level-`n` covering is the image of the level-`m` covering of `A`,
/// where `m` is the least `m >= 0` with `c * 2^-m <= 2^-n`. The translation
/// may be any point of matching dimension.
pub fn tb_affine(c: &Dyadic, t: &Point, a: &TBSet) -> Result<TBSet, SetError> {
    if !c.is_positive() {
        return Err(SetError::NonPositiveScale);
    }
    if t.dim() != a.dimension() {
        return Err(SetError::DimensionMismatch(a.dimension(), t.dim()));
    }
    // ceil(log2 c)
    let log = c.ilog2().expect("positive") + i64::from(*c.mantissa() != 1.into());
    Ok(TBSet::from_cover(AffineCover {
        scale: CReal::from_dyadic(c.clone()),
        log,
        shift: t.clone(),
        base: a.clone(),
    }))
}

struct AffineCover {
    scale: CReal,
    log: i64,
    shift: Point,
    base: TBSet,
}

impl AffineCover {
    fn source_level(&self, n: u32) -> u32 {
        (n as i64 + self.log).max(0) as u32
    }

    fn map(&self, p: &Point) -> Point {
        let scaled = match self.scale.exact() {
            Some(c) if *c.mantissa() == 1.into() => p.scale_pow2(c.exponent()),
            _ => p.scale(&self.scale),
        };
        scaled.add(&self.shift)
    }

    fn lift(&self, level: u32, inner: Node) -> Node {
        Node::new(level, self.map(&inner.center)).with_inner(inner)
    }
}

impl Cover for AffineCover {
    fn dimension(&self) -> usize {
        self.base.dimension()
    }
    fn roots(&self) -> Vec<Node> {
        let mut frontier = self.base.roots();
        for _ in 0..self.source_level(0) {
            frontier = frontier.iter().flat_map(|n| self.base.children(n)).collect();
        }
        frontier.into_iter().map(|n| self.lift(0, n)).collect()
    }
    fn children(&self, node: &Node) -> Vec<Node> {
        let inner = node.inner.as_ref().expect("affine node");
        let level = node.level + 1;
        if self.source_level(level) == inner.level {
            vec![self.lift(level, (**inner).clone())]
        } else {
            self.base.children(inner).into_iter().map(|n| self.lift(level, n)).collect()
        }
    }
    fn member_near(&self, node: &Node) -> Point {
        self.map(&self.base.member_near(node.inner.as_ref().expect("affine node")))
    }
    fn member_slack(&self) -> u32 {
        // the base node sits at a level no coarser than the scaled radius
        self.base.member_slack()
    }
    fn shares_children(&self) -> bool {
        self.base.shares_children()
    }
    fn centers(&self, n: u32) -> Vec<Point> {
        self.base.covering(self.source_level(n)).iter().map(|p| self.map(p)).collect()
    }
}

/// Uniform-continuity modulus: `d(x, y) < 2^-omega(n)` implies `d(f x, f y) < 2^-n`.
pub type Modulus = Arc<dyn Fn(u32) -> u32 + Send + Sync>;

/// `f(A)` for a uniformly continuous `f` with modulus `omega`.
///
/// The level-`n` covering is `f` applied to the level-`omega(n+1)` centers of `A`.
pub fn tb_image(
    f: impl Fn(&Point) -> Point + Send + Sync + 'static,
    dimension: usize,
    omega: Modulus,
    a: &TBSet,
) -> TBSet {
    let a = a.clone();
    TBSet::from_coverings(dimension, move |n| {
        a.covering(omega(n + 1)).iter().map(&f).collect()
    })
}

/// Limit of a sequence of sets that is fast Cauchy in the Hausdorff metric.
///
/// The level-`n` covering is the level-`(n+1)` covering of `Ks(n+1)`. The
/// Cauchy condition is not checked; see [`limit_audit`].
pub fn tb_limit(dimension: usize, ks: impl Fn(u32) -> TBSet + Send + Sync + 'static) -> TBSet {
    let memo: Mutex<HashMap<u32, TBSet>> = Mutex::new(HashMap::new());
    TBSet::from_coverings(dimension, move |n| {
        let k = {
            let found = lock(&memo).get(&(n + 1)).cloned();
            match found {
                Some(k) => k,
                None => {
                    let k = ks(n + 1);
                    lock(&memo).entry(n + 1).or_insert(k).clone()
                }
            }
        };
        k.covering(n + 1).to_vec()
    })
}

/// Estimates `d_H(Ks(i), Ks(j))` for `i < j <= upto` from level-`(j+2)`
/// coverings, as intervals at effort `p`. Bounds the Cauchy condition of a
/// sequence meant for [`tb_limit`].
pub fn limit_audit(
    ks: impl Fn(u32) -> TBSet,
    upto: u32,
    p: u32,
) -> Result<Vec<(u32, u32, crate::interval::Interval)>, SetError> {
    let sets: Vec<TBSet> = (0..=upto).map(&ks).collect();
    let mut out = Vec::new();
    for i in 0..=upto {
        for j in i + 1..=upto {
            let level = j + 2;
            let d = hausdorff_finite(&sets[i as usize].covering(level), &sets[j as usize].covering(level))?;
            out.push((i, j, d.approx(p)));
        }
    }
    Ok(out)
}

/// Covering tree recovered from coverings alone.
struct CenterCover {
    dimension: usize,
    covering: Box<dyn Fn(u32) -> Vec<Point> + Send + Sync>,
    memo: Mutex<HashMap<u32, Arc<Vec<Point>>>>,
    grids: Mutex<HashMap<u32, Arc<Grid>>>,
}

/// Level-`(n+1)` centers bucketed by cells of side `2^-n`.
type Grid = HashMap<Vec<i64>, Vec<usize>>;

/// Cell of side `2^-n` holding the `2^-(n+4)` approximation of `p`.
fn grid_cell(p: &Point, n: u32) -> Vec<i64> {
    p.approx_dyadic(n + 4)
        .iter()
        .map(|d| {
            let k = d.shl(i64::from(n)).floor();
            i64::try_from(k).unwrap_or_else(|_| crate::kernel::exhausted(n))
        })
        .collect()
}

impl CenterCover {
    fn new(dimension: usize, covering: impl Fn(u32) -> Vec<Point> + Send + Sync + 'static) -> Self {
        CenterCover {
            dimension,
            covering: Box::new(covering),
            memo: Mutex::new(HashMap::new()),
            grids: Mutex::new(HashMap::new()),
        }
    }

    fn grid(&self, n: u32) -> Arc<Grid> {
        if let Some(g) = lock(&self.grids).get(&n) {
            return g.clone();
        }
        let mut g = Grid::new();
        for (i, c) in self.level(n + 1).iter().enumerate() {
            g.entry(grid_cell(c, n)).or_default().push(i);
        }
        lock(&self.grids).entry(n).or_insert(Arc::new(g)).clone()
    }

    fn level(&self, n: u32) -> Arc<Vec<Point>> {
        if let Some(c) = lock(&self.memo).get(&n) {
            return c.clone();
        }
        let c = Arc::new(dedup_exact((self.covering)(n)));
        lock(&self.memo).entry(n).or_insert(c).clone()
    }

    /// Descends through first children; each step moves at most
    /// `(1.5 + 2^-4) * 2^-level`, so the path is fast Cauchy after two steps
    /// and its limit lies in the set within `2^(2-level)` of the start.
    fn descent(self: &Arc<Self>, start: &Node) -> Point {
        let path = Arc::new(Mutex::new(vec![start.clone()]));
        let this = self.clone();
        point_limit(move |j| {
            let mut path = lock(&path);
            while path.len() <= j as usize + 2 {
                let last = path.last().expect("nonempty").clone();
                let next = this.children(&last).into_iter().next().expect("a ball meeting the set has children");
                path.push(next);
            }
            path[j as usize + 2].center.clone()
        })
    }
}

impl Cover for Arc<CenterCover> {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn roots(&self) -> Vec<Node> {
        self.level(0).iter().map(|c| Node::new(0, c.clone())).collect()
    }
    fn children(&self, node: &Node) -> Vec<Node> {
        let n = node.level;
        let e = n.saturating_add(6);
        let reach = &Dyadic::pow2(-(n as i64)) + &Dyadic::pow2(-(n as i64) - 1);
        // within 1.5 cells, plus approximation error, means at most 2 cells away
        let home = grid_cell(&node.center, n);
        let grid = self.grid(n);
        let centers = self.level(n + 1);
        let mut hits: Vec<usize> = Vec::new();
        let mut offset = vec![-2i64; home.len()];
        loop {
            let cell: Vec<i64> = home.iter().zip(&offset).map(|(h, o)| h + o).collect();
            if let Some(ids) = grid.get(&cell) {
                hits.extend(ids);
            }
            let Some(k) = offset.iter().position(|&o| o < 2) else { break };
            offset[k] += 1;
            offset[..k].fill(-2);
        }
        // keep covering order so results do not depend on the index
        hits.sort_unstable();
        hits.into_iter()
            .map(|i| &centers[i])
            .filter(|c| dist_enclosure(&node.center, c, e).lo() <= &reach)
            .map(|c| Node::new(n + 1, c.clone()))
            .collect()
    }
    fn member_near(&self, node: &Node) -> Point {
        self.descent(node)
    }
    fn member_slack(&self) -> u32 {
        2
    }
    fn shares_children(&self) -> bool {
        true
    }
    fn centers(&self, n: u32) -> Vec<Point> {
        self.level(n).to_vec()
    }
}
