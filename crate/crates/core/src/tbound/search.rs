//! Branch-and-bound over covering trees for distances.
//!
//! Each node gives an enclosure `[d_lo - r, d_hi + r]` of the quantity over
//! its region. Refining the most promising node first keeps the work close
//! to the extremal part of the set instead of the whole level-`n` covering.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use num_bigint::BigInt;

use crate::dyadic::Dyadic;
use crate::error::SetError;
use crate::interval::Interval;
use crate::real::CReal;
use crate::space::{dist_enclosure, Point};

use super::{Node, TBSet};

fn check(a: &TBSet, dim: usize) -> Result<(), SetError> {
    a.nonempty()?;
    if a.dimension() != dim {
        return Err(SetError::DimensionMismatch(a.dimension(), dim));
    }
    Ok(())
}

/// Exact distance when `x` and the center are both dyadic.
fn exact_dist(x: &[Dyadic], c: &Point) -> Option<Dyadic> {
    let mut best = Dyadic::zero();
    for (a, b) in x.iter().zip(c.coords()) {
        let d = (a - b.exact()?).abs();
        if d > best {
            best = d;
        }
    }
    Some(best)
}

#[derive(PartialEq, Eq, Hash)]
pub(crate) enum CenterKey {
    Exact(Vec<Dyadic>),
    Handle(usize),
}

/// Identifies the region of a node: the chain of levels, tags and centers
/// down through the wrapped nodes. Covers built from bare center lists give
/// a child to every parent within reach, so the same node turns up many
/// times; searching it once keeps the work from compounding with depth.
pub(crate) fn node_key(node: &Node) -> Vec<(u32, Vec<BigInt>, CenterKey)> {
    let mut key = Vec::new();
    let mut cur = Some(node);
    while let Some(n) = cur {
        let center = match n.center.exact() {
            Some(c) => CenterKey::Exact(c),
            None => CenterKey::Handle(n.center.handle_addr()),
        };
        key.push((n.level, n.tag.clone(), center));
        cur = n.inner.as_deref();
    }
    key
}

struct Probe<'a> {
    x: &'a Point,
    x_exact: Option<Vec<Dyadic>>,
    effort: u32,
}

impl Probe<'_> {
    fn dist(&self, c: &Point) -> Interval {
        if let Some(d) = self.x_exact.as_deref().and_then(|x| exact_dist(x, c)) {
            return Interval::point(d);
        }
        dist_enclosure(self.x, c, self.effort)
    }
}

/// Enclosure of `d(x, A)` of width at most `2^(1-n)`.
pub(crate) fn dist_bounds(a: &TBSet, x: &Point, n: u32) -> Interval {
    let probe = Probe {
        x,
        x_exact: x.exact(),
        effort: n.saturating_add(4),
    };
    let tol = Dyadic::pow2(1 - n as i64);
    let mut nodes: Vec<Node> = Vec::new();
    // min-heap on lower bounds. Ties go to the deepest node first, then
    // insertion order: points inside the set give many balls a lower bound
    // of zero, and only a deep node can bring the upper bound down to meet it.
    let mut heap: BinaryHeap<Reverse<(Dyadic, Reverse<u32>, usize)>> = BinaryHeap::new();
    let mut best_hi: Option<Dyadic> = None;
    let dedup = a.shares_children();
    let mut seen = HashSet::new();
    let mut frontier = a.roots();
    loop {
        for node in frontier.drain(..) {
            if dedup && !seen.insert(node_key(&node)) {
                continue;
            }
            let d = probe.dist(&node.center);
            let r = node.radius();
            let hi = d.hi() + &r;
            if best_hi.as_ref().is_none_or(|b| hi < *b) {
                best_hi = Some(hi);
            }
            let lo = (d.lo() - &r).max(Dyadic::zero());
            heap.push(Reverse((lo, Reverse(node.level), nodes.len())));
            nodes.push(node);
        }
        let Reverse((lo, _, id)) = heap.pop().expect("a nonempty frontier");
        let hi = best_hi.clone().expect("set");
        if &hi - &lo <= tol {
            return Interval::new(lo, hi);
        }
        frontier = a.children(&nodes[id]);
    }
}

/// Distance from `x` to a nonempty set.
pub fn tb_dist(a: &TBSet, x: &Point) -> Result<CReal, SetError> {
    check(a, x.dim())?;
    let (a, x) = (a.clone(), x.clone());
    Ok(CReal::from_fn(move |n| dist_bounds(&a, &x, n)))
}

/// Enclosure of `sup_{a in A} d(a, B)` of width at most `2^(1-n)`.
fn one_sided_bounds(a: &TBSet, b: &TBSet, n: u32) -> Interval {
    let tol = Dyadic::pow2(1 - n as i64);
    let inner = n.saturating_add(2);
    let mut nodes: Vec<Node> = Vec::new();
    // max-heap on upper bounds; ties broken by insertion order
    let mut heap: BinaryHeap<(Dyadic, Reverse<usize>)> = BinaryHeap::new();
    let mut best_lo = Dyadic::zero();
    let dedup = a.shares_children();
    let mut seen = HashSet::new();
    let mut frontier = a.roots();
    loop {
        for node in frontier.drain(..) {
            if dedup && !seen.insert(node_key(&node)) {
                continue;
            }
            let d = dist_bounds(b, &node.center, inner);
            let r = node.radius();
            let lo = d.lo() - &r;
            if lo > best_lo {
                best_lo = lo;
            }
            heap.push((d.hi() + &r, Reverse(nodes.len())));
            nodes.push(node);
        }
        let (hi, Reverse(id)) = heap.pop().expect("a nonempty frontier");
        if &hi - &best_lo <= tol {
            let hi = hi.max(best_lo.clone());
            return Interval::new(best_lo, hi);
        }
        frontier = a.children(&nodes[id]);
    }
}

/// Hausdorff distance between nonempty sets. A set compared with the same
/// handle is at distance exactly zero.
pub fn hausdorff_tb(a: &TBSet, b: &TBSet) -> Result<CReal, SetError> {
    check(a, b.dimension())?;
    b.nonempty()?;
    if a.same_handle(b) {
        return Ok(CReal::zero());
    }
    let (a, b) = (a.clone(), b.clone());
    Ok(CReal::from_fn(move |n| one_sided_bounds(&a, &b, n).max(&one_sided_bounds(&b, &a, n))))
}
