//! Points of R^m under the max norm, and the metric-space record.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::dyadic::Dyadic;
use crate::interval::Interval;
use crate::kernel::lock;
use crate::real::CReal;

/// A point of R^m as a list of exact reals.
#[derive(Clone)]
pub struct Point {
    coords: Arc<[CReal]>,
}

impl Point {
    pub fn new(coords: Vec<CReal>) -> Self {
        assert!(!coords.is_empty(), "points have dimension at least 1");
        Point { coords: coords.into() }
    }

    pub fn from_dyadics(coords: Vec<Dyadic>) -> Self {
        Point::new(coords.into_iter().map(CReal::from_dyadic).collect())
    }

    pub fn origin(dim: usize) -> Self {
        Point::from_dyadics(vec![Dyadic::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, i: usize) -> &CReal {
        &self.coords[i]
    }

    pub fn coords(&self) -> &[CReal] {
        &self.coords
    }

    /// Coordinates as dyadics, when every coordinate is exact.
    pub fn exact(&self) -> Option<Vec<Dyadic>> {
        self.coords.iter().map(|c| c.exact().cloned()).collect()
    }

    pub fn approx(&self, n: u32) -> Vec<Interval> {
        self.coords.iter().map(|c| c.approx(n)).collect()
    }

    /// Coordinatewise [`CReal::approx_dyadic`]; max-norm error at most `2^-p`.
    pub fn approx_dyadic(&self, p: u32) -> Vec<Dyadic> {
        self.coords.iter().map(|c| c.approx_dyadic(p)).collect()
    }

    pub fn add(&self, rhs: &Point) -> Point {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        Point::new(self.coords.iter().zip(rhs.coords.iter()).map(|(a, b)| a.add(b)).collect())
    }

    pub fn scale(&self, c: &CReal) -> Point {
        Point::new(self.coords.iter().map(|a| a.mul(c)).collect())
    }

    pub fn scale_pow2(&self, k: i64) -> Point {
        Point::new(self.coords.iter().map(|a| a.scale_pow2(k)).collect())
    }

    /// The two points share the same underlying coordinate storage.
    pub fn same_handle(&self, other: &Point) -> bool {
        Arc::ptr_eq(&self.coords, &other.coords)
    }

    /// Address of the coordinate storage, for identity-keyed lookups.
    pub(crate) fn handle_addr(&self) -> usize {
        self.coords.as_ptr() as *const () as usize
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter()).finish()
    }
}

/// `max_i |x_i - y_i|`.
pub fn max_norm_dist(x: &Point, y: &Point) -> CReal {
    assert_eq!(x.dim(), y.dim(), "dimension mismatch");
    let mut parts = x.coords.iter().zip(y.coords.iter()).map(|(a, b)| a.sub(b).abs());
    let first = parts.next().expect("dimension >= 1");
    parts.fold(first, |acc, d| acc.max(&d))
}

/// Interval enclosure of the max-norm distance from coordinate approximations
/// at effort `e`. Width at most `2^(2-e)`.
pub(crate) fn dist_enclosure(x: &Point, y: &Point, e: u32) -> Interval {
    let mut acc: Option<Interval> = None;
    for (a, b) in x.coords.iter().zip(y.coords.iter()) {
        let d = a.approx(e).sub(&b.approx(e)).abs();
        acc = Some(match acc {
            None => d,
            Some(m) => m.max(&d),
        });
    }
    acc.expect("dimension >= 1")
}

/// Exact max-norm distance between dyadic points.
pub fn dyadic_dist(x: &[Dyadic], y: &[Dyadic]) -> Dyadic {
    assert_eq!(x.len(), y.len(), "dimension mismatch");
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Dyadic::zero)
}

// Dense enumeration of dyadic points.
//
// Shell g holds the pairs (k, z) with k >= 0, z in Z^m and max(k, |z|_inf) = g,
// standing for the point z * 2^-k. Shells come in increasing g, pairs inside a
// shell by k and then lexicographically in z. Shells 0..=g together hold
// (g + 1)(2g + 1)^m pairs, so every point with small coordinates and a short
// binary expansion gets a small index.

fn pow(base: u128, e: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Pairs in shells `0..g`.
fn shells_below(g: u128, m: usize) -> Option<u128> {
    if g == 0 {
        return Some(0);
    }
    g.checked_mul(pow(2 * g - 1, m)?)
}

/// Size of the hollow cube `{z : |z|_inf = g}` in `Z^m`.
fn hollow(g: u128, m: usize) -> Option<u128> {
    if g == 0 {
        return Some(1);
    }
    Some(pow(2 * g + 1, m)? - pow(2 * g - 1, m)?)
}

fn unrank_cube(mut r: u128, g: u128, m: usize) -> Vec<i128> {
    let side = 2 * g + 1;
    let mut z = vec![0i128; m];
    for j in (0..m).rev() {
        z[j] = (r % side) as i128 - g as i128;
        r /= side;
    }
    z
}

fn rank_cube(z: &[i128], g: u128) -> Option<u128> {
    let side = 2 * g + 1;
    let mut r: u128 = 0;
    for &c in z {
        r = r.checked_mul(side)?.checked_add((c + g as i128) as u128)?;
    }
    Some(r)
}

/// Completions of the remaining `rem` coordinates in `[-g, g]`, given whether
/// a coordinate of absolute value `g` already occurred.
fn completions(g: u128, rem: usize, hit: bool) -> Option<u128> {
    if hit {
        pow(2 * g + 1, rem)
    } else if g == 0 {
        Some(if rem == 0 { 0 } else { 1 })
    } else {
        Some(pow(2 * g + 1, rem)? - pow(2 * g - 1, rem)?)
    }
}

fn unrank_hollow(mut r: u128, g: u128, m: usize) -> Vec<i128> {
    let gi = g as i128;
    let mut z = Vec::with_capacity(m);
    let mut hit = false;
    for j in 0..m {
        let rem = m - j - 1;
        let edge = completions(g, rem, true).expect("in range");
        let inner = completions(g, rem, hit).expect("in range");
        if r < edge {
            z.push(-gi);
            hit = true;
            continue;
        }
        r -= edge;
        let inner_block = inner * (2 * g).saturating_sub(1);
        if g > 0 && r < inner_block {
            z.push(-gi + 1 + (r / inner) as i128);
            r %= inner;
            continue;
        }
        if g > 0 {
            r -= inner_block;
        }
        z.push(gi);
        hit = true;
    }
    z
}

fn rank_hollow(z: &[i128], g: u128) -> Option<u128> {
    let gi = g as i128;
    let m = z.len();
    let mut r: u128 = 0;
    let mut hit = false;
    for (j, &c) in z.iter().enumerate() {
        let rem = m - j - 1;
        let edge = completions(g, rem, true)?;
        let inner = completions(g, rem, hit)?;
        if c == -gi {
            hit = true;
            continue;
        }
        r = r.checked_add(edge)?;
        if c < gi {
            r = r.checked_add(inner.checked_mul((c + gi - 1) as u128)?)?;
            continue;
        }
        if g > 0 {
            r = r.checked_add(inner.checked_mul(2 * g - 1)?)?;
        }
        hit = true;
    }
    Some(r)
}

/// The `i`-th dyadic point of `D^m` as `(k, z)`, meaning `z * 2^-k`.
pub fn dense_unrank(i: u64, m: usize) -> (u32, Vec<i128>) {
    let i = i as u128;
    // largest g with shells_below(g) <= i
    let (mut lo, mut hi) = (0u128, 1u128);
    while shells_below(hi, m).is_some_and(|c| c <= i) {
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if shells_below(mid, m).is_some_and(|c| c <= i) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = lo;
    let mut r = i - shells_below(g, m).expect("checked");
    let per_k = hollow(g, m).expect("fits");
    if g > 0 && r < g * per_k {
        let k = r / per_k;
        r %= per_k;
        (k as u32, unrank_hollow(r, g, m))
    } else {
        if g > 0 {
            r -= g * per_k;
        }
        (g as u32, unrank_cube(r, g, m))
    }
}

/// Index of the representation `(k, z)` in the enumeration, if it fits in `u64`.
pub fn dense_rank(k: u32, z: &[i128]) -> Option<u64> {
    let m = z.len();
    let zmax = z.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
    let g = zmax.max(k as u128);
    let mut r = shells_below(g, m)?;
    if (k as u128) < g {
        r = r.checked_add((k as u128).checked_mul(hollow(g, m)?)?)?;
        r = r.checked_add(rank_hollow(z, g)?)?;
    } else {
        if g > 0 {
            r = r.checked_add(g.checked_mul(hollow(g, m)?)?)?;
        }
        r = r.checked_add(rank_cube(z, g)?)?;
    }
    u64::try_from(r).ok()
}

/// The `i`-th point of the dyadic dense subset of R^m.
pub fn dyadic_dense(i: u64, m: usize) -> Point {
    let (k, z) = dense_unrank(i, m);
    Point::from_dyadics(z.into_iter().map(|c| Dyadic::new(BigInt::from(c), -(k as i64))).collect())
}

/// Index of a dyadic point in the enumeration, using its shortest representation.
pub fn dyadic_index(x: &[Dyadic]) -> Option<u64> {
    let k = x.iter().map(|d| (-d.exponent()).max(0)).max().unwrap_or(0);
    let k = u32::try_from(k).ok()?;
    let z: Option<Vec<i128>> = x
        .iter()
        .map(|d| d.shl(k as i64).to_bigint_exact().and_then(|b| b.to_i128()))
        .collect();
    dense_rank(k, &z?)
}

/// An index whose dense point lies within `2^-p` of `x`.
pub fn dense_near(x: &Point, p: u32) -> Option<u64> {
    let grid = -(p as i64);
    let coords: Vec<Dyadic> = x.approx_dyadic(p + 1).iter().map(|d| d.round_to(grid)).collect();
    dyadic_index(&coords)
}

type DistFn = dyn Fn(&Point, &Point) -> CReal + Send + Sync;
type DenseFn = dyn Fn(u64) -> Point + Send + Sync;

/// A separable metric space: a distance and an enumeration of a dense subset.
#[derive(Clone)]
pub struct MetricSpace {
    dimension: usize,
    distance: Arc<DistFn>,
    dense: Arc<DenseFn>,
}

impl MetricSpace {
    pub fn new(
        dimension: usize,
        distance: impl Fn(&Point, &Point) -> CReal + Send + Sync + 'static,
        dense: impl Fn(u64) -> Point + Send + Sync + 'static,
    ) -> Self {
        MetricSpace {
            dimension,
            distance: Arc::new(distance),
            dense: Arc::new(dense),
        }
    }

    /// R^m with the max norm and the dyadic points as dense subset.
    pub fn euclidean(m: usize) -> Self {
        MetricSpace::new(m, max_norm_dist, move |i| dyadic_dense(i, m))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn distance(&self, x: &Point, y: &Point) -> CReal {
        (self.distance)(x, y)
    }

    pub fn dense(&self, i: u64) -> Point {
        (self.dense)(i)
    }
}

impl fmt::Debug for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MetricSpace(dim {})", self.dimension)
    }
}

/// Coordinatewise limit of a fast Cauchy sequence of points.
pub fn point_limit(f: impl Fn(u32) -> Point + Send + Sync + 'static) -> Point {
    let cache: Arc<Mutex<HashMap<u32, Point>>> = Arc::default();
    let f = Arc::new(f);
    let term = move |n: u32| -> Point {
        if let Some(p) = lock(&cache).get(&n) {
            return p.clone();
        }
        let p = f(n);
        lock(&cache).entry(n).or_insert(p).clone()
    };
    let dim = term(0).dim();
    let term = Arc::new(term);
    Point::new(
        (0..dim)
            .map(|j| {
                let term = term.clone();
                CReal::limit(move |n| term(n).coord(j).clone())
            })
            .collect(),
    )
}
