//! Open and closed sets, compactness and overtness testers, and a modulus
//! of continuity for semi-decisions obtained by watching effort requests.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex};

use crate::dyadic::Dyadic;
use crate::interval::Interval;
use crate::kernel::{countable_select, effort_ceiling, exhausted, lock, Effort, Kleenean, Sierpinski, Tri};
use crate::real::CReal;
use crate::space::{dist_enclosure, MetricSpace, Point};
use crate::tbound::{node_key, tb_dist, TBSet};

/// The open ball of radius `2^-level` around `center`. Negative levels give
/// radii above 1.
#[derive(Clone, Debug)]
pub struct Ball {
    pub center: Point,
    pub level: i32,
}

impl Ball {
    pub fn new(center: Point, level: i32) -> Self {
        Ball { center, level }
    }

    pub fn radius(&self) -> Dyadic {
        Dyadic::pow2(-i64::from(self.level))
    }
}

type BallSeq = dyn Fn(u64) -> Option<Ball> + Send + Sync;

/// Semi-decidable predicate on points.
pub type SierpinskiMap = Arc<dyn Fn(&Point) -> Sierpinski + Send + Sync>;

/// An open set as a countable union of balls; `None` entries are empty.
#[derive(Clone)]
pub struct OpenSet {
    space: MetricSpace,
    balls: Arc<BallSeq>,
}

impl OpenSet {
    pub fn new(space: MetricSpace, balls: impl Fn(u64) -> Option<Ball> + Send + Sync + 'static) -> Self {
        OpenSet {
            space,
            balls: Arc::new(balls),
        }
    }

    /// Union of finitely many balls.
    pub fn from_balls(space: MetricSpace, balls: Vec<Ball>) -> Self {
        OpenSet::new(space, move |i| balls.get(i as usize).cloned())
    }

    pub fn empty(space: MetricSpace) -> Self {
        OpenSet::new(space, |_| None)
    }

    pub fn ball(&self, i: u64) -> Option<Ball> {
        (self.balls)(i)
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }
}

impl fmt::Debug for OpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OpenSet({:?})", self.space)
    }
}

/// Semi-decides `x in U`.
pub fn open_member(u: &OpenSet, x: &Point) -> Sierpinski {
    let (u, x) = (u.clone(), x.clone());
    Kleenean::countable_or(move |i| match u.ball(i) {
        Some(b) => u.space.distance(&x, &b.center).lt(&CReal::from_dyadic(b.radius())).into_kleenean(),
        None => Kleenean::bottom(),
    })
}

/// `(i, j)` from its Cantor pairing index.
pub fn unpair(q: u64) -> (u64, u64) {
    let w = ((((8 * q as u128 + 1) as f64).sqrt() as u64).saturating_sub(1)) / 2;
    // correct the float estimate
    let mut w = w;
    while (w + 1) * (w + 2) / 2 <= q {
        w += 1;
    }
    while w * (w + 1) / 2 > q {
        w -= 1;
    }
    let j = q - w * (w + 1) / 2;
    (w - j, j)
}

pub fn pair(i: u64, j: u64) -> u64 {
    let w = i + j;
    w * (w + 1) / 2 + j
}

/// Union of a sequence of open sets, interleaving their balls diagonally.
pub fn open_union_countable(us: impl Fn(u64) -> OpenSet + Send + Sync + 'static) -> OpenSet {
    let space = us(0).space.clone();
    let cache: Mutex<HashMap<u64, OpenSet>> = Mutex::new(HashMap::new());
    OpenSet::new(space, move |q| {
        let (i, j) = unpair(q);
        let found = lock(&cache).get(&i).cloned();
        let set = found.unwrap_or_else(|| {
            let s = us(i);
            lock(&cache).insert(i, s.clone());
            s
        });
        set.ball(j)
    })
}

/// Membership in `U ∩ V`.
pub fn open_intersect(u: &OpenSet, v: &OpenSet) -> SierpinskiMap {
    let (u, v) = (u.clone(), v.clone());
    Arc::new(move |x| open_member(&u, x).and(&open_member(&v, x)))
}

/// Index of a dense point inside a nonempty open set.
///
/// Selects over pairs `(i, j)` with the test `d(dense(i), c_j) < 2^-(n_j+1)`.
/// Does not return on the empty set (or panics at the effort ceiling).
pub fn open_choice(u: &OpenSet) -> u64 {
    let u = u.clone();
    let q = countable_select(move |q| {
        let (i, j) = unpair(q);
        match u.ball(j) {
            Some(b) => {
                let d = u.space.distance(&u.space.dense(i), &b.center);
                d.lt(&CReal::from_dyadic(b.radius().half())).into_kleenean()
            }
            None => Kleenean::bottom(),
        }
    });
    unpair(q).0
}

/// A closed set, through a semi-decision of its complement.
#[derive(Clone)]
pub struct ClosedSet {
    outside: SierpinskiMap,
}

impl ClosedSet {
    pub fn from_complement(outside: impl Fn(&Point) -> Sierpinski + Send + Sync + 'static) -> Self {
        ClosedSet {
            outside: Arc::new(outside),
        }
    }

    pub fn complement_of(u: &OpenSet) -> Self {
        let u = u.clone();
        ClosedSet::from_complement(move |x| open_member(&u, x))
    }

    /// `{x : d(x, c) <= 2^-level}` under the max norm.
    pub fn closed_ball(center: Point, level: i32) -> Self {
        let r = CReal::from_dyadic(Dyadic::pow2(-i64::from(level)));
        ClosedSet::from_complement(move |x| r.lt(&crate::space::max_norm_dist(x, &center)))
    }

    /// Semi-decides `x ∉ A`.
    pub fn outside(&self, x: &Point) -> Sierpinski {
        (self.outside)(x)
    }
}

impl fmt::Debug for ClosedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ClosedSet(..)")
    }
}

pub fn closed_union(a: &ClosedSet, b: &ClosedSet) -> ClosedSet {
    let (a, b) = (a.clone(), b.clone());
    ClosedSet::from_complement(move |x| a.outside(x).and(&b.outside(x)))
}

pub fn closed_countable_intersection(seq: impl Fn(u64) -> ClosedSet + Send + Sync + 'static) -> ClosedSet {
    let seq = Arc::new(seq);
    ClosedSet::from_complement(move |x| {
        let (seq, x) = (seq.clone(), x.clone());
        Kleenean::countable_or(move |i| seq(i).outside(&x).into_kleenean())
    })
}

/// Deepest covering level explored by [`compact_subset_semidec`].
pub const SUBSET_DEPTH_CAP: u32 = 48;

/// Semi-decides `K ⊆ U`.
///
/// At effort `e` the covering tree of `K` is searched down to level
/// `min(e, SUBSET_DEPTH_CAP)`. A node at level `k` is settled when the ball of
/// radius `2^-k` around one of its members (inflated by how far members may
/// sit from the center) is well inside one of the first `e` balls of `U`:
/// `d(p, c_i) < 2^-n_i - 2^-k - slack`.
pub fn compact_subset_semidec(k: &TBSet, u: &OpenSet) -> Sierpinski {
    let (k, u) = (k.clone(), u.clone());
    let ball_cache: Mutex<Vec<Option<Ball>>> = Mutex::new(Vec::new());
    Sierpinski::from_test(move |Effort(e)| {
        let balls: Vec<Option<Ball>> = {
            let mut c = lock(&ball_cache);
            while (c.len() as u64) < u64::from(e) {
                let next = u.ball(c.len() as u64);
                c.push(next);
            }
            c[..e as usize].to_vec()
        };
        let depth = e.min(SUBSET_DEPTH_CAP);
        let slack = k.member_slack();
        let dedup = k.shares_children();
        let mut seen = HashSet::new();
        let mut stack = k.roots();
        while let Some(node) = stack.pop() {
            if dedup && !seen.insert(node_key(&node)) {
                continue;
            }
            let p = k.member_near(&node);
            let lvl = i64::from(node.level);
            let reach = &Dyadic::pow2(-lvl) + &Dyadic::pow2(i64::from(slack) - lvl);
            let settled = balls.iter().flatten().any(|b| {
                let d = dist_enclosure(&p, &b.center, e);
                d.hi() < &(&b.radius() - &reach)
            });
            if settled {
                continue;
            }
            if node.level >= depth {
                return false;
            }
            stack.extend(k.children(&node));
        }
        true
    })
}

/// Semi-decides `V ∩ U ≠ ∅` through `d(V, c_i) < 2^-n_i`.
pub fn overt_intersects_semidec(v: &TBSet, u: &OpenSet) -> Sierpinski {
    if v.is_empty() {
        return Sierpinski::bottom();
    }
    let (v, u) = (v.clone(), u.clone());
    Kleenean::countable_or(move |i| match u.ball(i) {
        Some(b) => {
            let d = tb_dist(&v, &b.center).expect("nonempty, matching dimension");
            d.lt(&CReal::from_dyadic(b.radius())).into_kleenean()
        }
        None => Kleenean::bottom(),
    })
}

/// The canonical realizer of `x`: at effort `e` the interval of radius `2^-e`
/// around the `2^-(e+2)` approximation of each coordinate.
pub fn canonical_realizer(x: &Point) -> Point {
    Point::new(
        x.coords()
            .iter()
            .map(|c| {
                let c = c.clone();
                CReal::from_fn(move |e| Interval::around(&c.approx_dyadic(e.saturating_add(2)), &Dyadic::pow2(-i64::from(e))))
            })
            .collect(),
    )
}

/// A point that records the largest effort at which it was queried.
///
/// Answers exactly as the wrapped point does. Each evaluation should use a
/// fresh spy, since the record is shared by all its clones.
pub struct SpyPoint {
    point: Point,
    high_water: Arc<AtomicU32>,
}

impl SpyPoint {
    pub fn new(underlying: &Point) -> Self {
        let high_water = Arc::new(AtomicU32::new(0));
        let point = Point::new(
            underlying
                .coords()
                .iter()
                .map(|c| {
                    let (c, hw) = (c.clone(), high_water.clone());
                    CReal::from_fn(move |e| {
                        hw.fetch_max(e, Ordering::SeqCst);
                        c.approx(e)
                    })
                })
                .collect(),
        );
        SpyPoint { point, high_water }
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn high_water(&self) -> u32 {
        self.high_water.load(Ordering::SeqCst)
    }
}

/// An `m` such that `f` holds on the ball of radius `2^-m` around `x`.
///
/// Evaluates `f` on a spy of the canonical realizer of `x` at efforts
/// `0, 1, ...` until it answers True, then returns the largest effort read
/// from the argument plus one. Valid for `f` that only looks at its argument
/// through effort-indexed approximations. Requires `f(x)` to hold; otherwise
/// runs into the effort ceiling.
pub fn modulus_of_continuity(f: &dyn Fn(&Point) -> Sierpinski, x: &Point) -> u32 {
    let spy = SpyPoint::new(&canonical_realizer(x));
    let answer = f(spy.point());
    let ceiling = effort_ceiling();
    let mut e = 0u32;
    loop {
        if answer.query(Effort(e)) == Tri::True {
            return spy.high_water().saturating_add(1);
        }
        if e >= ceiling {
            exhausted(ceiling);
        }
        e += 1;
    }
}

/// A fixed set of semi-decisions on the plane used to exercise
/// [`modulus_of_continuity`]: half-planes, balls, a located set and products.
pub fn modulus_corpus() -> Vec<(&'static str, SierpinskiMap)> {
    let plane = MetricSpace::euclidean(2);
    let origin = Point::origin(2);
    let half = Point::from_dyadics(vec![Dyadic::new(1, -1), Dyadic::zero()]);
    let unit_at_origin = OpenSet::from_balls(plane.clone(), vec![Ball::new(origin.clone(), 0)]);
    let unit_at_half = OpenSet::from_balls(plane, vec![Ball::new(half, 0)]);
    let lens = open_intersect(&unit_at_origin, &unit_at_half);
    let tri = crate::fractal::triangle_tb();
    let one = CReal::one();
    let quarter = CReal::from_dyadic(Dyadic::new(1, -2));
    let half_r = CReal::from_dyadic(Dyadic::new(1, -1));
    vec![
        ("x < 1", Arc::new(move |y: &Point| y.coord(0).lt(&one)) as SierpinskiMap),
        ("y in B(0, 1)", Arc::new(move |y: &Point| open_member(&unit_at_origin, y))),
        ("d(triangle, y) < 1/2", Arc::new(move |y: &Point| tb_dist(&tri, y).expect("plane point").lt(&half_r))),
        ("x * y < 1/4", Arc::new(move |y: &Point| y.coord(0).mul(y.coord(1)).lt(&quarter))),
        ("y in B(0, 1) and B((1/2, 0), 1)", lens),
    ]
}
