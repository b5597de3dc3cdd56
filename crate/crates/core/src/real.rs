//! Exact reals as effort-indexed sequences of dyadic intervals.
//!
//! Every [`CReal`] answers `approx(n)` with an interval that contains the
//! represented real and has width at most `2^(1-n)`. Intervals for different
//! efforts always intersect (they share the real).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use crate::dyadic::Dyadic;
use crate::interval::Interval;
use crate::kernel::{effort_ceiling, exhausted, lock, select_binary, Kleenean, Side, Sierpinski};

type Approx = dyn Fn(u32) -> Interval + Send + Sync;

enum Repr {
    Exact(Dyadic),
    Lazy {
        approx: Box<Approx>,
        memo: Mutex<BTreeMap<u32, Interval>>,
    },
}

/// An exact real number.
#[derive(Clone)]
pub struct CReal(Arc<Repr>);

fn succ(n: u32, k: u32) -> u32 {
    n.saturating_add(k)
}

/// Smallest `b >= 0` with `2^b` bounding every element of every approximation.
fn magnitude_exponent(x: &CReal) -> u32 {
    let bound = &x.approx(0).magnitude() + &Dyadic::from(2);
    bound.ilog2().map_or(0, |l| (l + 1).max(0) as u32)
}

impl CReal {
    pub fn from_dyadic(d: Dyadic) -> Self {
        CReal(Arc::new(Repr::Exact(d)))
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_dyadic(Dyadic::from(v))
    }

    pub fn zero() -> Self {
        Self::from_dyadic(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::from_dyadic(Dyadic::one())
    }

    /// `num / den` for `den > 0`.
    pub fn from_ratio(num: BigInt, den: BigInt) -> Self {
        assert!(den.is_positive(), "denominator must be positive");
        if den.magnitude().count_ones() == 1 {
            let k = den.trailing_zeros().expect("nonzero") as i64;
            return CReal::from_dyadic(Dyadic::new(num, -k));
        }
        CReal::from_fn(move |n| {
            let lo = (&num << n).div_floor(&den);
            let hi = &lo + 1;
            Interval::new(Dyadic::new(lo, -(n as i64)), Dyadic::new(hi, -(n as i64)))
        })
    }

    /// Builds a real from an approximation function.
    ///
    /// The caller guarantees that `approx(n)` contains the real and has width
    /// at most `2^(1-n)`. Answers are memoized per effort.
    pub fn from_fn(approx: impl Fn(u32) -> Interval + Send + Sync + 'static) -> Self {
        CReal(Arc::new(Repr::Lazy {
            approx: Box::new(approx),
            memo: Mutex::new(BTreeMap::new()),
        }))
    }

    /// An interval of width at most `2^(1-n)` containing the real. Computing
    /// a fresh answer above the effort ceiling panics with `EffortExhausted`.
    pub fn approx(&self, n: u32) -> Interval {
        match &*self.0 {
            Repr::Exact(d) => Interval::point(d.clone()),
            Repr::Lazy { approx, memo } => {
                if let Some(iv) = lock(memo).get(&n) {
                    return iv.clone();
                }
                let ceiling = effort_ceiling();
                if n > ceiling {
                    exhausted(ceiling);
                }
                // computed outside the lock: approx may recurse into other reals
                let iv = approx(n);
                lock(memo).entry(n).or_insert(iv).clone()
            }
        }
    }

    /// The exact value, when this real was built from dyadics by exact operations.
    pub fn exact(&self) -> Option<&Dyadic> {
        match &*self.0 {
            Repr::Exact(d) => Some(d),
            Repr::Lazy { .. } => None,
        }
    }

    fn map_exact(&self, f: impl Fn(&Dyadic) -> Dyadic) -> Option<CReal> {
        self.exact().map(|d| CReal::from_dyadic(f(d)))
    }

    pub fn add(&self, rhs: &CReal) -> CReal {
        match (self.exact(), rhs.exact()) {
            (Some(a), Some(b)) => CReal::from_dyadic(a + b),
            (Some(a), None) => {
                let (a, y) = (Interval::point(a.clone()), rhs.clone());
                CReal::from_fn(move |n| a.add(&y.approx(n)))
            }
            (None, Some(_)) => rhs.add(self),
            (None, None) => {
                let (x, y) = (self.clone(), rhs.clone());
                CReal::from_fn(move |n| x.approx(succ(n, 1)).add(&y.approx(succ(n, 1))))
            }
        }
    }

    pub fn neg(&self) -> CReal {
        self.map_exact(|d| -d).unwrap_or_else(|| {
            let x = self.clone();
            CReal::from_fn(move |n| x.approx(n).neg())
        })
    }

    pub fn sub(&self, rhs: &CReal) -> CReal {
        self.add(&rhs.neg())
    }

    pub fn abs(&self) -> CReal {
        self.map_exact(Dyadic::abs).unwrap_or_else(|| {
            let x = self.clone();
            CReal::from_fn(move |n| x.approx(n).abs())
        })
    }

    pub fn max(&self, rhs: &CReal) -> CReal {
        if let (Some(a), Some(b)) = (self.exact(), rhs.exact()) {
            return CReal::from_dyadic(a.clone().max(b.clone()));
        }
        let (x, y) = (self.clone(), rhs.clone());
        CReal::from_fn(move |n| x.approx(n).max(&y.approx(n)))
    }

    pub fn min(&self, rhs: &CReal) -> CReal {
        if let (Some(a), Some(b)) = (self.exact(), rhs.exact()) {
            return CReal::from_dyadic(a.clone().min(b.clone()));
        }
        let (x, y) = (self.clone(), rhs.clone());
        CReal::from_fn(move |n| x.approx(n).min(&y.approx(n)))
    }

    /// Product. Operands are evaluated at `n + 2 + b`, where `2^b` bounds the
    /// other factor, then the result is rounded outward to the `2^-(n+3)` grid.
    pub fn mul(&self, rhs: &CReal) -> CReal {
        match (self.exact(), rhs.exact()) {
            (Some(a), Some(b)) => CReal::from_dyadic(a * b),
            (Some(c), None) => {
                let bc = c.ilog2().map_or(0, |l| (l + 1).max(0) as u32);
                let (c, y) = (Interval::point(c.clone()), rhs.clone());
                CReal::from_fn(move |n| {
                    c.mul(&y.approx(succ(n, 1 + bc))).round_out(-(n as i64) - 3)
                })
            }
            (None, Some(_)) => rhs.mul(self),
            (None, None) => {
                let (x, y) = (self.clone(), rhs.clone());
                let (bx, by) = (magnitude_exponent(&x), magnitude_exponent(&y));
                CReal::from_fn(move |n| {
                    let xi = x.approx(succ(n, 2 + by));
                    let yi = y.approx(succ(n, 2 + bx));
                    xi.mul(&yi).round_out(-(n as i64) - 3)
                })
            }
        }
    }

    /// Multiplication by `2^k`; exact.
    pub fn scale_pow2(&self, k: i64) -> CReal {
        self.map_exact(|d| d.shl(k)).unwrap_or_else(|| {
            let x = self.clone();
            CReal::from_fn(move |n| {
                let m = (n as i64 + k).clamp(0, u32::MAX as i64) as u32;
                x.approx(m).shl(k)
            })
        })
    }

    pub fn half(&self) -> CReal {
        self.scale_pow2(-1)
    }

    /// Semi-decides `self < rhs`: True once some effort separates the intervals.
    pub fn lt(&self, rhs: &CReal) -> Sierpinski {
        let (x, y) = (self.clone(), rhs.clone());
        Sierpinski::from_test(move |e| x.approx(e.0).certainly_lt(&y.approx(e.0)))
    }

    /// Total approximate comparison `self <_n rhs`.
    ///
    /// True when `self <= rhs - 2^-n`, False when `rhs <= self - 2^-n`, either
    /// answer in between. Realized by selecting between `self < rhs + 2^-n`
    /// and `rhs < self + 2^-n`; the left test wins ties in the schedule.
    pub fn soft_lt(&self, rhs: &CReal, n: u32) -> bool {
        let eps = CReal::from_dyadic(Dyadic::pow2(-(n as i64)));
        let left = self.lt(&rhs.add(&eps));
        let right = rhs.lt(&self.add(&eps));
        select_binary(left.as_kleenean(), right.as_kleenean()) == Side::Left
    }

    /// A dyadic within `2^-p` of this real: the midpoint of `approx(p+1)`
    /// rounded down to the `2^-(p+1)` grid.
    pub fn approx_dyadic(&self, p: u32) -> Dyadic {
        if let Some(d) = self.exact() {
            if d.exponent() >= -(p as i64) - 1 {
                return d.clone();
            }
        }
        self.approx(succ(p, 1)).midpoint().floor_to(-(p as i64) - 1)
    }

    /// Limit of a fast Cauchy sequence (`|f(n) - f(m)| <= 2^-n + 2^-m`).
    ///
    /// `approx(n)` is `f(n+1).approx(n+1)` widened by `2^-(n+1)`. The Cauchy
    /// condition is not checked.
    pub fn limit(f: impl Fn(u32) -> CReal + Send + Sync + 'static) -> CReal {
        CReal::from_fn(move |n| {
            let m = succ(n, 1);
            f(m).approx(m).widen(&Dyadic::pow2(-(m as i64)))
        })
    }

    /// Total extension of [`CReal::limit`].
    ///
    /// For a fast Cauchy `f` this is its limit; for any other sequence it is
    /// still some real. The sequence is sped up to `f(n+3)` and walked while
    /// consecutive terms stay close; at the first step where "far apart" is
    /// selected the walk freezes on its current value.
    pub fn extended_limit(f: impl Fn(u32) -> CReal + Send + Sync + 'static) -> CReal {
        let walk = Arc::new(FreezingWalk {
            source: Box::new(move |n| f(succ(n, 3))),
            state: Mutex::new(WalkState::default()),
        });
        CReal::limit(move |n| walk.term(n))
    }

    /// `sqrt(a)` for a dyadic `a >= 0`, as the limit of certified Newton iterates.
    pub fn sqrt_dyadic(a: &Dyadic) -> Option<CReal> {
        if a.is_negative() {
            return None;
        }
        if a.is_zero() {
            return Some(CReal::zero());
        }
        // sqrt(a) = sqrt(a * 4^k) / 2^k with a * 4^k >= 1
        let k = a.ilog2().map_or(0, |l| if l < 0 { (-l + 1) / 2 } else { 0 });
        let scaled = a.shl(2 * k);
        let root = CReal::limit(move |n| CReal::from_dyadic(newton_sqrt_upper(&scaled, succ(n, k as u32))));
        Some(root.scale_pow2(-k))
    }

    pub fn sqrt3() -> CReal {
        CReal::sqrt_dyadic(&Dyadic::from(3)).expect("positive")
    }

    /// Exact decimal string of [`CReal::approx_dyadic`].
    pub fn to_decimal(&self, p: u32) -> String {
        self.approx_dyadic(p).to_decimal_string()
    }
}

/// Newton iterate `x >= sqrt(a)` with `x - sqrt(a) <= 2^-(n+1)`, for `a >= 1`.
///
/// Iterates are rounded upwards so they never drop below the root; the stop
/// rule `x^2 - a <= 2^-n` certifies the error since `x + sqrt(a) >= 2`.
fn newton_sqrt_upper(a: &Dyadic, n: u32) -> Dyadic {
    debug_assert!(*a >= Dyadic::one());
    let grid = -(n as i64) - 4 - a.ilog2().unwrap_or(0).max(0);
    let half_bits = a.ilog2().unwrap_or(0).max(0) / 2 + 1;
    let mut x = Dyadic::pow2(half_bits); // seed 2 for a = 3
    let tol = Dyadic::pow2(-(n as i64));
    loop {
        let excess = &(&x * &x) - a;
        debug_assert!(!excess.is_negative());
        if excess <= tol {
            return x;
        }
        let q = a.div_to(&x, grid, true);
        x = (&x + &q).half().ceil_to(grid);
    }
}

#[derive(Default)]
struct WalkState {
    terms: Vec<CReal>,
    frozen: bool,
}

struct FreezingWalk {
    source: Box<dyn Fn(u32) -> CReal + Send + Sync>,
    state: Mutex<WalkState>,
}

impl FreezingWalk {
    fn term(&self, n: u32) -> CReal {
        let mut st = lock(&self.state);
        if st.terms.is_empty() {
            st.terms.push((self.source)(0));
        }
        while st.terms.len() as u32 <= n {
            let k = st.terms.len() as u32 - 1;
            let current = st.terms[k as usize].clone();
            if st.frozen {
                st.terms.push(current);
                continue;
            }
            let next = (self.source)(k + 1);
            let gap = current.sub(&next).abs();
            let close = gap.lt(&CReal::from_dyadic(Dyadic::pow2(-(k as i64) - 1)));
            let far = CReal::from_dyadic(Dyadic::pow2(-(k as i64) - 2)).lt(&gap);
            match select_binary(close.as_kleenean(), far.as_kleenean()) {
                Side::Left => st.terms.push(next),
                Side::Right => {
                    st.frozen = true;
                    st.terms.push(current);
                }
            }
        }
        st.terms[n as usize].clone()
    }
}

impl From<Dyadic> for CReal {
    fn from(d: Dyadic) -> Self {
        CReal::from_dyadic(d)
    }
}

impl From<i64> for CReal {
    fn from(v: i64) -> Self {
        CReal::from_i64(v)
    }
}

impl fmt::Debug for CReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact() {
            Some(d) => write!(f, "CReal({d})"),
            None => write!(f, "CReal(~{})", self.approx(20).midpoint().to_decimal_string()),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for &CReal {
            type Output = CReal;
            fn $m(self, rhs: &CReal) -> CReal {
                CReal::$m(self, rhs)
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Neg for &CReal {
    type Output = CReal;
    fn neg(self) -> CReal {
        CReal::neg(self)
    }
}

/// Width contract check used by tests: `approx(n)` has width `<= 2^(1-n)`.
pub fn width_ok(iv: &Interval, n: u32) -> bool {
    iv.width() <= Dyadic::pow2(1 - n as i64)
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<CReal>();
    check::<Kleenean>();
}
