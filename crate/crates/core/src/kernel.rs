//! Lazy three-valued truth values and the nondeterministic selection
//! operators built on them.
//!
//! A [`Kleenean`] is queried with an [`Effort`]; the answer may be
//! [`Tri::Unknown`] at low effort and commit to `True` or `False` later.
//! Once committed, an answer never changes. Nondeterminism is resolved by
//! fixed search schedules, so every operation here is deterministic.

use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};

use crate::error::EffortExhausted;

/// Computation budget: effort `n` licenses answers of quality `2^-n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Effort(pub u32);

impl Effort {
    pub fn next(self) -> Effort {
        Effort(self.0.saturating_add(1))
    }
}

impl From<u32> for Effort {
    fn from(v: u32) -> Self {
        Effort(v)
    }
}

impl fmt::Display for Effort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    pub fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::True, _) | (_, Tri::True) => Tri::True,
            (Tri::False, Tri::False) => Tri::False,
            _ => Tri::Unknown,
        }
    }

    pub fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        }
    }

    pub fn is_true(self) -> bool {
        self == Tri::True
    }

    pub fn from_bool_or_unknown(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::Unknown
        }
    }
}

static EFFORT_CEILING: AtomicU32 = AtomicU32::new(u32::MAX);

/// Process-wide ceiling for the unbounded search loops in this module.
///
/// With the default (`u32::MAX`) a failed precondition means the loop
/// effectively never returns. A lower ceiling turns that into a panic
/// carrying [`EffortExhausted`], which front ends can catch.
pub fn set_effort_ceiling(ceiling: u32) {
    EFFORT_CEILING.store(ceiling, Ordering::SeqCst);
}

pub fn effort_ceiling() -> u32 {
    EFFORT_CEILING.load(Ordering::SeqCst)
}

pub(crate) fn exhausted(ceiling: u32) -> ! {
    std::panic::panic_any(EffortExhausted { ceiling })
}

pub(crate) fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

type Query = dyn Fn(Effort) -> Tri + Send + Sync;

/// Lazy Boolean with an explicit indeterminate value.
#[derive(Clone)]
pub struct Kleenean(Arc<Query>);

#[derive(Default)]
struct ProbeMemo {
    /// Every effort below this has been probed and was Unknown.
    next: u32,
    committed: Option<(u32, Tri)>,
}

impl Kleenean {
    pub fn constant(v: Tri) -> Self {
        Kleenean(Arc::new(move |_| v))
    }

    pub fn truth() -> Self {
        Self::constant(Tri::True)
    }

    pub fn falsity() -> Self {
        Self::constant(Tri::False)
    }

    pub fn bottom() -> Self {
        Self::constant(Tri::Unknown)
    }

    /// Wraps a raw test as a monotone Kleenean: the answer at effort `n` is
    /// the first definite answer of `probe` at some effort `<= n`.
    ///
    /// `probe` must never give contradictory definite answers at different
    /// efforts. Results are memoized, so each effort is probed at most once.
    pub fn from_probe(probe: impl Fn(Effort) -> Tri + Send + Sync + 'static) -> Self {
        let memo = Mutex::new(ProbeMemo::default());
        Kleenean(Arc::new(move |Effort(n)| {
            let mut m = lock(&memo);
            if let Some((at, v)) = m.committed {
                return if at <= n { v } else { Tri::Unknown };
            }
            while m.next <= n {
                let e = m.next;
                let v = probe(Effort(e));
                if v != Tri::Unknown {
                    m.committed = Some((e, v));
                    m.next = e.saturating_add(1);
                    return v;
                }
                if e == u32::MAX {
                    break;
                }
                m.next = e + 1;
            }
            Tri::Unknown
        }))
    }

    /// True from effort `at` onwards, Unknown before. Mostly for tests.
    pub fn true_from(at: u32) -> Self {
        Kleenean(Arc::new(move |Effort(n)| Tri::from_bool_or_unknown(n >= at)))
    }

    /// False from effort `at` onwards, Unknown before.
    pub fn false_from(at: u32) -> Self {
        Kleenean(Arc::new(move |Effort(n)| {
            if n >= at {
                Tri::False
            } else {
                Tri::Unknown
            }
        }))
    }

    pub fn query(&self, effort: Effort) -> Tri {
        (self.0)(effort)
    }

    pub fn and(&self, other: &Kleenean) -> Kleenean {
        let (a, b) = (self.clone(), other.clone());
        Kleenean(Arc::new(move |e| a.query(e).and(b.query(e))))
    }

    pub fn or(&self, other: &Kleenean) -> Kleenean {
        let (a, b) = (self.clone(), other.clone());
        Kleenean(Arc::new(move |e| a.query(e).or(b.query(e))))
    }

    pub fn not(&self) -> Kleenean {
        let a = self.clone();
        Kleenean(Arc::new(move |e| a.query(e).not()))
    }

    /// Countable disjunction over a sequence of Kleeneans.
    ///
    /// At effort `m` every `seq(i)` with `i <= m` is queried at effort `m`.
    /// The result is True once some element is, and never False.
    pub fn countable_or(seq: impl Fn(u64) -> Kleenean + Send + Sync + 'static) -> Sierpinski {
        let cache = LazySeq::new(seq);
        Sierpinski(Kleenean::from_probe(move |Effort(m)| {
            let hit = (0..=m as u64).any(|i| cache.get(i).query(Effort(m)).is_true());
            Tri::from_bool_or_unknown(hit)
        }))
    }

    /// The natural-number sequence `n ↦ 1` if this is True by effort `n`, else `0`.
    pub fn to_nat_seq(&self) -> impl Fn(u64) -> u64 + Send + Sync + 'static {
        let k = self.clone();
        move |n| {
            let e = Effort(n.min(u32::MAX as u64) as u32);
            u64::from(k.query(e).is_true())
        }
    }
}

impl fmt::Debug for Kleenean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Kleenean(..)")
    }
}

/// Memoizes the elements of a lazily generated sequence of Kleeneans.
struct LazySeq<F> {
    gen: F,
    items: Mutex<Vec<Kleenean>>,
}

impl<F: Fn(u64) -> Kleenean> LazySeq<F> {
    fn new(gen: F) -> Self {
        LazySeq {
            gen,
            items: Mutex::new(Vec::new()),
        }
    }

    fn get(&self, i: u64) -> Kleenean {
        let mut items = lock(&self.items);
        while items.len() as u64 <= i {
            let next = (self.gen)(items.len() as u64);
            items.push(next);
        }
        items[i as usize].clone()
    }
}

/// A Kleenean that never answers False: the carrier of semi-decisions.
#[derive(Clone, Debug)]
pub struct Sierpinski(Kleenean);

impl Sierpinski {
    pub fn top() -> Self {
        Sierpinski(Kleenean::truth())
    }

    pub fn bottom() -> Self {
        Sierpinski(Kleenean::bottom())
    }

    /// Semi-decision from a raw test that is sound whenever it says `true`.
    pub fn from_test(test: impl Fn(Effort) -> bool + Send + Sync + 'static) -> Self {
        Sierpinski(Kleenean::from_probe(move |e| Tri::from_bool_or_unknown(test(e))))
    }

    /// Forgets a False answer: True stays True, everything else is Unknown.
    pub fn from_kleenean(k: &Kleenean) -> Self {
        let k = k.clone();
        Sierpinski(Kleenean(Arc::new(move |e| {
            Tri::from_bool_or_unknown(k.query(e).is_true())
        })))
    }

    pub fn query(&self, effort: Effort) -> Tri {
        self.0.query(effort)
    }

    pub fn is_true_at(&self, effort: Effort) -> bool {
        self.0.query(effort).is_true()
    }

    pub fn and(&self, other: &Sierpinski) -> Sierpinski {
        Sierpinski(self.0.and(&other.0))
    }

    pub fn or(&self, other: &Sierpinski) -> Sierpinski {
        Sierpinski(self.0.or(&other.0))
    }

    pub fn as_kleenean(&self) -> &Kleenean {
        &self.0
    }

    pub fn into_kleenean(self) -> Kleenean {
        self.0
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
}

/// Runs two semi-decisions in lockstep and returns a side that is True.
///
/// At each effort `m` the left side is queried before the right, so when
/// both become True at the same effort the result is `Left`.
pub fn select_binary_within(
    a: &Kleenean,
    b: &Kleenean,
    ceiling: u32,
) -> Result<Side, EffortExhausted> {
    for m in 0..=ceiling {
        if a.query(Effort(m)).is_true() {
            return Ok(Side::Left);
        }
        if b.query(Effort(m)).is_true() {
            return Ok(Side::Right);
        }
    }
    Err(EffortExhausted { ceiling })
}

/// [`select_binary_within`] under the process-wide ceiling. Does not return
/// (or panics with [`EffortExhausted`]) when neither side is ever True.
pub fn select_binary(a: &Kleenean, b: &Kleenean) -> Side {
    let ceiling = effort_ceiling();
    select_binary_within(a, b, ceiling).unwrap_or_else(|e| exhausted(e.ceiling))
}

/// Finds an index whose Kleenean is True.
///
/// Dovetail schedule: at outer effort `m`, `seq(i)` is queried at effort `m`
/// for `i = 0..=m` in ascending order; the first True wins.
pub fn countable_select_within(
    seq: impl Fn(u64) -> Kleenean,
    ceiling: u32,
) -> Result<u64, EffortExhausted> {
    let cache = LazySeq::new(seq);
    for m in 0..=ceiling {
        for i in 0..=m as u64 {
            if cache.get(i).query(Effort(m)).is_true() {
                return Ok(i);
            }
        }
    }
    Err(EffortExhausted { ceiling })
}

pub fn countable_select(seq: impl Fn(u64) -> Kleenean) -> u64 {
    let ceiling = effort_ceiling();
    countable_select_within(seq, ceiling).unwrap_or_else(|e| exhausted(e.ceiling))
}
