//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::{HashMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use certoset::hyper::{compact_subset_semidec, modulus_corpus, modulus_of_continuity, overt_intersects_semidec, Ball, OpenSet};
use certoset::kernel::{effort_ceiling, set_effort_ceiling};
use certoset::tbound::{hausdorff_finite, tb_dist};
use certoset::{
    ifs_limit_tb, ifs_tb, sierpinski_tb, triangle_tb, CReal, Dyadic, Effort, EffortExhausted, Ifs, Interval, Kleenean,
    MetricSpace, Point, Tri,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn d(m: i64, e: i64) -> Dyadic {
    Dyadic::new(m, e)
}

fn pt(c: &[Dyadic]) -> Point {
    Point::from_dyadics(c.to_vec())
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + stream)
}

/// A lazily represented copy of `v`, so the exact fast paths are skipped.
fn lazy(v: &Dyadic) -> CReal {
    let v = v.clone();
    CReal::from_fn(move |n| Interval::around(&v, &Dyadic::pow2(-(n as i64) - 1)))
}

fn max_dist(a: &[Dyadic], b: &[Dyadic]) -> Dyadic {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(Dyadic::zero(), Dyadic::max)
}

fn to_i64(v: &BigInt) -> i64 {
    i64::try_from(v).expect("small integer")
}

/// Runs `f` with a temporary global effort ceiling.
fn with_ceiling<T>(ceiling: u32, f: impl FnOnce() -> T) -> T {
    let before = effort_ceiling();
    set_effort_ceiling(ceiling);
    let out = panic::catch_unwind(AssertUnwindSafe(f));
    set_effort_ceiling(before);
    out.unwrap_or_else(|p| panic::resume_unwind(p))
}

/// `Some(answer)` or `None` when the effort ceiling was hit first.
fn query_or_exhausted(f: impl FnOnce() -> Tri) -> Option<Tri> {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => Some(v),
        Err(p) if p.is::<EffortExhausted>() => None,
        Err(p) => panic::resume_unwind(p),
    }
}

// ---------------------------------------------------------------------------

fn in_triangle(p: &[Dyadic]) -> bool {
    let zero = Dyadic::zero();
    p[0] >= zero && p[1] >= zero && &p[0] + &p[1] <= Dyadic::one()
}

/// A triangle point near `c`: clamp to the quadrant, then slide along the
/// diagonal onto the hypotenuse if needed.
fn clamp_to_triangle(c: &[Dyadic]) -> Vec<Dyadic> {
    let mut w: Vec<Dyadic> = c.iter().map(|v| v.clone().max(Dyadic::zero())).collect();
    let excess = &(&w[0] + &w[1]) - &Dyadic::one();
    if excess.is_positive() {
        let t = excess.half();
        w = w.iter().map(|v| (v - &t).max(Dyadic::zero())).collect();
    }
    w
}

fn ac1_triangle() -> Check {
    let start = Instant::now();
    let fresh = triangle_tb();
    let _ = fresh.covering(6);
    let t6 = start.elapsed();
    ensure!(t6 < Duration::from_secs(1), "covering(6) took {t6:?}");

    let tri = triangle_tb();
    let mut grid_points = 0usize;
    for n in 0..=6u32 {
        let cov = tri.covering(n);
        let side = 1i64 << n;
        ensure!(cov.len() as i64 == side * (side + 1) / 2, "level {n}: {} balls", cov.len());
        let r = Dyadic::pow2(-(n as i64));
        let mut index = HashSet::new();
        for c in cov.iter() {
            let c = c.exact().ok_or(format!("level {n}: non-dyadic center"))?;
            let mut ij = Vec::new();
            for v in &c {
                let k = v.shl(n as i64 + 1).to_bigint_exact().ok_or(format!("level {n}: center off grid"))?;
                let k = to_i64(&k);
                ensure!(k.rem_euclid(2) == 1, "level {n}: center coordinate {v} not an odd multiple");
                ij.push((k - 1) / 2);
            }
            ensure!(ij[0] >= 0 && ij[1] >= 0 && ij[0] + ij[1] < side, "level {n}: index {ij:?} out of range");
            ensure!(index.insert((ij[0], ij[1])), "level {n}: repeated center");
            let w = clamp_to_triangle(&c);
            ensure!(in_triangle(&w) && max_dist(&c, &w) <= r, "level {n}: ball at {ij:?} misses the triangle");
        }
        let center = |i: i64, j: i64| [d(2 * i + 1, -(n as i64) - 1), d(2 * j + 1, -(n as i64) - 1)];
        for a in 0..=256i64 {
            for b in 0..=256 - a {
                let p = [d(a, -8), d(b, -8)];
                let (ka, kb) = (a * side / 256, b * side / 256);
                let covered = (ka - 1..=ka)
                    .flat_map(|i| (kb - 1..=kb).map(move |j| (i, j)))
                    .filter(|ij| index.contains(ij))
                    .any(|(i, j)| max_dist(&p, &center(i, j)) <= r);
                ensure!(covered, "level {n}: grid point ({a}, {b})/256 not covered");
                grid_points += 1;
            }
        }
    }
    Ok(format!("counts 1..2080, {grid_points} grid checks, covering(6) in {t6:.2?}"))
}

// ---------------------------------------------------------------------------

fn cell(v: &Dyadic) -> i64 {
    to_i64(&v.shl(10).floor())
}

/// Pairs every point of `a` with a distinct point of `b` within `tol`.
fn same_up_to(a: &[Vec<Dyadic>], b: &[Vec<Dyadic>], tol: &Dyadic) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (k, p) in b.iter().enumerate() {
        buckets.entry(p.iter().map(cell).collect()).or_default().push(k);
    }
    let mut used = vec![false; b.len()];
    'outer: for p in a {
        let home: Vec<i64> = p.iter().map(cell).collect();
        let offsets = (0..3usize.pow(home.len() as u32)).map(|mut t| {
            home.iter()
                .map(|h| {
                    let o = (t % 3) as i64 - 1;
                    t /= 3;
                    h + o
                })
                .collect::<Vec<_>>()
        });
        for key in offsets {
            for &k in buckets.get(&key).into_iter().flatten() {
                if !used[k] && max_dist(p, &b[k]) <= *tol {
                    used[k] = true;
                    continue 'outer;
                }
            }
        }
        return false;
    }
    true
}

fn ac2_sierpinski() -> Check {
    let start = Instant::now();
    let fresh = sierpinski_tb();
    // centers are lazy, so the timing includes evaluating them
    let realized: Vec<Vec<Dyadic>> = fresh.covering(7).iter().map(|c| c.approx_dyadic(20)).collect();
    ensure!(realized.len() == 2187, "covering(7) has {} centers", realized.len());
    let t7 = start.elapsed();
    ensure!(t7 < Duration::from_secs(5), "covering(7) took {t7:?}");

    let s = sierpinski_tb();
    let ifs = Ifs::sierpinski();
    let tol = Dyadic::pow2(-20);
    for n in 0..=7u32 {
        let cov = s.covering(n);
        ensure!(cov.len() == 3usize.pow(n), "level {n}: {} balls", cov.len());
        let bound = &Dyadic::one() + &Dyadic::pow2(-(n as i64));
        for c in cov.iter() {
            for iv in c.approx(30) {
                ensure!(iv.lo() >= &-&bound && iv.hi() <= &bound, "level {n}: center outside the inflated cube");
            }
        }
        if n < 7 {
            let expected: Vec<Vec<Dyadic>> = ifs
                .anchors()
                .iter()
                .flat_map(|a| cov.iter().map(move |c| c.add(a).scale_pow2(-1).approx_dyadic(30)))
                .collect();
            let actual: Vec<Vec<Dyadic>> = s.covering(n + 1).iter().map(|c| c.approx_dyadic(30)).collect();
            ensure!(same_up_to(&expected, &actual, &tol), "level {}: not the union of halved copies", n + 1);
        }
    }
    Ok(format!("counts 1..2187, covering(7) in {t7:.2?}"))
}

// ---------------------------------------------------------------------------

fn ac3_limit_route() -> Check {
    let ifs = Ifs::sierpinski();
    let (lim, direct) = (ifs_limit_tb(&ifs), ifs_tb(&ifs));
    let mut worst = 0f64;
    for n in 1..=5u32 {
        let h = hausdorff_finite(&lim.covering(n), &direct.covering(n)).map_err(|e| e.to_string())?;
        let bound = &Dyadic::pow2(1 - n as i64) + &Dyadic::pow2(-12);
        let iv = h.approx(20);
        ensure!(iv.hi() <= &bound, "level {n}: distance up to {} exceeds {}", iv.hi().to_f64(), bound.to_f64());
        worst = worst.max(iv.hi().to_f64() / bound.to_f64());
    }
    Ok(format!("largest distance/bound ratio {worst:.3}"))
}

// ---------------------------------------------------------------------------

fn brute_hausdorff(s: &[Vec<Dyadic>], t: &[Vec<Dyadic>]) -> Dyadic {
    let mut best = Dyadic::zero();
    for (xs, ys) in [(s, t), (t, s)] {
        for x in xs {
            let mut near: Option<Dyadic> = None;
            for y in ys {
                let dxy = max_dist(x, y);
                if near.as_ref().map_or(true, |m| dxy < *m) {
                    near = Some(dxy);
                }
            }
            best = best.max(near.expect("nonempty"));
        }
    }
    best
}

fn ac4_hausdorff_oracle() -> Check {
    let mut r = rng(4);
    for case in 0..200 {
        let dim = r.gen_range(1..=3);
        let set = |r: &mut ChaCha8Rng| -> Vec<Vec<Dyadic>> {
            let len = r.gen_range(1..=8);
            (0..len)
                .map(|_| (0..dim).map(|_| d(r.gen_range(-200..=200), -r.gen_range(0..=6))).collect())
                .collect()
        };
        let (s, t) = (set(&mut r), set(&mut r));
        let ps: Vec<Point> = s.iter().map(|c| pt(c)).collect();
        let pt_: Vec<Point> = t.iter().map(|c| pt(c)).collect();
        let h = hausdorff_finite(&ps, &pt_).map_err(|e| e.to_string())?;
        let want = brute_hausdorff(&s, &t);
        ensure!(h.exact() == Some(&want), "case {case}: got {:?}, oracle {want}", h.exact());
    }
    Ok("200/200 exact matches".into())
}

// ---------------------------------------------------------------------------

/// Max-norm distance to `x, y >= 0, x + y <= 1`, from its three half-planes.
fn triangle_distance(p: &[Dyadic]) -> Dyadic {
    let (x, y) = (&p[0], &p[1]);
    let one = Dyadic::one();
    [-x, -y, x - &one, y - &one, (&(x + y) - &one).half()]
        .into_iter()
        .fold(Dyadic::zero(), Dyadic::max)
}

fn ac5_located() -> Check {
    let points = [
        [d(-1, 0), d(1, -1)],
        [d(2, 0), d(2, 0)],
        [d(1, -2), d(1, -2)],
        [d(1, -1), d(1, -1)],
        [d(-1, -1), d(-1, -1)],
        [d(3, -1), d(-1, -2)],
        [d(3, -2), d(3, -2)],
        [d(-1, -2), d(3, -1)],
        [d(3, 0), d(-1, 0)],
        [d(1, -3), d(-3, -3)],
    ];
    let tri = triangle_tb();
    let tol = Dyadic::pow2(-16);
    let mut slowest = Duration::ZERO;
    for p in &points {
        let start = Instant::now();
        let v = tb_dist(&tri, &pt(p)).map_err(|e| e.to_string())?.approx_dyadic(16);
        let took = start.elapsed();
        slowest = slowest.max(took);
        let want = triangle_distance(p);
        ensure!((&v - &want).abs() <= tol, "at ({}, {}): {v} vs {want}", p[0], p[1]);
        ensure!(took < Duration::from_secs(2), "at ({}, {}): took {took:?}", p[0], p[1]);
    }
    Ok(format!("10 points, slowest {slowest:.2?}"))
}

// ---------------------------------------------------------------------------

fn ac6_limit() -> Check {
    let seq = |n: u32| CReal::from_dyadic(&Dyadic::one() - &Dyadic::pow2(-(n as i64)));
    let plain = CReal::limit(seq);
    let extended = CReal::extended_limit(seq);
    for p in [4u32, 10, 20] {
        let eps = Dyadic::pow2(-(p as i64));
        let target = Interval::new(&Dyadic::one() - &eps, &Dyadic::one() + &eps);
        let (a, b) = (plain.approx(p + 1), extended.approx(p + 1));
        ensure!(target.contains_interval(&a), "limit at p={p}: {a:?}");
        ensure!(target.contains_interval(&b), "extended_limit at p={p}: {b:?}");
        ensure!(a.intersects(&b), "limits disagree at p={p}");
    }
    Ok("p = 4, 10, 20".into())
}

// ---------------------------------------------------------------------------

fn ac7_soft_lt() -> Check {
    let mut r = rng(7);
    let (mut trues, mut falses) = (0, 0);
    for case in 0..1000 {
        let n: u32 = r.gen_range(0..=20);
        let eps = Dyadic::pow2(-(n as i64));
        let x = d(r.gen_range(-4096..=4096), -10);
        let delta = match r.gen_range(0..5) {
            0 => Dyadic::zero(),
            1 => eps.clone(),
            2 => -&eps,
            3 => &eps + &d(r.gen_range(-2..=2), -24),
            _ => d(r.gen_range(-1 << 12..=1 << 12), -(n as i64) - 10),
        };
        let y = &x + &delta;
        let as_real = |v: &Dyadic, lazy_first: bool| if lazy_first { lazy(v) } else { CReal::from_dyadic(v.clone()) };
        let (xr, yr) = (as_real(&x, r.gen_bool(0.5)), as_real(&y, r.gen_bool(0.5)));
        if xr.soft_lt(&yr, n) {
            trues += 1;
            ensure!(x < &y + &eps, "case {case}: True but {x} >= {y} + 2^-{n}");
        } else {
            falses += 1;
            ensure!(y < &x + &eps, "case {case}: False but {y} >= {x} + 2^-{n}");
        }
    }
    Ok(format!("{trues} True, {falses} False, no violations"))
}

// ---------------------------------------------------------------------------

fn random_kleenean(r: &mut ChaCha8Rng, depth: u32) -> Kleenean {
    let pick = r.gen_range(0..if depth == 0 { 5 } else { 9 });
    match pick {
        0 => Kleenean::true_from(r.gen_range(0..40)),
        1 => Kleenean::false_from(r.gen_range(0..40)),
        2 => Kleenean::bottom(),
        3 => Kleenean::constant(if r.gen_bool(0.5) { Tri::True } else { Tri::False }),
        4 => {
            let (at, v) = (r.gen_range(0..40), if r.gen_bool(0.5) { Tri::True } else { Tri::False });
            Kleenean::from_probe(move |Effort(e)| if e >= at && e % 3 == 0 { v } else { Tri::Unknown })
        }
        5 => random_kleenean(r, depth - 1).and(&random_kleenean(r, depth - 1)),
        6 => random_kleenean(r, depth - 1).or(&random_kleenean(r, depth - 1)),
        7 => random_kleenean(r, depth - 1).not(),
        _ => {
            let hits: Vec<Option<u32>> = (0..r.gen_range(0..6)).map(|_| r.gen_bool(0.4).then(|| r.gen_range(0..30))).collect();
            Kleenean::countable_or(move |i| match hits.get(i as usize) {
                Some(Some(at)) => Kleenean::true_from(*at),
                _ => Kleenean::bottom(),
            })
            .into_kleenean()
        }
    }
}

/// A random real built through the public API, with its value when dyadic.
fn random_real(r: &mut ChaCha8Rng, depth: u32) -> (CReal, Option<Dyadic>) {
    let leaf = depth == 0 || r.gen_bool(0.3);
    if leaf {
        return match r.gen_range(0..5) {
            0 | 1 => {
                let v = d(r.gen_range(-1000..=1000), -r.gen_range(0..=12));
                (CReal::from_dyadic(v.clone()), Some(v))
            }
            2 => {
                let v = d(r.gen_range(-1000..=1000), -r.gen_range(0..=12));
                (lazy(&v), Some(v))
            }
            3 => (CReal::from_ratio(BigInt::from(r.gen_range(-50..=50)), BigInt::from(r.gen_range(1..=9))), None),
            _ => (CReal::sqrt3(), None),
        };
    }
    let (a, va) = random_real(r, depth - 1);
    match r.gen_range(0..9) {
        0 => {
            let (b, vb) = random_real(r, depth - 1);
            (a.add(&b), va.zip(vb).map(|(x, y)| &x + &y))
        }
        1 => {
            let (b, vb) = random_real(r, depth - 1);
            (a.sub(&b), va.zip(vb).map(|(x, y)| &x - &y))
        }
        2 => {
            let (b, vb) = random_real(r, depth - 1);
            (a.mul(&b), va.zip(vb).map(|(x, y)| &x * &y))
        }
        3 => {
            let (b, vb) = random_real(r, depth - 1);
            (a.max(&b), va.zip(vb).map(|(x, y)| x.max(y)))
        }
        4 => {
            let (b, vb) = random_real(r, depth - 1);
            (a.min(&b), va.zip(vb).map(|(x, y)| x.min(y)))
        }
        5 => (a.neg(), va.map(|x| -x)),
        6 => (a.abs(), va.map(|x| x.abs())),
        7 => {
            let k = r.gen_range(-5..=5);
            (a.scale_pow2(k), va.map(|x| x.shl(k)))
        }
        _ => {
            let src = a.clone();
            (CReal::limit(move |_| src.clone()), va)
        }
    }
}

fn ac8_property_suites() -> Check {
    let mut r = rng(8);
    let mut pairs = 0;
    for k in 0..500 {
        let depth = r.gen_range(0..=4);
        let kl = random_kleenean(&mut r, depth);
        for _ in 0..20 {
            let (a, b) = (r.gen_range(0..64u32), r.gen_range(0..64u32));
            let (lo, hi) = (a.min(b), a.max(b));
            // query out of order to exercise the memo
            let late = kl.query(Effort(hi));
            let early = kl.query(Effort(lo));
            ensure!(early == Tri::Unknown || early == late, "kleenean {k}: {early:?} at {lo} then {late:?} at {hi}");
            pairs += 1;
        }
    }
    let mut reals = 0;
    for k in 0..10_000 {
        let depth = r.gen_range(0..=3);
        let (x, v) = random_real(&mut r, depth);
        let (n1, n2) = (r.gen_range(0..48u32), r.gen_range(0..48u32));
        let (i1, i2) = (x.approx(n1), x.approx(n2));
        for (n, iv) in [(n1, &i1), (n2, &i2)] {
            ensure!(iv.width() <= Dyadic::pow2(1 - n as i64), "real {k}: width {} at effort {n}", iv.width());
            if let Some(v) = &v {
                ensure!(iv.contains(v), "real {k}: {v} outside {iv:?} at effort {n}");
            }
        }
        ensure!(i1.intersects(&i2), "real {k}: efforts {n1} and {n2} disagree");
        reals += 1;
    }
    Ok(format!("{pairs} effort pairs, {reals} reals"))
}

// ---------------------------------------------------------------------------

const MODULUS_CEILING: u32 = 1 << 12;
// Base points are kept when the map is already True here. Points on the
// boundary of a map are never True, and for the distance map some of them
// cost about 2^effort refinements to rule out.
const BASE_EFFORT: u32 = 12;

fn ac9_modulus() -> Check {
    with_ceiling(MODULUS_CEILING, || {
        let mut r = rng(9);
        let mut moduli = Vec::new();
        for (name, f) in modulus_corpus() {
            let mut bases = 0;
            let mut tries = 0;
            while bases < 20 {
                tries += 1;
                ensure!(tries < 2000, "{name}: too few base points where the map holds");
                let x = [d(r.gen_range(-24..=24), -4), d(r.gen_range(-24..=24), -4)];
                if !f(&pt(&x)).is_true_at(Effort(BASE_EFFORT)) {
                    continue;
                }
                let m = modulus_of_continuity(&*f, &pt(&x));
                moduli.push(m);
                let span = 1i64 << 10;
                for s in 0..100 {
                    let y: Vec<Dyadic> =
                        x.iter().map(|c| c + &d(r.gen_range(-span + 1..span), -(m as i64) - 10)).collect();
                    ensure!(
                        f(&pt(&y)).is_true_at(Effort(MODULUS_CEILING)),
                        "{name}: base ({}, {}), modulus {m}, sample {s} at ({}, {}) not True",
                        x[0],
                        x[1],
                        y[0],
                        y[1]
                    );
                }
                bases += 1;
            }
        }
        let (lo, hi) = (moduli.iter().min().unwrap(), moduli.iter().max().unwrap());
        Ok(format!("5 maps x 20 bases x 100 samples, moduli {lo}..{hi}"))
    })
}

// ---------------------------------------------------------------------------

const TESTER_CEILING: u32 = 256;

fn ac10_testers() -> Check {
    let plane = MetricSpace::euclidean(2);
    let tri = triangle_tb();
    let ball = |x: Dyadic, y: Dyadic, level: i32| {
        OpenSet::from_balls(plane.clone(), vec![Ball::new(Point::from_dyadics(vec![x, y]), level)])
    };

    let engulfing = ball(d(1, -1), d(1, -1), 0);
    let inside = with_ceiling(1 << 16, || compact_subset_semidec(&tri, &engulfing).is_true_at(Effort(1 << 16)));
    ensure!(inside, "triangle not certified inside B((1/2, 1/2), 1)");

    // [-1, 1] x [-3/4, 5/4] misses only the vertex (1, 0)
    let excluding = ball(Dyadic::zero(), d(1, -2), 0);
    let k = compact_subset_semidec(&tri, &excluding);
    let answer = with_ceiling(TESTER_CEILING, || query_or_exhausted(|| k.query(Effort(TESTER_CEILING))));
    ensure!(answer != Some(Tri::True), "subset of a ball excluding (1, 0) answered True");

    let near = ball(d(3, -3), d(3, -3), 3);
    let touching = ball(d(5, -3), d(5, -3), 3);
    let pos = with_ceiling(TESTER_CEILING, || overt_intersects_semidec(&tri, &near).is_true_at(Effort(TESTER_CEILING)));
    ensure!(pos, "triangle should meet B((3/8, 3/8), 1/8)");
    let v = overt_intersects_semidec(&tri, &touching);
    let neg = with_ceiling(TESTER_CEILING, || query_or_exhausted(|| v.query(Effort(TESTER_CEILING))));
    ensure!(neg != Some(Tri::True), "triangle reported meeting B((5/8, 5/8), 1/8), which it only touches");

    let how = |a: Option<Tri>| if a.is_some() { "unknown" } else { "ceiling reached" };
    Ok(format!("negative subset {}, negative overt {}", how(answer), how(neg)))
}

// ---------------------------------------------------------------------------

fn ac11_determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_certoset");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["draw", "--set", "triangle", "--level", "4", "--format", "json"],
        vec!["draw", "--set", "triangle", "--level", "4", "--format", "csv"],
        vec!["draw", "--set", "sierpinski", "--level", "5", "--format", "svg"],
        vec!["draw", "--set", "sierpinski", "--level", "5", "--format", "json"],
        vec!["draw", "--set", "empty", "--level", "3", "--format", "json"],
        vec!["draw", "--set", "empty", "--level", "3", "--format", "svg"],
        vec!["real", "--expr", "sqrt3", "--prec", "10"],
        vec!["real", "--expr", "1/2 + 1/4", "--prec", "5"],
        vec!["real", "--expr", "limit geom", "--prec", "8"],
        vec!["hausdorff", "--a", "triangle", "--b", "triangle", "--prec", "8"],
        vec!["hausdorff", "--a", "triangle", "--b", "translate(triangle, 1, 0)", "--prec", "6"],
        vec!["hausdorff", "--a", "singleton(0, 0)", "--b", "singleton(3, 4)", "--prec", "10"],
    ];
    for (k, args) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out_path = dir.path().join(format!("cmd{k}-run{run}.out"));
            let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
            if args[0] == "draw" {
                full.extend(["--out".to_string(), out_path.display().to_string()]);
            }
            let res = Command::new(bin).args(&full).env_remove("CERTOSET_CACHE_DIR").output().map_err(|e| e.to_string())?;
            ensure!(res.status.success(), "`{}` failed: {}", args.join(" "), String::from_utf8_lossy(&res.stderr));
            let bytes = if args[0] == "draw" { std::fs::read(&out_path).map_err(|e| e.to_string())? } else { res.stdout };
            outputs.push(bytes);
        }
        ensure!(outputs[0] == outputs[1], "`{}` differs between runs", args.join(" "));
    }
    Ok(format!("{} commands, byte-identical", commands.len()))
}

// ---------------------------------------------------------------------------

fn describe(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(e) = payload.downcast_ref::<EffortExhausted>() {
        e.to_string()
    } else if let Some(s) = payload.downcast_ref::<&str>() {
        format!("panic: {s}")
    } else if let Some(s) = payload.downcast_ref::<String>() {
        format!("panic: {s}")
    } else {
        "panic".into()
    }
}

fn main() -> ExitCode {
    let default_hook = panic::take_hook();
    panic::set_hook(Box::new(move |info| {
        if !info.payload().is::<EffortExhausted>() {
            default_hook(info);
        }
    }));

    let criteria: [(&str, fn() -> Check); 11] = [
        ("triangle coverings", ac1_triangle),
        ("Sierpinski coverings", ac2_sierpinski),
        ("limit route vs direct route", ac3_limit_route),
        ("finite Hausdorff distance vs brute force", ac4_hausdorff_oracle),
        ("located distance to the triangle", ac5_located),
        ("limit and extended limit", ac6_limit),
        ("soft comparison soundness", ac7_soft_lt),
        ("Kleenean and real property suites", ac8_property_suites),
        ("modulus of continuity soundness", ac9_modulus),
        ("compact and overt testers", ac10_testers),
        ("CLI determinism", ac11_determinism),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| Err(describe(p)));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("[AC-{}] {name} ... PASS ({detail}; {took:.2?})", k + 1),
            Err(why) => {
                failures += 1;
                println!("[AC-{}] {name} ... FAIL ({why}; {took:.2?})", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
