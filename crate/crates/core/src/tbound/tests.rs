use std::sync::Arc;

use proptest::prelude::*;

use super::reference::{hausdorff_direct, tb_dist_direct};
use super::*;
use crate::fractal::{sierpinski_tb, triangle_tb};
use crate::space::dyadic_dist;

fn d(m: i64, e: i64) -> Dyadic {
    Dyadic::new(m, e)
}

fn pt(c: &[(i64, i64)]) -> Point {
    Point::from_dyadics(c.iter().map(|&(m, e)| d(m, e)).collect())
}

/// Max-norm distance to the unit triangle:
/// `max(0, -x, -y, x - 1, y - 1, (x + y - 1) / 2)`.
fn triangle_dist(x: &Dyadic, y: &Dyadic) -> Dyadic {
    let one = Dyadic::one();
    [Dyadic::zero(), -x, -y, x - &one, y - &one, (&(x + y) - &one).half()].into_iter().max().unwrap()
}

fn in_triangle(p: &[Dyadic]) -> bool {
    !p[0].is_negative() && !p[1].is_negative() && &p[0] + &p[1] <= Dyadic::one()
}

fn within(v: &CReal, target: &Dyadic, p: u32) -> bool {
    let iv = v.approx(p + 1);
    let tol = Dyadic::pow2(-(p as i64));
    &(iv.hi() - target) <= &tol && &(target - iv.lo()) <= &tol
}

#[test]
fn emptiness() {
    assert!(tb_is_empty(&empty_tb(2)));
    assert!(!tb_is_empty(&triangle_tb()));
    assert!(!tb_is_empty(&singleton_tb(Point::origin(2))));
    assert_eq!(tb_dist(&empty_tb(2), &Point::origin(2)).unwrap_err(), SetError::Empty);
    assert_eq!(tb_choice(&empty_tb(1)).unwrap_err(), SetError::Empty);
}

#[test]
fn triangle_distances() {
    let t = triangle_tb();
    for (x, y) in [((2, 0), (0, 0)), ((1, -2), (1, -2)), ((-3, -1), (5, -2)), ((3, 0), (3, 0))] {
        let x = pt(&[x, y]);
        let e = x.exact().unwrap();
        let v = tb_dist(&t, &x).unwrap();
        assert!(within(&v, &triangle_dist(&e[0], &e[1]), 12), "{x:?}");
    }
    let v = tb_dist(&singleton_tb(Point::origin(2)), &pt(&[(3, 0), (4, 0)])).unwrap();
    assert!(within(&v, &Dyadic::from(4), 20));
}

#[test]
fn search_matches_direct_route() {
    let t = triangle_tb();
    for x in [pt(&[(5, -2), (-1, -3)]), pt(&[(1, -3), (1, -1)])] {
        let fast = tb_dist(&t, &x).unwrap();
        let slow = tb_dist_direct(&t, &x).unwrap();
        for p in [2, 4, 6] {
            assert!(fast.approx(p).intersects(&slow.approx(p)));
        }
    }
    let s = sierpinski_tb();
    let x = pt(&[(1, -1), (1, -1)]);
    let (fast, slow) = (tb_dist(&s, &x).unwrap(), tb_dist_direct(&s, &x).unwrap());
    for p in [2, 4, 6] {
        assert!(fast.approx(p).intersects(&slow.approx(p)));
    }
}

#[test]
fn centered_covering() {
    let t = triangle_tb();
    let c = tb_centered(&t, 0).unwrap();
    assert!(c.len() <= t.covering(2).len());
    assert!(c.iter().all(|p| in_triangle(&p.exact().unwrap())));
    let x = pt(&[(3, -3), (-5, -4)]);
    for n in [0, 3, 6] {
        let c = tb_centered(&singleton_tb(x.clone()), n).unwrap();
        let dist = dyadic_dist(&c[0].approx_dyadic(40), &x.exact().unwrap());
        assert!(dist <= Dyadic::pow2(-(n as i64) - 2));
    }
}

#[test]
fn choices() {
    let x = pt(&[(7, -3), (-1, 0)]);
    let c = tb_choice(&singleton_tb(x.clone())).unwrap();
    assert_eq!(c.exact(), x.exact());
    let p = tb_choice(&triangle_tb()).unwrap();
    let eps = Dyadic::pow2(-20);
    let v: Vec<Dyadic> = p.approx(20).iter().map(|iv| iv.midpoint()).collect();
    assert!(v[0] >= -&eps && v[1] >= -&eps && &v[0] + &v[1] <= &Dyadic::one() + &eps);
    // a two-point set known only through its coverings
    let pair = TBSet::from_coverings(2, |n| {
        let _ = n;
        vec![pt(&[(0, 0), (0, 0)]), pt(&[(1, 0), (1, 0)])]
    });
    let q = tb_choice(&pair).unwrap().approx_dyadic(20);
    let close = |t: &[Dyadic]| dyadic_dist(&q, t) <= Dyadic::pow2(-20);
    assert!(close(&[Dyadic::zero(), Dyadic::zero()]) || close(&[Dyadic::one(), Dyadic::one()]));
}

#[test]
fn finite_hausdorff_cases() {
    let s = vec![pt(&[(0, 0), (0, 0)]), pt(&[(1, 0), (0, 0)])];
    assert_eq!(hausdorff_finite(&s, &s).unwrap().exact(), Some(&Dyadic::zero()));
    let a = vec![pt(&[(0, 0), (0, 0)])];
    let b = vec![pt(&[(3, 0), (4, 0)])];
    assert_eq!(hausdorff_finite(&a, &b).unwrap().exact(), Some(&Dyadic::from(4)));
    assert_eq!(hausdorff_finite(&s, &a).unwrap().exact(), Some(&Dyadic::one()));
    assert!(hausdorff_finite(&[], &a).is_err());
    // lazy coordinates take the enclosure route
    let lazy = vec![Point::new(vec![CReal::sqrt3(), CReal::zero()])];
    let v = hausdorff_finite(&lazy, &a).unwrap();
    assert!(v.approx(30).contains(&Dyadic::new(0x6ed9eba1, -30)) || within(&v, &Dyadic::new(0x6ed9eba1, -30), 28));
}

#[test]
fn hausdorff_sets() {
    let t = triangle_tb();
    let h = hausdorff_tb(&t, &t).unwrap();
    assert!(within(&h, &Dyadic::zero(), 12));
    let a = singleton_tb(Point::origin(2));
    let b = singleton_tb(pt(&[(1, 0), (0, 0)]));
    assert!(within(&hausdorff_tb(&a, &b).unwrap(), &Dyadic::one(), 10));
    let shifted = tb_affine(&Dyadic::one(), &pt(&[(1, 0), (0, 0)]), &t).unwrap();
    let h = hausdorff_tb(&t, &shifted).unwrap();
    assert!(within(&h, &Dyadic::one(), 6));
    let slow = hausdorff_direct(&t, &shifted).unwrap();
    assert!(h.approx(4).intersects(&slow.approx(4)));
    // a fresh copy of the triangle goes through the search
    assert!(within(&hausdorff_tb(&t, &triangle_tb()).unwrap(), &Dyadic::zero(), 5));
}

#[test]
fn union_and_affine() {
    let t = triangle_tb();
    let u = tb_union(&t, &empty_tb(2)).unwrap();
    for n in 0..4 {
        assert_eq!(u.covering(n).len(), t.covering(n).len());
    }
    let two = tb_union(&singleton_tb(Point::origin(2)), &singleton_tb(pt(&[(1, 0), (1, 0)]))).unwrap();
    assert!((0..6).all(|n| two.covering(n).len() == 2));
    assert!(tb_union(&t, &empty_tb(3)).is_err());

    let id = tb_affine(&Dyadic::one(), &Point::origin(2), &t).unwrap();
    for n in 0..4 {
        let a: Vec<_> = id.covering(n).iter().map(|p| p.exact()).collect();
        let b: Vec<_> = t.covering(n).iter().map(|p| p.exact()).collect();
        assert_eq!(a, b);
    }
    let moved = tb_affine(&d(1, -1), &pt(&[(1, 0), (0, 0)]), &singleton_tb(Point::origin(2))).unwrap();
    assert_eq!(moved.covering(3)[0].exact().unwrap(), vec![Dyadic::one(), Dyadic::zero()]);
    let big = tb_affine(&Dyadic::from(2), &Point::origin(2), &t).unwrap();
    assert!(within(&tb_dist(&big, &pt(&[(4, 0), (0, 0)])).unwrap(), &Dyadic::from(2), 10));
    assert_eq!(tb_affine(&Dyadic::zero(), &Point::origin(2), &t).unwrap_err(), SetError::NonPositiveScale);
    // odd scale factor
    let three = tb_affine(&Dyadic::from(3), &Point::origin(2), &t).unwrap();
    assert!(within(&tb_dist(&three, &pt(&[(4, 0), (0, 0)])).unwrap(), &Dyadic::one(), 10));
}

#[test]
fn images() {
    let t = triangle_tb();
    let id = tb_image(|p| p.clone(), 2, Arc::new(|n| n), &t);
    assert!(within(&hausdorff_tb(&id, &t).unwrap(), &Dyadic::zero(), 3));
    assert!(within(&hausdorff_direct(&id, &t).unwrap(), &Dyadic::zero(), 2));
    // shear (x, y) -> (x + y, y) at most doubles max-norm distances
    let shear = tb_image(
        |p| Point::new(vec![p.coord(0).add(p.coord(1)), p.coord(1).clone()]),
        2,
        Arc::new(|n| n + 1),
        &t,
    );
    for (x, y) in [(0i64, 0i64), (3, 1), (1, 6), (7, 0)] {
        let q = pt(&[(x + y, -3), (y, -3)]);
        assert!(within(&tb_dist(&shear, &q).unwrap(), &Dyadic::zero(), 3), "{x} {y}");
    }
    let constant = tb_image(|_| pt(&[(1, -1), (1, -1)]), 2, Arc::new(|_| 0), &t);
    assert!((0..5).all(|n| constant.covering(n).len() == 1));
}

#[test]
fn limits_of_sets() {
    let t = triangle_tb();
    let tc = t.clone();
    let same = tb_limit(2, move |_| tc.clone());
    assert!(within(&hausdorff_tb(&same, &t).unwrap(), &Dyadic::zero(), 3));
    assert!(within(&hausdorff_direct(&same, &t).unwrap(), &Dyadic::zero(), 2));
    let moving = tb_limit(1, |n| singleton_tb(Point::from_dyadics(vec![&Dyadic::one() - &Dyadic::pow2(-(n as i64))])));
    let target = singleton_tb(Point::from_dyadics(vec![Dyadic::one()]));
    assert!(within(&hausdorff_tb(&moving, &target).unwrap(), &Dyadic::zero(), 8));
    let audit = limit_audit(|n| singleton_tb(Point::from_dyadics(vec![Dyadic::pow2(-(n as i64))])), 3, 10).unwrap();
    for (i, j, iv) in audit {
        assert!(iv.lo() <= &(&Dyadic::pow2(-(i as i64)) + &Dyadic::pow2(-(j as i64))));
    }
}

#[test]
fn singleton_centers_converge() {
    let x = Point::new(vec![CReal::sqrt3().sub(&CReal::one()), CReal::zero()]);
    let s = singleton_tb(x.clone());
    for n in 0..12 {
        let a = s.covering(n)[0].exact().unwrap();
        let b = s.covering(n + 1)[0].exact().unwrap();
        assert!(dyadic_dist(&a, &b) <= &Dyadic::pow2(-(n as i64)) + &Dyadic::pow2(-(n as i64) - 1));
    }
    assert!(within(&tb_dist(&s, &x).unwrap(), &Dyadic::zero(), 12));
}

#[test]
fn triangle_covering_and_intersection_on_grid() {
    let t = triangle_tb();
    for n in 0..=4u32 {
        let centers: Vec<Vec<Dyadic>> = t.covering(n).iter().map(|p| p.exact().unwrap()).collect();
        let r = Dyadic::pow2(-(n as i64));
        for i in 0..=32i64 {
            for j in 0..=32 - i {
                let p = [d(i, -5), d(j, -5)];
                assert!(centers.iter().any(|c| dyadic_dist(c, &p) < r));
            }
        }
        for c in &centers {
            // clamp the center onto the simplex
            let x = c[0].clone().max(Dyadic::zero());
            let y = c[1].clone().max(Dyadic::zero());
            let excess = (&(&x + &y) - &Dyadic::one()).max(Dyadic::zero()).half();
            let w = [&x - &excess, &y - &excess];
            assert!(in_triangle(&w) && dyadic_dist(c, &w) <= r);
        }
    }
}

fn brute_hausdorff(s: &[Vec<Dyadic>], t: &[Vec<Dyadic>]) -> Dyadic {
    let mut best = Dyadic::zero();
    for (a, b) in [(s, t), (t, s)] {
        for x in a {
            let mut near: Option<Dyadic> = None;
            for y in b {
                let dxy = dyadic_dist(x, y);
                if near.as_ref().is_none_or(|m| dxy < *m) {
                    near = Some(dxy);
                }
            }
            best = best.max(near.unwrap());
        }
    }
    best
}

fn point_sets() -> impl Strategy<Value = (Vec<Vec<Dyadic>>, Vec<Vec<Dyadic>>)> {
    (1usize..=3).prop_flat_map(|m| {
        let p = prop::collection::vec((-64i64..64, -4i64..2).prop_map(|(a, e)| d(a, e)), m);
        (prop::collection::vec(p.clone(), 1..=8), prop::collection::vec(p, 1..=8))
    })
}

proptest! {
    #[test]
    fn finite_hausdorff_matches_brute_force((s, t) in point_sets()) {
        let sp: Vec<Point> = s.iter().cloned().map(Point::from_dyadics).collect();
        let tp: Vec<Point> = t.iter().cloned().map(Point::from_dyadics).collect();
        let h = hausdorff_finite(&sp, &tp).unwrap();
        prop_assert_eq!(h.exact(), Some(&brute_hausdorff(&s, &t)));
    }

    #[test]
    fn hausdorff_metric_laws((s, t) in point_sets(), extra in prop::collection::vec(-64i64..64, 3)) {
        let m = s[0].len();
        let u = vec![extra[..m].iter().map(|&a| d(a, -2)).collect::<Vec<_>>()];
        let set = |v: &Vec<Vec<Dyadic>>| {
            let pts: Vec<Point> = v.iter().cloned().map(Point::from_dyadics).collect();
            TBSet::from_coverings(m, move |_| pts.clone())
        };
        let (a, b, c) = (set(&s), set(&t), set(&u));
        let p = 8;
        let tol = Dyadic::pow2(-(p as i64));
        let h = |x: &TBSet, y: &TBSet| hausdorff_tb(x, y).unwrap().approx(p + 1);
        prop_assert!(h(&a, &a).hi() <= &tol);
        let (ab, ba) = (h(&a, &b), h(&b, &a));
        prop_assert!(&(ab.lo() - ba.hi()) <= &tol && &(ba.lo() - ab.hi()) <= &tol);
        let (bc, ac) = (h(&b, &c), h(&a, &c));
        prop_assert!(ac.lo() <= &(&(ab.hi() + bc.hi()) + &(&tol + &tol)));
    }

    #[test]
    fn triangle_distance_bounds(x in -300i64..300, y in -300i64..300) {
        let (x, y) = (d(x, -7), d(y, -7));
        let v = tb_dist(&triangle_tb(), &Point::from_dyadics(vec![x.clone(), y.clone()])).unwrap();
        prop_assert!(within(&v, &triangle_dist(&x, &y), 10));
    }
}
