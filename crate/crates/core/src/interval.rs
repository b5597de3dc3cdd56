//! Closed intervals with exact dyadic endpoints.

use std::fmt;

use crate::dyadic::Dyadic;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(d: Dyadic) -> Self {
        Interval {
            lo: d.clone(),
            hi: d,
        }
    }

    /// `[center - radius, center + radius]`.
    pub fn around(center: &Dyadic, radius: &Dyadic) -> Self {
        Interval::new(center - radius, center + radius)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Dyadic {
        (&self.lo + &self.hi).half()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Largest absolute value of any element.
    pub fn magnitude(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().expect("nonempty").clone();
        let hi = products.iter().max().expect("nonempty").clone();
        Interval { lo, hi }
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval {
                lo: Dyadic::zero(),
                hi: self.magnitude(),
            }
        }
    }

    pub fn max(&self, rhs: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(rhs.lo.clone()),
            hi: self.hi.clone().max(rhs.hi.clone()),
        }
    }

    pub fn min(&self, rhs: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(rhs.lo.clone()),
            hi: self.hi.clone().min(rhs.hi.clone()),
        }
    }

    pub fn shl(&self, k: i64) -> Interval {
        Interval {
            lo: self.lo.shl(k),
            hi: self.hi.shl(k),
        }
    }

    /// Widens both ends by `r`.
    pub fn widen(&self, r: &Dyadic) -> Interval {
        Interval {
            lo: &self.lo - r,
            hi: &self.hi + r,
        }
    }

    /// Outward rounding of both endpoints to the grid `2^grid`.
    pub fn round_out(&self, grid: i64) -> Interval {
        Interval {
            lo: self.lo.floor_to(grid),
            hi: self.hi.ceil_to(grid),
        }
    }

    /// Certainly below: every element of `self` is `< ` every element of `rhs`.
    pub fn certainly_lt(&self, rhs: &Interval) -> bool {
        self.hi < rhs.lo
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(a: i64, b: i64, e: i64) -> Interval {
        let (a, b) = (a.min(b), a.max(b));
        Interval::new(Dyadic::new(a, e), Dyadic::new(b, e))
    }

    #[test]
    fn abs_cases() {
        assert_eq!(iv(-3, 5, 0).abs(), iv(0, 5, 0));
        assert_eq!(iv(-6, -1, 0).abs(), iv(1, 6, 0));
        assert_eq!(iv(1, 5, 0).abs(), iv(1, 5, 0));
    }

    #[test]
    #[should_panic]
    fn rejects_reversed() {
        Interval::new(Dyadic::one(), Dyadic::zero());
    }

    proptest! {
        #[test]
        fn ops_contain_pointwise_results(a in -500i64..500, b in -500i64..500, x in 0i64..=100,
                                         c in -500i64..500, d in -500i64..500, y in 0i64..=100) {
            let (i, j) = (iv(a, b, -3), iv(c, d, -2));
            // interior points, scaled by 100 so the convex combination stays on the grid
            let p = &i.lo * &Dyadic::from(100 - x) + &i.hi * &Dyadic::from(x);
            let q = &j.lo * &Dyadic::from(100 - y) + &j.hi * &Dyadic::from(y);
            let (i100, j100) = (i.mul(&iv(100, 100, 0)), j.mul(&iv(100, 100, 0)));
            prop_assert!(i100.contains(&p) && j100.contains(&q));
            prop_assert!(i100.add(&j100).contains(&(&p + &q)));
            prop_assert!(i100.sub(&j100).contains(&(&p - &q)));
            prop_assert!(i100.mul(&j100).contains(&(&p * &q)));
            prop_assert!(i100.max(&j100).contains(&p.clone().max(q.clone())));
            prop_assert!(i100.min(&j100).contains(&p.clone().min(q.clone())));
            prop_assert!(i100.abs().contains(&p.abs()));
            prop_assert!(i100.round_out(-1).contains_interval(&i100));
        }
    }
}
