//! Direct constructions from whole coverings, without tree search.
//!
//! These cost a full level-`(n+1)` or `(n+2)` covering per effort and serve
//! as cross-checks for the search-based versions.

use crate::error::SetError;
use crate::real::CReal;
use crate::dyadic::Dyadic;
use crate::space::{dist_enclosure, Point};

use super::{hausdorff_finite, TBSet};

/// `d(x, A)` from `min_c d(x, c)` over the level-`(n+2)` centers, widened by
/// the ball radius.
pub fn tb_dist_direct(a: &TBSet, x: &Point) -> Result<CReal, SetError> {
    if a.is_empty() {
        return Err(SetError::Empty);
    }
    let (a, x) = (a.clone(), x.clone());
    Ok(CReal::from_fn(move |n| {
        let e = n.saturating_add(2);
        a.covering(e)
            .iter()
            .map(|c| dist_enclosure(&x, c, e))
            .reduce(|m, d| m.min(&d))
            .expect("nonempty")
            .widen(&Dyadic::pow2(-i64::from(e)))
    }))
}

/// `d_H(A, B)` from the finite distance between level-`(n+1)` centers,
/// widened by the ball radius.
pub fn hausdorff_direct(a: &TBSet, b: &TBSet) -> Result<CReal, SetError> {
    if a.is_empty() || b.is_empty() {
        return Err(SetError::Empty);
    }
    let (a, b) = (a.clone(), b.clone());
    Ok(CReal::from_fn(move |n| {
        let e = n.saturating_add(1);
        hausdorff_finite(&a.covering(e), &b.covering(e))
            .expect("nonempty")
            .approx(e)
            .widen(&Dyadic::pow2(-i64::from(e)))
    }))
}
