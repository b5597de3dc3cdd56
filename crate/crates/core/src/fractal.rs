//! Concrete sets: the unit triangle, cubes, and midpoint IFS attractors.

use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Deserialize;

use crate::dyadic::{parse_decimal_parts, Dyadic};
use crate::error::{ParseError, SetError};
use crate::kernel::lock;
use crate::real::CReal;
use crate::space::Point;
use crate::tbound::{tb_affine, tb_limit, tb_union, Cover, Node, TBSet};

/// Deepest level for which whole coverings are listed. Searches through the
/// covering trees are not limited by it.
pub const MAX_LEVEL: u32 = 60;

fn level_ok(n: u32) {
    assert!(n <= MAX_LEVEL, "level {n} exceeds {MAX_LEVEL}");
}

/// `{(x, y) : x >= 0, y >= 0, x + y <= 1}`.
///
/// The level-`n` balls sit on the cells `[i, i+1] x [j, j+1] * 2^-n` with
/// `i + j < 2^n`, centered at `((2i+1), (2j+1)) * 2^-(n+1)`.
pub fn triangle_tb() -> TBSet {
    TBSet::from_cover(TriangleCover)
}

struct TriangleCover;

fn triangle_node(i: BigInt, j: BigInt, n: u32) -> Node {
    let e = -(n as i64) - 1;
    let center = vec![Dyadic::new(2 * &i + 1, e), Dyadic::new(2 * &j + 1, e)];
    Node::new(n, Point::from_dyadics(center)).with_tag(vec![i, j])
}

impl Cover for TriangleCover {
    fn dimension(&self) -> usize {
        2
    }
    fn roots(&self) -> Vec<Node> {
        vec![triangle_node(BigInt::from(0), BigInt::from(0), 0)]
    }
    fn children(&self, node: &Node) -> Vec<Node> {
        let n = node.level + 1;
        let (i, j) = (&node.tag[0], &node.tag[1]);
        let side = BigInt::from(1) << n;
        let mut out = Vec::with_capacity(4);
        for a in 0..2 {
            for b in 0..2 {
                let (ci, cj) = (2 * i + a, 2 * j + b);
                if &ci + &cj < side {
                    out.push(triangle_node(ci, cj, n));
                }
            }
        }
        out
    }
    fn member_near(&self, node: &Node) -> Point {
        // lower-left corner of the cell
        let e = -(node.level as i64);
        Point::from_dyadics(vec![Dyadic::new(node.tag[0].clone(), e), Dyadic::new(node.tag[1].clone(), e)])
    }
    fn centers(&self, n: u32) -> Vec<Point> {
        level_ok(n);
        let side = 1i64 << n;
        let mut out = Vec::new();
        for i in 0..side {
            for j in 0..side - i {
                out.push(triangle_node(i.into(), j.into(), n).center);
            }
        }
        out
    }
}

/// The closed cube `[-1, 1]^m`, split into `2^(n m)` cells at level `n`.
pub fn cube_tb(m: usize) -> TBSet {
    TBSet::from_cover(CubeCover(m))
}

struct CubeCover(usize);

fn cube_node(idx: Vec<BigInt>, n: u32) -> Node {
    let e = -(n as i64);
    let center = idx.iter().map(|i| &Dyadic::new(2 * i + 1, e) - &Dyadic::one()).collect();
    Node::new(n, Point::from_dyadics(center)).with_tag(idx)
}

impl Cover for CubeCover {
    fn dimension(&self) -> usize {
        self.0
    }
    fn roots(&self) -> Vec<Node> {
        vec![cube_node(vec![BigInt::from(0); self.0], 0)]
    }
    fn children(&self, node: &Node) -> Vec<Node> {
        let n = node.level + 1;
        (0..1usize << self.0)
            .map(|bits| {
                let idx = node.tag.iter().enumerate().map(|(k, i)| 2 * i + ((bits >> k) & 1) as i64).collect();
                cube_node(idx, n)
            })
            .collect()
    }
    fn member_near(&self, node: &Node) -> Point {
        node.center.clone()
    }
}

/// A rotation-free midpoint IFS: the maps `x -> (x + d) / 2` for anchors `d`
/// in the cube `[-1, 1]^m`.
#[derive(Clone, Debug)]
pub struct Ifs {
    anchors: Vec<Point>,
}

impl Ifs {
    /// Rejects anchors whose effort-10 enclosure lies outside the cube.
    pub fn new(anchors: Vec<Point>) -> Result<Self, SetError> {
        let first = anchors.first().ok_or(SetError::NoAnchors)?;
        let dim = first.dim();
        let (lo, hi) = (Dyadic::from(-1), Dyadic::one());
        for (k, a) in anchors.iter().enumerate() {
            if a.dim() != dim {
                return Err(SetError::DimensionMismatch(dim, a.dim()));
            }
            if a.approx(10).iter().any(|iv| iv.lo() > &hi || iv.hi() < &lo) {
                return Err(SetError::AnchorOutsideCube(k));
            }
        }
        Ok(Ifs { anchors })
    }

    /// Anchors `(-1, -1)`, `(1, -1)`, `(0, sqrt(3) - 1)`.
    pub fn sierpinski() -> Self {
        let top = CReal::sqrt3().sub(&CReal::one());
        let d = |x: i64, y: i64| Point::from_dyadics(vec![Dyadic::from(x), Dyadic::from(y)]);
        Ifs::new(vec![d(-1, -1), d(1, -1), Point::new(vec![CReal::zero(), top])]).expect("inside the cube")
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    pub fn dimension(&self) -> usize {
        self.anchors[0].dim()
    }

    /// Reads `{"dimension": m, "anchors": [[coord, ...], ...]}`.
    ///
    /// Coordinates are strings or JSON numbers: decimals, `m*2^e` or
    /// `m/2^k`. Non-dyadic decimals and `p/q` fractions are accepted as exact
    /// rationals only with `"allow_non_dyadic": true`.
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let cfg: IfsConfig = serde_json::from_str(text).map_err(|e| ParseError::Ifs(e.to_string()))?;
        let mut anchors = Vec::with_capacity(cfg.anchors.len());
        for (k, row) in cfg.anchors.iter().enumerate() {
            if row.len() != cfg.dimension {
                return Err(ParseError::Ifs(format!(
                    "anchor {k} has {} coordinates, expected {}",
                    row.len(),
                    cfg.dimension
                )));
            }
            let coords = row
                .iter()
                .map(|v| parse_coordinate(&json_scalar(v)?, cfg.allow_non_dyadic))
                .collect::<Result<Vec<_>, _>>()?;
            anchors.push(Point::new(coords));
        }
        Ifs::new(anchors).map_err(|e| ParseError::Ifs(e.to_string()))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IfsConfig {
    dimension: usize,
    anchors: Vec<Vec<serde_json::Value>>,
    #[serde(default)]
    allow_non_dyadic: bool,
}

fn json_scalar(v: &serde_json::Value) -> Result<String, ParseError> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(ParseError::Ifs(format!("coordinate must be a string or number, got {other}"))),
    }
}

fn parse_coordinate(s: &str, allow_non_dyadic: bool) -> Result<CReal, ParseError> {
    match s.parse::<Dyadic>() {
        Ok(d) => return Ok(CReal::from_dyadic(d)),
        Err(ParseError::NotDyadic(_)) if allow_non_dyadic => {}
        Err(e) => return Err(e),
    }
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => {
            let bad = || ParseError::Number(s.to_string());
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            if q < BigInt::from(0) {
                (-p, -q)
            } else {
                (p, q)
            }
        }
        None => {
            let (num, k) = parse_decimal_parts(s)?;
            (num, num_traits::pow(BigInt::from(10), k))
        }
    };
    Ok(CReal::from_ratio(num, den))
}

/// The attractor of `ifs`, covered directly: the level-`n` centers are the
/// images of the origin under all `n`-fold compositions of the maps.
pub fn ifs_tb(ifs: &Ifs) -> TBSet {
    TBSet::from_cover(IfsCover::new(ifs))
}

struct IfsCover {
    ifs: Ifs,
    // per anchor and coordinate: the dyadic value, or None when lazy
    exact: Vec<Vec<Option<Dyadic>>>,
}

impl IfsCover {
    fn new(ifs: &Ifs) -> Self {
        let exact = ifs.anchors.iter().map(|a| a.coords().iter().map(|c| c.exact().cloned()).collect()).collect();
        IfsCover { ifs: ifs.clone(), exact }
    }

    /// The point `sum_j weights[j] * 2^-n * d_j`.
    fn combine(&self, weights: &[BigInt], n: u32) -> Point {
        let e = -(n as i64);
        let dim = self.ifs.dimension();
        let coords = (0..dim)
            .map(|i| {
                let mut exact = Dyadic::zero();
                let mut lazy: Option<CReal> = None;
                for (j, w) in weights.iter().enumerate() {
                    if w.is_zero() {
                        continue;
                    }
                    let wd = Dyadic::new(w.clone(), e);
                    match &self.exact[j][i] {
                        Some(d) => exact = &exact + &(&wd * d),
                        None => {
                            let term = self.ifs.anchors[j].coord(i).mul(&CReal::from_dyadic(wd));
                            lazy = Some(match lazy {
                                None => term,
                                Some(acc) => acc.add(&term),
                            });
                        }
                    }
                }
                let exact = CReal::from_dyadic(exact);
                match lazy {
                    None => exact,
                    Some(l) => exact.add(&l),
                }
            })
            .collect();
        Point::new(coords)
    }

    fn node(&self, weights: Vec<BigInt>, n: u32) -> Node {
        Node::new(n, self.combine(&weights, n)).with_tag(weights)
    }
}

impl Cover for IfsCover {
    fn dimension(&self) -> usize {
        self.ifs.dimension()
    }
    fn roots(&self) -> Vec<Node> {
        vec![self.node(vec![BigInt::zero(); self.ifs.anchors.len()], 0)]
    }
    fn children(&self, node: &Node) -> Vec<Node> {
        // composing with one more map on the inside: c + 2^-(n+1) d
        let n = node.level + 1;
        (0..self.ifs.anchors.len())
            .map(|d| {
                let mut w: Vec<BigInt> = node.tag.iter().map(|x| 2 * x).collect();
                w[d] += 1;
                self.node(w, n)
            })
            .collect()
    }
    fn member_near(&self, node: &Node) -> Point {
        // image of the fixed point d_0 under the node's composition
        let mut w = node.tag.clone();
        w[0] += 1;
        self.combine(&w, node.level)
    }
    fn centers(&self, n: u32) -> Vec<Point> {
        level_ok(n);
        // L_{k+1} = { (c + d) / 2 : d in anchors, c in L_k }
        let k = self.ifs.anchors.len();
        let mut level: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); k]];
        for step in 0..n {
            let mut next = Vec::with_capacity(level.len() * k);
            for d in 0..k {
                for w in &level {
                    let mut w = w.clone();
                    w[d] += BigInt::from(1) << step;
                    next.push(w);
                }
            }
            level = next;
        }
        level.iter().map(|w| self.combine(w, n)).collect()
    }
}

/// Anchors `(-1, -1)`, `(1, -1)`, `(0, sqrt(3) - 1)`, covered directly.
pub fn sierpinski_tb() -> TBSet {
    ifs_tb(&Ifs::sierpinski())
}

/// The attractor of `ifs` as a limit of sets: `T_0` is the cube and
/// `T_{i+1}` is the union over anchors `d` of `T_i / 2 + d / 2`.
pub fn ifs_limit_tb(ifs: &Ifs) -> TBSet {
    let dim = ifs.dimension();
    let iterates: Arc<Mutex<Vec<TBSet>>> = Arc::new(Mutex::new(vec![crate::fractal::cube_tb(dim)]));
    let shifts: Vec<Point> = ifs.anchors.iter().map(|d| d.scale_pow2(-1)).collect();
    let half = Dyadic::pow2(-1);
    tb_limit(dim, move |i| {
        let mut its = lock(&iterates);
        while its.len() <= i as usize {
            let prev = its.last().expect("nonempty").clone();
            let next = shifts
                .iter()
                .map(|t| tb_affine(&half, t, &prev).expect("valid scale"))
                .reduce(|acc, part| tb_union(&acc, &part).expect("same dimension"))
                .expect("at least one anchor");
            its.push(next);
        }
        its[i as usize].clone()
    })
}
