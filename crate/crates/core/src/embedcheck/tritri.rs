//! Certified triangle-pair predicates, generic over an interval scalar.
//!
//! A fast pass runs in directed-rounding `f64` intervals; undecided pairs are
//! re-run in decimal [`Interval`] arithmetic.

use crate::geom3::IPoint3;
use crate::ivalnum::{Interval, SignVerdict};

/// Interval scalar with certified sign tests.
pub trait Scalar: Clone + Send + Sync {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn sign(&self) -> SignVerdict;
    /// Every value of `self` is strictly below every value of `o`.
    fn certainly_lt(&self, o: &Self) -> bool;
}

/// Closed `f64` interval, widened by one ulp after every operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fi {
    pub lo: f64,
    pub hi: f64,
}

impl Fi {
    pub fn new(lo: f64, hi: f64) -> Fi {
        Fi { lo, hi }
    }

    pub fn from_interval(v: &Interval) -> Fi {
        let (lo, hi) = v.to_f64_bounds();
        Fi { lo, hi }
    }

    fn out(lo: f64, hi: f64) -> Fi {
        Fi { lo: lo.next_down(), hi: hi.next_up() }
    }
}

impl Scalar for Fi {
    fn add(&self, o: &Self) -> Self {
        Fi::out(self.lo + o.lo, self.hi + o.hi)
    }

    fn sub(&self, o: &Self) -> Self {
        Fi::out(self.lo - o.hi, self.hi - o.lo)
    }

    fn mul(&self, o: &Self) -> Self {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        if p.iter().any(|x| x.is_nan()) {
            return Fi::new(f64::NEG_INFINITY, f64::INFINITY);
        }
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Fi::out(lo, hi)
    }

    fn neg(&self) -> Self {
        Fi::new(-self.hi, -self.lo)
    }

    fn sign(&self) -> SignVerdict {
        if self.lo > 0.0 {
            SignVerdict::CertainlyPositive
        } else if self.hi < 0.0 {
            SignVerdict::CertainlyNegative
        } else if self.lo == 0.0 && self.hi == 0.0 {
            SignVerdict::CertainlyZero
        } else {
            SignVerdict::Indeterminate
        }
    }

    fn certainly_lt(&self, o: &Self) -> bool {
        self.hi < o.lo
    }
}

impl Scalar for Interval {
    fn add(&self, o: &Self) -> Self {
        Interval::add(self, o)
    }

    fn sub(&self, o: &Self) -> Self {
        Interval::sub(self, o)
    }

    fn mul(&self, o: &Self) -> Self {
        Interval::mul(self, o)
    }

    fn neg(&self) -> Self {
        Interval::neg(self)
    }

    fn sign(&self) -> SignVerdict {
        Interval::sign(self)
    }

    fn certainly_lt(&self, o: &Self) -> bool {
        self.hi() < o.lo()
    }
}

pub type V3<T> = [T; 3];

pub fn fi_point(p: &IPoint3) -> V3<Fi> {
    [Fi::from_interval(&p.x), Fi::from_interval(&p.y), Fi::from_interval(&p.z)]
}

pub fn iv_point(p: &IPoint3) -> V3<Interval> {
    [p.x.clone(), p.y.clone(), p.z.clone()]
}

fn sub<T: Scalar>(a: &V3<T>, b: &V3<T>) -> V3<T> {
    [a[0].sub(&b[0]), a[1].sub(&b[1]), a[2].sub(&b[2])]
}

fn dot<T: Scalar>(a: &V3<T>, b: &V3<T>) -> T {
    a[0].mul(&b[0]).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[2]))
}

fn cross<T: Scalar>(a: &V3<T>, b: &V3<T>) -> V3<T> {
    [
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

fn orient<T: Scalar>(a: &V3<T>, b: &V3<T>, c: &V3<T>, d: &V3<T>) -> SignVerdict {
    dot(&cross(&sub(b, a), &sub(c, a)), &sub(d, a)).sign()
}

/// Outcome for one face pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairVerdict {
    /// The faces meet at most in their shared simplex.
    Disjoint,
    /// The faces certainly cross beyond their shared simplex.
    Intersecting,
    Indeterminate,
}

/// Classifies two triangles. `shared` lists index pairs `(i, j)` with
/// `t1[i]` and `t2[j]` the same pattern vertex (0, 1 or 2 entries).
pub fn tri_tri<T: Scalar>(t1: &[V3<T>; 3], t2: &[V3<T>; 3], shared: &[(usize, usize)]) -> PairVerdict {
    match shared {
        [] => disjoint_pair(t1, t2),
        [(i, j)] => vertex_pair(t1, t2, *i, *j),
        [(i1, _), (i2, _)] => {
            let r1 = 3 - i1 - i2;
            let r2 = (0..3).find(|&j| shared.iter().all(|s| s.1 != j)).unwrap();
            edge_pair(&t1[*i1], &t1[*i2], &t1[r1], &t2[r2])
        }
        _ => PairVerdict::Indeterminate,
    }
}

fn separated_along<T: Scalar>(axis: &V3<T>, t1: &[V3<T>; 3], t2: &[V3<T>; 3]) -> bool {
    let p1: Vec<T> = t1.iter().map(|p| dot(axis, p)).collect();
    let p2: Vec<T> = t2.iter().map(|p| dot(axis, p)).collect();
    let below = |a: &[T], b: &[T]| a.iter().all(|x| b.iter().all(|y| x.certainly_lt(y)));
    below(&p1, &p2) || below(&p2, &p1)
}

fn segment_crosses<T: Scalar>(p: &V3<T>, q: &V3<T>, t: &[V3<T>; 3]) -> bool {
    let s1 = orient(&t[0], &t[1], &t[2], p).strict();
    let s2 = orient(&t[0], &t[1], &t[2], q).strict();
    match (s1, s2) {
        (Some(a), Some(b)) if a != b => {}
        _ => return false,
    }
    let w: Vec<Option<i32>> = (0..3).map(|i| orient(p, q, &t[i], &t[(i + 1) % 3]).strict()).collect();
    w[0].is_some() && w[0] == w[1] && w[1] == w[2]
}

fn disjoint_pair<T: Scalar>(t1: &[V3<T>; 3], t2: &[V3<T>; 3]) -> PairVerdict {
    let e1: Vec<V3<T>> = (0..3).map(|i| sub(&t1[(i + 1) % 3], &t1[i])).collect();
    let e2: Vec<V3<T>> = (0..3).map(|i| sub(&t2[(i + 1) % 3], &t2[i])).collect();
    let n1 = cross(&e1[0], &e1[1]);
    let n2 = cross(&e2[0], &e2[1]);
    if separated_along(&n1, t1, t2) || separated_along(&n2, t1, t2) {
        return PairVerdict::Disjoint;
    }
    for a in &e1 {
        for b in &e2 {
            if separated_along(&cross(a, b), t1, t2) {
                return PairVerdict::Disjoint;
            }
        }
    }
    // in-plane axes separate coplanar pairs
    for e in e1.iter().chain(&e2) {
        if separated_along(&cross(&n1, e), t1, t2) {
            return PairVerdict::Disjoint;
        }
    }
    for i in 0..3 {
        if segment_crosses(&t1[i], &t1[(i + 1) % 3], t2) || segment_crosses(&t2[i], &t2[(i + 1) % 3], t1) {
            return PairVerdict::Intersecting;
        }
    }
    PairVerdict::Indeterminate
}

/// Where direction `d` lies relative to the wedge spanned by `a, b`
/// (normal `n = a × b`): `Some(true)` strictly inside, `Some(false)`
/// strictly outside, `None` undecided. `d` must lie in the wedge's plane.
fn in_wedge<T: Scalar>(d: &V3<T>, a: &V3<T>, b: &V3<T>, n: &V3<T>) -> Option<bool> {
    let s1 = dot(&cross(a, d), n).sign();
    let s2 = dot(&cross(d, b), n).sign();
    if s1 == SignVerdict::CertainlyNegative || s2 == SignVerdict::CertainlyNegative {
        Some(false)
    } else if s1 == SignVerdict::CertainlyPositive && s2 == SignVerdict::CertainlyPositive {
        Some(true)
    } else {
        None
    }
}

/// Two triangles sharing one vertex `v` meet beyond `v` exactly when their
/// wedges at `v` share a ray, which must run along the planes' common line.
fn vertex_pair<T: Scalar>(t1: &[V3<T>; 3], t2: &[V3<T>; 3], i: usize, j: usize) -> PairVerdict {
    let v = &t1[i];
    let a1 = sub(&t1[(i + 1) % 3], v);
    let b1 = sub(&t1[(i + 2) % 3], v);
    let w = &t2[j];
    let a2 = sub(&t2[(j + 1) % 3], w);
    let b2 = sub(&t2[(j + 2) % 3], w);
    let n1 = cross(&a1, &b1);
    let n2 = cross(&a2, &b2);
    let d = cross(&n1, &n2);
    if d.iter().all(|c| c.sign() != SignVerdict::CertainlyPositive && c.sign() != SignVerdict::CertainlyNegative) {
        // coplanar or undecided planes
        return PairVerdict::Indeterminate;
    }
    let neg = [d[0].neg(), d[1].neg(), d[2].neg()];
    let mut all_out = true;
    for dir in [&d, &neg] {
        match (in_wedge(dir, &a1, &b1, &n1), in_wedge(dir, &a2, &b2, &n2)) {
            (Some(false), _) | (_, Some(false)) => {}
            (Some(true), Some(true)) => return PairVerdict::Intersecting,
            _ => all_out = false,
        }
    }
    if all_out {
        PairVerdict::Disjoint
    } else {
        PairVerdict::Indeterminate
    }
}

/// Two non-coplanar triangles sharing edge `pq` meet only along it.
fn edge_pair<T: Scalar>(p: &V3<T>, q: &V3<T>, r1: &V3<T>, r2: &V3<T>) -> PairVerdict {
    match orient(p, q, r1, r2).strict() {
        Some(_) => PairVerdict::Disjoint,
        None => PairVerdict::Indeterminate,
    }
}
