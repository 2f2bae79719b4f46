//! Exact-rational oracles shared by the property and acceptance targets.

#![allow(dead_code)]

use hypar_core::geom3::{trisphere_with, IPoint3, SpherePair, Trilateration};
use hypar_core::ivalnum::{exact_decimal, sincos_deg, Interval};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

pub fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn pow10(e: i32) -> BigRational {
    let t = BigRational::from_integer(BigInt::from(10).pow(e.unsigned_abs()));
    if e >= 0 {
        t
    } else {
        t.recip()
    }
}

/// Interval `[m·10^e, m·10^e + w·10^we]`, rounded outward to `prec`.
#[derive(Clone, Copy, Debug)]
pub struct RawInterval {
    pub m: i64,
    pub e: i32,
    pub w: u64,
    pub we: i32,
}

impl RawInterval {
    pub fn random(rng: &mut impl Rng) -> Self {
        let w = match rng.gen_range(0..4) {
            0 => 0,
            _ => rng.gen_range(0..1_000_000_000_000u64),
        };
        RawInterval {
            m: rng.gen_range(-1_000_000_000_000_000i64..=1_000_000_000_000_000),
            e: rng.gen_range(-8..=8),
            w,
            we: rng.gen_range(-8..=8),
        }
    }

    pub fn endpoints(&self) -> (BigRational, BigRational) {
        let lo = BigRational::from_integer(self.m.into()) * pow10(self.e);
        let hi = &lo + BigRational::from_integer(self.w.into()) * pow10(self.we);
        (lo, hi)
    }

    pub fn interval(&self, prec: u32) -> Interval {
        let (lo, hi) = self.endpoints();
        Interval::new(exact_decimal(&lo).unwrap(), exact_decimal(&hi).unwrap(), prec).unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Square,
    Sqrt,
    Neg,
    Abs,
}

pub const OPS: [Op; 8] = [Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Square, Op::Sqrt, Op::Neg, Op::Abs];

/// Applies `op`; `None` when the operation is undefined on the inputs.
pub fn apply(op: Op, a: &Interval, b: &Interval) -> Option<Interval> {
    match op {
        Op::Add => Some(a + b),
        Op::Sub => Some(a - b),
        Op::Mul => Some(a * b),
        Op::Div => a.div(b).ok(),
        Op::Square => Some(a.square()),
        Op::Sqrt => a.abs().sqrt().ok(),
        Op::Neg => Some(a.neg()),
        Op::Abs => Some(a.abs()),
    }
}

fn samples(a: &Interval, t: &BigRational) -> Vec<BigRational> {
    let lo = a.lo().to_rational();
    let hi = a.hi().to_rational();
    let mid = (&lo + &hi) / BigRational::from_integer(2.into());
    let inner = &lo + (&hi - &lo) * t;
    vec![lo, hi, mid, inner]
}

fn in_sqrt(r: &Interval, x: &BigRational) -> bool {
    let lo = r.lo().to_rational();
    let hi = r.hi().to_rational();
    let lower = !lo.is_positive() || &lo * &lo <= *x;
    let upper = !hi.is_negative() && *x <= &hi * &hi;
    lower && upper
}

/// Every exact result over sampled input points lies in the computed enclosure.
pub fn check_containment(op: Op, ra: &RawInterval, rb: &RawInterval, prec: u32, t: &BigRational) -> Result<(), String> {
    let a = ra.interval(prec);
    let b = rb.interval(prec);
    let Some(r) = apply(op, &a, &b) else {
        return match op {
            Op::Div if b.contains_zero() => Ok(()),
            _ => Err(format!("{op:?} undefined on {a} and {b}")),
        };
    };
    if r.lo() > r.hi() {
        return Err(format!("{op:?} inverted result {r}"));
    }
    let xs = samples(&a, t);
    let ys = samples(&b, t);
    for x in &xs {
        let ok = match op {
            Op::Square => r.contains_rational(&(x * x)),
            Op::Sqrt => in_sqrt(&r, &x.abs()),
            Op::Neg => r.contains_rational(&-x),
            Op::Abs => r.contains_rational(&x.abs()),
            _ => ys.iter().all(|y| {
                let v = match op {
                    Op::Add => x + y,
                    Op::Sub => x - y,
                    Op::Mul => x * y,
                    Op::Div => x / y,
                    _ => unreachable!(),
                };
                r.contains_rational(&v)
            }),
        };
        if !ok {
            return Err(format!("{op:?}: {a} op {b} = {r} misses a sample at x = {x}"));
        }
    }
    Ok(())
}

/// The enclosure at `hi_prec` digits is nested in the one at `lo_prec` digits.
pub fn check_precision_nesting(op: Op, ra: &RawInterval, rb: &RawInterval, lo_prec: u32, hi_prec: u32) -> Result<(), String> {
    let coarse = apply(op, &ra.interval(lo_prec), &rb.interval(lo_prec));
    let fine = apply(op, &ra.interval(hi_prec), &rb.interval(hi_prec));
    match (coarse, fine) {
        (Some(c), Some(f)) if c.contains_interval(&f) => Ok(()),
        (Some(c), Some(f)) => Err(format!("{op:?}: {hi_prec}-digit {f} not inside {lo_prec}-digit {c}")),
        (None, _) | (_, None) => Ok(()),
    }
}

/// `sqrt(square(a)) ⊇ |a|` and, for `a ≥ 0`, `square(sqrt(a)) ⊇ a`.
pub fn check_sqrt_square(ra: &RawInterval, prec: u32) -> Result<(), String> {
    let a = ra.interval(prec);
    let back = a.square().sqrt().map_err(|e| e.to_string())?;
    if !back.contains_interval(&a.abs()) {
        return Err(format!("sqrt(square({a})) = {back}"));
    }
    let pos = a.abs();
    let round = pos.sqrt().map_err(|e| e.to_string())?.square();
    if !round.contains_interval(&pos) {
        return Err(format!("square(sqrt({pos})) = {round}"));
    }
    Ok(())
}

/// `sin²θ + cos²θ ∋ 1`, and both enclosures bracket a widened `f64` evaluation.
pub fn check_pythagoras(num: i64, den: i64, prec: u32) -> Result<(), String> {
    let theta = q(num, den);
    let (s, c) = sincos_deg(&theta, prec);
    let sum = s.square() + c.square();
    if !sum.contains_rational(&BigRational::one()) {
        return Err(format!("sin²+cos² of {theta}° = {sum}"));
    }
    let rad = theta.to_f64().unwrap().to_radians();
    for (name, iv, f) in [("sin", &s, rad.sin()), ("cos", &c, rad.cos())] {
        let (lo, hi) = iv.to_f64_bounds();
        let slack = 1e-9 * (1.0 + rad.abs());
        if f < lo - slack || f > hi + slack {
            return Err(format!("{name} {theta}° = {iv}, f64 gives {f}"));
        }
    }
    Ok(())
}

pub type QPoint = [BigRational; 3];

fn qsub(a: &QPoint, b: &QPoint) -> QPoint {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn qdot(a: &QPoint, b: &QPoint) -> BigRational {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn qcross(a: &QPoint, b: &QPoint) -> QPoint {
    [&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]]
}

fn qaxpy(p: &QPoint, t: &BigRational, v: &QPoint) -> QPoint {
    [&p[0] + t * &v[0], &p[1] + t * &v[1], &p[2] + t * &v[2]]
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

/// Solves a 3×3 rational system by Gaussian elimination with pivoting.
pub fn solve3(mut m: [[BigRational; 4]; 3]) -> Option<QPoint> {
    for col in 0..3 {
        let piv = (col..3).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let pivot = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = &row[col] / &pivot[col];
                for (x, p) in row.iter_mut().zip(&pivot).skip(col) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some([&m[0][3] / &m[0][0], &m[1][3] / &m[1][1], &m[2][3] / &m[2][2]])
}

/// A three-sphere instance with exact rational data and a known solution.
#[derive(Clone, Debug)]
pub struct SphereInstance {
    pub centres: [QPoint; 3],
    pub radii_sq: [BigRational; 3],
}

impl SphereInstance {
    /// Centres `c` and a solution `p`; `None` if the centres are collinear or `p` is on their plane.
    pub fn from_points(c: [QPoint; 3], p: QPoint) -> Option<Self> {
        let n = qcross(&qsub(&c[1], &c[0]), &qsub(&c[2], &c[0]));
        if qdot(&n, &n).is_zero() || qdot(&n, &qsub(&p, &c[0])).is_zero() {
            return None;
        }
        let radii_sq = [0, 1, 2].map(|i| {
            let d = qsub(&p, &c[i]);
            qdot(&d, &d)
        });
        Some(SphereInstance { centres: c, radii_sq })
    }

    /// Random centres and solution with coordinates `a/b`.
    pub fn random(rng: &mut impl Rng) -> Self {
        loop {
            let mut pt = || [0, 1, 2].map(|_| q(rng.gen_range(-30..=30), rng.gen_range(1..=7)));
            let c = [pt(), pt(), pt()];
            let p = pt();
            if let Some(inst) = Self::from_points(c, p) {
                return inst;
            }
        }
    }

    /// Both exact intersection points, `(plus, minus)` with `plus` on the side
    /// of `(c2 - c1) × (c3 - c1)`, found by eliminating the sphere equations.
    pub fn oracle(&self) -> Option<(QPoint, QPoint)> {
        let [c1, c2, c3] = &self.centres;
        let [r1, r2, r3] = &self.radii_sq;
        let n = qcross(&qsub(c2, c1), &qsub(c3, c1));
        let two = BigRational::from_integer(2.into());
        let row = |c: &QPoint, r: &BigRational| {
            let d = qsub(c, c1);
            let rhs = qdot(c, c) - qdot(c1, c1) - (r - r1);
            [&two * &d[0], &two * &d[1], &two * &d[2], rhs]
        };
        let foot = solve3([row(c2, r2), row(c3, r3), [n[0].clone(), n[1].clone(), n[2].clone(), qdot(&n, c1)]])?;
        let off = qsub(&foot, c1);
        let t = rational_sqrt(&((r1 - qdot(&off, &off)) / qdot(&n, &n)))?;
        Some((qaxpy(&foot, &t, &n), qaxpy(&foot, &-t, &n)))
    }

    pub fn enclose(&self, prec: u32) -> ([IPoint3; 3], [Interval; 3]) {
        let pt = |p: &QPoint| {
            IPoint3::new(Interval::from_rational(&p[0], prec), Interval::from_rational(&p[1], prec), Interval::from_rational(&p[2], prec))
        };
        (self.centres.each_ref().map(pt), self.radii_sq.each_ref().map(|r| Interval::from_rational(r, prec)))
    }
}

pub fn contains_point(p: &IPoint3, q: &QPoint) -> bool {
    p.x.contains_rational(&q[0]) && p.y.contains_rational(&q[1]) && p.z.contains_rational(&q[2])
}

/// Both trilateration arrangements enclose the oracle's solutions on the right sides.
pub fn check_trilateration(inst: &SphereInstance, prec: u32) -> Result<(), String> {
    let (plus, minus) = inst.oracle().ok_or("oracle found no rational solution")?;
    let (c, r) = inst.enclose(prec);
    for method in [Trilateration::Frame, Trilateration::Gram] {
        let SpherePair { plus: p, minus: m } =
            trisphere_with(method, &c[0], &r[0], &c[1], &r[1], &c[2], &r[2]).map_err(|e| format!("{method:?}: {e}"))?;
        if !contains_point(&p, &plus) || !contains_point(&m, &minus) {
            return Err(format!("{method:?} misses the oracle solution for {inst:?}"));
        }
    }
    Ok(())
}
