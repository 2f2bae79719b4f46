//! Certified π, sine/cosine of exact degree angles, and arctangent.
//!
//! All series are summed in interval arithmetic with a few guard digits and
//! closed off with an explicit bound on the truncation error, then rounded
//! outward to the caller's precision.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::bignum::BigNum;
use super::interval::{Interval, SignVerdict};

const GUARD: u32 = 12;

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn eps(prec: u32) -> BigNum {
    BigNum::from_parts(false, 1u32.into(), -(prec as i64) - 4)
}

/// `atan(1/k)` by its alternating series.
fn atan_inv(k: u64, wp: u32) -> Interval {
    let k2 = BigInt::from(k) * BigInt::from(k);
    let mut den = BigInt::from(k);
    let mut sum = Interval::zero(wp);
    let tol = eps(wp);
    let mut j: i64 = 0;
    loop {
        let term = Interval::from_rational(&BigRational::new(BigInt::one(), den.clone() * (2 * j + 1)), wp);
        if term.hi() < &tol {
            // alternating with decreasing terms: remainder bounded by this term
            return sum.inflate(term.hi());
        }
        sum = if j % 2 == 0 { sum + term } else { sum - term };
        den *= &k2;
        j += 1;
    }
}

fn pi_cache() -> &'static Mutex<HashMap<u32, Interval>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Interval>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Enclosure of π at `prec` digits (Machin's formula).
pub fn pi(prec: u32) -> Interval {
    if let Some(v) = pi_cache().lock().unwrap().get(&prec) {
        return v.clone();
    }
    let wp = prec + GUARD;
    let v = atan_inv(5, wp).scale(16) - atan_inv(239, wp).scale(4);
    let v = v.with_prec(prec);
    pi_cache().lock().unwrap().insert(prec, v.clone());
    v
}

/// Taylor enclosures of `(sin x, cos x)` for `x` within `[0, 1]`.
fn sincos_small(x: &Interval, wp: u32) -> (Interval, Interval) {
    let x2 = x.square();
    let tol = eps(wp);
    let series = |first: Interval, start: i64| {
        // terms x^n/n! with n = start, start+2, ...
        let mut term = first;
        let mut n = start;
        let mut sum = Interval::zero(wp);
        let mut k = 0;
        loop {
            if term.abs().hi() < &tol {
                // |x| <= 1, so the Lagrange remainder is below the first omitted term
                return sum.inflate(term.abs().hi());
            }
            sum = if k % 2 == 0 { sum + &term } else { sum - &term };
            let d = Interval::from_i64((n + 1) * (n + 2), wp);
            term = (&term * &x2).div(&d).expect("positive factorial step");
            n += 2;
            k += 1;
        }
    };
    let sin = series(x.clone(), 1);
    let cos = series(Interval::from_i64(1, wp), 0);
    (sin, cos)
}

/// Certified `(sin θ, cos θ)` for an exact angle `θ ∈ [0°, 180°]` in degrees.
pub fn sincos_deg(theta: &BigRational, prec: u32) -> (Interval, Interval) {
    assert!(
        !theta.is_negative() && *theta <= BigRational::from_integer(180.into()),
        "angle {theta} outside [0, 180] degrees"
    );
    let ninety = BigRational::from_integer(90.into());
    if *theta > ninety {
        let (s, c) = sincos_deg(&(BigRational::from_integer(180.into()) - theta), prec);
        return (s, c.neg());
    }
    if *theta > rat(45, 1) {
        let (s, c) = sincos_deg(&(ninety - theta), prec);
        return (c, s);
    }
    if theta.is_zero() {
        return (Interval::zero(prec), Interval::from_i64(1, prec));
    }
    let wp = prec + GUARD;
    let x = pi(wp) * Interval::from_rational(&(theta / BigRational::from_integer(180.into())), wp);
    let (s, c) = sincos_small(&x, wp);
    (s.with_prec(prec), c.with_prec(prec))
}

/// `atan(v)` for an exact `v >= 0`.
fn atan_point(v: &BigNum, wp: u32) -> Interval {
    if v.is_zero() {
        return Interval::zero(wp);
    }
    let one = Interval::from_i64(1, wp);
    let x = Interval::point(v.clone(), wp);
    if v > &BigNum::one() {
        let inv = one.div(&x).expect("positive");
        return pi(wp).mul(&Interval::from_rational(&rat(1, 2), wp)) - atan_reduced(&inv, wp);
    }
    atan_reduced(&x, wp)
}

/// `atan(x)` for `x ⊂ [0, 1]` via argument halving and the Taylor series.
fn atan_reduced(x: &Interval, wp: u32) -> Interval {
    let one = Interval::from_i64(1, wp);
    let limit: BigNum = "0.1".parse().unwrap();
    let mut y = x.clone();
    let mut doublings = 0;
    // atan(y) = 2 atan(y / (1 + sqrt(1 + y²)))
    while y.hi() > &limit {
        let root = (&one + &y.square()).sqrt().expect("positive radicand");
        y = y.div(&(&one + &root)).expect("positive divisor");
        doublings += 1;
    }
    let y2 = y.square();
    let tol = eps(wp);
    let mut power = y.clone();
    let mut sum = Interval::zero(wp);
    let mut k: i64 = 0;
    loop {
        let term = power.div(&Interval::from_i64(2 * k + 1, wp)).expect("positive");
        if term.abs().hi() < &tol {
            sum = sum.inflate(term.abs().hi());
            break;
        }
        sum = if k % 2 == 0 { sum + term } else { sum - term };
        power = &power * &y2;
        k += 1;
    }
    sum.scale(1 << doublings)
}

/// Enclosure of `atan(x)` for any interval `x` (monotone endpoint evaluation).
pub fn atan(x: &Interval) -> Interval {
    let wp = x.prec() + GUARD;
    let at = |v: &BigNum| {
        if v.is_negative() {
            atan_point(&v.abs(), wp).neg()
        } else {
            atan_point(v, wp)
        }
    };
    let lo = at(x.lo());
    let hi = at(x.hi());
    Interval::new(lo.lo().clone(), hi.hi().clone(), x.prec()).expect("atan is monotone")
}

/// Angle in degrees, in `[0°, 180°]`, of the vector `(x, y)` with `y >= 0`.
///
/// `y` must be an enclosure of a nonnegative quantity (e.g. a norm).
pub fn angle_deg(y: &Interval, x: &Interval) -> Interval {
    let prec = x.prec().max(y.prec());
    let wp = prec + GUARD;
    let (y, x) = (y.with_prec(wp), x.with_prec(wp));
    let pi = pi(wp);
    let half_pi = &pi * &Interval::from_rational(&rat(1, 2), wp);
    let rad = match (x.sign(), y.sign()) {
        (SignVerdict::CertainlyPositive, _) => atan(&y.div(&x).expect("positive")),
        (SignVerdict::CertainlyNegative, _) => &pi - &atan(&y.div(&x.neg()).expect("positive")),
        (_, SignVerdict::CertainlyPositive) => &half_pi - &atan(&x.div(&y).expect("positive")),
        _ => Interval::new(BigNum::zero(), pi.hi().clone(), wp).expect("ordered"),
    };
    let deg = rad.mul(&Interval::from_i64(180, wp)).div(&pi).expect("pi is positive");
    // clip to the mathematically possible range
    let lo = BigNum::max(deg.lo(), &BigNum::zero()).clone();
    let hi = BigNum::min(deg.hi(), &BigNum::from_i64(180)).clone();
    Interval::new(lo, hi, prec).expect("nonempty angle enclosure")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let p = pi(50);
        let known: BigNum = "3.14159265358979323846264338327950288419716939937510".parse().unwrap();
        assert!(p.contains(&known));
        assert!(p.width() < "1e-48".parse().unwrap());
    }

    #[test]
    fn exact_angles() {
        let (s, c) = sincos_deg(&rat(0, 1), 20);
        assert_eq!((s.lo().clone(), s.hi().clone()), (BigNum::zero(), BigNum::zero()));
        assert_eq!((c.lo().clone(), c.hi().clone()), (BigNum::one(), BigNum::one()));
        let (s, c) = sincos_deg(&rat(90, 1), 20);
        assert!(s.contains(&BigNum::one()));
        assert!(c.contains(&BigNum::zero()));
        let (s, _) = sincos_deg(&rat(30, 1), 40);
        assert!(s.contains(&"0.5".parse().unwrap()));
        assert!(s.width() < "1e-38".parse().unwrap());
        let (_, c) = sincos_deg(&rat(60, 1), 40);
        assert!(c.contains(&"0.5".parse().unwrap()));
        let (s, c) = sincos_deg(&rat(180, 1), 20);
        assert!(s.contains(&BigNum::zero()));
        assert!(c.contains(&BigNum::from_i64(-1)));
    }

    #[test]
    fn atan_of_one_is_quarter_pi() {
        let a = atan(&Interval::from_i64(1, 40));
        let q = pi(40).mul(&Interval::from_rational(&rat(1, 4), 40));
        assert!(a.overlaps(&q));
        assert!(a.width() < "1e-37".parse().unwrap());
        let b = atan(&Interval::from_i64(-1, 40));
        assert!(b.overlaps(&q.neg()));
    }

    #[test]
    fn angle_deg_quadrants() {
        let one = Interval::from_i64(1, 30);
        let zero = Interval::zero(30);
        assert!(angle_deg(&one, &one).contains(&BigNum::from_i64(45)));
        assert!(angle_deg(&one, &zero).contains(&BigNum::from_i64(90)));
        assert!(angle_deg(&one, &one.neg()).contains(&BigNum::from_i64(135)));
        assert!(angle_deg(&zero, &one).contains(&BigNum::zero()));
    }
}
