//! Signed decimal floating-point numbers with arbitrary-size mantissa.
//!
//! A [`BigNum`] is an exact value `±mag · 10^exp`. Every arithmetic routine
//! takes a target number of significant digits and a [`Rounding`] direction,
//! and returns the exact result rounded in that direction. Interval endpoints
//! are produced exclusively through these routines.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Direction for rounding an exact result to the working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

impl Rounding {
    /// The opposite direction.
    pub fn flip(self) -> Self {
        match self {
            Rounding::Down => Rounding::Up,
            Rounding::Up => Rounding::Down,
        }
    }

    /// Whether the magnitude of a value with sign `neg` moves away from zero.
    fn away(self, neg: bool) -> bool {
        matches!((self, neg), (Rounding::Up, false) | (Rounding::Down, true))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid decimal literal: {0:?}")]
pub struct ParseBigNumError(pub String);

const POW10_CACHE_LIMIT: u64 = 32_768;

thread_local! {
    static POW10: RefCell<Vec<Rc<BigUint>>> = RefCell::new(vec![Rc::new(BigUint::one())]);
}

/// `10^k`, memoised per thread.
pub(crate) fn pow10(k: u64) -> Rc<BigUint> {
    if k > POW10_CACHE_LIMIT {
        return Rc::new(BigUint::from(10u32).pow(k as u32));
    }
    POW10.with(|cache| {
        let mut cache = cache.borrow_mut();
        while cache.len() as u64 <= k {
            let next = cache.last().unwrap().as_ref() * 10u32;
            cache.push(Rc::new(next));
        }
        Rc::clone(&cache[k as usize])
    })
}

/// Number of decimal digits of `m` (zero has zero digits).
pub(crate) fn digit_count(m: &BigUint) -> u64 {
    if m.is_zero() {
        return 0;
    }
    let bits = m.bits();
    // floor((bits - 1) * log10(2)) + 1 is either the digit count or one short
    let est = ((bits - 1) as f64 * std::f64::consts::LOG10_2).floor() as u64 + 1;
    if *m >= *pow10(est) {
        est + 1
    } else {
        est
    }
}

fn div_directed(num: &BigUint, den: &BigUint, away: bool) -> BigUint {
    let (q, r) = num.div_rem(den);
    if away && !r.is_zero() {
        q + 1u32
    } else {
        q
    }
}

/// Exact decimal value `(-1)^neg · mag · 10^exp`.
#[derive(Clone, Debug)]
pub struct BigNum {
    neg: bool,
    mag: BigUint,
    exp: i64,
}

impl BigNum {
    pub fn zero() -> Self {
        BigNum { neg: false, mag: BigUint::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_parts(v < 0, BigUint::from(v.unsigned_abs()), 0)
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Self::from_parts(v.sign() == Sign::Minus, v.magnitude().clone(), 0)
    }

    /// Builds `(-1)^neg · mag · 10^exp`, canonicalising zero.
    pub fn from_parts(neg: bool, mag: BigUint, exp: i64) -> Self {
        if mag.is_zero() {
            Self::zero()
        } else {
            BigNum { neg, mag, exp }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mag.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.neg {
            -1
        } else {
            1
        }
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mag
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Significant decimal digits currently stored (zero for zero).
    pub fn digits(&self) -> u64 {
        digit_count(&self.mag)
    }

    /// Decimal order: `|self| < 10^order`, and `|self| >= 10^(order-1)`.
    fn order(&self) -> i64 {
        self.exp + self.digits() as i64
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(!self.neg, self.mag.clone(), self.exp)
    }

    pub fn abs(&self) -> Self {
        Self::from_parts(false, self.mag.clone(), self.exp)
    }

    /// Rounds to at most `prec` significant digits in direction `mode`.
    pub fn round(&self, prec: u32, mode: Rounding) -> Self {
        let d = self.digits();
        if d <= prec as u64 {
            return self.clone();
        }
        let drop = d - prec as u64;
        let mut mag = div_directed(&self.mag, &pow10(drop), mode.away(self.neg));
        let mut exp = self.exp + drop as i64;
        // ceiling can carry into an extra digit: 999.. -> 1000..
        if mag == *pow10(prec as u64) {
            mag = pow10(prec as u64 - 1).as_ref().clone();
            exp += 1;
        }
        Self::from_parts(self.neg, mag, exp)
    }

    /// Magnitude of `self` rescaled to exponent `e <= self.exp`.
    fn mag_at(&self, e: i64) -> BigUint {
        debug_assert!(e <= self.exp);
        if e == self.exp {
            self.mag.clone()
        } else {
            &self.mag * pow10((self.exp - e) as u64).as_ref()
        }
    }

    fn add_exact(a: &BigNum, b: &BigNum) -> BigNum {
        let e = a.exp.min(b.exp);
        let (ma, mb) = (a.mag_at(e), b.mag_at(e));
        if a.neg == b.neg {
            BigNum::from_parts(a.neg, ma + mb, e)
        } else {
            match ma.cmp(&mb) {
                Ordering::Equal => BigNum::zero(),
                Ordering::Greater => BigNum::from_parts(a.neg, ma - mb, e),
                Ordering::Less => BigNum::from_parts(b.neg, mb - ma, e),
            }
        }
    }

    /// `a + b` rounded to `prec` digits.
    pub fn add_round(a: &BigNum, b: &BigNum, prec: u32, mode: Rounding) -> BigNum {
        if a.is_zero() {
            return b.round(prec, mode);
        }
        if b.is_zero() {
            return a.round(prec, mode);
        }
        let (big, small) = if a.order() >= b.order() { (a, b) } else { (b, a) };
        // 10^grain divides `big` and every representable result near it; a
        // term below 10^(grain-2) only acts as a sticky digit, even when the
        // sum drops below a power of ten and the result grid refines by 10.
        let grain = big.exp.min(big.order() - prec as i64);
        if small.order() <= grain - 2 {
            let sticky = BigNum::from_parts(small.neg, BigUint::one(), grain - 2);
            return BigNum::add_exact(big, &sticky).round(prec, mode);
        }
        BigNum::add_exact(a, b).round(prec, mode)
    }

    pub fn sub_round(a: &BigNum, b: &BigNum, prec: u32, mode: Rounding) -> BigNum {
        BigNum::add_round(a, &b.neg(), prec, mode)
    }

    /// Exact product (no rounding).
    pub fn mul_exact(a: &BigNum, b: &BigNum) -> BigNum {
        BigNum::from_parts(a.neg != b.neg, &a.mag * &b.mag, a.exp + b.exp)
    }

    pub fn mul_round(a: &BigNum, b: &BigNum, prec: u32, mode: Rounding) -> BigNum {
        BigNum::mul_exact(a, b).round(prec, mode)
    }

    /// `a / b` rounded to `prec` digits. Panics if `b` is zero.
    pub fn div_round(a: &BigNum, b: &BigNum, prec: u32, mode: Rounding) -> BigNum {
        assert!(!b.is_zero(), "BigNum division by zero");
        if a.is_zero() {
            return BigNum::zero();
        }
        let neg = a.neg != b.neg;
        let shift = (prec as i64 + 2 + b.digits() as i64 - a.digits() as i64).max(0) as u64;
        let num = &a.mag * pow10(shift).as_ref();
        let q = div_directed(&num, &b.mag, mode.away(neg));
        BigNum::from_parts(neg, q, a.exp - b.exp - shift as i64).round(prec, mode)
    }

    /// `sqrt(a)` rounded to `prec` digits. Panics if `a` is negative.
    pub fn sqrt_round(a: &BigNum, prec: u32, mode: Rounding) -> BigNum {
        assert!(!a.neg, "BigNum square root of a negative value");
        if a.is_zero() {
            return BigNum::zero();
        }
        let want = 2 * (prec as i64 + 2);
        let mut shift = (want - a.digits() as i64).max(0);
        if (a.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let radicand = &a.mag * pow10(shift as u64).as_ref();
        let mut root = radicand.sqrt();
        if mode == Rounding::Up && &root * &root != radicand {
            root += 1u32;
        }
        BigNum::from_parts(false, root, (a.exp - shift) / 2).round(prec, mode)
    }

    /// Smallest representable enclosure endpoint of an exact rational.
    pub fn from_rational(r: &BigRational, prec: u32, mode: Rounding) -> BigNum {
        let num = BigNum::from_bigint(r.numer());
        let den = BigNum::from_bigint(r.denom());
        BigNum::div_round(&num, &den, prec, mode)
    }

    /// Exact conversion to a rational.
    pub fn to_rational(&self) -> BigRational {
        let m = BigInt::from_biguint(if self.neg { Sign::Minus } else { Sign::Plus }, self.mag.clone());
        if self.exp >= 0 {
            let scale = BigInt::from(pow10(self.exp as u64).as_ref().clone());
            BigRational::from_integer(m * scale)
        } else {
            let scale = BigInt::from(pow10((-self.exp) as u64).as_ref().clone());
            BigRational::new(m, scale)
        }
    }

    /// Nearest `f64` (via correctly rounded decimal parsing).
    pub fn to_f64(&self) -> f64 {
        let r = self.round(17, Rounding::Down);
        let s = format!("{}{}e{}", if r.neg { "-" } else { "" }, r.mag, r.exp);
        s.parse().unwrap_or(f64::NAN)
    }

    /// `f64` that is certainly `<=` (Down) or `>=` (Up) this value.
    pub fn to_f64_directed(&self, mode: Rounding) -> f64 {
        let v = self.to_f64();
        match mode {
            Rounding::Down => v.next_down(),
            Rounding::Up => v.next_up(),
        }
    }

    pub fn half(&self) -> BigNum {
        // x/2 = 5x/10, exact
        BigNum::from_parts(self.neg, &self.mag * 5u32, self.exp - 1)
    }

    pub fn min<'a>(a: &'a BigNum, b: &'a BigNum) -> &'a BigNum {
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn max<'a>(a: &'a BigNum, b: &'a BigNum) -> &'a BigNum {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn cmp_mag(&self, other: &BigNum) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        match self.order().cmp(&other.order()) {
            Ordering::Equal => {
                let e = self.exp.min(other.exp);
                self.mag_at(e).cmp(&other.mag_at(e))
            }
            o => o,
        }
    }
}

impl PartialEq for BigNum {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for BigNum {}

impl PartialOrd for BigNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigNum {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.signum().cmp(&other.signum()) {
            Ordering::Equal => {
                let m = self.cmp_mag(other);
                if self.neg {
                    m.reverse()
                } else {
                    m
                }
            }
            o => o,
        }
    }
}

impl From<i64> for BigNum {
    fn from(v: i64) -> Self {
        BigNum::from_i64(v)
    }
}

/// Scientific form `-1.2345e-10`; zero prints as `0e0`. Round-trips exactly.
impl fmt::Display for BigNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0e0");
        }
        let digits = self.mag.to_string();
        let sci_exp = self.exp + digits.len() as i64 - 1;
        let (head, tail) = digits.split_at(1);
        let tail = tail.trim_end_matches('0');
        let sign = if self.neg { "-" } else { "" };
        if tail.is_empty() {
            write!(f, "{sign}{head}e{sci_exp}")
        } else {
            write!(f, "{sign}{head}.{tail}e{sci_exp}")
        }
    }
}

impl FromStr for BigNum {
    type Err = ParseBigNumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseBigNumError(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (coef, exp_part) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], Some(&body[i + 1..])),
            None => (body, None),
        };
        let mut exp: i64 = match exp_part {
            Some(e) => e.parse().map_err(|_| err())?,
            None => 0,
        };
        let (int_part, frac_part) = match coef.split_once('.') {
            Some((i, fr)) => (i, fr),
            None => (coef, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        exp -= frac_part.len() as i64;
        let all = format!("{int_part}{frac_part}");
        let mag = BigUint::from_str(&all).map_err(|_| err())?;
        Ok(BigNum::from_parts(neg, mag, exp))
    }
}

impl serde::Serialize for BigNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BigNum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact `BigNum` for a rational whose denominator divides a power of ten.
pub fn exact_decimal(r: &BigRational) -> Option<BigNum> {
    let den = r.denom().abs();
    let mut d = den.clone();
    let mut twos = 0u64;
    let mut fives = 0u64;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return None;
    }
    let k = twos.max(fives);
    let scaled = r * BigRational::from_integer(BigInt::from(pow10(k).as_ref().clone()));
    let n = scaled.to_integer();
    Some(BigNum::from_parts(n.is_negative(), n.magnitude().clone(), -(k as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bn(s: &str) -> BigNum {
        s.parse().unwrap()
    }

    #[test]
    fn digit_count_boundaries() {
        assert_eq!(digit_count(&BigUint::from(9u32)), 1);
        assert_eq!(digit_count(&BigUint::from(10u32)), 2);
        assert_eq!(digit_count(&BigUint::from(999_999u32)), 6);
        assert_eq!(digit_count(&BigUint::from(1_000_000u32)), 7);
        let big = pow10(300).as_ref().clone();
        assert_eq!(digit_count(&big), 301);
        assert_eq!(digit_count(&(big - 1u32)), 300);
    }

    #[test]
    fn directed_rounding_of_thirds() {
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(BigNum::from_rational(&third, 4, Rounding::Down), bn("0.3333"));
        assert_eq!(BigNum::from_rational(&third, 4, Rounding::Up), bn("0.3334"));
        let m = -third;
        assert_eq!(BigNum::from_rational(&m, 4, Rounding::Down), bn("-0.3334"));
        assert_eq!(BigNum::from_rational(&m, 4, Rounding::Up), bn("-0.3333"));
    }

    #[test]
    fn round_carries_into_new_digit() {
        let r = bn("9.9999").round(3, Rounding::Up);
        assert_eq!(r, bn("10"));
        assert!(r.digits() <= 3);
    }

    #[test]
    fn sticky_addition_of_tiny_terms() {
        let one = BigNum::one();
        let tiny = bn("1e-500");
        assert_eq!(BigNum::add_round(&one, &tiny, 10, Rounding::Down), one);
        assert_eq!(BigNum::add_round(&one, &tiny, 10, Rounding::Up), bn("1.000000001"));
        // crossing below a power of ten refines the grid
        let thousand = bn("1000");
        let up = BigNum::add_round(&thousand, &tiny.neg(), 4, Rounding::Up);
        assert_eq!(up, thousand);
        let down = BigNum::add_round(&thousand, &tiny.neg(), 4, Rounding::Down);
        assert_eq!(down, bn("999.9"));
        assert_eq!(BigNum::add_round(&one, &tiny.neg(), 10, Rounding::Down), bn("0.9999999999"));
        assert_eq!(BigNum::add_round(&one, &tiny.neg(), 10, Rounding::Up), one);
        // big operand with more digits than the target precision
        let long = bn("1.23456789012345");
        let lo = BigNum::add_round(&long, &tiny, 5, Rounding::Down);
        let hi = BigNum::add_round(&long, &tiny, 5, Rounding::Up);
        assert_eq!(lo, bn("1.2345"));
        assert_eq!(hi, bn("1.2346"));
    }

    #[test]
    fn sqrt_brackets_root_two() {
        let two = BigNum::from_i64(2);
        let lo = BigNum::sqrt_round(&two, 30, Rounding::Down);
        let hi = BigNum::sqrt_round(&two, 30, Rounding::Up);
        assert!(BigNum::mul_exact(&lo, &lo) < two);
        assert!(BigNum::mul_exact(&hi, &hi) > two);
        assert_eq!(lo.to_string(), "1.4142135623730950488016887242e0");
        let four = BigNum::from_i64(4);
        assert_eq!(BigNum::sqrt_round(&four, 8, Rounding::Down), BigNum::from_i64(2));
        assert_eq!(BigNum::sqrt_round(&four, 8, Rounding::Up), BigNum::from_i64(2));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(bn("-1.2345e-10").to_string(), "-1.2345e-10");
        assert_eq!(bn("0").to_string(), "0e0");
        assert_eq!(bn("-0.0").to_string(), "0e0");
        assert_eq!(bn("1500").to_string(), "1.5e3");
        assert_eq!(bn(".5"), bn("5e-1"));
        assert!("".parse::<BigNum>().is_err());
        assert!("1.2.3".parse::<BigNum>().is_err());
        assert!("abc".parse::<BigNum>().is_err());
    }

    #[test]
    fn ordering_across_exponents() {
        assert!(bn("1e5") > bn("99999"));
        assert!(bn("-1e5") < bn("-99999"));
        assert_eq!(bn("1.50"), bn("15e-1"));
        assert!(bn("-0.001") < BigNum::zero());
    }

    #[test]
    fn exact_decimals() {
        let r = BigRational::new(3.into(), 8.into());
        assert_eq!(exact_decimal(&r), Some(bn("0.375")));
        assert_eq!(exact_decimal(&BigRational::new(1.into(), 3.into())), None);
    }

    #[test]
    fn to_f64_directed_brackets() {
        let v = bn("0.1");
        assert!(v.to_f64_directed(Rounding::Down) < 0.1);
        assert!(v.to_f64_directed(Rounding::Up) > 0.1);
    }
}
