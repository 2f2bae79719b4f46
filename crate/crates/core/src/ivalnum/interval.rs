use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use serde::ser::SerializeTuple;
use thiserror::Error;

use super::bignum::{BigNum, Rounding};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IvalError {
    /// The divisor interval is not certainly nonzero; more digits are needed.
    #[error("divisor interval straddles zero")]
    DivisorStraddlesZero,
    /// The whole radicand is negative: no real root exists.
    #[error("radicand is certainly negative")]
    CertainlyNegativeRadicand,
    /// Radicand `[lo, hi]` with `lo < 0 <= hi` under the strict policy.
    #[error("radicand has a negative lower endpoint")]
    NegativeLowerRadicand,
    #[error("interval endpoints out of order: {lo} > {hi}")]
    Inverted { lo: String, hi: String },
}

/// Certified sign of an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SignVerdict {
    CertainlyNegative,
    CertainlyZero,
    CertainlyPositive,
    Indeterminate,
}

impl SignVerdict {
    /// `Some(±1 / 0)` when certain.
    pub fn certain(self) -> Option<i32> {
        match self {
            SignVerdict::CertainlyNegative => Some(-1),
            SignVerdict::CertainlyZero => Some(0),
            SignVerdict::CertainlyPositive => Some(1),
            SignVerdict::Indeterminate => None,
        }
    }

    /// Nonzero and certain.
    pub fn strict(self) -> Option<i32> {
        self.certain().filter(|s| *s != 0)
    }

    pub fn flip(self) -> Self {
        match self {
            SignVerdict::CertainlyNegative => SignVerdict::CertainlyPositive,
            SignVerdict::CertainlyPositive => SignVerdict::CertainlyNegative,
            v => v,
        }
    }
}

/// How `sqrt` treats a radicand whose lower endpoint is negative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SqrtPolicy {
    /// Fail with [`IvalError::NegativeLowerRadicand`].
    #[default]
    Strict,
    /// Clamp the radicand to `[0, hi]` and report it.
    Clamp,
}

/// Result of a square root under [`SqrtPolicy::Clamp`].
#[derive(Clone, Debug)]
pub struct SqrtOutcome {
    pub value: Interval,
    /// The radicand's lower endpoint was negative and got clamped to zero.
    pub negative_lower: bool,
}

/// Closed interval `[lo, hi]` with decimal endpoints rounded outward to
/// `prec` significant digits after every operation.
///
/// Equality compares endpoints only.
#[derive(Clone, Debug)]
pub struct Interval {
    lo: BigNum,
    hi: BigNum,
    prec: u32,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.lo == other.lo && self.hi == other.hi
    }
}

impl Eq for Interval {}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    NonNeg,
    NonPos,
    Mixed,
}

impl Interval {
    /// Interval with the given endpoints, rounded outward to `prec` digits.
    pub fn new(lo: BigNum, hi: BigNum, prec: u32) -> Result<Self, IvalError> {
        if lo > hi {
            return Err(IvalError::Inverted { lo: lo.to_string(), hi: hi.to_string() });
        }
        Ok(Self::outward(lo, hi, prec))
    }

    fn outward(lo: BigNum, hi: BigNum, prec: u32) -> Self {
        debug_assert!(prec > 0);
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo: lo.round(prec, Rounding::Down), hi: hi.round(prec, Rounding::Up), prec }
    }

    /// Smallest enclosure of an exact value.
    pub fn point(v: BigNum, prec: u32) -> Self {
        Self::outward(v.clone(), v, prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(BigNum::zero(), prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::point(BigNum::from_i64(v), prec)
    }

    /// Smallest representable enclosure of `p/q`.
    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Interval {
            lo: BigNum::from_rational(r, prec, Rounding::Down),
            hi: BigNum::from_rational(r, prec, Rounding::Up),
            prec,
        }
    }

    pub fn lo(&self) -> &BigNum {
        &self.lo
    }

    pub fn hi(&self) -> &BigNum {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Re-rounds the endpoints outward to `prec` digits.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::outward(self.lo.clone(), self.hi.clone(), prec)
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Self {
        Interval {
            lo: BigNum::min(&self.lo, &other.lo).clone(),
            hi: BigNum::max(&self.hi, &other.hi).clone(),
            prec: self.prec.max(other.prec),
        }
    }

    /// `self` widened by `[-r, r]` for `r >= 0`.
    pub fn inflate(&self, r: &BigNum) -> Self {
        let p = self.prec;
        Interval {
            lo: BigNum::sub_round(&self.lo, r, p, Rounding::Down),
            hi: BigNum::add_round(&self.hi, r, p, Rounding::Up),
            prec: p,
        }
    }

    pub fn contains(&self, v: &BigNum) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        &self.lo.to_rational() <= r && r <= &self.hi.to_rational()
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// `hi - lo`, rounded up.
    pub fn width(&self) -> BigNum {
        BigNum::sub_round(&self.hi, &self.lo, self.prec, Rounding::Up)
    }

    /// Approximate midpoint (not certified).
    pub fn mid(&self) -> BigNum {
        BigNum::add_round(&self.lo, &self.hi, self.prec + 2, Rounding::Down).half()
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn sign(&self) -> SignVerdict {
        match (self.lo.signum(), self.hi.signum()) {
            (0, 0) => SignVerdict::CertainlyZero,
            (1, _) => SignVerdict::CertainlyPositive,
            (_, -1) => SignVerdict::CertainlyNegative,
            _ => SignVerdict::Indeterminate,
        }
    }

    fn class(&self) -> Class {
        if self.lo.signum() >= 0 {
            Class::NonNeg
        } else if self.hi.signum() <= 0 {
            Class::NonPos
        } else {
            Class::Mixed
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        let p = self.prec.max(other.prec);
        Interval {
            lo: BigNum::add_round(&self.lo, &other.lo, p, Rounding::Down),
            hi: BigNum::add_round(&self.hi, &other.hi, p, Rounding::Up),
            prec: p,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        let p = self.prec.max(other.prec);
        Interval {
            lo: BigNum::sub_round(&self.lo, &other.hi, p, Rounding::Down),
            hi: BigNum::sub_round(&self.hi, &other.lo, p, Rounding::Up),
            prec: p,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg(), prec: self.prec }
    }

    pub fn abs(&self) -> Interval {
        match self.class() {
            Class::NonNeg => self.clone(),
            Class::NonPos => self.neg(),
            Class::Mixed => Interval {
                lo: BigNum::zero(),
                hi: BigNum::max(&self.lo.abs(), &self.hi).clone(),
                prec: self.prec,
            },
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        use Class::*;
        let p = self.prec.max(other.prec);
        let (al, ah, bl, bh) = (&self.lo, &self.hi, &other.lo, &other.hi);
        let lo_hi = |x: &BigNum, y: &BigNum, z: &BigNum, w: &BigNum| Interval {
            lo: BigNum::mul_round(x, y, p, Rounding::Down),
            hi: BigNum::mul_round(z, w, p, Rounding::Up),
            prec: p,
        };
        match (self.class(), other.class()) {
            (NonNeg, NonNeg) => lo_hi(al, bl, ah, bh),
            (NonNeg, NonPos) => lo_hi(ah, bl, al, bh),
            (NonNeg, Mixed) => lo_hi(ah, bl, ah, bh),
            (NonPos, NonNeg) => lo_hi(al, bh, ah, bl),
            (NonPos, NonPos) => lo_hi(ah, bh, al, bl),
            (NonPos, Mixed) => lo_hi(al, bh, al, bl),
            (Mixed, NonNeg) => lo_hi(al, bh, ah, bh),
            (Mixed, NonPos) => lo_hi(ah, bl, al, bl),
            (Mixed, Mixed) => {
                let lo1 = BigNum::mul_round(al, bh, p, Rounding::Down);
                let lo2 = BigNum::mul_round(ah, bl, p, Rounding::Down);
                let hi1 = BigNum::mul_round(al, bl, p, Rounding::Up);
                let hi2 = BigNum::mul_round(ah, bh, p, Rounding::Up);
                Interval { lo: BigNum::min(&lo1, &lo2).clone(), hi: BigNum::max(&hi1, &hi2).clone(), prec: p }
            }
        }
    }

    /// `x²` for `x` in the interval; tighter than `self.mul(self)`.
    pub fn square(&self) -> Interval {
        let p = self.prec;
        match self.class() {
            Class::NonNeg => Interval {
                lo: BigNum::mul_round(&self.lo, &self.lo, p, Rounding::Down),
                hi: BigNum::mul_round(&self.hi, &self.hi, p, Rounding::Up),
                prec: p,
            },
            Class::NonPos => self.neg().square(),
            Class::Mixed => {
                let m = BigNum::max(&self.lo.abs(), &self.hi).clone();
                Interval { lo: BigNum::zero(), hi: BigNum::mul_round(&m, &m, p, Rounding::Up), prec: p }
            }
        }
    }

    /// Multiplication by an exact integer.
    pub fn scale(&self, k: i64) -> Interval {
        self.mul(&Interval::from_i64(k, self.prec))
    }

    pub fn div(&self, other: &Interval) -> Result<Interval, IvalError> {
        use Class::*;
        let p = self.prec.max(other.prec);
        let (al, ah, bl, bh) = (&self.lo, &self.hi, &other.lo, &other.hi);
        let q = |x: &BigNum, y: &BigNum, z: &BigNum, w: &BigNum| Interval {
            lo: BigNum::div_round(x, y, p, Rounding::Down),
            hi: BigNum::div_round(z, w, p, Rounding::Up),
            prec: p,
        };
        match other.sign() {
            SignVerdict::CertainlyPositive => Ok(match self.class() {
                NonNeg => q(al, bh, ah, bl),
                NonPos => q(al, bl, ah, bh),
                Mixed => q(al, bl, ah, bl),
            }),
            SignVerdict::CertainlyNegative => Ok(match self.class() {
                NonNeg => q(ah, bh, al, bl),
                NonPos => q(ah, bl, al, bh),
                Mixed => q(ah, bh, al, bh),
            }),
            _ => Err(IvalError::DivisorStraddlesZero),
        }
    }

    /// Certified square root under the strict policy.
    pub fn sqrt(&self) -> Result<Interval, IvalError> {
        self.sqrt_with(SqrtPolicy::Strict).map(|o| o.value)
    }

    pub fn sqrt_with(&self, policy: SqrtPolicy) -> Result<SqrtOutcome, IvalError> {
        if self.hi.is_negative() {
            return Err(IvalError::CertainlyNegativeRadicand);
        }
        let negative_lower = self.lo.is_negative();
        if negative_lower && policy == SqrtPolicy::Strict {
            return Err(IvalError::NegativeLowerRadicand);
        }
        let p = self.prec;
        let lo = if negative_lower { BigNum::zero() } else { BigNum::sqrt_round(&self.lo, p, Rounding::Down) };
        let hi = BigNum::sqrt_round(&self.hi, p, Rounding::Up);
        Ok(SqrtOutcome { value: Interval { lo, hi, prec: p }, negative_lower })
    }

    /// Lower and upper endpoints as directed `f64` bounds.
    pub fn to_f64_bounds(&self) -> (f64, f64) {
        (self.lo.to_f64_directed(Rounding::Down), self.hi.to_f64_directed(Rounding::Up))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Interval> for &Interval {
            type Output = Interval;
            fn $m(self, rhs: &Interval) -> Interval {
                Interval::$m(self, rhs)
            }
        }
        impl $tr<Interval> for Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                Interval::$m(&self, &rhs)
            }
        }
        impl $tr<&Interval> for Interval {
            type Output = Interval;
            fn $m(self, rhs: &Interval) -> Interval {
                Interval::$m(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::neg(self)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::neg(&self)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl serde::Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&self.lo)?;
        t.serialize_element(&self.hi)?;
        t.end()
    }
}

impl<'de> serde::Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (lo, hi): (BigNum, BigNum) = serde::Deserialize::deserialize(d)?;
        if lo > hi {
            return Err(serde::de::Error::custom(format!("inverted interval [{lo}, {hi}]")));
        }
        // precision is implied by the stored endpoints
        let prec = lo.digits().max(hi.digits()).max(1) as u32;
        Ok(Interval { lo, hi, prec })
    }
}
