//! Arbitrary-precision interval arithmetic with outward rounding.
//!
//! Every [`Interval`] operation returns an interval containing the exact
//! real result for any reals drawn from the operands. Endpoints are decimal
//! [`BigNum`]s rounded outward to the interval's working precision, counted
//! in significant decimal digits.

mod bignum;
mod interval;
pub mod trig;

pub use bignum::{exact_decimal, BigNum, ParseBigNumError, Rounding};
pub use interval::{Interval, IvalError, SignVerdict, SqrtOutcome, SqrtPolicy};
pub use trig::{pi, sincos_deg};
