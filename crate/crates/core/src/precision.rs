//! Working-precision contract.
//!
//! Every value in the crate is a [`Real`] (an MPFR float that carries its own
//! precision in bits). A [`PrecisionContext`] fixes the decimal precision of a
//! computation, the relative tolerance used to stop series, and a hard cap on
//! the number of series terms.

use rug::float::Round;
use rug::ops::{AssignRound, Pow};
use rug::{Assign, Float, Rational};

use crate::error::{Error, Result};

/// Arbitrary-precision real number.
pub type Real = Float;

/// Smallest decimal precision a context may be created with.
pub const MIN_DIGITS: u32 = 30;

const LOG2_10_MILLI: u64 = 3322;

/// Bits needed to carry `digits` decimal digits, plus a few guard bits.
pub fn digits_to_bits(digits: u32) -> u32 {
    ((u64::from(digits) * LOG2_10_MILLI).div_ceil(1000) + 8) as u32
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionContext {
    digits: u32,
    bits: u32,
    tail_eps: Real,
    max_terms: usize,
}

impl PrecisionContext {
    /// Context with `digits` decimal digits, series tolerance `10^-(digits+5)`
    /// and a 100 000 term cap.
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Validity(format!(
                "precision of {digits} digits is below the minimum of {MIN_DIGITS}"
            )));
        }
        let bits = digits_to_bits(digits);
        let tail_eps = pow10(bits + 32, -(i64::from(digits) + 5));
        Ok(PrecisionContext {
            digits,
            bits,
            tail_eps,
            max_terms: 100_000,
        })
    }

    pub fn with_tail_eps(mut self, eps: Real) -> Result<Self> {
        if !(eps.is_sign_positive() && !eps.is_zero() && eps < 1) {
            return Err(Error::Validity(format!(
                "tail tolerance must lie in (0, 1), got {}",
                eps.to_string_radix(10, Some(6))
            )));
        }
        self.tail_eps = eps;
        Ok(self)
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::Validity("max_terms must be positive".into()));
        }
        self.max_terms = max_terms;
        Ok(self)
    }

    /// Same term cap, different decimal precision. The tail tolerance is the
    /// tighter of this context's and the default for `digits`, so a series is
    /// never summed less accurately than the new precision can carry.
    pub fn with_digits(&self, digits: u32) -> Result<Self> {
        let mut ctx = PrecisionContext::new(digits)?;
        ctx.max_terms = self.max_terms;
        if self.tail_eps < ctx.tail_eps {
            ctx.tail_eps = Float::with_val(ctx.bits + 32, &self.tail_eps);
        }
        Ok(ctx)
    }

    /// Internal working context: `extra` more bits, same reported digits.
    pub fn guarded(&self, extra: u32) -> Self {
        let mut ctx = self.clone();
        ctx.bits += extra;
        ctx
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn tail_eps(&self) -> &Real {
        &self.tail_eps
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn real<T>(&self, v: T) -> Real
    where
        Real: Assign<T>,
    {
        Float::with_val(self.bits, v)
    }

    pub fn zero(&self) -> Real {
        Float::new(self.bits)
    }

    pub fn one(&self) -> Real {
        self.real(1)
    }

    pub fn rational(&self, q: &Rational) -> Real {
        Float::with_val(self.bits, q)
    }

    pub fn pi(&self) -> Real {
        self.real(rug::float::Constant::Pi)
    }

    /// `10^-(digits - loss)`: the tolerance after allowing `loss` digits of cancellation.
    pub fn tolerance(&self, loss: u32) -> Real {
        pow10(self.bits, -(i64::from(self.digits) - i64::from(loss)))
    }

    /// Rounds `x` to this context's precision.
    pub fn round(&self, x: &Real) -> Real {
        let mut y = self.zero();
        y.assign_round(x, Round::Nearest);
        y
    }
}

/// `10^e` at `bits` precision.
pub fn pow10(bits: u32, e: i64) -> Real {
    let ten = Float::with_val(bits, 10);
    ten.pow(e)
}

/// `|x - y| / max(|x|, |y|, 1)`: relative for large values, absolute near zero.
pub fn rel_diff(x: &Real, y: &Real) -> Real {
    let prec = x.prec().max(y.prec());
    let d = Float::with_val(prec, x - y).abs();
    let mut scale = Float::with_val(prec, x.abs_ref());
    scale.max_mut(&Float::with_val(prec, y.abs_ref()));
    if scale > 1 {
        d / scale
    } else {
        d
    }
}

/// `|x - reference| / |reference|`.
pub fn rel_err(x: &Real, reference: &Real) -> Real {
    let prec = x.prec().max(reference.prec());
    let d = Float::with_val(prec, x - reference).abs();
    if reference.is_zero() {
        d
    } else {
        d / Float::with_val(prec, reference.abs_ref())
    }
}

/// Decimal string with `sig` significant digits (`0` for exact zero).
pub fn to_decimal(x: &Real, sig: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(sig.max(1)))
}

/// Rough base-10 magnitude of a nonzero value, for reporting only.
pub fn log10_abs(x: &Real) -> i64 {
    if x.is_zero() {
        return i64::MIN;
    }
    let l = Float::with_val(64, x.abs_ref()).log10();
    l.to_f64().floor() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(29).is_err());
        assert!(PrecisionContext::new(30).is_ok());
    }

    #[test]
    fn bits_cover_digits() {
        for d in [30u32, 60, 400, 1400] {
            let b = digits_to_bits(d);
            assert!(f64::from(b) >= f64::from(d) * std::f64::consts::LOG2_10);
        }
    }

    #[test]
    fn tail_eps_bounds() {
        let ctx = PrecisionContext::new(40).unwrap();
        assert!(ctx.clone().with_tail_eps(ctx.real(0)).is_err());
        assert!(ctx.clone().with_tail_eps(ctx.real(1)).is_err());
        assert!(ctx.clone().with_tail_eps(ctx.real(1e-50)).is_ok());
    }

    #[test]
    fn with_digits_never_loosens_the_tail() {
        let ctx = PrecisionContext::new(40).unwrap();
        let up = ctx.with_digits(400).unwrap();
        assert!(*up.tail_eps() < pow10(up.bits(), -400));
        let tight = ctx.clone().with_tail_eps(pow10(200, -60)).unwrap();
        assert!(*tight.with_digits(50).unwrap().tail_eps() < 1.001e-60);
    }

    #[test]
    fn tolerance_is_power_of_ten() {
        let ctx = PrecisionContext::new(50).unwrap();
        let t = ctx.tolerance(5);
        let expect = pow10(ctx.bits(), -45);
        assert!(rel_diff(&t, &expect) < 1e-40);
    }

    #[test]
    fn exact_zero_and_rationals() {
        let ctx = PrecisionContext::new(30).unwrap();
        assert!(ctx.zero().is_zero());
        let third = ctx.rational(&Rational::from((1, 3)));
        let back = Float::with_val(ctx.bits(), &third * 3u32);
        assert!(rel_diff(&back, &ctx.one()) < 1e-30);
    }
}
