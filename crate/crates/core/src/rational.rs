//! Exact rational arithmetic helpers.
//!
//! Every decision predicate in this crate runs on arbitrary-precision
//! rationals; floats only ever appear in tests and in rendering code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Canonical rational type: reduced, positive denominator.
pub type Rational = BigRational;

/// Denominator used for all randomly sampled coordinates and shifts, so that
/// derived squared lengths stay exactly representable with small denominators.
pub const GRID_DENOM_LOG2: u32 = 20;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `n` as an exact rational.
pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Dyadic rational `n / 2^GRID_DENOM_LOG2`.
pub fn dyadic(n: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::one() << GRID_DENOM_LOG2)
}

/// Floor of a rational as a BigInt.
pub fn floor_int(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

/// Ceiling division applied to a rational: smallest integer >= x.
pub fn ceil_int(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// Exact squared Euclidean distance between two rational points.
pub fn sq_dist(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    let dx = &a.0 - &b.0;
    let dy = &a.1 - &b.1;
    &dx * &dx + &dy * &dy
}

/// Serialize a rational as an `[numerator, denominator]` pair of i128.
///
/// The library keeps all serialized rationals within i128 range; generators
/// sample on the 2^20 grid so this never fires in practice.
pub fn to_pair(x: &Rational) -> Result<(i128, i128)> {
    let n = x
        .numer()
        .to_i128()
        .ok_or_else(|| Error::InvalidInstance(format!("rational numerator {} out of range", x.numer())))?;
    let d = x
        .denom()
        .to_i128()
        .ok_or_else(|| Error::InvalidInstance(format!("rational denominator {} out of range", x.denom())))?;
    Ok((n, d))
}

/// Parse a `[numerator, denominator]` pair.
pub fn from_pair(n: i128, d: i128) -> Result<Rational> {
    if d <= 0 {
        return Err(Error::InvalidInstance(format!(
            "rational denominator must be positive, got {d}"
        )));
    }
    Ok(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

/// A dyadic floating-point interval bound: `mantissa * 2^exp`.
///
/// Used to certify strict inequalities involving huge powers (for instance
/// `((x-1)/x)^j < t` with `j` in the millions) without materializing exact
/// big integers of megabyte size. Rounding is always outward under the
/// caller's control.
#[derive(Clone, Debug)]
pub struct Dyadic {
    pub mantissa: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn from_rational_floor(x: &Rational, precision_bits: u64) -> Dyadic {
        Self::from_rational(x, precision_bits, false)
    }

    pub fn from_rational_ceil(x: &Rational, precision_bits: u64) -> Dyadic {
        Self::from_rational(x, precision_bits, true)
    }

    /// Round `x` to `precision_bits` of mantissa, toward -inf (`ceil=false`)
    /// or +inf (`ceil=true`). Only nonnegative inputs are supported.
    fn from_rational(x: &Rational, precision_bits: u64, ceil: bool) -> Dyadic {
        assert!(!x.is_negative(), "dyadic bounds only support nonnegative values");
        if x.is_zero() {
            return Dyadic { mantissa: BigInt::zero(), exp: 0 };
        }
        let num_bits = x.numer().bits() as i64;
        let den_bits = x.denom().bits() as i64;
        // Shift so the quotient carries ~precision_bits significant bits.
        let shift = precision_bits as i64 + den_bits - num_bits + 1;
        let (scaled_num, exp) = if shift >= 0 {
            (x.numer() << shift as u64, -shift)
        } else {
            (x.numer().clone(), -shift)
        };
        let den = if shift >= 0 { x.denom().clone() } else { x.denom() << (-shift) as u64 };
        let (q, r) = num_integer::Integer::div_rem(&scaled_num, &den);
        let mantissa = if ceil && !r.is_zero() { q + 1 } else { q };
        Dyadic { mantissa, exp }
    }

    fn round(mut self, precision_bits: u64, up: bool) -> Dyadic {
        let bits = self.mantissa.bits();
        if bits <= precision_bits {
            return self;
        }
        let drop = (bits - precision_bits) as i64;
        let (q, r) = num_integer::Integer::div_rem(&self.mantissa, &(BigInt::one() << drop as u64));
        self.mantissa = if up && !r.is_zero() { q + 1 } else { q };
        self.exp += drop;
        self
    }

    fn mul(&self, other: &Dyadic, precision_bits: u64, up: bool) -> Dyadic {
        let raw = Dyadic {
            mantissa: &self.mantissa * &other.mantissa,
            exp: self.exp + other.exp,
        };
        raw.round(precision_bits, up)
    }

    /// Compare `self * 2^0` against an exact rational; both nonnegative.
    fn cmp_rational(&self, x: &Rational) -> std::cmp::Ordering {
        // self = m * 2^e vs n/d  <=>  m * d * 2^e vs n
        let lhs = &self.mantissa * x.denom();
        let rhs = x.numer().clone();
        if self.exp >= 0 {
            (lhs << self.exp as u64).cmp(&rhs)
        } else {
            lhs.cmp(&(rhs << (-self.exp) as u64))
        }
    }
}

/// Certified comparison of `base^exp` against `threshold` where
/// `base = num/den` with `0 <= base`, via interval powering.
///
/// Returns `Some(true)` if provably `base^exp < threshold`, `Some(false)` if
/// provably `>=`, and retries internally with more precision until decided or
/// equality is detected exactly (then `base^exp == threshold` counts as not
/// less).
pub fn pow_lt(base: &Rational, exp: u64, threshold: &Rational) -> bool {
    assert!(!base.is_negative() && !threshold.is_negative());
    if exp == 0 {
        return Rational::one() < *threshold;
    }
    let mut precision: u64 = 96;
    loop {
        let mut lo = Dyadic::from_rational_floor(&Rational::one(), precision);
        let mut hi = lo.clone();
        let base_lo = Dyadic::from_rational_floor(base, precision);
        let base_hi = Dyadic::from_rational_ceil(base, precision);
        let mut e = exp;
        let mut sq_lo = base_lo;
        let mut sq_hi = base_hi;
        while e > 0 {
            if e & 1 == 1 {
                lo = lo.mul(&sq_lo, precision, false);
                hi = hi.mul(&sq_hi, precision, true);
            }
            e >>= 1;
            if e > 0 {
                sq_lo = sq_lo.mul(&sq_lo.clone(), precision, false);
                sq_hi = sq_hi.mul(&sq_hi.clone(), precision, true);
            }
        }
        if hi.cmp_rational(threshold) == std::cmp::Ordering::Less {
            return true;
        }
        if lo.cmp_rational(threshold) != std::cmp::Ordering::Less {
            return false;
        }
        precision *= 2;
        if precision > 1 << 16 {
            // Interval straddles the threshold at absurd precision: fall back
            // to the exact power. Only reachable for tiny exponents where the
            // power is affordable.
            let exact = num_traits::pow::Pow::pow(base.clone(), exp);
            return exact < *threshold;
        }
    }
}
