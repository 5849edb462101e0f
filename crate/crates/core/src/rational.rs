//! Exact rational helpers shared across the crate.
//!
//! Rationals cross every external boundary as `num/den` strings and floats
//! as decimals with 17 significant digits, so round-trips are lossless.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

use crate::{Error, Result};

pub use num::{BigInt as Integer, BigRational as Rational};

/// Parses `"a/b"`, a plain integer, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Contract(format!("cannot parse rational from {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Contract(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int_part = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let negative = int.starts_with('-');
        let digits = BigInt::from_str(frac).map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigRational::new(digits, scale);
        let whole = BigRational::from_integer(int_part);
        return Ok(if negative { whole - frac_part } else { whole + frac_part });
    }
    let n = BigInt::from_str(s).map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Formats a rational as `"a"` for integers, `"a/b"` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a float with 17 significant digits (lossless f64 round-trip).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `steps` equally spaced exact rationals from `a` to `b` inclusive.
/// `steps == 1` yields just `a`.
pub fn rational_linspace(a: &BigRational, b: &BigRational, steps: usize) -> Result<Vec<BigRational>> {
    if steps == 0 {
        return Err(Error::Contract("grid needs at least one point".into()));
    }
    if steps == 1 {
        return Ok(vec![a.clone()]);
    }
    let span = b - a;
    let denom = BigRational::from_integer(BigInt::from(steps as u64 - 1));
    Ok((0..steps)
        .map(|i| a + &span * BigRational::from_integer(BigInt::from(i as u64)) / &denom)
        .collect())
}

/// Parses a `"a:b:steps"` grid description into exact rationals.
pub fn parse_grid(s: &str) -> Result<Vec<BigRational>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Contract(format!("grid must be \"a:b:steps\", got {s:?}")));
    }
    let a = parse_rational(parts[0])?;
    let b = parse_rational(parts[1])?;
    let steps: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::Contract(format!("bad step count in grid {s:?}")))?;
    rational_linspace(&a, &b, steps)
}

/// Exact nonnegative power of a rational.
pub fn rational_pow(r: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= r;
    }
    acc
}

/// 2-adic valuation of a nonzero integer.
pub(crate) fn v2(x: &BigInt) -> u64 {
    debug_assert!(!x.is_zero());
    x.trailing_zeros().unwrap_or(0)
}

/// p-adic valuation of a nonzero integer for odd prime p.
pub(crate) fn vp(x: &BigInt, p: u64) -> u64 {
    debug_assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut n = x.abs();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// Odd part of a nonzero integer, sign preserved.
pub(crate) fn odd_part(x: &BigInt) -> BigInt {
    x >> v2(x)
}

/// Distinct odd prime factors of a positive machine integer.
pub(crate) fn odd_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    n >>= n.trailing_zeros().min(63);
    let mut p = 3u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Exact conversion of a rational to f64 (correctly rounded by `num`).
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Fractional part in `[0, 1)` of a nonnegative rational.
pub(crate) fn fract_nonneg(r: &BigRational) -> BigRational {
    debug_assert!(r.numer().sign() != Sign::Minus);
    r.fract()
}
