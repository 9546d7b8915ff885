//! Exact arithmetic: arbitrary-precision rationals, cyclotomic fields in the
//! power basis, and exact span membership by Gaussian elimination.
//!
//! - [`Rational`]: reduced `BigRational`, the base field for every expansion.
//! - [`cyclotomic`]: `Q(ζ_m)` modulo the m-th cyclotomic polynomial.
//! - [`linalg`]: exact `in_span` solvers (no floating point anywhere).
//! - [`Field`]: the coefficient trait the series layer is generic over.

pub mod cyclotomic;
mod field;
pub mod linalg;
pub mod poly;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use cyclotomic::{cyclotomic_polynomial, CyclotomicField, CyclotomicNumber};
pub use field::Field;
pub use linalg::{in_span, in_span_rational_basis, Echelon, RationalEchelon};

/// Exact rational number, always stored in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// `n/d` as a reduced rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Fractional part `x - floor(x)`, in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// `floor(x)` as a `BigInt`.
pub fn floor_int(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_int(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// Parses `"a"`, `"-a/b"` or `"a/b"` (whitespace and a unicode minus are tolerated).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let cleaned: String = s
        .trim()
        .chars()
        .map(|c| if c == '\u{2212}' { '-' } else { c })
        .collect();
    let (num, den) = match cleaned.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (cleaned.as_str(), "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::parse(0, format!("invalid numerator {num:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::parse(num.len() + 1, format!("invalid denominator {den:?}")))?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational::new(n, d))
}

/// `"a"` for integers, `"a/b"` otherwise. Inverse of [`parse_rational`].
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Lower and upper rational bounds on `sqrt(x)` with `upper - lower <= 1/scale`.
pub fn sqrt_bracket(x: &Rational, scale: u64) -> (Rational, Rational) {
    nth_root_bracket(x, 2, scale)
}

/// Lower and upper rational bounds on `x^(1/n)` for `x >= 0`, width at most `1/scale`.
pub fn nth_root_bracket(x: &Rational, n: u32, scale: u64) -> (Rational, Rational) {
    assert!(!x.is_negative(), "root of a negative number");
    assert!(n >= 1);
    // floor((x * scale^n)^(1/n)) computed on the integer part of the scaled value.
    let s = BigInt::from(scale);
    let scaled = x * Rational::from_integer(num_traits::pow(s.clone(), n as usize));
    let floor_scaled = scaled.floor().to_integer();
    let mut lo = num_integer::Roots::nth_root(&floor_scaled, n);
    // Nudge in case of rounding in the integer root.
    while num_traits::pow(lo.clone() + 1, n as usize) <= floor_scaled {
        lo += 1;
    }
    let lower = Rational::new(lo.clone(), s.clone());
    let upper = Rational::new(lo + 1, s);
    debug_assert!(num_traits::pow(lower.clone(), n as usize) <= *x);
    debug_assert!(num_traits::pow(upper.clone(), n as usize) >= *x);
    (lower, upper)
}

/// Smallest prime divisor of `n >= 2`.
pub fn smallest_prime_factor(n: u64) -> u64 {
    assert!(n >= 2);
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return p;
        }
        p += 1;
    }
    n
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}
