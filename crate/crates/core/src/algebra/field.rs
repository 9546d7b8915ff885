use std::fmt::Debug;

use num_traits::{One, Zero};

use super::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// Exact coefficient field for series and linear algebra.
///
/// `Ctx` carries whatever is needed to build constants (nothing for `Q`,
/// the field handle for `Q(ζ_m)`), so a zero series still knows its field.
pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    type Ctx: Clone + PartialEq + Debug + Send + Sync + 'static;

    fn zero_in(ctx: &Self::Ctx) -> Self;
    fn one_in(ctx: &Self::Ctx) -> Self;
    fn from_rational(ctx: &Self::Ctx, x: &Rational) -> Self;
    fn context(&self) -> Self::Ctx;

    fn eq_zero(&self) -> bool;
    fn eq_one(&self) -> bool;

    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn inverse(&self) -> Result<Self>;

    fn plus_assign(&mut self, other: &Self) {
        *self = self.plus(other);
    }

    /// `self += a * b`
    fn fma_assign(&mut self, a: &Self, b: &Self) {
        *self = self.plus(&a.times(b));
    }

    fn scale_rational(&self, x: &Rational) -> Self {
        self.times(&Self::from_rational(&self.context(), x))
    }

    fn divide(&self, other: &Self) -> Result<Self> {
        Ok(self.times(&other.inverse()?))
    }

    /// Short text used in rendered series.
    fn render(&self) -> String;

    /// Exact JSON value: a rational string, or a list of strings for cyclotomic coordinates.
    fn to_json(&self) -> serde_json::Value;
    fn from_json(ctx: &Self::Ctx, v: &serde_json::Value) -> Result<Self>;
}

impl Field for Rational {
    type Ctx = ();

    fn zero_in(_: &()) -> Self {
        <Rational as Zero>::zero()
    }
    fn one_in(_: &()) -> Self {
        <Rational as One>::one()
    }
    fn from_rational(_: &(), x: &Rational) -> Self {
        x.clone()
    }
    fn context(&self) {}

    fn eq_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn eq_one(&self) -> bool {
        One::is_one(self)
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn plus_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn fma_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn scale_rational(&self, x: &Rational) -> Self {
        self * x
    }

    fn render(&self) -> String {
        format_rational(self)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }

    fn from_json(_: &(), v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) if n.is_i64() => Ok(super::rat_int(n.as_i64().unwrap())),
            other => Err(Error::parse(0, format!("expected a rational, found {other}"))),
        }
    }
}
