use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{canonical_residue, unit_expansion, UnitProduct};
use crate::algebra::{format_rational, rat, Rational};
use crate::error::{Error, Result};
use crate::qseries::{extract_product_exponents, PuiseuxSeries};

/// `f = q^s · ∏_r [r]_l^{e_r}` with `r` over canonical residues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitFactorization {
    pub level: u64,
    /// Nonzero exponents only.
    pub exponents: BTreeMap<u64, i64>,
    /// Exponent of `q` left over after the prefactors of the units.
    #[serde(with = "rational_string")]
    pub shift: Rational,
}

/// Why a series is not a product of the units `[r]_l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorObstruction {
    /// `a(n)` is not an integer.
    NonIntegral { n: u64, value: String },
    /// `a(n) != 0` although `l | n`.
    MultipleOfLevel { n: u64, value: String },
    /// `a(n) != a(m)` although `n ≡ ±m (mod l)`.
    NotPeriodic { n: u64, m: u64 },
    /// `a(l/2)` is odd, so `[l/2]_l` would need a half-integral exponent.
    OddMiddle { value: String },
}

impl fmt::Display for FactorObstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorObstruction::NonIntegral { n, value } => {
                write!(f, "exponent a({n}) = {value} is not an integer")
            }
            FactorObstruction::MultipleOfLevel { n, value } => {
                write!(f, "exponent a({n}) = {value} is nonzero at a multiple of the level")
            }
            FactorObstruction::NotPeriodic { n, m } => {
                write!(f, "exponents a({m}) and a({n}) differ")
            }
            FactorObstruction::OddMiddle { value } => {
                write!(f, "exponent at l/2 is {value}, which is odd")
            }
        }
    }
}

impl UnitFactorization {
    pub fn product(&self) -> Option<UnitProduct> {
        if self.exponents.values().any(|&e| e < 0) {
            return None;
        }
        let mut rs = Vec::new();
        for (&r, &e) in &self.exponents {
            for _ in 0..e {
                rs.push(r as i64);
            }
        }
        UnitProduct::new(self.level, &rs).ok()
    }

    /// `q^s · ∏ [r]_l^{e_r}` known below `q^prec`.
    pub fn expand(&self, prec: &Rational) -> Result<PuiseuxSeries<Rational>> {
        let mut lead = self.shift.clone();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (&r, &e) in &self.exponents {
            let one = UnitProduct::new(self.level, &[r as i64])?;
            lead += one.leading_exponent() * rat(e, 1);
            for _ in 0..e.unsigned_abs() {
                if e > 0 {
                    pos.push(r as i64);
                } else {
                    neg.push(r as i64);
                }
            }
        }
        let body_prec = prec - &lead;
        let p = UnitProduct::new(self.level, &pos)?;
        let n = UnitProduct::new(self.level, &neg)?;
        let pe = unit_expansion(&p, &(&body_prec + p.leading_exponent()));
        let ne = unit_expansion(&n, &(&body_prec + n.leading_exponent()));
        let body = pe
            .shift(&-p.leading_exponent())
            .mul(&ne.shift(&-n.leading_exponent()).inv()?);
        Ok(body.shift(&lead))
    }
}

/// Writes `f` as `q^s ∏ [r]_l^{e_r}`, or reports the first obstruction.
///
/// Needs `f = c·q^t·(1 + O(q))` with `c = 1` and at least `l` integer steps of precision past `q^t`.
pub fn factor_into_units(
    f: &PuiseuxSeries<Rational>,
    l: u64,
) -> Result<std::result::Result<UnitFactorization, FactorObstruction>> {
    if l < 2 {
        return Err(Error::InvalidLevel(l as i64));
    }
    let t = f
        .leading_exponent()
        .ok_or_else(|| Error::NotNormalized("zero series".into()))?;
    if !f.leading_coefficient().unwrap().is_one() {
        return Err(Error::NotNormalized("leading coefficient must be 1".into()));
    }
    let body = f.shift(&-t.clone());
    if body.denom() != 1 {
        return Err(Error::NotNormalized(
            "exponents must differ from the leading one by integers".into(),
        ));
    }
    let avail = body.precision_end().floor().to_integer();
    let n_max = usize::try_from(avail - BigInt::one()).unwrap_or(0);
    if n_max < l as usize {
        return Err(Error::InsufficientPrecision {
            needed: (l + 1).to_string(),
            available: format_rational(&body.precision_end()),
        });
    }
    let ex = extract_product_exponents(&body, n_max)?;
    for n in 1..=n_max {
        let a = ex.get(n);
        if !a.is_integer() {
            return Ok(Err(FactorObstruction::NonIntegral {
                n: n as u64,
                value: format_rational(a),
            }));
        }
        if n as u64 % l == 0 {
            if !a.is_zero() {
                return Ok(Err(FactorObstruction::MultipleOfLevel {
                    n: n as u64,
                    value: format_rational(a),
                }));
            }
            continue;
        }
        let m = canonical_residue(n as i64, l) as usize;
        if m != n && ex.get(m) != a {
            return Ok(Err(FactorObstruction::NotPeriodic {
                n: n as u64,
                m: m as u64,
            }));
        }
    }
    let mut exponents = BTreeMap::new();
    let mut prefactor = Rational::zero();
    for r in 1..=l / 2 {
        let a = ex.get(r as usize).to_integer();
        let mut e = -a;
        if 2 * r == l {
            if (&e % BigInt::from(2)) != BigInt::zero() {
                return Ok(Err(FactorObstruction::OddMiddle {
                    value: e.to_string(),
                }));
            }
            e /= 2;
        }
        let e = i64::try_from(e).map_err(|_| Error::InvalidArgument("exponent out of range".into()))?;
        if e != 0 {
            let unit = UnitProduct::new(l, &[r as i64])?;
            prefactor += unit.leading_exponent() * rat(e, 1);
            exponents.insert(r, e);
        }
    }
    Ok(Ok(UnitFactorization {
        level: l,
        exponents,
        shift: t - prefactor,
    }))
}

mod rational_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::algebra::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
