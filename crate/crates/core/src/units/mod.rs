//! The units `[r]_l`, their products, cusp orders and distribution relations,
//! Siegel units and the image of a product under `z ↦ -1/z`.

mod cache;
mod factor;
mod siegel;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{divisors, frac, rat, Rational};
use crate::error::{Error, Result};
use crate::qseries::{int_apply_progression, terms_below, PuiseuxSeries};

pub use cache::{CacheKey, ExpansionCache, ExpansionKind, ExpansionStore};
pub use factor::{factor_into_units, FactorObstruction, UnitFactorization};
pub use siegel::{
    c_alpha_s, delta_constant, delta_of, numeric_check_transform, numeric_check_with_constant,
    s_transform_expansion, s_transform_via_siegel, siegel_expansion, siegel_numeric,
    RootOfUnity, SiegelIndex, EPSILON_S,
};

/// `B(x) = y² - y + 1/6` with `y` the fractional part of `x`.
pub fn bernoulli_b(x: &Rational) -> Rational {
    let y = frac(x);
    &y * &y - &y + rat(1, 6)
}

/// Canonical representative `min(r mod l, l - r mod l)` of `±r` modulo `l`.
pub fn canonical_residue(r: i64, l: u64) -> u64 {
    let m = r.rem_euclid(l as i64) as u64;
    m.min(l - m)
}

/// The product `[r_1, …, r_k]_l` with residues kept canonical and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "UnitProductRepr", into = "UnitProductRepr")]
pub struct UnitProduct {
    level: u64,
    residues: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct UnitProductRepr {
    l: u64,
    r: Vec<i64>,
}

impl TryFrom<UnitProductRepr> for UnitProduct {
    type Error = Error;
    fn try_from(v: UnitProductRepr) -> Result<Self> {
        UnitProduct::new(v.l, &v.r)
    }
}

impl From<UnitProduct> for UnitProductRepr {
    fn from(p: UnitProduct) -> Self {
        UnitProductRepr {
            l: p.level,
            r: p.residues.iter().map(|&r| r as i64).collect(),
        }
    }
}

impl Ord for UnitProduct {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.level, self.residues.len(), &self.residues).cmp(&(
            other.level,
            other.residues.len(),
            &other.residues,
        ))
    }
}

impl PartialOrd for UnitProduct {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for UnitProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rs: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
        write!(f, "[{}]_{}", rs.join(","), self.level)
    }
}

/// Parses `"l:r1,r2,…"` (an empty list after the colon is the constant 1).
impl FromStr for UnitProduct {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (l_part, r_part) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(0, "expected \"l:r1,r2,...\""))?;
        let level: u64 = l_part
            .trim()
            .parse()
            .map_err(|_| Error::parse(0, format!("invalid level {:?}", l_part.trim())))?;
        let mut residues = Vec::new();
        let mut pos = l_part.len() + 1;
        if !r_part.trim().is_empty() {
            for tok in r_part.split(',') {
                let r: i64 = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(pos, format!("invalid residue {:?}", tok.trim())))?;
                residues.push(r);
                pos += tok.len() + 1;
            }
        }
        UnitProduct::new(level, &residues)
    }
}

impl UnitProduct {
    pub fn new(level: u64, residues: &[i64]) -> Result<Self> {
        if level < 2 {
            return Err(Error::InvalidLevel(level as i64));
        }
        let mut rs = Vec::with_capacity(residues.len());
        for &r in residues {
            if r.rem_euclid(level as i64) == 0 {
                return Err(Error::ResidueDivisibleByLevel { residue: r, level });
            }
            rs.push(canonical_residue(r, level));
        }
        rs.sort_unstable();
        Ok(UnitProduct {
            level,
            residues: rs,
        })
    }

    /// The empty product (the constant function 1) at level `l`.
    pub fn one(level: u64) -> Self {
        UnitProduct {
            level,
            residues: Vec::new(),
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let mut residues = self.residues.clone();
        residues.extend_from_slice(&other.residues);
        residues.sort_unstable();
        Ok(UnitProduct {
            level: self.level,
            residues,
        })
    }

    /// `Σ_j -l·B(r_j/l)/2`, the order at infinity.
    pub fn leading_exponent(&self) -> Rational {
        let l = self.level as i64;
        self.residues
            .iter()
            .map(|&r| -rat(l, 2) * bernoulli_b(&rat(r as i64, l)))
            .sum()
    }

    /// Multiplicity function `G(x) = #{j : r_j ≡ x} + #{j : r_j ≡ -x}` on `Z/lZ`,
    /// so that the product is `∏_{n>0} (1 - q^n)^{-G(n mod l)}` up to the prefactor.
    pub fn exponent_profile(&self) -> Vec<i64> {
        let l = self.level as usize;
        let mut g = vec![0i64; l];
        for &r in &self.residues {
            g[r as usize] += 1;
            g[(l - r as usize) % l] += 1;
        }
        g
    }

    /// The same function written at the smallest possible level (via the
    /// distribution relations). Returns `self` when no smaller level works.
    pub fn minimal_level(&self) -> UnitProduct {
        if self.is_empty() {
            return self.clone();
        }
        let g = self.exponent_profile();
        let l = self.level;
        for lp in divisors(l) {
            if lp < 2 || lp == l {
                continue;
            }
            let periodic = (1..l as usize).all(|x| {
                let m = x % lp as usize;
                if m == 0 {
                    g[x] == 0
                } else {
                    g[x] == g[m]
                }
            });
            if !periodic {
                continue;
            }
            let mut residues = Vec::new();
            let mut ok = true;
            for v in 1..=(lp / 2) as usize {
                let mut mult = g[v];
                if 2 * v as u64 == lp {
                    if mult % 2 != 0 {
                        ok = false;
                        break;
                    }
                    mult /= 2;
                }
                for _ in 0..mult {
                    residues.push(v as u64);
                }
            }
            if ok {
                return UnitProduct {
                    level: lp,
                    residues,
                };
            }
        }
        self.clone()
    }

    /// Rewrites the product at a multiple `m` of its level.
    pub fn at_level(&self, m: u64) -> Result<UnitProduct> {
        if m % self.level != 0 {
            return Err(Error::NotADivisor {
                small: self.level,
                large: m,
            });
        }
        let mut out = UnitProduct::one(m);
        for &r in &self.residues {
            out = out.mul(&distribution_expand(r as i64, self.level, m)?)?;
        }
        Ok(out)
    }

    /// All products of exactly `k` factors at level `l`.
    pub fn all_of_length(level: u64, k: usize) -> Vec<UnitProduct> {
        let half = level / 2;
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        fn rec(start: u64, half: u64, k: usize, cur: &mut Vec<u64>, level: u64, out: &mut Vec<UnitProduct>) {
            if cur.len() == k {
                out.push(UnitProduct {
                    level,
                    residues: cur.clone(),
                });
                return;
            }
            for r in start..=half {
                cur.push(r);
                rec(r, half, k, cur, level, out);
                cur.pop();
            }
        }
        rec(1, half, k, &mut cur, level, &mut out);
        out
    }

    /// `E_n(l)`: all products with at most `n` factors, including the constant 1.
    pub fn all_up_to_length(level: u64, n: usize) -> Vec<UnitProduct> {
        (0..=n).flat_map(|k| Self::all_of_length(level, k)).collect()
    }
}

/// `[r]_l = ∏_{s mod m, s ≡ r mod l} [s]_m` for `l | m`.
pub fn distribution_expand(r: i64, l: u64, m: u64) -> Result<UnitProduct> {
    if l < 2 {
        return Err(Error::InvalidLevel(l as i64));
    }
    if m % l != 0 {
        return Err(Error::NotADivisor { small: l, large: m });
    }
    if r.rem_euclid(l as i64) == 0 {
        return Err(Error::ResidueDivisibleByLevel { residue: r, level: l });
    }
    let rs: Vec<i64> = (0..(m / l) as i64).map(|k| r + k * l as i64).collect();
    UnitProduct::new(m, &rs)
}

/// `q`-expansion of a product of `[r]_l`, known below `q^prec`.
pub fn unit_expansion(p: &UnitProduct, prec: &Rational) -> PuiseuxSeries<Rational> {
    let s = p.leading_exponent();
    let len = terms_below(&(prec - &s));
    if len == 0 {
        return PuiseuxSeries::zero((), prec);
    }
    let mut body = vec![BigInt::zero(); len];
    body[0] = BigInt::one();
    for &r in p.residues() {
        int_apply_progression(&mut body, p.level(), r as i64, -1);
        int_apply_progression(&mut body, p.level(), -(r as i64), -1);
    }
    PuiseuxSeries::from_integer_body(&s, &body)
}

/// A cusp `a/c` in lowest terms, or infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cusp {
    Infinity,
    Finite(Rational),
}

impl FromStr for Cusp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "oo" => Ok(Cusp::Infinity),
            other => crate::algebra::parse_rational(other).map(Cusp::Finite),
        }
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cusp::Infinity => write!(f, "∞"),
            Cusp::Finite(x) => write!(f, "{}", crate::algebra::format_rational(x)),
        }
    }
}

/// Order of the product at a cusp: `Σ_j -(t²/2l)·B(a·r_j/t)` with `t = gcd(c, l)`.
pub fn cusp_order(p: &UnitProduct, cusp: &Cusp) -> Rational {
    let (a, c) = match cusp {
        Cusp::Infinity => (BigInt::one(), BigInt::zero()),
        Cusp::Finite(x) => (x.numer().clone(), x.denom().clone()),
    };
    let l = BigInt::from(p.level());
    let t = c.gcd(&l);
    let factor = -Rational::new(&t * &t, BigInt::from(2) * &l);
    p.residues()
        .iter()
        .map(|&r| {
            let x = Rational::new(&a * BigInt::from(r), t.clone());
            &factor * bernoulli_b(&x)
        })
        .sum()
}
