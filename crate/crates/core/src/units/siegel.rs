//! Siegel units `s_α` and the transformation `z ↦ -1/z`.
//!
//! The multiplier of `s_α(-1/z) = c(α,S)·s_{αS}(z)` is built from the
//! constants `δ(α)`:
//!
//! ```text
//! δ(α)   = -ρ(⌊α⌋) · e₂(-det(α; ⌊α⌋)) · e₂(-{a2}({a1} - 1))
//! c(α,S) = ε(S)^{-1} · δ(αS) / δ(α),   αS = (a2, -a1)
//! ```
//!
//! with `ρ(b) = (-1)^{b1+b2+b1·b2}`, `e₂(x) = exp(πix)` and `det(α;β) = a1·b2 - a2·b1`.
//! `ε(S) = -i` comes from `η(-1/z)² = -iz·η(z)²`. These constants are only used
//! for numeric validation; span tests never need them.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use super::{bernoulli_b, UnitProduct};
use crate::algebra::{
    format_rational, frac, rat, CyclotomicField, CyclotomicNumber, Field, Rational,
};
use crate::error::{Error, Result};
use crate::qseries::{prog_product, terms_below, PuiseuxSeries};

/// `ε(S)` as a root of unity: `-i = e(3/4)`.
pub const EPSILON_S: (i64, i64) = (3, 4);

/// `α = (p1, p2)/l` modulo `Z²`, never the zero class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiegelIndex {
    l: u64,
    p1: u64,
    p2: u64,
}

impl SiegelIndex {
    pub fn new(l: u64, p1: i64, p2: i64) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidLevel(0));
        }
        let p1 = p1.rem_euclid(l as i64) as u64;
        let p2 = p2.rem_euclid(l as i64) as u64;
        if p1 == 0 && p2 == 0 {
            return Err(Error::ZeroSiegelIndex(l));
        }
        Ok(SiegelIndex { l, p1, p2 })
    }

    pub fn level(&self) -> u64 {
        self.l
    }

    pub fn p1(&self) -> u64 {
        self.p1
    }

    pub fn p2(&self) -> u64 {
        self.p2
    }

    /// `(a1, a2)` as rationals in `[0, 1)`.
    pub fn alpha(&self) -> (Rational, Rational) {
        let l = self.l as i64;
        (rat(self.p1 as i64, l), rat(self.p2 as i64, l))
    }

    /// `αS = (a2, -a1)`, reduced.
    pub fn s_image(&self) -> SiegelIndex {
        SiegelIndex::new(self.l, self.p2 as i64, -(self.p1 as i64)).unwrap()
    }
}

/// `q`-expansion of `s_α` over `Q(ζ_l)`, known below `q^prec`.
pub fn siegel_expansion(alpha: &SiegelIndex, prec: &Rational) -> Result<PuiseuxSeries<CyclotomicNumber>> {
    let l = alpha.l;
    let field = CyclotomicField::get(l);
    let a1 = rat(alpha.p1 as i64, l as i64);
    let s = -bernoulli_b(&a1) / rat(2, 1);
    // Both products live in x = q^(1/l): n = m/l with m ≡ ±p1 (mod l).
    let xprec = (prec - &s) * rat(l as i64, 1);
    let z = CyclotomicNumber::zeta_power(&field, alpha.p2 as i64);
    let zi = CyclotomicNumber::zeta_power(&field, -(alpha.p2 as i64));
    let first = prog_product(&field, l, alpha.p1 as i64, Some(&z), -1, true, &xprec)?;
    let second = prog_product(&field, l, -(alpha.p1 as i64), Some(&zi), -1, false, &xprec)?;
    let body = first.mul(&second).substitute_power(&rat(1, l as i64))?;
    Ok(body.shift(&s))
}

/// `∏_j ∏_{s mod l} s_{(s, -r_j)/l}` computed literally from Siegel expansions.
pub fn s_transform_via_siegel(p: &UnitProduct, prec: &Rational) -> Result<PuiseuxSeries<CyclotomicNumber>> {
    let l = p.level();
    let field = CyclotomicField::get(l);
    // each factor has leading exponent >= -1/12, so pad the precision by k/12
    let pad = rat(p.len() as i64 * l as i64, 12);
    let work = prec + pad;
    let mut acc = PuiseuxSeries::one(field.clone(), &work);
    for &r in p.residues() {
        for s in 0..l as i64 {
            let idx = SiegelIndex::new(l, s, -(r as i64))?;
            acc = acc.mul(&siegel_expansion(&idx, &work)?);
        }
    }
    Ok(acc.truncate(prec))
}

/// Expansion of `∏_j ∏_{s mod l} s_{(s, -r_j)/l}`, a nonzero constant multiple of
/// the product evaluated at `-1/z`, known below `q^prec`.
///
/// Each factor `[r]_l` contributes
/// `q^{-1/12l} (1 - ζ^{-r})^{-1} ∏_{m>=1} [(1 - x^m ζ^{-r})(1 - x^m ζ^r)]^{-1}` with
/// `x = q^{1/l}`. The products are accumulated in `Z[y]/(y^l - 1)` with integer
/// coefficients and only reduced modulo `Φ_l` at the end.
pub fn s_transform_expansion(p: &UnitProduct, prec: &Rational) -> PuiseuxSeries<CyclotomicNumber> {
    let l = p.level() as usize;
    let field = CyclotomicField::get(p.level());
    if p.is_empty() {
        return PuiseuxSeries::one(field, prec);
    }
    let k = p.len() as i64;
    let s = rat(-k, 12 * l as i64);
    let n = terms_below(&((prec - &s) * rat(l as i64, 1)));
    if n == 0 {
        return PuiseuxSeries::zero(field, prec);
    }
    let mut g = vec![vec![BigInt::zero(); l]; n];
    g[0][0] = BigInt::one();
    for &r in p.residues() {
        for a in [l - r as usize, r as usize] {
            for m in 1..n {
                for i in m..n {
                    let (lo, hi) = g.split_at_mut(i);
                    let src = &lo[i - m];
                    let dst = &mut hi[0];
                    for (j, c) in src.iter().enumerate() {
                        if !c.is_zero() {
                            dst[(j + a) % l] += c;
                        }
                    }
                }
            }
        }
    }
    let one = CyclotomicNumber::one_in(&field);
    let mut constant = one.clone();
    for &r in p.residues() {
        let z = CyclotomicNumber::zeta_power(&field, -(r as i64));
        constant = constant.times(&one.minus(&z));
    }
    let constant = constant.inverse().expect("1 - ζ^r is a unit for l ∤ r");
    let d = 12 * l;
    let mut coeffs = vec![CyclotomicNumber::zero_in(&field); (n - 1) * 12 + 1];
    for (i, row) in g.iter().enumerate() {
        coeffs[i * 12] = CyclotomicNumber::from_int_poly(&field, row, BigInt::one()).times(&constant);
    }
    PuiseuxSeries::new(field, d as u64, -k, coeffs, 12 * n as i64).truncate(prec)
}

/// A root of unity `e(t) = exp(2πi t)` stored exactly as `t ∈ [0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    t: Rational,
}

impl RootOfUnity {
    pub fn new(t: Rational) -> Self {
        RootOfUnity { t: frac(&t) }
    }

    pub fn exponent(&self) -> &Rational {
        &self.t
    }

    /// Multiplicative order (the denominator of `t`).
    pub fn order(&self) -> u64 {
        self.t.denom().to_u64().unwrap()
    }

    pub fn pow(&self, k: i64) -> RootOfUnity {
        RootOfUnity::new(&self.t * rat(k, 1))
    }

    pub fn mul(&self, other: &RootOfUnity) -> RootOfUnity {
        RootOfUnity::new(&self.t + &other.t)
    }

    pub fn is_one(&self) -> bool {
        self.t.is_zero()
    }

    pub fn numeric(&self) -> Complex64 {
        let t = self.t.to_f64().unwrap();
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)
    }

    /// The same number in `Q(ζ_m)`; requires `order | m`.
    pub fn to_cyclotomic(&self, field: &Arc<CyclotomicField>) -> Result<CyclotomicNumber> {
        CyclotomicNumber::root_of_unity(field, &self.t)
    }
}

impl std::fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e({})", format_rational(&self.t))
    }
}

/// `δ(α)` for an arbitrary rational representative `α = (a1, a2)`.
pub fn delta_of(a1: &Rational, a2: &Rational) -> RootOfUnity {
    let b1 = a1.floor();
    let b2 = a2.floor();
    let det = a1 * &b2 - a2 * &b1;
    let rho = (&b1 + &b2 + &b1 * &b2) / rat(2, 1);
    let frac1 = a1 - &b1;
    let frac2 = a2 - &b2;
    let tail = -(&frac2 * (&frac1 - Rational::one())) / rat(2, 1);
    RootOfUnity::new(rat(1, 2) + rho - det / rat(2, 1) + tail)
}

/// `δ(α)` for the reduced representative in `[0,1)²`, as an element of `Q(ζ_{4l²})`.
pub fn delta_constant(alpha: &SiegelIndex) -> CyclotomicNumber {
    let (a1, a2) = alpha.alpha();
    let l = alpha.l;
    delta_of(&a1, &a2)
        .to_cyclotomic(&CyclotomicField::get(4 * l * l))
        .expect("δ lies in the 4l²-th roots of unity")
}

/// `c(α,S)` with `s_α(-1/z) = c(α,S)·s_{αS}(z)`.
pub fn c_alpha_s(alpha: &SiegelIndex) -> RootOfUnity {
    let (a1, a2) = alpha.alpha();
    let eps_inv = RootOfUnity::new(-rat(EPSILON_S.0, EPSILON_S.1));
    let num = delta_of(&a2, &-a1.clone());
    let den = delta_of(&a1, &a2);
    eps_inv.mul(&num).mul(&RootOfUnity::new(-den.exponent().clone()))
}

/// `s_α(z)` by a truncated product with `terms` factors in each progression.
pub fn siegel_numeric(a1: &Rational, a2: &Rational, z: Complex64, terms: usize) -> Complex64 {
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let qpow = |s: f64| (two_pi_i * z * s).exp();
    let e = |x: f64| (two_pi_i * x).exp();
    let b = bernoulli_b(a1).to_f64().unwrap();
    let mut val = qpow(-b / 2.0);
    let y1 = frac(a1).to_f64().unwrap();
    let ea2 = e(a2.to_f64().unwrap());
    for k in 0..terms {
        val /= Complex64::new(1.0, 0.0) - qpow(y1 + k as f64) * ea2;
    }
    let y2r = frac(&-a1.clone());
    let y2 = y2r.to_f64().unwrap();
    let ea2m = e(-a2.to_f64().unwrap());
    for k in 0..terms {
        if y2r.is_zero() && k == 0 {
            continue;
        }
        val /= Complex64::new(1.0, 0.0) - qpow(y2 + k as f64) * ea2m;
    }
    val
}

/// Compares `s_α(-1/z)` against `c·s_{αS}(z)` for a supplied constant.
pub fn numeric_check_with_constant(
    alpha: &SiegelIndex,
    c: Complex64,
    z: Complex64,
    terms: usize,
    tol: f64,
) -> bool {
    if z.im <= 0.0 {
        return false;
    }
    let (a1, a2) = alpha.alpha();
    let lhs = siegel_numeric(&a1, &a2, -Complex64::new(1.0, 0.0) / z, terms);
    let rhs = c * siegel_numeric(&a2, &-a1, z, terms);
    ((lhs - rhs).norm() / lhs.norm()) < tol
}

/// Numerically validates `s_α(-1/z) = c(α,S)·s_{αS}(z)` at one point of the upper half plane.
pub fn numeric_check_transform(alpha: &SiegelIndex, z: Complex64, terms: usize, tol: f64) -> bool {
    numeric_check_with_constant(alpha, c_alpha_s(alpha).numeric(), z, terms, tol)
}
