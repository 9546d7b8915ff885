//! `Q(ζ_m)` in the power basis `1, ζ, …, ζ^(φ(m)-1)` modulo `Φ_m`.
//!
//! Elements are stored as integer numerators over one positive common
//! denominator, kept in lowest terms, so equality is structural.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{div_exact_monic, mul_int, trim, xgcd};
use super::{divisors, euler_phi, format_rational, gcd_u64, Field, Rational};
use crate::error::{Error, Result};

/// The m-th cyclotomic polynomial as integer coefficients, lowest degree first.
pub fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    assert!(m >= 1, "cyclotomic polynomial of order 0");
    CyclotomicField::get(m).modulus.clone()
}

fn compute_cyclotomic(m: u64) -> Vec<BigInt> {
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut p = vec![BigInt::zero(); m as usize + 1];
    p[0] = BigInt::from(-1);
    p[m as usize] = BigInt::one();
    for d in divisors(m) {
        if d < m {
            let phi_d = CyclotomicField::get(d).modulus.clone();
            p = div_exact_monic(&p, &phi_d).expect("Φ_d divides x^m - 1");
        }
    }
    p
}

/// The field `Q(ζ_m)` with its reduction tables. Obtain through [`CyclotomicField::get`].
pub struct CyclotomicField {
    order: u64,
    degree: usize,
    modulus: Vec<BigInt>,
    /// `x^j mod Φ_m` for `0 <= j < max(m, 2·degree - 1)`.
    powers: Vec<Vec<BigInt>>,
}

impl fmt::Debug for CyclotomicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", self.order)
    }
}

impl PartialEq for CyclotomicField {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
    }
}

fn registry() -> &'static Mutex<HashMap<u64, Arc<CyclotomicField>>> {
    static REG: OnceLock<Mutex<HashMap<u64, Arc<CyclotomicField>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

impl CyclotomicField {
    /// Shared handle for `Q(ζ_m)`; fields are built once and cached.
    pub fn get(m: u64) -> Arc<CyclotomicField> {
        assert!(m >= 1, "cyclotomic field of order 0");
        if let Some(f) = registry().lock().unwrap().get(&m) {
            return f.clone();
        }
        // Built outside the lock: construction recurses into smaller orders.
        let field = Arc::new(Self::build(m));
        registry().lock().unwrap().entry(m).or_insert(field).clone()
    }

    fn build(m: u64) -> Self {
        let modulus = if m == 1 {
            vec![BigInt::from(-1), BigInt::one()]
        } else {
            compute_cyclotomic(m)
        };
        let degree = modulus.len() - 1;
        debug_assert_eq!(degree as u64, euler_phi(m));
        let count = (m as usize).max(2 * degree);
        let mut powers = Vec::with_capacity(count);
        let mut cur = vec![BigInt::zero(); degree];
        cur[0] = BigInt::one();
        for _ in 0..count {
            powers.push(cur.clone());
            // multiply by x and reduce with x^degree = -Σ modulus[i] x^i
            let top = cur[degree - 1].clone();
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = BigInt::zero();
            if !top.is_zero() {
                for i in 0..degree {
                    cur[i] -= &top * &modulus[i];
                }
            }
        }
        CyclotomicField {
            order: m,
            degree,
            modulus,
            powers,
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    /// Power-basis coordinates of `ζ^k` (any integer `k`).
    pub fn zeta_power_coords(&self, k: i64) -> &[BigInt] {
        &self.powers[k.rem_euclid(self.order as i64) as usize]
    }

    /// Reduces an integer polynomial of any length modulo `Φ_m` using `x^m = 1` first.
    pub fn reduce_int_poly(&self, p: &[BigInt]) -> Vec<BigInt> {
        let m = self.order as usize;
        let mut folded = vec![BigInt::zero(); m.min(p.len()).max(1)];
        for (i, c) in p.iter().enumerate() {
            if !c.is_zero() {
                folded[i % m] += c;
            }
        }
        let mut out = vec![BigInt::zero(); self.degree];
        for (j, c) in folded.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if j < self.degree {
                out[j] += c;
            } else {
                for (o, r) in out.iter_mut().zip(&self.powers[j]) {
                    if !r.is_zero() {
                        *o += c * r;
                    }
                }
            }
        }
        out
    }
}

/// Element of `Q(ζ_m)`: `(Σ num[k] ζ^k) / den`.
#[derive(Clone)]
pub struct CyclotomicNumber {
    field: Arc<CyclotomicField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.field.order == other.field.order && self.den == other.den && self.num == other.num
    }
}

impl Eq for CyclotomicNumber {}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in Q(zeta_{})", self.render(), self.field.order)
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl CyclotomicNumber {
    fn from_parts(field: Arc<CyclotomicField>, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut x = CyclotomicNumber { field, num, den };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        debug_assert!(!self.den.is_zero());
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in self.num.iter_mut() {
                *c = -&*c;
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                return;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            self.den /= &g;
            for c in self.num.iter_mut() {
                *c /= &g;
            }
        }
    }

    /// Builds an element from its `φ(m)` power-basis coordinates.
    pub fn from_coords(field: &Arc<CyclotomicField>, coords: &[Rational]) -> Result<Self> {
        if coords.len() != field.degree {
            return Err(Error::LengthMismatch(coords.len(), field.degree));
        }
        let den = coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coords
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Ok(Self::from_parts(field.clone(), num, den))
    }

    /// Element with integer numerators `num` (reduced mod `Φ_m`, any length) over `den`.
    pub fn from_int_poly(field: &Arc<CyclotomicField>, poly: &[BigInt], den: BigInt) -> Self {
        Self::from_parts(field.clone(), field.reduce_int_poly(poly), den)
    }

    /// `ζ_m^k`.
    pub fn zeta_power(field: &Arc<CyclotomicField>, k: i64) -> Self {
        Self::from_parts(
            field.clone(),
            field.zeta_power_coords(k).to_vec(),
            BigInt::one(),
        )
    }

    /// The root of unity `e(t) = exp(2πi t)` for rational `t` whose denominator divides `m`.
    pub fn root_of_unity(field: &Arc<CyclotomicField>, t: &Rational) -> Result<Self> {
        let m = BigInt::from(field.order);
        let scaled = t * Rational::from_integer(m);
        if !scaled.is_integer() {
            return Err(Error::InvalidArgument(format!(
                "e({}) is not in Q(zeta_{})",
                format_rational(t),
                field.order
            )));
        }
        let k = (scaled.to_integer() % BigInt::from(field.order))
            .to_i64()
            .unwrap();
        Ok(Self::zeta_power(field, k))
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn order(&self) -> u64 {
        self.field.order
    }

    pub fn coords(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn coord(&self, k: usize) -> Rational {
        Rational::new(self.num[k].clone(), self.den.clone())
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num[1..].iter().all(|c| c.is_zero()) {
            Some(self.coord(0))
        } else {
            None
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.field.order != other.field.order {
            Err(Error::FieldMismatch(self.field.order, other.field.order))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.plus(other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.times(other))
    }

    /// Inverse via the extended gcd of the numerator polynomial with `Φ_m`.
    pub fn inv(&self) -> Result<Self> {
        if self.eq_zero() {
            return Err(Error::DivisionByZero);
        }
        let a: Vec<Rational> = self
            .num
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        let phi: Vec<Rational> = self
            .field
            .modulus
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        let (g, s, _) = xgcd(&a, &phi);
        debug_assert_eq!(g.len(), 1, "Φ_m is irreducible");
        let mut coords = vec![<Rational as Zero>::zero(); self.field.degree];
        let den = Rational::from_integer(self.den.clone());
        for (i, c) in s.into_iter().enumerate() {
            coords[i] = c * &den;
        }
        Self::from_coords(&self.field, &coords)
    }

    /// The automorphism `σ_y: ζ ↦ ζ^y`, `gcd(y, m) = 1`.
    pub fn galois_apply(&self, y: i64) -> Result<Self> {
        let m = self.field.order;
        if gcd_u64(y.unsigned_abs() % m, m) != 1 && m > 1 {
            return Err(Error::NotCoprime(y, m));
        }
        let mut poly = vec![BigInt::zero(); m as usize];
        for (k, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                let e = ((k as i64) * y).rem_euclid(m as i64) as usize;
                poly[e] += c;
            }
        }
        Ok(Self::from_parts(
            self.field.clone(),
            self.field.reduce_int_poly(&poly),
            self.den.clone(),
        ))
    }

    /// Complex value under `ζ_m ↦ exp(2πi/m)`.
    pub fn numeric_embed(&self) -> Complex64 {
        let m = self.field.order as f64;
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m);
            let v = Rational::new(c.clone(), self.den.clone()).to_f64().unwrap_or_else(|| {
                c.to_f64().unwrap_or(f64::NAN) / den
            });
            acc += w * v;
        }
        acc
    }

    /// Image under `Q(ζ_m) ⊂ Q(ζ_M)` for `m | M`, sending `ζ_m` to `ζ_M^(M/m)`.
    pub fn embed_into(&self, target: &Arc<CyclotomicField>) -> Result<Self> {
        let (m, big) = (self.field.order, target.order);
        if big % m != 0 {
            return Err(Error::NotADivisor { small: m, large: big });
        }
        let step = (big / m) as usize;
        let mut poly = vec![BigInt::zero(); self.num.len() * step.max(1)];
        for (k, c) in self.num.iter().enumerate() {
            poly[k * step] += c;
        }
        Ok(Self::from_parts(
            target.clone(),
            target.reduce_int_poly(&poly),
            self.den.clone(),
        ))
    }
}

impl Field for CyclotomicNumber {
    type Ctx = Arc<CyclotomicField>;

    fn zero_in(ctx: &Self::Ctx) -> Self {
        CyclotomicNumber {
            field: ctx.clone(),
            num: vec![BigInt::zero(); ctx.degree],
            den: BigInt::one(),
        }
    }

    fn one_in(ctx: &Self::Ctx) -> Self {
        let mut x = <Self as Field>::zero_in(ctx);
        x.num[0] = BigInt::one();
        x
    }

    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self {
        let mut x = <Self as Field>::zero_in(ctx);
        if !Zero::is_zero(q) {
            x.num[0] = q.numer().clone();
            x.den = q.denom().clone();
        }
        x
    }

    fn context(&self) -> Self::Ctx {
        self.field.clone()
    }

    fn eq_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    fn eq_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    fn plus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.field.order, other.field.order);
        if other.eq_zero() {
            return self.clone();
        }
        if self.eq_zero() {
            return other.clone();
        }
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| a + b).collect();
            return Self::from_parts(self.field.clone(), num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &other.den + b * &self.den)
            .collect();
        Self::from_parts(self.field.clone(), num, &self.den * &other.den)
    }

    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negate())
    }

    fn times(&self, other: &Self) -> Self {
        debug_assert_eq!(self.field.order, other.field.order);
        if self.eq_zero() || other.eq_zero() {
            return <Self as Field>::zero_in(&self.field);
        }
        let mut prod = mul_int(&self.num, &other.num);
        trim(&mut prod);
        let deg = self.field.degree;
        let mut out = vec![BigInt::zero(); deg];
        for (j, c) in prod.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if j < deg {
                out[j] += c;
            } else {
                for (o, r) in out.iter_mut().zip(&self.field.powers[j]) {
                    if !r.is_zero() {
                        *o += c * r;
                    }
                }
            }
        }
        Self::from_parts(self.field.clone(), out, &self.den * &other.den)
    }

    fn negate(&self) -> Self {
        CyclotomicNumber {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    fn inverse(&self) -> Result<Self> {
        self.inv()
    }

    fn scale_rational(&self, x: &Rational) -> Self {
        if Zero::is_zero(x) {
            return <Self as Field>::zero_in(&self.field);
        }
        let num = self.num.iter().map(|c| c * x.numer()).collect();
        Self::from_parts(self.field.clone(), num, &self.den * x.denom())
    }

    fn render(&self) -> String {
        if let Some(q) = self.as_rational() {
            return format_rational(&q);
        }
        let mut terms = Vec::new();
        for (k, c) in self.coords().iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            let mon = match k {
                0 => String::new(),
                1 => "ζ".to_string(),
                _ => format!("ζ^{k}"),
            };
            let term = if k == 0 {
                format_rational(c)
            } else if One::is_one(c) {
                mon
            } else if *c == -<Rational as One>::one() {
                format!("-{mon}")
            } else {
                format!("{}·{mon}", format_rational(c))
            };
            terms.push(term);
        }
        format!("({})", terms.join(" + ").replace("+ -", "- "))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coords()
                .iter()
                .map(|c| serde_json::Value::String(format_rational(c)))
                .collect(),
        )
    }

    fn from_json(ctx: &Self::Ctx, v: &serde_json::Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::parse(0, "expected a coordinate list"))?;
        let coords = arr
            .iter()
            .map(|c| <Rational as Field>::from_json(&(), c))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coords(ctx, &coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(5), ints(&[1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn phi4_from_exact_division() {
        // (x^4 - 1) / ((x - 1)(x + 1))
        let prod = mul_int(&ints(&[-1, 1]), &ints(&[1, 1]));
        let q = div_exact_monic(&ints(&[-1, 0, 0, 0, 1]), &prod).unwrap();
        assert_eq!(q, cyclotomic_polynomial(4));
    }

    #[test]
    fn degree_is_totient() {
        for m in 1..=60 {
            let p = cyclotomic_polynomial(m);
            assert_eq!((p.len() - 1) as u64, euler_phi(m));
            assert!(p.last().unwrap().is_one());
        }
    }

    #[test]
    fn zeta4_squared() {
        let f = CyclotomicField::get(4);
        let z = CyclotomicNumber::zeta_power(&f, 1);
        assert_eq!(z.times(&z), CyclotomicNumber::from_rational(&f, &rat(-1, 1)));
    }

    #[test]
    fn inverses() {
        let f = CyclotomicField::get(5);
        let one = CyclotomicNumber::one_in(&f);
        assert_eq!(one.inv().unwrap(), one);
        let a = one.plus(&CyclotomicNumber::zeta_power(&f, 1));
        assert!(a.times(&a.inv().unwrap()).eq_one());
        assert_eq!(CyclotomicNumber::zero_in(&f).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn galois_action() {
        let f = CyclotomicField::get(5);
        let z = CyclotomicNumber::zeta_power(&f, 1);
        assert_eq!(z.galois_apply(1).unwrap(), z);
        assert_eq!(z.galois_apply(2).unwrap(), CyclotomicNumber::zeta_power(&f, 2));
        let composed = z.galois_apply(3).unwrap().galois_apply(2).unwrap();
        assert_eq!(composed, z.galois_apply(6).unwrap());
        assert_eq!(composed, z);
        assert_eq!(z.galois_apply(5), Err(Error::NotCoprime(5, 5)));
    }

    #[test]
    fn embedding_values() {
        let f4 = CyclotomicField::get(4);
        let i = CyclotomicNumber::zeta_power(&f4, 1).numeric_embed();
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let f3 = CyclotomicField::get(3);
        let s = CyclotomicNumber::one_in(&f3)
            .plus(&CyclotomicNumber::zeta_power(&f3, 1))
            .plus(&CyclotomicNumber::zeta_power(&f3, 2));
        assert!(s.eq_zero());
        assert!(s.numeric_embed().norm() < 1e-12);
    }

    #[test]
    fn mismatched_fields() {
        let a = CyclotomicNumber::one_in(&CyclotomicField::get(3));
        let b = CyclotomicNumber::one_in(&CyclotomicField::get(5));
        assert_eq!(a.checked_mul(&b), Err(Error::FieldMismatch(3, 5)));
    }

    #[test]
    fn embedding_into_larger_field() {
        let f5 = CyclotomicField::get(5);
        let f20 = CyclotomicField::get(20);
        let z = CyclotomicNumber::zeta_power(&f5, 2);
        assert_eq!(z.embed_into(&f20).unwrap(), CyclotomicNumber::zeta_power(&f20, 8));
    }

    #[test]
    fn json_round_trip() {
        let f = CyclotomicField::get(7);
        let a = CyclotomicNumber::zeta_power(&f, 3).scale_rational(&rat(-2, 9));
        let back = CyclotomicNumber::from_json(&f, &a.to_json()).unwrap();
        assert_eq!(a, back);
    }
}
