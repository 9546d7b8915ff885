use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::PuiseuxSeries;
use crate::algebra::{ceil_int, format_rational, rat, Field, Rational};
use crate::error::{Error, Result};

/// Number of integer exponents `0, 1, …` lying strictly below `prec`.
pub(crate) fn terms_below(prec: &Rational) -> usize {
    let c = ceil_int(prec);
    if c.is_positive() {
        usize::try_from(&c).expect("precision out of range")
    } else {
        0
    }
}

/// In place: `c ← c · (1 - q^n)^e` modulo `q^len`.
pub(crate) fn int_apply_factor(c: &mut [BigInt], n: usize, e: i64) {
    if n == 0 || n >= c.len() {
        return;
    }
    if e < 0 {
        for _ in 0..(-e) {
            for i in n..c.len() {
                let t = c[i - n].clone();
                c[i] += t;
            }
        }
    } else {
        for _ in 0..e {
            for i in (n..c.len()).rev() {
                let t = c[i - n].clone();
                c[i] -= t;
            }
        }
    }
}

/// In place: multiply by `∏_{n ≡ r (mod l), n > 0} (1 - q^n)^e`.
pub(crate) fn int_apply_progression(c: &mut [BigInt], l: u64, r: i64, e: i64) {
    let start = r.rem_euclid(l as i64) as usize;
    let start = if start == 0 { l as usize } else { start };
    let mut n = start;
    while n < c.len() {
        int_apply_factor(c, n, e);
        n += l as usize;
    }
}

/// `∏_{n ≡ r (mod l)} (1 - ζ q^n)^e` over `n > 0` (or `n >= 0` when `include_n0`),
/// with all coefficients of `q^k`, `k < prec`. `zeta = None` means `ζ = 1`.
pub fn prog_product<F: Field>(
    ctx: &F::Ctx,
    l: u64,
    r: i64,
    zeta: Option<&F>,
    e: i64,
    include_n0: bool,
    prec: &Rational,
) -> Result<PuiseuxSeries<F>> {
    if l == 0 {
        return Err(Error::InvalidLevel(0));
    }
    let len = terms_below(prec);
    if len == 0 {
        return Ok(PuiseuxSeries::zero(ctx.clone(), prec));
    }
    let one = F::one_in(ctx);
    let z = zeta.cloned().unwrap_or_else(|| one.clone());
    let mut c = vec![F::zero_in(ctx); len];
    c[0] = one.clone();
    if e != 0 {
        let start = r.rem_euclid(l as i64) as usize;
        let start = if start == 0 { l as usize } else { start };
        let neg_z = z.negate();
        let mut n = start;
        while n < len {
            for _ in 0..e.unsigned_abs() {
                if e < 0 {
                    for i in n..len {
                        let t = c[i - n].clone();
                        c[i].fma_assign(&z, &t);
                    }
                } else {
                    for i in (n..len).rev() {
                        let t = c[i - n].clone();
                        c[i].fma_assign(&neg_z, &t);
                    }
                }
            }
            n += l as usize;
        }
    }
    let mut s = PuiseuxSeries::new(ctx.clone(), 1, 0, c, len as i64);
    if include_n0 && r.rem_euclid(l as i64) == 0 && e != 0 {
        let base = one.minus(&z);
        let factor = if e > 0 {
            pow_field(&base, e as u64, ctx)
        } else {
            pow_field(&base.inverse()?, e.unsigned_abs(), ctx)
        };
        s = s.scale(&factor);
    }
    Ok(s)
}

fn pow_field<F: Field>(x: &F, k: u64, ctx: &F::Ctx) -> F {
    let mut acc = F::one_in(ctx);
    for _ in 0..k {
        acc = acc.times(x);
    }
    acc
}

/// `∏_{n >= 1} (1 - q^n)^{a(n)}` with `exps[n-1] = a(n)`, known below `q^prec`.
pub fn build_product(exps: &[i64], prec: usize) -> PuiseuxSeries<Rational> {
    let mut c = vec![BigInt::zero(); prec];
    if prec > 0 {
        c[0] = BigInt::one();
    }
    for (i, &a) in exps.iter().enumerate() {
        int_apply_factor(&mut c, i + 1, a);
    }
    PuiseuxSeries::from_integer_body(&Rational::zero(), &c)
}

/// Exponents `a(1..=N)` with `f = ∏ (1 - q^n)^{a(n)} mod q^{N+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductExponents {
    /// `exponents[n - 1] = a(n)`.
    pub exponents: Vec<Rational>,
    pub integral: bool,
}

impl ProductExponents {
    pub fn get(&self, n: usize) -> &Rational {
        &self.exponents[n - 1]
    }

    pub fn as_integers(&self) -> Option<Vec<BigInt>> {
        if !self.integral {
            return None;
        }
        Some(self.exponents.iter().map(|a| a.to_integer()).collect())
    }
}

/// Peels off `(1 - q^n)^{a(n)}` for `n = 1, 2, …, N` in turn, each step
/// dividing out the factor that accounts for the lowest remaining term.
pub fn extract_product_exponents(
    f: &PuiseuxSeries<Rational>,
    n_max: usize,
) -> Result<ProductExponents> {
    if f.is_zero() || f.lead() != 0 || !f.coeffs()[0].is_one() {
        return Err(Error::NotNormalized(
            "expected a series of the form 1 + O(q)".into(),
        ));
    }
    let needed = rat(n_max as i64 + 1, 1);
    if f.precision_end() < needed {
        return Err(Error::InsufficientPrecision {
            needed: format_rational(&needed),
            available: format_rational(&f.precision_end()),
        });
    }
    let len = n_max + 1;
    let mut g = f.window(&Rational::zero(), 1, len)?;
    let mut exps = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let a = -g[n].clone();
        if !a.is_zero() {
            multiply_binomial(&mut g, n, &(-a.clone()));
        }
        debug_assert!(g[n].is_zero());
        exps.push(a);
    }
    let integral = exps.iter().all(|a| a.is_integer());
    Ok(ProductExponents {
        exponents: exps,
        integral,
    })
}

/// In place: `g ← g · (1 - q^n)^b` for rational `b`, via the binomial series.
fn multiply_binomial(g: &mut [Rational], n: usize, b: &Rational) {
    let len = g.len();
    if b.is_integer() && b.abs() <= rat(4, 1) {
        let e = i64::try_from(b.to_integer()).unwrap();
        for _ in 0..e.unsigned_abs() {
            if e < 0 {
                for i in n..len {
                    let t = g[i - n].clone();
                    g[i] += t;
                }
            } else {
                for i in (n..len).rev() {
                    let t = g[i - n].clone();
                    g[i] -= t;
                }
            }
        }
        return;
    }
    // coefficients of (1 - x)^b: c_0 = 1, c_k = c_{k-1} · (k - 1 - b) / k
    let kmax = (len - 1) / n;
    let mut bin = Vec::with_capacity(kmax + 1);
    bin.push(Rational::one());
    for k in 1..=kmax {
        let prev = &bin[k - 1];
        let kk = Rational::from_integer(BigInt::from(k));
        let next = prev * (&kk - Rational::one() - b) / &kk;
        bin.push(next);
    }
    let src = g.to_vec();
    for i in 0..len {
        let mut acc = Rational::zero();
        for (k, c) in bin.iter().enumerate() {
            let j = k * n;
            if j > i {
                break;
            }
            if !src[i - j].is_zero() {
                acc += c * &src[i - j];
            }
        }
        g[i] = acc;
    }
}

/// `η = q^(1/24) ∏_{n >= 1} (1 - q^n)`, known below `q^prec`.
pub fn eta_expansion(prec: &Rational) -> PuiseuxSeries<Rational> {
    let s = rat(1, 24);
    let len = terms_below(&(prec - &s));
    let mut c = vec![BigInt::zero(); len];
    if len > 0 {
        c[0] = BigInt::one();
    }
    int_apply_progression(&mut c, 1, 0, 1);
    if len == 0 {
        return PuiseuxSeries::zero((), prec);
    }
    PuiseuxSeries::from_integer_body(&s, &c)
}
