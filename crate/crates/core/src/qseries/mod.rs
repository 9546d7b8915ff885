//! Truncated series in fractional powers of `q`.
//!
//! A [`PuiseuxSeries`] stores `q^(lead/d) · Σ c_i q^(i/d)` together with an
//! absolute precision: every coefficient of `q^e` with `e < (lead + prec)/d`
//! is known. The zero series keeps no coefficients and records only that end.

mod product;
mod render;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::algebra::{format_rational, Field, Rational};
use crate::error::{Error, Result};

pub use product::{
    build_product, eta_expansion, extract_product_exponents, prog_product, ProductExponents,
};
pub(crate) use product::{int_apply_progression, terms_below};

#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries<F: Field> {
    ctx: F::Ctx,
    denom: u64,
    lead: i64,
    coeffs: Vec<F>,
    prec: i64,
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// `x · d` as an integer when it lies on the lattice `(1/d)·Z`.
fn on_lattice(x: &Rational, d: u64) -> Option<i64> {
    let y = x * Rational::from_integer(BigInt::from(d));
    if y.is_integer() {
        i64::try_from(y.to_integer()).ok()
    } else {
        None
    }
}

impl<F: Field> PuiseuxSeries<F> {
    /// Builds and normalizes `q^(lead/d)·Σ coeffs[i] q^(i/d) + O(q^((lead+prec)/d))`.
    pub fn new(ctx: F::Ctx, denom: u64, lead: i64, coeffs: Vec<F>, prec: i64) -> Self {
        assert!(denom >= 1, "lattice denominator must be positive");
        assert!(prec >= coeffs.len() as i64, "precision below stored coefficients");
        let mut s = PuiseuxSeries {
            ctx,
            denom,
            lead,
            coeffs,
            prec,
        };
        s.normalize();
        s
    }

    /// The zero series known below `q^end`.
    pub fn zero(ctx: F::Ctx, end: &Rational) -> Self {
        let d = u64::try_from(end.denom()).expect("lattice denominator out of range");
        let lead = on_lattice(end, d).unwrap();
        Self::new(ctx, d, lead, Vec::new(), 0)
    }

    /// The constant `1` known below `q^end` (`end > 0`).
    pub fn one(ctx: F::Ctx, end: &Rational) -> Self {
        let c = F::one_in(&ctx);
        Self::monomial(ctx, c, &Rational::zero(), end)
    }

    /// `c · q^e` known below `q^end`.
    pub fn monomial(ctx: F::Ctx, c: F, e: &Rational, end: &Rational) -> Self {
        let d = e.denom().lcm(end.denom());
        let d = u64::try_from(&d).expect("lattice denominator out of range");
        let lead = on_lattice(e, d).unwrap();
        let stop = on_lattice(end, d).unwrap();
        if stop <= lead {
            return Self::new(ctx, d, stop, Vec::new(), 0);
        }
        Self::new(ctx, d, lead, vec![c], stop - lead)
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn lead(&self) -> i64 {
        self.lead
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Stored coefficients; entries past the end of the vector (but below the
    /// precision) are zero.
    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Leading exponent `lead/d`, or `None` for the zero series.
    pub fn leading_exponent(&self) -> Option<Rational> {
        if self.is_zero() {
            None
        } else {
            Some(Rational::new(self.lead.into(), (self.denom as i64).into()))
        }
    }

    pub fn leading_coefficient(&self) -> Option<&F> {
        self.coeffs.first()
    }

    /// Coefficients are known for all exponents strictly below this value.
    pub fn precision_end(&self) -> Rational {
        Rational::new((self.lead + self.prec).into(), (self.denom as i64).into())
    }

    fn end_units(&self) -> i64 {
        self.lead + self.prec
    }

    fn normalize(&mut self) {
        match self.coeffs.iter().position(|c| !c.eq_zero()) {
            None => {
                self.lead += self.prec;
                self.prec = 0;
                self.coeffs.clear();
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.lead += k as i64;
                self.prec -= k as i64;
                while self.coeffs.last().is_some_and(|c| c.eq_zero()) {
                    self.coeffs.pop();
                }
            }
        }
        let mut g = gcd_i64(self.denom as i64, self.lead);
        g = gcd_i64(g, self.prec);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            if g == 1 {
                break;
            }
            if !c.eq_zero() {
                g = gcd_i64(g, i as i64);
            }
        }
        if g > 1 {
            let g = g as usize;
            self.denom /= g as u64;
            self.lead /= g as i64;
            self.prec /= g as i64;
            self.coeffs = self.coeffs.iter().step_by(g).cloned().collect();
        }
    }

    /// The same series on the finer lattice `(1/d)·Z`, with `self.denom | d`.
    /// The result is deliberately left unnormalized.
    pub fn to_lattice(&self, d: u64) -> Result<Self> {
        if d % self.denom != 0 {
            return Err(Error::NotADivisor {
                small: self.denom,
                large: d,
            });
        }
        let k = (d / self.denom) as usize;
        let mut coeffs = Vec::new();
        if !self.coeffs.is_empty() {
            coeffs = vec![F::zero_in(&self.ctx); (self.coeffs.len() - 1) * k + 1];
            for (i, c) in self.coeffs.iter().enumerate() {
                coeffs[i * k] = c.clone();
            }
        }
        Ok(PuiseuxSeries {
            ctx: self.ctx.clone(),
            denom: d,
            lead: self.lead * k as i64,
            coeffs,
            prec: self.prec * k as i64,
        })
    }

    /// Coefficient of `q^e`.
    pub fn coefficient(&self, e: &Rational) -> Result<F> {
        if *e >= self.precision_end() {
            return Err(Error::InsufficientPrecision {
                needed: format_rational(e),
                available: format_rational(&self.precision_end()),
            });
        }
        match on_lattice(e, self.denom) {
            Some(u) if u >= self.lead => Ok(self
                .coeffs
                .get((u - self.lead) as usize)
                .cloned()
                .unwrap_or_else(|| F::zero_in(&self.ctx))),
            _ => Ok(F::zero_in(&self.ctx)),
        }
    }

    /// Coefficients at `base + i/step` for `0 <= i < count`.
    pub fn window(&self, base: &Rational, step: u64, count: usize) -> Result<Vec<F>> {
        let last = base + Rational::new(BigInt::from(count as i64 - 1), BigInt::from(step));
        if count > 0 && last >= self.precision_end() {
            return Err(Error::InsufficientPrecision {
                needed: format_rational(&last),
                available: format_rational(&self.precision_end()),
            });
        }
        let mut out = vec![F::zero_in(&self.ctx); count];
        if self.is_zero() {
            return Ok(out);
        }
        // Walk the stored coefficients and place those that land in the window.
        let step_r = Rational::new(BigInt::from(1), BigInt::from(step));
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.eq_zero() {
                continue;
            }
            let e = Rational::new(BigInt::from(self.lead + i as i64), BigInt::from(self.denom));
            let pos = (&e - base) / &step_r;
            if pos.is_negative() {
                continue;
            }
            if pos.is_integer() {
                let p = pos.to_integer();
                if p < BigInt::from(count) {
                    out[usize::try_from(&p).unwrap()] = c.clone();
                } else {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Drops everything at or above `q^end` (no effect if already less precise).
    pub fn truncate(&self, end: &Rational) -> Self {
        if *end >= self.precision_end() {
            return self.clone();
        }
        let d = self.denom.lcm(&u64::try_from(end.denom()).unwrap());
        let mut s = self.to_lattice(d).unwrap();
        let stop = on_lattice(end, d).unwrap();
        if stop <= s.lead {
            return Self::new(self.ctx.clone(), d, stop, Vec::new(), 0);
        }
        let keep = (stop - s.lead) as usize;
        s.coeffs.truncate(keep);
        s.prec = keep as i64;
        s.normalize();
        s
    }

    fn align(&self, other: &Self) -> (Self, Self) {
        let d = self.denom.lcm(&other.denom);
        (self.to_lattice(d).unwrap(), other.to_lattice(d).unwrap())
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let end = a.end_units().min(b.end_units());
        let start = a.lead.min(b.lead).min(end);
        let len = (end - start) as usize;
        let mut coeffs = vec![F::zero_in(&self.ctx); len];
        for s in [&a, &b] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let k = s.lead + i as i64 - start;
                if k >= len as i64 {
                    break;
                }
                coeffs[k as usize].plus_assign(c);
            }
        }
        Self::new(self.ctx.clone(), a.denom, start, coeffs, len as i64)
    }

    pub fn neg(&self) -> Self {
        PuiseuxSeries {
            ctx: self.ctx.clone(),
            denom: self.denom,
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|c| c.negate()).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(
            self.ctx.clone(),
            self.denom,
            self.lead,
            self.coeffs.iter().map(|x| x.times(c)).collect(),
            self.prec,
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        if a.is_zero() || b.is_zero() {
            // for a zero factor `lead` is its precision end
            return Self::new(self.ctx.clone(), a.denom, a.lead + b.lead, Vec::new(), 0);
        }
        let prec = a.prec.min(b.prec);
        let n = prec as usize;
        let mut coeffs = vec![F::zero_in(&self.ctx); n.min(a.coeffs.len() + b.coeffs.len())];
        // series on fine lattices are sparse
        let b_terms: Vec<(usize, &F)> = b
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, y)| !y.eq_zero())
            .collect();
        for (i, x) in a.coeffs.iter().enumerate() {
            if i >= coeffs.len() {
                break;
            }
            if x.eq_zero() {
                continue;
            }
            for &(j, y) in &b_terms {
                if i + j >= coeffs.len() {
                    break;
                }
                coeffs[i + j].fma_assign(x, y);
            }
        }
        Self::new(self.ctx.clone(), a.denom, a.lead + b.lead, coeffs, prec)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.prec as usize;
        let h0 = self.coeffs[0].inverse()?;
        let neg_h0 = h0.negate();
        let terms: Vec<(usize, &F)> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.eq_zero())
            .collect();
        let mut h: Vec<F> = Vec::with_capacity(n);
        h.push(h0);
        for k in 1..n {
            let mut acc = F::zero_in(&self.ctx);
            for &(j, f) in &terms {
                if j > k {
                    break;
                }
                if !h[k - j].eq_zero() {
                    acc.fma_assign(f, &h[k - j]);
                }
            }
            h.push(acc.times(&neg_h0));
        }
        Ok(Self::new(self.ctx.clone(), self.denom, -self.lead, h, self.prec))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        if k == 0 {
            if self.is_zero() {
                return Err(Error::DivisionByZero);
            }
            // relative precision carries over to the constant
            return Ok(Self::new(
                self.ctx.clone(),
                self.denom,
                0,
                vec![F::one_in(&self.ctx)],
                self.prec,
            ));
        }
        let mut result: Option<Self> = None;
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                result = Some(match result {
                    None => sq.clone(),
                    Some(r) => r.mul(&sq),
                });
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(result.unwrap())
    }

    /// Multiplies by the exact monomial `q^s`.
    pub fn shift(&self, s: &Rational) -> Self {
        let d = self.denom.lcm(&u64::try_from(s.denom()).unwrap());
        let mut out = self.to_lattice(d).unwrap();
        out.lead += on_lattice(s, d).unwrap();
        out.normalize();
        out
    }

    /// Substitutes `q ↦ q^a` for positive rational `a`.
    pub fn substitute_power(&self, a: &Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "substitution exponent {} must be positive",
                format_rational(a)
            )));
        }
        let num = i64::try_from(a.numer()).unwrap();
        let den = u64::try_from(a.denom()).unwrap();
        let k = num as usize;
        let mut coeffs = Vec::new();
        if !self.coeffs.is_empty() {
            coeffs = vec![F::zero_in(&self.ctx); (self.coeffs.len() - 1) * k + 1];
            for (i, c) in self.coeffs.iter().enumerate() {
                coeffs[i * k] = c.clone();
            }
        }
        Ok(Self::new(
            self.ctx.clone(),
            self.denom * den,
            self.lead * num,
            coeffs,
            self.prec * num,
        ))
    }

    /// Applies `f` to every coefficient, moving into another field.
    pub fn map<G: Field>(&self, ctx: G::Ctx, f: impl Fn(&F) -> G) -> PuiseuxSeries<G> {
        PuiseuxSeries::new(
            ctx,
            self.denom,
            self.lead,
            self.coeffs.iter().map(f).collect(),
            self.prec,
        )
    }

    /// Whether all coefficients below `q^bound` agree. Fails if either side is
    /// known only to a lower precision.
    pub fn agrees_with(&self, other: &Self, bound: &Rational) -> Result<bool> {
        for s in [self, other] {
            if s.precision_end() < *bound {
                return Err(Error::InsufficientPrecision {
                    needed: format_rational(bound),
                    available: format_rational(&s.precision_end()),
                });
            }
        }
        let diff = self.truncate(bound).sub(&other.truncate(bound));
        Ok(diff.is_zero())
    }

    /// The exponents (as rationals) at which nonzero coefficients are stored.
    pub fn support(&self) -> Vec<Rational> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.eq_zero())
            .map(|(i, _)| {
                Rational::new(
                    BigInt::from(self.lead + i as i64),
                    BigInt::from(self.denom as i64),
                )
            })
            .collect()
    }
}

impl PuiseuxSeries<Rational> {
    /// Constant `1` known below `q^end`.
    pub fn one_rational(end: &Rational) -> Self {
        Self::monomial((), Rational::from_integer(1.into()), &Rational::zero(), end)
    }

    /// Series with integer coefficients `body[i]` at `q^(s + i)`, known below `q^(s + body.len())`.
    pub fn from_integer_body(s: &Rational, body: &[BigInt]) -> Self {
        let d = u64::try_from(s.denom()).unwrap();
        let lead = on_lattice(s, d).unwrap();
        let k = d as usize;
        let mut coeffs = Vec::new();
        if !body.is_empty() {
            coeffs = vec![Rational::zero(); (body.len() - 1) * k + 1];
            for (i, c) in body.iter().enumerate() {
                coeffs[i * k] = Rational::from_integer(c.clone());
            }
        }
        Self::new((), d, lead, coeffs, (body.len() * k) as i64)
    }
}

#[cfg(test)]
mod tests;
