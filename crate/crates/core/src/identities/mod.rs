//! Nahm sums `f_{A,b,c}` and exact checks of the Rogers-Ramanujan and
//! Andrews-Gordon identities against products of the units `[r]_l`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{format_rational, rat, sqrt_bracket, Rational};
use crate::error::{Error, Result};
use crate::qseries::PuiseuxSeries;
use crate::units::{unit_expansion, UnitProduct};

/// `f_{A,b,c} = Σ_{n >= 0} q^{nAnᵗ + b·n + c} / ((q)_{n_1} ⋯ (q)_{n_r})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NahmData {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    c: Rational,
    /// `A = Uᵗ·diag(d)·U` with `U` unit upper triangular.
    d: Vec<Rational>,
    u: Vec<Vec<Rational>>,
}

impl NahmData {
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Rational>, c: Rational) -> Result<Self> {
        let r = a.len();
        if b.len() != r {
            return Err(Error::LengthMismatch(b.len(), r));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != r {
                return Err(Error::LengthMismatch(row.len(), r));
            }
            for j in 0..r {
                if a[i][j] != a[j][i] {
                    return Err(Error::NotPositiveDefinite("matrix is not symmetric".into()));
                }
            }
        }
        let (d, u) = ldl(&a)?;
        Ok(NahmData { a, b, c, d, u })
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Vec<Rational>] {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    /// `nAnᵗ + b·n` (without `c`).
    pub fn quadratic_value(&self, n: &[i64]) -> Rational {
        let r = self.rank();
        let mut s = Rational::zero();
        for i in 0..r {
            if n[i] == 0 {
                continue;
            }
            let ni = Rational::from_integer(BigInt::from(n[i]));
            for j in 0..r {
                if n[j] != 0 {
                    s += &self.a[i][j] * &ni * Rational::from_integer(BigInt::from(n[j]));
                }
            }
            s += &self.b[i] * &ni;
        }
        s
    }

    /// All `n >= 0` with `nAnᵗ + b·n < bound`, by completing the square and
    /// bounding one coordinate at a time from the last.
    pub fn lattice_points(&self, bound: &Rational) -> Vec<Vec<i64>> {
        let r = self.rank();
        if r == 0 {
            return if Rational::zero() < *bound { vec![vec![]] } else { vec![] };
        }
        // h = A^{-1} b / 2, so that Q(n) = (n + h)A(n + h)ᵗ - hAhᵗ
        let h = solve_spd(&self.d, &self.u, &self.b.iter().map(|x| x / rat(2, 1)).collect::<Vec<_>>());
        let hah: Rational = (0..r)
            .map(|i| (0..r).map(|j| &h[i] * &self.a[i][j] * &h[j]).sum::<Rational>())
            .sum();
        let total = bound + hah;
        let mut out = Vec::new();
        if total.is_positive() {
            let mut x = vec![0i64; r];
            self.descend(r, &h, &total, &mut x, &mut out, bound);
        }
        out
    }

    /// Chooses `x[k-1]` given `x[k..]`, with `rem` the budget left for the first `k` squares.
    fn descend(
        &self,
        k: usize,
        h: &[Rational],
        rem: &Rational,
        x: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
        bound: &Rational,
    ) {
        if k == 0 {
            if self.quadratic_value(x) < *bound {
                out.push(x.clone());
            }
            return;
        }
        let i = k - 1;
        // y_i = (x_i + h_i) + Σ_{j>i} U_ij (x_j + h_j), and d_i y_i² <= rem
        let mut shift = h[i].clone();
        for j in (i + 1)..self.rank() {
            shift += &self.u[i][j] * (Rational::from_integer(BigInt::from(x[j])) + &h[j]);
        }
        let (_, width) = sqrt_bracket(&(rem / &self.d[i]), 1 << 20);
        let lo = (-&width - &shift).ceil().to_integer().max(BigInt::zero());
        let hi = (&width - &shift).floor().to_integer();
        let (Ok(lo), Ok(hi)) = (i64::try_from(lo), i64::try_from(hi)) else {
            return;
        };
        for xi in lo..=hi {
            let y = Rational::from_integer(BigInt::from(xi)) + &shift;
            let used = &self.d[i] * &y * &y;
            if used > *rem {
                continue;
            }
            x[i] = xi;
            self.descend(i, h, &(rem - used), x, out, bound);
        }
        x[i] = 0;
    }
}

/// `A = Uᵗ·diag(d)·U`; fails unless every pivot is positive.
fn ldl(a: &[Vec<Rational>]) -> Result<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let r = a.len();
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut d = Vec::with_capacity(r);
    let mut u = vec![vec![Rational::zero(); r]; r];
    for i in 0..r {
        let p = m[i][i].clone();
        if !p.is_positive() {
            return Err(Error::NotPositiveDefinite(format!(
                "pivot {} at position {i} is not positive",
                format_rational(&p)
            )));
        }
        u[i][i] = Rational::one();
        for j in (i + 1)..r {
            u[i][j] = &m[i][j] / &p;
        }
        for j in (i + 1)..r {
            for k in (i + 1)..r {
                let t = &u[i][j] * &m[i][k];
                m[j][k] -= t;
            }
        }
        d.push(p);
    }
    Ok((d, u))
}

/// Solves `A x = v` from the factorization.
fn solve_spd(d: &[Rational], u: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    let r = d.len();
    // Uᵗ z = v
    let mut z = vec![Rational::zero(); r];
    for i in 0..r {
        let mut s = v[i].clone();
        for k in 0..i {
            s -= &u[k][i] * &z[k];
        }
        z[i] = s;
    }
    for i in 0..r {
        z[i] = &z[i] / &d[i];
    }
    // U x = z
    let mut x = vec![Rational::zero(); r];
    for i in (0..r).rev() {
        let mut s = z[i].clone();
        for k in (i + 1)..r {
            s -= &u[i][k] * &x[k];
        }
        x[i] = s;
    }
    x
}

/// `f_{A,b,c}` with every coefficient of `q^e`, `e < prec`.
pub fn nahm_sum_expansion(data: &NahmData, prec: &Rational) -> PuiseuxSeries<Rational> {
    let points = data.lattice_points(&(prec - &data.c));
    if points.is_empty() {
        return PuiseuxSeries::zero((), prec);
    }
    let exps: Vec<Rational> = points.iter().map(|n| data.quadratic_value(n) + &data.c).collect();
    let denom = exps
        .iter()
        .fold(prec.denom().clone(), |acc, e| acc.lcm(e.denom()));
    let d = u64::try_from(&denom).expect("lattice denominator out of range");
    let start = exps.iter().min().unwrap().clone();
    let scale = Rational::from_integer(denom.clone());
    let lead = i64::try_from((&start * &scale).to_integer()).unwrap();
    let len = i64::try_from(((prec - &start) * &scale).ceil().to_integer()).unwrap() as usize;
    let mut coeffs = vec![BigInt::zero(); len];
    let step = d as usize;
    let bodies: Vec<(usize, Vec<BigInt>)> = points
        .par_iter()
        .zip(&exps)
        .map(|(n, e)| {
            let offset = i64::try_from(((e - &start) * &scale).to_integer()).unwrap() as usize;
            let terms = (len - offset).div_ceil(step);
            let mut body = vec![BigInt::zero(); terms];
            body[0] = BigInt::one();
            for &ni in n {
                for j in 1..=ni as usize {
                    for i in j..terms {
                        let t = body[i - j].clone();
                        body[i] += t;
                    }
                }
            }
            (offset, body)
        })
        .collect();
    for (offset, body) in bodies {
        for (k, c) in body.into_iter().enumerate() {
            coeffs[offset + k * step] += c;
        }
    }
    let coeffs = coeffs.into_iter().map(Rational::from_integer).collect();
    PuiseuxSeries::new((), d, lead, coeffs, len as i64)
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    /// Integer steps past the leading power that were compared.
    pub depth: usize,
    /// Lowest exponent where the two sides differ.
    pub first_mismatch: Option<String>,
}

fn compare(name: String, lhs: &PuiseuxSeries<Rational>, rhs: &PuiseuxSeries<Rational>, bound: &Rational, depth: usize) -> IdentityCheck {
    let diff = lhs.truncate(bound).sub(&rhs.truncate(bound));
    let first_mismatch = diff.leading_exponent().map(|e| format_rational(&e));
    IdentityCheck {
        name,
        passed: first_mismatch.is_none(),
        depth,
        first_mismatch,
    }
}

/// `f_{(1), (b), c}` against a product of units, compared below `q^{c + depth}`.
fn check_rank_one(name: &str, b: i64, unit: &UnitProduct, depth: usize) -> IdentityCheck {
    let c = unit.leading_exponent();
    let data = NahmData::new(vec![vec![Rational::one()]], vec![rat(b, 1)], c.clone()).unwrap();
    let bound = &c + rat(depth as i64, 1);
    let lhs = nahm_sum_expansion(&data, &bound);
    let rhs = unit_expansion(unit, &bound);
    compare(name.to_string(), &lhs, &rhs, &bound, depth)
}

/// Both Rogers-Ramanujan identities:
/// `f_{1,0,-1/60} = [1]_5` and `f_{1,1,11/60} = [2]_5`.
pub fn verify_rogers_ramanujan(depth: usize) -> Vec<IdentityCheck> {
    verify_rogers_ramanujan_with(depth, 0, 1)
}

/// The same check with the two linear terms replaced, for negative controls.
pub fn verify_rogers_ramanujan_with(depth: usize, b1: i64, b2: i64) -> Vec<IdentityCheck> {
    let u1 = UnitProduct::new(5, &[1]).unwrap();
    let u2 = UnitProduct::new(5, &[2]).unwrap();
    vec![
        check_rank_one("rogers-ramanujan:1", b1, &u1, depth),
        check_rank_one("rogers-ramanujan:2", b2, &u2, depth),
    ]
}

/// How the linear term of the `r`-th Andrews-Gordon sum is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinearForm {
    /// `b_i = min(i + 1 - r, 0)`.
    Min,
    /// `b_i = max(i + 1 - r, 0)`.
    Max,
}

/// Which product the `r`-th sum is compared with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pairing {
    /// `φ_r`.
    Identity,
    /// `φ_{k+1-r}`.
    Reversed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgConvention {
    pub linear: LinearForm,
    pub pairing: Pairing,
}

/// The convention that reproduces the products; see [`resolve_ag_convention`].
pub const AG_CONVENTION: AgConvention = AgConvention {
    linear: LinearForm::Max,
    pairing: Pairing::Identity,
};

/// `φ_r = ∏_{1 <= j <= k, j != r} [j]_l` with `k = (l-1)/2`.
pub fn ag_product(l: u64, r: u64) -> UnitProduct {
    let k = (l - 1) / 2;
    let rs: Vec<i64> = (1..=k).filter(|&j| j != r).map(|j| j as i64).collect();
    UnitProduct::new(l, &rs).unwrap()
}

/// Nahm data of the `r`-th Andrews-Gordon sum at level `l`: `A = (min(i,j))` of size `k-1`.
pub fn ag_nahm_data(l: u64, r: u64, linear: LinearForm, c: Rational) -> NahmData {
    let m = ((l - 1) / 2 - 1) as usize;
    let a = (0..m)
        .map(|i| (0..m).map(|j| rat(i.min(j) as i64 + 1, 1)).collect())
        .collect();
    let b = (1..=m as i64)
        .map(|i| {
            let v = i + 1 - r as i64;
            rat(
                match linear {
                    LinearForm::Min => v.min(0),
                    LinearForm::Max => v.max(0),
                },
                1,
            )
        })
        .collect();
    NahmData::new(a, b, c).unwrap()
}

/// Per-`r` comparison of the Andrews-Gordon sums with the products `φ_r` under a convention.
pub fn verify_andrews_gordon_with(l: u64, depth: usize, conv: AgConvention) -> Result<Vec<IdentityCheck>> {
    if l < 5 || l % 2 == 0 {
        return Err(Error::InvalidLevel(l as i64));
    }
    let k = (l - 1) / 2;
    Ok((1..=k)
        .into_par_iter()
        .map(|r| {
            let target = match conv.pairing {
                Pairing::Identity => r,
                Pairing::Reversed => k + 1 - r,
            };
            let unit = ag_product(l, target);
            let c = unit.leading_exponent();
            let data = ag_nahm_data(l, r, conv.linear, c.clone());
            let bound = &c + rat(depth as i64, 1);
            let lhs = nahm_sum_expansion(&data, &bound);
            let rhs = unit_expansion(&unit, &bound);
            compare(format!("andrews-gordon:{l}:{r}"), &lhs, &rhs, &bound, depth)
        })
        .collect())
}

pub fn verify_andrews_gordon(l: u64, depth: usize) -> Result<Vec<IdentityCheck>> {
    verify_andrews_gordon_with(l, depth, AG_CONVENTION)
}

/// Tries every combination of linear form and pairing at `l = 5` and `l = 7`
/// and returns those for which all identities hold to `depth`.
pub fn resolve_ag_convention(depth: usize) -> Vec<AgConvention> {
    let mut ok = Vec::new();
    for linear in [LinearForm::Min, LinearForm::Max] {
        for pairing in [Pairing::Identity, Pairing::Reversed] {
            let conv = AgConvention { linear, pairing };
            let pass = [5, 7].iter().all(|&l| {
                verify_andrews_gordon_with(l, depth, conv)
                    .unwrap()
                    .iter()
                    .all(|c| c.passed)
            });
            if pass {
                ok.push(conv);
            }
        }
    }
    ok
}
