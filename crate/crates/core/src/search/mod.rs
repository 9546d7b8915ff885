//! Necessary conditions on the residues of a modular set: the Bernoulli
//! maxima `β_t`, special points, candidate sets `C_n(l)` and the level bound.

mod bound;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{divisors, rat, Rational};
use crate::error::{Error, Result};
use crate::units::{bernoulli_b, canonical_residue, UnitProduct};

pub use bound::{level_bound, level_excluded, level_excluded_sharp, max_level, small_representative};

/// A point of `(Z/lZ)^n` up to unit scaling, sign changes and permutation.
///
/// Stored as the lexicographically least sorted tuple of canonical residues
/// `min(x, l - x)` over all unit multiples.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjPoint {
    level: u64,
    coords: Vec<u64>,
}

fn units_mod(t: u64) -> Vec<u64> {
    if t == 1 {
        return vec![0];
    }
    (1..t).filter(|a| a.gcd(&t) == 1).collect()
}

fn scaled_sorted(coords: &[u64], u: u64, l: u64) -> Vec<u64> {
    let mut v: Vec<u64> = coords
        .iter()
        .map(|&x| canonical_residue(((u as u128 * x as u128) % l as u128) as i64, l))
        .collect();
    v.sort_unstable();
    v
}

impl ProjPoint {
    pub fn new(level: u64, coords: &[i64]) -> Result<Self> {
        if level < 1 {
            return Err(Error::InvalidLevel(level as i64));
        }
        let base: Vec<u64> = coords.iter().map(|&x| canonical_residue(x, level)).collect();
        Ok(Self::from_canonical_residues(level, &base))
    }

    fn from_canonical_residues(level: u64, coords: &[u64]) -> Self {
        let best = units_mod(level)
            .into_iter()
            .map(|u| scaled_sorted(coords, u.max(1), level))
            .min()
            .unwrap_or_default();
        ProjPoint {
            level,
            coords: best,
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// Distinct sorted canonical tuples `u·P` over the units `u`.
    pub fn unit_orbit(&self) -> BTreeSet<Vec<u64>> {
        units_mod(self.level)
            .into_iter()
            .map(|u| scaled_sorted(&self.coords, u.max(1), self.level))
            .collect()
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", cs.join(":"))
    }
}

/// `β_t(P) = max_{a ∈ (Z/tZ)^*} Σ_j B(a·a_j/t)`.
pub fn beta(p: &ProjPoint, t: u64) -> Result<Rational> {
    if t == 0 || p.level % t != 0 {
        return Err(Error::NotADivisor {
            small: t,
            large: p.level,
        });
    }
    let t_i = t as i64;
    Ok(units_mod(t)
        .into_iter()
        .map(|a| {
            p.coords
                .iter()
                .map(|&x| bernoulli_b(&rat((a * x % t) as i64, t_i)))
                .sum::<Rational>()
        })
        .max()
        .unwrap())
}

/// Precomputed divisors and unit groups for the special-point test at level `l`.
struct Sieve {
    n: i64,
    /// `(t, units mod t)`, with `t = l` first since it rejects most points.
    divisors: Vec<(u64, Vec<u64>)>,
}

impl Sieve {
    fn new(n: usize, l: u64) -> Self {
        let mut ds: Vec<(u64, Vec<u64>)> = divisors(l).into_iter().map(|t| (t, units_mod(t))).collect();
        ds.reverse();
        Sieve {
            n: n as i64,
            divisors: ds,
        }
    }

    /// `None` if the point is not special, else a bitmask (indexed like
    /// `divisors`) of the `t` where `β_t` equals `n/(6t²)`.
    ///
    /// Uses `6t²·B(y/t) = 6y² - 6yt + t²`, so the test is in integers.
    fn test(&self, coords: &[u64]) -> Option<u64> {
        let mut attained = 0u64;
        for (i, (t, units)) in self.divisors.iter().enumerate() {
            let t = *t as i64;
            let mut best = i64::MIN;
            for &a in units {
                let mut s = 0i64;
                for &x in coords {
                    let y = (a as i64 * x as i64) % t;
                    s += 6 * y * y - 6 * y * t + t * t;
                }
                if s > self.n {
                    return None;
                }
                best = best.max(s);
            }
            if best == self.n {
                attained |= 1 << i;
            }
        }
        Some(attained)
    }
}

/// `Σ_j B(a·a_j/t) <= n/(6t²)` for every `t | l` and every `a` prime to `t`.
pub fn is_special(coords: &[i64], l: u64) -> bool {
    let reduced: Vec<u64> = coords.iter().map(|&x| x.rem_euclid(l as i64) as u64).collect();
    Sieve::new(coords.len(), l).test(&reduced).is_some()
}

/// The union `C_n(l)` of all pre-modular subsets of `P^{n-1}(Z/lZ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    #[serde(rename = "l")]
    pub level: u64,
    pub n: usize,
    pub points: BTreeSet<ProjPoint>,
    /// Whether some special point attains `β_t = n/(6t²)`, per divisor `t`.
    #[serde(skip)]
    pub attained: BTreeMap<u64, bool>,
}

impl CandidateSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `{"l", "n", "points"}` with each point as its coordinate list.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "l": self.level,
            "n": self.n,
            "points": self.points.iter().map(|p| p.coords.clone()).collect::<Vec<_>>(),
        })
    }
}

/// Visits every nondecreasing tuple of length `n` with entries in `0..=max`.
fn for_each_tuple(n: usize, lo: u64, max: u64, prefix: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
    if prefix.len() == n {
        f(prefix);
        return;
    }
    for x in lo..=max {
        prefix.push(x);
        for_each_tuple(n, x, max, prefix, f);
        prefix.pop();
    }
}

/// Collects the special points of `(Z/lZ)^n` up to the orbit action, together
/// with the divisors at which equality is attained.
fn special_points(n: usize, l: u64) -> (BTreeSet<ProjPoint>, u64) {
    let sieve = Sieve::new(n, l);
    // For prime l every orbit has a point with all |coords| <= l^(1-1/n) + 1.
    let max = if crate::algebra::smallest_prime_factor(l) == l {
        bound::small_coordinate_limit(n, l).min(l / 2)
    } else {
        l / 2
    };
    let found: Vec<(BTreeSet<ProjPoint>, u64)> = (0..=max)
        .into_par_iter()
        .map(|first| {
            let mut pts = BTreeSet::new();
            let mut mask = 0u64;
            let mut prefix = vec![first];
            for_each_tuple(n, first, max, &mut prefix, &mut |c| {
                if c.iter().all(|&x| x == 0) {
                    return;
                }
                if let Some(m) = sieve.test(c) {
                    mask |= m;
                    pts.insert(ProjPoint::from_canonical_residues(l, c));
                }
            });
            (pts, mask)
        })
        .collect();
    let mut pts = BTreeSet::new();
    let mut mask = 0;
    for (p, m) in found {
        pts.extend(p);
        mask |= m;
    }
    (pts, mask)
}

/// `C_n(l)`: all special points if every divisor `t | l` (including `t = 1`)
/// has a point with `β_t(P) = n/(6t²)`, and the empty set otherwise.
///
/// A pre-modular subset must attain every maximum, so if the set of all special
/// points fails to, no subset can; if it succeeds, it is itself pre-modular and
/// contains every other pre-modular subset.
pub fn candidate_set(n: usize, l: u64) -> Result<CandidateSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if l < 2 {
        return Err(Error::InvalidLevel(l as i64));
    }
    let (points, mask) = special_points(n, l);
    let mut ds = divisors(l);
    ds.reverse();
    let attained: BTreeMap<u64, bool> = ds
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, mask & (1 << i) != 0))
        .collect();
    let all = attained.values().all(|&b| b);
    Ok(CandidateSet {
        level: l,
        n,
        points: if all { points } else { BTreeSet::new() },
        attained,
    })
}

/// The nonempty `C_n(l)` for `2 <= l <= top`, skipping levels above the
/// special-point bound and levels with a proper divisor whose set is empty.
pub fn nonempty_candidate_sets(n: usize, top: u64) -> Result<Vec<CandidateSet>> {
    let mut nonempty: BTreeMap<u64, bool> = BTreeMap::new();
    let mut out = Vec::new();
    for l in 2..=top {
        if level_excluded(n as u32, l) {
            continue;
        }
        let pruned = divisors(l)
            .into_iter()
            .any(|t| t > 1 && t < l && nonempty.get(&t) == Some(&false));
        if pruned {
            nonempty.insert(l, false);
            continue;
        }
        let c = candidate_set(n, l)?;
        nonempty.insert(l, !c.is_empty());
        if !c.is_empty() {
            out.push(c);
        }
    }
    Ok(out)
}

/// All products `[a_1, …, a_n]_l` whose residues lie in the orbit of a candidate.
/// Points with a zero coordinate have no lift.
pub fn lifts_of_candidates(c: &CandidateSet) -> BTreeSet<UnitProduct> {
    let mut out = BTreeSet::new();
    for p in &c.points {
        if p.coords.contains(&0) {
            continue;
        }
        for v in p.unit_orbit() {
            let rs: Vec<i64> = v.iter().map(|&x| x as i64).collect();
            out.insert(UnitProduct::new(c.level, &rs).expect("nonzero residues"));
        }
    }
    out
}

/// The projective class of a product's residues.
pub fn projective_image(p: &UnitProduct) -> ProjPoint {
    ProjPoint::from_canonical_residues(p.level(), p.residues())
}

#[cfg(test)]
mod tests;
