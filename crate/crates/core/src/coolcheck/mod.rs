//! Deciding whether the span of a set of products is invariant under
//! `z ↦ -1/z`, and enumerating the maximal such sets level by level.
//!
//! Every `[r_1,…,r_n]_l` satisfies `f(z+1) = c·f(z)`, so invariance under `T`
//! is automatic and only `S` is tested. The `S`-image is computed up to an
//! unknown nonzero constant; span membership does not depend on it.

mod report;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{frac, rat, CyclotomicField, CyclotomicNumber, Field, Rational, RationalEchelon};
use crate::error::{Error, Result};
use crate::qseries::PuiseuxSeries;
use crate::search::{lifts_of_candidates, max_level, nonempty_candidate_sets};
use crate::units::{ExpansionCache, UnitProduct};

pub use report::{ag_set, postprocess_report, power_set, table_csv, RowKind, TableRow};

/// Default number of coefficients on the lattice `(1/12l)·Z`: `24·n·l`,
/// i.e. `2n` integer steps past the lowest leading exponent.
pub fn expansion_depth(l: u64, n: usize) -> usize {
    24 * n * l as usize
}

fn fetch_unit(cache: Option<&ExpansionCache>, p: &UnitProduct, prec: &Rational) -> PuiseuxSeries<Rational> {
    match cache {
        Some(c) => (*c.unit(p, prec)).clone(),
        None => crate::units::unit_expansion(p, prec),
    }
}

fn fetch_transform(
    cache: Option<&ExpansionCache>,
    p: &UnitProduct,
    prec: &Rational,
) -> PuiseuxSeries<CyclotomicNumber> {
    match cache {
        Some(c) => (*c.s_transform(p, prec)).clone(),
        None => crate::units::s_transform_expansion(p, prec),
    }
}

/// One exponent class `e ≡ c (mod 1)` of the window `[base, end)`.
struct ClassBlock {
    start: Rational,
    count: usize,
    echelon: RationalEchelon,
    /// Indices into `SpanBasis::rows` of the rows pushed into `echelon`, in order.
    members: Vec<usize>,
}

/// The expansions of a set of products on a common window of exponents.
///
/// Each product is supported on a single class modulo 1, so the span splits
/// into independent blocks, one per class.
pub struct SpanBasis {
    level: u64,
    depth: usize,
    base: Rational,
    rows: Vec<(UnitProduct, PuiseuxSeries<Rational>)>,
    blocks: BTreeMap<Rational, ClassBlock>,
}

impl SpanBasis {
    /// Rows for `set` on `[base, base + depth/(12l))`, with `base` at most
    /// every leading exponent in the set.
    pub fn new(
        set: &[UnitProduct],
        base: &Rational,
        depth: usize,
        cache: Option<&ExpansionCache>,
    ) -> Result<Self> {
        let level = common_level(set)?;
        let end = window_end(base, depth, level);
        let rows: Vec<(UnitProduct, PuiseuxSeries<Rational>)> = set
            .par_iter()
            .map(|p| (p.clone(), fetch_unit(cache, p, &end)))
            .collect();
        let mut blocks: BTreeMap<Rational, ClassBlock> = BTreeMap::new();
        for (i, (p, f)) in rows.iter().enumerate() {
            let lead = p.leading_exponent();
            if lead < *base {
                return Err(Error::InvalidArgument(format!(
                    "window base lies above the leading exponent of {p}"
                )));
            }
            let class = frac(&lead);
            let block = blocks.entry(class.clone()).or_insert_with(|| {
                let start = first_in_class(base, &class);
                let count = count_below(&start, &end);
                ClassBlock {
                    echelon: RationalEchelon::rational(count),
                    start,
                    count,
                    members: Vec::new(),
                }
            });
            let v = f.window(&block.start, 1, block.count)?;
            block.echelon.push(&v)?;
            block.members.push(i);
        }
        Ok(SpanBasis {
            level,
            depth,
            base: base.clone(),
            rows,
            blocks,
        })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    /// Exponents strictly below this value are compared.
    pub fn end(&self) -> Rational {
        window_end(&self.base, self.depth, self.level)
    }

    pub fn products(&self) -> impl Iterator<Item = &UnitProduct> {
        self.rows.iter().map(|(p, _)| p)
    }

    /// Coefficients `c_g` with `target = Σ c_g·g` below the window end, or `None`.
    pub fn solve(&self, target: &PuiseuxSeries<CyclotomicNumber>) -> Result<Option<Vec<CyclotomicNumber>>> {
        let field = CyclotomicField::get(self.level);
        let end = self.end();
        if target.precision_end() < end {
            return Err(Error::InsufficientPrecision {
                needed: crate::algebra::format_rational(&end),
                available: crate::algebra::format_rational(&target.precision_end()),
            });
        }
        // anything in the window outside the blocks' classes cannot be matched
        for e in target.support() {
            if e >= end {
                break;
            }
            if e < self.base || !self.blocks.contains_key(&frac(&e)) {
                return Ok(None);
            }
        }
        let mut coeffs = vec![CyclotomicNumber::zero_in(&field); self.rows.len()];
        for block in self.blocks.values() {
            let t = target.window(&block.start, 1, block.count)?;
            match block.echelon.solve_cyclotomic(&field, &t)? {
                None => return Ok(None),
                Some(c) => {
                    for (k, ci) in c.into_iter().enumerate() {
                        coeffs[block.members[k]] = ci;
                    }
                }
            }
        }
        Ok(Some(coeffs))
    }

    /// `Σ c_g·g` truncated at the window end.
    pub fn combine(&self, coeffs: &[CyclotomicNumber]) -> PuiseuxSeries<CyclotomicNumber> {
        let field = CyclotomicField::get(self.level);
        let end = self.end();
        let mut acc = PuiseuxSeries::zero(field.clone(), &end);
        for ((_, f), c) in self.rows.iter().zip(coeffs) {
            if c.eq_zero() {
                continue;
            }
            let g = f
                .truncate(&end)
                .map(field.clone(), |x| CyclotomicNumber::from_rational(&field, x).times(c));
            acc = acc.add(&g);
        }
        acc
    }
}

fn common_level(set: &[UnitProduct]) -> Result<u64> {
    let l = set
        .first()
        .map(|p| p.level())
        .ok_or_else(|| Error::InvalidArgument("empty set".into()))?;
    if let Some(p) = set.iter().find(|p| p.level() != l) {
        return Err(Error::LevelMismatch(l, p.level()));
    }
    Ok(l)
}

fn window_end(base: &Rational, depth: usize, l: u64) -> Rational {
    base + rat(depth as i64, 12 * l as i64)
}

fn first_in_class(base: &Rational, class: &Rational) -> Rational {
    let k = (base - class).ceil();
    class + k
}

fn count_below(start: &Rational, end: &Rational) -> usize {
    let span = end - start;
    if span <= Rational::from_integer(BigInt::from(0)) {
        0
    } else {
        usize::try_from(span.ceil().to_integer()).unwrap()
    }
}

/// Outcome of the invariance test for one set.
#[derive(Clone, Debug)]
pub struct InvarianceResult {
    pub invariant: bool,
    /// For each product of the set whose image lies in the span, its coefficients.
    pub witnesses: BTreeMap<UnitProduct, Vec<CyclotomicNumber>>,
    /// Products whose image is outside the span.
    pub failures: BTreeSet<UnitProduct>,
}

fn min_leading_exponent(set: &[UnitProduct]) -> Rational {
    set.iter().map(|p| p.leading_exponent()).min().unwrap()
}

fn test_members(
    basis: &SpanBasis,
    members: &[UnitProduct],
    cache: Option<&ExpansionCache>,
) -> Result<Vec<(UnitProduct, Option<Vec<CyclotomicNumber>>)>> {
    let end = basis.end();
    members
        .par_iter()
        .map(|p| {
            let image = fetch_transform(cache, p, &end);
            Ok((p.clone(), basis.solve(&image)?))
        })
        .collect()
}

/// Whether the span of `set` is invariant under `z ↦ -1/z`, to the given depth.
///
/// The empty product is the constant 1, which is fixed by every transformation.
pub fn is_invariant_set(
    set: &BTreeSet<UnitProduct>,
    depth: usize,
    cache: Option<&ExpansionCache>,
) -> Result<InvarianceResult> {
    let members: Vec<UnitProduct> = set.iter().cloned().collect();
    if members.is_empty() {
        return Err(Error::InvalidArgument("empty set".into()));
    }
    let base = min_leading_exponent(&members);
    let basis = SpanBasis::new(&members, &base, depth, cache)?;
    let mut witnesses = BTreeMap::new();
    let mut failures = BTreeSet::new();
    for (p, w) in test_members(&basis, &members, cache)? {
        match w {
            Some(c) => {
                witnesses.insert(p, c);
            }
            None => {
                failures.insert(p);
            }
        }
    }
    Ok(InvarianceResult {
        invariant: failures.is_empty(),
        witnesses,
        failures,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Empty,
    FixedPoint,
}

/// Result of the shrinking iteration at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoolSetReport {
    pub n: usize,
    pub l: u64,
    pub status: Status,
    pub set: BTreeSet<UnitProduct>,
    pub depth: usize,
    /// Sizes of `S_0 ⊇ S_1 ⊇ …`.
    pub iterations: Vec<usize>,
    /// Number of candidate points the lifts came from.
    #[serde(default)]
    pub candidates: usize,
}

impl CoolSetReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Iterates `S_{k+1} = {π ∈ S_k : S-image of π in span S_k}` until the set is
/// empty or stable. The stable set is the largest invariant subset of `S_0`.
pub fn maximal_cool_subset(
    s0: &BTreeSet<UnitProduct>,
    depth: usize,
    cache: Option<&ExpansionCache>,
) -> Result<CoolSetReport> {
    let all: Vec<UnitProduct> = s0.iter().cloned().collect();
    let l = common_level(&all)?;
    let n = all.iter().map(|p| p.len()).max().unwrap_or(0);
    // the window stays anchored at S_0 so every iteration compares the same exponents
    let base = min_leading_exponent(&all);
    let mut current = all;
    let mut iterations = vec![current.len()];
    loop {
        let basis = SpanBasis::new(&current, &base, depth, cache)?;
        let kept: Vec<UnitProduct> = test_members(&basis, &current, cache)?
            .into_iter()
            .filter_map(|(p, w)| w.map(|_| p))
            .collect();
        let stable = kept.len() == current.len();
        current = kept;
        if stable {
            break;
        }
        iterations.push(current.len());
        if current.is_empty() {
            break;
        }
    }
    let status = if current.is_empty() {
        Status::Empty
    } else {
        Status::FixedPoint
    };
    Ok(CoolSetReport {
        n,
        l,
        status,
        set: current.into_iter().collect(),
        depth,
        iterations,
        candidates: 0,
    })
}

/// Knobs for [`enumerate`].
#[derive(Clone, Debug, Default)]
pub struct EnumerateOptions {
    pub l_max: Option<u64>,
    pub depth: Option<usize>,
    /// Keep reports for levels where the iteration ends empty or the result is imprimitive.
    pub include_all: bool,
}

/// Whether every element already lives at one proper divisor of the level.
pub fn is_imprimitive(set: &BTreeSet<UnitProduct>, l: u64) -> bool {
    let m = set
        .iter()
        .map(|p| p.minimal_level().level())
        .fold(1u64, |acc, x| num_integer::Integer::lcm(&acc, &x));
    m < l
}

/// All maximal invariant subsets of the products of exactly `n` factors, level by level.
///
/// Levels above the special-point bound are skipped, as are levels with a proper
/// divisor whose candidate set is empty. Sets that only arise by rewriting a set
/// of lower level are dropped unless `include_all` is set.
pub fn enumerate(n: usize, opts: &EnumerateOptions, cache: Option<&ExpansionCache>) -> Result<Vec<CoolSetReport>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let top = max_level(n as u32);
    let top = opts.l_max.map_or(top, |m| m.min(top));
    let mut reports = Vec::new();
    for c in nonempty_candidate_sets(n, top)? {
        let l = c.level;
        let s0 = lifts_of_candidates(&c);
        if s0.is_empty() {
            continue;
        }
        let depth = opts.depth.unwrap_or_else(|| expansion_depth(l, n));
        log::info!("n={n} l={l}: {} candidates, {} products", c.points.len(), s0.len());
        let mut report = maximal_cool_subset(&s0, depth, cache)?;
        report.n = n;
        report.candidates = c.points.len();
        let keep = opts.include_all
            || (report.status == Status::FixedPoint && !is_imprimitive(&report.set, l));
        if keep {
            reports.push(report);
        }
    }
    Ok(reports)
}
