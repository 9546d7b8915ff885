use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{is_invariant_set, CoolSetReport, Status};
use crate::error::Result;
use crate::units::UnitProduct;

/// `{φ_r : 1 <= r <= (l-1)/2}` with `φ_r = ∏_{j != r} [j]_l`, for odd `l >= 3`.
pub fn ag_set(l: u64) -> Option<BTreeSet<UnitProduct>> {
    if l < 3 || l % 2 == 0 {
        return None;
    }
    let k = (l - 1) / 2;
    Some(
        (1..=k)
            .map(|r| {
                let rs: Vec<i64> = (1..=k).filter(|&j| j != r).map(|j| j as i64).collect();
                UnitProduct::new(l, &rs).unwrap()
            })
            .collect(),
    )
}

/// All `m`-fold products of elements of `s`.
pub fn power_set(s: &BTreeSet<UnitProduct>, m: usize) -> BTreeSet<UnitProduct> {
    let Some(first) = s.iter().next() else {
        return BTreeSet::new();
    };
    let mut acc: BTreeSet<UnitProduct> = [UnitProduct::one(first.level())].into_iter().collect();
    for _ in 0..m {
        acc = acc
            .iter()
            .flat_map(|a| s.iter().map(move |b| a.mul(b).unwrap()))
            .collect();
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowKind {
    /// One of the Andrews-Gordon sets.
    AndrewsGordon,
    /// `base^m` for a set found at a smaller `n`.
    Power { base: String, m: usize },
    /// A disjoint union of smaller invariant sets.
    DisjointUnion { parts: Vec<String> },
    /// A union of invariant subsets that share elements; needs a closer look.
    Overlap { parts: Vec<String> },
    New,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub l: u64,
    pub label: String,
    #[serde(flatten)]
    pub kind: RowKind,
    pub set: BTreeSet<UnitProduct>,
}

impl TableRow {
    /// Whether the row would appear in the table of new sets.
    pub fn is_listed(&self) -> bool {
        !matches!(self.kind, RowKind::DisjointUnion { .. })
    }
}

fn set_text(s: &BTreeSet<UnitProduct>) -> String {
    let parts: Vec<String> = s.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Smallest subsets closed under "appears in the witness of", one per element.
fn closures(set: &BTreeSet<UnitProduct>, depth: usize) -> Result<Vec<BTreeSet<UnitProduct>>> {
    let inv = is_invariant_set(set, depth, None)?;
    let members: Vec<&UnitProduct> = set.iter().collect();
    let edges: BTreeMap<&UnitProduct, Vec<&UnitProduct>> = inv
        .witnesses
        .iter()
        .map(|(p, w)| {
            let support = w
                .iter()
                .zip(&members)
                .filter(|(c, _)| !crate::algebra::Field::eq_zero(*c))
                .map(|(_, q)| *q)
                .collect();
            (p, support)
        })
        .collect();
    let mut out = Vec::new();
    for p in set {
        let mut seen: BTreeSet<UnitProduct> = BTreeSet::new();
        let mut stack = vec![p];
        while let Some(x) = stack.pop() {
            if !seen.insert(x.clone()) {
                continue;
            }
            if let Some(next) = edges.get(x) {
                stack.extend(next.iter().copied());
            }
        }
        out.push(seen);
    }
    Ok(out)
}

/// Labels fixed-point reports the way the classification table does: the
/// Andrews-Gordon sets, powers `S^m` of sets found earlier, disjoint unions
/// (split), and everything else as new. The trivial set `{1}` is dropped.
pub fn postprocess_report(reports: &[CoolSetReport]) -> Result<Vec<TableRow>> {
    let mut sorted: Vec<&CoolSetReport> = reports
        .iter()
        .filter(|r| r.status == Status::FixedPoint)
        .collect();
    sorted.sort_by_key(|r| (r.n, r.l));
    let mut library: Vec<TableRow> = Vec::new();
    let mut rows = Vec::new();
    let mut new_count: BTreeMap<u64, usize> = BTreeMap::new();
    for r in sorted {
        let mut work = vec![r.set.clone()];
        while let Some(set) = work.pop() {
            if set.iter().all(|p| p.is_empty()) {
                continue;
            }
            let row = classify(r, &set, &library, &mut new_count)?;
            if let RowKind::DisjointUnion { .. } = row.kind {
                work.extend(split_parts(&set, r.depth)?);
            } else {
                library.push(row.clone());
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

fn classify(
    r: &CoolSetReport,
    set: &BTreeSet<UnitProduct>,
    library: &[TableRow],
    new_count: &mut BTreeMap<u64, usize>,
) -> Result<TableRow> {
    let row = |label: String, kind: RowKind| TableRow {
        n: r.n,
        l: r.l,
        label,
        kind,
        set: set.clone(),
    };
    if let Some(ag) = ag_set(r.l) {
        if ag == *set {
            return Ok(row(format!("AG_{}", r.l), RowKind::AndrewsGordon));
        }
        // powers of AG_l are recognized even when the base row is not in this batch
        let width = ag.iter().next().map_or(0, |p| p.len());
        if width > 0 && r.n % width == 0 && r.n > width {
            let m = r.n / width;
            if power_set(&ag, m) == *set {
                let base = format!("AG_{}", r.l);
                let label = format!("{base}^{m}");
                return Ok(row(label, RowKind::Power { base, m }));
            }
        }
    }
    for base in library.iter().filter(|b| b.l == r.l && b.n < r.n && r.n % b.n == 0) {
        let m = r.n / base.n;
        if power_set(&base.set, m) == *set {
            let kind = RowKind::Power {
                base: base.label.clone(),
                m,
            };
            return Ok(row(format!("{}^{}", base.label, m), kind));
        }
    }
    let maximal = split_parts(set, r.depth)?;
    let covered: BTreeSet<UnitProduct> = maximal.iter().flatten().cloned().collect();
    if !maximal.is_empty() && covered == *set {
        let names: Vec<String> = maximal.iter().map(set_text).collect();
        let disjoint = maximal
            .iter()
            .enumerate()
            .all(|(i, a)| maximal.iter().skip(i + 1).all(|b| a.is_disjoint(b)));
        let kind = if disjoint {
            RowKind::DisjointUnion { parts: names }
        } else {
            log::warn!("overlapping invariant subsets at l={} n={}", r.l, r.n);
            RowKind::Overlap { parts: names }
        };
        return Ok(row(set_text(set), kind));
    }
    let k = new_count.entry(r.l).or_insert(0);
    *k += 1;
    let label = if *k == 1 {
        format!("W_{}", r.l)
    } else {
        format!("W_{}^({})", r.l, k)
    };
    Ok(row(label, RowKind::New))
}

/// The maximal proper invariant subsets generated by single elements.
fn split_parts(set: &BTreeSet<UnitProduct>, depth: usize) -> Result<Vec<BTreeSet<UnitProduct>>> {
    let mut parts: Vec<BTreeSet<UnitProduct>> = closures(set, depth)?
        .into_iter()
        .filter(|c| c != set)
        .collect();
    parts.sort();
    parts.dedup();
    // keep only the maximal proper closures
    let maximal: Vec<BTreeSet<UnitProduct>> = parts
        .iter()
        .filter(|c| !parts.iter().any(|d| d != *c && c.is_subset(d)))
        .cloned()
        .collect();
    Ok(maximal)
}

/// The table as CSV: one line per `n`, one column per level.
pub fn table_csv(rows: &[TableRow]) -> String {
    let levels: BTreeSet<u64> = rows.iter().map(|r| r.l).collect();
    let ns: BTreeSet<usize> = rows.iter().map(|r| r.n).collect();
    let mut out = String::from("n");
    for l in &levels {
        out.push_str(&format!(",l={l}"));
    }
    out.push('\n');
    for n in ns {
        out.push_str(&n.to_string());
        for l in &levels {
            let cells: Vec<String> = rows
                .iter()
                .filter(|r| r.n == n && r.l == *l && r.is_listed())
                .map(|r| match r.kind {
                    RowKind::New => format!("{}={}", r.label, set_text(&r.set)),
                    _ => r.label.clone(),
                })
                .collect();
            let cell = cells.join("; ");
            if cell.contains(',') || cell.contains('"') {
                out.push_str(&format!(",\"{}\"", cell.replace('"', "\"\"")));
            } else {
                out.push_str(&format!(",{cell}"));
            }
        }
        out.push('\n');
    }
    out
}
