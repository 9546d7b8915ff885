//! One line per acceptance criterion, `PASS` or `FAIL`. Runs without the test
//! harness so the lines always show; exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use modunits::algebra::{divisors, gcd_u64, rat, smallest_prime_factor};
use modunits::coolcheck::{ag_set, enumerate, expansion_depth, power_set, EnumerateOptions};
use modunits::identities::{verify_andrews_gordon, verify_rogers_ramanujan};
use modunits::search::{beta, is_special, level_bound, level_excluded, max_level, nonempty_candidate_sets, ProjPoint};
use modunits::units::{
    cusp_order, distribution_expand, factor_into_units, numeric_check_transform, s_transform_expansion,
    siegel_expansion, unit_expansion, SiegelIndex,
};
use modunits::{CoolSetReport, CyclotomicField, Cusp, ExpansionCache, PuiseuxSeries, Rational, UnitProduct};

const NUMERIC_TOL: f64 = 1e-8;
const NUMERIC_TERMS: usize = 400;
const NUMERIC_SAMPLES: usize = 20;
const NUMERIC_SEED: u64 = 0x5eed_0001;
const ORBIT_CASES: usize = 1000;
const ORBIT_SEED: u64 = 0x5eed_0002;
const RR_DEPTH: usize = 300;
const SIEGEL_DEPTH: i64 = 50;
const DISTRIBUTION_DEPTH: i64 = 100;

struct Ledger {
    results: Vec<(String, bool)>,
}

impl Ledger {
    fn record(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        self.results.push((name.to_string(), ok));
    }
}

fn set(l: u64, items: &[&[i64]]) -> BTreeSet<UnitProduct> {
    items.iter().map(|rs| UnitProduct::new(l, rs).unwrap()).collect()
}

fn found(reports: &[CoolSetReport]) -> BTreeSet<(u64, BTreeSet<UnitProduct>)> {
    reports.iter().map(|r| (r.l, r.set.clone())).collect()
}

fn table_row(n: usize) -> BTreeSet<(u64, BTreeSet<UnitProduct>)> {
    let ag5 = ag_set(5).unwrap();
    match n {
        1 => [(5, ag5)].into_iter().collect(),
        2 => [(5, power_set(&ag5, 2)), (7, ag_set(7).unwrap())].into_iter().collect(),
        3 => [
            (5, power_set(&ag5, 3)),
            (7, set(7, &[&[1, 1, 3], &[1, 2, 2], &[1, 2, 3], &[2, 3, 3]])),
            (9, ag_set(9).unwrap()),
        ]
        .into_iter()
        .collect(),
        _ => unreachable!(),
    }
}

fn table_reproduction(ledger: &mut Ledger) {
    for n in 1..=3 {
        let start = Instant::now();
        let reports = enumerate(n, &EnumerateOptions::default(), None).unwrap();
        let ok = found(&reports) == table_row(n);
        let levels: Vec<u64> = reports.iter().map(|r| r.l).collect();
        ledger.record(
            &format!("1 table n={n}"),
            ok,
            format!("levels {levels:?} in {:.2?}", start.elapsed()),
        );
    }
}

fn is_prime(l: u64) -> bool {
    l >= 2 && smallest_prime_factor(l) == l
}

fn divisor_facts(ledger: &mut Ledger) {
    for (n, modulus, primes) in [(2usize, 70u64, vec![2u64, 5, 7]), (3, 315, vec![3, 5, 7])] {
        let start = Instant::now();
        let top = max_level(n as u32);
        let levels: Vec<u64> = nonempty_candidate_sets(n, top).unwrap().iter().map(|c| c.level).collect();
        let divides = levels.iter().all(|l| modulus % l == 0);
        let nonempty_primes: Vec<u64> = levels.iter().copied().filter(|&l| is_prime(l)).collect();
        ledger.record(
            &format!("2 divisors n={n}"),
            divides && nonempty_primes == primes,
            format!(
                "levels up to {top}: {levels:?}, primes {nonempty_primes:?} in {:.2?}",
                start.elapsed()
            ),
        );
    }
}

fn bound_check(ledger: &mut Ledger) {
    let (lo, hi) = level_bound(1, 13, 2);
    let inside = lo > rat(136, 10) && hi < rat(137, 10);
    let excluded = (2..=13).all(|l| !level_excluded(1, l)) && (14..=500).all(|l| level_excluded(1, l));
    let to_f = |x: &Rational| x.numer().to_string().parse::<f64>().unwrap() / x.denom().to_string().parse::<f64>().unwrap();
    ledger.record(
        "3 bound n=1",
        inside && excluded,
        format!("bracket [{:.6}, {:.6}], max level {}", to_f(&lo), to_f(&hi), max_level(1)),
    );
}

fn rogers_ramanujan(ledger: &mut Ledger) {
    let checks = verify_rogers_ramanujan(RR_DEPTH);
    let ok = checks.iter().all(|c| c.passed);
    let mismatches: Vec<_> = checks.iter().filter_map(|c| c.first_mismatch.clone()).collect();
    ledger.record("4 rogers-ramanujan", ok, format!("depth {RR_DEPTH}, mismatches {mismatches:?}"));
}

fn andrews_gordon(ledger: &mut Ledger) {
    for (l, depth) in [(7u64, 150usize), (9, 100)] {
        let checks = verify_andrews_gordon(l, depth).unwrap();
        let ok = checks.iter().all(|c| c.passed);
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        ledger.record(
            &format!("5 andrews-gordon l={l}"),
            ok,
            format!("depth {depth}, {} identities, failed {failed:?}", checks.len()),
        );
    }
}

fn siegel_columns(ledger: &mut Ledger) {
    let depth = rat(SIEGEL_DEPTH, 1);
    let padded = &depth + rat(1, 1);
    let mut bad = Vec::new();
    let mut count = 0;
    for l in 2..=10u64 {
        let field = CyclotomicField::get(l);
        for r in 1..l as i64 {
            let mut acc = PuiseuxSeries::one(field.clone(), &padded);
            for s in 0..l as i64 {
                acc = acc.mul(&siegel_expansion(&SiegelIndex::new(l, r, s).unwrap(), &padded).unwrap());
            }
            let as_q = acc.truncate(&depth).map((), |c| c.as_rational().unwrap_or_else(|| rat(0, 1)));
            let rational = acc.coeffs().iter().all(|c| c.as_rational().is_some());
            let unit = unit_expansion(&UnitProduct::new(l, &[r]).unwrap(), &depth);
            if !(rational && as_q.agrees_with(&unit, &depth).unwrap()) {
                bad.push((r, l));
            }
            count += 1;
        }
    }
    ledger.record(
        "6 siegel columns",
        bad.is_empty(),
        format!("{count} columns to depth {SIEGEL_DEPTH}, failures {bad:?}"),
    );
}

fn s_orders(ledger: &mut Ledger) {
    let mut bad = Vec::new();
    let mut count = 0;
    for l in [5u64, 7, 9] {
        for p in UnitProduct::all_of_length(l, 3) {
            let want = cusp_order(&p, &Cusp::Finite(rat(0, 1)));
            let prec = want.floor() + rat(1, 1);
            let image = s_transform_expansion(&p, &prec);
            if image.leading_exponent() != Some(want) {
                bad.push(p.to_string());
            }
            count += 1;
        }
    }
    ledger.record("7 s-orders", bad.is_empty(), format!("{count} products, failures {bad:?}"));
}

fn numeric_transform(ledger: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(NUMERIC_SEED);
    let zs = [Complex64::new(0.0, 2.0), Complex64::new(0.5, 1.5)];
    let mut bad = Vec::new();
    let mut alphas = Vec::new();
    while alphas.len() < NUMERIC_SAMPLES {
        let l = rng.random_range(2..=10u64);
        let p1 = rng.random_range(0..l as i64);
        let p2 = rng.random_range(0..l as i64);
        if let Ok(a) = SiegelIndex::new(l, p1, p2) {
            alphas.push(a);
        }
    }
    for a in &alphas {
        for z in zs {
            if !numeric_check_transform(a, z, NUMERIC_TERMS, NUMERIC_TOL) {
                bad.push(format!("({},{})/{} at {z}", a.p1(), a.p2(), a.level()));
            }
        }
    }
    ledger.record(
        "8 numeric transform",
        bad.is_empty(),
        format!("{} indices, tol {NUMERIC_TOL:e}, failures {bad:?}", alphas.len()),
    );
}

fn round_trips(ledger: &mut Ledger) {
    let mut bad = Vec::new();
    let mut count = 0;
    for l in 2..=9u64 {
        for p in UnitProduct::all_up_to_length(l, 3) {
            let prec = p.leading_exponent() + rat(2 * l as i64 + 2, 1);
            let f = unit_expansion(&p, &prec);
            let back = factor_into_units(&f, l).unwrap().ok().and_then(|u| u.product());
            if back.as_ref() != Some(&p) {
                bad.push(p.to_string());
            }
            count += 1;
        }
    }
    ledger.record(
        "9 factorization round trip",
        bad.is_empty(),
        format!("{count} products, failures {bad:?}"),
    );
}

fn distribution(ledger: &mut Ledger) {
    let prec = rat(DISTRIBUTION_DEPTH, 1);
    let mut bad = Vec::new();
    let mut count = 0;
    for m in 2..=12u64 {
        for l in divisors(m).into_iter().filter(|&l| l >= 2) {
            for r in 1..l as i64 {
                let lhs = unit_expansion(&UnitProduct::new(l, &[r]).unwrap(), &prec);
                let rhs = unit_expansion(&distribution_expand(r, l, m).unwrap(), &prec);
                if lhs != rhs {
                    bad.push((r, l, m));
                }
                count += 1;
            }
        }
    }
    ledger.record(
        "9 distribution relations",
        bad.is_empty(),
        format!("{count} relations to depth {DISTRIBUTION_DEPTH}, failures {bad:?}"),
    );
}

fn depth_stability(ledger: &mut Ledger) {
    for n in 1..=3usize {
        let start = Instant::now();
        let normal = enumerate(n, &EnumerateOptions { include_all: true, ..Default::default() }, None).unwrap();
        let mut same = true;
        for r in &normal {
            let doubled = enumerate(
                n,
                &EnumerateOptions {
                    l_max: Some(r.l),
                    depth: Some(2 * expansion_depth(r.l, n)),
                    include_all: true,
                },
                None,
            )
            .unwrap();
            let at_l = doubled.iter().find(|d| d.l == r.l);
            same &= at_l.is_some_and(|d| d.status == r.status && d.set == r.set);
        }
        ledger.record(
            &format!("9 depth stability n={n}"),
            same,
            format!("{} verdicts in {:.2?}", normal.len(), start.elapsed()),
        );
    }
}

fn cache_agreement(ledger: &mut Ledger) {
    let cache = ExpansionCache::new();
    let opts = EnumerateOptions { include_all: true, ..Default::default() };
    let mut same = true;
    for n in 1..=3 {
        let plain = enumerate(n, &opts, None).unwrap();
        let cached = enumerate(n, &opts, Some(&cache)).unwrap();
        let again = enumerate(n, &opts, Some(&cache)).unwrap();
        same &= plain == cached && cached == again;
    }
    ledger.record("9 cache agreement", same, format!("{} cached expansions", cache.len()));
}

fn orbit_invariance(ledger: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(ORBIT_SEED);
    let mut bad = 0;
    for _ in 0..ORBIT_CASES {
        let l = rng.random_range(2..=30u64);
        let n = rng.random_range(1..=4usize);
        let coords: Vec<i64> = (0..n).map(|_| rng.random_range(0..l as i64)).collect();
        let units: Vec<i64> = (1..l).filter(|&u| gcd_u64(u, l) == 1).map(|u| u as i64).collect();
        let u = units[rng.random_range(0..units.len())];
        let mut moved: Vec<i64> = coords
            .iter()
            .map(|&x| if rng.random_bool(0.5) { -u * x } else { u * x })
            .collect();
        let k = rng.random_range(0..n);
        moved.rotate_left(k);
        let p = ProjPoint::new(l, &coords).unwrap();
        let q = ProjPoint::new(l, &moved).unwrap();
        let betas_agree = divisors(l).into_iter().all(|t| beta(&p, t).unwrap() == beta(&q, t).unwrap());
        if p != q || !betas_agree || is_special(&coords, l) != is_special(&moved, l) {
            bad += 1;
        }
    }
    ledger.record(
        "9 beta orbit invariance",
        bad == 0,
        format!("{ORBIT_CASES} cases, {bad} failures"),
    );
}

fn main() {
    let mut ledger = Ledger { results: Vec::new() };
    table_reproduction(&mut ledger);
    divisor_facts(&mut ledger);
    bound_check(&mut ledger);
    rogers_ramanujan(&mut ledger);
    andrews_gordon(&mut ledger);
    siegel_columns(&mut ledger);
    s_orders(&mut ledger);
    numeric_transform(&mut ledger);
    round_trips(&mut ledger);
    distribution(&mut ledger);
    depth_stability(&mut ledger);
    cache_agreement(&mut ledger);
    orbit_invariance(&mut ledger);
    let failed: Vec<&str> = ledger.results.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
    if failed.is_empty() {
        println!("acceptance: all {} checks passed", ledger.results.len());
    } else {
        println!("acceptance: failed {failed:?}");
        std::process::exit(1);
    }
}
