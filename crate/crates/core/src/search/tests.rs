use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::algebra::{gcd_u64, rat};

fn all_tuples(n: usize, l: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..l).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn beta_examples() {
    let p = ProjPoint::new(5, &[1]).unwrap();
    assert_eq!(beta(&p, 5).unwrap(), rat(1, 150));
    assert_eq!(beta(&p, 1).unwrap(), rat(1, 6));
    let q = ProjPoint::new(7, &[1, 2, 3]).unwrap();
    assert_eq!(beta(&q, 1).unwrap(), rat(3, 6));
    assert!(beta(&q, 3).is_err());
}

#[test]
fn special_examples() {
    assert!(is_special(&[1], 5));
    assert!(!is_special(&[1], 7));
    assert!(is_special(&[0, 0, 0], 1));
    assert!(is_special(&[1, 2, 3], 7));
}

#[test]
fn canonical_form() {
    let p = ProjPoint::new(7, &[6, 4]).unwrap();
    // 2·(1, 3) = (2, 6) ~ (2, 1)
    assert_eq!(p.coords(), &[1, 2]);
    assert_eq!(p.to_string(), "[1:2]");
    let q = ProjPoint::new(7, &[2, 6]).unwrap();
    assert_eq!(q, p);
}

#[test]
fn candidate_sets_at_small_levels() {
    let c = candidate_set(1, 5).unwrap();
    assert_eq!(c.points.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>(), vec![vec![1]]);
    assert!(candidate_set(1, 7).unwrap().is_empty());
    let json = c.to_json();
    assert_eq!(json, serde_json::json!({"l": 5, "n": 1, "points": [[1]]}));
    for l in 2..=14u64 {
        let nonempty = !candidate_set(1, l).unwrap().is_empty();
        assert_eq!(nonempty, l == 5, "l = {l}");
    }
}

#[test]
fn n2_levels_divide_70() {
    let mut found = Vec::new();
    for l in 2..=max_level(2) {
        if !candidate_set(2, l).unwrap().is_empty() {
            assert_eq!(70 % l, 0, "l = {l}");
            found.push(l);
        }
    }
    assert!(found.contains(&5) && found.contains(&7) && found.contains(&2));
}

#[test]
fn prime_shortcut_matches_full_scan() {
    // the small-coordinate scan used for prime levels finds every orbit
    for n in 1..=3usize {
        for l in [2u64, 3, 5, 7, 11, 13] {
            let fast = candidate_set(n, l).unwrap();
            let sieve = Sieve::new(n, l);
            let mut full = BTreeSet::new();
            let mut mask = 0;
            for v in all_tuples(n, l) {
                if v.iter().all(|&x| x == 0) {
                    continue;
                }
                if let Some(m) = sieve.test(&v) {
                    mask |= m;
                    full.insert(ProjPoint::new(l, &v.iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap());
                }
            }
            let all = mask.count_ones() as usize == divisors(l).len();
            let full = if all { full } else { BTreeSet::new() };
            assert_eq!(fast.points, full, "n={n} l={l}");
        }
    }
}

#[test]
fn divisor_closure_and_gcd() {
    for n in 1..=2usize {
        for l in 2..=40u64 {
            let c = candidate_set(n, l).unwrap();
            if c.is_empty() {
                continue;
            }
            for t in divisors(l) {
                if t > 1 {
                    assert!(!candidate_set(n, t).unwrap().is_empty(), "n={n} l={l} t={t}");
                }
            }
            for p in &c.points {
                let g = p.coords().iter().fold(l, |g, &x| gcd_u64(g, x));
                assert_eq!(g, 1, "{p} at l={l}");
            }
        }
    }
}

#[test]
fn bound_at_n1() {
    let (lo, hi) = level_bound(1, 13, 2);
    assert!(lo > rat(136, 10) && hi < rat(137, 10));
    assert!(&hi - &lo < rat(1, 1000));
    for l in 2..=13 {
        assert!(!level_excluded(1, l));
    }
    for l in 14..=200 {
        assert!(level_excluded(1, l));
    }
    assert_eq!(max_level(1), 13);
    assert!(level_excluded_sharp(1, 13));
    assert!(!level_excluded_sharp(1, 5));
    for n in 1..=3u32 {
        assert!(max_level(n) as f64 <= 13.7f64.powi(n as i32).ceil());
    }
}

#[test]
fn small_representatives_exist() {
    let p = ProjPoint::new(7, &[1, 4]).unwrap();
    let v = small_representative(&p).unwrap();
    assert!(v.iter().all(|x| x.abs() <= 3));
    let p = ProjPoint::new(7, &[1, 1]).unwrap();
    assert_eq!(small_representative(&p).unwrap(), vec![1, 1]);
    for n in 1..=3usize {
        for l in 2..=20u64 {
            let limit = (l as f64).powf(1.0 - 1.0 / n as f64) + 1.0;
            for v in all_tuples(n, l) {
                // only primitive points are covered, e.g. [3] at l = 6 has no small multiple
                if v.iter().fold(l, |g, &x| gcd_u64(g, x)) != 1 {
                    continue;
                }
                let p = ProjPoint::new(l, &v.iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap();
                let w = small_representative(&p).unwrap_or_else(|| panic!("{p} at l={l}"));
                assert!(w.iter().all(|&x| (x.abs() as f64) <= limit + 1e-9));
            }
        }
    }
}

#[test]
fn lift_examples() {
    let c = candidate_set(1, 5).unwrap();
    let lifts: Vec<String> = lifts_of_candidates(&c).iter().map(|p| p.to_string()).collect();
    assert_eq!(lifts, vec!["[1]_5", "[2]_5"]);
    let c2 = CandidateSet {
        level: 2,
        n: 2,
        points: [ProjPoint::new(2, &[1, 1]).unwrap()].into_iter().collect(),
        attained: Default::default(),
    };
    let lifts: Vec<String> = lifts_of_candidates(&c2).iter().map(|p| p.to_string()).collect();
    assert_eq!(lifts, vec!["[1,1]_2"]);
}

#[test]
fn lifts_match_brute_force() {
    for n in 1..=3usize {
        for l in 2..=9u64 {
            let c = candidate_set(n, l).unwrap();
            let want: BTreeSet<UnitProduct> = all_tuples(n, l)
                .into_iter()
                .filter(|v| !v.contains(&0))
                .filter(|v| {
                    let p = ProjPoint::new(l, &v.iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap();
                    c.points.contains(&p)
                })
                .map(|v| UnitProduct::new(l, &v.iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap())
                .collect();
            assert_eq!(lifts_of_candidates(&c), want, "n={n} l={l}");
        }
    }
}

fn units(l: u64) -> Vec<u64> {
    (1..l).filter(|&u| gcd_u64(u, l) == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn beta_orbit_invariance(
        l in 2u64..=30,
        raw in prop::collection::vec(0u64..1000, 1..=4),
        ui in 0usize..100,
        signs in prop::collection::vec(any::<bool>(), 4),
        rot in 0usize..4,
    ) {
        let coords: Vec<i64> = raw.iter().map(|&x| (x % l) as i64).collect();
        let us = units(l);
        let u = us[ui % us.len()] as i64;
        let mut moved: Vec<i64> = coords
            .iter()
            .zip(&signs)
            .map(|(&x, &s)| if s { -u * x } else { u * x })
            .collect();
        let k = rot % moved.len();
        moved.rotate_left(k);
        let p = ProjPoint::new(l, &coords).unwrap();
        let q = ProjPoint::new(l, &moved).unwrap();
        prop_assert_eq!(&p, &q);
        let naive = |v: &[i64], t: u64| {
            let vs: Vec<u64> = v.iter().map(|&x| x.rem_euclid(t as i64) as u64).collect();
            let pt = ProjPoint { level: t, coords: vs };
            beta(&pt, t).unwrap()
        };
        for t in divisors(l) {
            prop_assert_eq!(beta(&p, t).unwrap(), naive(&moved, t));
        }
        prop_assert_eq!(is_special(&coords, l), is_special(&moved, l));
    }
}
