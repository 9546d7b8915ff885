use num_traits::{One, Signed};

use super::ProjPoint;
use crate::algebra::{nth_root_bracket, rat, rat_int, smallest_prime_factor, sqrt_bracket, Rational};

const ROOT_SCALE: u64 = 1_000_000;

/// Rational bounds `lo <= B <= hi` on
/// `B = (2(1 + l^{1/n - 1}) / (1 - sqrt(1/3 + 2/(3p²))))^n`.
pub fn level_bound(n: u32, l: u64, p: u64) -> (Rational, Rational) {
    let lr = rat_int(l as i64);
    let (root_lo, root_hi) = nth_root_bracket(&lr, n, ROOT_SCALE);
    let inner = rat(1, 3) + rat(2, 3 * (p * p) as i64);
    let (sq_lo, sq_hi) = sqrt_bracket(&inner, ROOT_SCALE);
    let one = Rational::one();
    let eval = |root: &Rational, sq: &Rational| {
        let num = rat(2, 1) * (&one + root / &lr);
        let den = &one - sq;
        assert!(den.is_positive());
        num_traits::pow(num / den, n as usize)
    };
    (eval(&root_lo, &sq_lo), eval(&root_hi, &sq_hi))
}

/// `l` exceeds the special-point bound, evaluated at `p = 2` for every level.
///
/// The bound decreases in `p`, so `p = 2` is the weakest uniform version.
/// Only the upper end of the bracket is compared, so no admissible level is excluded.
pub fn level_excluded(n: u32, l: u64) -> bool {
    rat_int(l as i64) > level_bound(n, l, 2).1
}

/// Same test with `p` the smallest prime factor of `l`.
pub fn level_excluded_sharp(n: u32, l: u64) -> bool {
    rat_int(l as i64) > level_bound(n, l, smallest_prime_factor(l)).1
}

/// The largest level not excluded by [`level_excluded`].
pub fn max_level(n: u32) -> u64 {
    // the bound decreases in l, so the first excluded level closes the range
    let mut l = 2;
    while !level_excluded(n, l) {
        l += 1;
    }
    l - 1
}

/// Largest `c` with `c <= l^{1-1/n} + 1`, i.e. `(c - 1)^n <= l^{n-1}`.
pub(crate) fn small_coordinate_limit(n: usize, l: u64) -> u64 {
    let target = (l as u128).pow(n as u32 - 1);
    let mut c = 1u64;
    while ((c as u128).pow(n as u32)) <= target {
        c += 1;
    }
    c
}

/// A nonzero multiple `b·P`, written with signed residues, whose coordinates
/// are all at most `l^{1-1/n} + 1` in absolute value.
pub fn small_representative(p: &ProjPoint) -> Option<Vec<i64>> {
    let l = p.level() as i64;
    let limit = small_coordinate_limit(p.len(), p.level()) as i64;
    (1..l).find_map(|b| {
        let v: Vec<i64> = p
            .coords()
            .iter()
            .map(|&x| {
                let y = (b * x as i64).rem_euclid(l);
                if 2 * y > l {
                    y - l
                } else {
                    y
                }
            })
            .collect();
        let ok = v.iter().any(|&x| x != 0) && v.iter().all(|x| x.abs() <= limit);
        ok.then_some(v)
    })
}
