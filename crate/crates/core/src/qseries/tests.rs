use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::algebra::{rat, rat_int, CyclotomicField, CyclotomicNumber, Field, Rational};

fn series(d: u64, lead: i64, coeffs: &[i64], prec: i64) -> PuiseuxSeries<Rational> {
    PuiseuxSeries::new((), d, lead, coeffs.iter().map(|&c| rat_int(c)).collect(), prec)
}

/// Truncated polynomial product on plain integers, the brute-force oracle.
fn poly_mul(a: &[i64], b: &[i64], len: usize) -> Vec<i64> {
    let mut out = vec![0; len];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j < len {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn geometric_in(n: usize, len: usize) -> Vec<i64> {
    (0..len).map(|i| i64::from(i % n == 0)).collect()
}

fn ints(s: &PuiseuxSeries<Rational>, len: usize) -> Vec<i64> {
    s.window(&Rational::zero(), 1, len)
        .unwrap()
        .iter()
        .map(|c| i64::try_from(c.to_integer()).unwrap())
        .collect()
}

/// Exponents from the logarithmic derivative: `q f'/f = -Σ_m (Σ_{n|m} n a(n)) q^m`.
fn exponents_by_logderiv(f: &PuiseuxSeries<Rational>, n_max: usize) -> Vec<Rational> {
    let c = f.window(&Rational::zero(), 1, n_max + 1).unwrap();
    let deriv: Vec<Rational> = c
        .iter()
        .enumerate()
        .map(|(i, x)| x * rat_int(i as i64))
        .collect();
    let qf = PuiseuxSeries::new((), 1, 0, deriv, n_max as i64 + 1);
    let l = qf.mul(&f.truncate(&rat_int(n_max as i64 + 1)).inv().unwrap());
    let lc = l.window(&Rational::zero(), 1, n_max + 1).unwrap();
    let mut a = vec![Rational::zero(); n_max + 1];
    for m in 1..=n_max {
        let mut s = -lc[m].clone();
        for n in 1..m {
            if m % n == 0 {
                s -= rat_int(n as i64) * &a[n];
            }
        }
        a[m] = s / rat_int(m as i64);
    }
    a.remove(0);
    a
}

#[test]
fn geometric_series_times_one_minus_q() {
    let f = series(1, 0, &[1, -1], 20);
    let g = series(1, 0, &[1; 20], 20);
    assert_eq!(f.mul(&g), PuiseuxSeries::one((), &rat(20, 1)));
}

#[test]
fn monomial_exponents_add() {
    let end = rat(10, 1);
    let a = PuiseuxSeries::monomial((), rat(1, 1), &rat(-1, 60), &end);
    let b = PuiseuxSeries::monomial((), rat(1, 1), &rat(11, 60), &end);
    let p = a.mul(&b);
    assert_eq!(p.leading_exponent(), Some(rat(1, 6)));
    assert_eq!(p.truncate(&rat(9, 1)).denom(), 6);
}

#[test]
fn additive_inverse_is_zero() {
    let f = series(3, -2, &[1, 0, 4, -7], 9);
    let z = f.add(&f.neg());
    assert!(z.is_zero());
    assert_eq!(z.precision_end(), f.precision_end());
}

#[test]
fn inverses() {
    let f = series(1, 0, &[1, -1], 12);
    assert_eq!(f.inv().unwrap(), series(1, 0, &[1; 12], 12));
    let h = PuiseuxSeries::monomial((), rat(1, 1), &rat(1, 2), &rat(5, 1));
    assert_eq!(h.inv().unwrap().leading_exponent(), Some(rat(-1, 2)));
    assert!(series(1, 0, &[], 4).inv().is_err());
}

#[test]
fn euler_product_matches_pentagonal_oracle() {
    let p = prog_product::<Rational>(&(), 1, 0, None, 1, false, &rat(8, 1)).unwrap();
    let mut oracle = vec![1i64];
    for n in 1..8 {
        let mut f = vec![0i64; n + 1];
        f[0] = 1;
        f[n] = -1;
        oracle = poly_mul(&oracle, &f, 8);
    }
    assert_eq!(ints(&p, 8), oracle);
    assert_eq!(oracle, vec![1, -1, -1, 0, 0, 1, 0, 1]);
}

#[test]
fn zero_exponent_gives_one() {
    let p = prog_product::<Rational>(&(), 5, 2, None, 0, false, &rat(10, 1)).unwrap();
    assert_eq!(p, PuiseuxSeries::one((), &rat(10, 1)));
}

#[test]
fn rogers_ramanujan_body_from_two_progressions() {
    let len = 40;
    let end = rat_int(len as i64);
    let a = prog_product::<Rational>(&(), 5, 1, None, -1, false, &end).unwrap();
    let b = prog_product::<Rational>(&(), 5, 4, None, -1, false, &end).unwrap();
    let mut oracle = vec![1i64];
    let mut n = 1;
    while n < len {
        if n % 5 == 1 || n % 5 == 4 {
            oracle = poly_mul(&oracle, &geometric_in(n, len), len);
        }
        n += 1;
    }
    assert_eq!(ints(&a.mul(&b), len), oracle);
}

#[test]
fn twisted_progression_with_constant_term() {
    // ∏_{n ≡ 0 (3), n >= 0} (1 - ζ q^n)^{-1} has the constant (1 - ζ)^{-1}.
    let f = CyclotomicField::get(3);
    let z = CyclotomicNumber::zeta_power(&f, 1);
    let p = prog_product(&f, 3, 0, Some(&z), -1, true, &rat(7, 1)).unwrap();
    let c0 = CyclotomicNumber::one_in(&f).minus(&z).inverse().unwrap();
    assert_eq!(p.coefficient(&rat(0, 1)).unwrap(), c0);
    assert_eq!(p.coefficient(&rat(3, 1)).unwrap(), c0.times(&z));
    assert!(prog_product::<Rational>(&(), 3, 0, None, -1, true, &rat(5, 1)).is_err());
}

#[test]
fn extraction_of_simple_products() {
    let f = series(1, 0, &[1; 12], 12);
    let a = extract_product_exponents(&f, 10).unwrap();
    assert!(a.integral);
    assert_eq!(a.exponents[0], rat(-1, 1));
    assert!(a.exponents[1..].iter().all(|x| x.is_zero()));

    let g = build_product(&[-1, -1], 12);
    let b = extract_product_exponents(&g, 11).unwrap();
    assert_eq!(b.as_integers().unwrap()[..3], [(-1).into(), (-1).into(), BigInt::zero()]);
    assert!(b.exponents[2..].iter().all(|x| x.is_zero()));
}

#[test]
fn extraction_needs_precision() {
    let f = series(1, 0, &[1, 1], 5);
    assert!(matches!(
        extract_product_exponents(&f, 5),
        Err(crate::Error::InsufficientPrecision { .. })
    ));
    assert!(extract_product_exponents(&series(1, 1, &[1], 5), 2).is_err());
}

#[test]
fn square_root_has_rational_exponents() {
    // (1 - q)^{1/2} has a(1) = 1/2 and nothing else.
    let mut c = vec![Rational::one()];
    for k in 1..15 {
        let prev = c[k - 1].clone();
        c.push(prev * (rat_int(k as i64 - 1) - rat(1, 2)) / rat_int(k as i64));
    }
    let f = PuiseuxSeries::new((), 1, 0, c, 15);
    let a = extract_product_exponents(&f, 14).unwrap();
    assert!(!a.integral);
    assert_eq!(a.exponents[0], rat(1, 2));
    assert!(a.exponents[1..].iter().all(|x| x.is_zero()));
    assert_eq!(exponents_by_logderiv(&f, 14), a.exponents);
}

#[test]
fn eta_prefix_and_24th_power() {
    let e = eta_expansion(&rat(12, 1));
    assert_eq!(e.leading_exponent(), Some(rat(1, 24)));
    assert_eq!(e.coefficient(&rat(1, 24)).unwrap(), rat(1, 1));
    let e24 = e.pow(24).unwrap();
    let body = build_product(&[24; 12], 12).shift(&rat(1, 1));
    assert!(e24.agrees_with(&body, &rat(12, 1)).unwrap());
}

#[test]
fn rendering_and_json() {
    let body: Vec<BigInt> = vec![1, 1, 1, 1, 1].into_iter().map(BigInt::from).collect();
    let f = PuiseuxSeries::from_integer_body(&rat(-1, 60), &body);
    assert_eq!(f.to_string(), "q^(\u{2212}1/60)·(1 + q + q² + q³ + q⁴ + …)");
    let g = series(2, 0, &[1, -3, 0, 2], 6);
    assert_eq!(g.to_string(), "1 \u{2212} 3·q^(1/2) + 2·q^(3/2) + …");
    let back = PuiseuxSeries::<Rational>::from_json(&(), &f.to_json()).unwrap();
    assert_eq!(back, f);
    let text = serde_json::to_string(&f.to_json()).unwrap();
    let again: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&again).unwrap(), text);
}

#[test]
fn windows_and_coefficients() {
    let f = series(4, -1, &[2, 0, 3], 10);
    assert_eq!(f.coefficient(&rat(-1, 4)).unwrap(), rat(2, 1));
    assert_eq!(f.coefficient(&rat(1, 4)).unwrap(), rat(3, 1));
    assert_eq!(f.coefficient(&rat(1, 8)).unwrap(), rat(0, 1));
    assert!(f.coefficient(&rat(9, 4)).is_err());
    let w = f.window(&rat(-1, 2), 4, 4).unwrap();
    assert_eq!(w, vec![rat(0, 1), rat(2, 1), rat(0, 1), rat(3, 1)]);
    assert!(f.window(&rat(0, 1), 4, 20).is_err());
}

#[test]
fn substitution_moves_the_lattice() {
    let f = series(1, 0, &[1, 2, 3], 3);
    let g = f.substitute_power(&rat(1, 5)).unwrap();
    assert_eq!(g.denom(), 5);
    assert_eq!(g.coefficient(&rat(2, 5)).unwrap(), rat(3, 1));
    assert_eq!(g.precision_end(), rat(3, 5));
}

fn arb_series() -> impl Strategy<Value = PuiseuxSeries<Rational>> {
    (1u64..=24, -30i64..30, prop::collection::vec(-9i64..10, 1..16), 0i64..6).prop_map(
        |(d, lead, mut c, extra)| {
            if c[0] == 0 {
                c[0] = 1;
            }
            let prec = c.len() as i64 + extra;
            series(d, lead, &c, prec)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ring_laws(f in arb_series(), g in arb_series(), h in arb_series()) {
        prop_assert_eq!(f.add(&g), g.add(&f));
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.add(&g).add(&h), f.add(&g.add(&h)));
        let lhs = f.mul(&g).mul(&h);
        let rhs = f.mul(&g.mul(&h));
        prop_assert_eq!(lhs, rhs);
        // Distributivity holds up to the smaller of the two precisions.
        let lhs = f.mul(&g.add(&h));
        let rhs = f.mul(&g).add(&f.mul(&h));
        let end = lhs.precision_end().min(rhs.precision_end());
        prop_assert!(lhs.truncate(&end) == rhs.truncate(&end));
    }

    #[test]
    fn precision_is_never_invented(f in arb_series(), g in arb_series()) {
        let s = f.add(&g);
        prop_assert!(s.precision_end() <= f.precision_end().min(g.precision_end()));
        let p = f.mul(&g);
        let lf = f.leading_exponent().unwrap();
        let lg = g.leading_exponent().unwrap();
        let bound = (&lf + g.precision_end()).min(&lg + f.precision_end());
        prop_assert!(p.precision_end() <= bound);
        let i = f.inv().unwrap();
        prop_assert!(i.precision_end() - i.leading_exponent().unwrap()
            <= f.precision_end() - lf);
    }

    #[test]
    fn double_inverse(f in arb_series()) {
        prop_assert_eq!(f.inv().unwrap().inv().unwrap(), f.clone());
        let one = f.mul(&f.inv().unwrap());
        prop_assert_eq!(one.leading_exponent(), Some(rat(0, 1)));
        prop_assert_eq!(one.coeffs().len(), 1);
    }

    #[test]
    fn product_round_trip(a in prop::collection::vec(-4i64..5, 1..50)) {
        let n = a.len();
        let f = build_product(&a, n + 1);
        let got = extract_product_exponents(&f, n).unwrap();
        prop_assert!(got.integral);
        let want: Vec<Rational> = a.iter().map(|&x| rat_int(x)).collect();
        prop_assert_eq!(&got.exponents, &want);
        prop_assert_eq!(exponents_by_logderiv(&f, n), want);
    }

    #[test]
    fn json_round_trip(f in arb_series()) {
        prop_assert_eq!(PuiseuxSeries::<Rational>::from_json(&(), &f.to_json()).unwrap(), f);
    }
}
