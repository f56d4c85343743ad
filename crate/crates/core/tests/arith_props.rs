use num_rational::Rational64;
use proptest::prelude::*;
use quadunits::arith::{self, Place};

fn is_prime_naive(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

fn pow_mod(b: i64, e: u64, m: i64) -> i64 {
    let mut acc = 1i64;
    let mut base = b.rem_euclid(m);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

/// Kronecker symbol from Euler's criterion on the prime factorization of `n`.
fn kronecker_oracle(a: i64, n: i64) -> i8 {
    if n == 0 {
        return i8::from(a.abs() == 1);
    }
    let mut result = 1i8;
    let mut m = n;
    if m < 0 {
        m = -m;
        if a < 0 {
            result = -result;
        }
    }
    let mut p = 2;
    while m > 1 {
        while m % p == 0 {
            m /= p;
            let s = if p == 2 {
                match a.rem_euclid(8) {
                    0 | 2 | 4 | 6 => 0,
                    1 | 7 => 1,
                    _ => -1,
                }
            } else {
                match pow_mod(a, (p as u64 - 1) / 2, p) {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                }
            };
            result *= s;
        }
        p += 1;
    }
    result
}

/// Solvability of `z² = a x² + b y²` with a primitive vector modulo `p^k`.
fn locally_solvable(a: i64, b: i64, p: i64, k: u32) -> bool {
    let m = p.pow(k);
    let squares: Vec<i64> = (0..m).map(|z| z * z % m).collect();
    let mut unit_square = vec![false; m as usize];
    let mut any_square = vec![false; m as usize];
    for z in 0..m {
        any_square[squares[z as usize] as usize] = true;
        if z % p != 0 {
            unit_square[squares[z as usize] as usize] = true;
        }
    }
    for x in 0..m {
        for y in 0..m {
            let v = (a * squares[x as usize] + b * squares[y as usize]).rem_euclid(m) as usize;
            let primitive_xy = x % p != 0 || y % p != 0;
            if (primitive_xy && any_square[v]) || unit_square[v] {
                return true;
            }
        }
    }
    false
}

fn squarefree_values() -> Vec<i64> {
    (-15i64..=15).filter(|&x| x != 0 && arith::is_squarefree(x.abs()).unwrap()).collect()
}

#[test]
fn kronecker_matches_euler_oracle() {
    for n in -60..=60 {
        for a in -40..=40 {
            assert_eq!(arith::kronecker_symbol(a, n), kronecker_oracle(a, n), "({a}/{n})");
        }
    }
}

#[test]
fn hilbert_symbol_at_two_matches_solvability() {
    let vals = squarefree_values();
    for &a in &vals {
        for &b in &vals {
            let expected = if locally_solvable(a, b, 2, 6) { 1 } else { -1 };
            let got = arith::hilbert_symbol_q(Rational64::from(a), Rational64::from(b), Place::prime(2).unwrap());
            assert_eq!(got, expected, "({a}, {b})_2");
        }
    }
}

#[test]
fn hilbert_symbol_at_odd_primes_matches_solvability() {
    let vals = squarefree_values();
    for p in [3i64, 5, 7] {
        for &a in &vals {
            for &b in &vals {
                let expected = if locally_solvable(a, b, p, 3) { 1 } else { -1 };
                let got = arith::hilbert_symbol_q(
                    Rational64::from(a),
                    Rational64::from(b),
                    Place::prime(p as u64).unwrap(),
                );
                assert_eq!(got, expected, "({a}, {b})_{p}");
            }
        }
    }
}

#[test]
fn hilbert_symbol_of_fractions_uses_square_class() {
    let v = Place::prime(3).unwrap();
    let a = Rational64::new(2, 3);
    assert_eq!(arith::hilbert_symbol_q(a, Rational64::from(5), v), arith::hilbert_symbol_q(Rational64::from(6), Rational64::from(5), v));
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-5000i64..-1, 1i64..5000]
}

fn places_for(values: &[i64]) -> Vec<Place> {
    let mut places = vec![Place::Real, Place::prime(2).unwrap()];
    for &v in values {
        for (p, _) in arith::factorize(v.unsigned_abs()).unwrap() {
            let place = Place::prime(p).unwrap();
            if !places.contains(&place) {
                places.push(place);
            }
        }
    }
    places
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn hilbert_bimultiplicative(a in nonzero(), b in nonzero(), c in nonzero()) {
        for v in places_for(&[a, b, c]) {
            let h = |x: i64, y: i64| arith::hilbert_symbol_q(Rational64::from(x), Rational64::from(y), v);
            prop_assert_eq!(h(a, b * c), h(a, b) * h(a, c));
            prop_assert_eq!(h(a, b), h(b, a));
        }
    }

    #[test]
    fn hilbert_product_formula(a in nonzero(), b in nonzero()) {
        let product: i32 = places_for(&[a, b])
            .into_iter()
            .map(|v| arith::hilbert_symbol_q(Rational64::from(a), Rational64::from(b), v) as i32)
            .product();
        prop_assert_eq!(product, 1);
    }

    #[test]
    fn hilbert_a_minus_a(a in nonzero()) {
        for v in places_for(&[a]) {
            prop_assert_eq!(arith::hilbert_symbol_q(Rational64::from(a), Rational64::from(-a), v), 1);
        }
    }

    #[test]
    fn squarefree_reconstructs(n in prop_oneof![-1_000_000_000i64..-1, 1i64..1_000_000_000]) {
        let sf = arith::squarefree_part(n).unwrap();
        prop_assert_eq!(sf.m as i128 * (sf.s as i128) * (sf.s as i128), n as i128);
        prop_assert!(arith::is_squarefree(sf.m).unwrap());
    }

    #[test]
    fn sqrt_mod_two_power(t in 0i64..1_000_000, k in 3u32..=62) {
        let d = 8 * t + 1;
        let r = arith::sqrt_mod_2k(d, k).unwrap();
        let m = 1u128 << k;
        prop_assert_eq!((r as u128 * r as u128) % m, (d as u128) % m);
        prop_assert_eq!(r % 4, 1);
        prop_assert!((r as u128) < m);
    }

    #[test]
    fn factorization_multiplies_back(n in 2u64..u64::MAX / 4) {
        let f = arith::factorize(n).unwrap();
        let mut prod: u128 = 1;
        for (p, e) in &f {
            prop_assert!(arith::is_prime(*p));
            prod *= (*p as u128).pow(*e);
        }
        prop_assert_eq!(prod, n as u128);
    }
}

#[test]
fn miller_rabin_matches_trial_division() {
    for n in 0..20_000u64 {
        assert_eq!(arith::is_prime(n), is_prime_naive(n), "{n}");
    }
}

#[test]
fn squarefree_divisors_are_complete() {
    for n in 1..500u64 {
        let expected: Vec<u64> =
            (1..=n).filter(|k| n % k == 0 && arith::is_squarefree(*k as i64).unwrap()).collect();
        assert_eq!(arith::squarefree_divisors(n).unwrap(), expected, "{n}");
    }
}
