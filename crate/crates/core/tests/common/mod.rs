//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's arithmetic, so agreement is a genuine cross-check.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Squarefree integers in `[2, n]` by sieving out multiples of squares.
pub fn squarefree_upto(n: i64) -> Vec<i64> {
    let mut ok = vec![true; (n + 1).max(0) as usize];
    let mut k = 2;
    while k * k <= n {
        let mut j = k * k;
        while j <= n {
            ok[j as usize] = false;
            j += k * k;
        }
        k += 1;
    }
    (2..=n).filter(|&d| ok[d as usize]).collect()
}

pub fn is_squarefree_naive(n: i64) -> bool {
    n >= 1 && (2..).take_while(|k| k * k <= n).all(|k| n % (k * k) != 0)
}

pub fn disc_of(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// Smallest unit `(x + y√d)/2 > 1` found by increasing `y`, as half-coordinates.
pub fn pell_search(d: i64, y_max: u128) -> Option<(u128, u128)> {
    let d = d as u128;
    let one_mod_4 = d % 4 == 1;
    for y in 1..=y_max {
        let base = d * y * y;
        for x2 in [base.checked_sub(4), Some(base + 4)].into_iter().flatten() {
            let mut x = (x2 as f64).sqrt() as u128;
            while x * x > x2 {
                x -= 1;
            }
            while (x + 1) * (x + 1) <= x2 {
                x += 1;
            }
            if x * x == x2 && (one_mod_4 || (x % 2 == 0 && y % 2 == 0)) {
                return Some((x, y));
            }
        }
    }
    None
}

fn is_integral(d: i64, x: &BigInt, y: &BigInt) -> bool {
    let two = BigInt::from(2);
    if d.rem_euclid(4) == 1 {
        (x - y).is_even()
    } else {
        x.mod_floor(&two).is_zero() && y.mod_floor(&two).is_zero()
    }
}

/// Whether `(x + y√d)/2 = α² + 4β` for integral `α`, `β`: try `α` over residues mod 2.
pub fn square_mod4_oracle(d: i64, x: &BigInt, y: &BigInt) -> bool {
    let omega: (i64, i64) = if d.rem_euclid(4) == 1 { (1, 1) } else { (0, 2) };
    for a in 0..2i64 {
        for b in 0..2i64 {
            // α = a + b·ω in half-coordinates
            let ax = BigInt::from(2 * a + b * omega.0);
            let ay = BigInt::from(b * omega.1);
            let sx = (&ax * &ax + BigInt::from(d) * &ay * &ay) / 2;
            let sy = &ax * &ay;
            let (rx, ry): (BigInt, BigInt) = (x - &sx, y - &sy);
            let four = BigInt::from(4);
            if rx.mod_floor(&four).is_zero() && ry.mod_floor(&four).is_zero() && is_integral(d, &(rx / 4), &(ry / 4)) {
                return true;
            }
        }
    }
    false
}

/// Whether the totally positive unit `(x + y√d)/2` of norm 1 is a sum of two squares in `Q(√d)`.
///
/// `−1` is a sum of two squares locally at every place except possibly the
/// dyadic ones, and a unit of norm 1 satisfies the product formula, so only
/// the split case `d ≡ 1 (mod 8)` can fail: there each embedding into `Q_2`
/// must be `≡ 1 (mod 4)`.
pub fn two_squares_oracle(d: i64, x: &BigInt, y: &BigInt) -> bool {
    if d.rem_euclid(8) != 1 {
        return true;
    }
    let modulus = 1i64 << 10;
    let root = (1..modulus).step_by(2).find(|r| (r * r - d).rem_euclid(modulus) == 0).expect("d ≡ 1 mod 8");
    [root, -root].iter().all(|&r| {
        // (x + y r)/2 mod 4 needs x + y r mod 8
        let v = (x + y * BigInt::from(r)).mod_floor(&BigInt::from(8));
        v == BigInt::from(2)
    })
}

fn is_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let r = n.sqrt();
        &r * &r == *n
    }
}

/// The squarefree divisor `m` of `D` with `N(ε + 1)/m` a square, given `N(ε + 1)`.
pub fn m_oracle(disc: i64, norm_eps_plus_one: &BigInt) -> Option<i64> {
    (1..=disc).filter(|&k| disc % k == 0 && is_squarefree_naive(k)).find(|&k| {
        let (q, r) = norm_eps_plus_one.div_rem(&BigInt::from(k));
        r.is_zero() && is_square(&q)
    })
}

/// Squarefree part of a nonzero integer `n`, certified as `n = s·t²` for a
/// caller-supplied squarefree candidate `s`.
pub fn certifies_squarefree_part(n: &BigInt, s: i64) -> bool {
    let (q, r) = n.div_rem(&BigInt::from(s));
    is_squarefree_naive(s.abs()) && r.is_zero() && is_square(&q)
}

/// Distinct prime divisors by trial division.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn prime_divisor_count(n: u64) -> u32 {
    prime_divisors(n).len() as u32
}

/// Histogram of element orders in `⊕ Z/n_i`, by explicit enumeration.
pub fn model_order_statistics(factors: &[u64]) -> BTreeMap<u64, usize> {
    let mut elems: Vec<Vec<u64>> = vec![vec![]];
    for &n in factors {
        elems = elems
            .into_iter()
            .flat_map(|e| {
                (0..n).map(move |x| {
                    let mut v = e.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    let mut hist = BTreeMap::new();
    for e in elems {
        let order = e.iter().zip(factors).map(|(&x, &n)| n / n.gcd(&x)).fold(1u64, |a, b| a.lcm(&b));
        *hist.entry(order).or_insert(0) += 1;
    }
    hist
}

/// `(a, b, c)` transformed by `(x, y) ↦ (p x + q y, r x + s y)`.
pub fn transform(f: (i64, i64, i64), m: (i64, i64, i64, i64)) -> (i64, i64, i64) {
    let (a, b, c) = f;
    let (p, q, r, s) = m;
    (
        a * p * p + b * p * r + c * r * r,
        2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
        a * q * q + b * q * s + c * s * s,
    )
}

/// Search for a matrix in `SL_2(Z)` with entries bounded by `bound` taking `f` to `g`.
pub fn properly_equivalent_by_search(f: (i64, i64, i64), g: (i64, i64, i64), bound: i64) -> bool {
    for p in -bound..=bound {
        for r in -bound..=bound {
            if transform(f, (p, 0, r, 0)).0 != g.0 {
                continue;
            }
            for q in -bound..=bound {
                for s in -bound..=bound {
                    if p * s - q * r == 1 && transform(f, (p, q, r, s)) == g {
                        return true;
                    }
                }
            }
        }
    }
    false
}
