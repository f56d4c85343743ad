//! Exact integer substrate: factorization with a budget, residue symbols,
//! Hilbert symbols over the completions of Q, and 2-adic square roots.

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("factorization of {n} exceeded the configured budget")]
    FactorizationBudgetExceeded { n: i64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// Limits for [`factorize_with`]: trial division up to `trial_limit`, then
/// Pollard–Brent rho with at most `rho_iterations` steps per attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    pub trial_limit: u64,
    pub rho_iterations: u64,
    pub rho_attempts: u32,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_limit: 1_000_000,
            rho_iterations: 1 << 22,
            rho_attempts: 16,
        }
    }
}

/// `n = m * s^2` with `m` squarefree and carrying the sign of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SquarefreeDecomposition {
    pub m: i64,
    pub s: u64,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant; `c` doubles as the deterministic seed.
fn rho_brent(n: u64, c: u64, max_iter: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let mut y = 2 % n;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    let mut steps = 0u64;
    const BATCH: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BATCH;
            steps += BATCH;
            if steps > max_iter {
                return None;
            }
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_composite(n: u64, budget: &FactorBudget, out: &mut Vec<u64>) -> bool {
    if n == 1 {
        return true;
    }
    if is_prime(n) {
        out.push(n);
        return true;
    }
    if let Some(r) = n.sqrt().checked_pow(2) {
        if r == n {
            let s = n.sqrt();
            return split_composite(s, budget, out) && split_composite(s, budget, out);
        }
    }
    for attempt in 0..budget.rho_attempts {
        if let Some(f) = rho_brent(n, 1 + attempt as u64, budget.rho_iterations) {
            return split_composite(f, budget, out) && split_composite(n / f, budget, out);
        }
    }
    false
}

/// Prime factorization of `n > 0` as `(prime, exponent)` pairs in ascending order.
pub fn factorize_with(n: u64, budget: &FactorBudget) -> Result<Vec<(u64, u32)>, ArithError> {
    if n == 0 {
        return Err(ArithError::PreconditionViolated("cannot factor 0".into()));
    }
    let mut rest = n;
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p <= budget.trial_limit && p.saturating_mul(p) <= rest {
        while rest % p == 0 {
            primes.push(p);
            rest /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 && !split_composite(rest, budget, &mut primes) {
        return Err(ArithError::FactorizationBudgetExceeded {
            n: i64::try_from(n).unwrap_or(i64::MAX),
        });
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    Ok(out)
}

pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>, ArithError> {
    factorize_with(n, &FactorBudget::default())
}

pub fn squarefree_part_with(n: i64, budget: &FactorBudget) -> Result<SquarefreeDecomposition, ArithError> {
    if n == 0 {
        return Err(ArithError::PreconditionViolated("squarefree part of 0".into()));
    }
    let mut m: i64 = n.signum();
    let mut s: u64 = 1;
    for (p, e) in factorize_with(n.unsigned_abs(), budget)? {
        if e % 2 == 1 {
            m *= p as i64;
        }
        s *= p.pow(e / 2);
    }
    Ok(SquarefreeDecomposition { m, s })
}

pub fn squarefree_part(n: i64) -> Result<SquarefreeDecomposition, ArithError> {
    squarefree_part_with(n, &FactorBudget::default())
}

pub fn is_squarefree(n: i64) -> Result<bool, ArithError> {
    Ok(squarefree_part(n)?.s == 1)
}

/// Positive squarefree divisors of `n`, ascending.
pub fn squarefree_divisors(n: u64) -> Result<Vec<u64>, ArithError> {
    let mut divs = vec![1u64];
    for (p, _) in factorize(n)? {
        let more: Vec<u64> = divs.iter().map(|d| d * p).collect();
        divs.extend(more);
    }
    divs.sort_unstable();
    Ok(divs)
}

/// Number of distinct prime divisors.
pub fn omega(n: u64) -> Result<usize, ArithError> {
    Ok(factorize(n)?.len())
}

/// Kronecker symbol `(a / n)`.
pub fn kronecker_symbol(a: i64, n: i64) -> i8 {
    let mut a = a as i128;
    let mut n = n as i128;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut t: i8 = 1;
    while n % 2 == 0 {
        n /= 2;
        // (a/2) = (-1)^((a^2-1)/8)
        let r = a.rem_euclid(8);
        if r == 3 || r == 5 {
            t = -t;
        }
    }
    if n < 0 {
        n = -n;
        if a < 0 {
            t = -t;
        }
    }
    // Jacobi symbol (a / n), n odd positive.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// A prime number, checked on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Option<Prime> {
        is_prime(p).then_some(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Place {
    Real,
    Finite(Prime),
}

impl Place {
    pub fn prime(p: u64) -> Option<Place> {
        Prime::new(p).map(Place::Finite)
    }
}

fn split_valuation(mut n: i128, p: i128) -> (u32, i128) {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// Hilbert symbol `(a, b)_v` for nonzero rationals: `+1` when
/// `z^2 = a x^2 + b y^2` has a nontrivial solution over `Q_v`.
///
/// Panics if either argument is zero.
pub fn hilbert_symbol_q(a: Rational64, b: Rational64, v: Place) -> i8 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    // n/d lies in the square class of n*d.
    let a = *a.numer() as i128 * *a.denom() as i128;
    let b = *b.numer() as i128 * *b.denom() as i128;
    hilbert_symbol_int(a, b, v)
}

pub(crate) fn hilbert_symbol_int(a: i128, b: i128, v: Place) -> i8 {
    match v {
        Place::Real => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(p) if p.get() == 2 => {
            let (alpha, u) = split_valuation(a, 2);
            let (beta, w) = split_valuation(b, 2);
            let eps = |x: i128| ((x.rem_euclid(4) - 1) / 2) as u32;
            let omg = |x: i128| {
                let r = x.rem_euclid(8);
                u32::from(r == 3 || r == 5)
            };
            let e = eps(u) * eps(w) + alpha * omg(w) + beta * omg(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let p = p.get() as i128;
            let (alpha, u) = split_valuation(a, p);
            let (beta, w) = split_valuation(b, p);
            let legendre = |x: i128| kronecker_symbol(x.rem_euclid(p) as i64, p as i64) as i32;
            let mut s: i32 = 1;
            if (alpha * beta) % 2 == 1 && p % 4 == 3 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= legendre(u);
            }
            if alpha % 2 == 1 {
                s *= legendre(w);
            }
            s as i8
        }
    }
}

/// Square root of `d ≡ 1 (mod 8)` modulo `2^k` by Hensel lifting.
///
/// The returned root is the least nonnegative residue with `x ≡ 1 (mod 4)`;
/// the other embedding is `-x`.
pub fn sqrt_mod_2k(d: i64, k: u32) -> Result<u64, ArithError> {
    if d.rem_euclid(8) != 1 {
        return Err(ArithError::PreconditionViolated(format!("{d} is not 1 mod 8")));
    }
    if !(3..=62).contains(&k) {
        return Err(ArithError::PreconditionViolated(format!("precision 2^{k} out of range")));
    }
    let modulus: i128 = 1 << k;
    let d = (d as i128).rem_euclid(modulus);
    let mut x: i128 = 1;
    // invariant: x^2 ≡ d (mod 2^j)
    for j in 3..k {
        if (x * x - d).rem_euclid(1 << (j + 1)) != 0 {
            x += 1 << (j - 1);
        }
    }
    // roots mod 2^k are ±x and ±x + 2^(k-1); keep those ≡ 1 mod 4, take the least.
    let half = modulus / 2;
    let mut best = None;
    for c in [x, -x, x + half, -x + half] {
        let c = c.rem_euclid(modulus);
        if c % 4 == 1 && best.is_none_or(|b| c < b) {
            best = Some(c);
        }
    }
    Ok(best.expect("some root is 1 mod 4") as u64)
}

/// Nonnegative square root of `n` if `n` is a perfect square.
pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// `n / k` when `k` divides `n` and the quotient is a perfect square.
pub fn square_cofactor(n: &BigInt, k: &BigInt) -> Option<BigInt> {
    if k.is_zero() {
        return None;
    }
    let (q, r) = n.div_rem(k);
    if !r.is_zero() || q.is_negative() {
        return None;
    }
    is_perfect_square(&q)
}
