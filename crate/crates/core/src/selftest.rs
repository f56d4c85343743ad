//! Runtime invariant suites behind `quadunits selftest`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive};

use crate::abelian2::{self, Group2, Subgroup};
use crate::arith::{self, Place};
use crate::form_class::{self, ClassGroup};
use crate::quadfield::RealQuadratic;
use crate::unit_type::{self, CaseLabel};

#[derive(Debug, Clone, Default)]
pub struct SelftestConfig {
    /// Upper bound on the squarefree `d` that are examined.
    pub max_d: i64,
    /// Deliberately corrupt one check, to exercise the failure path.
    pub inject_fault: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checked: u64,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, ..Default::default() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok" } else { "FAILED" };
        write!(f, "{:<14} {:>8} checks  {}", self.name, self.checked, status)?;
        for failure in self.failures.iter().take(5) {
            write!(f, "\n    {failure}")?;
        }
        if self.failures.len() > 5 {
            write!(f, "\n    ... and {} more", self.failures.len() - 5)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct SelftestSummary {
    pub suites: Vec<SuiteResult>,
}

impl SelftestSummary {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn total_checks(&self) -> u64 {
        self.suites.iter().map(|s| s.checked).sum()
    }
}

fn squarefree_range(max_d: i64) -> Vec<i64> {
    (2..=max_d).filter(|&d| arith::is_squarefree(d).unwrap_or(false)).collect()
}

pub fn run(config: &SelftestConfig) -> SelftestSummary {
    let fields = squarefree_range(config.max_d);
    let suites = vec![
        arith_suite(config),
        unit_suite(&fields),
        classification_suite(&fields, config.inject_fault),
        class_group_suite(&fields),
        abelian2_suite(config),
    ];
    SelftestSummary { suites }
}

fn arith_suite(config: &SelftestConfig) -> SuiteResult {
    let mut s = SuiteResult::new("arith");
    if config.max_d < 2 {
        return s;
    }
    let limit = config.max_d.min(200);
    // Euler's criterion for odd primes
    for p in (3..=limit).filter(|&p| arith::is_prime(p as u64)) {
        for a in -30..=30i64 {
            let r = a.rem_euclid(p);
            let euler = if r == 0 {
                0
            } else if mod_pow(r as u64, (p as u64 - 1) / 2, p as u64) == 1 {
                1
            } else {
                -1
            };
            s.check(arith::kronecker_symbol(a, p) == euler, || format!("kronecker({a}, {p}) ≠ Euler"));
        }
    }
    // product formula and (a, −a) = 1
    let nonzero: Vec<i64> = (-24..=24).filter(|&x| x != 0).collect();
    for &a in &nonzero {
        for &b in &nonzero {
            let mut places = vec![Place::Real, Place::prime(2).expect("2 is prime")];
            for (p, _) in arith::factorize((a * b).unsigned_abs()).expect("small") {
                if p != 2 {
                    places.push(Place::prime(p).expect("factor is prime"));
                }
            }
            let product: i32 = places.iter().map(|&v| arith::hilbert_symbol_int(a as i128, b as i128, v) as i32).product();
            s.check(product == 1, || format!("product formula fails for ({a}, {b})"));
        }
        for &p in &[2u64, 3, 5, 7] {
            let v = Place::prime(p).expect("prime");
            s.check(arith::hilbert_symbol_int(a as i128, -a as i128, v) == 1, || format!("({a}, {}) at {p}", -a));
        }
    }
    for n in (1..=config.max_d.min(5000)).chain((-200..0).rev()) {
        let sf = arith::squarefree_part(n).expect("small");
        let rebuilt = sf.m as i128 * (sf.s as i128).pow(2);
        s.check(rebuilt == n as i128 && arith::is_squarefree(sf.m).unwrap_or(false), || {
            format!("squarefree decomposition of {n}")
        });
    }
    for d in (1..200i64).step_by(8) {
        for k in 3..=20 {
            let r = arith::sqrt_mod_2k(d, k).expect("d ≡ 1 mod 8");
            let m = 1u128 << k;
            s.check((r as u128 * r as u128) % m == d as u128 % m, || format!("sqrt of {d} mod 2^{k}"));
        }
    }
    s
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Least `y > 0` with `x² − d y² = ±4` integral, searching `y ≤ cap`.
pub fn smallest_unit_by_search(d: i64, cap: u64) -> Option<(u64, u64)> {
    let d128 = d as u128;
    for y in 1..=cap {
        let base = d128 * (y as u128) * (y as u128);
        for x2 in [base.checked_sub(4), Some(base + 4)].into_iter().flatten() {
            let x = x2.sqrt();
            if x * x == x2 && (d.rem_euclid(4) == 1 || (x % 2 == 0 && y % 2 == 0)) {
                return Some((x as u64, y));
            }
        }
    }
    None
}

fn unit_suite(fields: &[i64]) -> SuiteResult {
    let mut s = SuiteResult::new("units");
    for &d in fields {
        let k = match RealQuadratic::new(d) {
            Ok(k) => k,
            Err(e) => {
                s.check(false, || format!("d = {d}: {e}"));
                continue;
            }
        };
        let eps = k.epsilon();
        let n = eps.norm();
        s.check(n.abs().is_one() && n == BigInt::from(k.unit.norm), || format!("d = {d}: N(ε) = {n}"));
        s.check(eps.cmp_int(1) == std::cmp::Ordering::Greater, || format!("d = {d}: ε ≤ 1"));
        s.check(eps.y().is_positive() && eps.x().is_positive(), || format!("d = {d}: ε not normalized"));
        if d <= 200 {
            let cap = 300_000;
            let found = smallest_unit_by_search(d, cap);
            let ok = match (found, eps.y().to_u64()) {
                (Some((x, y)), Some(ey)) => x == eps.x().to_u64().unwrap_or(0) && y == ey,
                (None, Some(ey)) => ey > cap,
                _ => false,
            };
            s.check(ok, || format!("d = {d}: ε not minimal, search found {found:?}"));
        }
    }
    s
}

fn classification_suite(fields: &[i64], inject_fault: bool) -> SuiteResult {
    let mut s = SuiteResult::new("classification");
    let mut fault_pending = inject_fault;
    for &d in fields {
        let k = match RealQuadratic::new(d) {
            Ok(k) => k,
            Err(e) => {
                s.check(false, || format!("d = {d}: {e}"));
                continue;
            }
        };
        let r = match unit_type::classify(&k) {
            Ok(r) => r,
            Err(e) => {
                s.check(false, || format!("d = {d}: {e}"));
                continue;
            }
        };
        if r.unit_norm == -1 {
            s.check(r.case == CaseLabel::NormMinusOne, || format!("d = {d}: norm −1 but case {}", r.case));
            continue;
        }
        let disc = k.disc();
        let mut m = r.m.unwrap_or(0);
        if fault_pending {
            m += 1;
            fault_pending = false;
        }
        s.check(m > 1 && disc % m == 0, || format!("d = {d}: m = {m} does not divide D = {disc}"));
        let m_eps = k.epsilon().scale(&BigInt::from(m));
        s.check(m_eps.sqrt().is_some(), || format!("d = {d}: m·ε is not a square"));
        let left = arith::squarefree_part(disc / m.max(1)).map(|x| x.m).ok();
        s.check(left == r.m_complement, || format!("d = {d}: squarefree(D/m) ≠ squarefree(−N(ε−1))"));
        if let Some(h) = &r.hilbert90_witness {
            let twisted = &h.alpha.conjugate() == &(k.epsilon() * &h.alpha);
            s.check(twisted && h.alpha.norm() == BigInt::from(m), || format!("d = {d}: Hilbert 90 element fails"));
        } else {
            s.check(false, || format!("d = {d}: missing Hilbert 90 element"));
        }
        s.check(r.case == CaseLabel::from_congruences(d, m), || format!("d = {d}: case label"));
        s.check(r.is_square_mod4 == r.case.is_a(), || format!("d = {d}: square mod 4 vs case"));
        if r.is_square_mod4 {
            match unit_type::relative_integral_basis(&k.field, k.epsilon()) {
                Ok(basis) => s.check(&basis.discriminant() == k.epsilon(), || {
                    format!("d = {d}: relative discriminant is not ε")
                }),
                Err(e) => s.check(false, || format!("d = {d}: {e}")),
            }
        }
    }
    s
}

fn class_group_suite(fields: &[i64]) -> SuiteResult {
    let mut s = SuiteResult::new("class_groups");
    for &d in fields {
        let Ok(k) = RealQuadratic::new(d) else { continue };
        match form_class::rank_report(&k) {
            Ok(r) => s.check(r.verify().is_ok(), || format!("d = {d}: report fails verification")),
            Err(e) => {
                s.check(false, || format!("d = {d}: {e}"));
                continue;
            }
        }
        let Ok(cls) = ClassGroup::new(k.disc()) else { continue };
        let g = cls.cayley();
        let n = g.order();
        let mut laws = true;
        for x in 0..n {
            laws &= g.op(g.identity, x) == x;
            laws &= g.op(x, g.inverse(x)) == g.identity;
            laws &= cls.class_of(&cls.representative(x).inverse()).ok() == Some(g.inverse(x));
            for y in 0..n {
                laws &= g.op(x, y) == g.op(y, x);
                for z in 0..n {
                    laws &= g.op(g.op(x, y), z) == g.op(x, g.op(y, z));
                }
            }
        }
        s.check(laws, || format!("D = {}: group laws fail", k.disc()));
    }
    s
}

/// Every `B` of order at most `2^max_log` as a sorted factor list.
pub fn groups_up_to(max_log: u32) -> Vec<Group2> {
    fn partitions(n: u32, max_part: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(acc.clone());
            return;
        }
        for p in (1..=max_part.min(n)).rev() {
            acc.push(p);
            partitions(n - p, p, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    for n in 0..=max_log {
        let mut parts = Vec::new();
        partitions(n, n, &mut Vec::new(), &mut parts);
        for p in parts {
            let mut f: Vec<u64> = p.iter().map(|&e| 1u64 << e).collect();
            f.sort_unstable();
            out.push(Group2::new(f).expect("powers of 2"));
        }
    }
    out
}

fn abelian2_suite(config: &SelftestConfig) -> SuiteResult {
    let mut s = SuiteResult::new("abelian2");
    if config.max_d < 2 {
        return s;
    }
    for b in groups_up_to(5) {
        let elems = all_elements(&b);
        let half: Vec<&Vec<i64>> = elems.iter().filter(|v| b.is_zero(&b.scale(2, &b.reduce(v)))).collect();
        let mut subgroups: Vec<Subgroup> = elems.iter().map(|v| Subgroup::new(&b, &[v.clone()]).expect("dims")).collect();
        for (i, x) in half.iter().enumerate() {
            for y in &half[i..] {
                subgroups.push(Subgroup::new(&b, &[(*x).clone(), (*y).clone()]).expect("dims"));
            }
        }
        for a in subgroups {
            let Ok(r) = abelian2::analyze_extension(&b, &a) else {
                s.check(false, || format!("analysis failed on {b}"));
                continue;
            };
            s.check(r.four_rank_b as i64 >= r.four_rank_bound, || format!("4-rank bound fails on {b}"));
            s.check(r.rank_b == r.rank_a_mod_a1 + r.rank_c, || format!("exactness fails on {b}"));
            s.check(r.rank_a1 as i64 >= r.four_rank_bound, || format!("rank A₁ bound fails on {b}"));
            if let Some(split) = r.splits {
                let oracle = abelian2::brute_force_splits(&b, &a).unwrap_or(!split);
                s.check(split == oracle, || format!("splitting decision differs from oracle on {b}, A = {:?}", a.generators()));
            }
        }
    }
    s
}

fn all_elements(b: &Group2) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &n in b.factors() {
        out = out
            .into_iter()
            .flat_map(|e: Vec<i64>| {
                (0..n as i64).map(move |x| {
                    let mut v = e.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}
