//! Extensions `0 → A → B → C → 0` of finite abelian 2-groups.
//!
//! `B` is presented as `⊕ Z/2^{e_i}` and a subgroup `A` by generator vectors.
//! All structural questions are reduced to Smith normal forms of integer
//! relation matrices over `Z/2^K`, where only 2-adic valuations matter.
//! The exhaustive routines at the end enumerate elements and serve as
//! oracles for small groups.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Abelian2Error {
    #[error("invariant factor {0} is not a power of 2 that is at least 2")]
    NotPowerOfTwo(u64),
    #[error("invariant factor 2^{0} is too large")]
    FactorTooLarge(u32),
    #[error("generator {index} does not lie in B: {detail}")]
    NotASubgroup { index: usize, detail: String },
    #[error("group of order 2^{log_order} exceeds the exhaustive limit 2^{limit}")]
    TooLarge { log_order: u32, limit: u32 },
}

pub type Result<T> = std::result::Result<T, Abelian2Error>;

/// Largest exponent accepted for a single cyclic factor.
pub const MAX_FACTOR_EXPONENT: u32 = 62;

/// Exhaustive routines refuse groups larger than `2^BRUTE_FORCE_LOG_LIMIT`.
pub const BRUTE_FORCE_LOG_LIMIT: u32 = 10;

/// `⊕ Z/n_i` with every `n_i` a power of 2. Coordinates follow the given order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Group2 {
    factors: Vec<u64>,
}

impl Group2 {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        for &n in &factors {
            if n < 2 || !n.is_power_of_two() {
                return Err(Abelian2Error::NotPowerOfTwo(n));
            }
            if n.trailing_zeros() > MAX_FACTOR_EXPONENT {
                return Err(Abelian2Error::FactorTooLarge(n.trailing_zeros()));
            }
        }
        Ok(Group2 { factors })
    }

    pub fn trivial() -> Self {
        Group2 { factors: Vec::new() }
    }

    /// Factors in presentation order.
    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Sorted factors forming a divisibility chain.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let mut v = self.factors.clone();
        v.sort_unstable();
        v
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn log_order(&self) -> u32 {
        self.factors.iter().map(|n| n.trailing_zeros()).sum()
    }

    /// Exponent of the group as a power of 2.
    pub fn log_exponent(&self) -> u32 {
        self.factors.iter().map(|n| n.trailing_zeros()).max().unwrap_or(0)
    }

    pub fn rank2(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn four_rank(&self) -> u32 {
        self.factors.iter().filter(|&&n| n >= 4).count() as u32
    }

    pub fn reduce(&self, v: &[i64]) -> Vec<u64> {
        v.iter().zip(&self.factors).map(|(&x, &n)| x.rem_euclid(n as i64) as u64).collect()
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).zip(&self.factors).map(|((a, b), n)| (a + b) % n).collect()
    }

    pub fn scale(&self, k: u64, x: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(&self.factors)
            .map(|(&a, &n)| ((a as u128 * k as u128) % n as u128) as u64)
            .collect()
    }

    pub fn is_zero(&self, x: &[u64]) -> bool {
        x.iter().all(|&a| a == 0)
    }

    pub fn element_order(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.factors)
            .map(|(&a, &n)| if a == 0 { 1 } else { n >> a.trailing_zeros().min(n.trailing_zeros()) })
            .max()
            .unwrap_or(1)
    }
}

impl fmt::Display for Group2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z/{n}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Diagonal valuations of the Smith normal form of `rows` over `Z/2^k`.
/// Entries equal to `k` stand for zero.
fn smith_valuations(mut rows: Vec<Vec<u64>>, ncols: usize, k: u32) -> Vec<u32> {
    let mask: u64 = if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
    for r in rows.iter_mut() {
        for x in r.iter_mut() {
            *x &= mask;
        }
    }
    let val = |x: u64| if x == 0 { k } else { x.trailing_zeros().min(k) };
    let mut out = Vec::with_capacity(ncols);
    for t in 0..ncols {
        let mut best: Option<(u32, usize, usize)> = None;
        for (r, row) in rows.iter().enumerate().skip(t) {
            for (c, &x) in row.iter().enumerate().skip(t) {
                let v = val(x);
                if v < k && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, r, c));
                }
            }
        }
        let Some((v, r, c)) = best else {
            out.extend(std::iter::repeat_n(k, ncols - t));
            break;
        };
        rows.swap(t, r);
        for row in rows.iter_mut() {
            row.swap(t, c);
        }
        let unit = rows[t][t] >> v;
        let inv = inverse_odd(unit);
        for x in rows[t].iter_mut() {
            *x = x.wrapping_mul(inv) & mask;
        }
        let pivot_row = rows[t].clone();
        for row in rows.iter_mut().skip(t + 1) {
            let f = row[t] >> v;
            if f == 0 {
                continue;
            }
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(t) {
                *x = x.wrapping_sub(f.wrapping_mul(*p)) & mask;
            }
        }
        out.push(v);
    }
    out
}

fn inverse_odd(u: u64) -> u64 {
    // Newton iteration doubles the number of correct bits each step
    let mut x = u;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(u.wrapping_mul(x)));
    }
    x
}

/// Subgroup of a [`Group2`] spanned by generator vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subgroup {
    ambient: Group2,
    generators: Vec<Vec<u64>>,
}

impl Subgroup {
    /// Generators are reduced modulo the ambient factors.
    pub fn new(ambient: &Group2, generators: &[Vec<i64>]) -> Result<Self> {
        let mut gens = Vec::with_capacity(generators.len());
        for (index, g) in generators.iter().enumerate() {
            if g.len() != ambient.dim() {
                return Err(Abelian2Error::NotASubgroup {
                    index,
                    detail: format!("length {} but B has {} components", g.len(), ambient.dim()),
                });
            }
            gens.push(ambient.reduce(g));
        }
        Ok(Subgroup { ambient: ambient.clone(), generators: gens })
    }

    pub fn trivial(ambient: &Group2) -> Self {
        Subgroup { ambient: ambient.clone(), generators: Vec::new() }
    }

    pub fn whole(ambient: &Group2) -> Self {
        let gens = (0..ambient.dim())
            .map(|i| (0..ambient.dim()).map(|j| u64::from(i == j)).collect())
            .collect();
        Subgroup { ambient: ambient.clone(), generators: gens }
    }

    pub fn ambient(&self) -> &Group2 {
        &self.ambient
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    /// Relation matrix of `B / ⟨2^j · gens⟩` as rows over `Z`.
    fn relation_rows(&self, scale: u64) -> Vec<Vec<u64>> {
        let b = &self.ambient;
        let mut rows: Vec<Vec<u64>> = self.generators.iter().map(|g| b.scale(scale, g)).collect();
        for (i, &n) in b.factors.iter().enumerate() {
            let mut r = vec![0; b.dim()];
            r[i] = n;
            rows.push(r);
        }
        rows
    }

    fn modulus_exponent(&self) -> u32 {
        self.ambient.log_exponent() + 1
    }

    /// `B / A` as a group.
    pub fn quotient(&self) -> Group2 {
        let vals = smith_valuations(self.relation_rows(1), self.ambient.dim(), self.modulus_exponent());
        let mut factors: Vec<u64> = vals.into_iter().filter(|&v| v > 0).map(|v| 1u64 << v).collect();
        factors.sort_unstable();
        Group2 { factors }
    }

    /// `log₂ |2^j A|`.
    fn log_order_scaled(&self, j: u32) -> u32 {
        let scale = if j >= 64 { 0 } else { 1u64 << j };
        let vals = smith_valuations(self.relation_rows(scale), self.ambient.dim(), self.modulus_exponent());
        self.ambient.log_order() - vals.iter().sum::<u32>()
    }

    pub fn log_order(&self) -> u32 {
        self.log_order_scaled(0)
    }

    /// Isomorphism type of `A`, from the orders of `2^j A`.
    pub fn structure(&self) -> Group2 {
        let e = self.ambient.log_exponent();
        let sizes: Vec<u32> = (0..=e + 1).map(|j| self.log_order_scaled(j)).collect();
        // at_least[j] = number of cyclic factors of order ≥ 2^{j+1}
        let at_least: Vec<u32> = sizes.windows(2).map(|w| w[0] - w[1]).collect();
        let mut factors = Vec::new();
        for j in 0..at_least.len() {
            let next = at_least.get(j + 1).copied().unwrap_or(0);
            for _ in 0..at_least[j] - next {
                factors.push(1u64 << (j + 1));
            }
        }
        factors.sort_unstable();
        Group2 { factors }
    }

    pub fn rank2(&self) -> u32 {
        self.log_order_scaled(0) - self.log_order_scaled(1)
    }

    pub fn four_rank(&self) -> u32 {
        self.log_order_scaled(1) - self.log_order_scaled(2)
    }

    /// Membership through quotient orders: `v ∈ A` iff adjoining `v` keeps `|B/A|`.
    pub fn contains(&self, v: &[i64]) -> bool {
        if v.len() != self.ambient.dim() {
            return false;
        }
        let mut ext = self.clone();
        ext.generators.push(self.ambient.reduce(v));
        ext.log_order() == self.log_order()
    }

    /// Every generator is killed by 2.
    pub fn is_elementary(&self) -> bool {
        self.generators.iter().all(|g| self.ambient.is_zero(&self.ambient.scale(2, g)))
    }

    /// Dimension of the image of `A` in `B/2B`.
    pub fn rank_mod_2b(&self) -> u32 {
        let rows: Vec<Vec<u8>> =
            self.generators.iter().map(|g| g.iter().map(|&x| (x & 1) as u8).collect()).collect();
        let (rank, _) = f2_row_reduce(rows, self.ambient.dim());
        rank
    }

    /// `A₁ = A ∩ 2B`: doubled generators plus combinations vanishing mod 2.
    pub fn intersect_2b(&self) -> Subgroup {
        let b = &self.ambient;
        let mut gens: Vec<Vec<u64>> = self.generators.iter().map(|g| b.scale(2, g)).collect();
        // columns are generators; nullspace of the dim × k matrix over F_2
        let k = self.generators.len();
        let cols: Vec<Vec<u8>> =
            (0..b.dim()).map(|i| self.generators.iter().map(|g| (g[i] & 1) as u8).collect()).collect();
        for combo in f2_nullspace(cols, k) {
            let mut acc = vec![0u64; b.dim()];
            for (j, &c) in combo.iter().enumerate() {
                if c == 1 {
                    acc = b.add(&acc, &self.generators[j]);
                }
            }
            gens.push(acc);
        }
        gens.retain(|g| !b.is_zero(g));
        Subgroup { ambient: b.clone(), generators: gens }
    }
}

/// Row echelon form over `F_2`; returns the rank and the pivot columns.
fn f2_row_reduce(mut rows: Vec<Vec<u8>>, ncols: usize) -> (u32, Vec<(usize, Vec<u8>)>) {
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] == 1) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][c] == 1 {
                let pivot = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let pivots = pivot_cols.into_iter().zip(rows).collect();
    (r as u32, pivots)
}

/// Basis of `{x ∈ F_2^ncols : M x = 0}`.
fn f2_nullspace(rows: Vec<Vec<u8>>, ncols: usize) -> Vec<Vec<u8>> {
    let (_, pivots) = f2_row_reduce(rows, ncols);
    let pivot_cols: Vec<usize> = pivots.iter().map(|(c, _)| *c).collect();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let mut x = vec![0u8; ncols];
        x[free] = 1;
        for (c, row) in &pivots {
            x[*c] = row[free];
        }
        basis.push(x);
    }
    basis
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionReport {
    pub rank_a: u32,
    pub rank_b: u32,
    pub rank_c: u32,
    pub rank_a1: u32,
    /// `rank(A/A₁)`, the image of `A` in `B/2B`.
    pub rank_a_mod_a1: u32,
    pub four_rank_b: u32,
    pub four_rank_bound: i64,
    pub a_elementary: bool,
    pub max_summand_rank: Option<u32>,
    pub splits: Option<bool>,
    pub a_structure: Group2,
    pub c_structure: Group2,
}

impl ExtensionReport {
    /// The elementary-case formulas evaluated without checking their hypothesis.
    pub fn naive_elementary_formulas(&self) -> (i64, bool) {
        (self.rank_b as i64 - self.rank_c as i64, self.rank_b == self.rank_a + self.rank_c)
    }
}

pub fn analyze_extension(b: &Group2, a: &Subgroup) -> Result<ExtensionReport> {
    if a.ambient() != b {
        return Err(Abelian2Error::NotASubgroup {
            index: 0,
            detail: format!("A lives in {} rather than {}", a.ambient(), b),
        });
    }
    let a_structure = a.structure();
    let c_structure = a.quotient();
    let rank_a = a_structure.rank2();
    let rank_b = b.rank2();
    let rank_c = c_structure.rank2();
    let a1 = a.intersect_2b();
    let rank_a1 = a1.rank2();
    let rank_a_mod_a1 = a.rank_mod_2b();
    let a_elementary = a.is_elementary();
    let (max_summand_rank, splits) = if a_elementary {
        (Some(rank_b - rank_c), Some(rank_b == rank_a + rank_c))
    } else {
        (None, None)
    };
    Ok(ExtensionReport {
        rank_a,
        rank_b,
        rank_c,
        rank_a1,
        rank_a_mod_a1,
        four_rank_b: b.four_rank(),
        four_rank_bound: rank_a as i64 + rank_c as i64 - rank_b as i64,
        a_elementary,
        max_summand_rank,
        splits,
        a_structure,
        c_structure,
    })
}

/// Explicit enumeration of a small group.
struct Enumerated<'a> {
    b: &'a Group2,
    elements: Vec<Vec<u64>>,
}

impl<'a> Enumerated<'a> {
    fn new(b: &'a Group2) -> Result<Self> {
        if b.log_order() > BRUTE_FORCE_LOG_LIMIT {
            return Err(Abelian2Error::TooLarge { log_order: b.log_order(), limit: BRUTE_FORCE_LOG_LIMIT });
        }
        let mut elements = vec![vec![]];
        for &n in &b.factors {
            elements = elements
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
        Ok(Enumerated { b, elements })
    }

    fn index(&self, v: &[u64]) -> usize {
        v.iter().zip(&self.b.factors).fold(0usize, |acc, (&x, &n)| acc * n as usize + x as usize)
    }

    fn span(&self, gens: &[Vec<u64>]) -> HashSet<usize> {
        let zero = vec![0u64; self.b.dim()];
        let mut set: HashSet<usize> = HashSet::from([self.index(&zero)]);
        let mut frontier = vec![zero];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.b.add(&x, g);
                if set.insert(self.index(&y)) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    /// A complement `B'` with `A ∩ B' = 0` and `A + B' = B`, if one exists.
    fn complement(&self, a: &HashSet<usize>) -> Option<Vec<Vec<u64>>> {
        let b = self.b;
        let a_elems: Vec<&Vec<u64>> = a.iter().map(|&i| &self.elements[i]).collect();
        // a coset of A is named by its least element index
        let coset_of: Vec<usize> = self
            .elements
            .iter()
            .map(|x| a_elems.iter().map(|y| self.index(&b.add(x, y))).min().expect("A is nonempty"))
            .collect();
        let zero = coset_of[0];
        let mul = |j: u64, c: usize| coset_of[self.index(&b.scale(j, &self.elements[c]))];
        let add = |c: usize, e: usize| coset_of[self.index(&b.add(&self.elements[c], &self.elements[e]))];
        let mut cosets: Vec<usize> = coset_of.clone();
        cosets.sort_unstable();
        cosets.dedup();

        // basis of C = B/A: a coset of maximal order modulo the span so far,
        // adjusted by the span to have that same order in C
        let mut span: HashSet<usize> = HashSet::from([zero]);
        let mut basis: Vec<(usize, u64)> = Vec::new();
        while span.len() < cosets.len() {
            let order_mod = |c: usize| {
                let mut k = 1;
                while !span.contains(&mul(k, c)) {
                    k += 1;
                }
                k
            };
            let (k, y) = cosets.iter().map(|&c| (order_mod(c), c)).max_by_key(|&(k, c)| (k, std::cmp::Reverse(c)))?;
            let mut members: Vec<usize> = span.iter().copied().collect();
            members.sort_unstable();
            let gen = members
                .iter()
                .map(|&s| add(y, s))
                .find(|&g| mul(k, g) == zero)
                .expect("a maximal-order class always has a representative of the same order");
            let old: Vec<usize> = span.iter().copied().collect();
            for s in old {
                for j in 1..k {
                    span.insert(add(s, mul(j, gen)));
                }
            }
            basis.push((gen, k));
        }
        // lift each basis coset to an element whose order divides its order in C
        let mut lifts = Vec::new();
        for &(c, k) in &basis {
            let lift = self.elements.iter().enumerate().find(|(i, y)| coset_of[*i] == c && b.is_zero(&b.scale(k, y)))?;
            lifts.push(lift.1.clone());
        }
        let bp = self.span(&lifts);
        let meet_trivial = bp.intersection(a).count() == 1;
        let sum_full = bp.len() * a.len() == self.elements.len();
        (meet_trivial && sum_full).then_some(lifts)
    }
}

/// Exhaustive search for a complement of `A` in `B`; `|B| ≤ 2^10`.
pub fn brute_force_splits(b: &Group2, a: &Subgroup) -> Result<bool> {
    Ok(brute_force_complement(b, a)?.is_some())
}

/// Generators of a complement of `A` in `B`, found by exhaustive search.
pub fn brute_force_complement(b: &Group2, a: &Subgroup) -> Result<Option<Vec<Vec<u64>>>> {
    if a.ambient() != b {
        return Err(Abelian2Error::NotASubgroup { index: 0, detail: "ambient group differs".into() });
    }
    let en = Enumerated::new(b)?;
    let a_set = en.span(a.generators());
    Ok(en.complement(&a_set))
}

/// Largest rank of a subgroup of `A` that is a direct summand of `B`, by
/// enumerating all subgroups of `A`. Exhaustive in both `|B|` and the number of
/// subgroups of `A`, so only `A` of rank at most 6 is accepted.
pub fn brute_force_max_summand_rank(b: &Group2, a: &Subgroup) -> Result<u32> {
    if a.ambient() != b {
        return Err(Abelian2Error::NotASubgroup { index: 0, detail: "ambient group differs".into() });
    }
    let en = Enumerated::new(b)?;
    let a_set = en.span(a.generators());
    let a_elems: Vec<Vec<u64>> = a_set.iter().map(|&i| en.elements[i].clone()).collect();
    if a_elems.len() > 1 << 6 {
        return Err(Abelian2Error::TooLarge { log_order: a.log_order(), limit: 6 });
    }
    // subgroups of A, grown by adjoining one element at a time
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut stack: Vec<Vec<Vec<u64>>> = vec![vec![]];
    let mut best = 0;
    while let Some(gens) = stack.pop() {
        let span = en.span(&gens);
        let mut key: Vec<usize> = span.iter().copied().collect();
        key.sort_unstable();
        if !seen.insert(key) {
            continue;
        }
        if en.complement(&span).is_some() {
            let rank = Subgroup { ambient: b.clone(), generators: gens.clone() }.rank2();
            best = best.max(rank);
        }
        for x in &a_elems {
            if !span.contains(&en.index(x)) {
                let mut g = gens.clone();
                g.push(x.clone());
                stack.push(g);
            }
        }
    }
    Ok(best)
}

/// Isomorphism type of a small subgroup by counting elements killed by `2^j`.
pub fn brute_force_structure(b: &Group2, a: &Subgroup) -> Result<Group2> {
    let en = Enumerated::new(b)?;
    let span = en.span(a.generators());
    let mut killed = vec![1usize];
    let mut j = 1u32;
    loop {
        let c = span.iter().filter(|&&i| b.is_zero(&b.scale(1 << j, &en.elements[i]))).count();
        killed.push(c);
        if c == span.len() {
            break;
        }
        j += 1;
    }
    let logs: Vec<u32> = killed.iter().map(|&c| c.trailing_zeros()).collect();
    let at_least: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
    let mut factors = Vec::new();
    for j in 0..at_least.len() {
        let next = at_least.get(j + 1).copied().unwrap_or(0);
        for _ in 0..at_least[j] - next {
            factors.push(1u64 << (j + 1));
        }
    }
    factors.sort_unstable();
    Ok(Group2 { factors })
}
