//! Narrow and wide class groups of real quadratic fields through indefinite
//! binary quadratic forms, and the 2-rank relations between them.
//!
//! A narrow class is a cycle of reduced forms under the reduction operator;
//! it is named by the lexicographically least form in its cycle. Composition
//! is Dirichlet composition followed by reduction. Group structure comes
//! from an element-order census of the Cayley table.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, ArithError, Place};
use crate::quadfield::{QuadInt, QuadraticField, RealQuadratic};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("discriminant {0} is a perfect square")]
    SquareDiscriminant(i64),
    #[error("{0} is not a positive discriminant (must be ≡ 0 or 1 mod 4)")]
    InvalidDiscriminant(i64),
    #[error("forms have different discriminants ({0} and {1})")]
    MixedDiscriminants(i64, i64),
    #[error("internal inconsistency for D = {disc}: {detail}")]
    InternalInconsistency { disc: i64, detail: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `a x² + b xy + c y²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BinaryQuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for BinaryQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn check_disc(disc: i64) -> Result<(), FormError> {
    if disc <= 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(FormError::InvalidDiscriminant(disc));
    }
    let s = disc.sqrt();
    if s * s == disc {
        return Err(FormError::SquareDiscriminant(disc));
    }
    Ok(())
}

impl BinaryQuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryQuadraticForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Principal form of discriminant `disc`.
    pub fn principal(disc: i64) -> Self {
        let b = disc.rem_euclid(2);
        BinaryQuadraticForm { a: 1, b, c: (b * b - disc) / 4 }
    }

    pub fn inverse(&self) -> Self {
        BinaryQuadraticForm { a: self.a, b: -self.b, c: self.c }
    }

    /// `|√D − 2|a|| < b < √D`, decided with integer arithmetic only.
    pub fn is_reduced(&self) -> bool {
        let disc = self.disc();
        let (b, t) = (self.b, 2 * self.a.abs());
        if b <= 0 || b * b >= disc {
            return false;
        }
        // t < √D + b
        let upper = t - b <= 0 || (t - b) * (t - b) < disc;
        // √D − b < t
        let lower = disc < (t + b) * (t + b);
        upper && lower
    }

    /// One step of the reduction operator: `(a, b, c) ↦ (c, b', (b'² − D)/4c)`
    /// with `b' ≡ −b (mod 2c)` normalized.
    pub fn rho(&self) -> Self {
        let disc = self.disc();
        let c = self.c;
        let two_c = 2 * c.abs();
        let s = disc.sqrt();
        let b_new = if c * c > disc {
            let r = (-self.b).rem_euclid(two_c);
            if r > c.abs() {
                r - two_c
            } else {
                r
            }
        } else {
            // largest value below √D in the class of −b
            s - (s + self.b).rem_euclid(two_c)
        };
        BinaryQuadraticForm { a: c, b: b_new, c: (b_new * b_new - disc) / (4 * c) }
    }

    /// A reduced form properly equivalent to `self`.
    pub fn reduce(&self) -> Result<Self, FormError> {
        check_disc(self.disc())?;
        let mut f = *self;
        let mut steps = 0u64;
        while !f.is_reduced() {
            f = f.rho();
            steps += 1;
            if steps > 10_000 + 4 * (self.a.unsigned_abs() + self.c.unsigned_abs()) {
                return Err(FormError::InternalInconsistency {
                    disc: self.disc(),
                    detail: format!("reduction of {self} did not terminate"),
                });
            }
        }
        Ok(f)
    }

    /// The cycle of a reduced form under [`rho`](Self::rho), starting at `self`.
    pub fn cycle(&self) -> Vec<Self> {
        debug_assert!(self.is_reduced());
        let mut out = vec![*self];
        let mut f = self.rho();
        while f != *self {
            out.push(f);
            f = f.rho();
        }
        out
    }
}

fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, x, y) with a x + b y = g ≥ 0
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = Integer::div_floor(&r0, &r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Dirichlet composition of two forms with positive leading coefficients.
pub fn compose_forms(f: &BinaryQuadraticForm, g: &BinaryQuadraticForm) -> Result<BinaryQuadraticForm, FormError> {
    let disc = f.disc();
    if disc != g.disc() {
        return Err(FormError::MixedDiscriminants(disc, g.disc()));
    }
    if f.a <= 0 || g.a <= 0 {
        return Err(FormError::InternalInconsistency {
            disc,
            detail: "composition expects positive leading coefficients".into(),
        });
    }
    let (f1, f2) = if f.a > g.a { (g, f) } else { (f, g) };
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (d, y1) = if a2 % a1 == 0 {
        (a1, 0)
    } else {
        let (g, u, _) = xgcd(a2, a1);
        (g, u)
    };
    let (d1, x2, y2) = if s % d == 0 {
        (d, 0, -1)
    } else {
        let (g, x, y) = xgcd(s, d);
        (g, x, -y)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let num = b3 * b3 - disc as i128;
    if num % (4 * a3) != 0 {
        return Err(FormError::InternalInconsistency { disc, detail: format!("composition of {f} and {g} failed") });
    }
    let c3 = num / (4 * a3);
    let narrow = |v: i128| i64::try_from(v).expect("composition coefficients fit in i64");
    BinaryQuadraticForm::new(narrow(a3), narrow(b3), narrow(c3)).reduce()
}

/// Invariant factors `n₁ | n₂ | …`, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct AbelianGroupStructure {
    pub invariant_factors: Vec<u64>,
}

impl AbelianGroupStructure {
    pub fn new(mut invariant_factors: Vec<u64>) -> Option<Self> {
        invariant_factors.sort_unstable();
        let ok = invariant_factors.iter().all(|&n| n >= 2)
            && invariant_factors.windows(2).all(|w| w[1] % w[0] == 0);
        ok.then_some(AbelianGroupStructure { invariant_factors })
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    /// Dimension of `A/2A` over `F_2`.
    pub fn rank2(&self) -> u32 {
        self.invariant_factors.iter().filter(|&&n| n % 2 == 0).count() as u32
    }

    /// Number of invariant factors divisible by 4.
    pub fn four_rank(&self) -> u32 {
        self.invariant_factors.iter().filter(|&&n| n % 4 == 0).count() as u32
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return f.write_str("trivial");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|n| format!("Z/{n}")).collect();
        f.write_str(&parts.join(" x "))
    }
}

/// A finite abelian group given by its Cayley table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyGroup {
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl CayleyGroup {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn pow(&self, x: usize, mut e: u64) -> usize {
        let mut acc = self.identity;
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.op(acc, base);
            }
            base = self.op(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> u64 {
        let mut acc = x;
        let mut k = 1;
        while acc != self.identity {
            acc = self.op(acc, x);
            k += 1;
        }
        k
    }

    pub fn inverse(&self, x: usize) -> usize {
        (0..self.order()).find(|&y| self.op(x, y) == self.identity).expect("group element has an inverse")
    }

    /// Invariant factors from counting, for each prime `p`, the elements
    /// killed by `p^k`.
    pub fn structure(&self) -> AbelianGroupStructure {
        let n = self.order() as u64;
        let mut prime_parts: Vec<Vec<u64>> = Vec::new();
        for (p, _) in arith::factorize(n).expect("group orders are small") {
            let mut parts_at_least = Vec::new();
            let mut prev = 1u64;
            let mut pk = p;
            loop {
                let killed = (0..self.order()).filter(|&x| self.pow(x, pk) == self.identity).count() as u64;
                if killed == prev {
                    break;
                }
                // number of cyclic p-parts of exponent ≥ k
                let mut ratio = killed / prev;
                let mut count = 0;
                while ratio > 1 {
                    ratio /= p;
                    count += 1;
                }
                parts_at_least.push(count);
                prev = killed;
                pk *= p;
            }
            // conjugate partition: part sizes p^e, largest first
            let largest = parts_at_least.first().copied().unwrap_or(0);
            let mut parts = Vec::new();
            for i in 0..largest {
                let e = parts_at_least.iter().filter(|&&c| c > i).count() as u32;
                parts.push(p.pow(e));
            }
            prime_parts.push(parts);
        }
        let len = prime_parts.iter().map(Vec::len).max().unwrap_or(0);
        let mut factors: Vec<u64> = (0..len)
            .map(|i| prime_parts.iter().map(|parts| parts.get(i).copied().unwrap_or(1)).product())
            .collect();
        factors.reverse();
        AbelianGroupStructure::new(factors).expect("census yields a divisibility chain")
    }

    /// Quotient by the cyclic subgroup generated by `g`.
    pub fn quotient(&self, g: usize) -> CayleyGroup {
        let mut sub = vec![self.identity];
        let mut x = g;
        while x != self.identity {
            sub.push(x);
            x = self.op(x, g);
        }
        let mut coset_of = vec![usize::MAX; self.order()];
        let mut reps = Vec::new();
        for x in 0..self.order() {
            if coset_of[x] == usize::MAX {
                for &s in &sub {
                    coset_of[self.op(x, s)] = reps.len();
                }
                reps.push(x);
            }
        }
        let table = reps
            .iter()
            .map(|&x| reps.iter().map(|&y| coset_of[self.op(x, y)]).collect())
            .collect();
        CayleyGroup { table, identity: coset_of[self.identity] }
    }

    pub fn is_square(&self, x: usize) -> bool {
        (0..self.order()).any(|y| self.op(y, y) == x)
    }
}

/// Narrow class group of a discriminant: cycles of reduced forms.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    disc: i64,
    cycles: Vec<Vec<BinaryQuadraticForm>>,
    class_of: HashMap<BinaryQuadraticForm, usize>,
    identity: usize,
    group: CayleyGroup,
}

/// All reduced forms of discriminant `disc`.
pub fn reduced_forms(disc: i64) -> Result<Vec<BinaryQuadraticForm>, FormError> {
    check_disc(disc)?;
    let s = disc.sqrt();
    let mut out = Vec::new();
    let mut b = if disc % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let n = (disc - b * b) / 4;
        let mut t = 1;
        while t * t <= n {
            if n % t == 0 {
                for a in [t, n / t] {
                    for (aa, cc) in [(a, -n / a), (-a, n / a)] {
                        let f = BinaryQuadraticForm::new(aa, b, cc);
                        if f.is_reduced() && !out.contains(&f) {
                            out.push(f);
                        }
                    }
                }
            }
            t += 1;
        }
        b += 2;
    }
    out.sort_unstable();
    Ok(out)
}

/// Cycles of reduced forms, each starting at its least form, sorted.
pub fn enumerate_classes(disc: i64) -> Result<Vec<Vec<BinaryQuadraticForm>>, FormError> {
    let forms = reduced_forms(disc)?;
    let mut seen = std::collections::HashSet::new();
    let mut cycles = Vec::new();
    for f in forms {
        if seen.contains(&f) {
            continue;
        }
        let cyc = f.cycle();
        seen.extend(cyc.iter().copied());
        let start = cyc.iter().enumerate().min_by_key(|(_, g)| **g).map(|(i, _)| i).unwrap_or(0);
        let mut rotated = cyc[start..].to_vec();
        rotated.extend_from_slice(&cyc[..start]);
        cycles.push(rotated);
    }
    cycles.sort_unstable_by_key(|c| c[0]);
    Ok(cycles)
}

impl ClassGroup {
    pub fn new(disc: i64) -> Result<Self, FormError> {
        let cycles = enumerate_classes(disc)?;
        let mut class_of = HashMap::new();
        for (i, cyc) in cycles.iter().enumerate() {
            for f in cyc {
                class_of.insert(*f, i);
            }
        }
        let principal = BinaryQuadraticForm::principal(disc).reduce()?;
        let identity = class_of[&principal];
        let positive: Vec<BinaryQuadraticForm> = cycles
            .iter()
            .map(|c| *c.iter().find(|f| f.a > 0).expect("cycles alternate in sign"))
            .collect();
        let mut table = vec![vec![0usize; cycles.len()]; cycles.len()];
        for i in 0..cycles.len() {
            for j in i..cycles.len() {
                let h = compose_forms(&positive[i], &positive[j])?;
                let k = *class_of.get(&h).ok_or_else(|| FormError::InternalInconsistency {
                    disc,
                    detail: format!("composite {h} is not among the reduced forms"),
                })?;
                table[i][j] = k;
                table[j][i] = k;
            }
        }
        let group = CayleyGroup { table, identity };
        Ok(ClassGroup { disc, cycles, class_of, identity, group })
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// Narrow class number `h⁺`.
    pub fn order(&self) -> usize {
        self.cycles.len()
    }

    pub fn cycles(&self) -> &[Vec<BinaryQuadraticForm>] {
        &self.cycles
    }

    /// Canonical representative of class `i`.
    pub fn representative(&self, i: usize) -> BinaryQuadraticForm {
        self.cycles[i][0]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn cayley(&self) -> &CayleyGroup {
        &self.group
    }

    pub fn class_of(&self, f: &BinaryQuadraticForm) -> Result<usize, FormError> {
        if f.disc() != self.disc {
            return Err(FormError::MixedDiscriminants(self.disc, f.disc()));
        }
        let r = f.reduce()?;
        self.class_of.get(&r).copied().ok_or_else(|| FormError::InternalInconsistency {
            disc: self.disc,
            detail: format!("{r} has no class"),
        })
    }

    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.group.op(i, j)
    }

    /// Class composition on forms.
    pub fn compose_classes(&self, f: &BinaryQuadraticForm, g: &BinaryQuadraticForm) -> Result<usize, FormError> {
        if f.disc() != g.disc() {
            return Err(FormError::MixedDiscriminants(f.disc(), g.disc()));
        }
        Ok(self.compose(self.class_of(f)?, self.class_of(g)?))
    }

    pub fn structure(&self) -> AbelianGroupStructure {
        self.group.structure()
    }
}

/// Form `N(x·α₁ + y·α₂)/n` attached to an ideal with oriented basis `α₁, α₂` and norm `n`.
pub fn ideal_form(alpha1: &QuadInt, alpha2: &QuadInt, norm: &BigInt) -> Option<BinaryQuadraticForm> {
    let (mut a1, mut a2) = (alpha1.clone(), alpha2.clone());
    // orientation: (α₁σ(α₂) − σ(α₁)α₂)/√D > 0
    let det = &(&a1 * &a2.conjugate()) - &(&a1.conjugate() * &a2);
    if det.y().sign() == num_bigint::Sign::Minus {
        std::mem::swap(&mut a1, &mut a2);
    }
    let exact = |v: BigInt| -> Option<i64> {
        let (q, r) = v.div_rem(norm);
        if r != BigInt::from(0) {
            return None;
        }
        q.to_i64()
    };
    let a = exact(a1.norm())?;
    let b = exact((&a1 * &a2.conjugate()).trace())?;
    let c = exact(a2.norm())?;
    Some(BinaryQuadraticForm::new(a, b, c))
}

/// Form attached to the principal ideal `(√d)`.
pub fn sqrt_d_form(field: &QuadraticField) -> BinaryQuadraticForm {
    let root = field.elem(0, 1);
    let a2 = &root * &field.omega();
    ideal_form(&root, &a2, &BigInt::from(field.d())).expect("(√d) has norm d")
}

/// Whether `−1` is a norm from the field, decided by `(d, −1)_p` at all `p | 2D`.
pub fn norm_minus_one_solvable(field: &QuadraticField) -> Result<bool, FormError> {
    let mut primes: Vec<u64> = arith::factorize(field.disc() as u64)?.into_iter().map(|(p, _)| p).collect();
    if !primes.contains(&2) {
        primes.push(2);
    }
    Ok(primes.into_iter().all(|p| {
        let place = Place::prime(p).expect("factor is prime");
        arith::hilbert_symbol_int(field.d() as i128, -1, place) == 1
    }))
}

/// Wide class group `C = C⁺ / ⟨[(√d)]⟩` together with the generator's class.
pub fn wide_class_group(field: &QuadraticField, narrow: &ClassGroup) -> Result<(AbelianGroupStructure, usize), FormError> {
    let g = narrow.class_of(&sqrt_d_form(field))?;
    Ok((narrow.cayley().quotient(g).structure(), g))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub rho: u32,
    pub rho_plus: u32,
    pub rho_inf: u32,
    pub four_rank_plus: u32,
    pub h: u64,
    pub h_plus: u64,
    pub splits: bool,
    pub omega_exists: bool,
    pub unit_norm: i8,
    pub narrow: AbelianGroupStructure,
    pub wide: AbelianGroupStructure,
    /// Number of distinct primes dividing `D`.
    pub prime_divisors: u32,
}

/// Splitting trichotomy for real quadratic fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trichotomy {
    /// A unit of norm −1: `C⁺ = C`.
    UnitNormMinusOne,
    /// No element of norm −1: `C⁺ ≅ C ⊕ Z/2`.
    NoNormMinusOne,
    /// An element of norm −1 but no such unit: `h⁺ = 2h`, equal 2-ranks.
    ElementWithoutUnit,
}

impl RankReport {
    pub fn trichotomy(&self) -> Trichotomy {
        if self.unit_norm == -1 {
            Trichotomy::UnitNormMinusOne
        } else if !self.omega_exists {
            Trichotomy::NoNormMinusOne
        } else {
            Trichotomy::ElementWithoutUnit
        }
    }

    /// Every relation the report must satisfy; the first failure is returned.
    pub fn verify(&self) -> Result<(), String> {
        let lower = (self.rho_inf + self.rho) as i64 - self.rho_plus as i64;
        if (self.four_rank_plus as i64) < lower {
            return Err(format!("4-rank {} below ρ_∞ + ρ − ρ⁺ = {lower}", self.four_rank_plus));
        }
        // floor(r1 / 2) = 1
        if self.rho_plus as i64 - self.rho as i64 > 1 || self.rho_plus < self.rho {
            return Err(format!("ρ⁺ − ρ = {} − {} outside [0, 1]", self.rho_plus, self.rho));
        }
        if self.h_plus != self.h << self.rho_inf {
            return Err(format!("h⁺ = {} ≠ h·2^ρ_∞ = {}·{}", self.h_plus, self.h, 1 << self.rho_inf));
        }
        if self.rho_inf != u32::from(self.unit_norm == 1) {
            return Err("ρ_∞ disagrees with the unit norm".into());
        }
        if self.unit_norm == -1 && !self.omega_exists {
            return Err("unit of norm −1 but −1 is not a norm".into());
        }
        // vacuous for degree 2: ρ_∞ − ⌊n/2⌋ ≤ 0
        if (self.four_rank_plus as i64) < self.rho_inf as i64 - 1 {
            return Err("4-rank below ρ_∞ − ⌊n/2⌋".into());
        }
        match self.trichotomy() {
            Trichotomy::UnitNormMinusOne => {
                if self.narrow != self.wide || self.h_plus != self.h {
                    return Err("unit of norm −1 but C⁺ ≇ C".into());
                }
            }
            Trichotomy::NoNormMinusOne => {
                if self.rho_plus != self.rho + 1 || !self.splits {
                    return Err("no element of norm −1 but ρ⁺ ≠ ρ + 1 or no splitting".into());
                }
            }
            Trichotomy::ElementWithoutUnit => {
                if self.h_plus != 2 * self.h || self.rho_plus != self.rho {
                    return Err("element of norm −1 without unit but h⁺ ≠ 2h or ρ⁺ ≠ ρ".into());
                }
            }
        }
        if self.prime_divisors == 0 || self.rho_plus != self.prime_divisors - 1 {
            return Err(format!("ρ⁺ = {} but D has {} prime divisors", self.rho_plus, self.prime_divisors));
        }
        Ok(())
    }
}

pub fn rank_report(k: &RealQuadratic) -> Result<RankReport, FormError> {
    let disc = k.disc();
    let narrow = ClassGroup::new(disc)?;
    let (wide, g) = wide_class_group(&k.field, &narrow)?;
    let fail = |detail: String| FormError::InternalInconsistency { disc, detail };

    let unit_norm = k.unit.norm;
    let g_trivial = g == narrow.identity();
    if g_trivial != (unit_norm == -1) {
        return Err(fail(format!("class of (√d) trivial = {g_trivial} but N(ε) = {unit_norm}")));
    }
    let rho_plus = narrow.structure().rank2();
    let rho = wide.rank2();
    let rho_inf = u32::from(unit_norm == 1);
    let splits = rho_plus == rho_inf + rho;
    // independent route: Z/2 → C⁺ splits off iff its generator is not a square
    let splits_direct = g_trivial || !narrow.cayley().is_square(g);
    if splits != splits_direct {
        return Err(fail(format!("rank criterion says splits = {splits}, Cayley table says {splits_direct}")));
    }
    let omega_exists = norm_minus_one_solvable(&k.field)?;
    let odd_ok = arith::factorize(k.d() as u64)?
        .into_iter()
        .all(|(p, _)| p == 2 || p % 4 == 1);
    if omega_exists != odd_ok {
        return Err(fail("Hilbert symbols and odd prime divisors disagree on −1 being a norm".into()));
    }
    let narrow_structure = narrow.structure();
    let report = RankReport {
        rho,
        rho_plus,
        rho_inf,
        four_rank_plus: narrow_structure.four_rank(),
        h: wide.order(),
        h_plus: narrow.order() as u64,
        splits,
        omega_exists,
        unit_norm,
        narrow: narrow_structure,
        wide,
        prime_divisors: arith::omega(disc as u64)? as u32,
    };
    report.verify().map_err(fail)?;
    Ok(report)
}
