//! Real quadratic fields `Q(√d)`, elements of the maximal order in the
//! half-coordinate form `(x + y√d)/2`, and fundamental units from the
//! continued fraction of the order's generator.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, ArithError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("d must be squarefree (got {0})")]
    NotSquarefree(i64),
    #[error("d must be greater than 1 (got {0})")]
    OutOfRange(i64),
    #[error("elements belong to different fields (d = {0} and d = {1})")]
    MixedFields(i64, i64),
    #[error("({x} + {y}√{d})/2 is not integral")]
    NotIntegral { d: i64, x: BigInt, y: BigInt },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoSplitting {
    Split,
    Inert,
    Ramified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadraticField {
    d: i64,
    disc: i64,
    two_splitting: TwoSplitting,
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<Self, FieldError> {
        if d <= 1 {
            return Err(FieldError::OutOfRange(d));
        }
        if !arith::is_squarefree(d)? {
            return Err(FieldError::NotSquarefree(d));
        }
        let disc = if d % 4 == 1 { d } else { 4 * d };
        let two_splitting = match d % 8 {
            1 => TwoSplitting::Split,
            5 => TwoSplitting::Inert,
            _ => TwoSplitting::Ramified,
        };
        Ok(QuadraticField { d, disc, two_splitting })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Field discriminant `D`.
    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn two_splitting(&self) -> TwoSplitting {
        self.two_splitting
    }

    /// Number of primes above 2.
    pub fn g(&self) -> u32 {
        if self.two_splitting == TwoSplitting::Split {
            2
        } else {
            1
        }
    }

    pub const fn r1(&self) -> u32 {
        2
    }

    pub const fn r2(&self) -> u32 {
        0
    }

    pub const fn degree(&self) -> u32 {
        2
    }

    pub fn int(&self, n: impl Into<BigInt>) -> QuadInt {
        let n: BigInt = n.into();
        QuadInt { d: self.d, x: n * 2, y: BigInt::zero() }
    }

    pub fn one(&self) -> QuadInt {
        self.int(1)
    }

    /// `a + b√d` with integer `a`, `b`.
    pub fn elem(&self, a: impl Into<BigInt>, b: impl Into<BigInt>) -> QuadInt {
        QuadInt { d: self.d, x: a.into() * 2, y: b.into() * 2 }
    }

    /// `(x + y√d)/2`, checked for integrality.
    pub fn half(&self, x: impl Into<BigInt>, y: impl Into<BigInt>) -> Result<QuadInt, FieldError> {
        QuadInt::new(self.d, x.into(), y.into())
    }

    /// The generator `ω` of the maximal order: `(1 + √d)/2` or `√d`.
    pub fn omega(&self) -> QuadInt {
        if self.d % 4 == 1 {
            QuadInt { d: self.d, x: BigInt::one(), y: BigInt::one() }
        } else {
            self.elem(0, 1)
        }
    }

    /// Element `u + v·ω`.
    pub fn from_basis(&self, u: impl Into<BigInt>, v: impl Into<BigInt>) -> QuadInt {
        let (u, v) = (u.into(), v.into());
        if self.d % 4 == 1 {
            QuadInt { d: self.d, x: u * 2 + &v, y: v }
        } else {
            QuadInt { d: self.d, x: u * 2, y: v * 2 }
        }
    }

    /// Representatives `0, 1, ω, 1 + ω` of `O_K / 2 O_K`.
    pub fn residues_mod_2(&self) -> [QuadInt; 4] {
        [
            self.from_basis(0, 0),
            self.from_basis(1, 0),
            self.from_basis(0, 1),
            self.from_basis(1, 1),
        ]
    }
}

impl fmt::Display for QuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(√{})", self.d)
    }
}

/// `(x + y√d)/2` in the maximal order of `Q(√d)`. Integrality means
/// `x ≡ y (mod 2)` when `d ≡ 1 (mod 4)` and `x`, `y` both even otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    d: i64,
    x: BigInt,
    y: BigInt,
}

/// Sign of `a + b√d` for integers `a`, `b` and nonsquare `d > 0`.
pub fn sign_of(a: &BigInt, b: &BigInt, d: i64) -> Ordering {
    let zero = BigInt::zero();
    match (a.cmp(&zero), b.cmp(&zero)) {
        (Ordering::Equal, sb) => sb,
        (sa, Ordering::Equal) => sa,
        (sa, sb) if sa == sb => sa,
        (sa, _) => {
            // opposite signs: compare a^2 with d·b^2
            let lhs = a * a;
            let rhs = b * b * d;
            match lhs.cmp(&rhs) {
                Ordering::Greater => sa,
                Ordering::Less => sa.reverse(),
                Ordering::Equal => unreachable!("d is not a square"),
            }
        }
    }
}

impl QuadInt {
    pub fn new(d: i64, x: BigInt, y: BigInt) -> Result<Self, FieldError> {
        let integral = if d % 4 == 1 { (&x - &y).is_even() } else { x.is_even() && y.is_even() };
        if !integral {
            return Err(FieldError::NotIntegral { d, x, y });
        }
        Ok(QuadInt { d, x, y })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Half-coordinate `x` of `(x + y√d)/2`.
    pub fn x(&self) -> &BigInt {
        &self.x
    }

    /// Half-coordinate `y` of `(x + y√d)/2`.
    pub fn y(&self) -> &BigInt {
        &self.y
    }

    fn check(&self, other: &QuadInt) -> Result<(), FieldError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(FieldError::MixedFields(self.d, other.d))
        }
    }

    pub fn try_add(&self, other: &QuadInt) -> Result<QuadInt, FieldError> {
        self.check(other)?;
        Ok(QuadInt { d: self.d, x: &self.x + &other.x, y: &self.y + &other.y })
    }

    pub fn try_sub(&self, other: &QuadInt) -> Result<QuadInt, FieldError> {
        self.check(other)?;
        Ok(QuadInt { d: self.d, x: &self.x - &other.x, y: &self.y - &other.y })
    }

    pub fn try_mul(&self, other: &QuadInt) -> Result<QuadInt, FieldError> {
        self.check(other)?;
        let x = &self.x * &other.x + &self.y * &other.y * self.d;
        let y = &self.x * &other.y + &other.x * &self.y;
        // both halves are even for integral inputs
        Ok(QuadInt { d: self.d, x: x / 2, y: y / 2 })
    }

    pub fn conjugate(&self) -> QuadInt {
        QuadInt { d: self.d, x: self.x.clone(), y: -&self.y }
    }

    pub fn norm(&self) -> BigInt {
        (&self.x * &self.x - &self.y * &self.y * self.d) / 4
    }

    pub fn trace(&self) -> BigInt {
        self.x.clone()
    }

    pub fn scale(&self, k: &BigInt) -> QuadInt {
        QuadInt { d: self.d, x: &self.x * k, y: &self.y * k }
    }

    pub fn pow(&self, mut e: u32) -> QuadInt {
        let mut base = self.clone();
        let mut acc = QuadInt { d: self.d, x: BigInt::from(2), y: BigInt::zero() };
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x == BigInt::from(2) && self.y.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().abs().is_one()
    }

    /// `self / k` when the quotient lies in the maximal order.
    pub fn div_exact(&self, k: &BigInt) -> Option<QuadInt> {
        if k.is_zero() {
            return None;
        }
        let (qx, rx) = self.x.div_rem(k);
        let (qy, ry) = self.y.div_rem(k);
        if !rx.is_zero() || !ry.is_zero() {
            return None;
        }
        QuadInt::new(self.d, qx, qy).ok()
    }

    /// Coordinates `(u, v)` with `self = u + v·ω`.
    pub fn to_basis(&self) -> (BigInt, BigInt) {
        if self.d % 4 == 1 {
            ((&self.x - &self.y) / 2, self.y.clone())
        } else {
            (&self.x / 2, &self.y / 2)
        }
    }

    /// Canonical representative modulo `n·O_K` (basis coordinates reduced to `[0, n)`).
    pub fn reduce_mod(&self, n: &BigInt) -> QuadInt {
        let (u, v) = self.to_basis();
        let field_d = self.d;
        let (u, v) = (u.mod_floor(n), v.mod_floor(n));
        if field_d % 4 == 1 {
            QuadInt { d: field_d, x: &u * 2 + &v, y: v }
        } else {
            QuadInt { d: field_d, x: u * 2, y: v * 2 }
        }
    }

    /// Sign in the embedding with `√d > 0`.
    pub fn sign(&self) -> Ordering {
        sign_of(&self.x, &self.y, self.d)
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sign() == Ordering::Greater && self.conjugate().sign() == Ordering::Greater
    }

    /// Exact comparison with an integer in the embedding with `√d > 0`.
    pub fn cmp_int(&self, n: i64) -> Ordering {
        sign_of(&(&self.x - BigInt::from(2 * n)), &self.y, self.d)
    }

    /// Square root inside the maximal order, if one exists.
    pub fn sqrt(&self) -> Option<QuadInt> {
        // γ = (u + v√d)/2, γ^2 = ((u^2 + d v^2)/2 + u v √d)/2, N(γ) = ±√N(self)
        let t = arith::is_perfect_square(&self.norm())?;
        for n in [t.clone(), -t] {
            let u2 = &self.x + &n * 2;
            let Some(u) = arith::is_perfect_square(&u2) else { continue };
            let v = if u.is_zero() {
                let v2 = Integer::div_rem(&(&self.x * 2), &BigInt::from(self.d));
                if !v2.1.is_zero() {
                    continue;
                }
                match arith::is_perfect_square(&v2.0) {
                    Some(v) => v,
                    None => continue,
                }
            } else {
                let (v, r) = self.y.div_rem(&u);
                if !r.is_zero() {
                    continue;
                }
                v
            };
            if let Ok(g) = QuadInt::new(self.d, u, v) {
                if &g * &g == *self {
                    return Some(g);
                }
            }
        }
        None
    }

    pub fn to_number(&self) -> QuadNumber {
        QuadNumber {
            d: self.d,
            a: BigRational::new(self.x.clone(), BigInt::from(2)),
            b: BigRational::new(self.y.clone(), BigInt::from(2)),
        }
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_number().fmt(f)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&QuadInt> for &QuadInt {
            type Output = QuadInt;
            fn $method(self, rhs: &QuadInt) -> QuadInt {
                self.$checked(rhs).expect("operands from the same field")
            }
        }
        impl $tr<QuadInt> for QuadInt {
            type Output = QuadInt;
            fn $method(self, rhs: QuadInt) -> QuadInt {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt { d: self.d, x: -&self.x, y: -&self.y }
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        -&self
    }
}

/// `a + b√d` with rational coordinates; used for witnesses that leave the order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadNumber {
    pub d: i64,
    pub a: BigRational,
    pub b: BigRational,
}

impl QuadNumber {
    pub fn new(d: i64, a: BigRational, b: BigRational) -> Self {
        QuadNumber { d, a, b }
    }

    pub fn square(&self) -> QuadNumber {
        let d = BigRational::from_integer(BigInt::from(self.d));
        QuadNumber {
            d: self.d,
            a: &self.a * &self.a + &self.b * &self.b * d,
            b: &self.a * &self.b * BigRational::from_integer(BigInt::from(2)),
        }
    }

    pub fn add(&self, other: &QuadNumber) -> QuadNumber {
        assert_eq!(self.d, other.d, "operands from the same field");
        QuadNumber { d: self.d, a: &self.a + &other.a, b: &self.b + &other.b }
    }

    pub fn neg(&self) -> QuadNumber {
        QuadNumber { d: self.d, a: -&self.a, b: -&self.b }
    }

    /// Sign in the embedding with `√d > 0`.
    pub fn sign(&self) -> Ordering {
        let l = self.a.denom().lcm(self.b.denom());
        let a = (&self.a * BigRational::from_integer(l.clone())).to_integer();
        let b = (&self.b * BigRational::from_integer(l)).to_integer();
        sign_of(&a, &b, self.d)
    }

    pub fn to_quad_int(&self) -> Option<QuadInt> {
        let two = BigRational::from_integer(BigInt::from(2));
        let x = &self.a * &two;
        let y = &self.b * &two;
        if !x.is_integer() || !y.is_integer() {
            return None;
        }
        QuadInt::new(self.d, x.to_integer(), y.to_integer()).ok()
    }
}

impl fmt::Display for QuadNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let b_abs = self.b.abs();
        let coef = if b_abs.is_one() { String::new() } else { format!("{b_abs}·") };
        if self.a.is_zero() {
            let sign = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{sign}{coef}√{}", self.d)
        } else {
            let op = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {op} {coef}√{}", self.a, self.d)
        }
    }
}

/// Fundamental unit together with its norm and `ρ_∞` for `Q(√d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitRecord {
    pub epsilon: QuadInt,
    pub norm: i8,
    pub rho_infinity: u8,
    /// Length of the continued-fraction period used to find `epsilon`.
    pub period: usize,
}

/// Fundamental unit `ε > 1` of the maximal order.
///
/// Expands `ω` (`(1+√d)/2` or `√d`) as a continued fraction, tracking complete
/// quotients `(P + √d)/Q`. From the first step on the expansion is purely
/// periodic; with `l` the period length and `p/q` the convergent before it
/// closes, `ε = p − q·σ(ω)` and `N(ε) = (−1)^l`.
pub fn fundamental_unit(field: &QuadraticField) -> UnitRecord {
    let d = field.d;
    let s = d.sqrt();
    let (mut p_state, mut q_state) = if d % 4 == 1 { (1i64, 2i64) } else { (0, 1) };

    // convergents p_{k-1}/q_{k-1} and p_{k-2}/q_{k-2}
    let (mut p_prev, mut p_cur) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());

    let mut first_state = None;
    let mut period = 0usize;
    loop {
        let a = Integer::div_floor(&(p_state + s), &q_state);
        let p_next = &p_cur * a + &p_prev;
        let q_next = &q_cur * a + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);

        let new_p = a * q_state - p_state;
        let new_q = (d - new_p * new_p) / q_state;
        p_state = new_p;
        q_state = new_q;
        match first_state {
            None => first_state = Some((p_state, q_state)),
            Some(st) => {
                period += 1;
                if st == (p_state, q_state) {
                    break;
                }
            }
        }
    }
    // p_prev/q_prev is the convergent just before the period closes
    let conj_omega = field.omega().conjugate();
    let epsilon = &field.int(p_prev) - &conj_omega.scale(&q_prev);
    let norm = if period % 2 == 0 { 1 } else { -1 };
    debug_assert_eq!(epsilon.norm(), BigInt::from(norm));
    UnitRecord { epsilon, norm, rho_infinity: u8::from(norm == 1), period }
}

/// 2-ranks along `E² ⊆ E⁺ ⊆ E` for a real quadratic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UnitChainRanks {
    /// rank `E/E²` (always `r₁ + r₂ = 2`)
    pub units_mod_squares: u32,
    /// rank `E/E⁺`
    pub units_mod_totally_positive: u32,
    /// rank `E⁺/E²`
    pub totally_positive_mod_squares: u32,
}

pub fn unit_chain_ranks(field: &QuadraticField, unit: &UnitRecord) -> UnitChainRanks {
    // signature vectors over F_2 of the generators -1 and ε
    let neg = |o: Ordering| u8::from(o == Ordering::Less);
    let sig_eps = [neg(unit.epsilon.sign()), neg(unit.epsilon.conjugate().sign())];
    let sig_minus_one = [1u8, 1u8];
    let independent = sig_eps != [0, 0] && sig_eps != sig_minus_one;
    let sig_rank = if independent { 2 } else { 1 };
    let total = field.r1() + field.r2();
    UnitChainRanks {
        units_mod_squares: total,
        units_mod_totally_positive: sig_rank,
        totally_positive_mod_squares: total - sig_rank,
    }
}

/// A real quadratic field bundled with its fundamental unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealQuadratic {
    pub field: QuadraticField,
    pub unit: UnitRecord,
}

impl RealQuadratic {
    pub fn new(d: i64) -> Result<Self, FieldError> {
        let field = QuadraticField::new(d)?;
        let unit = fundamental_unit(&field);
        Ok(RealQuadratic { field, unit })
    }

    pub fn d(&self) -> i64 {
        self.field.d()
    }

    pub fn disc(&self) -> i64 {
        self.field.disc()
    }

    pub fn epsilon(&self) -> &QuadInt {
        &self.unit.epsilon
    }

    pub fn chain_ranks(&self) -> UnitChainRanks {
        unit_chain_ranks(&self.field, &self.unit)
    }
}
