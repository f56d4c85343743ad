//! Square classes of the fundamental unit: the square-mod-4 residue test,
//! the invariant `m`, the Hilbert-90 element, the two-squares decision via
//! 2-adic Hilbert symbols, the congruence classification of where `ε`
//! sits in `E² ⊆ E(4)∩E⁺ ⊆ E_sq ⊆ E⁺`, and the relative integral basis of
//! `K(√ε)` for units that are squares mod 4.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{self, ArithError, Place};
use crate::json::ser_bigint;
use crate::quadfield::{FieldError, QuadInt, QuadNumber, QuadraticField, RealQuadratic, TwoSplitting};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitTypeError {
    #[error("element is not a unit")]
    NotAUnit,
    #[error("unit is not totally positive")]
    NotTotallyPositive,
    #[error("fundamental unit has norm -1")]
    NormMinusOne,
    #[error("unit is not a square mod 4")]
    NotSquareMod4,
    #[error("unit is not a sum of two squares")]
    DecisionFalse,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("internal inconsistency for d = {d}: {detail}")]
    InternalInconsistency { d: i64, detail: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

fn inconsistency(d: i64, detail: impl Into<String>) -> UnitTypeError {
    UnitTypeError::InternalInconsistency { d, detail: detail.into() }
}

fn ser_quad<S: Serializer>(q: &QuadInt, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Half<'a> {
        #[serde(serialize_with = "ser_bigint")]
        x: &'a BigInt,
        #[serde(serialize_with = "ser_bigint")]
        y: &'a BigInt,
    }
    Half { x: q.x(), y: q.y() }.serialize(s)
}

fn ser_number<S: Serializer>(q: &QuadNumber, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn ser_rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// `e = alpha^2 + 4·beta` with `alpha`, `beta` in the maximal order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareMod4Witness {
    #[serde(serialize_with = "ser_quad")]
    pub alpha: QuadInt,
    #[serde(serialize_with = "ser_quad")]
    pub beta: QuadInt,
}

/// `ε = σ(alpha)/alpha` with `alpha = a + b√d` and `N(alpha) = m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hilbert90Witness {
    #[serde(serialize_with = "ser_quad")]
    pub alpha: QuadInt,
    #[serde(serialize_with = "ser_rational")]
    pub a: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub b: BigRational,
    pub m: i64,
}

/// `e = x^2 + y^2` with `x`, `y` in the field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoSquaresWitness {
    #[serde(serialize_with = "ser_number")]
    pub x: QuadNumber,
    #[serde(serialize_with = "ser_number")]
    pub y: QuadNumber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "norm_minus_one")]
    NormMinusOne,
    #[serde(rename = "a_i")]
    AI,
    #[serde(rename = "a_ii")]
    AII,
    #[serde(rename = "a_iii")]
    AIII,
    #[serde(rename = "a_iv")]
    AIV,
    #[serde(rename = "a_v")]
    AV,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 8] = [
        CaseLabel::NormMinusOne,
        CaseLabel::AI,
        CaseLabel::AII,
        CaseLabel::AIII,
        CaseLabel::AIV,
        CaseLabel::AV,
        CaseLabel::B,
        CaseLabel::C,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::NormMinusOne => "norm_minus_one",
            CaseLabel::AI => "a_i",
            CaseLabel::AII => "a_ii",
            CaseLabel::AIII => "a_iii",
            CaseLabel::AIV => "a_iv",
            CaseLabel::AV => "a_v",
            CaseLabel::B => "b",
            CaseLabel::C => "c",
        }
    }

    pub fn parse(s: &str) -> Option<CaseLabel> {
        CaseLabel::ALL.into_iter().find(|c| c.as_str() == s)
    }

    /// Square mod 4 (one of the `a_*` cases).
    pub fn is_a(self) -> bool {
        matches!(self, CaseLabel::AI | CaseLabel::AII | CaseLabel::AIII | CaseLabel::AIV | CaseLabel::AV)
    }

    /// Congruence table for a norm `+1` fundamental unit.
    pub fn from_congruences(d: i64, m: i64) -> CaseLabel {
        let (d4, d8, m4, m8) = (d.rem_euclid(4), d.rem_euclid(8), m.rem_euclid(4), m.rem_euclid(8));
        if d4 == 1 && m4 == 1 {
            CaseLabel::AI
        } else if d4 == 3 && m % 2 != 0 {
            CaseLabel::AII
        } else if d4 == 2 && m4 == 1 {
            CaseLabel::AIII
        } else if d8 == 2 && m8 == 2 {
            CaseLabel::AIV
        } else if d8 == 6 && m8 == 6 {
            CaseLabel::AV
        } else if d8 == 1 && m4 == 3 {
            CaseLabel::B
        } else {
            CaseLabel::C
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn require_unit(e: &QuadInt) -> Result<(), UnitTypeError> {
    if e.is_unit() {
        Ok(())
    } else {
        Err(UnitTypeError::NotAUnit)
    }
}

/// Residue test: is `e ≡ α² (mod 4 O_K)` for one of the four classes of `O_K / 2 O_K`?
pub fn is_square_mod4(field: &QuadraticField, e: &QuadInt) -> Result<Option<SquareMod4Witness>, UnitTypeError> {
    require_unit(e)?;
    let four = BigInt::from(4);
    // (α + 2γ)² ≡ α² mod 4, so one representative per class of O_K/2 suffices
    for alpha in field.residues_mod_2() {
        let diff = e.try_sub(&(&alpha * &alpha))?;
        if let Some(beta) = diff.div_exact(&four) {
            return Ok(Some(SquareMod4Witness { alpha, beta }));
        }
    }
    Ok(None)
}

fn require_norm_plus(k: &RealQuadratic) -> Result<(), UnitTypeError> {
    if k.unit.norm == 1 {
        Ok(())
    } else {
        Err(UnitTypeError::NormMinusOne)
    }
}

/// Squarefree part `m` of `N(ε + 1)`, located among the squarefree divisors of `D`.
///
/// Checks `m > 1`, `m | D` and that `m·ε` has a square root in `O_K`.
pub fn compute_m(k: &RealQuadratic) -> Result<i64, UnitTypeError> {
    require_norm_plus(k)?;
    let d = k.d();
    let eps = k.epsilon();
    let n_plus = (eps + &k.field.one()).norm();
    let mut found = None;
    for m in arith::squarefree_divisors(k.disc() as u64)? {
        if arith::square_cofactor(&n_plus, &BigInt::from(m)).is_some() {
            found = Some(m as i64);
            break;
        }
    }
    let Some(m) = found else {
        return Err(inconsistency(d, format!("no squarefree divisor of D makes N(ε+1) = {n_plus} a square")));
    };
    if m <= 1 {
        return Err(inconsistency(d, "N(ε+1) is a perfect square"));
    }
    if k.disc() % m != 0 {
        return Err(inconsistency(d, format!("m = {m} does not divide D")));
    }
    if eps.scale(&BigInt::from(m)).sqrt().is_none() {
        return Err(inconsistency(d, format!("m·ε is not a square for m = {m}")));
    }
    Ok(m)
}

/// Squarefree part of `D/m`; checked against the squarefree part of `−N(ε − 1)`.
pub fn complement_m(k: &RealQuadratic) -> Result<i64, UnitTypeError> {
    let m = compute_m(k)?;
    let comp = arith::squarefree_part(k.disc() / m)?.m;
    let n_minus = -(k.epsilon() - &k.field.one()).norm();
    if !n_minus.is_positive() || arith::square_cofactor(&n_minus, &BigInt::from(comp)).is_none() {
        return Err(inconsistency(
            k.d(),
            format!("squarefree part of D/m = {comp} differs from that of -N(ε-1) = {n_minus}"),
        ));
    }
    Ok(comp)
}

/// `α = A + B√d` with `A = ½√(m·N(ε+1))`, `B = −½√(−m·N(ε−1)/d)`.
pub fn hilbert90_alpha(k: &RealQuadratic) -> Result<Hilbert90Witness, UnitTypeError> {
    let m = compute_m(k)?;
    let d = k.d();
    let eps = k.epsilon();
    let one = k.field.one();
    let mb = BigInt::from(m);
    let two_a = arith::is_perfect_square(&(&mb * (eps + &one).norm()))
        .ok_or_else(|| inconsistency(d, "m·N(ε+1) is not a square"))?;
    let minus = -(&mb * (eps - &one).norm());
    let two_b = arith::square_cofactor(&minus, &BigInt::from(d))
        .map(|r| -r)
        .ok_or_else(|| inconsistency(d, "-m·N(ε-1)/d is not a square"))?;
    let alpha = k
        .field
        .half(two_a.clone(), two_b.clone())
        .map_err(|_| inconsistency(d, "Hilbert-90 element is not integral"))?;
    // σ(α) = ε·α avoids dividing
    if alpha.conjugate() != eps * &alpha {
        return Err(inconsistency(d, format!("σ(α)/α ≠ ε for α = {alpha}")));
    }
    if alpha.norm() != mb {
        return Err(inconsistency(d, format!("N(α) = {} ≠ m = {m}", alpha.norm())));
    }
    let two = BigInt::from(2);
    Ok(Hilbert90Witness {
        alpha,
        a: BigRational::new(two_a, two.clone()),
        b: BigRational::new(two_b, two),
        m,
    })
}

/// Precision of the 2-adic embedding used when 2 splits.
pub const TWO_ADIC_PRECISION: u32 = 6;

/// Hilbert symbols `(e, −1)_v` at the places `v | 2` of the field.
///
/// When 2 splits, `e` is embedded into `Q_2` via both square roots of `d`
/// modulo `2^6`. Otherwise there is one place over 2 and the symbol equals
/// `(N(e), −1)_2` over `Q_2`.
pub fn two_adic_symbols(field: &QuadraticField, e: &QuadInt) -> Result<Vec<i8>, UnitTypeError> {
    let two = Place::prime(2).expect("2 is prime");
    match field.two_splitting() {
        TwoSplitting::Split => {
            let modulus: i128 = 1 << TWO_ADIC_PRECISION;
            let root = arith::sqrt_mod_2k(field.d(), TWO_ADIC_PRECISION)? as i128;
            let small = |v: &BigInt| (v % (modulus * 2)).to_i128().expect("reduced");
            let (x, y) = (small(e.x()), small(e.y()));
            let mut out = Vec::with_capacity(2);
            for r in [root, modulus - root] {
                let twice = (x + y * r).rem_euclid(modulus * 2);
                debug_assert_eq!(twice % 2, 0);
                // the image is determined modulo 2^(k-2); only its class mod 8 is used
                let image = (twice / 2).rem_euclid(modulus / 4);
                if image % 2 == 0 {
                    return Err(UnitTypeError::NotAUnit);
                }
                out.push(arith::hilbert_symbol_int(image, -1, two));
            }
            Ok(out)
        }
        TwoSplitting::Inert | TwoSplitting::Ramified => {
            let n = e.norm().to_i128().ok_or(UnitTypeError::NotAUnit)?;
            Ok(vec![arith::hilbert_symbol_int(n, -1, two)])
        }
    }
}

/// Decides whether a totally positive unit is a sum of two squares in the field.
pub fn is_sum_two_squares(field: &QuadraticField, e: &QuadInt) -> Result<bool, UnitTypeError> {
    require_unit(e)?;
    if !e.is_totally_positive() {
        return Err(UnitTypeError::NotTotallyPositive);
    }
    Ok(two_adic_symbols(field, e)?.iter().all(|&s| s == 1))
}

/// Largest `t²·x/2` the witness search will enumerate.
pub const WITNESS_SEARCH_LIMIT: u64 = 4_000_000;

/// Searches for `e = x² + y²` with `x = (a₁ + b₁√d)/t`, `y = (a₂ + b₂√d)/t`,
/// `t ≤ bound`. Denominator-major, then `(b₁, b₂)` ascending with `b₁, b₂ ≥ 0`;
/// both components are returned positive. `None` is not a negative answer.
pub fn two_squares_witness(
    field: &QuadraticField,
    e: &QuadInt,
    bound: u64,
) -> Result<Option<TwoSquaresWitness>, UnitTypeError> {
    if !is_sum_two_squares(field, e)? {
        return Err(UnitTypeError::DecisionFalse);
    }
    let d = field.d();
    for t in 1..=bound {
        let t2 = BigInt::from(t * t);
        let sx = &t2 * e.x();
        let sy = &t2 * e.y();
        if !(&sx % 2u32).is_zero() || !(&sy % 4u32).is_zero() {
            continue;
        }
        let total: BigInt = sx / 2;
        let cross: BigInt = sy / 4;
        if total > BigInt::from(WITNESS_SEARCH_LIMIT) {
            break;
        }
        let total = total.to_i64().expect("bounded");
        let cross = cross.to_i64().expect("bounded");
        if let Some((a1, b1, a2, b2)) = search_denominator(d, total, cross) {
            let make = |a: i64, b: i64| {
                let q = QuadNumber::new(
                    d,
                    BigRational::new(a.into(), t.into()),
                    BigRational::new(b.into(), t.into()),
                );
                if q.sign() == Ordering::Less {
                    q.neg()
                } else {
                    q
                }
            };
            let (x, y) = (make(a1, b1), make(a2, b2));
            let sum = x.square().add(&y.square());
            if sum != e.to_number() {
                return Err(inconsistency(d, "two-squares witness does not reproduce the unit"));
            }
            return Ok(Some(TwoSquaresWitness { x, y }));
        }
    }
    Ok(None)
}

// a1² + a2² + d(b1² + b2²) = total, a1·b1 + a2·b2 = cross
fn search_denominator(d: i64, total: i64, cross: i64) -> Option<(i64, i64, i64, i64)> {
    let isqrt = |n: i64| -> Option<i64> {
        if n < 0 {
            return None;
        }
        let r = num_integer::Roots::sqrt(&n);
        (r * r == n).then_some(r)
    };
    let mut b1 = 0i64;
    while d * b1 * b1 <= total {
        let mut b2 = 0i64;
        while d * (b1 * b1 + b2 * b2) <= total {
            let rest = total - d * (b1 * b1 + b2 * b2);
            if b1 == 0 && b2 == 0 {
                if cross == 0 {
                    let mut a1 = 0;
                    while a1 * a1 <= rest {
                        if let Some(a2) = isqrt(rest - a1 * a1) {
                            return Some((a1, 0, a2, 0));
                        }
                        a1 += 1;
                    }
                }
            } else {
                // a = (cross/n)·b ± λ·(b2, −b1), λ = √(rest·n − cross²)/n
                let n = b1 * b1 + b2 * b2;
                let disc = rest as i128 * n as i128 - cross as i128 * cross as i128;
                if disc >= 0 {
                    if let Some(r) = isqrt(disc as i64) {
                        for sgn in [1i64, -1] {
                            let num1 = cross * b1 + sgn * b2 * r;
                            let num2 = cross * b2 - sgn * b1 * r;
                            if num1 % n == 0 && num2 % n == 0 {
                                return Some((num1 / n, b1, num2 / n, b2));
                            }
                        }
                    }
                }
            }
            b2 += 1;
        }
        b1 += 1;
    }
    None
}

/// Whether `e^j ≡ 1 (mod 4 O_K)` for some odd `j`, i.e. `e = u²(1 + 4β)` with
/// `u` a unit and `β` integral.
pub fn global_mult_square_mod4(field: &QuadraticField, e: &QuadInt) -> Result<bool, UnitTypeError> {
    if is_square_mod4(field, e)?.is_none() {
        return Err(UnitTypeError::PreconditionViolated("unit is not a square mod 4".into()));
    }
    let four = BigInt::from(4);
    let base = e.reduce_mod(&four);
    let one = field.one();
    let mut acc = base.clone();
    // (O_K/4)^* has order at most 12
    for j in 1..=16u32 {
        if acc == one {
            return Ok(j % 2 == 1);
        }
        acc = (&acc * &base).reduce_mod(&four);
    }
    Err(inconsistency(field.d(), "unit has no finite order modulo 4"))
}

/// `O_L = O_K + O_K·θ` for `L = K(√e)`, `θ = (α + √e)/2` a root of `x² − αx − β`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelativeIntegralBasis {
    #[serde(serialize_with = "ser_quad")]
    pub alpha: QuadInt,
    #[serde(serialize_with = "ser_quad")]
    pub beta: QuadInt,
    /// `e` is already a square in `K`, so `L = K`.
    pub trivial: bool,
}

impl RelativeIntegralBasis {
    /// Coefficients `[c₀, c₁]` of `x² + c₁x + c₀`.
    pub fn minimal_polynomial(&self) -> [QuadInt; 2] {
        [-&self.beta, -&self.alpha]
    }

    pub fn discriminant(&self) -> QuadInt {
        let [c0, c1] = self.minimal_polynomial();
        &(&c1 * &c1) - &c0.scale(&BigInt::from(4))
    }
}

pub fn relative_integral_basis(field: &QuadraticField, e: &QuadInt) -> Result<RelativeIntegralBasis, UnitTypeError> {
    let w = is_square_mod4(field, e)?.ok_or(UnitTypeError::NotSquareMod4)?;
    let basis = RelativeIntegralBasis { alpha: w.alpha, beta: w.beta, trivial: e.sqrt().is_some() };
    let disc = basis.discriminant();
    if disc != *e || !disc.is_unit() {
        return Err(inconsistency(field.d(), "relative discriminant is not the unit"));
    }
    Ok(basis)
}

/// Search bound used for the two-squares witness inside [`classify`].
pub const DEFAULT_WITNESS_BOUND: u64 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub d: i64,
    #[serde(rename = "D")]
    pub disc: i64,
    #[serde(serialize_with = "ser_quad")]
    pub epsilon: QuadInt,
    pub unit_norm: i8,
    pub m: Option<i64>,
    pub m_complement: Option<i64>,
    #[serde(serialize_with = "ser_bigint")]
    pub norm_eps_plus_one: BigInt,
    pub case: CaseLabel,
    /// `ε ∈ E(4) ∩ E⁺`.
    pub is_square_mod4: bool,
    /// `ε ∈ E_sq` (sum of two squares in `K`).
    pub is_sum_two_squares: bool,
    pub square_mod4_witness: Option<SquareMod4Witness>,
    pub two_squares_witness: Option<TwoSquaresWitness>,
    pub hilbert90_witness: Option<Hilbert90Witness>,
    pub global_mult_square_mod4: bool,
    /// `[E(4)∩E⁺ : E²]`, `[E_sq : E(4)∩E⁺]`, `[E⁺ : E_sq]`, `[E : E⁺]`.
    pub chain_indices: [u8; 4],
}

/// Classifies the fundamental unit. The square-mod-4 and two-squares flags
/// are computed by the residue test and the local symbols, independently of
/// the congruence table, and must agree with the case label.
pub fn classify(k: &RealQuadratic) -> Result<ClassificationReport, UnitTypeError> {
    let field = &k.field;
    let d = k.d();
    let eps = k.epsilon().clone();
    let norm_eps_plus_one = (&eps + &field.one()).norm();
    let residue = is_square_mod4(field, &eps)?;

    if k.unit.norm == -1 {
        return Ok(ClassificationReport {
            d,
            disc: k.disc(),
            epsilon: eps,
            unit_norm: -1,
            m: None,
            m_complement: None,
            norm_eps_plus_one,
            case: CaseLabel::NormMinusOne,
            is_square_mod4: false,
            is_sum_two_squares: false,
            square_mod4_witness: residue,
            two_squares_witness: None,
            hilbert90_witness: None,
            global_mult_square_mod4: false,
            chain_indices: [1, 1, 1, 4],
        });
    }

    let m = compute_m(k)?;
    let m_complement = complement_m(k)?;
    let h90 = hilbert90_alpha(k)?;
    let case = CaseLabel::from_congruences(d, m);

    let sq4 = residue.is_some();
    let sum2 = is_sum_two_squares(field, &eps)?;
    if sq4 != case.is_a() {
        return Err(inconsistency(d, format!("case {case} but residue test says square mod 4 = {sq4}")));
    }
    if sum2 != (case != CaseLabel::B) {
        return Err(inconsistency(d, format!("case {case} but local symbols say sum of two squares = {sum2}")));
    }
    if sq4 && !sum2 {
        return Err(inconsistency(d, "square mod 4 but not a sum of two squares"));
    }
    if !sum2 && field.g() < 2 {
        return Err(inconsistency(d, "E⁺/E_sq nontrivial although 2 does not split"));
    }
    // the m-criterion: ε is a sum of two squares iff m is
    let m_is_sum2 = !(d.rem_euclid(8) == 1 && m.rem_euclid(4) == 3);
    if m_is_sum2 != sum2 {
        return Err(inconsistency(d, "two-squares decision disagrees with the m-criterion"));
    }

    let two_squares_witness = if sum2 {
        two_squares_witness(field, &eps, DEFAULT_WITNESS_BOUND)?
    } else {
        None
    };
    let global = if sq4 { global_mult_square_mod4(field, &eps)? } else { false };
    let chain_indices = [
        if sq4 { 2 } else { 1 },
        if sum2 && !sq4 { 2 } else { 1 },
        if sum2 { 1 } else { 2 },
        2,
    ];
    Ok(ClassificationReport {
        d,
        disc: k.disc(),
        epsilon: eps,
        unit_norm: 1,
        m: Some(m),
        m_complement: Some(m_complement),
        norm_eps_plus_one,
        case,
        is_square_mod4: sq4,
        is_sum_two_squares: sum2,
        square_mod4_witness: residue,
        two_squares_witness,
        hilbert90_witness: Some(h90),
        global_mult_square_mod4: global,
        chain_indices,
    })
}

/// 2-rank of `(E(4)∩E⁺)/E²` as seen through the fundamental unit.
pub fn unit_type_rank(report: &ClassificationReport) -> u32 {
    u32::from(report.is_square_mod4)
}
