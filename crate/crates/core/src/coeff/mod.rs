//! Exact coefficient fields: ℚ and the cyclotomic extensions ℚ(ζ_l).

mod cyclotomic;
mod rational;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use cyclotomic::{cyclotomic_polynomial, euler_phi, Cyclotomic};
pub use rational::{ParseRationalError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
}

/// Field descriptor. Cyclotomic orders 1 and 2 collapse to ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Cyclotomic(u32),
}

impl Field {
    pub fn cyclotomic(l: u32) -> Field {
        if l <= 2 {
            Field::Rational
        } else {
            Field::Cyclotomic(l)
        }
    }

    /// Smallest field containing both, if one contains the other.
    pub fn join(self, other: Field) -> Result<Field, CoeffError> {
        match (self, other) {
            (a, b) if a == b => Ok(a),
            (Field::Rational, b) => Ok(b),
            (a, Field::Rational) => Ok(a),
            (a, b) => Err(CoeffError::FieldMismatch(a, b)),
        }
    }

    pub fn contains(self, x: &FieldElement) -> bool {
        self.join(x.field()) == Ok(self)
    }

    pub fn arith(self, a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement, CoeffError> {
        for x in [a, b] {
            if !self.contains(x) {
                return Err(CoeffError::FieldMismatch(self, x.field()));
            }
        }
        match op {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_add(&b.neg_ref()),
            ArithOp::Mul => a.checked_mul(b),
            ArithOp::Div => a.checked_div(b),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Cyclotomic(l) => write!(f, "Q(zeta_{l})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A coefficient: either a rational or a non-rational element of some ℚ(ζ_l).
///
/// Cyclotomic values that happen to be rational are always demoted, which
/// keeps the encoding of every value unique.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(Rational),
    Cyclotomic(Cyclotomic),
}

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement::Rational(Rational::zero())
    }

    pub fn one() -> Self {
        FieldElement::Rational(Rational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        FieldElement::Rational(Rational::from_integer(n))
    }

    pub fn from_cyclotomic(c: Cyclotomic) -> Self {
        match c.as_rational() {
            Some(r) => FieldElement::Rational(r),
            None => FieldElement::Cyclotomic(c),
        }
    }

    pub fn field(&self) -> Field {
        match self {
            FieldElement::Rational(_) => Field::Rational,
            FieldElement::Cyclotomic(c) => Field::Cyclotomic(c.order()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, FieldElement::Rational(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, FieldElement::Rational(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            FieldElement::Rational(r) => Some(r),
            FieldElement::Cyclotomic(_) => None,
        }
    }

    fn neg_ref(&self) -> Self {
        match self {
            FieldElement::Rational(r) => FieldElement::Rational(-r),
            FieldElement::Cyclotomic(c) => FieldElement::Cyclotomic(c.neg()),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CoeffError> {
        use FieldElement::*;
        Ok(match (self, other) {
            (Rational(a), Rational(b)) => Rational(a + b),
            (Rational(a), Cyclotomic(c)) | (Cyclotomic(c), Rational(a)) => {
                Self::from_cyclotomic(c.add(&self::Cyclotomic::from_rational(c.order(), a.clone())))
            }
            (Cyclotomic(a), Cyclotomic(b)) => {
                if a.order() != b.order() {
                    return Err(CoeffError::FieldMismatch(self.field(), other.field()));
                }
                Self::from_cyclotomic(a.add(b))
            }
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, CoeffError> {
        use FieldElement::*;
        Ok(match (self, other) {
            (Rational(a), Rational(b)) => Rational(a * b),
            (Rational(a), Cyclotomic(c)) | (Cyclotomic(c), Rational(a)) => Self::from_cyclotomic(c.scale(a)),
            (Cyclotomic(a), Cyclotomic(b)) => {
                if a.order() != b.order() {
                    return Err(CoeffError::FieldMismatch(self.field(), other.field()));
                }
                Self::from_cyclotomic(a.mul(b))
            }
        })
    }

    pub fn inverse(&self) -> Result<Self, CoeffError> {
        match self {
            FieldElement::Rational(r) => r.recip().map(FieldElement::Rational).ok_or(CoeffError::DivisionByZero),
            FieldElement::Cyclotomic(c) => {
                c.inverse().map(Self::from_cyclotomic).ok_or(CoeffError::DivisionByZero)
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, CoeffError> {
        self.checked_mul(&other.inverse()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = FieldElement::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// True when the printed form needs no parentheses as a factor.
    pub(crate) fn is_atomic(&self) -> bool {
        match self {
            FieldElement::Rational(_) => true,
            FieldElement::Cyclotomic(c) => c.coeffs().iter().filter(|x| !x.is_zero()).count() == 1,
        }
    }

    /// Sign used when printing as a polynomial coefficient.
    pub(crate) fn looks_negative(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_negative(),
            FieldElement::Cyclotomic(c) => {
                self.is_atomic() && c.coeffs().iter().find(|x| !x.is_zero()).is_some_and(Rational::is_negative)
            }
        }
    }
}

impl From<Rational> for FieldElement {
    fn from(r: Rational) -> Self {
        FieldElement::Rational(r)
    }
}

impl From<i64> for FieldElement {
    fn from(n: i64) -> Self {
        FieldElement::from_integer(n)
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.checked_add(rhs).expect("coefficient field mismatch")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.checked_add(&rhs.neg_ref()).expect("coefficient field mismatch")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.checked_mul(rhs).expect("coefficient field mismatch")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

/// ζ_l^k, in ℚ when l ≤ 2.
pub fn root_of_unity(l: u32, k: i64) -> FieldElement {
    assert!(l >= 1, "root of unity order must be positive");
    match l {
        1 => FieldElement::one(),
        2 => FieldElement::from_integer(if k.rem_euclid(2) == 0 { 1 } else { -1 }),
        _ => FieldElement::from_cyclotomic(Cyclotomic::zeta_pow(l, k)),
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(r) => write!(f, "{r}"),
            FieldElement::Cyclotomic(c) => {
                let mut first = true;
                for (k, a) in c.coeffs().iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let mag = a.abs();
                    if first {
                        if a.is_negative() {
                            write!(f, "-")?;
                        }
                    } else {
                        write!(f, "{}", if a.is_negative() { " - " } else { " + " })?;
                    }
                    first = false;
                    match k {
                        0 => write!(f, "{mag}")?,
                        _ => {
                            if !mag.is_one() {
                                write!(f, "{mag}*")?;
                            }
                            if k == 1 {
                                write!(f, "zeta")?;
                            } else {
                                write!(f, "zeta^{k}")?;
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
