//! Exact scalar arithmetic: arbitrary-precision rationals and the quadratic
//! ring Q[√q].
//!
//! Every quantity in this crate is computed exactly. [`Rational`] is the
//! scalar field; [`QAdjoined`] represents `a + b*sqrt(q)` with rational
//! components and is the natural home of the coefficient sequences before
//! their √q factors cancel. Equality is structural on canonical forms;
//! there are no epsilon comparisons anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different rings: sqrt({0}) vs sqrt({1})")]
    MismatchedQ(u32, u32),
    #[error("ring parameter must be an integer >= 4, got {0}")]
    InvalidQ(u32),
    #[error("value {0} has a nonzero sqrt component and is not rational")]
    IrrationalValue(String),
    #[error("divisor {0} has zero norm in Q[sqrt({1})] (perfect-square q degeneracy)")]
    DegenerateDivisor(String, u32),
    #[error("cannot parse {0:?} as {1}")]
    Parse(String, &'static str),
}

/// Arbitrary-precision rational in lowest terms with positive denominator.
///
/// Zero is canonically `0/1`. All operations return canonical forms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den`, reducing to canonical form. `den == 0` is an error.
    pub fn new(num: i64, den: i64) -> Result<Self, ExactError> {
        Self::from_big(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// Lossy conversion for display purposes only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = ExactError;

    /// Accepts `"n"` and `"num/den"` with optional signs.
    fn from_str(s: &str) -> Result<Self, ExactError> {
        let bad = || ExactError::Parse(s.to_string(), "Rational");
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (
                BigInt::from_str(n.trim()).map_err(|_| bad())?,
                BigInt::from_str(d.trim()).map_err(|_| bad())?,
            ),
            None => (BigInt::from_str(t).map_err(|_| bad())?, BigInt::one()),
        };
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Rational(BigRational::new(num, den)))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                &self $op &rhs
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                &self $op rhs
            }
        }
    };
}

rational_binop!(Add, add, +);
rational_binop!(Sub, sub, -);
rational_binop!(Mul, mul, *);

impl Div for &Rational {
    type Output = Rational;

    /// Panics on a zero divisor; use [`Rational::checked_div`] for the
    /// fallible form.
    fn div(self, rhs: &Rational) -> Rational {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 = &self.0 + &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 = &self.0 - &rhs.0;
    }
}

/// Element `a + b*sqrt(q)` of Q[√q], `q >= 4`.
///
/// The representation is kept as the pair `(a, b)` even when `q` is a
/// perfect square; collapse happens only through the explicit
/// [`QAdjoined::collapse`]. Equality is componentwise on `(a, b, q)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QAdjoined {
    q: u32,
    a: Rational,
    b: Rational,
}

impl QAdjoined {
    pub fn new(q: u32, a: Rational, b: Rational) -> Result<Self, ExactError> {
        if q < 4 {
            return Err(ExactError::InvalidQ(q));
        }
        Ok(QAdjoined { q, a, b })
    }

    /// Panics if `q < 4`.
    pub fn zero(q: u32) -> Self {
        Self::new(q, Rational::zero(), Rational::zero()).expect("q >= 4")
    }

    /// Panics if `q < 4`.
    pub fn one(q: u32) -> Self {
        Self::new(q, Rational::one(), Rational::zero()).expect("q >= 4")
    }

    /// The element √q itself. Panics if `q < 4`.
    pub fn sqrt_q(q: u32) -> Self {
        Self::new(q, Rational::zero(), Rational::one()).expect("q >= 4")
    }

    pub fn from_rational(q: u32, a: Rational) -> Result<Self, ExactError> {
        Self::new(q, a, Rational::zero())
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// The rational part `a`.
    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    /// The coefficient `b` of √q.
    pub fn sqrt_coeff(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn expect_same_q(&self, rhs: &QAdjoined) -> Result<(), ExactError> {
        if self.q != rhs.q {
            Err(ExactError::MismatchedQ(self.q, rhs.q))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, rhs: &QAdjoined) -> Result<QAdjoined, ExactError> {
        self.expect_same_q(rhs)?;
        Ok(QAdjoined {
            q: self.q,
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        })
    }

    pub fn checked_sub(&self, rhs: &QAdjoined) -> Result<QAdjoined, ExactError> {
        self.expect_same_q(rhs)?;
        Ok(QAdjoined {
            q: self.q,
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        })
    }

    /// `(a1 + b1√q)(a2 + b2√q) = (a1·a2 + q·b1·b2) + (a1·b2 + a2·b1)√q`.
    pub fn checked_mul(&self, rhs: &QAdjoined) -> Result<QAdjoined, ExactError> {
        self.expect_same_q(rhs)?;
        let qr = Rational::from_int(self.q as i64);
        Ok(QAdjoined {
            q: self.q,
            a: &(&self.a * &rhs.a) + &(&qr * &(&self.b * &rhs.b)),
            b: &(&self.a * &rhs.b) + &(&rhs.a * &self.b),
        })
    }

    /// Exact division via the conjugate: `x/y = x·(a,-b) / (a² - q·b²)`.
    ///
    /// The norm `a² - q·b²` vanishes for nonzero `y` only when `q` is a
    /// perfect square, which signals a degenerate representation rather
    /// than a legal quotient.
    pub fn checked_div(&self, rhs: &QAdjoined) -> Result<QAdjoined, ExactError> {
        self.expect_same_q(rhs)?;
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if rhs.a.is_zero() {
            // x / (b√q) = x·√q / (b·q)
            let den = &rhs.b * &Rational::from_int(self.q as i64);
            return Ok(QAdjoined {
                q: self.q,
                a: (&self.b * &Rational::from_int(self.q as i64)).checked_div(&den)?,
                b: self.a.checked_div(&den)?,
            });
        }
        if rhs.b.is_zero() {
            return Ok(QAdjoined {
                q: self.q,
                a: self.a.checked_div(&rhs.a)?,
                b: self.b.checked_div(&rhs.a)?,
            });
        }
        let norm = rhs.norm();
        if norm.is_zero() {
            return Err(ExactError::DegenerateDivisor(rhs.to_string(), self.q));
        }
        let num = self.checked_mul(&rhs.conjugate())?;
        Ok(QAdjoined {
            q: self.q,
            a: num.a.checked_div(&norm)?,
            b: num.b.checked_div(&norm)?,
        })
    }

    /// Scalar multiple `r·(a + b√q)`.
    pub fn scale(&self, r: &Rational) -> QAdjoined {
        QAdjoined {
            q: self.q,
            a: &self.a * r,
            b: &self.b * r,
        }
    }

    pub fn conjugate(&self) -> QAdjoined {
        QAdjoined {
            q: self.q,
            a: self.a.clone(),
            b: -&self.b,
        }
    }

    /// `a² - q·b²`.
    pub fn norm(&self) -> Rational {
        &(&self.a * &self.a) - &(&Rational::from_int(self.q as i64) * &(&self.b * &self.b))
    }

    /// Extracts the rational value; errors unless `b == 0`.
    pub fn as_rational(&self) -> Result<Rational, ExactError> {
        if self.b.is_zero() {
            Ok(self.a.clone())
        } else {
            Err(ExactError::IrrationalValue(self.to_string()))
        }
    }

    /// Explicit normalization: the exact rational value when one exists,
    /// i.e. when `b == 0` or `q` is a perfect square. Never applied
    /// implicitly by any arithmetic.
    pub fn collapse(&self) -> Option<Rational> {
        if self.b.is_zero() {
            return Some(self.a.clone());
        }
        let root = (self.q as f64).sqrt().round() as u32;
        if root * root == self.q {
            Some(&self.a + &(&self.b * &Rational::from_int(root as i64)))
        } else {
            None
        }
    }
}

impl fmt::Display for QAdjoined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.q)
    }
}

impl fmt::Debug for QAdjoined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for QAdjoined {
    type Err = ExactError;

    /// Parses the serialization form `"a + b*sqrt(q)"`.
    fn from_str(s: &str) -> Result<Self, ExactError> {
        let bad = || ExactError::Parse(s.to_string(), "QAdjoined");
        let t = s.trim();
        let (a_part, rest) = t.split_once(" + ").ok_or_else(bad)?;
        let (b_part, q_part) = rest.split_once("*sqrt(").ok_or_else(bad)?;
        let q_str = q_part.strip_suffix(')').ok_or_else(bad)?;
        let a: Rational = a_part.parse()?;
        let b: Rational = b_part.parse()?;
        let q: u32 = q_str.trim().parse().map_err(|_| bad())?;
        QAdjoined::new(q, a, b)
    }
}

impl Serialize for QAdjoined {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QAdjoined {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! qadjoined_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &QAdjoined {
            type Output = QAdjoined;
            /// Panics on mismatched ring parameters; see the `checked_*`
            /// methods for the fallible forms.
            fn $method(self, rhs: &QAdjoined) -> QAdjoined {
                self.$checked(rhs).expect("mismatched ring parameter q")
            }
        }
        impl $trait for QAdjoined {
            type Output = QAdjoined;
            fn $method(self, rhs: QAdjoined) -> QAdjoined {
                self.$checked(&rhs).expect("mismatched ring parameter q")
            }
        }
        impl $trait<&QAdjoined> for QAdjoined {
            type Output = QAdjoined;
            fn $method(self, rhs: &QAdjoined) -> QAdjoined {
                self.$checked(rhs).expect("mismatched ring parameter q")
            }
        }
    };
}

qadjoined_binop!(Add, add, checked_add);
qadjoined_binop!(Sub, sub, checked_sub);
qadjoined_binop!(Mul, mul, checked_mul);

impl Neg for &QAdjoined {
    type Output = QAdjoined;
    fn neg(self) -> QAdjoined {
        QAdjoined {
            q: self.q,
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl Neg for QAdjoined {
    type Output = QAdjoined;
    fn neg(self) -> QAdjoined {
        -&self
    }
}

impl AddAssign<&QAdjoined> for QAdjoined {
    fn add_assign(&mut self, rhs: &QAdjoined) {
        *self = self.checked_add(rhs).expect("mismatched ring parameter q");
    }
}

/// Renders `r` in plain decimal with `sig` significant digits, rounding
/// half-up, computed exactly from the fraction. Display-only; nothing in
/// the library consumes the output.
pub fn decimal_string(r: &Rational, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let n = r.numer().abs();
    let d = r.denom().clone();
    let ten = BigInt::from(10);

    // decimal exponent e: value is in [10^e, 10^(e+1))
    let int_part = &n / &d;
    let mut e: i64 = if int_part.is_zero() {
        let mut r10 = &n * &ten;
        let mut k: i64 = 0;
        while r10 < d {
            r10 *= &ten;
            k += 1;
        }
        -(k + 1)
    } else {
        int_part.to_string().len() as i64 - 1
    };

    // t = floor(value * 10^(sig - e)) carries one rounding digit
    let shift = sig as i64 - e;
    let t = if shift >= 0 {
        (&n * ten.pow(shift as u32)) / &d
    } else {
        &n / (&d * ten.pow((-shift) as u32))
    };
    let mut rounded = (t + BigInt::from(5)) / &ten;
    let mut digits = rounded.to_string();
    if digits.len() > sig {
        // rounding carried into the next decade
        rounded /= &ten;
        e += 1;
        digits = rounded.to_string();
    }
    debug_assert_eq!(digits.len(), sig);

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if e >= 0 {
        let int_len = (e + 1) as usize;
        if int_len >= sig {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', int_len - sig));
        } else {
            out.push_str(&digits[..int_len]);
            let frac = digits[int_len..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        }
    } else {
        let frac = digits.trim_end_matches('0');
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-e - 1) as usize));
        out.push_str(frac);
    }
    out
}
