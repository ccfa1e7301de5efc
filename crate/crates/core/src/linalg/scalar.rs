use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// A single numeric entry: exact rational or double.
///
/// `BigRational` keeps itself reduced with a positive denominator, so the
/// exact variant always satisfies the lowest-terms invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Neg,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Pos,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Neg => "neg",
            Sign::Zero => "zero",
            Sign::Pos => "pos",
        })
    }
}

/// Zero threshold for float signs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub zero_eps: f64,
    /// Scale `zero_eps` by `max(1, magnitude)` of the quantity being tested.
    pub relative: bool,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            zero_eps: 1e-10,
            relative: true,
        }
    }
}

impl Tolerance {
    pub fn new(zero_eps: f64, relative: bool) -> Result<Self> {
        if !(zero_eps > 0.0) || !zero_eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "zero_eps must be positive and finite, got {zero_eps}"
            )));
        }
        Ok(Tolerance { zero_eps, relative })
    }

    pub fn threshold(&self, magnitude: f64) -> f64 {
        if self.relative {
            self.zero_eps * magnitude.max(1.0)
        } else {
            self.zero_eps
        }
    }

    pub fn sign(&self, value: f64, magnitude: f64) -> Sign {
        if value.abs() <= self.threshold(magnitude) {
            Sign::Zero
        } else if value > 0.0 {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact binary value of a finite double.
pub fn f64_to_rational(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    BigRational::from_float(x).ok_or(Error::NonFinite(x))
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    match q.to_f64() {
        Some(v) => v,
        None => {
            // Fallback for ratios whose parts overflow f64 separately.
            let n = q.numer().bits() as i64;
            let d = q.denom().bits() as i64;
            let shift = n - d;
            if shift > 1100 {
                if q.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            } else {
                0.0
            }
        }
    }
}

/// Parses `"p/q"`, an integer, or a decimal such as `"-1.25e-3"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let all = all / BigInt::from(10);
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

pub fn pow_rational(q: &BigRational, e: u32) -> BigRational {
    num_traits::pow(q.clone(), e as usize)
}

impl Scalar {
    pub fn exact(n: i64, d: i64) -> Scalar {
        Scalar::Exact(rat(n, d))
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::Exact(rat_int(n))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    /// Same value as an exact rational; floats convert without rounding.
    pub fn to_exact(&self) -> Result<BigRational> {
        match self {
            Scalar::Exact(q) => Ok(q.clone()),
            Scalar::Float(x) => f64_to_rational(*x),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    /// Exact sign for rationals, tolerance-guarded sign for floats.
    pub fn sign(&self, tol: &Tolerance, magnitude: f64) -> Sign {
        match self {
            Scalar::Exact(q) => Sign::of_ordering(q.cmp(&BigRational::zero())),
            Scalar::Float(x) => tol.sign(*x, magnitude),
        }
    }

    fn binary(
        &self,
        other: &Scalar,
        exact: impl FnOnce(&BigRational, &BigRational) -> Result<BigRational>,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => exact(a, b).map(Scalar::Exact),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(float(*a, *b))),
            _ => Err(Error::MixedArithmetic),
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        self.binary(other, |a, b| Ok(a + b), |a, b| a + b)
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.binary(other, |a, b| Ok(a - b), |a, b| a - b)
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        self.binary(other, |a, b| Ok(a * b), |a, b| a * b)
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.binary(other, |a, b| Ok(a / b), |a, b| a / b)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

/// Exact values serialize as strings (`"-3/4"`), floats as JSON numbers.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(q) => s.serialize_str(&q.to_string()),
            Scalar::Float(x) => s.serialize_f64(*x),
        }
    }
}

/// JSON integers and strings read as exact, other numbers as floats.
impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Scalar;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a rational string such as \"3/4\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::Exact(rat_int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::Exact(BigRational::from_integer(BigInt::from(v))))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::Float(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Scalar, E> {
                parse_rational(v).map(Scalar::Exact).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}
