//! Exact coefficient arithmetic.
//!
//! Two coefficient fields are supported: [`Rational`] for a fixed rational value of
//! the parameter `q`, and [`RatFunc`] (the field `Q(q)`) when `q` is kept formal.
//! Everything downstream is generic over [`Field`]; the [`Scalar`] union is the
//! dynamically typed form used at serialization boundaries.

mod poly;
mod ratfunc;
mod rational;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use poly::PolyQ;
pub use ratfunc::RatFunc;
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed fixed-q and generic-q scalars")]
    ModeMismatch,
    #[error("denominator vanishes at the requested q")]
    PoleAtQ0,
    #[error("parse error: {0}")]
    Parse(String),
}

/// The operations the solvers need from a coefficient field.
pub trait Field: Clone + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self, ScalarError>;
    fn scale_int(&self, k: i64) -> Self;
    /// Size estimate used to pick pivots: (degree in q, coefficient bits).
    fn complexity(&self) -> (usize, u64);
    fn to_scalar(&self) -> Scalar;
    fn from_scalar(s: &Scalar) -> Result<Self, ScalarError>;

    fn from_int(k: i64) -> Self {
        Self::from_rational(&Rational::from_int(k))
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn is_one(&self) -> bool {
        Rational::is_one(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        Rational::inv(self)
    }
    fn scale_int(&self, k: i64) -> Self {
        Rational::scale_int(self, k)
    }
    fn complexity(&self) -> (usize, u64) {
        (0, self.bits())
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Rational(self.clone())
    }
    fn from_scalar(s: &Scalar) -> Result<Self, ScalarError> {
        match s {
            Scalar::Rational(r) => Ok(r.clone()),
            Scalar::Function(_) => Err(ScalarError::ModeMismatch),
        }
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn from_rational(r: &Rational) -> Self {
        RatFunc::from_rational(r.clone())
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn is_one(&self) -> bool {
        RatFunc::is_one(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        RatFunc::inv(self)
    }
    fn scale_int(&self, k: i64) -> Self {
        RatFunc::scale_int(self, k)
    }
    fn complexity(&self) -> (usize, u64) {
        let bits = self.num().coeffs().iter().chain(self.den().coeffs()).map(Rational::bits).sum();
        (self.degree(), bits)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Function(self.clone())
    }
    fn from_scalar(s: &Scalar) -> Result<Self, ScalarError> {
        match s {
            Scalar::Function(f) => Ok(f.clone()),
            Scalar::Rational(_) => Err(ScalarError::ModeMismatch),
        }
    }
}

/// A coefficient tagged with its mode. All scalars of one computation share a mode.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Scalar {
    Rational(Rational),
    Function(RatFunc),
}

impl Scalar {
    fn pair<'a>(&'a self, rhs: &'a Scalar) -> Result<ScalarPair<'a>, ScalarError> {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(ScalarPair::Rational(a, b)),
            (Scalar::Function(a), Scalar::Function(b)) => Ok(ScalarPair::Function(a, b)),
            _ => Err(ScalarError::ModeMismatch),
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(match self.pair(rhs)? {
            ScalarPair::Rational(a, b) => Scalar::Rational(a + b),
            ScalarPair::Function(a, b) => Scalar::Function(a + b),
        })
    }

    pub fn mul(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(match self.pair(rhs)? {
            ScalarPair::Rational(a, b) => Scalar::Rational(a * b),
            ScalarPair::Function(a, b) => Scalar::Function(a * b),
        })
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Function(a) => Scalar::Function(-a),
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        Ok(match self {
            Scalar::Rational(a) => Scalar::Rational(a.inv()?),
            Scalar::Function(a) => Scalar::Function(a.inv()?),
        })
    }

    /// Value equality; comparing scalars of different modes is an error.
    pub fn equals(&self, rhs: &Scalar) -> Result<bool, ScalarError> {
        Ok(match self.pair(rhs)? {
            ScalarPair::Rational(a, b) => a == b,
            ScalarPair::Function(a, b) => a == b,
        })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(a) => a.is_zero(),
            Scalar::Function(a) => a.is_zero(),
        }
    }

    pub fn is_generic(&self) -> bool {
        matches!(self, Scalar::Function(_))
    }

    /// Parses a scalar in the given mode: a rational in fixed mode, a polynomial or
    /// `(num)/(den)` in generic mode.
    pub fn parse(s: &str, generic: bool) -> Result<Scalar, ScalarError> {
        if generic {
            Ok(Scalar::Function(s.parse()?))
        } else {
            Ok(Scalar::Rational(s.parse()?))
        }
    }
}

enum ScalarPair<'a> {
    Rational(&'a Rational, &'a Rational),
    Function(&'a RatFunc, &'a RatFunc),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(a) => write!(f, "{a}"),
            Scalar::Function(a) => write!(f, "{a}"),
        }
    }
}

/// Evaluates a rational function at `q = q0`.
pub fn specialize_q(x: &RatFunc, q0: &Rational) -> Result<Rational, ScalarError> {
    x.specialize(q0)
}

/// Whether `q` is kept formal or fixed to a rational value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QMode {
    Generic,
    Fixed(Rational),
}

impl QMode {
    pub fn fixed(&self) -> Option<&Rational> {
        match self {
            QMode::Generic => None,
            QMode::Fixed(q) => Some(q),
        }
    }

    pub fn is_generic(&self) -> bool {
        matches!(self, QMode::Generic)
    }
}

impl fmt::Display for QMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QMode::Generic => write!(f, "generic"),
            QMode::Fixed(q) => write!(f, "{q}"),
        }
    }
}

impl FromStr for QMode {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "generic" => Ok(QMode::Generic),
            other => Ok(QMode::Fixed(other.parse()?)),
        }
    }
}

impl Serialize for QMode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QMode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Glue that lets generic code obtain the value of `q` in its own field.
pub trait ParamField: Field {
    fn q_value(mode: &QMode) -> Result<Self, ScalarError>;
}

impl ParamField for Rational {
    fn q_value(mode: &QMode) -> Result<Self, ScalarError> {
        mode.fixed().cloned().ok_or(ScalarError::ModeMismatch)
    }
}

impl ParamField for RatFunc {
    fn q_value(mode: &QMode) -> Result<Self, ScalarError> {
        match mode {
            QMode::Generic => Ok(RatFunc::q()),
            QMode::Fixed(_) => Err(ScalarError::ModeMismatch),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Scalar {
        Scalar::parse(s, false).unwrap()
    }

    fn func(s: &str) -> Scalar {
        Scalar::parse(s, true).unwrap()
    }

    #[test]
    fn scalar_field_ops() {
        assert_eq!(rat("1/2").add(&rat("1/3")).unwrap(), rat("5/6"));
        assert_eq!(func("q + 1").mul(&func("q - 1")).unwrap(), func("q^2 - 1"));
        assert_eq!(func("(q - 2)/(q + 3)").inv().unwrap(), func("(q + 3)/(q - 2)"));
        assert_eq!(rat("0").inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        assert_eq!(rat("1").add(&func("q")), Err(ScalarError::ModeMismatch));
        assert_eq!(func("q").equals(&rat("1")), Err(ScalarError::ModeMismatch));
        assert_eq!(Rational::from_scalar(&func("q")), Err(ScalarError::ModeMismatch));
    }

    #[test]
    fn specialize_examples() {
        let x: RatFunc = "q^2 - 1".parse().unwrap();
        assert_eq!(specialize_q(&x, &Rational::from_int(3)).unwrap(), Rational::from_int(8));
        let y: RatFunc = "(1)/(q - 2)".parse().unwrap();
        assert_eq!(specialize_q(&y, &Rational::from_int(2)), Err(ScalarError::PoleAtQ0));
        // n(i+q) - m(j+q) at (m,i,n,j) = (1,0,0,1) is -1 - q; at q0 = 1 it is -2.
        let z: RatFunc = "-q - 1".parse().unwrap();
        assert_eq!(specialize_q(&z, &Rational::from_int(1)).unwrap(), Rational::from_int(-2));
    }

    #[test]
    fn qmode_parsing() {
        assert_eq!("generic".parse::<QMode>().unwrap(), QMode::Generic);
        assert_eq!("-7/3".parse::<QMode>().unwrap(), QMode::Fixed("-7/3".parse().unwrap()));
        assert!("0.5".parse::<QMode>().is_err());
        assert_eq!(QMode::Fixed(Rational::from_int(2)).to_string(), "2");
    }
}
