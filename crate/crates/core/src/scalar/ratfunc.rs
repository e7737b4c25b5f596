use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use super::{PolyQ, Rational, ScalarError};

/// An element of the rational function field `Q(q)`.
///
/// Invariants: the denominator is nonzero and monic, and numerator and denominator
/// are coprime. Equal values therefore have identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: PolyQ,
    den: PolyQ,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: PolyQ::zero(), den: PolyQ::one() }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(PolyQ::one())
    }

    /// The formal parameter `q`.
    pub fn q() -> Self {
        RatFunc::from_poly(PolyQ::q())
    }

    pub fn from_poly(num: PolyQ) -> Self {
        RatFunc { num, den: PolyQ::one() }
    }

    pub fn from_rational(c: Rational) -> Self {
        RatFunc::from_poly(PolyQ::constant(c))
    }

    pub fn new(num: PolyQ, den: PolyQ) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(RatFunc::normalized(num, den))
    }

    fn normalized(num: PolyQ, den: PolyQ) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        if den.is_constant() {
            let lc_inv = den.leading().expect("nonzero denominator").inv().expect("nonzero");
            return RatFunc { num: num.scale(&lc_inv), den: PolyQ::one() };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() { (num, den) } else { (num.exact_div(&g), den.exact_div(&g)) };
        let lc = den.leading().expect("nonzero denominator").clone();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let lc_inv = lc.inv().expect("nonzero");
            RatFunc { num: num.scale(&lc_inv), den: den.scale(&lc_inv) }
        }
    }

    pub fn num(&self) -> &PolyQ {
        &self.num
    }

    pub fn den(&self) -> &PolyQ {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Sum of numerator and denominator degrees.
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0) + self.den.degree().unwrap_or(0)
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(RatFunc::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn scale_int(&self, k: i64) -> Self {
        if k == 0 {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale_int(k), den: self.den.clone() }
    }

    /// Evaluates at `q = q0`.
    pub fn specialize(&self, q0: &Rational) -> Result<Rational, ScalarError> {
        let den = self.den.eval(q0);
        if den.is_zero() {
            return Err(ScalarError::PoleAtQ0);
        }
        Ok(&self.num.eval(q0) * &den.inv()?)
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl Add<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return RatFunc::from_poly(&self.num + &rhs.num);
            }
            return RatFunc::normalized(&self.num + &rhs.num, self.den.clone());
        }
        let g = self.den.gcd(&rhs.den);
        let left_cof = self.den.exact_div(&g);
        let right_cof = rhs.den.exact_div(&g);
        let num = &(&self.num * &right_cof) + &(&rhs.num * &left_cof);
        let den = &(&left_cof * &right_cof) * &g;
        RatFunc::normalized(num, den)
    }
}

impl Sub<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        // Cross-cancel before multiplying to keep degrees down.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let num = &self.num.exact_div(&g1) * &rhs.num.exact_div(&g2);
        let den = &self.den.exact_div(&g2) * &rhs.den.exact_div(&g1);
        RatFunc::normalized(num, den)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for RatFunc {
    type Err = ScalarError;

    /// Parses `(num)/(den)` or a bare polynomial.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('(') {
            if let Some((num, den)) = rest.split_once(")/(") {
                let den = den
                    .strip_suffix(')')
                    .ok_or_else(|| ScalarError::Parse(format!("unbalanced rational function: {s:?}")))?;
                return RatFunc::new(num.parse()?, den.parse()?);
            }
        }
        Ok(RatFunc::from_poly(t.parse()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> RatFunc {
        s.parse().unwrap()
    }

    #[test]
    fn inversion_swaps() {
        let x = RatFunc::new("q - 2".parse().unwrap(), "q + 3".parse().unwrap()).unwrap();
        assert_eq!(x.inv().unwrap().to_string(), "(q + 3)/(q - 2)");
    }

    #[test]
    fn normalizes_common_factors_and_monic_denominator() {
        let x = f("(2*q^2 - 2)/(4*q + 4)");
        assert_eq!(x, f("1/2*q - 1/2"));
        let y = f("(q)/(2*q + 6)");
        assert_eq!(y.den().to_string(), "q + 3");
        assert_eq!(y.num().to_string(), "1/2*q");
    }

    #[test]
    fn field_identities() {
        let a = f("(q + 1)/(q - 1)");
        let b = f("(q)/(q + 2)");
        let sum = &a + &b;
        assert_eq!(&sum - &b, a);
        assert_eq!(&(&a * &b) * &b.inv().unwrap(), a);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn specialize_and_pole() {
        assert_eq!(f("q^2 - 1").specialize(&Rational::from_int(3)).unwrap(), Rational::from_int(8));
        let pole = f("(1)/(q - 2)");
        assert_eq!(pole.specialize(&Rational::from_int(2)), Err(ScalarError::PoleAtQ0));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(RatFunc::new(PolyQ::one(), PolyQ::zero()), Err(ScalarError::DivisionByZero));
        assert_eq!(RatFunc::zero().inv(), Err(ScalarError::DivisionByZero));
    }
}
