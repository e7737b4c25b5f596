use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use super::{Rational, ScalarError};

/// A univariate polynomial in the formal parameter `q` with rational coefficients.
///
/// Coefficients are stored lowest degree first with trailing zeros stripped, so the
/// zero polynomial is the empty vector and structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyQ {
    coeffs: Vec<Rational>,
}

impl PolyQ {
    pub fn zero() -> Self {
        PolyQ { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        PolyQ::constant(Rational::one())
    }

    /// The polynomial `q`.
    pub fn q() -> Self {
        PolyQ::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn constant(c: Rational) -> Self {
        PolyQ::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeffs.first().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return PolyQ::zero();
        }
        PolyQ { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        if k == 0 {
            return PolyQ::zero();
        }
        PolyQ { coeffs: self.coeffs.iter().map(|a| a.scale_int(k)).collect() }
    }

    /// Divides by the leading coefficient. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) if !lc.is_one() => self.scale(&lc.inv().expect("leading coefficient is nonzero")),
            _ => self.clone(),
        }
    }

    /// Horner evaluation at `q = x`.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Euclidean division: `self = quot * divisor + rem` with `deg rem < deg divisor`.
    pub fn div_rem(&self, divisor: &PolyQ) -> Result<(PolyQ, PolyQ), ScalarError> {
        let dlen = divisor.coeffs.len();
        if dlen == 0 {
            return Err(ScalarError::DivisionByZero);
        }
        if self.coeffs.len() < dlen {
            return Ok((PolyQ::zero(), self.clone()));
        }
        let lc_inv = divisor.coeffs[dlen - 1].inv()?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); rem.len() - dlen + 1];
        for k in (0..quot.len()).rev() {
            let top = &rem[k + dlen - 1];
            if top.is_zero() {
                continue;
            }
            let factor = top * &lc_inv;
            for (t, dc) in divisor.coeffs.iter().enumerate() {
                let sub = &factor * dc;
                rem[k + t] = &rem[k + t] - &sub;
            }
            quot[k] = factor;
        }
        rem.truncate(dlen - 1);
        Ok((PolyQ::from_coeffs(quot), PolyQ::from_coeffs(rem)))
    }

    /// Exact division; the caller guarantees `divisor | self`.
    pub fn exact_div(&self, divisor: &PolyQ) -> PolyQ {
        if divisor.is_one() {
            return self.clone();
        }
        let (quot, rem) = self.div_rem(divisor).expect("nonzero divisor");
        debug_assert!(rem.is_zero(), "inexact polynomial division");
        quot
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &PolyQ) -> PolyQ {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a
    }
}

impl From<Rational> for PolyQ {
    fn from(c: Rational) -> Self {
        PolyQ::constant(c)
    }
}

impl Add<&PolyQ> for &PolyQ {
    type Output = PolyQ;
    fn add(self, rhs: &PolyQ) -> PolyQ {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() { (self, rhs) } else { (rhs, self) };
        let mut coeffs = long.coeffs.clone();
        for (k, c) in short.coeffs.iter().enumerate() {
            coeffs[k] = &coeffs[k] + c;
        }
        PolyQ::from_coeffs(coeffs)
    }
}

impl Sub<&PolyQ> for &PolyQ {
    type Output = PolyQ;
    fn sub(self, rhs: &PolyQ) -> PolyQ {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect();
        PolyQ::from_coeffs(coeffs)
    }
}

impl Mul<&PolyQ> for &PolyQ {
    type Output = PolyQ;
    fn mul(self, rhs: &PolyQ) -> PolyQ {
        if self.is_zero() || rhs.is_zero() {
            return PolyQ::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (a_deg, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (b_deg, b) in rhs.coeffs.iter().enumerate() {
                let term = a * b;
                coeffs[a_deg + b_deg] = &coeffs[a_deg + b_deg] + &term;
            }
        }
        PolyQ::from_coeffs(coeffs)
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for PolyQ {
    /// Highest degree first, e.g. `3*q^2 - 1/2*q + 4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let var = match deg {
                0 => String::new(),
                1 => "q".to_string(),
                d => format!("q^{d}"),
            };
            if deg == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PolyQ {
    type Err = ScalarError;

    /// Parses the printed form: a signed sum of terms `c`, `q`, `q^k`, `c*q`, `c*q^k`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ScalarError::Parse(format!("not a polynomial in q: {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        // Split into signed terms at '+'/'-' that are not part of a leading sign.
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (k, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && (k == 0 || !current.is_empty()) {
                if !current.is_empty() {
                    terms.push((negative, std::mem::take(&mut current)));
                }
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(bad());
        }
        terms.push((negative, current));

        let mut acc = PolyQ::zero();
        for (negative, term) in terms {
            let (coeff, power) = match term.split_once('q') {
                None => (term.parse::<Rational>().map_err(|_| bad())?, 0usize),
                Some((pre, post)) => {
                    let coeff = match pre {
                        "" => Rational::one(),
                        p => p.strip_suffix('*').ok_or_else(bad)?.parse::<Rational>().map_err(|_| bad())?,
                    };
                    let power = match post {
                        "" => 1,
                        p => p.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?,
                    };
                    (coeff, power)
                }
            };
            let coeff = if negative { -coeff } else { coeff };
            let mut coeffs = vec![Rational::zero(); power + 1];
            coeffs[power] = coeff;
            acc = &acc + &PolyQ::from_coeffs(coeffs);
        }
        Ok(acc)
    }
}
