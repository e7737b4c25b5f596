use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{Field, Rational};

/// The five index variables a coefficient may mention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    M,
    I,
    N,
    J,
    Q,
}

impl Var {
    pub fn from_name(name: &str) -> Option<Var> {
        Some(match name {
            "m" => Var::M,
            "i" => Var::I,
            "n" => Var::N,
            "j" => Var::J,
            "q" => Var::Q,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::M => "m",
            Var::I => "i",
            Var::N => "n",
            Var::J => "j",
            Var::Q => "q",
        }
    }
}

/// Coefficient expression tree. Polynomial in all variables: there is no division node,
/// and `p/q` only occurs inside a rational literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(Rational),
    Ratio(Rational),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Paren(Box<Expr>),
}

impl Expr {
    pub fn int(k: i64) -> Expr {
        Expr::Int(Rational::from_int(k))
    }

    pub fn ratio(p: i64, q: i64) -> Expr {
        Expr::Ratio(Rational::new(p, q).expect("nonzero denominator"))
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn paren(e: Expr) -> Expr {
        Expr::Paren(Box::new(e))
    }

    /// Evaluates with `lookup` supplying variable values; the first unbound variable is
    /// returned as the error.
    pub fn eval<F: Field>(&self, lookup: &impl Fn(Var) -> Option<F>) -> Result<F, Var> {
        Ok(match self {
            Expr::Int(c) | Expr::Ratio(c) => F::from_rational(c),
            Expr::Var(v) => lookup(*v).ok_or(*v)?,
            Expr::Neg(e) => e.eval(lookup)?.neg(),
            Expr::Add(a, b) => a.eval(lookup)?.add(&b.eval(lookup)?),
            Expr::Sub(a, b) => a.eval(lookup)?.sub(&b.eval(lookup)?),
            Expr::Mul(a, b) => a.eval(lookup)?.mul(&b.eval(lookup)?),
            Expr::Paren(e) => e.eval(lookup)?,
        })
    }

    /// Expands into a polynomial in (m, i, n, j) with `q` replaced by `q_value`.
    pub fn compile<F: Field>(&self, q_value: &F) -> CompiledExpr<F> {
        CompiledExpr::from_terms(self.expand(q_value))
    }

    fn expand<F: Field>(&self, q_value: &F) -> Terms<F> {
        match self {
            Expr::Int(c) | Expr::Ratio(c) => Terms::constant(F::from_rational(c)),
            Expr::Var(Var::Q) => Terms::constant(q_value.clone()),
            Expr::Var(v) => {
                let mut exps = [0u8; 4];
                exps[*v as usize] = 1;
                Terms::monomial(exps, F::one())
            }
            Expr::Neg(e) => e.expand(q_value).negate(),
            Expr::Add(a, b) => a.expand(q_value).plus(&b.expand(q_value), false),
            Expr::Sub(a, b) => a.expand(q_value).plus(&b.expand(q_value), true),
            Expr::Mul(a, b) => a.expand(q_value).times(&b.expand(q_value)),
            Expr::Paren(e) => e.expand(q_value),
        }
    }
}

impl fmt::Display for Expr {
    /// Prints the tree as written; parentheses appear only where a `Paren` node is.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(c) => write!(f, "{c}"),
            Expr::Ratio(c) if c.is_integer() => write!(f, "{c}/1"),
            Expr::Ratio(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Neg(e) => write!(f, "-{e}"),
            Expr::Add(a, b) => write!(f, "{a} + {b}"),
            Expr::Sub(a, b) => write!(f, "{a} - {b}"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Paren(e) => write!(f, "({e})"),
        }
    }
}

type Exponents = [u8; 4];

#[derive(Clone)]
struct Terms<F> {
    map: BTreeMap<Exponents, F>,
}

impl<F: Field> Terms<F> {
    fn constant(c: F) -> Self {
        Terms::monomial([0; 4], c)
    }

    fn monomial(exps: Exponents, c: F) -> Self {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(exps, c);
        }
        Terms { map }
    }

    fn negate(self) -> Self {
        Terms { map: self.map.into_iter().map(|(k, v)| (k, v.neg())).collect() }
    }

    fn plus(mut self, rhs: &Self, subtract: bool) -> Self {
        for (exps, c) in &rhs.map {
            let c = if subtract { c.neg() } else { c.clone() };
            let sum = match self.map.get(exps) {
                Some(prev) => prev.add(&c),
                None => c,
            };
            if sum.is_zero() {
                self.map.remove(exps);
            } else {
                self.map.insert(*exps, sum);
            }
        }
        self
    }

    fn times(&self, rhs: &Self) -> Self {
        let mut out = Terms { map: BTreeMap::new() };
        for (ea, ca) in &self.map {
            for (eb, cb) in &rhs.map {
                let exps = std::array::from_fn(|k| ea[k] + eb[k]);
                out = out.plus(&Terms::monomial(exps, ca.mul(cb)), false);
            }
        }
        out
    }
}

/// A coefficient expression expanded for fast evaluation at integer indices.
#[derive(Clone, Debug)]
pub struct CompiledExpr<F> {
    terms: Vec<(Exponents, F)>,
}

impl<F: Field> CompiledExpr<F> {
    fn from_terms(terms: Terms<F>) -> Self {
        CompiledExpr { terms: terms.map.into_iter().collect() }
    }

    /// Value at integer `(m, i, n, j)`.
    pub fn eval(&self, m: i64, i: i64, n: i64, j: i64) -> F {
        let vals = [m, i, n, j];
        let mut acc = F::zero();
        for (exps, c) in &self.terms {
            let mut k: i64 = 1;
            for (v, e) in vals.iter().zip(exps) {
                for _ in 0..*e {
                    k = k.checked_mul(*v).expect("index monomial overflow");
                }
            }
            if k != 0 {
                acc = acc.add(&c.scale_int(k));
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::RatFunc;

    fn block_coefficient() -> Expr {
        // n*(i+q) - m*(j+q)
        Expr::sub(
            Expr::mul(Expr::var(Var::N), Expr::paren(Expr::add(Expr::var(Var::I), Expr::var(Var::Q)))),
            Expr::mul(Expr::var(Var::M), Expr::paren(Expr::add(Expr::var(Var::J), Expr::var(Var::Q)))),
        )
    }

    #[test]
    fn compiled_matches_tree_evaluation() {
        let e = block_coefficient();
        let q = RatFunc::q();
        let compiled = e.compile(&q);
        for (m, i, n, j) in [(1, 0, 0, 1), (2, -3, 1, 4), (-2, 2, 3, -1)] {
            let lookup = |v: Var| -> Option<RatFunc> {
                Some(match v {
                    Var::M => RatFunc::from_rational(Rational::from_int(m)),
                    Var::I => RatFunc::from_rational(Rational::from_int(i)),
                    Var::N => RatFunc::from_rational(Rational::from_int(n)),
                    Var::J => RatFunc::from_rational(Rational::from_int(j)),
                    Var::Q => RatFunc::q(),
                })
            };
            assert_eq!(compiled.eval(m, i, n, j), e.eval(&lookup).unwrap());
        }
        assert_eq!(compiled.eval(1, 0, 0, 1), "-q - 1".parse::<RatFunc>().unwrap());
    }

    #[test]
    fn unbound_variable_reported() {
        let e = Expr::var(Var::Q);
        let lookup = |_: Var| -> Option<Rational> { None };
        assert_eq!(e.eval(&lookup), Err(Var::Q));
    }

    #[test]
    fn display_keeps_parentheses() {
        assert_eq!(block_coefficient().to_string(), "n*(i + q) - m*(j + q)");
    }
}
