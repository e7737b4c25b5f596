//! The `.alg` algebra-definition language.
//!
//! ```text
//! # comment
//! algebra S
//! super true
//! rule even even antisymmetric: n*(i+q) - m*(j+q)
//! rule even odd antisymmetric: n*(i+q) - m*(j + (1/2)*q)
//! rule odd odd symmetric: 2*q
//! ```

mod expr;
mod parser;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

pub use expr::{CompiledExpr, Expr, Var};

use crate::algebra::{AlgebraSpec, BracketRule, Parity, Symmetry};
use crate::scalar::{Field, RatFunc, Rational, Scalar};

pub const B_ALG: &str = include_str!("../../specs/B.alg");
pub const S_ALG: &str = include_str!("../../specs/S.alg");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: expected {}, found {found}", expected.join(" or "))]
    Parse { line: usize, column: usize, expected: Vec<String>, found: String },
    #[error("line {line}, column {column}: unknown variable {name:?} (allowed: m, i, n, j, q)")]
    UnknownVariable { line: usize, column: usize, name: String },
    #[error("line {line}: duplicate rule for ({left}, {right}), first given on line {first}")]
    DuplicateRule { line: usize, first: usize, left: Parity, right: Parity },
    #[error("line {line}: rule ({left}, {right}) must be {}, not {declared}", Symmetry::required(*left, *right).name())]
    SymmetryMismatch { line: usize, left: Parity, right: Parity, declared: &'static str },
    #[error("line {line}: rule ({left}, {right}) needs an odd part; declare `super true`")]
    UndeclaredParity { line: usize, left: Parity, right: Parity },
    #[error("missing rule for parity pair ({left}, {right})")]
    MissingRule { left: Parity, right: Parity },
    #[error("missing `{0}` header line")]
    MissingHeader(&'static str),
    #[error("unknown algebra {0:?} (built-ins: B, S)")]
    UnknownAlgebra(String),
    #[error("variable {0} is unbound")]
    UnboundVariable(&'static str),
}

pub fn parse_spec(text: &str) -> Result<AlgebraSpec, SpecError> {
    parser::parse_spec(text)
}

/// Parses a single coefficient expression.
pub fn parse_expr(text: &str) -> Result<Expr, SpecError> {
    parser::parse_expr_at(text, 1, 1)
}

/// Canonical text form; `parse_spec(&print_spec(s)) == s`.
pub fn print_spec(spec: &AlgebraSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "algebra {}", spec.name);
    let _ = writeln!(out, "super {}", spec.is_super);
    for r in &spec.rules {
        let _ = writeln!(out, "rule {} {} {}: {}", r.left, r.right, r.symmetry.name(), r.coefficient);
    }
    out
}

/// Evaluates at integer or rational bindings. In generic mode `q` stays formal;
/// in fixed mode it must be bound.
pub fn eval_expr(e: &Expr, bindings: &BTreeMap<Var, Rational>, generic: bool) -> Result<Scalar, SpecError> {
    let unbound = |v: Var| SpecError::UnboundVariable(v.name());
    if generic {
        let lookup = |v: Var| match v {
            Var::Q => Some(RatFunc::q()),
            _ => bindings.get(&v).map(|r| RatFunc::from_rational(r.clone())),
        };
        e.eval(&lookup).map(|x| x.to_scalar()).map_err(unbound)
    } else {
        let lookup = |v: Var| bindings.get(&v).cloned();
        e.eval(&lookup).map(|x: Rational| x.to_scalar()).map_err(unbound)
    }
}

fn v(x: Var) -> Expr {
    Expr::var(x)
}

/// `n*(i+q) - m*(j+q)`
fn block_coefficient() -> Expr {
    Expr::sub(
        Expr::mul(v(Var::N), Expr::paren(Expr::add(v(Var::I), v(Var::Q)))),
        Expr::mul(v(Var::M), Expr::paren(Expr::add(v(Var::J), v(Var::Q)))),
    )
}

/// `n*(i+q) - m*(j + (1/2)*q)`
fn even_odd_coefficient() -> Expr {
    Expr::sub(
        Expr::mul(v(Var::N), Expr::paren(Expr::add(v(Var::I), v(Var::Q)))),
        Expr::mul(
            v(Var::M),
            Expr::paren(Expr::add(v(Var::J), Expr::mul(Expr::paren(Expr::ratio(1, 2)), v(Var::Q)))),
        ),
    )
}

pub fn builtin_algebra(name: &str) -> Result<AlgebraSpec, SpecError> {
    let rule = |left, right, coefficient| BracketRule {
        left,
        right,
        symmetry: Symmetry::required(left, right),
        coefficient,
    };
    match name {
        "B" => Ok(AlgebraSpec {
            name: "B".into(),
            is_super: false,
            rules: vec![rule(Parity::Even, Parity::Even, block_coefficient())],
        }),
        "S" => Ok(AlgebraSpec {
            name: "S".into(),
            is_super: true,
            rules: vec![
                rule(Parity::Even, Parity::Even, block_coefficient()),
                rule(Parity::Even, Parity::Odd, even_odd_coefficient()),
                rule(Parity::Odd, Parity::Odd, Expr::mul(Expr::int(2), v(Var::Q))),
            ],
        }),
        other => Err(SpecError::UnknownAlgebra(other.to_string())),
    }
}

/// A built-in name or the contents of a `.alg` file.
pub fn load_algebra(name_or_text: &str) -> Result<AlgebraSpec, SpecError> {
    match name_or_text {
        "B" | "S" => builtin_algebra(name_or_text),
        text => parse_spec(text),
    }
}
