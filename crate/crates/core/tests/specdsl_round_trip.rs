use blockalg::algebra::{BracketRule, Symmetry};
use blockalg::specdsl::{builtin_algebra, parse_expr, parse_spec, print_spec, Expr, Var, B_ALG, S_ALG};
use blockalg::{Algebra, AlgebraSpec, Parity, QMode, RatFunc, Rational, Window};
use proptest::prelude::*;

fn leaf() -> BoxedStrategy<Expr> {
    prop_oneof![
        (0i64..20).prop_map(Expr::int),
        (1i64..9, 1i64..9).prop_map(|(p, q)| Expr::ratio(p, q)),
        prop::sample::select(vec![Var::M, Var::I, Var::N, Var::J, Var::Q]).prop_map(Expr::var),
    ]
    .boxed()
}

// Trees the parser can produce: left-associative sums of products, with
// parentheses kept as explicit nodes.
fn expr(depth: u32) -> BoxedStrategy<Expr> {
    if depth == 0 {
        return leaf();
    }
    let factor = prop_oneof![
        3 => leaf(),
        1 => expr(depth - 1).prop_map(Expr::paren),
        1 => leaf().prop_map(Expr::neg),
    ]
    .boxed();
    let term = prop::collection::vec(factor, 1..3)
        .prop_map(|fs| fs.into_iter().reduce(Expr::mul).unwrap())
        .boxed();
    (term.clone(), prop::collection::vec((any::<bool>(), term), 0..3))
        .prop_map(|(first, rest)| {
            rest.into_iter().fold(first, |acc, (plus, t)| if plus { Expr::add(acc, t) } else { Expr::sub(acc, t) })
        })
        .boxed()
}

fn spec() -> impl Strategy<Value = AlgebraSpec> {
    (any::<bool>(), expr(2), expr(2), expr(2)).prop_map(|(is_super, a, b, c)| {
        let rule = |left, right, coefficient| BracketRule { left, right, symmetry: Symmetry::required(left, right), coefficient };
        let mut rules = vec![rule(Parity::Even, Parity::Even, a)];
        if is_super {
            rules.push(rule(Parity::Even, Parity::Odd, b));
            rules.push(rule(Parity::Odd, Parity::Odd, c));
        }
        AlgebraSpec { name: "T".into(), is_super, rules }
    })
}

proptest! {
    #[test]
    fn expressions_round_trip(e in expr(3)) {
        prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn specs_round_trip(s in spec()) {
        prop_assert_eq!(parse_spec(&print_spec(&s)).unwrap(), s);
    }
}

#[test]
fn shipped_files_match_builtins_on_3x3() {
    let w: Window = "3x3".parse().unwrap();
    for (name, text) in [("B", B_ALG), ("S", S_ALG)] {
        let parsed = parse_spec(text).unwrap();
        let builtin = builtin_algebra(name).unwrap();
        let basis = w.basis(builtin.is_super);
        let p: Algebra<RatFunc> = Algebra::new(&parsed, &QMode::Generic).unwrap();
        let b: Algebra<RatFunc> = Algebra::new(&builtin, &QMode::Generic).unwrap();
        for x in &basis {
            for y in &basis {
                assert_eq!(p.bracket_basis(x, y).unwrap(), b.bracket_basis(x, y).unwrap());
            }
        }
        let mode = QMode::Fixed(Rational::new(-3, 2).unwrap());
        let p: Algebra<Rational> = Algebra::new(&parsed, &mode).unwrap();
        let b: Algebra<Rational> = Algebra::new(&builtin, &mode).unwrap();
        for x in &basis {
            for y in &basis {
                assert_eq!(p.bracket_basis(x, y).unwrap(), b.bracket_basis(x, y).unwrap());
            }
        }
    }
}
