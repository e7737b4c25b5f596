use blockalg::scalar::specialize_q;
use blockalg::specdsl::builtin_algebra;
use blockalg::{Algebra, BasisIndex, Field, Parity, QMode, RatFunc, Rational};
use proptest::prelude::*;

fn alg<F: blockalg::scalar::ParamField>(name: &str, mode: &QMode) -> Algebra<F> {
    Algebra::new(&builtin_algebra(name).unwrap(), mode).unwrap()
}

fn index(is_super: bool) -> impl Strategy<Value = BasisIndex> {
    let parity = if is_super { prop_oneof![Just(Parity::Even), Just(Parity::Odd)].boxed() } else { Just(Parity::Even).boxed() };
    (parity, -6i64..=6, -6i64..=6).prop_map(|(p, m, i)| BasisIndex::new(p, m, i))
}

fn name_and_pair() -> impl Strategy<Value = (&'static str, BasisIndex, BasisIndex)> {
    prop_oneof![Just(("B", false)), Just(("S", true))]
        .prop_flat_map(|(n, s)| (Just(n), index(s), index(s)))
}

proptest! {
    #[test]
    fn brackets_are_graded((name, x, y) in name_and_pair(), q in -4i64..=4) {
        let a: Algebra<Rational> = alg(name, &QMode::Fixed(Rational::from_int(q)));
        let v = a.bracket_basis(&x, &y).unwrap();
        prop_assert!(v.len() <= 1);
        for (z, _) in v.iter() {
            prop_assert_eq!(*z, BasisIndex::new(x.parity.plus(y.parity), x.m + y.m, x.i + y.i));
        }
    }

    #[test]
    fn specialization_commutes_with_bracket((name, x, y) in name_and_pair(), p in -9i64..=9, d in 1i64..=4) {
        let q0 = Rational::new(p, d).unwrap();
        let generic: Algebra<RatFunc> = alg(name, &QMode::Generic);
        let fixed: Algebra<Rational> = alg(name, &QMode::Fixed(q0.clone()));
        let (cg, zg) = generic.bracket_coeff(&x, &y).unwrap();
        let (cf, zf) = fixed.bracket_coeff(&x, &y).unwrap();
        prop_assert_eq!(zg, zf);
        prop_assert_eq!(specialize_q(&cg, &q0).unwrap(), cf);
    }

    #[test]
    fn bracket_symmetry((name, x, y) in name_and_pair()) {
        let a: Algebra<RatFunc> = alg(name, &QMode::Generic);
        let sign = -Parity::sign(x.parity, y.parity);
        let xy = a.bracket_basis(&x, &y).unwrap();
        let yx = a.bracket_basis(&y, &x).unwrap();
        prop_assert_eq!(xy, yx.scale(&RatFunc::from_int(sign)));
    }

    #[test]
    fn l_0_minus_q_is_central(is_super in any::<bool>(), y in index(true), q in -5i64..=5) {
        let name = if is_super { "S" } else { "B" };
        let y = if is_super { y } else { BasisIndex::even(y.m, y.i) };
        let a: Algebra<Rational> = alg(name, &QMode::Fixed(Rational::from_int(q)));
        prop_assert!(a.bracket_basis(&BasisIndex::even(0, -q), &y).unwrap().is_zero());
    }

    #[test]
    fn block_brackets_never_reach_0_minus_2q(m in -6i64..=6, i in -6i64..=6, q in -4i64..=4) {
        let a: Algebra<Rational> = alg("B", &QMode::Fixed(Rational::from_int(q)));
        let x = BasisIndex::even(m, i);
        let y = BasisIndex::even(-m, -2 * q - i);
        prop_assert!(a.bracket_coeff(&x, &y).unwrap().0.is_zero());
    }
}

#[test]
fn jacobi_holds_on_3x3() {
    let w = "3x3".parse().unwrap();
    for name in ["B", "S"] {
        for mode in [QMode::Fixed(Rational::from_int(-1)), QMode::Fixed(Rational::new(1, 3).unwrap())] {
            let a: Algebra<Rational> = alg(name, &mode);
            assert!(a.verify_antisymmetry(&w).unwrap().pass);
            assert!(a.verify_jacobi(&w).unwrap().pass, "{name} at {mode}");
        }
    }
}
