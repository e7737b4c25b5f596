use blockalg::halfder::{builtin_map, check_map, GradedMap, NamedMap};
use blockalg::homlie::{hom_jacobi_check, MapExpr, MapSum};
use blockalg::specdsl::builtin_algebra;
use blockalg::tpverify::{builtin_tp, left_mult_map, verify_associative, verify_transposed_leibniz, TpStructure};
use blockalg::{Algebra, QMode, Rational, Window};
use proptest::prelude::*;

fn alg(name: &str, mode: &QMode) -> Algebra<Rational> {
    Algebra::new(&builtin_algebra(name).unwrap(), mode).unwrap()
}

fn fixed(q: i64) -> QMode {
    QMode::Fixed(Rational::from_int(q))
}

#[test]
fn left_multiplications_of_tp_structures_are_half_derivations() {
    let w: Window = "3x3".parse().unwrap();
    for (structure, q) in [
        (TpStructure::BlockThalg, 1),
        (TpStructure::BlockThalg, -2),
        (TpStructure::SuperFull, 0),
        (TpStructure::SuperEven, 0),
    ] {
        let mode = fixed(q);
        let name = if structure == TpStructure::BlockThalg { "B" } else { "S" };
        let a = alg(name, &mode);
        let prod = builtin_tp::<Rational>(structure, &mode).unwrap();
        assert!(verify_associative(&prod, &w).pass, "{structure}");
        assert!(verify_transposed_leibniz(&a, &prod, &w).unwrap().pass, "{structure}");
        for z in prod.support() {
            let lz = left_mult_map(&prod, &z, &w).unwrap();
            assert!(check_map(&a, &lz, &w).unwrap().pass, "{structure} L_{z}");
        }
    }
}

#[test]
fn gamma_is_hom_lie_on_super_at_even_q() {
    let w: Window = "3x3".parse().unwrap();
    for q in [-2, 2, 4] {
        let mode = fixed(q);
        let s = alg("S", &mode);
        let g: GradedMap<Rational> = builtin_map(NamedMap::Gamma, &mode, &w.doubled(), true).unwrap();
        assert!(hom_jacobi_check(&s, &MapSum::from(g), &w).unwrap().pass, "q={q}");
    }
}

#[test]
fn shift_is_not_hom_lie() {
    let w: Window = "2x2".parse().unwrap();
    let mode = fixed(1);
    let b = alg("B", &mode);
    let phi: MapSum<Rational> = "shift".parse::<MapExpr>().unwrap().build(&mode, &w.doubled(), false).unwrap();
    assert!(!hom_jacobi_check(&b, &phi, &w).unwrap().pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn id_alpha_combinations_are_hom_lie(a in -4i64..=4, c in 1i64..=4, q in -2i64..=2) {
        let mode = fixed(q);
        let b = alg("B", &mode);
        let w: Window = "2x2".parse().unwrap();
        let expr: MapExpr = format!("{a}*id + {c}*alpha").parse().unwrap();
        let phi: MapSum<Rational> = expr.build(&mode, &w.doubled(), false).unwrap();
        prop_assert!(hom_jacobi_check(&b, &phi, &w).unwrap().pass);
    }
}
