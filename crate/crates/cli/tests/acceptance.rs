//! Acceptance gate: criteria 1-10, exact, one PASS/FAIL line each.
//!
//! Run with `cargo test -p blockalg-cli --test acceptance -- --nocapture` to see the lines.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Instant;

use blockalg::halfder::{build_constraints, builtin_map, check_map, stabilize, HalfDerError, MapDegree, NamedMap};
use blockalg::scalar::specialize_q;
use blockalg::specdsl::{builtin_algebra, parse_spec, print_spec, B_ALG, S_ALG};
use blockalg::tpverify::{builtin_tp, left_mult_map, verify_brackets_annihilate, verify_images_central, ProductTable, TpStructure};
use blockalg::{Algebra, BasisIndex, Parity, QMode, RatFunc, Rational, Window};
use blockalg_cli::{default_ladder, run, Outcome};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> (Outcome, Value) {
    let o = run(std::iter::once("blockalg").chain(args.iter().copied()));
    let v = serde_json::from_str(&o.stdout).unwrap_or(Value::Null);
    (o, v)
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).expect("write scratch file");
    path
}

fn q(s: &str) -> QMode {
    s.parse().expect("valid q")
}

fn win(s: &str) -> Window {
    s.parse().expect("valid window")
}

fn fixed(name: &str, mode: &str) -> Algebra<Rational> {
    Algebra::new(&builtin_algebra(name).unwrap(), &q(mode)).unwrap()
}

fn witness(report: &Value) -> Option<usize> {
    report["violations"].as_array()?.first()?["indices"].as_array().map(|a| a.len())
}

fn names(v: &Value) -> BTreeSet<String> {
    v["degrees"]
        .as_array()
        .into_iter()
        .flatten()
        .flat_map(|d| d["matched_names"].as_array().cloned().unwrap_or_default())
        .filter_map(|n| n.as_str().map(str::to_string))
        .collect()
}

fn degrees(v: &Value) -> BTreeSet<(i64, i64)> {
    v["degrees"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|d| (d["r"].as_i64().unwrap(), d["s"].as_i64().unwrap()))
        .collect()
}

fn set<T: Ord + Clone>(items: &[T]) -> BTreeSet<T> {
    items.iter().cloned().collect()
}

fn strings(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn jacobi_suites() -> Check {
    for (alg, w) in [("B", "4x4"), ("S", "3x3")] {
        let (o, v) = cli(&["verify-algebra", "--algebra", alg, "--q", "generic", "--window", w]);
        ensure(o.code == 0 && v["pass"] == true, || format!("{alg} generic on {w}: exit {}", o.code))?;
    }
    let mutants = [("B", B_ALG.replace("- m*(j+q)", "- m*(j+2)")), ("S", S_ALG.replace("(1/2)*q", "(1/3)*q"))];
    let mut found = Vec::new();
    for (alg, text) in mutants {
        let original = if alg == "B" { B_ALG } else { S_ALG };
        ensure(text != original, || format!("{alg} mutation did not apply"))?;
        let path = scratch(&format!("mutant_{alg}.alg"), &text);
        let (o, v) = cli(&["verify-algebra", "--spec", path.to_str().unwrap(), "--q", "generic", "--window", "3x3"]);
        ensure(o.code == 1, || format!("{alg} mutant: exit {}", o.code))?;
        ensure(witness(&v["jacobi"]) == Some(3), || format!("{alg} mutant: no Jacobi witness triple"))?;
        found.push(format!("{alg} mutant witness {}", v["jacobi"]["violations"][0]["indices"]));
    }
    Ok(format!("B generic 4x4 and S generic 3x3 pass; {}", found.join("; ")))
}

fn block_classification() -> Check {
    let mut summary = Vec::new();
    for mode in ["generic", "1/2", "7/3", "0", "1", "2", "3", "-2"] {
        let t = Instant::now();
        let (o, v) = cli(&["classify", "--algebra", "B", "--q", mode, "--shift", "even", "--bounds", "3,3", "--windows", "4x6,5x7"]);
        ensure(o.code == 0, || format!("q={mode}: exit {} {}", o.code, o.stderr))?;
        let integral = q(mode).fixed().and_then(|r| r.to_i64());
        let (dim, degs, matched) = match integral {
            None => (1, set(&[(0, 0)]), strings(&["id"])),
            Some(0) => (2, set(&[(0, 0)]), strings(&["id", "alpha"])),
            Some(k) => (2, set(&[(0, 0), (0, k)]), strings(&["id", "alpha"])),
        };
        ensure(v["total_dim"] == dim, || format!("q={mode}: total_dim {} != {dim}", v["total_dim"]))?;
        ensure(degrees(&v) == degs, || format!("q={mode}: degrees {:?}", degrees(&v)))?;
        ensure(names(&v) == matched, || format!("q={mode}: matched {:?}", names(&v)))?;
        ensure(v["warnings"].as_array().is_some_and(|w| w.is_empty()), || format!("q={mode}: warnings {}", v["warnings"]))?;
        ensure(t.elapsed().as_secs() < 60, || format!("q={mode}: took {:?}", t.elapsed()))?;
        summary.push(format!("{mode}:{dim}"));
    }
    Ok(format!("total dims {}", summary.join(" ")))
}

fn super_even_classification() -> Check {
    for (mode, dim, matched) in [("1", 1, vec!["id"]), ("2", 1, vec!["id"]), ("-3", 1, vec!["id"]), ("0", 3, vec!["id", "alpha", "beta"])] {
        let (o, v) = cli(&["classify", "--algebra", "S", "--q", mode, "--shift", "even", "--windows", "3x3,4x4,5x5"]);
        ensure(o.code == 0, || format!("q={mode}: exit {}", o.code))?;
        ensure(v["total_dim"] == dim, || format!("q={mode}: total_dim {}", v["total_dim"]))?;
        ensure(names(&v) == strings(&matched), || format!("q={mode}: matched {:?}", names(&v)))?;
    }
    Ok("dim 1 at q=1,2,-3; dim 3 = <id, alpha, beta> at q=0".into())
}

fn super_odd_classification() -> Check {
    let cases: [(&str, i64, Vec<(i64, i64)>, Vec<&str>); 6] = [
        ("1", 0, vec![], vec![]),
        ("3", 0, vec![], vec![]),
        ("-1", 0, vec![], vec![]),
        ("2", 1, vec![(0, 1)], vec!["gamma"]),
        ("-4", 1, vec![(0, -2)], vec!["gamma"]),
        ("0", 3, vec![(0, 0)], vec!["gamma", "delta", "epsilon"]),
    ];
    for (mode, dim, degs, matched) in cases {
        let t = Instant::now();
        let (o, v) = cli(&["classify", "--algebra", "S", "--q", mode, "--shift", "odd", "--windows", "4x7,5x8"]);
        ensure(o.code == 0, || format!("q={mode}: exit {}", o.code))?;
        ensure(v["total_dim"] == dim, || format!("q={mode}: total_dim {}", v["total_dim"]))?;
        ensure(degrees(&v) == set(&degs), || format!("q={mode}: degrees {:?}", degrees(&v)))?;
        ensure(names(&v) == strings(&matched), || format!("q={mode}: matched {:?}", names(&v)))?;
        ensure(t.elapsed().as_secs() < 60, || format!("q={mode}: took {:?}", t.elapsed()))?;
    }
    Ok("dim 0 at q=1,3,-1; gamma at (0,1) and (0,-2); <gamma, delta, epsilon> at q=0".into())
}

fn named_map_membership() -> Check {
    let windows: Vec<Window> = (1..=5).flat_map(|m| (1..=8).map(move |i| Window::new(m, i).unwrap())).collect();
    let cases = [
        ("B", NamedMap::Alpha, vec!["1", "2", "-2"]),
        ("S", NamedMap::Beta, vec!["0"]),
        ("S", NamedMap::Delta, vec!["0"]),
        ("S", NamedMap::Epsilon, vec!["0"]),
        ("S", NamedMap::Gamma, vec!["2", "-4"]),
    ];
    let mut checked = 0;
    for (alg_name, map, modes) in cases {
        for mode in modes {
            let alg = fixed(alg_name, mode);
            for w in &windows {
                let phi = builtin_map::<Rational>(map, &q(mode), w, alg.is_super()).map_err(|e| e.to_string())?;
                let r = check_map(&alg, &phi, w).map_err(|e| e.to_string())?;
                ensure(r.pass, || format!("{map} on {alg_name}({mode}) window {w} fails"))?;
                checked += 1;
            }
        }
    }
    let alpha = builtin_map::<Rational>(NamedMap::Alpha, &q("1/2"), &win("3x3"), false);
    ensure(matches!(alpha, Err(HalfDerError::IntegralityViolation { .. })), || format!("alpha at 1/2: {alpha:?}"))?;
    let gamma = builtin_map::<Rational>(NamedMap::Gamma, &q("1"), &win("3x3"), true);
    ensure(matches!(gamma, Err(HalfDerError::IntegralityViolation { .. })), || format!("gamma at 1: {gamma:?}"))?;
    for m in [NamedMap::Beta, NamedMap::Delta, NamedMap::Epsilon] {
        let r = builtin_map::<Rational>(m, &q("1"), &win("3x3"), true);
        ensure(matches!(r, Err(HalfDerError::WrongQ { .. })), || format!("{m} at 1: {r:?}"))?;
    }
    let transplanted = builtin_map::<Rational>(NamedMap::Alpha, &q("2"), &win("4x6"), false).unwrap();
    ensure(!check_map(&fixed("B", "3"), &transplanted, &win("4x6")).unwrap().pass, || "alpha(q=2) passes on B(3)".into())?;
    Ok(format!("{checked} map/window checks pass; alpha at 1/2 and gamma at 1 raise IntegralityViolation"))
}

fn ladder_for(alg: &Algebra<Rational>, shift: Parity) -> Vec<Window> {
    default_ladder(alg.is_super(), shift)
}

fn tp_suites() -> Check {
    let runs = [
        ("trivial", "B", "1"),
        ("block_thalg", "B", "1"),
        ("block_thalg", "B", "2"),
        ("block_thalg", "B", "-1"),
        ("super_full", "S", "0"),
        ("super_even", "S", "0"),
    ];
    for (structure, alg, mode) in runs {
        let (o, v) = cli(&["verify-tp", "--structure", structure, "--algebra", alg, "--q", mode, "--window", "4x6"]);
        ensure(o.code == 0 && v["pass"] == true, || format!("{structure} at q={mode}: exit {} {}", o.code, o.stderr))?;
    }
    let mut glavlem = 0;
    for (structure, alg_name, mode) in [("block_thalg", "B", "1"), ("block_thalg", "B", "2"), ("super_full", "S", "0"), ("super_even", "S", "0")] {
        let s: TpStructure = structure.parse().unwrap();
        let prod: ProductTable<Rational> = builtin_tp(s, &q(mode)).unwrap();
        let alg = fixed(alg_name, mode);
        for z in prod.support() {
            let lz = left_mult_map(&prod, &z, &win("3x3")).map_err(|e| e.to_string())?;
            let st = stabilize(&alg, lz.degree, &ladder_for(&alg, lz.degree.parity_shift)).map_err(|e| e.to_string())?;
            ensure(st.contains(&lz), || format!("{structure}: left multiplication by {z} not in the null space"))?;
            glavlem += 1;
        }
    }
    let l = |m, i| BasisIndex::even(m, i);
    let bad_image = ProductTable::<Rational>::new(false).with(l(0, -2), l(0, -2), blockalg::SparseVector::basis(l(1, 0)));
    let path = scratch("image_l10.json", &serde_json::to_string(&bad_image.to_json()).unwrap());
    let (o, v) = cli(&["verify-tp", "--json", path.to_str().unwrap(), "--q", "1", "--window", "4x6"]);
    ensure(o.code == 1, || format!("image L_{{1,0}}: exit {}", o.code))?;
    ensure(witness(&v["transposed_leibniz"]) == Some(3), || "image L_{1,0}: no witness triple".into())?;
    let g = BasisIndex::odd(0, 0);
    let c2 = ProductTable::<Rational>::new(true)
        .with(l(0, 0), l(0, 0), blockalg::SparseVector::basis(l(0, 0)))
        .with(l(0, 0), g, blockalg::SparseVector::term(g, Rational::from_int(2)));
    let path = scratch("c2_two.json", &serde_json::to_string(&c2.to_json()).unwrap());
    let (o, v) = cli(&["verify-tp", "--json", path.to_str().unwrap(), "--q", "0", "--window", "4x6"]);
    ensure(o.code == 1, || format!("c2=2: exit {}", o.code))?;
    ensure(witness(&v["associativity"]) == Some(3), || "c2=2: no associativity witness".into())?;
    Ok(format!("four built-ins pass on 4x6; {glavlem} left multiplications in the null space; both mutations fail with witnesses"))
}

fn centrality_invariants() -> Check {
    let mut checked = 0;
    for mode in ["1", "2"] {
        let alg = fixed("B", mode);
        let prod: ProductTable<Rational> = builtin_tp(TpStructure::BlockThalg, &q(mode)).unwrap();
        let central = verify_images_central(&alg, &prod, &win("5x7")).map_err(|e| e.to_string())?;
        let annihilate = verify_brackets_annihilate(&alg, &prod, &win("5x7")).map_err(|e| e.to_string())?;
        ensure(central.pass, || format!("q={mode}: image not central"))?;
        ensure(annihilate.pass, || format!("q={mode}: bracket hits the support"))?;
        checked += central.checked + annihilate.checked;
    }
    Ok(format!("{checked} checks on 5x7 at q=1,2"))
}

fn hom_lie() -> Check {
    for map in ["id", "alpha", "id + alpha"] {
        let (o, v) = cli(&["hom-check", "--algebra", "B", "--q", "2", "--map", map, "--window", "4x6"]);
        ensure(o.code == 0 && v["pass"] == true, || format!("B(2) {map}: exit {}", o.code))?;
    }
    let (o, _) = cli(&["hom-check", "--algebra", "S", "--q", "2", "--map", "gamma", "--window", "3x5"]);
    ensure(o.code == 0, || format!("S(2) gamma: exit {}", o.code))?;
    let (o, v) = cli(&["hom-check", "--algebra", "B", "--q", "2", "--map", "shift", "--window", "3x3"]);
    ensure(o.code == 1, || format!("shift: exit {}", o.code))?;
    ensure(witness(&v) == Some(3), || "shift: no witness triple".into())?;
    Ok(format!("id, alpha, id+alpha on B(2) 4x6 and gamma on S(2) 3x5 pass; shift fails at {}", v["violations"][0]["indices"]))
}

fn specialization_consistency() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let w = win("3x3");
    let mut compared = 0;
    for _ in 0..20 {
        let name = if rng.gen_bool(0.5) { "B" } else { "S" };
        let parity = if name == "S" && rng.gen_bool(0.5) { Parity::Odd } else { Parity::Even };
        let deg = MapDegree::new(parity, rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        let spec = builtin_algebra(name).unwrap();
        let generic: Algebra<RatFunc> = Algebra::new(&spec, &QMode::Generic).unwrap();
        let gsys = build_constraints(&generic, deg, &w).map_err(|e| e.to_string())?;
        for q0 in [0, 1, 2, 5] {
            let r0 = Rational::from_int(q0);
            let fsys = build_constraints(&fixed(name, &q0.to_string()), deg, &w).map_err(|e| e.to_string())?;
            ensure(gsys.unknowns == fsys.unknowns, || format!("{name} {deg}: unknowns differ"))?;
            let special: BTreeMap<_, Vec<(usize, Rational)>> = gsys
                .rows
                .iter()
                .map(|r| {
                    let coeffs = r
                        .coeffs
                        .iter()
                        .map(|(k, c)| (*k, specialize_q(c, &r0).expect("polynomial entries")))
                        .filter(|(_, c)| !c.is_zero())
                        .collect::<Vec<_>>();
                    (r.origin, coeffs)
                })
                .filter(|(_, c)| !c.is_empty())
                .collect();
            let direct: BTreeMap<_, Vec<(usize, Rational)>> = fsys.rows.iter().map(|r| (r.origin, r.coeffs.clone())).collect();
            ensure(special == direct, || format!("{name} {deg} q0={q0}: matrices differ"))?;
            compared += direct.values().map(Vec::len).sum::<usize>();
        }
    }
    Ok(format!("20 degrees x 4 values of q0, {compared} entries equal"))
}

fn parser_oracle() -> Check {
    let w = win("3x3");
    for (name, text) in [("B", B_ALG), ("S", S_ALG)] {
        let parsed = parse_spec(text).map_err(|e| e.to_string())?;
        let builtin = builtin_algebra(name).unwrap();
        for mode in [QMode::Generic, q("0"), q("3"), q("-5/2")] {
            let compare = |a: &dyn Fn(&BasisIndex, &BasisIndex) -> String, b: &dyn Fn(&BasisIndex, &BasisIndex) -> String| {
                let basis = w.basis(builtin.is_super);
                basis.iter().flat_map(|x| basis.iter().map(move |y| (*x, *y))).find(|(x, y)| a(x, y) != b(x, y))
            };
            let diff = if mode.is_generic() {
                let p: Algebra<RatFunc> = Algebra::new(&parsed, &mode).unwrap();
                let b: Algebra<RatFunc> = Algebra::new(&builtin, &mode).unwrap();
                compare(&|x, y| p.bracket_basis(x, y).unwrap().to_string(), &|x, y| b.bracket_basis(x, y).unwrap().to_string())
            } else {
                let p: Algebra<Rational> = Algebra::new(&parsed, &mode).unwrap();
                let b: Algebra<Rational> = Algebra::new(&builtin, &mode).unwrap();
                compare(&|x, y| p.bracket_basis(x, y).unwrap().to_string(), &|x, y| b.bracket_basis(x, y).unwrap().to_string())
            };
            ensure(diff.is_none(), || format!("{name} q={mode}: bracket differs at {diff:?}"))?;
        }
        let reparsed = parse_spec(&print_spec(&parsed)).map_err(|e| e.to_string())?;
        ensure(reparsed == parsed, || format!("{name}: print/parse round trip changed the spec"))?;
        ensure(parsed == builtin, || format!("{name}: parsed file differs from the built-in"))?;
    }
    Ok("B.alg and S.alg match the built-ins on 3x3 (generic, 0, 3, -5/2); round trip exact".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("Jacobi suites", jacobi_suites),
        ("B(q) half-derivations", block_classification),
        ("S(q) even half-superderivations", super_even_classification),
        ("S(q) odd half-superderivations", super_odd_classification),
        ("named-map membership", named_map_membership),
        ("transposed Poisson suites", tp_suites),
        ("centrality and annihilator", centrality_invariants),
        ("Hom-Lie", hom_lie),
        ("specialization consistency", specialization_consistency),
        ("parser oracle", parser_oracle),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1}s): {detail}", k + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL {name} ({secs:.1}s): {why}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
