//! Hom-Jacobi checks for twisting maps built from the named ½-derivations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, BasisIndex, Parity, SparseVector, Window};
use crate::halfder::{builtin_map, GradedMap, HalfDerError, MapDegree, NamedMap};
use crate::report::{par_map, ReportBuilder, VerificationReport, Violation};
use crate::scalar::{Field, QMode, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomLieError {
    #[error("map expression, column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error(transparent)]
    Map(#[from] HalfDerError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A summand of a map expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapTerm {
    Named(NamedMap),
    /// `L_{m,i} ↦ L_{m+1,i}` (and `G_{m,i} ↦ G_{m+1,i}`).
    Shift,
}

impl MapTerm {
    fn name(self) -> &'static str {
        match self {
            MapTerm::Named(n) => n.name(),
            MapTerm::Shift => "shift",
        }
    }
}

/// A rational linear combination such as `id + alpha` or `2*id - 1/2*alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapExpr {
    pub terms: Vec<(Rational, MapTerm)>,
}

impl FromStr for MapExpr {
    type Err = HomLieError;
    fn from_str(s: &str) -> Result<Self, HomLieError> {
        let err = |column: usize, message: String| HomLieError::Parse { column: column + 1, message };
        let bytes = s.as_bytes();
        let mut pos = 0;
        let skip = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let mut terms = Vec::new();
        loop {
            skip(&mut pos);
            let mut negative = false;
            if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
                if terms.is_empty() && bytes[pos] == b'+' {
                    return Err(err(pos, "expected a term".into()));
                }
                negative = bytes[pos] == b'-';
                pos += 1;
                skip(&mut pos);
            } else if !terms.is_empty() {
                return Err(err(pos, "expected '+' or '-'".into()));
            }
            let mut coef = Rational::one();
            let start = pos;
            while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'/') {
                pos += 1;
            }
            if pos > start {
                coef = s[start..pos].parse().map_err(|_| err(start, format!("bad coefficient {:?}", &s[start..pos])))?;
                skip(&mut pos);
                if pos < bytes.len() && bytes[pos] == b'*' {
                    pos += 1;
                    skip(&mut pos);
                }
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_alphabetic() {
                pos += 1;
            }
            let word = &s[start..pos];
            let term = match word {
                "" => return Err(err(start, "expected a map name".into())),
                "shift" => MapTerm::Shift,
                w => MapTerm::Named(w.parse().map_err(|_| {
                    err(start, format!("unknown map {w:?} (expected id, alpha, beta, gamma, delta, epsilon or shift)"))
                })?),
            };
            terms.push((if negative { coef.neg() } else { coef }, term));
            skip(&mut pos);
            if pos == bytes.len() {
                return Ok(MapExpr { terms });
            }
        }
    }
}

impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (c, t)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", c.neg()) } else { ("+", c.clone()) };
            match (k, sign) {
                (0, "+") => {}
                (0, _) => f.write_str("-")?,
                _ => write!(f, " {sign} ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            f.write_str(t.name())?;
        }
        Ok(())
    }
}

impl MapExpr {
    /// Tabulates the combination on `w` for an algebra with the given mode.
    pub fn build<F: Field>(&self, mode: &QMode, w: &Window, is_super: bool) -> Result<MapSum<F>, HomLieError> {
        let mut parts = Vec::new();
        for (c, t) in &self.terms {
            let map = match t {
                MapTerm::Named(n) => builtin_map::<F>(*n, mode, w, is_super)?,
                MapTerm::Shift => {
                    let mut m = GradedMap::new(MapDegree::even(1, 0));
                    for x in w.basis(is_super) {
                        m.set(x, F::one());
                    }
                    m
                }
            };
            parts.push(map.scaled(&F::from_rational(c)));
        }
        Ok(MapSum::from_maps(parts))
    }
}

/// A sum of homogeneous maps, one per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapSum<F> {
    pub components: Vec<GradedMap<F>>,
}

impl<F: Field> MapSum<F> {
    pub fn from_maps(maps: impl IntoIterator<Item = GradedMap<F>>) -> Self {
        let mut by_degree: BTreeMap<MapDegree, GradedMap<F>> = BTreeMap::new();
        for m in maps {
            let acc = by_degree.entry(m.degree).or_insert_with(|| GradedMap::new(m.degree));
            for (x, d) in &m.table {
                let v = acc.d(x).add(d);
                acc.set(*x, v);
            }
        }
        MapSum { components: by_degree.into_values().filter(|m| !m.is_zero()).collect() }
    }

    pub fn image(&self, x: &BasisIndex) -> SparseVector<F> {
        self.components.iter().filter_map(|m| m.image(x)).map(|(d, t)| (t, d)).collect()
    }
}

impl<F: Field> From<GradedMap<F>> for MapSum<F> {
    fn from(m: GradedMap<F>) -> Self {
        MapSum::from_maps([m])
    }
}

/// Checks the cyclic identity
/// `(-1)^{|x||z|}[φ(x),[y,z]] + (-1)^{|y||x|}[φ(y),[z,x]] + (-1)^{|z||y|}[φ(z),[x,y]] = 0`
/// for all basis triples of `w`. The variant with middle term `[φ(y),[z,y]]` is also
/// evaluated and its outcome recorded in the notes; it does not affect `pass`.
pub fn hom_jacobi_check<F: Field>(alg: &Algebra<F>, map: &MapSum<F>, w: &Window) -> Result<VerificationReport, HomLieError> {
    alg.check_parities()?;
    if !alg.is_super() && map.components.iter().any(|m| m.degree.parity_shift == Parity::Odd) {
        return Err(HalfDerError::OddMapOnNonSuper(alg.spec().name.clone()).into());
    }
    let basis = w.basis(alg.is_super());
    let n = basis.len();
    let inner: Vec<(F, BasisIndex)> =
        basis.iter().flat_map(|a| basis.iter().map(move |b| (a, b))).map(|(a, b)| alg.bracket_coeff(a, b).expect("parities checked")).collect();
    let images: Vec<Vec<Option<(F, BasisIndex)>>> =
        map.components.iter().map(|m| basis.iter().map(|x| m.image(x)).collect()).collect();
    let mut targets: Vec<BasisIndex> = images.iter().flatten().flatten().map(|(_, t)| *t).collect();
    targets.sort();
    targets.dedup();
    let outer = alg.cache(&targets, &w.doubled().basis(alg.is_super()));
    let cyclic = |img: &[Option<(F, BasisIndex)>], a: usize, b: usize, c: usize, sign: i64| -> Option<(F, BasisIndex)> {
        let (d, t) = img[a].as_ref()?;
        let (cbc, bc) = &inner[b * n + c];
        if cbc.is_zero() {
            return None;
        }
        let (ct, out) = outer.get(t, bc);
        if ct.is_zero() {
            return None;
        }
        Some((d.mul(cbc).mul(&ct).scale_int(sign), out))
    };
    let rows: Vec<usize> = (0..n).collect();
    let parts = par_map(&rows, |&x| {
        let mut b = ReportBuilder::new();
        let mut literal_failures = 0u64;
        let mut first_literal = None;
        for y in 0..n {
            for z in 0..n {
                b.checked += 1;
                let (px, py, pz) = (basis[x].parity, basis[y].parity, basis[z].parity);
                let (sxz, syx, szy) = (Parity::sign(px, pz), Parity::sign(py, px), Parity::sign(pz, py));
                let mut standard_ok = true;
                let mut literal_ok = true;
                for img in &images {
                    if img[x].is_none() && img[y].is_none() && img[z].is_none() {
                        continue;
                    }
                    let t1 = cyclic(img, x, y, z, sxz);
                    let t3 = cyclic(img, z, x, y, szy);
                    let mut ends = SparseVector::zero();
                    for (c, out) in t1.iter().chain(t3.iter()) {
                        ends.add_term(*out, c.clone());
                    }
                    let mut standard = ends.clone();
                    if let Some((c, out)) = cyclic(img, y, z, x, syx) {
                        standard.add_term(out, c);
                    }
                    let mut literal = ends;
                    if let Some((c, out)) = cyclic(img, y, z, y, syx) {
                        literal.add_term(out, c);
                    }
                    standard_ok &= standard.is_zero();
                    literal_ok &= literal.is_zero();
                }
                if !standard_ok && b.saturated() {
                    b.push(Violation { indices: vec![], lhs: String::new(), rhs: String::new() });
                } else if !standard_ok {
                    let (bx, by, bz) = (basis[x], basis[y], basis[z]);
                    let lhs: SparseVector<F> = map
                        .components
                        .iter()
                        .flat_map(|m| {
                            let phi = MapSum::from(m.clone());
                            let term = |a: &BasisIndex, u: &BasisIndex, v: &BasisIndex, s: i64| {
                                let inner = alg.bracket_basis(u, v).expect("parities checked");
                                alg.bracket_vec(&phi.image(a), &inner).expect("parities checked").scale(&F::from_int(s))
                            };
                            let sum = term(&bx, &by, &bz, sxz).plus(&term(&by, &bz, &bx, syx)).plus(&term(&bz, &bx, &by, szy));
                            sum.iter().map(|(k, c)| (*k, c.clone())).collect::<Vec<_>>()
                        })
                        .collect();
                    b.push(Violation { indices: vec![bx, by, bz], lhs: lhs.to_string(), rhs: "0".into() });
                }
                if !literal_ok {
                    literal_failures += 1;
                    first_literal.get_or_insert([basis[x], basis[y], basis[z]]);
                }
            }
        }
        (b, literal_failures, first_literal)
    });
    let mut b = ReportBuilder::new();
    let mut literal_failures = 0;
    let mut first_literal = None;
    for (part, k, first) in parts {
        b.merge(part);
        literal_failures += k;
        first_literal = first_literal.or(first);
    }
    let mut report = b.finish();
    report.notes.push(match first_literal {
        None => "literal middle term [φ(y),[z,y]]: holds on all triples".to_string(),
        Some([x, y, z]) => format!(
            "literal middle term [φ(y),[z,y]]: fails on {literal_failures} triples, first ({x}, {y}, {z})"
        ),
    });
    Ok(report)
}
