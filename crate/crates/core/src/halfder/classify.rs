use serde::{Serialize, Serializer};

use std::collections::HashMap;

use super::constraints::solve;
use super::linalg::{rref, span_contains, span_intersection, SparseRow};
use super::{builtin_map, GradedMap, HalfDerError, MapDegree, NamedMap};
use crate::algebra::{Algebra, AlgebraError, BasisIndex, Parity, Window};
use crate::report::par_map;
use crate::scalar::{Field, QMode};

/// Solution space of one degree after intersecting restrictions from nested windows.
#[derive(Clone, Debug)]
pub struct Stabilized<F> {
    pub degree: MapDegree,
    pub window: Window,
    pub unknowns: Vec<BasisIndex>,
    /// RREF basis over `unknowns`.
    pub basis: Vec<SparseRow<F>>,
    /// Dimension of each window's null space restricted to the smallest window.
    pub restricted_dims: Vec<usize>,
    pub warning: Option<String>,
}

impl<F: Field> Stabilized<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn maps(&self) -> Vec<GradedMap<F>> {
        self.basis
            .iter()
            .map(|v| {
                let mut m = GradedMap::new(self.degree);
                for (c, x) in v {
                    m.set(self.unknowns[*c], x.clone());
                }
                m
            })
            .collect()
    }

    /// Whether the map, restricted to the smallest window, lies in the stable space.
    pub fn contains(&self, map: &GradedMap<F>) -> bool {
        if map.degree != self.degree {
            return map.restrict(&self.window).is_zero();
        }
        let v: SparseRow<F> = self
            .unknowns
            .iter()
            .enumerate()
            .filter_map(|(c, x)| map.table.get(x).map(|d| (c, d.clone())))
            .collect();
        span_contains(&self.basis, &v)
    }
}

fn check_ladder(windows: &[Window]) -> Result<(), HalfDerError> {
    let bad = |msg: String| HalfDerError::Algebra(AlgebraError::InvalidWindow(msg));
    if windows.is_empty() {
        return Err(bad("empty window ladder".into()));
    }
    for pair in windows.windows(2) {
        if !pair[0].is_within(&pair[1]) {
            return Err(bad(format!("ladder must be nested: {} is not inside {}", pair[0], pair[1])));
        }
    }
    Ok(())
}

pub fn stabilize<F: Field>(alg: &Algebra<F>, deg: MapDegree, windows: &[Window]) -> Result<Stabilized<F>, HalfDerError> {
    check_ladder(windows)?;
    let small = windows[0];
    let base = small.basis(alg.is_super());
    let column: HashMap<BasisIndex, usize> = base.iter().enumerate().map(|(k, x)| (*x, k)).collect();
    let n = base.len();
    let mut restricted_dims = Vec::with_capacity(windows.len());
    let mut acc: Option<Vec<SparseRow<F>>> = None;
    for w in windows {
        let (unknowns, ns) = solve(alg, deg, w)?;
        let projected: Vec<SparseRow<F>> = ns
            .vectors
            .iter()
            .map(|v| v.iter().filter_map(|(c, x)| column.get(&unknowns[*c]).map(|k| (*k, x.clone()))).collect())
            .collect();
        let mut projected = projected;
        for v in &mut projected {
            v.sort_by_key(|(k, _)| *k);
        }
        let span = rref(n, &projected);
        restricted_dims.push(span.len());
        acc = Some(match acc {
            None => span,
            Some(prev) => span_intersection(n, &prev, &span),
        });
    }
    let warning = match restricted_dims.as_slice() {
        [.., a, b] if a != b => Some(format!(
            "degree {deg}: restricted dimension went from {a} to {b} between the last two windows"
        )),
        _ => None,
    };
    Ok(Stabilized {
        degree: deg,
        window: small,
        unknowns: base,
        basis: acc.unwrap_or_default(),
        restricted_dims,
        warning,
    })
}

/// One `(parity, m, i, d)` entry of a basis table; serializes as `[parity, m, i, "d"]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub x: BasisIndex,
    pub value: String,
}

impl Serialize for TableEntry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.x.parity, self.x.m, self.x.i, &self.value).serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub r: i64,
    pub s: i64,
    pub stable_dim: usize,
    pub matched_names: Vec<String>,
    pub basis_tables: Vec<Vec<TableEntry>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub algebra: String,
    pub q: QMode,
    pub parity_shift: Parity,
    pub windows: Vec<Window>,
    pub degrees: Vec<DegreeReport>,
    pub total_dim: usize,
    pub warnings: Vec<String>,
}

impl ClassificationReport {
    /// All matched names across degrees, sorted.
    pub fn matched(&self) -> Vec<String> {
        let mut v: Vec<String> = self.degrees.iter().flat_map(|d| d.matched_names.iter().cloned()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn nonzero_degrees(&self) -> Vec<(i64, i64)> {
        self.degrees.iter().map(|d| (d.r, d.s)).collect()
    }
}

/// Named maps valid at this algebra's `q` with the given degree.
pub(crate) fn named_candidates<F: Field>(alg: &Algebra<F>, deg: &MapDegree, w: &Window) -> Vec<(NamedMap, GradedMap<F>)> {
    NamedMap::ALL
        .iter()
        .filter_map(|name| builtin_map::<F>(*name, alg.mode(), w, alg.is_super()).ok().map(|m| (*name, m)))
        .filter(|(_, m)| m.degree == *deg)
        .collect()
}

/// Stabilized ½-(super)derivations for every degree `|r| <= bounds.0`, `|s| <= bounds.1`.
pub fn classify<F: Field>(
    alg: &Algebra<F>,
    parity_shift: Parity,
    bounds: (i64, i64),
    windows: &[Window],
) -> Result<ClassificationReport, HalfDerError> {
    check_ladder(windows)?;
    if parity_shift == Parity::Odd && !alg.is_super() {
        return Err(HalfDerError::OddMapOnNonSuper(alg.spec().name.clone()));
    }
    let degrees: Vec<MapDegree> = (-bounds.0..=bounds.0)
        .flat_map(|r| (-bounds.1..=bounds.1).map(move |s| MapDegree::new(parity_shift, r, s)))
        .collect();
    let results = par_map(&degrees, |deg| stabilize(alg, *deg, windows));
    let mut report = ClassificationReport {
        algebra: alg.spec().name.clone(),
        q: alg.mode().clone(),
        parity_shift,
        windows: windows.to_vec(),
        degrees: Vec::new(),
        total_dim: 0,
        warnings: Vec::new(),
    };
    for res in results {
        let st = res?;
        if let Some(w) = &st.warning {
            report.warnings.push(w.clone());
        }
        if st.dim() == 0 {
            continue;
        }
        let matched_names = named_candidates(alg, &st.degree, &st.window)
            .into_iter()
            .filter(|(_, m)| st.contains(m))
            .map(|(n, _)| n.name().to_string())
            .collect();
        let basis_tables = st
            .maps()
            .iter()
            .map(|m| m.table.iter().map(|(x, d)| TableEntry { x: *x, value: d.to_string() }).collect())
            .collect();
        report.total_dim += st.dim();
        report.degrees.push(DegreeReport {
            r: st.degree.r,
            s: st.degree.s,
            stable_dim: st.dim(),
            matched_names,
            basis_tables,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{RatFunc, Rational};
    use crate::specdsl::builtin_algebra;

    fn ladder(s: &str) -> Vec<Window> {
        s.split(',').map(|w| w.parse().unwrap()).collect()
    }

    #[test]
    fn block_generic_identity_only() {
        let b: Algebra<RatFunc> = Algebra::new(&builtin_algebra("B").unwrap(), &QMode::Generic).unwrap();
        let st = stabilize(&b, MapDegree::even(0, 0), &ladder("3x3,4x4,5x5")).unwrap();
        assert_eq!(st.dim(), 1);
    }

    #[test]
    fn block_two_alpha_degree() {
        let q = QMode::Fixed(Rational::from_int(2));
        let b: Algebra<Rational> = Algebra::new(&builtin_algebra("B").unwrap(), &q).unwrap();
        let st = stabilize(&b, MapDegree::even(0, 2), &ladder("4x6,5x7")).unwrap();
        assert_eq!(st.dim(), 1);
        let alpha = builtin_map(NamedMap::Alpha, &q, &st.window, false).unwrap();
        assert!(st.contains(&alpha));
        assert_eq!(st.maps()[0].table, alpha.table);
        let st = stabilize(&b, MapDegree::even(1, 0), &ladder("3x3,4x4")).unwrap();
        assert_eq!(st.dim(), 0);
    }

    #[test]
    fn ladder_must_nest() {
        let b: Algebra<Rational> =
            Algebra::new(&builtin_algebra("B").unwrap(), &QMode::Fixed(Rational::zero())).unwrap();
        assert!(stabilize(&b, MapDegree::even(0, 0), &ladder("4x4,3x5")).is_err());
        assert!(stabilize(&b, MapDegree::even(0, 0), &[]).is_err());
    }
}
