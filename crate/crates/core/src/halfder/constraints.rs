use std::collections::HashMap;

use serde::Serialize;

use super::linalg::{null_space, Echelon, NullSpaceBasis, PivotRule, SparseRow};
use super::{GradedMap, HalfDerError, MapDegree};
use crate::algebra::{Algebra, BasisIndex, Parity, SparseVector, Window};
use crate::report::{ReportBuilder, VerificationReport, Violation};
use crate::scalar::{specialize_q, Field, Rational, Scalar};

/// The basis pair a constraint row came from. The bracket rule is the parity pair of `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RowOrigin {
    pub x: BasisIndex,
    pub y: BasisIndex,
}

impl RowOrigin {
    pub fn rule_id(&self) -> &'static str {
        match (self.x.parity, self.y.parity) {
            (Parity::Even, Parity::Even) => "even-even",
            (Parity::Odd, Parity::Odd) => "odd-odd",
            _ => "even-odd",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintRow<F> {
    pub coeffs: SparseRow<F>,
    pub origin: RowOrigin,
}

/// Linear conditions on the coefficients `d(x)` of a homogeneous map of fixed degree.
#[derive(Clone, Debug)]
pub struct ConstraintSystem<F> {
    pub degree: MapDegree,
    pub window: Window,
    pub unknowns: Vec<BasisIndex>,
    pub rows: Vec<ConstraintRow<F>>,
    index: HashMap<BasisIndex, usize>,
}

impl<F: Field> ConstraintSystem<F> {
    pub fn column(&self, x: &BasisIndex) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn null_space(&self) -> NullSpaceBasis<F> {
        let rows: Vec<SparseRow<F>> = self.rows.iter().map(|r| r.coeffs.clone()).collect();
        null_space(self.unknowns.len(), &rows)
    }

    /// Reads a vector over the unknowns as a map.
    pub fn to_map(&self, v: &[(usize, F)]) -> GradedMap<F> {
        let mut m = GradedMap::new(self.degree);
        for (c, x) in v {
            m.set(self.unknowns[*c], x.clone());
        }
        m
    }

    /// The map's table on this system's unknowns.
    pub fn to_vector(&self, map: &GradedMap<F>) -> SparseRow<F> {
        self.unknowns.iter().enumerate().filter_map(|(c, x)| map.table.get(x).map(|d| (c, d.clone()))).collect()
    }
}

/// One ½-superderivation condition `2φ([x,y]) = [φ(x),y] + (-1)^{|φ||x|}[x,φ(y)]`,
/// projected onto its single output index: `lhs` is the `2φ([x,y])` term, `rhs` the two others.
struct PairTerms<F> {
    lhs: (BasisIndex, F),
    rhs: [(BasisIndex, F); 2],
    output: BasisIndex,
}

fn pair_terms<F: Field>(alg: &Algebra<F>, deg: &MapDegree, x: &BasisIndex, y: &BasisIndex) -> PairTerms<F> {
    let (cxy, z) = alg.bracket_coeff(x, y).expect("parities checked");
    let x1 = deg.target(x);
    let y1 = deg.target(y);
    let (cx1y, output) = alg.bracket_coeff(&x1, y).expect("parities checked");
    let cxy1 = alg.bracket_coeff(x, &y1).expect("parities checked").0;
    PairTerms {
        lhs: (z, cxy.scale_int(2)),
        rhs: [(*x, cx1y), (*y, cxy1.scale_int(Parity::sign(deg.parity_shift, x.parity)))],
        output,
    }
}

fn pairs(w: &Window, is_super: bool) -> Vec<(BasisIndex, BasisIndex)> {
    let basis = w.basis(is_super);
    let mut out = Vec::new();
    for (a, x) in basis.iter().enumerate() {
        for y in &basis[a..] {
            if w.contains(x.m + y.m, x.i + y.i) {
                out.push((*x, *y));
            }
        }
    }
    out
}

fn check_degree<F: Field>(alg: &Algebra<F>, deg: &MapDegree) -> Result<(), HalfDerError> {
    if deg.parity_shift == Parity::Odd && !alg.is_super() {
        return Err(HalfDerError::OddMapOnNonSuper(alg.spec().name.clone()));
    }
    Ok(alg.check_parities()?)
}

fn rows<'a, F: Field>(
    alg: &'a Algebra<F>,
    deg: MapDegree,
    w: &Window,
    index: &'a HashMap<BasisIndex, usize>,
) -> impl Iterator<Item = ConstraintRow<F>> + 'a {
    pairs(w, alg.is_super()).into_iter().filter_map(move |(x, y)| {
        let t = pair_terms(alg, &deg, &x, &y);
        let mut acc: Vec<(usize, F)> = Vec::with_capacity(3);
        let mut push = |u: BasisIndex, c: F| {
            if c.is_zero() {
                return;
            }
            let col = index[&u];
            match acc.iter_mut().find(|(k, _)| *k == col) {
                Some((_, prev)) => *prev = prev.add(&c),
                None => acc.push((col, c)),
            }
        };
        push(t.lhs.0, t.lhs.1);
        for (u, c) in t.rhs {
            push(u, c.neg());
        }
        acc.retain(|(_, c)| !c.is_zero());
        if acc.is_empty() {
            return None;
        }
        acc.sort_by_key(|(k, _)| *k);
        Some(ConstraintRow { coeffs: acc, origin: RowOrigin { x, y } })
    })
}

fn unknown_index(unknowns: &[BasisIndex]) -> HashMap<BasisIndex, usize> {
    unknowns.iter().enumerate().map(|(k, x)| (*x, k)).collect()
}

pub fn build_constraints<F: Field>(alg: &Algebra<F>, deg: MapDegree, w: &Window) -> Result<ConstraintSystem<F>, HalfDerError> {
    check_degree(alg, &deg)?;
    let unknowns = w.basis(alg.is_super());
    let index = unknown_index(&unknowns);
    let rows = rows(alg, deg, w, &index).collect();
    Ok(ConstraintSystem { degree: deg, window: *w, unknowns, rows, index })
}

/// Null space of the system on `w` without materializing it: rows are generated lazily
/// and generation stops once the rank is full. Equal to `build_constraints(..).null_space()`.
/// Specialization point for the generic-mode rank probe. Any value is sound.
const PROBE_Q: (i64, i64) = (97, 89);

fn eliminate<G: Field>(ncols: usize, rows: impl Iterator<Item = SparseRow<G>>) -> Echelon<G> {
    let mut e = Echelon::new(ncols, PivotRule::MinComplexity);
    let mut it = rows.peekable();
    let batch = 4 * ncols.max(1);
    while !e.is_full() && it.peek().is_some() {
        let mut chunk: Vec<SparseRow<G>> = it.by_ref().take(batch).collect();
        chunk.sort_by_key(|r| r.len());
        for row in chunk {
            e.insert(&row);
            if e.is_full() {
                break;
            }
        }
    }
    e
}

/// In generic mode, whether the system specialized at `PROBE_Q` already has full rank.
/// Rank can only drop under specialization, so a full-rank probe proves the generic
/// null space is zero.
fn probe_full_rank<F: Field>(alg: &Algebra<F>, deg: MapDegree, w: &Window, index: &HashMap<BasisIndex, usize>) -> bool {
    if !alg.mode().is_generic() {
        return false;
    }
    let q0 = Rational::new(PROBE_Q.0, PROBE_Q.1).expect("nonzero denominator");
    let mut ok = true;
    let specialized = rows(alg, deg, w, index).map_while(|row| {
        let out: Option<SparseRow<Rational>> = row
            .coeffs
            .iter()
            .map(|(k, c)| match c.to_scalar() {
                Scalar::Function(f) => specialize_q(&f, &q0).ok().map(|v| (*k, v)),
                Scalar::Rational(v) => Some((*k, v)),
            })
            .collect();
        if out.is_none() {
            ok = false;
        }
        out.map(|mut r| {
            r.retain(|(_, c)| !c.is_zero());
            r
        })
    });
    let full = eliminate(index.len(), specialized).is_full();
    ok && full
}

/// Null space of the system on `w` without materializing it: rows are generated lazily
/// and generation stops once the rank is full. Equal to `build_constraints(..).null_space()`.
pub fn solve<F: Field>(alg: &Algebra<F>, deg: MapDegree, w: &Window) -> Result<(Vec<BasisIndex>, NullSpaceBasis<F>), HalfDerError> {
    check_degree(alg, &deg)?;
    let unknowns = w.basis(alg.is_super());
    let index = unknown_index(&unknowns);
    if probe_full_rank(alg, deg, w, &index) {
        let ncols = unknowns.len();
        return Ok((unknowns, NullSpaceBasis { ncols, vectors: Vec::new() }));
    }
    let e = eliminate(unknowns.len(), rows(alg, deg, w, &index).map(|r| r.coeffs));
    Ok((unknowns, e.null_space()))
}

/// Evaluates every condition generated on `w` against the map's table.
pub fn check_map<F: Field>(alg: &Algebra<F>, map: &GradedMap<F>, w: &Window) -> Result<VerificationReport, HalfDerError> {
    check_degree(alg, &map.degree)?;
    let mut b = ReportBuilder::new();
    for (x, y) in pairs(w, alg.is_super()) {
        b.checked += 1;
        let t = pair_terms(alg, &map.degree, &x, &y);
        let lhs = t.lhs.1.mul(&map.d(&t.lhs.0));
        let rhs = t.rhs.iter().fold(F::zero(), |acc, (u, c)| acc.add(&c.mul(&map.d(u))));
        if lhs != rhs {
            b.push(Violation {
                indices: vec![x, y],
                lhs: SparseVector::term(t.output, lhs).to_string(),
                rhs: SparseVector::term(t.output, rhs).to_string(),
            });
        }
    }
    Ok(b.finish())
}
