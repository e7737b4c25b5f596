//! Exact sparse elimination over a [`Field`].

use std::collections::BTreeMap;

use crate::scalar::Field;

/// Sparse row: `(column, value)` pairs, sorted by column, no zeros.
pub type SparseRow<F> = Vec<(usize, F)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    /// Cheapest entry by [`Field::complexity`], ties to the smaller column.
    MinComplexity,
    /// Leftmost entry; with back-substitution this yields the reduced row echelon form.
    FirstColumn,
}

/// Incremental semi-echelon form. Each stored row has pivot coefficient 1 and no entry
/// in the pivot column of any earlier row.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    ncols: usize,
    rule: PivotRule,
    rows: Vec<(usize, SparseRow<F>)>,
    pivot_of: Vec<Option<usize>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize, rule: PivotRule) -> Self {
        Echelon { ncols, rule, rows: Vec::new(), pivot_of: vec![None; ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    fn reduce(&self, row: &[(usize, F)]) -> BTreeMap<usize, F> {
        let mut work: BTreeMap<usize, F> = row.iter().filter(|(_, v)| !v.is_zero()).cloned().collect();
        loop {
            // earliest stored pivot present in the working row
            let next = work.keys().filter_map(|c| self.pivot_of[*c]).min();
            let Some(k) = next else { return work };
            let (pc, prow) = &self.rows[k];
            let c = work.remove(pc).expect("pivot column present");
            for (col, v) in prow {
                if col == pc {
                    continue;
                }
                let delta = c.mul(v);
                match work.get_mut(col) {
                    Some(prev) => {
                        let s = prev.sub(&delta);
                        if s.is_zero() {
                            work.remove(col);
                        } else {
                            *prev = s;
                        }
                    }
                    None => {
                        work.insert(*col, delta.neg());
                    }
                }
            }
        }
    }

    /// Adds a row; returns whether it was independent of the rows so far.
    pub fn insert(&mut self, row: &[(usize, F)]) -> bool {
        let work = self.reduce(row);
        if work.is_empty() {
            return false;
        }
        let pc = match self.rule {
            PivotRule::FirstColumn => *work.keys().next().expect("nonempty"),
            PivotRule::MinComplexity => {
                *work.iter().min_by_key(|(c, v)| (v.complexity(), **c)).expect("nonempty").0
            }
        };
        let inv = work[&pc].inv().expect("nonzero pivot");
        let normalized: SparseRow<F> =
            work.into_iter().map(|(c, v)| if c == pc { (c, F::one()) } else { (c, v.mul(&inv)) }).collect();
        self.pivot_of[pc] = Some(self.rows.len());
        self.rows.push((pc, normalized));
        true
    }

    /// Eliminates every pivot column from every other row.
    fn back_substitute(&mut self) {
        for k in (0..self.rows.len()).rev() {
            let (pc, row) = &self.rows[k];
            if !row.iter().any(|(c, _)| *c != *pc && self.pivot_of[*c].is_some()) {
                continue;
            }
            let mut work: BTreeMap<usize, F> = row.iter().cloned().collect();
            let pc = *pc;
            let targets: Vec<usize> = row.iter().filter(|(c, _)| *c != pc && self.pivot_of[*c].is_some()).map(|(c, _)| *c).collect();
            for col in targets {
                let j = self.pivot_of[col].expect("pivot");
                let c = work.remove(&col).expect("present");
                for (cc, v) in &self.rows[j].1 {
                    if *cc == col {
                        continue;
                    }
                    let delta = c.mul(v);
                    let s = work.get(cc).map_or_else(|| delta.neg(), |p| p.sub(&delta));
                    if s.is_zero() {
                        work.remove(cc);
                    } else {
                        work.insert(*cc, s);
                    }
                }
            }
            self.rows[k].1 = work.into_iter().collect();
        }
    }

    /// Rows of the reduced form sorted by pivot column. With [`PivotRule::FirstColumn`] this
    /// is the reduced row echelon form of the row space.
    pub fn into_reduced_rows(mut self) -> Vec<SparseRow<F>> {
        self.back_substitute();
        let mut rows = self.rows;
        rows.sort_by_key(|(pc, _)| *pc);
        rows.into_iter().map(|(_, r)| r).collect()
    }

    /// Null space of the inserted rows, canonicalized.
    pub fn null_space(mut self) -> NullSpaceBasis<F> {
        let n = self.ncols;
        self.back_substitute();
        let mut vectors = Vec::new();
        let mut by_free: BTreeMap<usize, Vec<(usize, F)>> = BTreeMap::new();
        for (pc, row) in &self.rows {
            for (c, v) in row {
                if c != pc {
                    by_free.entry(*c).or_default().push((*pc, v.neg()));
                }
            }
        }
        for f in (0..n).filter(|c| self.pivot_of[*c].is_none()) {
            let mut v = by_free.remove(&f).unwrap_or_default();
            v.push((f, F::one()));
            v.sort_by_key(|(c, _)| *c);
            vectors.push(v);
        }
        NullSpaceBasis { ncols: n, vectors: rref(n, &vectors) }
    }
}

/// Reduced row echelon basis of the span of `rows`.
pub fn rref<F: Field>(ncols: usize, rows: &[SparseRow<F>]) -> Vec<SparseRow<F>> {
    let mut e = Echelon::new(ncols, PivotRule::FirstColumn);
    let mut sorted: Vec<&SparseRow<F>> = rows.iter().collect();
    sorted.sort_by_key(|r| r.first().map(|(c, _)| *c));
    for r in sorted {
        e.insert(r);
    }
    e.into_reduced_rows()
}

/// Whether `v` lies in the span of an RREF basis.
pub fn span_contains<F: Field>(basis: &[SparseRow<F>], v: &[(usize, F)]) -> bool {
    let mut work: BTreeMap<usize, F> = v.iter().filter(|(_, x)| !x.is_zero()).cloned().collect();
    for row in basis {
        let pc = row[0].0;
        let Some(c) = work.remove(&pc) else { continue };
        for (col, x) in &row[1..] {
            let s = work.get(col).map_or_else(|| c.mul(x).neg(), |p| p.sub(&c.mul(x)));
            if s.is_zero() {
                work.remove(col);
            } else {
                work.insert(*col, s);
            }
        }
    }
    work.is_empty()
}

/// RREF basis of `span(u) ∩ span(v)`; both inputs must be linearly independent.
pub fn span_intersection<F: Field>(ncols: usize, u: &[SparseRow<F>], v: &[SparseRow<F>]) -> Vec<SparseRow<F>> {
    if u.is_empty() || v.is_empty() {
        return Vec::new();
    }
    // unknowns a_0..a_p, b_0..b_r with sum a_k u_k - sum b_l v_l = 0
    let p = u.len();
    let mut eqs: BTreeMap<usize, SparseRow<F>> = BTreeMap::new();
    for (k, row) in u.iter().enumerate() {
        for (c, x) in row {
            eqs.entry(*c).or_default().push((k, x.clone()));
        }
    }
    for (l, row) in v.iter().enumerate() {
        for (c, x) in row {
            eqs.entry(*c).or_default().push((p + l, x.neg()));
        }
    }
    let mut e = Echelon::new(p + v.len(), PivotRule::MinComplexity);
    for row in eqs.values() {
        e.insert(row);
    }
    let coeffs = e.null_space();
    let mut out = Vec::new();
    for a in &coeffs.vectors {
        let mut w: BTreeMap<usize, F> = BTreeMap::new();
        for (k, ak) in a.iter().filter(|(k, _)| *k < p) {
            for (c, x) in &u[*k] {
                let s = w.get(c).map_or_else(|| ak.mul(x), |prev| prev.add(&ak.mul(x)));
                w.insert(*c, s);
            }
        }
        out.push(w.into_iter().filter(|(_, x)| !x.is_zero()).collect());
    }
    rref(ncols, &out)
}

/// Null space of a linear system, as RREF row vectors over the unknown order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullSpaceBasis<F> {
    pub ncols: usize,
    pub vectors: Vec<SparseRow<F>>,
}

impl<F> NullSpaceBasis<F> {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Null space of `rows` over `ncols` unknowns.
pub fn null_space<F: Field>(ncols: usize, rows: &[SparseRow<F>]) -> NullSpaceBasis<F> {
    let mut e = Echelon::new(ncols, PivotRule::MinComplexity);
    let mut order: Vec<&SparseRow<F>> = rows.iter().collect();
    order.sort_by_key(|r| r.len());
    for r in order {
        e.insert(r);
        if e.is_full() {
            break;
        }
    }
    e.null_space()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{RatFunc, Rational};
    use proptest::prelude::*;

    fn r(k: i64) -> Rational {
        Rational::from_int(k)
    }

    #[test]
    fn empty_system_is_standard_basis() {
        let ns = null_space::<Rational>(3, &[]);
        assert_eq!(ns.dim(), 3);
        assert_eq!(ns.vectors, vec![vec![(0, r(1))], vec![(1, r(1))], vec![(2, r(1))]]);
    }

    #[test]
    fn rank_two_system() {
        // d0 - d1 = 0, d1 = 0 over 4 unknowns
        let rows = vec![vec![(0, r(1)), (1, r(-1))], vec![(1, r(1))]];
        let ns = null_space(4, &rows);
        assert_eq!(ns.dim(), 2);
        assert_eq!(ns.vectors, vec![vec![(2, r(1))], vec![(3, r(1))]]);
    }

    #[test]
    fn null_space_is_rref_and_annihilates() {
        // x0 + x1 + x2 = 0, x1 - 2 x3 = 0
        let rows = vec![vec![(0, r(1)), (1, r(1)), (2, r(1))], vec![(1, r(1)), (3, r(-2))]];
        let ns = null_space(4, &rows);
        assert_eq!(ns.dim(), 2);
        for v in &ns.vectors {
            for row in &rows {
                let dot = row.iter().fold(Rational::zero(), |acc, (c, a)| {
                    let x = v.iter().find(|(k, _)| k == c).map_or(Rational::zero(), |(_, x)| x.clone());
                    &acc + &(a * &x)
                });
                assert!(dot.is_zero());
            }
        }
        assert_eq!(ns.vectors[0][0], (0, r(1)));
        assert_eq!(ns.vectors[1][0], (1, r(1)));
    }

    #[test]
    fn symbolic_entries() {
        // (q+1) x0 - x1 = 0
        let q1: RatFunc = "q + 1".parse().unwrap();
        let rows = vec![vec![(0, q1.clone()), (1, RatFunc::one().neg())]];
        let ns = null_space(2, &rows);
        assert_eq!(ns.vectors, vec![vec![(0, RatFunc::one()), (1, q1)]]);
    }

    #[test]
    fn intersection_and_membership() {
        let u = rref(3, &[vec![(0, r(1))], vec![(1, r(1))]]);
        let v = rref(3, &[vec![(1, r(1)), (2, r(1))], vec![(0, r(1)), (1, r(1))]]);
        let both = span_intersection(3, &u, &v);
        assert_eq!(both, vec![vec![(0, r(1)), (1, r(1))]]);
        assert!(span_contains(&u, &[(0, r(3)), (1, r(-2))]));
        assert!(!span_contains(&u, &[(2, r(1))]));
    }

    fn arb_rows() -> impl Strategy<Value = Vec<SparseRow<Rational>>> {
        prop::collection::vec(prop::collection::btree_map(0usize..6, -3i64..4, 1..4), 0..7).prop_map(|rows| {
            rows.into_iter()
                .map(|m| m.into_iter().filter(|(_, v)| *v != 0).map(|(c, v)| (c, r(v))).collect::<Vec<_>>())
                .filter(|r: &Vec<_>| !r.is_empty())
                .collect()
        })
    }

    proptest! {
        #[test]
        fn insertion_order_does_not_matter(rows in arb_rows(), seed in 0usize..1000) {
            let a = null_space(6, &rows);
            let mut shuffled = rows.clone();
            let n = shuffled.len();
            if n > 1 {
                shuffled.rotate_left(seed % n);
                shuffled.swap(0, (seed / 7) % n);
            }
            let b = null_space(6, &shuffled);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn dimension_is_nullity(rows in arb_rows()) {
            let ns = null_space(6, &rows);
            let rank = rref(6, &rows).len();
            prop_assert_eq!(ns.dim(), 6 - rank);
        }
    }
}
