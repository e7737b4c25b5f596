//! Finitely supported supercommutative products and the transposed Poisson axioms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, BasisIndex, Parity, SparseVector, Window};
use crate::halfder::{GradedMap, MapDegree};
use crate::report::{par_check, ReportBuilder, VerificationReport, Violation};
use crate::scalar::{Field, QMode, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TpError {
    #[error("{structure} needs {requirement}, but q = {q}")]
    WrongQ { structure: TpStructure, requirement: &'static str, q: QMode },
    #[error("left multiplication by {z} is not homogeneous: {first} and {second} have different shifts")]
    NonHomogeneousMultiplication { z: BasisIndex, first: BasisIndex, second: BasisIndex },
    #[error("product is {product} but the algebra is {algebra}")]
    SuperMismatch { product: &'static str, algebra: &'static str },
    #[error("unknown structure {0:?} (expected trivial, block_thalg, super_full or super_even)")]
    UnknownStructure(String),
    #[error("invalid product JSON: {0}")]
    Json(String),
    #[error("bad scalar {value:?}: {source}")]
    Scalar { value: String, source: ScalarError },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TpStructure {
    Trivial,
    BlockThalg,
    SuperFull,
    SuperEven,
}

impl TpStructure {
    pub const ALL: [TpStructure; 4] =
        [TpStructure::Trivial, TpStructure::BlockThalg, TpStructure::SuperFull, TpStructure::SuperEven];

    pub fn name(self) -> &'static str {
        match self {
            TpStructure::Trivial => "trivial",
            TpStructure::BlockThalg => "block_thalg",
            TpStructure::SuperFull => "super_full",
            TpStructure::SuperEven => "super_even",
        }
    }
}

impl fmt::Display for TpStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TpStructure {
    type Err = TpError;
    fn from_str(s: &str) -> Result<Self, TpError> {
        TpStructure::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| TpError::UnknownStructure(s.to_string()))
    }
}

/// A finitely supported product, stored once per unordered pair `x <= y`.
/// `y·x` is read back as `(-1)^{|x||y|} x·y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTable<F> {
    pub is_super: bool,
    entries: BTreeMap<(BasisIndex, BasisIndex), SparseVector<F>>,
}

impl<F: Field> ProductTable<F> {
    pub fn new(is_super: bool) -> Self {
        ProductTable { is_super, entries: BTreeMap::new() }
    }

    /// Sets `x·y = v` (and hence `y·x`). A zero `v` clears the entry.
    pub fn set(&mut self, x: BasisIndex, y: BasisIndex, v: SparseVector<F>) {
        let (key, v) = if x <= y {
            ((x, y), v)
        } else {
            ((y, x), v.scale(&F::from_int(Parity::sign(x.parity, y.parity))))
        };
        if v.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, v);
        }
    }

    pub fn with(mut self, x: BasisIndex, y: BasisIndex, v: SparseVector<F>) -> Self {
        self.set(x, y, v);
        self
    }

    pub fn mul_basis(&self, x: &BasisIndex, y: &BasisIndex) -> SparseVector<F> {
        if x <= y {
            self.entries.get(&(*x, *y)).cloned().unwrap_or_default()
        } else {
            match self.entries.get(&(*y, *x)) {
                Some(v) => v.scale(&F::from_int(Parity::sign(x.parity, y.parity))),
                None => SparseVector::zero(),
            }
        }
    }

    pub fn mul(&self, u: &SparseVector<F>, v: &SparseVector<F>) -> SparseVector<F> {
        let mut out = SparseVector::zero();
        for (x, a) in u.iter() {
            if !self.touches(x) {
                continue;
            }
            for (y, b) in v.iter() {
                for (z, c) in self.mul_basis(x, y).iter() {
                    out.add_term(*z, c.mul(a).mul(b));
                }
            }
        }
        out
    }

    /// Stored entries with `x <= y`.
    pub fn entries(&self) -> impl Iterator<Item = (&BasisIndex, &BasisIndex, &SparseVector<F>)> {
        self.entries.iter().map(|((x, y), v)| (x, y, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Basis elements with at least one nonzero product.
    pub fn support(&self) -> BTreeSet<BasisIndex> {
        self.entries.keys().flat_map(|(x, y)| [*x, *y]).collect()
    }

    /// Basis elements occurring in some product.
    pub fn image_support(&self) -> BTreeSet<BasisIndex> {
        self.entries.values().flat_map(|v| v.iter().map(|(z, _)| *z).collect::<Vec<_>>()).collect()
    }

    fn touches(&self, x: &BasisIndex) -> bool {
        self.entries.keys().any(|(a, b)| a == x || b == x)
    }

    pub fn to_json(&self) -> ProductJson {
        ProductJson {
            is_super: self.is_super,
            entries: self
                .entries
                .iter()
                .map(|((x, y), v)| EntryJson {
                    x: *x,
                    y: *y,
                    value: v.iter().map(|(z, c)| (z.parity, z.m, z.i, c.to_string())).collect(),
                })
                .collect(),
        }
    }

    /// Entries are read in file order; a later entry for the same pair replaces the earlier one.
    pub fn from_json(json: &ProductJson) -> Result<Self, TpError> {
        let generic = F::zero().to_scalar().is_generic();
        let mut out = ProductTable::new(json.is_super);
        for e in &json.entries {
            let mut v = SparseVector::zero();
            for (p, m, i, s) in &e.value {
                let c = Scalar::parse(s, generic)
                    .and_then(|c| F::from_scalar(&c))
                    .map_err(|source| TpError::Scalar { value: s.clone(), source })?;
                v.add_term(BasisIndex::new(*p, *m, *i), c);
            }
            out.set(e.x, e.y, v);
        }
        Ok(out)
    }

    pub fn from_json_str(s: &str) -> Result<Self, TpError> {
        let json: ProductJson = serde_json::from_str(s).map_err(|e| TpError::Json(e.to_string()))?;
        ProductTable::from_json(&json)
    }
}

/// `{super, entries: [{x, y, value: [[parity, m, i, "scalar"], ...]}]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductJson {
    #[serde(rename = "super")]
    pub is_super: bool,
    pub entries: Vec<EntryJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub x: BasisIndex,
    pub y: BasisIndex,
    pub value: Vec<(Parity, i64, i64, String)>,
}

fn integer_q(structure: TpStructure, mode: &QMode) -> Result<i64, TpError> {
    mode.fixed().and_then(|q| q.to_i64()).ok_or(TpError::WrongQ { structure, requirement: "q an integer", q: mode.clone() })
}

fn zero_q(structure: TpStructure, mode: &QMode) -> Result<(), TpError> {
    match mode.fixed() {
        Some(q) if q.is_zero() => Ok(()),
        _ => Err(TpError::WrongQ { structure, requirement: "q = 0", q: mode.clone() }),
    }
}

/// The built-in products: the zero product, `L_{0,-2q}·L_{0,-2q} = L_{0,-q}` on B(q),
/// and the two products on S(0).
pub fn builtin_tp<F: Field>(structure: TpStructure, mode: &QMode) -> Result<ProductTable<F>, TpError> {
    let l = BasisIndex::even;
    Ok(match structure {
        TpStructure::Trivial => ProductTable::new(false),
        TpStructure::BlockThalg => {
            let q = integer_q(structure, mode)?;
            ProductTable::new(false).with(l(0, -2 * q), l(0, -2 * q), SparseVector::basis(l(0, -q)))
        }
        TpStructure::SuperFull => {
            zero_q(structure, mode)?;
            let g = BasisIndex::odd(0, 0);
            ProductTable::new(true)
                .with(l(0, 0), l(0, 0), SparseVector::basis(l(0, 0)))
                .with(l(0, 0), g, SparseVector::basis(g))
        }
        TpStructure::SuperEven => {
            zero_q(structure, mode)?;
            ProductTable::new(true).with(l(0, 0), l(0, 0), SparseVector::basis(l(0, 0)))
        }
    })
}

/// Checks parity additivity, homogeneity of each entry and `x·x = 0` for odd `x`.
/// Z×Z-additivity of the support is reported in the notes only: the built-in
/// products on B(q) with q ≠ 0 are not additively graded.
pub fn verify_supercommutative_grading<F: Field>(prod: &ProductTable<F>) -> VerificationReport {
    let mut b = ReportBuilder::new();
    let mut off_grade = Vec::new();
    for (x, y, v) in prod.entries() {
        b.checked += 1;
        let parity = x.parity.plus(y.parity);
        let mut bad = !prod.is_super && (x.parity == Parity::Odd || y.parity == Parity::Odd);
        bad |= x == y && x.parity == Parity::Odd;
        bad |= v.iter().any(|(z, _)| z.parity != parity);
        let points: BTreeSet<(i64, i64)> = v.iter().map(|(z, _)| (z.m, z.i)).collect();
        bad |= points.len() > 1;
        if bad {
            b.push(Violation { indices: vec![*x, *y], lhs: v.to_string(), rhs: "0".into() });
        }
        if points.iter().any(|p| *p != (x.m + y.m, x.i + y.i)) {
            off_grade.push(format!("{x}·{y}"));
        }
    }
    let mut out = b.finish();
    if !off_grade.is_empty() {
        out.notes.push(format!("not additively Z×Z-graded at {}", off_grade.join(", ")));
    }
    out
}

/// Indices that can take part in a nonzero product, plus the window basis.
fn relevant<F: Field>(prod: &ProductTable<F>, w: &Window) -> Vec<BasisIndex> {
    let mut set: BTreeSet<BasisIndex> = w.basis(prod.is_super).into_iter().collect();
    set.extend(prod.support());
    set.extend(prod.image_support());
    set.into_iter().collect()
}

/// Checks `(x·y)·z = x·(y·z)` over the window basis together with the support and image
/// of the product. Both sides vanish unless `y` is in the support, so only those
/// triples are evaluated and counted.
pub fn verify_associative<F: Field>(prod: &ProductTable<F>, w: &Window) -> VerificationReport {
    let idx = relevant(prod, w);
    let support: Vec<BasisIndex> = prod.support().into_iter().collect();
    par_check(&support, |y| {
        let mut b = ReportBuilder::new();
        for x in &idx {
            let xy = prod.mul_basis(x, y);
            for z in &idx {
                b.checked += 1;
                let lhs = prod.mul(&xy, &SparseVector::basis(*z));
                let rhs = prod.mul(&SparseVector::basis(*x), &prod.mul_basis(y, z));
                if lhs != rhs {
                    b.push(Violation { indices: vec![*x, *y, *z], lhs: lhs.to_string(), rhs: rhs.to_string() });
                }
            }
        }
        b
    })
}

fn check_super<F: Field>(alg: &Algebra<F>, prod: &ProductTable<F>) -> Result<(), TpError> {
    let kind = |s: bool| if s { "super" } else { "not super" };
    if alg.is_super() != prod.is_super {
        return Err(TpError::SuperMismatch { product: kind(prod.is_super), algebra: kind(alg.is_super()) });
    }
    Ok(())
}

/// Checks `2z·[x,y] = [z·x,y] + (-1)^{|x||z|}[x,z·y]` for all basis triples of `w`.
/// When `z` has no nonzero product both sides vanish identically.
pub fn verify_transposed_leibniz<F: Field>(
    alg: &Algebra<F>,
    prod: &ProductTable<F>,
    w: &Window,
) -> Result<VerificationReport, TpError> {
    check_super(alg, prod)?;
    alg.check_parities()?;
    let basis = w.basis(alg.is_super());
    let n = basis.len() as u64;
    let support = prod.support();
    let two = F::from_int(2);
    Ok(par_check(&basis, |z| {
        let mut b = ReportBuilder::new();
        if !support.contains(z) {
            b.checked += n * n;
            return b;
        }
        for x in &basis {
            let zx = prod.mul_basis(z, x);
            let sign = F::from_int(Parity::sign(x.parity, z.parity));
            for y in &basis {
                b.checked += 1;
                let xy = alg.bracket_basis(x, y).expect("parities checked");
                let lhs = prod.mul(&SparseVector::basis(*z), &xy).scale(&two);
                let zy = prod.mul_basis(z, y);
                let r1 = alg.bracket_vec(&zx, &SparseVector::basis(*y)).expect("parities checked");
                let r2 = alg.bracket_vec(&SparseVector::basis(*x), &zy).expect("parities checked");
                let rhs = r1.plus(&r2.scale(&sign));
                if lhs != rhs {
                    b.push(Violation { indices: vec![*z, *x, *y], lhs: lhs.to_string(), rhs: rhs.to_string() });
                }
            }
        }
        b
    }))
}

/// Left multiplication `u ↦ z·u` on the basis of `w`, as a homogeneous map.
pub fn left_mult_map<F: Field>(prod: &ProductTable<F>, z: &BasisIndex, w: &Window) -> Result<GradedMap<F>, TpError> {
    let mut entries = Vec::new();
    for x in w.basis(prod.is_super) {
        let v = prod.mul_basis(z, &x);
        for (t, c) in v.iter() {
            entries.push((x, *t, c.clone()));
        }
    }
    let shift = |x: &BasisIndex, t: &BasisIndex| MapDegree::new(x.parity.plus(t.parity), t.m - x.m, t.i - x.i);
    let degree = match entries.first() {
        Some((x, t, _)) => shift(x, t),
        None => MapDegree::new(z.parity, 0, 0),
    };
    let mut map = GradedMap::new(degree);
    for (x, t, c) in entries {
        if shift(&x, &t) != degree || map.table.contains_key(&x) {
            return Err(TpError::NonHomogeneousMultiplication { z: *z, first: degree.target(&x), second: t });
        }
        map.set(x, c);
    }
    Ok(map)
}

/// Checks that every product image commutes with the window basis.
pub fn verify_images_central<F: Field>(alg: &Algebra<F>, prod: &ProductTable<F>, w: &Window) -> Result<VerificationReport, TpError> {
    check_super(alg, prod)?;
    alg.check_parities()?;
    let basis = w.basis(alg.is_super());
    let images: Vec<BasisIndex> = prod.image_support().into_iter().collect();
    Ok(par_check(&images, |t| {
        let mut b = ReportBuilder::new();
        for x in &basis {
            b.checked += 1;
            let v = alg.bracket_basis(x, t).expect("parities checked");
            if !v.is_zero() {
                b.push(Violation { indices: vec![*x, *t], lhs: v.to_string(), rhs: "0".into() });
            }
        }
        b
    }))
}

/// Checks `s·[x,y] = 0` for `x, y` in the window and `s` in the support of the product.
pub fn verify_brackets_annihilate<F: Field>(
    alg: &Algebra<F>,
    prod: &ProductTable<F>,
    w: &Window,
) -> Result<VerificationReport, TpError> {
    check_super(alg, prod)?;
    alg.check_parities()?;
    let basis = w.basis(alg.is_super());
    let support: Vec<BasisIndex> = prod.support().into_iter().collect();
    Ok(par_check(&basis, |x| {
        let mut b = ReportBuilder::new();
        for y in &basis {
            let xy = alg.bracket_basis(x, y).expect("parities checked");
            for s in &support {
                b.checked += 1;
                let v = prod.mul(&SparseVector::basis(*s), &xy);
                if !v.is_zero() {
                    b.push(Violation { indices: vec![*s, *x, *y], lhs: v.to_string(), rhs: "0".into() });
                }
            }
        }
        b
    }))
}
