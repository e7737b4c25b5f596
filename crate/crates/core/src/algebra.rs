//! Basis indices, sparse vectors, windows and the bracket engine.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{par_check, ReportBuilder, VerificationReport, Violation};
use crate::scalar::{Field, ParamField, QMode, ScalarError};
use crate::specdsl::{CompiledExpr, Expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("algebra {algebra} has no bracket rule for parities ({left}, {right})")]
    UnknownParityPair { algebra: String, left: Parity, right: Parity },
    #[error("invalid window {0:?}: expected MxI with positive integers")]
    InvalidWindow(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Parity {
    #[default]
    Even,
    Odd,
}

impl Parity {
    pub fn bit(self) -> u8 {
        self as u8
    }

    pub fn from_bit(b: u8) -> Parity {
        if b.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn plus(self, other: Parity) -> Parity {
        Parity::from_bit(self.bit() ^ other.bit())
    }

    /// `(-1)^{|a||b|}`
    pub fn sign(a: Parity, b: Parity) -> i64 {
        if a == Parity::Odd && b == Parity::Odd {
            -1
        } else {
            1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Parity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" | "0" => Ok(Parity::Even),
            "odd" | "1" => Ok(Parity::Odd),
            _ => Err(format!("expected even or odd, found {s:?}")),
        }
    }
}

impl Serialize for Parity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Parity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            Bit(u8),
        }
        match Raw::deserialize(d)? {
            Raw::Name(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Bit(b @ (0 | 1)) => Ok(Parity::from_bit(b)),
            Raw::Bit(b) => Err(serde::de::Error::custom(format!("parity bit must be 0 or 1, found {b}"))),
        }
    }
}

/// A basis element: `L_{m,i}` when even, `G_{m,i}` when odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex {
    pub parity: Parity,
    pub m: i64,
    pub i: i64,
}

impl BasisIndex {
    pub const fn new(parity: Parity, m: i64, i: i64) -> Self {
        BasisIndex { parity, m, i }
    }

    pub const fn even(m: i64, i: i64) -> Self {
        BasisIndex::new(Parity::Even, m, i)
    }

    pub const fn odd(m: i64, i: i64) -> Self {
        BasisIndex::new(Parity::Odd, m, i)
    }

    /// Index shifted by a degree, parity added.
    pub fn shifted(self, parity: Parity, r: i64, s: i64) -> Self {
        BasisIndex::new(self.parity.plus(parity), self.m + r, self.i + s)
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.parity {
            Parity::Even => 'L',
            Parity::Odd => 'G',
        };
        write!(f, "{sym}_{{{},{}}}", self.m, self.i)
    }
}

impl Serialize for BasisIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.parity, self.m, self.i).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BasisIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (parity, m, i) = <(Parity, i64, i64)>::deserialize(d)?;
        Ok(BasisIndex { parity, m, i })
    }
}

/// Finite linear combination of basis elements. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseVector<F> {
    entries: BTreeMap<BasisIndex, F>,
}

impl<F: Field> Default for SparseVector<F> {
    fn default() -> Self {
        SparseVector { entries: BTreeMap::new() }
    }
}

impl<F: Field> SparseVector<F> {
    pub fn zero() -> Self {
        SparseVector::default()
    }

    pub fn basis(x: BasisIndex) -> Self {
        SparseVector::term(x, F::one())
    }

    pub fn term(x: BasisIndex, c: F) -> Self {
        let mut v = SparseVector::zero();
        v.add_term(x, c);
        v
    }

    pub fn add_term(&mut self, x: BasisIndex, c: F) {
        if c.is_zero() {
            return;
        }
        match self.entries.get_mut(&x) {
            Some(prev) => {
                let sum = prev.add(&c);
                if sum.is_zero() {
                    self.entries.remove(&x);
                } else {
                    *prev = sum;
                }
            }
            None => {
                self.entries.insert(x, c);
            }
        }
    }

    pub fn get(&self, x: &BasisIndex) -> Option<&F> {
        self.entries.get(x)
    }

    pub fn coeff(&self, x: &BasisIndex) -> F {
        self.entries.get(x).cloned().unwrap_or_else(F::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, &F)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = SparseVector::zero();
        for (x, a) in &self.entries {
            out.add_term(*x, a.mul(c));
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, a) in &other.entries {
            out.add_term(*x, a.clone());
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, a) in &other.entries {
            out.add_term(*x, a.neg());
        }
        out
    }
}

impl<F: Field> FromIterator<(BasisIndex, F)> for SparseVector<F> {
    fn from_iter<T: IntoIterator<Item = (BasisIndex, F)>>(iter: T) -> Self {
        let mut v = SparseVector::zero();
        for (x, c) in iter {
            v.add_term(x, c);
        }
        v
    }
}

impl<F: Field> fmt::Display for SparseVector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("0");
        }
        for (k, (x, c)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "{x}")?;
            } else {
                write!(f, "({c})*{x}")?;
            }
        }
        Ok(())
    }
}

/// The index box `|m| <= m_max, |i| <= i_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub m_max: i64,
    pub i_max: i64,
}

impl Window {
    pub fn new(m_max: i64, i_max: i64) -> Result<Self, AlgebraError> {
        if m_max < 1 || i_max < 1 {
            return Err(AlgebraError::InvalidWindow(format!("{m_max}x{i_max}")));
        }
        Ok(Window { m_max, i_max })
    }

    pub fn contains(&self, m: i64, i: i64) -> bool {
        m.abs() <= self.m_max && i.abs() <= self.i_max
    }

    pub fn contains_index(&self, x: &BasisIndex) -> bool {
        self.contains(x.m, x.i)
    }

    /// The box with both bounds doubled; holds every `[x, y]` with `x, y` in `self`.
    pub fn doubled(&self) -> Window {
        Window { m_max: 2 * self.m_max, i_max: 2 * self.i_max }
    }

    pub fn is_within(&self, other: &Window) -> bool {
        self.m_max <= other.m_max && self.i_max <= other.i_max
    }

    /// All `(m, i)` in the box, `m` major.
    pub fn points(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(((2 * self.m_max + 1) * (2 * self.i_max + 1)) as usize);
        for m in -self.m_max..=self.m_max {
            for i in -self.i_max..=self.i_max {
                out.push((m, i));
            }
        }
        out
    }

    /// Basis elements in the box: even ones, then odd ones if `is_super`.
    pub fn basis(&self, is_super: bool) -> Vec<BasisIndex> {
        let parities: &[Parity] = if is_super { &[Parity::Even, Parity::Odd] } else { &[Parity::Even] };
        let points = self.points();
        parities
            .iter()
            .flat_map(|&p| points.iter().map(move |&(m, i)| BasisIndex::new(p, m, i)))
            .collect()
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m_max, self.i_max)
    }
}

impl FromStr for Window {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::InvalidWindow(s.to_string());
        let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let m: i64 = a.trim().parse().map_err(|_| bad())?;
        let i: i64 = b.trim().parse().map_err(|_| bad())?;
        Window::new(m, i).map_err(|_| bad())
    }
}

impl Serialize for Window {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Antisymmetric,
    Symmetric,
}

impl Symmetry {
    pub fn name(self) -> &'static str {
        match self {
            Symmetry::Antisymmetric => "antisymmetric",
            Symmetry::Symmetric => "symmetric",
        }
    }

    /// The flag the super sign convention requires for a parity pair.
    pub fn required(left: Parity, right: Parity) -> Symmetry {
        if left == Parity::Odd && right == Parity::Odd {
            Symmetry::Symmetric
        } else {
            Symmetry::Antisymmetric
        }
    }
}

/// `[x_{m,i}, y_{n,j}] = coefficient(m,i,n,j,q) * z_{m+n,i+j}` with `|z| = |x| + |y|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketRule {
    pub left: Parity,
    pub right: Parity,
    pub symmetry: Symmetry,
    pub coefficient: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub name: String,
    pub is_super: bool,
    pub rules: Vec<BracketRule>,
}

impl AlgebraSpec {
    pub fn rule(&self, left: Parity, right: Parity) -> Option<&BracketRule> {
        let (a, b) = if left <= right { (left, right) } else { (right, left) };
        self.rules.iter().find(|r| r.left == a && r.right == b)
    }
}

fn slot(left: Parity, right: Parity) -> usize {
    (left.bit() + right.bit()) as usize
}

/// An [`AlgebraSpec`] bound to a value of `q` in the field `F`, ready for evaluation.
#[derive(Clone, Debug)]
pub struct Algebra<F> {
    spec: AlgebraSpec,
    mode: QMode,
    q: F,
    compiled: [Option<CompiledExpr<F>>; 3],
}

impl<F: ParamField> Algebra<F> {
    pub fn new(spec: &AlgebraSpec, mode: &QMode) -> Result<Self, AlgebraError> {
        let q = F::q_value(mode)?;
        let mut compiled: [Option<CompiledExpr<F>>; 3] = [None, None, None];
        for rule in &spec.rules {
            compiled[slot(rule.left, rule.right)] = Some(rule.coefficient.compile(&q));
        }
        Ok(Algebra { spec: spec.clone(), mode: mode.clone(), q, compiled })
    }
}

impl<F: Field> Algebra<F> {
    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn mode(&self) -> &QMode {
        &self.mode
    }

    pub fn q(&self) -> &F {
        &self.q
    }

    pub fn is_super(&self) -> bool {
        self.spec.is_super
    }

    /// Coefficient and output index of `[x, y]`; the coefficient may be zero.
    pub fn bracket_coeff(&self, x: &BasisIndex, y: &BasisIndex) -> Result<(F, BasisIndex), AlgebraError> {
        let rule = self.compiled[slot(x.parity, y.parity)].as_ref().filter(|_| {
            self.spec.is_super || (x.parity == Parity::Even && y.parity == Parity::Even)
        });
        let rule = rule.ok_or_else(|| AlgebraError::UnknownParityPair {
            algebra: self.spec.name.clone(),
            left: x.parity,
            right: y.parity,
        })?;
        let out = BasisIndex::new(x.parity.plus(y.parity), x.m + y.m, x.i + y.i);
        let c = if x.parity <= y.parity {
            rule.eval(x.m, x.i, y.m, y.i)
        } else {
            // odd-even: [x, y] = -[y, x]
            rule.eval(y.m, y.i, x.m, x.i).neg()
        };
        Ok((c, out))
    }

    /// Like [`Self::bracket_coeff`] for callers that already know the parity pair is covered.
    pub(crate) fn coeff(&self, x: &BasisIndex, y: &BasisIndex) -> F {
        self.bracket_coeff(x, y).expect("parity pair checked by caller").0
    }

    pub fn bracket_basis(&self, x: &BasisIndex, y: &BasisIndex) -> Result<SparseVector<F>, AlgebraError> {
        let (c, out) = self.bracket_coeff(x, y)?;
        Ok(SparseVector::term(out, c))
    }

    pub fn bracket_vec(&self, u: &SparseVector<F>, v: &SparseVector<F>) -> Result<SparseVector<F>, AlgebraError> {
        let mut out = SparseVector::zero();
        for (x, a) in u.iter() {
            for (y, b) in v.iter() {
                let (c, z) = self.bracket_coeff(x, y)?;
                if !c.is_zero() {
                    out.add_term(z, c.mul(a).mul(b));
                }
            }
        }
        Ok(out)
    }

    /// Precomputes `[a, b]` for `a` in `left`, `b` in `right` and the swapped pairs.
    pub fn cache(&self, left: &[BasisIndex], right: &[BasisIndex]) -> BracketCache<'_, F> {
        let mut map = HashMap::with_capacity(2 * left.len() * right.len());
        for a in left {
            for b in right {
                for (x, y) in [(a, b), (b, a)] {
                    if let Ok((c, _)) = self.bracket_coeff(x, y) {
                        map.entry((*x, *y)).or_insert(c);
                    }
                }
            }
        }
        BracketCache { alg: self, map }
    }

    pub(crate) fn check_parities(&self) -> Result<(), AlgebraError> {
        let pairs: &[(Parity, Parity)] = if self.spec.is_super {
            &[(Parity::Even, Parity::Even), (Parity::Even, Parity::Odd), (Parity::Odd, Parity::Odd)]
        } else {
            &[(Parity::Even, Parity::Even)]
        };
        for &(a, b) in pairs {
            self.bracket_coeff(&BasisIndex::new(a, 0, 0), &BasisIndex::new(b, 0, 0))?;
        }
        Ok(())
    }

    /// Checks `[x,y] + (-1)^{|x||y|}[y,x] = 0` for all basis pairs in `w`.
    pub fn verify_antisymmetry(&self, w: &Window) -> Result<VerificationReport, AlgebraError> {
        self.check_parities()?;
        let basis = w.basis(self.spec.is_super);
        Ok(par_check(&basis, |x| {
            let mut b = ReportBuilder::new();
            for y in &basis {
                b.checked += 1;
                let (cxy, z) = self.bracket_coeff(x, y).expect("checked");
                let cyx = self.coeff(y, x).scale_int(Parity::sign(x.parity, y.parity));
                if !cxy.add(&cyx).is_zero() {
                    b.push(Violation {
                        indices: vec![*x, *y],
                        lhs: SparseVector::term(z, cxy).to_string(),
                        rhs: SparseVector::term(z, cyx.neg()).to_string(),
                    });
                }
            }
            b
        }))
    }

    /// Checks `[x,[y,z]] = [[x,y],z] + (-1)^{|x||y|}[y,[x,z]]` for all basis triples in `w`.
    pub fn verify_jacobi(&self, w: &Window) -> Result<VerificationReport, AlgebraError> {
        self.check_parities()?;
        let basis = w.basis(self.spec.is_super);
        let cache = self.cache(&basis, &w.doubled().basis(self.spec.is_super));
        Ok(par_check(&basis, |x| {
            let mut b = ReportBuilder::new();
            for y in &basis {
                let (cxy, xy) = cache.get(x, y);
                let sign = Parity::sign(x.parity, y.parity);
                for z in &basis {
                    b.checked += 1;
                    let (cyz, yz) = cache.get(y, z);
                    let (cxz, xz) = cache.get(x, z);
                    let lhs = if cyz.is_zero() { F::zero() } else { cyz.mul(&cache.get(x, &yz).0) };
                    let r1 = if cxy.is_zero() { F::zero() } else { cxy.mul(&cache.get(&xy, z).0) };
                    let r2 = if cxz.is_zero() { F::zero() } else { cxz.mul(&cache.get(y, &xz).0).scale_int(sign) };
                    let rhs = r1.add(&r2);
                    if lhs != rhs {
                        let out = BasisIndex::new(x.parity.plus(y.parity).plus(z.parity), x.m + y.m + z.m, x.i + y.i + z.i);
                        b.push(Violation {
                            indices: vec![*x, *y, *z],
                            lhs: SparseVector::term(out, lhs).to_string(),
                            rhs: SparseVector::term(out, rhs).to_string(),
                        });
                    }
                }
            }
            b
        }))
    }
}

/// Memoized bracket coefficients; misses fall back to direct evaluation.
pub struct BracketCache<'a, F> {
    alg: &'a Algebra<F>,
    map: HashMap<(BasisIndex, BasisIndex), F>,
}

impl<F: Field> BracketCache<'_, F> {
    /// Coefficient and output index of `[x, y]`. The parity pair must be covered by the spec.
    pub fn get(&self, x: &BasisIndex, y: &BasisIndex) -> (F, BasisIndex) {
        let out = BasisIndex::new(x.parity.plus(y.parity), x.m + y.m, x.i + y.i);
        match self.map.get(&(*x, *y)) {
            Some(c) => (c.clone(), out),
            None => (self.alg.coeff(x, y), out),
        }
    }

    pub fn algebra(&self) -> &Algebra<F> {
        self.alg
    }
}
