//! ½-(super)derivations: constraint systems, exact null spaces, window stabilization and
//! the named maps id, α, β, γ, δ, ε.

mod classify;
mod constraints;
mod linalg;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use classify::{classify, stabilize, ClassificationReport, DegreeReport, Stabilized, TableEntry};
pub use constraints::{build_constraints, check_map, solve, ConstraintRow, ConstraintSystem, RowOrigin};
pub use linalg::{null_space, rref, span_contains, span_intersection, Echelon, NullSpaceBasis, PivotRule};

use crate::algebra::{AlgebraError, BasisIndex, Parity, Window};
use crate::scalar::{Field, QMode, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HalfDerError {
    #[error("odd maps need a superalgebra; {0} has no odd part")]
    OddMapOnNonSuper(String),
    #[error("{map} needs {requirement}, but q = {q}")]
    IntegralityViolation { map: NamedMap, requirement: &'static str, q: QMode },
    #[error("{map} is only defined at q = 0, not q = {q}")]
    WrongQ { map: NamedMap, q: QMode },
    #[error("{0} acts on the odd part and needs a superalgebra")]
    RequiresSuper(NamedMap),
    #[error("unknown map {0:?} (expected id, alpha, beta, gamma, delta or epsilon)")]
    UnknownMap(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Degree of a homogeneous map: parity shift plus Z×Z shift `(r, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MapDegree {
    pub parity_shift: Parity,
    pub r: i64,
    pub s: i64,
}

impl MapDegree {
    pub const fn new(parity_shift: Parity, r: i64, s: i64) -> Self {
        MapDegree { parity_shift, r, s }
    }

    pub const fn even(r: i64, s: i64) -> Self {
        MapDegree::new(Parity::Even, r, s)
    }

    pub const fn odd(r: i64, s: i64) -> Self {
        MapDegree::new(Parity::Odd, r, s)
    }

    pub fn target(&self, x: &BasisIndex) -> BasisIndex {
        x.shifted(self.parity_shift, self.r, self.s)
    }
}

impl fmt::Display for MapDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.parity_shift, self.r, self.s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NamedMap {
    Identity,
    Alpha,
    Beta,
    Gamma,
    Delta,
    Epsilon,
}

impl NamedMap {
    pub const ALL: [NamedMap; 6] =
        [NamedMap::Identity, NamedMap::Alpha, NamedMap::Beta, NamedMap::Gamma, NamedMap::Delta, NamedMap::Epsilon];

    pub fn name(self) -> &'static str {
        match self {
            NamedMap::Identity => "id",
            NamedMap::Alpha => "alpha",
            NamedMap::Beta => "beta",
            NamedMap::Gamma => "gamma",
            NamedMap::Delta => "delta",
            NamedMap::Epsilon => "epsilon",
        }
    }

    /// Degree at a fixed `q`, assuming the map is defined there.
    fn degree(self, q: &Rational) -> MapDegree {
        let half = |k: i64| (q * &Rational::new(k, 2).expect("nonzero")).to_i64().expect("validated integrality");
        match self {
            NamedMap::Identity | NamedMap::Beta => MapDegree::even(0, 0),
            NamedMap::Alpha => MapDegree::even(0, half(2)),
            NamedMap::Gamma => MapDegree::odd(0, half(1)),
            NamedMap::Delta | NamedMap::Epsilon => MapDegree::odd(0, 0),
        }
    }
}

impl fmt::Display for NamedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedMap {
    type Err = HalfDerError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "id" | "identity" => NamedMap::Identity,
            "alpha" => NamedMap::Alpha,
            "beta" => NamedMap::Beta,
            "gamma" => NamedMap::Gamma,
            "delta" => NamedMap::Delta,
            "epsilon" => NamedMap::Epsilon,
            other => return Err(HalfDerError::UnknownMap(other.to_string())),
        })
    }
}

/// A named closed form with a scalar weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedRule<F> {
    pub name: NamedMap,
    pub weight: F,
}

/// A homogeneous linear map: source `x` goes to `d(x) * target(x)`.
/// Sources missing from `table` map to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap<F> {
    pub degree: MapDegree,
    pub table: BTreeMap<BasisIndex, F>,
    pub rule: Option<NamedRule<F>>,
}

impl<F: Field> GradedMap<F> {
    pub fn new(degree: MapDegree) -> Self {
        GradedMap { degree, table: BTreeMap::new(), rule: None }
    }

    pub fn with_entry(mut self, x: BasisIndex, d: F) -> Self {
        self.set(x, d);
        self
    }

    pub fn set(&mut self, x: BasisIndex, d: F) {
        if d.is_zero() {
            self.table.remove(&x);
        } else {
            self.table.insert(x, d);
        }
    }

    pub fn d(&self, x: &BasisIndex) -> F {
        self.table.get(x).cloned().unwrap_or_else(F::zero)
    }

    /// `φ(x)` as coefficient and target, or `None` when zero.
    pub fn image(&self, x: &BasisIndex) -> Option<(F, BasisIndex)> {
        self.table.get(x).map(|d| (d.clone(), self.degree.target(x)))
    }

    pub fn restrict(&self, w: &Window) -> Self {
        GradedMap {
            degree: self.degree,
            table: self.table.iter().filter(|(x, _)| w.contains_index(x)).map(|(x, d)| (*x, d.clone())).collect(),
            rule: self.rule.clone(),
        }
    }

    pub fn scaled(&self, c: &F) -> Self {
        let mut out = GradedMap::new(self.degree);
        for (x, d) in &self.table {
            out.set(*x, d.mul(c));
        }
        out.rule = self.rule.as_ref().map(|r| NamedRule { name: r.name, weight: r.weight.mul(c) });
        out
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }
}

fn fixed_q(map: NamedMap, mode: &QMode, requirement: &'static str) -> Result<Rational, HalfDerError> {
    mode.fixed().cloned().ok_or(HalfDerError::IntegralityViolation { map, requirement, q: mode.clone() })
}

/// The closed-form map `name` at this `q`, tabulated on `w`.
pub fn builtin_map<F: Field>(name: NamedMap, mode: &QMode, w: &Window, is_super: bool) -> Result<GradedMap<F>, HalfDerError> {
    let q_zero = || -> Result<(), HalfDerError> {
        match mode.fixed() {
            Some(q) if q.is_zero() => Ok(()),
            _ => Err(HalfDerError::WrongQ { map: name, q: mode.clone() }),
        }
    };
    let needs_super = || if is_super { Ok(()) } else { Err(HalfDerError::RequiresSuper(name)) };
    let one = F::one();
    let map = match name {
        NamedMap::Identity => {
            let mut m = GradedMap::new(MapDegree::even(0, 0));
            for x in w.basis(is_super) {
                m.set(x, one.clone());
            }
            m
        }
        NamedMap::Alpha => {
            let q = fixed_q(name, mode, "q an integer")?;
            let qi = q.to_i64().ok_or(HalfDerError::IntegralityViolation {
                map: name,
                requirement: "q an integer",
                q: mode.clone(),
            })?;
            GradedMap::new(name.degree(&q)).with_entry(BasisIndex::even(0, -2 * qi), one.clone())
        }
        NamedMap::Beta => {
            q_zero()?;
            needs_super()?;
            GradedMap::new(MapDegree::even(0, 0)).with_entry(BasisIndex::odd(0, 0), one.clone())
        }
        NamedMap::Gamma => {
            needs_super()?;
            let req = "q in 2Z so that the source index (0,-3q/2) is integral";
            let q = fixed_q(name, mode, req)?;
            let qi = q.to_i64().filter(|k| k % 2 == 0).ok_or(HalfDerError::IntegralityViolation {
                map: name,
                requirement: req,
                q: mode.clone(),
            })?;
            GradedMap::new(name.degree(&q)).with_entry(BasisIndex::odd(0, -3 * qi / 2), one.clone())
        }
        NamedMap::Delta => {
            q_zero()?;
            needs_super()?;
            GradedMap::new(MapDegree::odd(0, 0)).with_entry(BasisIndex::even(0, 0), one.clone())
        }
        NamedMap::Epsilon => {
            q_zero()?;
            needs_super()?;
            let mut m = GradedMap::new(MapDegree::odd(0, 0));
            for x in w.basis(false) {
                m.set(x, one.clone());
            }
            m
        }
    };
    let mut map = map.restrict(w);
    map.rule = Some(NamedRule { name, weight: one });
    Ok(map)
}
