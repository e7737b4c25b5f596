//! Exact arithmetic for the Z×Z-graded Block Lie algebra B(q) and superalgebra S(q).
//!
//! Brackets come from polynomial structure-constant rules (see [`specdsl`]); all
//! coefficients are exact rationals or rational functions in a formal `q`.

pub mod algebra;
pub mod halfder;
pub mod homlie;
pub mod report;
pub mod scalar;
pub mod specdsl;
pub mod tpverify;

pub use algebra::{Algebra, AlgebraError, AlgebraSpec, BasisIndex, Parity, SparseVector, Window};
pub use report::{VerificationReport, Violation};
pub use scalar::{Field, QMode, RatFunc, Rational, Scalar, ScalarError};
