//! Finite complex matrices, operator-norm estimation and exact rational
//! arithmetic.

mod norm;
mod rational;
mod sparse;
mod trilinear;

pub use norm::{op_norm, NormEstimate, NormOptions};
pub use rational::{exact_apply, rational, Rational, RationalSparseMatrix};
pub use sparse::SparseMatrix;
pub use trilinear::{Term, TriTable};
