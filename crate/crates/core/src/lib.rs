//! Word-length filtrations of group algebras and reduced free products at
//! finite truncation scale.
//!
//! The crate enumerates spheres of finitely generated groups, builds the
//! sphere-block operators `P_m a P_n` of convolution by a group-algebra
//! element, estimates their norms, and uses them to probe Haagerup-type
//! inequalities, commutators with the length Dirac operator and the
//! associated metric on states.

pub mod cli;
pub mod error;
pub mod filtration;
pub mod freeprod;
pub mod groups;
pub mod haagerup;
pub mod linop;
pub mod par;
pub mod qmetric;
pub mod util;

pub use error::{Error, Result};
