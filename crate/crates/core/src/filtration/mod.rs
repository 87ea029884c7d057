//! Group-algebra elements by sphere components, convolution blocks, the
//! band decomposition of commutators with the length operator, smoothing and
//! the growth inequalities implied by a Haagerup-type constant.

mod blocks;
mod dirac;
mod inequalities;
mod smoothing;
mod vector;

pub use blocks::{ball_operator, ball_table, block_table, conv_block};
pub use dirac::{
    dirac_bands, seminorm_lower, seminorm_upper, seminorm_upper_best, seminorm_upper_l1, BandDecomposition,
    BlockNorm, DiracBand, SeminormReport,
};
pub use inequalities::{check_growth_inequalities, Inequality, InequalityCheck, InequalityReport};
pub use smoothing::{phi_norm, smoothing, truncation_budget, zeta2_tail, Smoothing, SmoothingReport, TruncationBudget};
pub use vector::FilteredVector;

/// Default truncation radius for reports on an element of top degree `p`.
pub fn default_radius(p: usize) -> usize {
    p + (2 * p).max(4)
}
