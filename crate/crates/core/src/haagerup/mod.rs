//! Estimation of Haagerup-type constants: block-ratio searches, the exact
//! witness against `Z^2`, growth obstructions for amenable groups and the
//! constant predicted from the hyperbolicity defect.

mod audit;
mod growth;
mod ratio;
mod search;
mod witness;

pub use audit::{hyperbolic_audit, HyperbolicAudit};
pub use growth::{amenable_chi_norm, growth_obstruction, ChiNorms, GrowthObstruction, Trend, TREND_FACTOR};
pub use ratio::{
    best_ratio, haagerup_scan, known_ceiling, reproduce, scan_triples, witness_vector, HaagerupReport,
};
pub use search::{maximize_table, table_ratio, SearchResult, Strategy};
pub use witness::{z2_witness, Z2Witness};
