//! States of the truncated algebra and estimates of the distance between
//! them, with certified lower bounds.

mod estimate;
mod state;

pub use estimate::{metric_estimate, metric_table, Denominator, MetricEstimate, MetricOptions, MetricTable};
pub use state::{state_eval, StateSpec, STATE_TOL};
