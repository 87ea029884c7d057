use serde::Serialize;

use crate::error::Result;
use crate::groups::{ball_sizes, four_point_delta, DeltaMode, GroupModel};
use crate::haagerup::{best_ratio, HaagerupReport, Strategy};
use crate::linop::NormOptions;
use crate::par;

#[derive(Clone, Debug, Serialize)]
pub struct HyperbolicAudit {
    pub model: String,
    pub delta_radius: usize,
    pub delta: usize,
    /// `|B_{1+2 delta}|`, the constant bounding `|f * xi|_2 / (|f|_2 |xi|_2)`.
    pub predicted: usize,
    /// The square of `predicted`, the constant obtained after the final
    /// count over the splitting.
    pub predicted_squared: usize,
    pub reports: Vec<HaagerupReport>,
    pub max_ratio: f64,
    pub within_predicted: bool,
}

/// Compares observed block ratios against the constant predicted from the
/// hyperbolicity defect measured on `B_{R_delta}`.
pub fn hyperbolic_audit(
    model: &GroupModel,
    delta_radius: usize,
    triples: &[(usize, usize, usize)],
    strategy: Strategy,
    opts: NormOptions,
) -> Result<HyperbolicAudit> {
    let delta = four_point_delta(model, delta_radius, DeltaMode::Exhaustive)?.delta;
    let predicted = ball_sizes(model, 1 + 2 * delta)?[1 + 2 * delta];
    let reports = par::map_slice(triples, |&(k, m, n)| best_ratio(model, k, m, n, strategy, opts))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(HyperbolicAudit {
        model: model.kind().to_string(),
        delta_radius,
        delta,
        predicted,
        predicted_squared: predicted * predicted,
        max_ratio,
        within_predicted: max_ratio <= predicted as f64 + 1e-8,
        reports,
    })
}
