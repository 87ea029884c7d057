use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{ball_operator, FilteredVector};
use crate::groups::{ball_sizes, Ball, GroupModel};
use crate::linop::{op_norm, NormOptions};
use crate::util::C64;

/// Total increase over the trend window that counts as unbounded growth.
pub const TREND_FACTOR: f64 = 1.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Bounded,
    Increasing,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthObstruction {
    pub model: String,
    pub sizes: Vec<usize>,
    /// `|B_p| / (p+1)^3`.
    pub ratios: Vec<f64>,
    /// First index of the trend window.
    pub window_start: usize,
    /// Last ratio over first ratio in the window.
    pub factor: f64,
    pub monotone: bool,
    pub verdict: Trend,
}

/// Tests whether `|B_p| / (p+1)^3` stays bounded, as it must for an amenable
/// group with a Haagerup-type condition. The verdict is `Increasing` when
/// the ratio grows by at least `TREND_FACTOR` over the last `ceil(p_max/2)`
/// points.
pub fn growth_obstruction(model: &GroupModel, p_max: usize) -> Result<GrowthObstruction> {
    if !model.is_amenable() {
        return Err(Error::Refused(format!(
            "{} is not amenable; the cubic growth bound only applies to amenable groups",
            model.kind()
        )));
    }
    if p_max < 2 {
        return Err(Error::InvalidParameter(format!("p_max must be at least 2, got {p_max}")));
    }
    let sizes = ball_sizes(model, p_max)?;
    let ratios: Vec<f64> = sizes
        .iter()
        .enumerate()
        .map(|(p, &b)| b as f64 / ((p + 1) as f64).powi(3))
        .collect();
    let window_start = p_max + 1 - p_max.div_ceil(2);
    let window = &ratios[window_start..];
    let factor = window[window.len() - 1] / window[0];
    let monotone = window.windows(2).all(|w| w[1] >= w[0]);
    Ok(GrowthObstruction {
        model: model.kind().to_string(),
        sizes,
        ratios,
        window_start,
        factor,
        monotone,
        verdict: if factor >= TREND_FACTOR { Trend::Increasing } else { Trend::Bounded },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChiNorms {
    pub model: String,
    pub p: usize,
    /// `|B_p|`, which equals `|chi_p|` for amenable groups.
    pub ball_size: usize,
    pub amenable: bool,
    /// `(R, |chi_p|` compressed to `l2(B_R))`.
    pub norms: Vec<(usize, f64)>,
    pub monotone: bool,
    pub warning: Option<String>,
}

/// Norms of convolution by the indicator of `B_p` compressed to growing
/// balls. Each is a lower bound for the norm of the indicator, which is
/// `|B_p|` exactly when the group is amenable.
pub fn amenable_chi_norm(model: &GroupModel, p: usize, radii: &[usize], opts: NormOptions) -> Result<ChiNorms> {
    let ball_p = Ball::new(model, p)?;
    let chi = FilteredVector::from_ball_coefficients(model, &ball_p, &vec![C64::new(1.0, 0.0); ball_p.len()])?;
    let mut radii = radii.to_vec();
    radii.sort_unstable();
    let norms = radii
        .iter()
        .map(|&r| {
            let ball = Ball::new(model, r.max(p))?;
            Ok((r, op_norm(&ball_operator(model, &chi, &ball)?, opts)?.value))
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = norms.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - 1e-9));
    let amenable = model.is_amenable();
    Ok(ChiNorms {
        model: model.kind().to_string(),
        p,
        ball_size: ball_sizes(model, p)?[p],
        amenable,
        norms,
        monotone,
        warning: (!amenable).then(|| {
            format!(
                "{} is not amenable: the values are lower bounds for |chi_p| but need not approach |B_p|",
                model.kind()
            )
        }),
    })
}
