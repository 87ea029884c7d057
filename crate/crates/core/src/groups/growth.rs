use serde::{Deserialize, Serialize};

use super::model::GroupModel;
use super::ball_sizes;
use crate::error::{Error, Result};

/// Relative residual under which `log |B_p|` counts as affine in `p`.
pub const EXPONENTIAL_RESIDUAL_TOL: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "slope")]
pub enum GrowthClass {
    Polynomial(f64),
    Exponential,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthReport {
    pub sizes: Vec<usize>,
    /// Window `[p_lo, p_max]` used by both fits.
    pub window: (usize, usize),
    /// Least-squares slope of `log |B_p|` against `log p`.
    pub loglog_slope: f64,
    /// RMS residual of the log-log fit.
    pub loglog_rms: f64,
    /// RMS residual of the fit of `log |B_p|` against `p`, divided by the
    /// spread of `log |B_p|` over the window.
    pub semilog_relative_rms: f64,
    pub semilog_rms: f64,
    pub classification: GrowthClass,
}

/// Fits `log |B_p|` over `p in [ceil(p_max/2), p_max]` both against `log p`
/// and against `p`.
///
/// Growth is classified exponential when the affine-in-`p` fit has relative
/// residual at most [`EXPONENTIAL_RESIDUAL_TOL`] and fits better than the
/// power law; otherwise it is polynomial with the log-log slope.
pub fn growth_exponent(model: &GroupModel, p_max: usize) -> Result<GrowthReport> {
    if p_max < 4 {
        return Err(Error::InvalidParameter(format!("growth needs p_max >= 4, got {p_max}")));
    }
    let sizes = ball_sizes(model, p_max)?;
    let lo = p_max.div_ceil(2).max(1);
    let ps: Vec<f64> = (lo..=p_max).map(|p| p as f64).collect();
    let logb: Vec<f64> = (lo..=p_max).map(|p| (sizes[p] as f64).ln()).collect();
    let logp: Vec<f64> = ps.iter().map(|p| p.ln()).collect();

    let (loglog_slope, loglog_rms) = least_squares(&logp, &logb);
    let (_, semilog_rms) = least_squares(&ps, &logb);
    let spread = logb.iter().cloned().fold(f64::MIN, f64::max)
        - logb.iter().cloned().fold(f64::MAX, f64::min);
    let semilog_relative_rms = if spread > 0.0 { semilog_rms / spread } else { f64::INFINITY };
    let classification =
        if semilog_relative_rms <= EXPONENTIAL_RESIDUAL_TOL && semilog_rms < loglog_rms {
            GrowthClass::Exponential
        } else {
            GrowthClass::Polynomial(loglog_slope)
        };
    Ok(GrowthReport {
        sizes,
        window: (lo, p_max),
        loglog_slope,
        loglog_rms,
        semilog_relative_rms,
        semilog_rms,
        classification,
    })
}

/// Slope and RMS residual of the least-squares line through `(x, y)`.
fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - icpt - slope * a).powi(2))
        .sum();
    (slope, (rss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_model, ModelKind};

    #[test]
    fn z2_is_quadratic() {
        let g = make_model(ModelKind::Zd(2)).unwrap();
        let rep = growth_exponent(&g, 20).unwrap();
        for p in 0..=20 {
            assert_eq!(rep.sizes[p], 2 * p * p + 2 * p + 1);
        }
        match rep.classification {
            GrowthClass::Polynomial(s) => assert!((1.8..=2.2).contains(&s), "{s}"),
            GrowthClass::Exponential => panic!("Z^2 classified exponential: {rep:?}"),
        }
    }

    #[test]
    fn free_group_is_exponential() {
        let g = make_model(ModelKind::Free(2)).unwrap();
        let rep = growth_exponent(&g, 8).unwrap();
        for p in 0..=8u32 {
            assert_eq!(rep.sizes[p as usize], 2 * 3usize.pow(p) - 1);
        }
        assert_eq!(rep.classification, GrowthClass::Exponential);
    }

    #[test]
    fn rejects_short_range() {
        let g = make_model(ModelKind::Zd(2)).unwrap();
        assert!(growth_exponent(&g, 3).is_err());
    }
}
