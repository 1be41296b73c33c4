use crate::engine::{Association, AuxiliaryInterval, SingletonPlausibility};
use crate::error::{ImError, Result};
use crate::models::ConsonantModel;
use crate::paramset::{Interval, ParamSet};
use crate::special::{norm_cdf, norm_quantile};

/// Auxiliary values are kept this far inside `(0, 1)` before inversion.
pub const U_CLAMP: f64 = 1e-15;

/// `X = θ + Φ⁻¹(U)`, i.e. `X ~ N(θ, 1)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NormalMeanAssociation;

pub fn normal_mean_association() -> NormalMeanAssociation {
    NormalMeanAssociation
}

fn clamped_quantile(u: f64) -> f64 {
    norm_quantile(u.clamp(U_CLAMP, 1.0 - U_CLAMP))
}

impl Association for NormalMeanAssociation {
    fn forward(&self, theta: f64, u: f64) -> Result<f64> {
        Ok(theta + clamped_quantile(u))
    }

    fn focal_param_set(&self, x: f64, s: AuxiliaryInterval) -> Result<ParamSet> {
        let lo = x - clamped_quantile(s.hi());
        let hi = x - clamped_quantile(s.lo());
        Interval::closed(lo, hi)
            .map(ParamSet::from)
            .ok_or(ImError::EmptyFocalSet)
    }
}

impl SingletonPlausibility for NormalMeanAssociation {
    fn singleton_plausibility(&self, x: f64, theta: f64) -> Result<f64> {
        Ok(1.0 - (2.0 * norm_cdf(x - theta) - 1.0).abs())
    }
}

impl ConsonantModel for NormalMeanAssociation {
    fn sup_plausibility(&self, x: f64, set: &ParamSet) -> Result<f64> {
        let dist = set
            .closure()
            .components()
            .iter()
            .map(|c| {
                if c.contains(x) {
                    0.0
                } else if x < c.lo.value {
                    c.lo.value - x
                } else {
                    x - c.hi.value
                }
            })
            .fold(f64::INFINITY, f64::min);
        Ok(if dist.is_infinite() { 0.0 } else { 2.0 * norm_cdf(-dist) })
    }
}

/// Exact belief and plausibility of `(−∞, θ₀]` under the default random set.
pub fn normal_mean_belief_closed(x: f64, theta0: f64) -> (f64, f64) {
    let c = norm_cdf(theta0 - x);
    ((2.0 * c - 1.0).max(0.0), (2.0 * c).min(1.0))
}

/// `{θ : p_x({θ}) > α} = (x − z, x + z)` with `z = Φ⁻¹(1 − α/2)`.
pub fn normal_mean_plausibility_interval(x: f64, alpha: f64) -> Result<ParamSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ImError::InvalidArgument(format!("alpha {alpha} is not in (0, 1)")));
    }
    let z = norm_quantile(1.0 - 0.5 * alpha);
    Ok(Interval::open(x - z, x + z).map_or_else(ParamSet::empty, ParamSet::from))
}
