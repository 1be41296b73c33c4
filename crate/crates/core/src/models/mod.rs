//! Concrete associations: the unit-variance normal mean and the normal
//! coefficient of variation.

mod cv;
mod data;
mod normal_mean;

pub use cv::{
    cv_association, cv_plausibility_interval, cv_singleton_plausibility, CvAssociation, CvStatistic,
};
pub use data::{cv_statistic, parse_dataset, Dataset, SufficientStats};
pub use normal_mean::{
    normal_mean_association, normal_mean_belief_closed, normal_mean_plausibility_interval,
    NormalMeanAssociation, U_CLAMP,
};

use crate::engine::SingletonPlausibility;
use crate::error::Result;
use crate::paramset::ParamSet;

/// A model whose focal sets under the default random set are nested, so
/// that belief and plausibility follow from the singleton plausibility
/// contour alone.
pub trait ConsonantModel: SingletonPlausibility {
    /// Supremum of the singleton plausibility over the closure of `set`;
    /// `0` for the empty set.
    fn sup_plausibility(&self, x: f64, set: &ParamSet) -> Result<f64>;

    /// Exact `(belief, plausibility)` of `assertion` for the default random
    /// set: `belief(A) = 1 − sup over Aᶜ`, `plausibility(A) = sup over A`.
    fn belief_closed(&self, x: f64, assertion: &ParamSet) -> Result<(f64, f64)> {
        let outside = self.sup_plausibility(x, &assertion.complement())?;
        let inside = self.sup_plausibility(x, assertion)?;
        Ok((1.0 - outside, inside))
    }
}
