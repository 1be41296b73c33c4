//! Default-prior Bayes posterior for the coefficient of variation.
//!
//! Under `π(μ, σ²) ∝ 1/σ²` the posterior given `(x̄, s, n)` is
//! `(n − 1)s²/σ² ~ ChiSq(n − 1)` and `μ | σ² ~ N(x̄, σ²/n)`. Each exact draw
//! of `(μ, σ)` is mapped to `θ = σ/μ`.

use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::engine::Assertion;
use crate::error::{ImError, Result};
use crate::models::{Dataset, SufficientStats};
use crate::rng::stream_rng;

/// Smallest accepted number of posterior draws.
pub const MIN_POSTERIOR_DRAWS: u64 = 10_000;

/// Posterior probability of `assertion` for `θ = σ/μ` given the data.
pub fn bayes_cv_posterior_probability(data: &Dataset, assertion: &Assertion, posterior_draws: u64, seed: u64) -> Result<f64> {
    bayes_cv_posterior_from_stats(&data.sufficient_stats()?, &[assertion], posterior_draws, seed)
        .map(|v| v[0])
}

/// Posterior probabilities of several assertions from one set of draws.
pub fn bayes_cv_posterior_from_stats(
    stats: &SufficientStats,
    assertions: &[&Assertion],
    posterior_draws: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    if posterior_draws < MIN_POSTERIOR_DRAWS {
        return Err(ImError::InvalidArgument(format!(
            "posterior draws {posterior_draws} below the minimum {MIN_POSTERIOR_DRAWS}"
        )));
    }
    let dof = (stats.n - 1) as f64;
    let chi = ChiSquared::new(dof).map_err(|e| ImError::InvalidArgument(e.to_string()))?;
    let scale_sq = dof * stats.sd * stats.sd;
    let sqrt_n = (stats.n as f64).sqrt();
    let mut rng = stream_rng(seed, 0);
    let mut hits = vec![0u64; assertions.len()];
    for _ in 0..posterior_draws {
        let sigma = (scale_sq / chi.sample(&mut rng)).sqrt();
        let z: f64 = StandardNormal.sample(&mut rng);
        let mu = stats.mean + sigma / sqrt_n * z;
        let theta = sigma / mu;
        for (h, a) in hits.iter_mut().zip(assertions) {
            if a.region.contains(theta) {
                *h += 1;
            }
        }
    }
    Ok(hits.into_iter().map(|h| h as f64 / posterior_draws as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paramset::ParamSet;

    #[test]
    fn whole_line_and_additivity() {
        let data = Dataset::new(vec![0.3, -0.4, 1.2, 0.8, 0.1, -0.2, 0.5, 0.9, 1.4, -0.6]).unwrap();
        let all = Assertion::new(ParamSet::real_line(), "all");
        assert_eq!(bayes_cv_posterior_probability(&data, &all, 10_000, 1).unwrap(), 1.0);
        let a = Assertion::parse("(-inf,9]").unwrap();
        let ac = a.complement();
        let v = bayes_cv_posterior_from_stats(&data.sufficient_stats().unwrap(), &[&a, &ac], 20_000, 5).unwrap();
        assert!((v[0] + v[1] - 1.0).abs() <= 1.0 / 20_000.0);
        assert!(bayes_cv_posterior_probability(&data, &a, 100, 1).is_err());
        let flat = Dataset::new(vec![2.0; 4]).unwrap();
        assert_eq!(bayes_cv_posterior_probability(&flat, &a, 10_000, 1), Err(ImError::DegenerateSample));
    }
}
