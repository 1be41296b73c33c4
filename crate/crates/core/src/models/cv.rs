//! Normal coefficient of variation `θ = σ/μ`.
//!
//! Inference uses the reduced association `t = F⁻¹_{n,1/θ}(U)` with
//! `t = √n·x̄/S`, where `F_{n,ψ}` is the non-central t distribution function
//! with `n − 1` degrees of freedom and noncentrality `√n·ψ`. All root finding
//! happens in `ψ = 1/θ`, where `F` is monotone; sets are mapped back to `θ`
//! through the reciprocal, so a `ψ`-interval containing `0` becomes a pair of
//! unbounded `θ`-intervals.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{Association, AuxiliaryInterval, SingletonPlausibility};
use crate::error::{ImError, Result};
use crate::models::ConsonantModel;
use crate::nct::{NoncentralT, MAX_NONCENTRALITY};
use crate::paramset::{Endpoint, ParamSet};

/// `t = √n · x̄ / S` together with the sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvStatistic {
    pub t: f64,
    pub n: usize,
}

/// The marginal association for samples of size `n`.
#[derive(Debug, Clone)]
pub struct CvAssociation {
    n: usize,
    sqrt_n: f64,
    nct: Arc<NoncentralT>,
}

pub fn cv_association(n: usize) -> Result<CvAssociation> {
    CvAssociation::new(n)
}

impl CvAssociation {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(ImError::InvalidArgument(format!("sample size {n} is below 2")));
        }
        let dof = u32::try_from(n - 1).map_err(|_| ImError::InvalidArgument("sample size too large".into()))?;
        Ok(CvAssociation { n, sqrt_n: (n as f64).sqrt(), nct: NoncentralT::cached(dof)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `F_{n,ψ}(t)`.
    pub fn cdf_at_psi(&self, t: f64, psi: f64) -> Result<f64> {
        self.nct.cdf(t, self.sqrt_n * psi)
    }

    /// `ψ` with `F_{n,ψ}(t) = p`.
    pub fn solve_psi(&self, t: f64, p: f64) -> Result<f64> {
        Ok(self.nct.solve_noncentrality(t, p)? / self.sqrt_n)
    }

    /// Largest `|ψ|` whose noncentrality is in the supported range.
    pub fn max_abs_psi(&self) -> f64 {
        MAX_NONCENTRALITY / self.sqrt_n
    }

    /// `F_{n,ψ}(t)` with `ψ = ±∞` mapped to the limits `0`/`1` and `ψ`
    /// beyond the supported range pulled back to its edge. Pulling back moves
    /// the value toward `0.5`, so plausibility suprema computed from it can
    /// only grow.
    fn cdf_clamped(&self, t: f64, psi: f64) -> Result<f64> {
        if psi == f64::INFINITY {
            return Ok(0.0);
        }
        if psi == f64::NEG_INFINITY {
            return Ok(1.0);
        }
        let delta = (self.sqrt_n * psi).clamp(-MAX_NONCENTRALITY, MAX_NONCENTRALITY);
        self.nct.cdf(t, delta)
    }

    fn check(&self, stat: &CvStatistic) -> Result<()> {
        if stat.n != self.n {
            return Err(ImError::InvalidArgument(format!(
                "statistic computed for n = {}, association built for n = {}",
                stat.n, self.n
            )));
        }
        Ok(())
    }

    /// Singleton plausibility with `θ = 0` and `|√n/θ|` beyond the supported
    /// noncentrality assigned by continuous extension.
    ///
    /// As `θ → 0±` the plausibility tends to `0` from both sides; that common
    /// limit is returned for `θ = 0`. Beyond the supported range, the value at
    /// the range edge bounds the plausibility from above and is returned when
    /// it is below `1e-12`; otherwise `RangeExceeded` is propagated.
    pub fn singleton_plausibility_extended(&self, t: f64, theta: f64) -> Result<f64> {
        if theta == 0.0 {
            return Ok(0.0);
        }
        match plausibility_from_cdf(self.cdf_at_psi(t, 1.0 / theta)) {
            Err(ImError::RangeExceeded { what, value }) => {
                let edge = plausibility_from_cdf(self.cdf_clamped(t, 1.0 / theta))?;
                if edge < 1e-12 {
                    Ok(edge)
                } else {
                    Err(ImError::RangeExceeded { what, value })
                }
            }
            other => other,
        }
    }
}

fn plausibility_from_cdf(f: Result<f64>) -> Result<f64> {
    f.map(|f| 1.0 - (2.0 * f - 1.0).abs())
}

impl Association for CvAssociation {
    /// The `u`-quantile of `t` under `θ`.
    fn forward(&self, theta: f64, u: f64) -> Result<f64> {
        if theta == 0.0 {
            return Err(ImError::ThetaZero);
        }
        self.nct.quantile(u, self.sqrt_n / theta)
    }

    fn focal_param_set(&self, x: f64, s: AuxiliaryInterval) -> Result<ParamSet> {
        // F is decreasing in ψ: the upper u end gives the lower ψ end.
        let psi_lo = self.solve_psi(x, s.hi())?;
        let psi_hi = if s.lo() == s.hi() { psi_lo } else { self.solve_psi(x, s.lo())? };
        Ok(ParamSet::reciprocal_image(Endpoint::closed(psi_lo), Endpoint::closed(psi_hi)))
    }
}

impl SingletonPlausibility for CvAssociation {
    fn singleton_plausibility(&self, x: f64, theta: f64) -> Result<f64> {
        if theta == 0.0 {
            return Err(ImError::ThetaZero);
        }
        plausibility_from_cdf(self.cdf_at_psi(x, 1.0 / theta))
    }
}

impl ConsonantModel for CvAssociation {
    fn sup_plausibility(&self, x: f64, set: &ParamSet) -> Result<f64> {
        let mut best: f64 = 0.0;
        for c in set.closure().components() {
            // θ-component to ψ-components; θ = ±∞ corresponds to ψ = 0.
            let psi_set = ParamSet::reciprocal_image(c.lo, c.hi);
            let mut psi_parts: Vec<(f64, f64)> = psi_set
                .components()
                .iter()
                .map(|p| (p.lo.value, p.hi.value))
                .collect();
            if c.lo.value == f64::NEG_INFINITY || c.hi.value == f64::INFINITY {
                psi_parts.push((0.0, 0.0));
            }
            for (lo, hi) in psi_parts {
                let f_lo = self.cdf_clamped(x, lo)?;
                let f_hi = self.cdf_clamped(x, hi)?;
                let sup = if f_hi <= 0.5 && 0.5 <= f_lo {
                    1.0
                } else if f_hi > 0.5 {
                    2.0 * (1.0 - f_hi)
                } else {
                    2.0 * f_lo
                };
                best = best.max(sup);
            }
        }
        Ok(best.min(1.0))
    }
}

/// `p_X({θ}) = 1 − |2 F_{n,1/θ}(t_X) − 1|`.
pub fn cv_singleton_plausibility(stat: &CvStatistic, theta: f64) -> Result<f64> {
    let assoc = CvAssociation::new(stat.n)?;
    assoc.singleton_plausibility(stat.t, theta)
}

/// `{θ : α/2 < F_{n,1/θ}(t_X) < 1 − α/2}`, with boundary points excluded.
pub fn cv_plausibility_interval(stat: &CvStatistic, alpha: f64) -> Result<ParamSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ImError::InvalidArgument(format!("alpha {alpha} is not in (0, 1)")));
    }
    let assoc = CvAssociation::new(stat.n)?;
    assoc.check(stat)?;
    let psi_lo = assoc.solve_psi(stat.t, 1.0 - 0.5 * alpha)?;
    let psi_hi = assoc.solve_psi(stat.t, 0.5 * alpha)?;
    Ok(ParamSet::reciprocal_image(Endpoint::open(psi_lo), Endpoint::open(psi_hi)))
}
