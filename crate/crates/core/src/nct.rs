//! Non-central Student-t distribution function.
//!
//! With `T = (Z + δ) / sqrt(V / k)`, `Z ~ N(0, 1)` and `V ~ ChiSq(k)`,
//! conditioning on `S = sqrt(V)` gives
//!
//! ```text
//! P(T <= t) = ∫ Φ(t·s/√k − δ) χ_k(s) ds
//! ```
//!
//! where `χ_k` is the chi density. The integral is evaluated with a
//! 129-node Gauss–Legendre rule on panels covering the chi quantiles at
//! `1e-14` and `1 − 1e-14`. Panels are split around the point where the
//! normal argument crosses zero, so the transition of `Φ` is resolved
//! even for large `|t|`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{ImError, Result};
use crate::roots::{newton_bracketed, Monotone};
use crate::special::{
    chi_square_lower_quantile, chi_square_upper_quantile, norm_cdf, norm_pdf, norm_quantile,
    GaussLegendre,
};

/// Largest supported `|δ|`.
pub const MAX_NONCENTRALITY: f64 = 100.0;

/// Tail probability cut from each end of the chi-square law.
const TAIL_CUT: f64 = 1e-14;

/// Absolute tolerance on `δ` for [`NoncentralT::solve_noncentrality`].
pub const NONCENTRALITY_TOL: f64 = 1e-9;

/// Degrees of freedom and noncentrality of a non-central t law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoncentralTSpec {
    pub dof: u32,
    pub noncentrality: f64,
}

impl NoncentralTSpec {
    pub fn new(dof: u32, noncentrality: f64) -> Result<Self> {
        if dof == 0 {
            return Err(ImError::InvalidArgument("degrees of freedom must be >= 1".into()));
        }
        Ok(NoncentralTSpec { dof, noncentrality })
    }
}

/// Non-central t family with fixed degrees of freedom.
///
/// Holds the truncated chi support and its log normalizer; the noncentrality
/// is supplied per call.
#[derive(Debug, Clone)]
pub struct NoncentralT {
    dof: u32,
    k: f64,
    sqrt_k: f64,
    s_lo: f64,
    s_hi: f64,
    log_norm: f64,
}

impl NoncentralT {
    pub fn new(dof: u32) -> Result<Self> {
        if dof == 0 {
            return Err(ImError::InvalidArgument("degrees of freedom must be >= 1".into()));
        }
        let k = dof as f64;
        let s_lo = chi_square_lower_quantile(k, TAIL_CUT).sqrt();
        let s_hi = chi_square_upper_quantile(k, TAIL_CUT).sqrt();
        let log_norm = (0.5 * k - 1.0) * std::f64::consts::LN_2 + ln_gamma(0.5 * k);
        Ok(NoncentralT { dof, k, sqrt_k: k.sqrt(), s_lo, s_hi, log_norm })
    }

    /// Shared instance for `dof`, built on first use.
    pub fn cached(dof: u32) -> Result<Arc<NoncentralT>> {
        static CACHE: OnceLock<RwLock<HashMap<u32, Arc<NoncentralT>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.read().expect("cache poisoned").get(&dof) {
            return Ok(Arc::clone(hit));
        }
        let built = Arc::new(NoncentralT::new(dof)?);
        let mut guard = cache.write().expect("cache poisoned");
        Ok(Arc::clone(guard.entry(dof).or_insert(built)))
    }

    pub fn dof(&self) -> u32 {
        self.dof
    }

    #[inline]
    fn chi_density(&self, s: f64) -> f64 {
        ((self.k - 1.0) * s.ln() - 0.5 * s * s - self.log_norm).exp()
    }

    fn check_noncentrality(delta: f64) -> Result<()> {
        if delta.is_nan() || delta.abs() > MAX_NONCENTRALITY {
            return Err(ImError::RangeExceeded { what: "noncentrality", value: delta });
        }
        Ok(())
    }

    // Panel edges over the chi support for the integrand Φ(t·s/√k − δ).
    fn panels(&self, t: f64, delta: f64) -> Vec<f64> {
        let (a, b) = (self.s_lo, self.s_hi);
        let mut edges = vec![a, b];
        if t != 0.0 {
            let center = delta * self.sqrt_k / t;
            let width = self.sqrt_k / t.abs();
            for c in [-40.0, -10.0, -3.0, 0.0, 3.0, 10.0, 40.0] {
                let e = center + c * width;
                if e > a && e < b {
                    edges.push(e);
                }
            }
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        edges
    }

    fn integrate<F: Fn(f64) -> f64>(&self, t: f64, delta: f64, kernel: F) -> f64 {
        let rule = GaussLegendre::standard();
        self.panels(t, delta)
            .windows(2)
            .map(|w| rule.integrate(w[0], w[1], |s| kernel(s) * self.chi_density(s)))
            .sum()
    }

    /// `P(T <= t)` for noncentrality `delta`.
    pub fn cdf(&self, t: f64, delta: f64) -> Result<f64> {
        Self::check_noncentrality(delta)?;
        Ok(self.cdf_unchecked(t, delta))
    }

    fn cdf_unchecked(&self, t: f64, delta: f64) -> f64 {
        if t == f64::INFINITY {
            return 1.0;
        }
        if t == f64::NEG_INFINITY {
            return 0.0;
        }
        let scale = t / self.sqrt_k;
        let v = self.integrate(t, delta, |s| norm_cdf(scale * s - delta));
        v.clamp(0.0, 1.0)
    }

    /// The CDF and its derivative in `delta` (always `<= 0`) from one pass.
    fn cdf_with_ddelta(&self, t: f64, delta: f64) -> (f64, f64) {
        let scale = t / self.sqrt_k;
        let rule = GaussLegendre::standard();
        let (v, d) = self
            .panels(t, delta)
            .windows(2)
            .map(|w| {
                rule.integrate_pair(w[0], w[1], |s| {
                    let z = scale * s - delta;
                    let c = self.chi_density(s);
                    (norm_cdf(z) * c, norm_pdf(z) * c)
                })
            })
            .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
        (v.clamp(0.0, 1.0), -d)
    }

    /// Density of `T` at `t`.
    pub fn pdf(&self, t: f64, delta: f64) -> Result<f64> {
        Self::check_noncentrality(delta)?;
        let scale = t / self.sqrt_k;
        let inv = 1.0 / self.sqrt_k;
        Ok(self.integrate(t, delta, |s| norm_pdf(scale * s - delta) * s * inv))
    }

    /// The unique `δ` with `P(T <= t; δ) = p`.
    ///
    /// The CDF is strictly decreasing in `δ`; the root is bracketed by
    /// expanding from a normal approximation and refined to
    /// [`NONCENTRALITY_TOL`].
    pub fn solve_noncentrality(&self, t: f64, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(ImError::InvalidArgument(format!("probability {p} is not in (0, 1)")));
        }
        if !t.is_finite() {
            return Err(ImError::InvalidArgument(format!("statistic {t} is not finite")));
        }
        let g = |d: f64| self.cdf_unchecked(t, d) - p;
        let spread = (1.0 + t * t / (2.0 * self.k)).sqrt();
        let guess = (t - norm_quantile(p) * spread).clamp(-MAX_NONCENTRALITY, MAX_NONCENTRALITY);

        let g0 = g(guess);
        if g0 == 0.0 {
            return Ok(guess);
        }
        let (lo, hi) = self.bracket_noncentrality(&g, guess, g0, spread)?;
        let root = newton_bracketed(
            |d| {
                let (f, df) = self.cdf_with_ddelta(t, d);
                (f - p, df)
            },
            lo,
            hi,
            guess,
            Monotone::Decreasing,
            NONCENTRALITY_TOL,
        );
        Ok(root)
    }

    fn bracket_noncentrality<G: Fn(f64) -> f64>(
        &self,
        g: &G,
        guess: f64,
        g0: f64,
        spread: f64,
    ) -> Result<(f64, f64)> {
        // g is decreasing: g > 0 means the root lies above.
        let dir = if g0 > 0.0 { 1.0 } else { -1.0 };
        let mut near = guess;
        let mut step = 0.5 * spread.max(1.0);
        loop {
            let far = (near + dir * step).clamp(-MAX_NONCENTRALITY, MAX_NONCENTRALITY);
            let gf = g(far);
            if (gf <= 0.0) == (dir > 0.0) {
                return Ok(if dir > 0.0 { (near, far) } else { (far, near) });
            }
            if far.abs() >= MAX_NONCENTRALITY {
                return Err(ImError::RangeExceeded { what: "noncentrality", value: far });
            }
            near = far;
            step *= 2.0;
        }
    }

    /// The `u`-quantile of `T` (inverse CDF in `t`).
    pub fn quantile(&self, u: f64, delta: f64) -> Result<f64> {
        Self::check_noncentrality(delta)?;
        if !(u > 0.0 && u < 1.0) {
            return Err(ImError::InvalidArgument(format!("probability {u} is not in (0, 1)")));
        }
        let g = |t: f64| self.cdf_unchecked(t, delta) - u;
        let guess = delta + norm_quantile(u);
        let mut lo = guess - 1.0;
        let mut hi = guess + 1.0;
        let mut step = 2.0;
        while g(lo) > 0.0 {
            lo -= step;
            step *= 2.0;
            if !lo.is_finite() {
                return Err(ImError::RangeExceeded { what: "quantile", value: u });
            }
        }
        step = 2.0;
        while g(hi) < 0.0 {
            hi += step;
            step *= 2.0;
            if !hi.is_finite() {
                return Err(ImError::RangeExceeded { what: "quantile", value: u });
            }
        }
        let sqrt_k = self.sqrt_k;
        Ok(newton_bracketed(
            |t| {
                let scale = t / sqrt_k;
                let dens = self.integrate(t, delta, |s| norm_pdf(scale * s - delta) * s / sqrt_k);
                (g(t), dens)
            },
            lo,
            hi,
            guess,
            Monotone::Increasing,
            1e-12 * (1.0 + hi.abs().max(lo.abs())),
        ))
    }
}

/// `P(T <= t)` for the non-central t law described by `spec`.
pub fn noncentral_t_cdf(t: f64, spec: NoncentralTSpec) -> Result<f64> {
    NoncentralT::cached(spec.dof)?.cdf(t, spec.noncentrality)
}

/// The noncentrality `δ` with `noncentral_t_cdf(t; dof, δ) = p`.
pub fn noncentral_t_solve_noncentrality(t: f64, dof: u32, p: f64) -> Result<f64> {
    NoncentralT::cached(dof)?.solve_noncentrality(t, p)
}
