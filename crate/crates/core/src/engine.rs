//! The generic inferential-model pipeline for a scalar parameter.
//!
//! An [`Association`] links data, parameter and a uniform auxiliary variable.
//! A [`PredictiveRandomSet`] guesses the unobserved auxiliary value. For
//! observed `x`, each realization `S` of the random set maps to the focal
//! set `Θ_x(S)` of parameter values consistent with `x` and some `u ∈ S`;
//! belief in an assertion `A` is the probability that the focal set lies in
//! `A`, plausibility the probability that it meets `A`.
//!
//! Containment and intersection are tested conservatively: a focal set that
//! touches the boundary of `A` meets `A` but is not inside it. Formally the
//! closure of the focal set is compared with the interior (for belief) or
//! the closure (for plausibility) of `A`, which keeps
//! `plausibility(A) = 1 − belief(Aᶜ)` exact draw by draw.

use rand::RngCore;
use rand_distr::{Distribution, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{ImError, Result};
use crate::paramset::{Endpoint, Interval, ParamSet};
use crate::par::Execution;
use crate::rng::stream_rng;
use crate::roots::bisect;

/// Draws handled by one random stream in [`belief_mc`].
pub const DRAWS_PER_STREAM: usize = 1024;

/// Absolute tolerance for plausibility-region boundaries.
pub const REGION_TOL: f64 = 1e-9;

/// A realization of a predictive random set: `[lo, hi] ⊆ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryInterval {
    lo: f64,
    hi: f64,
}

impl AuxiliaryInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(ImError::InvalidArgument(format!("[{lo}, {hi}] is not a sub-interval of [0, 1]")));
        }
        Ok(AuxiliaryInterval { lo, hi })
    }

    pub fn point(u: f64) -> Result<Self> {
        Self::new(u, u)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Data-generating representation `X = a(θ, U)` with `U ~ Unif(0, 1)`.
pub trait Association: Send + Sync {
    /// The statistic produced by parameter `theta` and auxiliary value `u`.
    fn forward(&self, theta: f64, u: f64) -> Result<f64>;

    /// All `θ` with `x = a(θ, u)` for some `u` in `s`.
    fn focal_param_set(&self, x: f64, s: AuxiliaryInterval) -> Result<ParamSet>;
}

/// Random subset of the auxiliary space `(0, 1)`.
pub trait PredictiveRandomSet: Send + Sync {
    fn sample(&self, rng: &mut dyn RngCore) -> AuxiliaryInterval;

    /// `P(S ∋ u)`.
    fn containment_probability(&self, u: f64) -> f64;
}

/// `S = {u : |u − 0.5| ≤ |W − 0.5|}` with `W ~ Unif(0, 1)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DefaultRandomSet;

pub fn default_random_set() -> DefaultRandomSet {
    DefaultRandomSet
}

impl PredictiveRandomSet for DefaultRandomSet {
    fn sample(&self, rng: &mut dyn RngCore) -> AuxiliaryInterval {
        let w: f64 = Open01.sample(rng);
        let r = (w - 0.5).abs();
        AuxiliaryInterval { lo: 0.5 - r, hi: 0.5 + r }
    }

    fn containment_probability(&self, u: f64) -> f64 {
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        1.0 - (2.0 * u - 1.0).abs()
    }
}

/// A claim `θ ∈ region` about the parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub region: ParamSet,
    pub label: String,
}

impl Assertion {
    pub fn new(region: ParamSet, label: impl Into<String>) -> Self {
        Assertion { region, label: label.into() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Assertion { region: text.parse()?, label: text.trim().to_string() })
    }

    pub fn complement(&self) -> Assertion {
        Assertion { region: self.region.complement(), label: format!("not {}", self.label) }
    }
}

/// Monte Carlo belief and plausibility of one assertion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefEstimate {
    pub belief: f64,
    pub plausibility: f64,
    pub draws: u64,
    pub belief_mc_se: f64,
    pub plausibility_mc_se: f64,
}

impl BeliefEstimate {
    fn from_counts(contained: u64, meeting: u64, draws: u64) -> Self {
        let n = draws as f64;
        let b = contained as f64 / n;
        let p = meeting as f64 / n;
        BeliefEstimate {
            belief: b,
            plausibility: p,
            draws,
            belief_mc_se: binomial_se(b, draws),
            plausibility_mc_se: binomial_se(p, draws),
        }
    }
}

/// `sqrt(p(1 − p)/n)`.
pub fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// The focal set for one realization; errors when it is empty.
pub fn focal_set<A: Association + ?Sized>(assoc: &A, x: f64, s: AuxiliaryInterval) -> Result<ParamSet> {
    let set = assoc.focal_param_set(x, s)?;
    if set.is_empty() {
        return Err(ImError::EmptyFocalSet);
    }
    Ok(set)
}

// Pre-computed interior and closure of an assertion region.
struct PreparedAssertion {
    interior: ParamSet,
    closure: ParamSet,
}

/// Belief and plausibility of `assertion` from `draws` realizations.
pub fn belief_mc<A, S>(assoc: &A, prs: &S, x: f64, assertion: &Assertion, draws: u64, seed: u64) -> Result<BeliefEstimate>
where
    A: Association + ?Sized,
    S: PredictiveRandomSet + ?Sized,
{
    Ok(belief_mc_many(Execution::Auto, assoc, prs, x, std::slice::from_ref(assertion), draws, seed)?[0])
}

/// Evaluates several assertions against one shared stream of realizations.
///
/// Draws are split into blocks of [`DRAWS_PER_STREAM`]; block `i` uses the
/// random stream `(seed, i)`, so the result does not depend on `exec` or on
/// the number of worker threads.
pub fn belief_mc_many<A, S>(
    exec: Execution,
    assoc: &A,
    prs: &S,
    x: f64,
    assertions: &[Assertion],
    draws: u64,
    seed: u64,
) -> Result<Vec<BeliefEstimate>>
where
    A: Association + ?Sized,
    S: PredictiveRandomSet + ?Sized,
{
    if draws == 0 {
        return Err(ImError::InvalidArgument("draws must be positive".into()));
    }
    let prepared: Vec<PreparedAssertion> = assertions
        .iter()
        .map(|a| PreparedAssertion { interior: a.region.interior(), closure: a.region.closure() })
        .collect();
    let blocks = draws.div_ceil(DRAWS_PER_STREAM as u64) as usize;
    let per_block = exec.try_map_range(blocks, |b| {
        let start = b as u64 * DRAWS_PER_STREAM as u64;
        let len = (draws - start).min(DRAWS_PER_STREAM as u64);
        let mut rng = stream_rng(seed, b as u64);
        let mut counts = vec![(0u64, 0u64); prepared.len()];
        for _ in 0..len {
            let s = prs.sample(&mut rng);
            let focal = focal_set(assoc, x, s)?.closure();
            for (c, a) in counts.iter_mut().zip(&prepared) {
                if focal.is_subset_of(&a.interior) {
                    c.0 += 1;
                }
                if focal.intersects(&a.closure) {
                    c.1 += 1;
                }
            }
        }
        Ok::<_, ImError>(counts)
    })?;
    let mut totals = vec![(0u64, 0u64); prepared.len()];
    for block in per_block {
        for (t, c) in totals.iter_mut().zip(block) {
            t.0 += c.0;
            t.1 += c.1;
        }
    }
    Ok(totals
        .into_iter()
        .map(|(b, p)| BeliefEstimate::from_counts(b, p, draws))
        .collect())
}

/// Plausibility of singleton assertions `{θ}` for observed `x`.
pub trait SingletonPlausibility: Sync {
    fn singleton_plausibility(&self, x: f64, theta: f64) -> Result<f64>;
}

/// Singleton plausibility estimated with [`belief_mc`] on `{θ}`; the fallback
/// for models without a closed form.
pub struct MonteCarloPlausibility<'a, A: ?Sized, S: ?Sized> {
    pub assoc: &'a A,
    pub prs: &'a S,
    pub draws: u64,
    pub seed: u64,
}

impl<A, S> SingletonPlausibility for MonteCarloPlausibility<'_, A, S>
where
    A: Association + ?Sized,
    S: PredictiveRandomSet + ?Sized,
{
    fn singleton_plausibility(&self, x: f64, theta: f64) -> Result<f64> {
        let a = Assertion::new(ParamSet::point(theta), "singleton");
        let est = belief_mc_many(Execution::Sequential, self.assoc, self.prs, x, &[a], self.draws, self.seed)?;
        Ok(est[0].plausibility)
    }
}

/// Coordinate in which a plausibility grid is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    /// Grid points are values of `θ`.
    Direct,
    /// Grid points are values of `ψ = 1/θ`; `ψ = 0` stands for `θ = ±∞`.
    Reciprocal,
}

/// Evenly spaced grid of `steps` points from `lo` to `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub scale: GridScale,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, steps: usize, scale: GridScale) -> Result<Self> {
        if steps < 2 {
            return Err(ImError::DegenerateGrid(steps));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ImError::InvalidArgument(format!("grid bounds {lo}..{hi} are invalid")));
        }
        Ok(GridSpec { lo, hi, steps, scale })
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let h = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps).map(move |i| if i + 1 == self.steps { self.hi } else { self.lo + h * i as f64 })
    }

    fn theta_of(&self, s: f64) -> f64 {
        match self.scale {
            GridScale::Direct => s,
            GridScale::Reciprocal => 1.0 / s,
        }
    }
}

/// `{θ : p_x({θ}) > α}` as a union of intervals.
///
/// Scans the grid for sign changes of `p_x({θ}) − α` and refines each
/// crossing by bisection to [`REGION_TOL`] in the grid coordinate. Crossing
/// points are excluded. A run of grid points above `α` that reaches the
/// edge of the grid is clipped there (closed), so a direct-scale grid must
/// cover the region of interest. Two crossings inside a single grid cell
/// are not resolved.
pub fn plausibility_region<M: SingletonPlausibility + ?Sized>(
    model: &M,
    x: f64,
    alpha: f64,
    grid: &GridSpec,
) -> Result<ParamSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ImError::InvalidArgument(format!("alpha {alpha} is not in (0, 1)")));
    }
    if grid.steps < 2 {
        return Err(ImError::DegenerateGrid(grid.steps));
    }
    let pts: Vec<f64> = grid.points().collect();
    let excess = |s: f64| -> Result<f64> { Ok(model.singleton_plausibility(x, grid.theta_of(s))? - alpha) };
    let above: Vec<bool> = pts
        .iter()
        .map(|&s| excess(s).map(|e| e > 0.0))
        .collect::<Result<_>>()?;

    let crossing = |a: f64, b: f64| -> Result<f64> {
        // evaluation errors inside a bracket whose ends succeeded are not expected;
        // treat them as "not above" so bisection still terminates
        Ok(bisect(|s| excess(s).unwrap_or(-1.0), a, b, REGION_TOL))
    };

    let mut runs: Vec<(Endpoint, Endpoint)> = Vec::new();
    let mut i = 0;
    while i < pts.len() {
        if !above[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < pts.len() && above[i + 1] {
            i += 1;
        }
        let lo = if start == 0 { Endpoint::closed(pts[0]) } else { Endpoint::open(crossing(pts[start - 1], pts[start])?) };
        let hi = if i + 1 == pts.len() { Endpoint::closed(pts[i]) } else { Endpoint::open(crossing(pts[i], pts[i + 1])?) };
        runs.push((lo, hi));
        i += 1;
    }

    Ok(match grid.scale {
        GridScale::Direct => ParamSet::from_intervals(runs.into_iter().filter_map(|(a, b)| Interval::new(a, b))),
        GridScale::Reciprocal => runs
            .into_iter()
            .map(|(a, b)| ParamSet::reciprocal_image(a, b))
            .fold(ParamSet::empty(), |acc, s| acc.union(&s)),
    })
}
