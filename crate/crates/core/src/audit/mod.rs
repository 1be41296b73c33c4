//! Monte Carlo checks of the validity and coverage guarantees.
//!
//! A validity audit simulates data from a fixed truth outside an assertion
//! `A`, computes `b_X(A)` for every replication and checks
//! `P{b_X(A) > 1 − α} ≤ α` at each `α` up to three binomial standard errors.
//! The standard error used in the bound is the one at the boundary rate
//! `α`, `sqrt(α(1 − α)/N)`, so a sample that happens to have no exceedances
//! is not penalized by a zero standard error.
//!
//! Replication `i` draws its data from the stream `(data seed, i)`; if the
//! simulated sample is degenerate it is redrawn from the stream of the next
//! attempt. Reports are assembled in replication order and do not depend on
//! the number of workers.

mod bayes;

pub use bayes::{bayes_cv_posterior_from_stats, bayes_cv_posterior_probability, MIN_POSTERIOR_DRAWS};

use rand::RngCore;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::engine::{belief_mc_many, binomial_se, default_random_set, Assertion};
use crate::error::{ImError, Result};
use crate::models::{
    cv_plausibility_interval, normal_mean_plausibility_interval, ConsonantModel, CvAssociation, NormalMeanAssociation,
    SufficientStats,
};
use crate::par::Execution;
use crate::rng::{derive_seed, stream_rng};

/// Default `α` levels.
pub const DEFAULT_ALPHAS: [f64; 5] = [0.01, 0.05, 0.10, 0.25, 0.50];
/// Default number of replications.
pub const DEFAULT_REPLICATIONS: usize = 1000;
/// Smallest accepted number of replications.
pub const MIN_REPLICATIONS: usize = 100;
/// Redraws allowed for one replication before giving up.
pub const MAX_RESAMPLES: u64 = 64;

const TAG_DATA: u64 = 1;
const TAG_BELIEF: u64 = 2;
const TAG_BAYES: u64 = 3;

/// The data-generating truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelTruth {
    /// One observation `X ~ N(θ, 1)`.
    NormalMean { theta: f64 },
    /// `n` observations from `N(μ, σ²)`; the parameter is `θ = σ/μ`.
    NormalCv { mu: f64, sigma: f64, n: usize },
}

impl ModelTruth {
    /// The true parameter. For the CV model with `μ = 0` this is `+∞`,
    /// which stands for the single point at infinity.
    pub fn theta(&self) -> f64 {
        match *self {
            ModelTruth::NormalMean { theta } => theta,
            ModelTruth::NormalCv { mu, sigma, .. } => {
                if mu == 0.0 {
                    f64::INFINITY
                } else {
                    sigma / mu
                }
            }
        }
    }

    /// Whether `set` contains the true parameter. The point at infinity
    /// belongs to a set that is unbounded in either direction.
    pub fn is_in(&self, set: &crate::paramset::ParamSet) -> bool {
        let theta = self.theta();
        if theta.is_infinite() {
            set.contains(f64::INFINITY) || set.contains(f64::NEG_INFINITY)
        } else {
            set.contains(theta)
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ModelTruth::NormalMean { theta } if !theta.is_finite() => {
                Err(ImError::InvalidArgument(format!("theta {theta} is not finite")))
            }
            ModelTruth::NormalCv { mu, sigma, n } => {
                if !mu.is_finite() || !(sigma.is_finite() && sigma > 0.0) {
                    return Err(ImError::InvalidArgument(format!("invalid truth mu = {mu}, sigma = {sigma}")));
                }
                if n < 2 {
                    return Err(ImError::InvalidArgument(format!("sample size {n} is below 2")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// How `b_X(A)` is computed for each replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeliefMethod {
    /// Exact consonant formula.
    #[default]
    ClosedForm,
    /// Random-set simulation with `draws_per_replication` draws.
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub truth: ModelTruth,
    pub assertion: Assertion,
    pub replications: usize,
    pub alphas: Vec<f64>,
    pub draws_per_replication: u64,
    pub seed: u64,
    #[serde(default)]
    pub method: BeliefMethod,
}

impl AuditConfig {
    /// Defaults: 1000 replications, the standard `α` grid, closed-form belief.
    pub fn new(truth: ModelTruth, assertion: Assertion, seed: u64) -> Self {
        AuditConfig {
            truth,
            assertion,
            replications: DEFAULT_REPLICATIONS,
            alphas: DEFAULT_ALPHAS.to_vec(),
            draws_per_replication: 10_000,
            seed,
            method: BeliefMethod::ClosedForm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_min(MIN_REPLICATIONS)
    }

    fn validate_with_min(&self, min_replications: usize) -> Result<()> {
        self.truth.validate()?;
        if self.replications < min_replications {
            return Err(ImError::InvalidArgument(format!(
                "replications {} below the minimum {min_replications}",
                self.replications
            )));
        }
        check_alphas(&self.alphas)?;
        if self.method == BeliefMethod::MonteCarlo && self.draws_per_replication == 0 {
            return Err(ImError::InvalidArgument("draws per replication must be positive".into()));
        }
        Ok(())
    }

    /// Whether the truth lies outside the assertion, so that the validity
    /// bound applies.
    pub fn is_false_assertion(&self) -> bool {
        !self.truth.is_in(&self.assertion.region)
    }
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    match alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        Some(a) => Err(ImError::InvalidArgument(format!("alpha {a} is not in (0, 1)"))),
        None => Ok(()),
    }
}

/// What a replication observed: `x` for the normal mean, summary statistics
/// for the CV model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    NormalMean(f64),
    Cv(SufficientStats),
}

/// Simulates replication `index`, redrawing degenerate samples. Returns the
/// observation and the number of redraws.
pub fn simulate_observation(truth: &ModelTruth, seed: u64, index: usize) -> Result<(Observation, u64)> {
    let data_seed = derive_seed(seed, TAG_DATA);
    for attempt in 0..=MAX_RESAMPLES {
        let mut rng = stream_rng(derive_seed(data_seed, attempt), index as u64);
        match draw_observation(truth, &mut rng) {
            Err(ImError::DegenerateSample) => continue,
            other => return other.map(|o| (o, attempt)),
        }
    }
    Err(ImError::DegenerateSample)
}

fn draw_observation(truth: &ModelTruth, rng: &mut dyn RngCore) -> Result<Observation> {
    match *truth {
        ModelTruth::NormalMean { theta } => {
            let z: f64 = StandardNormal.sample(rng);
            Ok(Observation::NormalMean(theta + z))
        }
        ModelTruth::NormalCv { mu, sigma, n } => {
            // x̄ and S are independent: x̄ ~ N(μ, σ²/n), (n − 1)S²/σ² ~ χ²(n − 1).
            let dof = (n - 1) as f64;
            let z: f64 = StandardNormal.sample(rng);
            let chi = ChiSquared::new(dof).map_err(|e| ImError::InvalidArgument(e.to_string()))?;
            let mean = mu + sigma * z / (n as f64).sqrt();
            let sd = sigma * (chi.sample(rng) / dof).sqrt();
            SufficientStats::new(mean, sd, n).map(Observation::Cv)
        }
    }
}

enum Model {
    NormalMean(NormalMeanAssociation),
    Cv(CvAssociation),
}

impl Model {
    fn for_truth(truth: &ModelTruth) -> Result<Model> {
        Ok(match *truth {
            ModelTruth::NormalMean { .. } => Model::NormalMean(NormalMeanAssociation),
            ModelTruth::NormalCv { n, .. } => Model::Cv(CvAssociation::new(n)?),
        })
    }

    fn statistic(obs: &Observation) -> f64 {
        match obs {
            Observation::NormalMean(x) => *x,
            Observation::Cv(s) => s.cv_statistic().t,
        }
    }

    /// `(b_X(A), p_X(A))` for one replication.
    fn belief(&self, cfg: &AuditConfig, obs: &Observation, index: usize) -> Result<(f64, f64)> {
        let x = Model::statistic(obs);
        let region = &cfg.assertion.region;
        match cfg.method {
            BeliefMethod::ClosedForm => match self {
                Model::NormalMean(m) => m.belief_closed(x, region),
                Model::Cv(m) => m.belief_closed(x, region),
            },
            BeliefMethod::MonteCarlo => {
                let seed = derive_seed(derive_seed(cfg.seed, TAG_BELIEF), index as u64);
                let prs = default_random_set();
                let a = std::slice::from_ref(&cfg.assertion);
                let est = match self {
                    Model::NormalMean(m) => {
                        belief_mc_many(Execution::Sequential, m, &prs, x, a, cfg.draws_per_replication, seed)?
                    }
                    Model::Cv(m) => {
                        belief_mc_many(Execution::Sequential, m, &prs, x, a, cfg.draws_per_replication, seed)?
                    }
                };
                Ok((est[0].belief, est[0].plausibility))
            }
        }
    }
}

/// Per-replication values of `b_X(A)` or `p_X(A)` in replication order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefSamples {
    pub values: Vec<f64>,
    pub resampled_count: u64,
}

#[derive(Clone, Copy)]
enum Quantity {
    Belief,
    Plausibility,
}

fn simulate(exec: Execution, cfg: &AuditConfig, q: Quantity) -> Result<BeliefSamples> {
    cfg.validate()?;
    let model = Model::for_truth(&cfg.truth)?;
    let rows = exec.try_map_range(cfg.replications, |i| {
        let (obs, redraws) = simulate_observation(&cfg.truth, cfg.seed, i)?;
        let (b, p) = model.belief(cfg, &obs, i)?;
        Ok::<_, ImError>((
            match q {
                Quantity::Belief => b,
                Quantity::Plausibility => p,
            },
            redraws,
        ))
    })?;
    Ok(BeliefSamples {
        values: rows.iter().map(|r| r.0).collect(),
        resampled_count: rows.iter().map(|r| r.1).sum(),
    })
}

/// `b_X(A)` for every replication, computed in parallel.
pub fn simulate_belief_samples(cfg: &AuditConfig) -> Result<BeliefSamples> {
    simulate(Execution::Auto, cfg, Quantity::Belief)
}

pub fn simulate_belief_samples_with(exec: Execution, cfg: &AuditConfig) -> Result<BeliefSamples> {
    simulate(exec, cfg, Quantity::Belief)
}

/// `p_X(A)` for every replication.
pub fn simulate_plausibility_samples_with(exec: Execution, cfg: &AuditConfig) -> Result<BeliefSamples> {
    simulate(exec, cfg, Quantity::Plausibility)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaRecord {
    pub alpha: f64,
    /// Fraction of replications in the rejection event: `b > 1 − α` for a
    /// belief audit, `p ≤ α` for a plausibility audit.
    pub exceedance_rate: f64,
    /// `sqrt(α(1 − α)/N)`.
    pub mc_se: f64,
    /// `None` when the bound does not apply (the assertion is true).
    pub bound_satisfied: Option<bool>,
}

/// One point of the empirical quantile plot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcdfPoint {
    /// `i/(N + 1)` for the `i`-th smallest sample.
    pub quantile_uniform: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<AuditConfig>,
    pub applicable: bool,
    pub per_alpha: Vec<AlphaRecord>,
    pub ecdf: Vec<EcdfPoint>,
    pub resampled_count: u64,
}

impl AuditReport {
    /// True unless some applicable bound failed.
    pub fn all_bounds_satisfied(&self) -> bool {
        self.per_alpha.iter().all(|r| r.bound_satisfied != Some(false))
    }
}

fn ecdf_points(samples: &[f64]) -> Vec<EcdfPoint> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let denom = (sorted.len() + 1) as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, value)| EcdfPoint { quantile_uniform: (i + 1) as f64 / denom, value })
        .collect()
}

fn rate_report(samples: &[f64], alphas: &[f64], applicable: bool, event: impl Fn(f64, f64) -> bool) -> AuditReport {
    let n = samples.len() as u64;
    let per_alpha = alphas
        .iter()
        .map(|&alpha| {
            let hits = samples.iter().filter(|&&v| event(v, alpha)).count();
            let rate = hits as f64 / n as f64;
            let mc_se = binomial_se(alpha, n);
            AlphaRecord {
                alpha,
                exceedance_rate: rate,
                mc_se,
                bound_satisfied: applicable.then_some(rate <= alpha + 3.0 * mc_se),
            }
        })
        .collect();
    AuditReport { config: None, applicable, per_alpha, ecdf: ecdf_points(samples), resampled_count: 0 }
}

/// Exceedance rates `#{b > 1 − α}/N` with the three-standard-error bound.
///
/// # Panics
/// If `samples` is empty.
pub fn validity_audit(samples: &[f64], alphas: &[f64]) -> AuditReport {
    assert!(!samples.is_empty(), "validity_audit needs at least one sample");
    rate_report(samples, alphas, true, |b, alpha| b > 1.0 - alpha)
}

/// Simulates `b_X(A)` and audits it. For a true assertion the report is
/// marked not applicable and carries no bound verdicts.
pub fn run_validity_audit(exec: Execution, cfg: &AuditConfig) -> Result<AuditReport> {
    let samples = simulate_belief_samples_with(exec, cfg)?;
    let mut report = rate_report(&samples.values, &cfg.alphas, cfg.is_false_assertion(), |b, alpha| b > 1.0 - alpha);
    report.config = Some(cfg.clone());
    report.resampled_count = samples.resampled_count;
    Ok(report)
}

/// The plausibility form for a true assertion: `P{p_X(A) ≤ α} ≤ α`.
pub fn run_plausibility_audit(exec: Execution, cfg: &AuditConfig) -> Result<AuditReport> {
    let samples = simulate_plausibility_samples_with(exec, cfg)?;
    let mut report = rate_report(&samples.values, &cfg.alphas, !cfg.is_false_assertion(), |p, alpha| p <= alpha);
    report.config = Some(cfg.clone());
    report.resampled_count = samples.resampled_count;
    Ok(report)
}

/// Result of comparing an empirical distribution function with the uniform
/// one on a grid of `u` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceCheck {
    /// Smallest `(F̂(u) − u)/se(u)` over the grid.
    pub worst_z: f64,
    /// Grid points where `F̂(u) < u − 3·se(u)`.
    pub violations: Vec<f64>,
}

impl DominanceCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `u = 0.01, 0.02, ..., 0.99`.
pub fn default_dominance_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

/// Checks `F̂(u) ≥ u − 3·sqrt(u(1 − u)/N)` at every grid point, where
/// `F̂(u)` is the fraction of samples `≤ u`.
pub fn ecdf_dominance(samples: &[f64], grid: &[f64]) -> DominanceCheck {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as u64;
    let mut worst_z = f64::INFINITY;
    let mut violations = Vec::new();
    for &u in grid {
        let f_hat = sorted.partition_point(|&v| v <= u) as f64 / n as f64;
        let se = binomial_se(u, n);
        worst_z = worst_z.min((f_hat - u) / se);
        if f_hat < u - 3.0 * se {
            violations.push(u);
        }
    }
    DominanceCheck { worst_z, violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub alpha: f64,
    pub coverage_rate: f64,
    /// `sqrt((1 − α)α/N)`.
    pub mc_se: f64,
    pub replications: usize,
    /// Fraction of unbounded regions; CV model only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction_unbounded: Option<f64>,
    pub resampled_count: u64,
}

/// Fraction of replications whose `100(1 − α)%` plausibility region
/// contains the truth.
pub fn coverage_audit(cfg: &AuditConfig, alpha: f64) -> Result<CoverageReport> {
    coverage_audit_with(Execution::Auto, cfg, alpha)
}

pub fn coverage_audit_with(exec: Execution, cfg: &AuditConfig, alpha: f64) -> Result<CoverageReport> {
    cfg.validate()?;
    check_alphas(&[alpha])?;
    let rows = exec.try_map_range(cfg.replications, |i| {
        let (obs, redraws) = simulate_observation(&cfg.truth, cfg.seed, i)?;
        let region = match obs {
            Observation::NormalMean(x) => normal_mean_plausibility_interval(x, alpha)?,
            Observation::Cv(s) => cv_plausibility_interval(&s.cv_statistic(), alpha)?,
        };
        Ok::<_, ImError>((cfg.truth.is_in(&region), region.is_unbounded(), redraws))
    })?;
    let n = rows.len();
    let covered = rows.iter().filter(|r| r.0).count();
    let unbounded = rows.iter().filter(|r| r.1).count();
    Ok(CoverageReport {
        alpha,
        coverage_rate: covered as f64 / n as f64,
        mc_se: binomial_se(1.0 - alpha, n as u64),
        replications: n,
        fraction_unbounded: matches!(cfg.truth, ModelTruth::NormalCv { .. }).then(|| unbounded as f64 / n as f64),
        resampled_count: rows.iter().map(|r| r.2).sum(),
    })
}

/// One row of the IM-versus-Bayes quantile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantilePair {
    pub quantile_uniform: f64,
    pub im_belief: f64,
    pub bayes_posterior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub config: AuditConfig,
    pub posterior_draws: u64,
    /// Sorted quantiles of both quantities against `i/(N + 1)`.
    pub rows: Vec<QuantilePair>,
    /// Replication-order values of `b_X(A)`.
    pub im_samples: Vec<f64>,
    /// Replication-order values of `Π_X(A)`.
    pub bayes_samples: Vec<f64>,
    pub im_dominance: DominanceCheck,
    pub bayes_dominance: DominanceCheck,
    /// Largest `b_X(A) + b_X(Aᶜ)` over replications.
    pub max_im_total_belief: f64,
    /// Largest `|Π_X(A) + Π_X(Aᶜ) − 1|` over replications.
    pub max_bayes_additivity_error: f64,
    pub resampled_count: u64,
}

impl Comparison {
    /// Writes the quantile table as CSV with the header
    /// `quantile_uniform,belief_quantile,bayes_quantile`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| ImError::Output(e.to_string());
        w.write_record(["quantile_uniform", "belief_quantile", "bayes_quantile"]).map_err(err)?;
        for r in &self.rows {
            w.serialize((r.quantile_uniform, r.im_belief, r.bayes_posterior)).map_err(err)?;
        }
        w.flush().map_err(|e| ImError::Output(e.to_string()))
    }
}

/// `b_X(A)` and `Π_X(A)` on the same simulated datasets. Unlike the
/// audits, any positive number of replications is accepted.
pub fn compare_im_bayes(exec: Execution, cfg: &AuditConfig, posterior_draws: u64) -> Result<Comparison> {
    cfg.validate_with_min(1)?;
    let ModelTruth::NormalCv { .. } = cfg.truth else {
        return Err(ImError::InvalidArgument("the comparison needs the normal-cv model".into()));
    };
    if posterior_draws < MIN_POSTERIOR_DRAWS {
        return Err(ImError::InvalidArgument(format!(
            "posterior draws {posterior_draws} below the minimum {MIN_POSTERIOR_DRAWS}"
        )));
    }
    let model = Model::for_truth(&cfg.truth)?;
    let complement = cfg.assertion.complement();
    let bayes_seed = derive_seed(cfg.seed, TAG_BAYES);
    let rows = exec.try_map_range(cfg.replications, |i| {
        let (obs, redraws) = simulate_observation(&cfg.truth, cfg.seed, i)?;
        let Observation::Cv(stats) = obs else { unreachable!("normal-cv truth yields summary statistics") };
        let (b, p) = model.belief(cfg, &obs, i)?;
        let post = bayes_cv_posterior_from_stats(
            &stats,
            &[&cfg.assertion, &complement],
            posterior_draws,
            derive_seed(bayes_seed, i as u64),
        )?;
        // b(Aᶜ) = 1 − p(A)
        Ok::<_, ImError>((b, b + (1.0 - p), post[0], (post[0] + post[1] - 1.0).abs(), redraws))
    })?;
    let im: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let bayes: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let grid = default_dominance_grid();
    let (im_q, bayes_q) = (ecdf_points(&im), ecdf_points(&bayes));
    Ok(Comparison {
        config: cfg.clone(),
        posterior_draws,
        rows: im_q
            .iter()
            .zip(&bayes_q)
            .map(|(a, b)| QuantilePair { quantile_uniform: a.quantile_uniform, im_belief: a.value, bayes_posterior: b.value })
            .collect(),
        im_dominance: ecdf_dominance(&im, &grid),
        bayes_dominance: ecdf_dominance(&bayes, &grid),
        max_im_total_belief: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        max_bayes_additivity_error: rows.iter().map(|r| r.3).fold(0.0, f64::max),
        resampled_count: rows.iter().map(|r| r.4).sum(),
        im_samples: im,
        bayes_samples: bayes,
    })
}
