use std::io::Write;

use im_infer::audit::{
    compare_im_bayes, coverage_audit_with, run_plausibility_audit, run_validity_audit, AuditConfig, AuditReport,
    BeliefMethod, CoverageReport, ModelTruth,
};
use im_infer::engine::{belief_mc, default_random_set, Assertion, BeliefEstimate, GridScale, GridSpec, SingletonPlausibility};
use im_infer::models::{
    cv_plausibility_interval, normal_mean_plausibility_interval, parse_dataset, CvAssociation, CvStatistic,
    NormalMeanAssociation,
};
use im_infer::par::Execution;
use im_infer::paramset::ParamSet;
use im_infer::ImError;
use serde::Serialize;

use crate::demo::write_demo_sets;
use crate::{
    AuditArgs, AuditMode, BelieveArgs, Command, CompareArgs, CurveArgs, DemoArgs, Failure, IntervalArgs, MethodName,
    ModelName, ObservationArgs,
};

type Outcome = Result<(), Failure>;

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Believe(a) => believe(a),
        Command::Curve(a) => curve(a),
        Command::Interval(a) => interval(a),
        Command::Audit(a) => audit(a),
        Command::Compare(a) => compare(a),
        Command::DemoData(a) => demo_data(a),
    }
}

enum Observed {
    NormalMean(f64),
    Cv(CvStatistic),
}

impl Observed {
    fn statistic(&self) -> f64 {
        match self {
            Observed::NormalMean(x) => *x,
            Observed::Cv(s) => s.t,
        }
    }
}

fn observe(model: ModelName, obs: &ObservationArgs) -> Result<Observed, Failure> {
    match (model, obs.x, &obs.data) {
        (ModelName::NormalMean, Some(x), None) => {
            if !x.is_finite() {
                return Err(Failure::Usage(format!("--x must be finite, got {x}")));
            }
            Ok(Observed::NormalMean(x))
        }
        (ModelName::NormalMean, _, _) => Err(Failure::Usage("normal-mean takes a single observation via --x".into())),
        (ModelName::NormalCv, None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Model(ImError::InvalidData(format!("{}: {e}", path.display()))))?;
            let stats = parse_dataset(&text)?.sufficient_stats()?;
            Ok(Observed::Cv(stats.cv_statistic()))
        }
        (ModelName::NormalCv, _, _) => Err(Failure::Usage("normal-cv takes a sample via --data".into())),
    }
}

fn print_json<T: Serialize>(value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Model(ImError::Output(e.to_string())))?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Model(ImError::Output(e.to_string()))),
        _ => Ok(()),
    }
}

fn print_csv<const N: usize, R: Serialize>(header: [&str; N], rows: impl IntoIterator<Item = R>) -> Outcome {
    let write = || -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(std::io::stdout().lock());
        w.write_record(header)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    };
    match write() {
        Err(e) if !matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe) => {
            Err(Failure::Model(ImError::Output(e.to_string())))
        }
        _ => Ok(()),
    }
}

fn echo_seed(seed: u64) {
    eprintln!("seed: {seed}");
}

fn model_label(model: ModelName) -> &'static str {
    match model {
        ModelName::NormalMean => "normal-mean",
        ModelName::NormalCv => "normal-cv",
    }
}

#[derive(Serialize)]
struct BelieveOutput<'a> {
    model: &'static str,
    assertion: &'a str,
    #[serde(flatten)]
    estimate: BeliefEstimate,
    seed: u64,
}

fn believe(a: BelieveArgs) -> Outcome {
    let observed = observe(a.model, &a.obs)?;
    let prs = default_random_set();
    let x = observed.statistic();
    let estimate = match &observed {
        Observed::NormalMean(_) => belief_mc(&NormalMeanAssociation, &prs, x, &a.assertion, a.draws, a.seed)?,
        Observed::Cv(s) => belief_mc(&CvAssociation::new(s.n)?, &prs, x, &a.assertion, a.draws, a.seed)?,
    };
    print_json(&BelieveOutput {
        model: model_label(a.model),
        assertion: &a.assertion.region.to_string(),
        estimate,
        seed: a.seed,
    })
}

fn curve(a: CurveArgs) -> Outcome {
    let observed = observe(a.model, &a.obs)?;
    let (lo, hi, steps) = a.theta_grid;
    let grid = GridSpec::new(lo, hi, steps, GridScale::Direct)?;
    let values: Vec<(f64, f64)> = match &observed {
        Observed::NormalMean(x) => grid
            .points()
            .map(|th| Ok((th, NormalMeanAssociation.singleton_plausibility(*x, th)?)))
            .collect::<Result<_, ImError>>()?,
        Observed::Cv(s) => {
            let assoc = CvAssociation::new(s.n)?;
            grid.points()
                .map(|th| Ok((th, assoc.singleton_plausibility_extended(s.t, th)?)))
                .collect::<Result<_, ImError>>()?
        }
    };
    print_csv(["theta", "plausibility"], values)?;
    echo_seed(a.seed);
    Ok(())
}

#[derive(Serialize)]
struct IntervalOutput {
    model: &'static str,
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    statistic: Option<CvStatistic>,
    region: ParamSet,
    seed: u64,
}

fn interval(a: IntervalArgs) -> Outcome {
    let observed = observe(a.model, &a.obs)?;
    let (region, statistic) = match observed {
        Observed::NormalMean(x) => (normal_mean_plausibility_interval(x, a.alpha)?, None),
        Observed::Cv(s) => (cv_plausibility_interval(&s, a.alpha)?, Some(s)),
    };
    print_json(&IntervalOutput { model: model_label(a.model), alpha: a.alpha, statistic, region, seed: a.seed })
}

#[derive(Serialize)]
struct AuditOutput {
    mode: &'static str,
    seed: u64,
    #[serde(flatten)]
    report: AuditReport,
}

#[derive(Serialize)]
struct CoverageRecord {
    #[serde(flatten)]
    report: CoverageReport,
    /// coverage ≥ 1 − α − 3·se
    bound_satisfied: bool,
}

#[derive(Serialize)]
struct CoverageOutput {
    mode: &'static str,
    seed: u64,
    config: AuditConfig,
    coverage: Vec<CoverageRecord>,
}

fn truth_from(a: &AuditArgs) -> Result<ModelTruth, Failure> {
    match a.model {
        ModelName::NormalMean => match a.theta {
            Some(theta) => Ok(ModelTruth::NormalMean { theta }),
            None => Err(Failure::Usage("--theta is required for normal-mean".into())),
        },
        ModelName::NormalCv => match a.mu {
            Some(mu) => Ok(ModelTruth::NormalCv { mu, sigma: a.sigma, n: a.n }),
            None => Err(Failure::Usage("--mu is required for normal-cv".into())),
        },
    }
}

fn audit(a: AuditArgs) -> Outcome {
    let truth = truth_from(&a)?;
    let assertion = match (&a.assertion, a.mode) {
        (Some(x), _) => x.clone(),
        (None, AuditMode::Coverage) => Assertion::new(ParamSet::real_line(), "(-inf,inf)"),
        (None, _) => return Err(Failure::Usage("--assertion is required for this mode".into())),
    };
    let mut cfg = AuditConfig::new(truth, assertion, a.seed);
    cfg.replications = a.reps;
    cfg.alphas = a.alphas.clone();
    cfg.draws_per_replication = a.draws;
    cfg.method = match a.method {
        MethodName::Closed => BeliefMethod::ClosedForm,
        MethodName::Mc => BeliefMethod::MonteCarlo,
    };
    let exec = Execution::Auto;
    let ok = match a.mode {
        AuditMode::Validity | AuditMode::Plausibility => {
            let (mode, report) = if a.mode == AuditMode::Validity {
                ("validity", run_validity_audit(exec, &cfg)?)
            } else {
                ("plausibility", run_plausibility_audit(exec, &cfg)?)
            };
            let ok = report.all_bounds_satisfied();
            print_json(&AuditOutput { mode, seed: a.seed, report })?;
            ok
        }
        AuditMode::Coverage => {
            let coverage = cfg
                .alphas
                .iter()
                .map(|&alpha| {
                    let report = coverage_audit_with(exec, &cfg, alpha)?;
                    let bound_satisfied = report.coverage_rate >= 1.0 - alpha - 3.0 * report.mc_se;
                    Ok(CoverageRecord { report, bound_satisfied })
                })
                .collect::<Result<Vec<_>, ImError>>()?;
            let ok = coverage.iter().all(|c| c.bound_satisfied);
            print_json(&CoverageOutput { mode: "coverage", seed: a.seed, config: cfg, coverage })?;
            ok
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Failure::BoundViolated)
    }
}

fn compare(a: CompareArgs) -> Outcome {
    let truth = ModelTruth::NormalCv { mu: a.mu, sigma: a.sigma, n: a.n };
    let mut cfg = AuditConfig::new(truth, a.assertion, a.seed);
    cfg.replications = a.reps as usize;
    let cmp = compare_im_bayes(Execution::Auto, &cfg, a.posterior_draws)?;
    print_csv(
        ["quantile_uniform", "im_belief", "bayes_posterior"],
        cmp.rows.iter().map(|r| (r.quantile_uniform, r.im_belief, r.bayes_posterior)),
    )?;
    echo_seed(a.seed);
    Ok(())
}

fn demo_data(a: DemoArgs) -> Outcome {
    let written = write_demo_sets(&a.out_dir, a.seed)
        .map_err(|e| Failure::Model(ImError::Output(format!("{}: {e}", a.out_dir.display()))))?;
    let mut stdout = std::io::stdout().lock();
    for p in written {
        let _ = writeln!(stdout, "{}", p.display());
    }
    echo_seed(a.seed);
    Ok(())
}
