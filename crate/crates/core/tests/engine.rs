use im_infer::engine::{
    belief_mc, belief_mc_many, default_random_set, focal_set, plausibility_region, Assertion, Association,
    AuxiliaryInterval, GridScale, GridSpec, MonteCarloPlausibility, PredictiveRandomSet,
};
use im_infer::models::{normal_mean_plausibility_interval, CvAssociation, NormalMeanAssociation};
use im_infer::par::Execution;
use im_infer::paramset::ParamSet;
use im_infer::rng::stream_rng;
use rand::Rng;

fn assertions() -> Vec<Assertion> {
    ["(-inf,0]", "(-inf,1]", "(-1,1)", "[-0.5,0.5]", "(-inf,-1] u [1,inf)", "{0.3}", "(0.3,inf)", "(-inf,inf)"]
        .iter()
        .map(|s| Assertion::parse(s).unwrap())
        .collect()
}

#[test]
fn belief_never_exceeds_plausibility_and_complements_match() {
    let prs = default_random_set();
    let list = assertions();
    let with_complements: Vec<Assertion> = list.iter().flat_map(|a| [a.clone(), a.complement()]).collect();
    for (i, x) in [-1.3, 0.0, 0.4, 2.2].into_iter().enumerate() {
        let est = belief_mc_many(Execution::Auto, &NormalMeanAssociation, &prs, x, &with_complements, 20_000, i as u64).unwrap();
        for pair in est.chunks(2) {
            let (a, ac) = (pair[0], pair[1]);
            assert!(a.belief <= a.plausibility);
            assert!((a.plausibility - (1.0 - ac.belief)).abs() < 1e-15);
            assert!(a.belief + ac.belief <= 1.0 + 1e-15);
        }
    }
}

#[test]
fn belief_is_monotone_under_shared_draws() {
    let prs = default_random_set();
    let nested: Vec<Assertion> = ["[0,0.5]", "[-0.5,1]", "(-2,2)", "(-inf,3)"].iter().map(|s| Assertion::parse(s).unwrap()).collect();
    let est = belief_mc_many(Execution::Auto, &NormalMeanAssociation, &prs, 0.3, &nested, 30_000, 9).unwrap();
    for w in est.windows(2) {
        assert!(w[0].belief <= w[1].belief);
        assert!(w[0].plausibility <= w[1].plausibility);
    }
}

#[test]
fn results_do_not_depend_on_execution_mode() {
    let prs = default_random_set();
    let list = assertions();
    let a = belief_mc_many(Execution::Sequential, &NormalMeanAssociation, &prs, 0.7, &list, 10_000, 3).unwrap();
    let b = belief_mc_many(Execution::Auto, &NormalMeanAssociation, &prs, 0.7, &list, 10_000, 3).unwrap();
    assert_eq!(a, b);
    let c = im_infer::par::with_threads(Some(1), || {
        belief_mc_many(Execution::Auto, &NormalMeanAssociation, &prs, 0.7, &list, 10_000, 3).unwrap()
    });
    assert_eq!(a, c);
    let d = belief_mc_many(Execution::Auto, &NormalMeanAssociation, &prs, 0.7, &list, 10_000, 4).unwrap();
    assert_ne!(a, d);
}

#[test]
fn containment_probability_of_a_uniform_draw_is_uniform() {
    // Kolmogorov-Smirnov against Unif(0,1), 1% critical value.
    let prs = default_random_set();
    let mut rng = stream_rng(5, 0);
    let n = 100_000;
    let mut v: Vec<f64> = (0..n).map(|_| prs.containment_probability(rng.random::<f64>())).collect();
    v.sort_by(f64::total_cmp);
    let d = v
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - x))
        .fold(0.0, f64::max);
    assert!(d < 1.63 / (n as f64).sqrt(), "KS distance {d}");
}

#[test]
fn sampled_sets_are_centred_intervals() {
    let prs = default_random_set();
    let mut rng = stream_rng(6, 0);
    for _ in 0..1000 {
        let s = prs.sample(&mut rng);
        assert!(s.lo() > 0.0 && s.lo() <= 0.5 && s.hi() >= 0.5 && s.hi() < 1.0);
        assert!((s.lo() + s.hi() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn degenerate_focal_sets_contain_the_generating_parameter() {
    let mut rng = stream_rng(7, 0);
    let cv = CvAssociation::new(8).unwrap();
    for _ in 0..1000 {
        let u: f64 = rng.random_range(0.001..0.999);
        let theta: f64 = rng.random_range(-10.0..10.0);
        let x = NormalMeanAssociation.forward(theta, u).unwrap();
        let f = focal_set(&NormalMeanAssociation, x, AuxiliaryInterval::point(u).unwrap()).unwrap();
        let c = f.components()[0];
        assert!((c.lo.value - theta).abs() < 1e-9);

        let theta_cv = if theta.abs() < 0.2 { 0.2f64.copysign(theta) } else { theta };
        let u_cv = u.clamp(0.01, 0.99);
        let t = cv.forward(theta_cv, u_cv).unwrap();
        let f = focal_set(&cv, t, AuxiliaryInterval::point(u_cv).unwrap()).unwrap();
        let c = f.components()[0];
        assert!((1.0 / c.lo.value - 1.0 / theta_cv).abs() < 1e-8, "{theta_cv} {f}");
    }
}

#[test]
fn monte_carlo_region_tracks_the_exact_region() {
    let prs = default_random_set();
    let mc = MonteCarloPlausibility { assoc: &NormalMeanAssociation, prs: &prs, draws: 20_000, seed: 1 };
    let grid = GridSpec::new(-4.0, 4.0, 81, GridScale::Direct).unwrap();
    let region = plausibility_region(&mc, 0.5, 0.1, &grid).unwrap();
    let exact = normal_mean_plausibility_interval(0.5, 0.1).unwrap();
    let (r, e) = (region.components()[0], exact.components()[0]);
    assert_eq!(region.components().len(), 1);
    assert!((r.lo.value - e.lo.value).abs() < 0.05 && (r.hi.value - e.hi.value).abs() < 0.05, "{region} vs {exact}");
}

#[test]
fn errors_surface() {
    let prs = default_random_set();
    let a = Assertion::new(ParamSet::real_line(), "all");
    assert!(belief_mc(&NormalMeanAssociation, &prs, 0.0, &a, 0, 1).is_err());
    assert!(AuxiliaryInterval::new(0.7, 0.2).is_err());
    assert!(GridSpec::new(0.0, 1.0, 1, GridScale::Direct).is_err());
}
