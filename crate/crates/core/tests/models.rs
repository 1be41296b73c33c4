use im_infer::engine::{
    belief_mc, default_random_set, plausibility_region, Assertion, GridScale, GridSpec, SingletonPlausibility,
};
use im_infer::models::{
    cv_plausibility_interval, cv_singleton_plausibility, normal_mean_belief_closed, normal_mean_plausibility_interval,
    ConsonantModel, CvAssociation, CvStatistic, Dataset, NormalMeanAssociation,
};
use im_infer::paramset::ParamSet;
use im_infer::special::norm_cdf;

#[test]
fn normal_mean_consonant_form_matches_one_sided_formula() {
    for &(x, th) in &[(0.0, 1.959964), (1.2, 0.3), (-2.0, -2.0), (0.4, 3.1)] {
        let a: ParamSet = format!("(-inf,{th}]").parse().unwrap();
        let (b, p) = NormalMeanAssociation.belief_closed(x, &a).unwrap();
        let (b2, p2) = normal_mean_belief_closed(x, th);
        assert!((b - b2).abs() < 1e-14 && (p - p2).abs() < 1e-14);
    }
    let (b, _) = normal_mean_belief_closed(0.0, 1.959964);
    assert!((b - 0.95).abs() < 1e-6);
}

#[test]
fn normal_mean_two_sided_assertion_matches_simulation() {
    let prs = default_random_set();
    let a = Assertion::parse("(-inf,-1] u [0.5,2)").unwrap();
    for &x in &[-0.5, 0.8, 1.7] {
        let (b, p) = NormalMeanAssociation.belief_closed(x, &a.region).unwrap();
        let est = belief_mc(&NormalMeanAssociation, &prs, x, &a, 200_000, 3).unwrap();
        assert!((est.belief - b).abs() <= 4.0 * est.belief_mc_se.max(1e-6), "{x}: {} vs {b}", est.belief);
        assert!((est.plausibility - p).abs() <= 4.0 * est.plausibility_mc_se.max(1e-6));
    }
}

#[test]
fn normal_mean_region_agrees_with_formula_on_a_dense_grid() {
    let x = 0.37;
    let alpha = 0.1;
    let exact = normal_mean_plausibility_interval(x, alpha).unwrap();
    let grid = GridSpec::new(-5.0, 5.0, 1000, GridScale::Direct).unwrap();
    let scanned = plausibility_region(&NormalMeanAssociation, x, alpha, &grid).unwrap();
    for th in grid.points() {
        let p = NormalMeanAssociation.singleton_plausibility(x, th).unwrap();
        if (p - alpha).abs() > 1e-6 {
            assert_eq!(exact.contains(th), p > alpha);
            assert_eq!(scanned.contains(th), p > alpha);
        }
    }
}

#[test]
fn cv_region_agrees_with_formula_on_a_dense_grid() {
    let stat = CvStatistic { t: 2.1, n: 10 };
    let assoc = CvAssociation::new(stat.n).unwrap();
    let alpha = 0.05;
    let exact = cv_plausibility_interval(&stat, alpha).unwrap();
    let grid = GridSpec::new(-3.0, 3.0, 1000, GridScale::Reciprocal).unwrap();
    let scanned = plausibility_region(&assoc, stat.t, alpha, &grid).unwrap();
    let mut checked = 0;
    for psi in grid.points() {
        let th = 1.0 / psi;
        let p = assoc.singleton_plausibility(stat.t, th).unwrap();
        if (p - alpha).abs() > 1e-6 {
            assert_eq!(exact.contains(th), p > alpha, "formula at {th}");
            assert_eq!(scanned.contains(th), p > alpha, "scan at {th}: {scanned}");
            checked += 1;
        }
    }
    assert!(checked > 990);
}

#[test]
fn cv_closed_form_belief_matches_simulation() {
    let prs = default_random_set();
    let stat = CvStatistic { t: 1.4, n: 10 };
    let assoc = CvAssociation::new(stat.n).unwrap();
    for text in ["(-inf,9]", "(-inf,5] u [20,inf)", "[1,4]"] {
        let a = Assertion::parse(text).unwrap();
        let (b, p) = assoc.belief_closed(stat.t, &a.region).unwrap();
        let est = belief_mc(&assoc, &prs, stat.t, &a, 20_000, 11).unwrap();
        let se_b = est.belief_mc_se.max(1.0 / 20_000.0);
        let se_p = est.plausibility_mc_se.max(1.0 / 20_000.0);
        assert!((est.belief - b).abs() <= 4.0 * se_b, "{text}: {} vs {b}", est.belief);
        assert!((est.plausibility - p).abs() <= 4.0 * se_p, "{text}: {} vs {p}", est.plausibility);
    }
}

#[test]
fn cv_plausibility_stays_positive_at_infinity() {
    // Every region contains a neighbourhood of infinity once p(ψ = 0) > α,
    // however large the cut-off.
    let stat = CvStatistic { t: 0.6, n: 20 };
    let assoc = CvAssociation::new(stat.n).unwrap();
    let at_infinity = 1.0 - (2.0 * norm_cdf(stat.t) - 1.0).abs();
    for m in [1e2, 1e4, 1e8] {
        let tail: ParamSet = format!("(-inf,{}) u ({m},inf)", -m).parse().unwrap();
        let sup = assoc.sup_plausibility(stat.t, &tail).unwrap();
        assert!(sup >= 0.5, "sup over |θ| > {m} is {sup}");
        let p = cv_singleton_plausibility(&stat, m).unwrap();
        assert!(p > 0.5);
    }
    // t = 0.6 with n − 1 = 19 is not the normal limit, so compare loosely
    assert!(at_infinity > 0.5);
    assert!(cv_plausibility_interval(&stat, 0.05).unwrap().is_unbounded());
}

#[test]
fn cv_statistic_from_data() {
    let d = Dataset::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let s = d.sufficient_stats().unwrap().cv_statistic();
    let sd = (5.0f64 / 3.0).sqrt();
    assert!((s.t - 2.0 * 2.5 / sd).abs() < 1e-12);
    assert_eq!(s.n, 4);
}
