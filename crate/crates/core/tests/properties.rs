mod common;

use proptest::prelude::*;

use fmetric::ffunc::{FFunction, WORKING_RANGE};
use fmetric::metrize::check_dominated;
use fmetric::topology::{forward_escape, reverse_escape};
use fmetric::{
    ball, brute_force_min_chain, cantor_check, check_d3, check_f1, check_inequality_2,
    check_metric_axioms, delta_for, diameters, finite_subcover, generate, greedy_net, metrize,
    min_chain_sum, shrink_generator, AlphaMode, Builtin, DistMatrix, FMetricInstance,
    GeneratorConfig, Geometry, MetricKind, VerdictReport, WeightDistribution,
};

fn builtin() -> impl Strategy<Value = Builtin> {
    prop::sample::select(Builtin::ALL.to_vec())
}

fn instance(max_n: usize) -> impl Strategy<Value = FMetricInstance> {
    (1..=max_n, builtin(), any::<u64>())
        .prop_map(|(n, f, seed)| generate(&GeneratorConfig::calibrated(n, f, seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f1_on_random_grids(f in builtin(), mut logs in prop::collection::vec(
        WORKING_RANGE.0.ln()..WORKING_RANGE.1.ln(), 1000)) {
        logs.sort_by(f64::total_cmp);
        let mut grid: Vec<f64> = logs.into_iter().map(f64::exp).collect();
        grid.dedup();
        let f: FFunction = f.into();
        prop_assert!(check_f1(&f, &grid).unwrap().passed());
    }

    #[test]
    fn delta_is_monotone_in_target(f in builtin(), a in -60.0f64..15.0, b in -60.0f64..15.0) {
        let (y1, y2) = if a <= b { (a, b) } else { (b, a) };
        let f: FFunction = f.into();
        let d1 = delta_for(&f, y1).unwrap();
        let d2 = delta_for(&f, y2).unwrap();
        prop_assert!(d1 <= d2 * (1.0 + 1e-9));
        prop_assert!(f.eval(d1 * (1.0 - 1e-9)).unwrap() < y1);
    }

    #[test]
    fn chain_search_matches_enumeration(inst in instance(10)) {
        let n = inst.size();
        for x in 0..n {
            for y in x + 1..n {
                let fast = min_chain_sum(&inst, x, y).unwrap();
                let slow = brute_force_min_chain(&inst, x, y).unwrap();
                prop_assert!((fast.total - slow.total).abs() <= 1e-12);
                prop_assert!(fast.total <= inst.dist(x, y));
                prop_assert_eq!(fast.chain.first(), Some(&x));
                prop_assert_eq!(fast.chain.last(), Some(&y));
            }
        }
    }

    #[test]
    fn d3_verdict_ignores_labels(inst in instance(9), rot in 0usize..9) {
        let n = inst.size();
        let perm: Vec<usize> = (0..n).map(|k| (k + rot) % n).rev().collect();
        let p = inst.permuted(&perm).unwrap();
        prop_assert_eq!(check_d3(&p).unwrap().status, check_d3(&inst).unwrap().status);
        let strict = inst.with_control(inst.control().with_alpha(0.0).unwrap());
        let strict_p = p.with_control(p.control().with_alpha(0.0).unwrap());
        prop_assert_eq!(check_d3(&strict).unwrap().status, check_d3(&strict_p).unwrap().status);
    }

    #[test]
    fn d3_survives_larger_alpha(inst in instance(9), extra in 0.0f64..5.0) {
        let bigger = inst.with_control(
            inst.control().with_alpha(inst.control().alpha() + extra).unwrap());
        prop_assert!(check_d3(&bigger).unwrap().passed());
    }

    #[test]
    fn metrize_is_idempotent(inst in instance(12)) {
        let m = metrize(&inst);
        let again = FMetricInstance::new(
            inst.points().to_vec(), m.matrix().clone(), inst.control().clone()).unwrap();
        let (diff, _, _) = metrize(&again).matrix().max_abs_diff(m.matrix());
        prop_assert!(diff <= 1e-12);
    }

    #[test]
    fn metrize_scales_linearly(inst in instance(12), k in -3i32..4, lambda in 0.01f64..100.0) {
        let m = metrize(&inst);
        // powers of two scale every sum exactly
        let pow2 = 2f64.powi(k);
        let scaled = FMetricInstance::new(
            inst.points().to_vec(), inst.matrix().scaled(pow2), inst.control().clone()).unwrap();
        let exact = metrize(&scaled);
        prop_assert_eq!(exact.matrix(), &m.matrix().scaled(pow2));
        let scaled = FMetricInstance::new(
            inst.points().to_vec(), inst.matrix().scaled(lambda), inst.control().clone()).unwrap();
        let (diff, _, _) = metrize(&scaled).matrix().max_abs_diff(&m.matrix().scaled(lambda));
        prop_assert!(diff <= 1e-12 * lambda.max(1.0) * 100.0);
    }

    #[test]
    fn induced_metric_contract(inst in instance(12), eps_star in 1e-9f64..10.0) {
        let m = metrize(&inst);
        prop_assert!(check_metric_axioms(&m).passed());
        prop_assert!(check_dominated(&inst, &m).passed());
        prop_assert!(check_inequality_2(&inst, &m, eps_star).unwrap().passed());
    }

    #[test]
    fn balls_grow_with_radius(inst in instance(12), r1 in 0.01f64..12.0, dr in 0.0f64..5.0) {
        let geo = Geometry::new(inst);
        for kind in [MetricKind::Original, MetricKind::Induced] {
            for c in 0..geo.size() {
                let small = ball(&geo, c, r1, kind).unwrap();
                let big = ball(&geo, c, r1 + dr, kind).unwrap();
                prop_assert!(small.is_subset_of(&big));
            }
        }
    }

    #[test]
    fn ball_containments(inst in instance(15)) {
        let geo = Geometry::new(inst);
        let f = geo.instance().control().f().clone();
        let alpha = geo.instance().control().alpha();
        let diam = geo.instance().diameter().max(1.0);
        for k in [0.05, 0.1, 0.25, 0.5, 1.0, 2.0] {
            let eps = k * diam;
            let delta = delta_for(&f, f.eval(eps).unwrap() - alpha).unwrap();
            for c in 0..geo.size() {
                prop_assert_eq!(forward_escape(&geo, c, eps).unwrap(), None);
                prop_assert_eq!(reverse_escape(&geo, c, delta / 2.0, eps).unwrap(), None);
            }
        }
    }

    #[test]
    fn diameter_lemma(inst in instance(15), mask in any::<u32>()) {
        let geo = Geometry::new(inst);
        let set: Vec<usize> = (0..geo.size()).filter(|&i| mask >> i & 1 == 1).collect();
        let dp = diameters(&geo, &set).unwrap();
        prop_assert!(dp.diam_induced <= dp.diam_original);
    }

    #[test]
    fn nets_and_subcovers(inst in instance(15), mask in any::<u32>(), eps in 0.05f64..12.0) {
        let geo = Geometry::new(inst);
        let mut set: Vec<usize> = (0..geo.size()).filter(|&i| mask >> i & 1 == 1).collect();
        if set.is_empty() {
            set.push(0);
        }
        for kind in [MetricKind::Original, MetricKind::Induced] {
            let net = greedy_net(&geo, &set, eps, kind).unwrap();
            prop_assert!(net.uncovered().is_none());
            prop_assert!(net.balls.len() <= set.len());
            prop_assert!(net.centers().iter().all(|c| set.contains(c)));

            let mut every = net.clone();
            every.balls = (0..geo.size()).map(|c| ball(&geo, c, eps, kind).unwrap()).collect();
            let sub = finite_subcover(&every).unwrap();
            prop_assert!(sub.uncovered().is_none());
            prop_assert!(sub.balls.iter().all(|b| every.balls.contains(b)));
        }
    }

    #[test]
    fn generated_families_satisfy_cantor(inst in instance(20), seed in any::<u64>()) {
        let geo = Geometry::new(inst);
        let nf = shrink_generator(&geo, seed, geo.size()).unwrap();
        for (dd, d_orig) in nf.diam_trace_induced.iter().zip(&nf.diam_trace_original) {
            prop_assert!(dd <= d_orig);
        }
        prop_assert!(nf.diam_trace_original.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(cantor_check(&geo, &nf, 1e-12).unwrap().passed());
        prop_assert_eq!(nf.intersection().len(), 1);
    }

    #[test]
    fn reports_round_trip(inst in instance(6)) {
        let r = fmetric::equivalence_report(&inst).unwrap();
        let back: VerdictReport = serde_json::from_str(&r.to_json_pretty()).unwrap();
        prop_assert_eq!(back, r);
    }
}

#[test]
fn euclidean_instances_are_their_own_metric() {
    for seed in 0..20 {
        let inst = generate(&GeneratorConfig {
            n_points: 12,
            weights: WeightDistribution::Euclidean { dim: 2, scale: 5.0 },
            f: Builtin::Ln,
            alpha: AlphaMode::Calibrated,
            seed,
        })
        .unwrap();
        let (diff, _, _) = metrize(&inst).matrix().max_abs_diff(inst.matrix());
        assert!(diff <= 1e-12, "seed {seed}: {diff}");
    }
}

#[test]
fn calibrated_generation_is_always_valid() {
    for n in [3, 5, 10, 20] {
        for seed in 0..100 {
            let f = Builtin::ALL[(seed % 4) as usize];
            let inst = generate(&GeneratorConfig::calibrated(n, f, seed)).unwrap();
            let r = check_d3(&inst).unwrap();
            assert!(r.passed(), "n={n} seed={seed}");
            let slack = r.facts["binding_pair"]["slack"].as_f64().unwrap();
            assert!(
                slack.abs() <= 1e-9,
                "n={n} seed={seed}: binding slack {slack}"
            );
        }
    }
}

/// Uniform weights on [0.1, 10] almost never satisfy the triangle inequality
/// on 5+ points; with alpha = 0 the chain inequality then fails. Seeds 0..10
/// all produce violating samples.
#[test]
fn zero_alpha_on_triangle_violating_sample_fails() {
    for seed in 0..10 {
        let inst = generate(&GeneratorConfig {
            alpha: AlphaMode::Fixed(0.0),
            ..GeneratorConfig::calibrated(5, Builtin::Ln, seed)
        })
        .unwrap();
        let m = metrize(&inst);
        let (gap, _, _) = m.matrix().max_abs_diff(inst.matrix());
        assert!(gap > 0.0, "seed {seed} sampled a metric");
        assert!(!check_d3(&inst).unwrap().passed(), "seed {seed}");
    }
}

#[test]
fn matrix_rows_round_trip() {
    let inst = common::three_point();
    let rows = inst.matrix().to_rows();
    assert_eq!(&DistMatrix::from_rows(&rows).unwrap(), inst.matrix());
}

#[test]
fn reverse_containment_on_20_points() {
    for seed in 0..50 {
        let f = Builtin::ALL[(seed % 4) as usize];
        let geo = Geometry::new(generate(&GeneratorConfig::calibrated(20, f, seed)).unwrap());
        let (f, alpha) = (
            geo.instance().control().f().clone(),
            geo.instance().control().alpha(),
        );
        for eps in [0.1, 0.5, 1.0] {
            let delta = delta_for(&f, f.eval(eps).unwrap() - alpha).unwrap();
            for c in 0..20 {
                assert_eq!(
                    reverse_escape(&geo, c, delta / 2.0, eps).unwrap(),
                    None,
                    "seed {seed} eps {eps} center {c}"
                );
            }
        }
    }
}
