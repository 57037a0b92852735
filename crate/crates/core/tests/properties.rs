use std::collections::BTreeSet;

use acyclic_core::algorithms::{controls, nolp, te};
use acyclic_core::analysis::{
    classify, follows_acyclic_strategy, impacting_zone, AnalysisOptions, Orientation,
};
use acyclic_core::bounds::{
    audit_trace, bound_report, per_node_move_bound, BoundValue, LmeEvidence,
};
use acyclic_core::engine::{
    random_configuration, random_instance, rng_from_seed, run, DaemonKind, Outcome, RunOptions,
    Shape,
};
use acyclic_core::model::{
    apply_step, enabled_set, is_terminal, Activation, AlgorithmSpec, EvalError, NodeId,
};
use acyclic_core::transform::{replay_on_original, transform_default};
use acyclic_core::{bounds, ForestNetwork};
use proptest::prelude::*;
use rand::Rng;

fn algorithms() -> Vec<AlgorithmSpec> {
    vec![te::te(), nolp::nolp(), controls::subtree_size()]
}

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        Just(Shape::Line),
        Just(Shape::Star),
        Just(Shape::RandomTree)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steps_respect_frame_and_snapshot(seed in any::<u64>(), n in 1usize..12, shape in shape(), which in 0usize..3) {
        let alg = &algorithms()[which];
        let (net, cfg) = random_instance(seed, n, shape, 20, alg);
        let enabled = enabled_set(&net, alg, &cfg).unwrap();
        prop_assume!(!enabled.is_empty());
        let mut rng = rng_from_seed(seed ^ 0x5eed);
        let mut selection: Vec<Activation> = Vec::new();
        for a in &enabled {
            if selection.last().map(|b| b.node) != Some(a.node) && rng.gen_bool(0.6) {
                selection.push(*a);
            }
        }
        if selection.is_empty() {
            selection.push(enabled[0]);
        }
        let next = apply_step(&net, alg, &cfg, &selection).unwrap();
        for p in net.nodes() {
            let chosen = selection.iter().find(|a| a.node == p);
            for v in alg.schema().vars().iter().enumerate().map(|(i, _)| acyclic_core::model::VarId(i)) {
                let written = chosen.is_some_and(|a| alg.family(a.family).writes().contains(&v));
                if !written {
                    prop_assert_eq!(next.get(p, v), cfg.get(p, v));
                }
            }
        }
        // each activation alone from the same pre-state writes the same values
        for a in &selection {
            let alone = apply_step(&net, alg, &cfg, &[*a]).unwrap();
            for &v in alg.family(a.family).writes() {
                prop_assert_eq!(alone.get(a.node, v), next.get(a.node, v));
            }
        }
    }

    #[test]
    fn zones_metrics_and_partition(seed in any::<u64>(), n in 1usize..30, shape in shape()) {
        let alg = nolp::nolp();
        let (net, _) = random_instance(seed, n, shape, 5, &alg);
        let report = follows_acyclic_strategy(&net, &alg, AnalysisOptions { correct_alone: None });
        let h = net.height();
        for m in &report.metrics {
            let z = m.zone_size.unwrap();
            prop_assert!(1 <= z && z <= n);
            prop_assert!(m.m.unwrap() <= h);
        }
        for f in &report.families {
            prop_assert!(f.max_others <= net.max_degree());
            if f.orientation == Some(Orientation::TopDown) {
                prop_assert!(report.metrics.iter().filter(|m| m.family == f.label).all(|m| m.zone_size.unwrap() <= h + 1));
            }
        }
        for p in net.nodes() {
            let below: BTreeSet<NodeId> = impacting_zone(&net, Orientation::BottomUp, p).into_iter().collect();
            let mut parts = vec![p];
            for &q in net.children(p) {
                parts.extend(impacting_zone(&net, Orientation::BottomUp, q));
            }
            prop_assert_eq!(parts.len(), below.len());
            prop_assert_eq!(parts.into_iter().collect::<BTreeSet<_>>(), below);
            if let Some(q) = net.parent(p) {
                let above = impacting_zone(&net, Orientation::TopDown, p);
                let mut expected = vec![p];
                expected.extend(impacting_zone(&net, Orientation::TopDown, q));
                prop_assert_eq!(above, expected);
            }
        }
    }

    #[test]
    fn random_runs_pass_the_audit(seed in any::<u64>(), n in 1usize..16, shape in shape(), which in 0usize..2, d in 0usize..4) {
        let alg = if which == 0 { te::te() } else { nolp::nolp() };
        let (net, init) = random_instance(seed, n, shape, 1000, &alg);
        let report = follows_acyclic_strategy(&net, &alg, AnalysisOptions { correct_alone: None });
        let bounds = bound_report(&report, &net, None).unwrap();
        let limit = bounds::default_step_limit(&net, &alg, 0);
        let trace = run(&net, &alg, &init, DaemonKind::ALL[d].build(seed).as_mut(), RunOptions::with_limit(limit)).unwrap();
        prop_assert_eq!(&trace.outcome, &Outcome::Terminal);
        prop_assert!(trace.rounds <= trace.total_moves);
        prop_assert_eq!(alg.is_legitimate(&net, &trace.final_config), Some(true));
        let audit = audit_trace(&trace.summary(), &bounds);
        prop_assert!(audit.passed, "{:?}", audit.violations);
    }

    #[test]
    fn transformed_guards_imply_originals(seed in any::<u64>(), n in 1usize..10, shape in shape(), which in 0usize..2) {
        let alg = if which == 0 { te::te() } else { nolp::nolp() };
        let (_, t) = transform_default(&alg).unwrap();
        let (net, _) = random_instance(seed, n, shape, 4, &alg);
        let mut rng = rng_from_seed(seed);
        for _ in 0..20 {
            let cfg = random_configuration(&net, alg.schema(), &mut rng, 4);
            let original = enabled_set(&net, &alg, &cfg).unwrap();
            let transformed = enabled_set(&net, &t, &cfg).unwrap();
            prop_assert!(transformed.iter().all(|a| original.contains(a)));
            prop_assert_eq!(original.is_empty(), transformed.is_empty());
            let mut nodes: Vec<NodeId> = transformed.iter().map(|a| a.node).collect();
            nodes.dedup();
            prop_assert_eq!(nodes.len(), transformed.len());
        }
    }

    #[test]
    fn transformed_runs_replay_on_the_original(seed in any::<u64>(), n in 1usize..12, shape in shape(), which in 0usize..2, d in 0usize..4) {
        let alg = if which == 0 { te::te() } else { nolp::nolp() };
        let (_, t) = transform_default(&alg).unwrap();
        let (net, init) = random_instance(seed, n, shape, 50, &alg);
        let trace = run(&net, &t, &init, DaemonKind::ALL[d].build(seed).as_mut(), RunOptions::with_limit(1_000_000)).unwrap();
        prop_assert!(replay_on_original(&net, &trace, &alg).ok);
        let report = follows_acyclic_strategy(&net, &t, AnalysisOptions { correct_alone: None });
        let bounds = bound_report(&report, &net, Some(LmeEvidence::Transformer)).unwrap();
        prop_assert!(audit_trace(&trace.summary(), &bounds).passed);
        let original_bounds = bound_report(&follows_acyclic_strategy(&net, &alg, AnalysisOptions { correct_alone: None }), &net, None).unwrap();
        prop_assert!(audit_trace(&trace.summary(), &original_bounds).passed);
    }

    #[test]
    fn per_node_bound_grows_with_the_zone(seed in any::<u64>(), n in 2usize..20) {
        let alg = te::te();
        let (net, _) = random_instance(seed, n, Shape::RandomTree, 3, &alg);
        let report = follows_acyclic_strategy(&net, &alg, AnalysisOptions { correct_alone: None });
        for i in [te::S, te::R] {
            for p in net.nodes() {
                for q in net.nodes() {
                    let zp = report.zone(&net, p, i).unwrap().len();
                    let zq = report.zone(&net, q, i).unwrap().len();
                    if zp <= zq {
                        prop_assert!(per_node_move_bound(&report, &net, p, i).unwrap() <= per_node_move_bound(&report, &net, q, i).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn removing_reads_never_removes_labels() {
    for alg in algorithms()
        .into_iter()
        .chain([controls::chaser(), controls::mutual_readers()])
    {
        let before = classify(&alg);
        for i in alg.family_ids() {
            for decl in alg.family(i).reads().iter() {
                let mut families = alg.families().to_vec();
                families[i.0] = alg.family(i).without_read(decl);
                let reduced =
                    AlgorithmSpec::new(alg.name(), alg.schema().clone(), families).unwrap();
                let after = classify(&reduced);
                assert!(!before[i.0].bottom_up || after[i.0].bottom_up);
                assert!(!before[i.0].top_down || after[i.0].top_down);
            }
        }
    }
}

#[test]
fn undeclared_reads_are_errors() {
    let alg = te::te();
    let sub = alg.schema().var("sub").unwrap();
    let mut families = alg.families().to_vec();
    families[0] = alg
        .family(te::S)
        .without_read(&acyclic_core::model::ReadDecl::new(
            acyclic_core::model::Relation::Children,
            sub,
        ));
    let crippled = AlgorithmSpec::new("te-crippled", alg.schema().clone(), families).unwrap();
    let net = ForestNetwork::line(2).with_const("input", |_| 1);
    let cfg = acyclic_core::Configuration::zeroed(&net, alg.schema()).unwrap();
    let err = enabled_set(&net, &crippled, &cfg).unwrap_err();
    assert!(matches!(err, EvalError::UndeclaredRead { .. }));
}

#[test]
fn refined_te_formula_over_a_grid() {
    let alg = te::te();
    for n in 1..=50usize {
        for shape in [Shape::Line, Shape::Star, Shape::RandomTree] {
            let (net, _) = random_instance(n as u64, n, shape, 3, &alg);
            let report = follows_acyclic_strategy(
                &net,
                &alg,
                AnalysisOptions {
                    correct_alone: None,
                },
            );
            let h = net.height() as u64;
            let n = n as u64;
            assert_eq!(
                bounds::refined_move_bound(&report, &net).unwrap(),
                BoundValue::Exact(n * n * (3 + 2 * h))
            );
        }
    }
}

#[test]
fn transformed_nolp_terminal_sets_agree_exhaustively() {
    let alg = nolp::nolp();
    let (_, t) = transform_default(&alg).unwrap();
    let net = ForestNetwork::line(2);
    let domain = acyclic_core::engine::InitDomain::uniform(&alg, &[0, 1, 2]);
    let vars: Vec<_> = alg.schema().writables().collect();
    let mut count = 0;
    // enumerate the product by counting in mixed radix
    let radices: Vec<usize> = net
        .nodes()
        .flat_map(|_| vars.iter().map(|&v| domain.get(v).unwrap().len()))
        .collect();
    let total: usize = radices.iter().product();
    let mut cfg = acyclic_core::Configuration::zeroed(&net, alg.schema()).unwrap();
    for mut code in 0..total {
        for p in net.nodes() {
            for &v in &vars {
                let vals = domain.get(v).unwrap();
                cfg.set(alg.schema(), p, v, vals[code % vals.len()])
                    .unwrap();
                code /= vals.len();
            }
        }
        assert_eq!(
            is_terminal(&net, &alg, &cfg).unwrap(),
            is_terminal(&net, &t, &cfg).unwrap()
        );
        count += 1;
    }
    assert_eq!(count, 2 * 2 * 3 * 3 * 3 * 3);
}
