//! Fixed-seed property suites behind `acyclic verify`.

use std::path::PathBuf;
use std::thread;

use acyclic_core::algorithms::{controls, nolp, te};
use acyclic_core::analysis::{test_correct_alone, CorrectAloneOutcome, CorrectAloneParams};
use acyclic_core::bounds::{refined_move_bound, total_move_bound, BoundValue};
use acyclic_core::engine::{
    explore_exhaustive, random_network, rng_from_seed, with_random_constants, InitDomain, Shape,
};
use acyclic_core::io::FORMAT;
use acyclic_core::transform::{check_local_mutual_exclusion, CheckMode, LmeParams};
use acyclic_core::{
    follows_acyclic_strategy, transform_default, AlgorithmSpec, AnalysisOptions, ForestNetwork,
};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::Output;
use crate::Status;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    TinyExhaustive,
    CorrectAlone,
    Lme,
    BoundsGrid,
    All,
}

impl Suite {
    const EACH: [Suite; 4] = [
        Suite::TinyExhaustive,
        Suite::CorrectAlone,
        Suite::Lme,
        Suite::BoundsGrid,
    ];

    fn name(self) -> &'static str {
        match self {
            Suite::TinyExhaustive => "tiny-exhaustive",
            Suite::CorrectAlone => "correct-alone",
            Suite::Lme => "lme",
            Suite::BoundsGrid => "bounds-grid",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Correct-alone trials per family and sampled configurations per
    /// local mutual exclusion check.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    format: u32,
    config: &'a ExperimentConfig,
    passed: bool,
    results: Vec<CheckResult>,
}

pub fn verify(args: VerifyArgs, out: &Output) -> anyhow::Result<Status> {
    let mut cfg = ExperimentConfig::new("verify", args.suite.name(), args.seed);
    let default_name = format!("verify-{}.json", args.suite.name());
    cfg.outputs.report = out.path(args.report_out.as_deref(), &default_name);
    let suites: Vec<Suite> = match args.suite {
        Suite::All => Suite::EACH.to_vec(),
        one => vec![one],
    };
    let (seed, trials) = (args.seed, args.trials);
    let per_suite: Vec<Vec<CheckResult>> = thread::scope(|s| {
        let handles: Vec<_> = suites
            .iter()
            .map(|&suite| s.spawn(move || run_suite(suite, seed, trials)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    });
    let results: Vec<CheckResult> = per_suite.into_iter().flatten().collect();
    let passed = results.iter().all(|r| r.passed);

    let mut table = String::new();
    for r in &results {
        table += &format!(
            "{} {:<16} {:<44} {}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.suite,
            r.name,
            r.detail
        );
    }
    table += &format!(
        "{}/{} checks passed\n",
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );
    let report = VerifyReport {
        format: FORMAT,
        config: &cfg,
        passed,
        results,
    };
    out.report(
        &report,
        &table,
        cfg.outputs.report.as_deref(),
        &default_name,
    )?;
    Ok(Status::from_bool(passed))
}

pub fn run_suite(suite: Suite, seed: u64, trials: u64) -> Vec<CheckResult> {
    match suite {
        Suite::TinyExhaustive => tiny_exhaustive(),
        Suite::CorrectAlone => correct_alone(seed, trials),
        Suite::Lme => lme(seed, trials),
        Suite::BoundsGrid => bounds_grid(seed),
        Suite::All => Suite::EACH
            .iter()
            .flat_map(|&s| run_suite(s, seed, trials))
            .collect(),
    }
}

fn check(suite: Suite, name: String, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        suite: suite.name(),
        name,
        passed,
        detail,
    }
}

fn forest(parents: &[Option<usize>]) -> ForestNetwork {
    ForestNetwork::from_parents(parents.to_vec()).expect("fixed forests are valid")
}

/// Every tree and forest on at most three nodes, up to relabelling.
fn tiny_networks() -> Vec<(&'static str, ForestNetwork)> {
    vec![
        ("single", forest(&[None])),
        ("line(2)", forest(&[None, Some(0)])),
        ("two roots", forest(&[None, None])),
        ("line(3)", forest(&[None, Some(0), Some(1)])),
        ("star(3)", forest(&[None, Some(0), Some(0)])),
        ("edge + root", forest(&[None, Some(0), None])),
        ("three roots", forest(&[None, None, None])),
    ]
}

fn explore_check(
    name: String,
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    domain: &InitDomain,
) -> CheckResult {
    let suite = Suite::TinyExhaustive;
    match explore_exhaustive(net, alg, domain, 5_000_000) {
        Ok(e) => check(
            suite,
            name,
            e.all_terminate && e.all_terminal_satisfy_sp == Some(true),
            format!(
                "{} initial, {} states, {} sinks, longest {} moves",
                e.initial_count,
                e.state_count,
                e.sink_count,
                e.longest_move_path
                    .map_or("-".to_string(), |l| l.to_string())
            ),
        ),
        Err(e) => check(suite, name, false, e.to_string()),
    }
}

fn tiny_exhaustive() -> Vec<CheckResult> {
    let mut results = Vec::new();
    let te = te::te();
    let te_domain = InitDomain::uniform(&te, &[0, 1, 2, 3]);
    for (label, net) in tiny_networks() {
        let patterns: [(&str, [i64; 3]); 2] = [("1,1,1", [1, 1, 1]), ("2,0,1", [2, 0, 1])];
        for (inputs, values) in patterns {
            let net = net.clone().with_const("input", |p| values[p.0]);
            results.push(explore_check(
                format!("te {label} input={inputs}"),
                &net,
                &te,
                &te_domain,
            ));
        }
    }
    let nolp = nolp::nolp();
    let nolp_domain = InitDomain::uniform(&nolp, &[0, 1, 2]);
    for (label, net) in tiny_networks().into_iter().filter(|(_, n)| n.len() == 2) {
        results.push(explore_check(
            format!("nolp {label}"),
            &net,
            &nolp,
            &nolp_domain,
        ));
    }
    results
}

fn correct_alone(seed: u64, trials: u64) -> Vec<CheckResult> {
    let suite = Suite::CorrectAlone;
    let mut results = Vec::new();
    let mut rng = rng_from_seed(seed);
    let shapes = [Shape::Line, Shape::Star, Shape::RandomTree];
    for alg in [te::te(), nolp::nolp()] {
        for (s, shape) in shapes.into_iter().enumerate() {
            let net = random_network(&mut rng, 10, shape);
            let net = with_random_constants(net, alg.schema(), &mut rng, 5);
            for i in alg.family_ids() {
                let params = CorrectAloneParams {
                    trials,
                    seed: seed.wrapping_add(s as u64),
                    ..CorrectAloneParams::default()
                };
                let name = format!("{} {} on {shape}(10)", alg.name(), alg.family(i).label());
                results.push(match test_correct_alone(&net, &alg, i, params) {
                    Ok(CorrectAloneOutcome::Pass { trials }) => {
                        check(suite, name, true, format!("{trials} trials"))
                    }
                    Ok(other) => check(suite, name, false, format!("{other:?}")),
                    Err(e) => check(suite, name, false, e.to_string()),
                });
            }
        }
    }
    // the control must be caught quickly
    let broken = controls::broken_counter();
    let params = CorrectAloneParams {
        trials: 100,
        seed,
        ..CorrectAloneParams::default()
    };
    let name = "broken-counter refuted within 100 trials".to_string();
    results.push(
        match test_correct_alone(
            &ForestNetwork::line(4),
            &broken,
            broken.family_ids().next().unwrap(),
            params,
        ) {
            Ok(CorrectAloneOutcome::Counterexample { trial, .. }) => check(
                suite,
                name,
                true,
                format!("counterexample at trial {trial}"),
            ),
            Ok(other) => check(suite, name, false, format!("{other:?}")),
            Err(e) => check(suite, name, false, e.to_string()),
        },
    );
    results
}

fn lme(seed: u64, samples: u64) -> Vec<CheckResult> {
    let suite = Suite::Lme;
    let mut results = Vec::new();
    let two_node = [
        ("line(2)", forest(&[None, Some(0)])),
        ("two roots", forest(&[None, None])),
    ];
    for original in [te::te(), nolp::nolp()] {
        let (_, t) = transform_default(&original).expect("built-ins are acyclic");
        let exhaustive = LmeParams {
            exhaustive_values: Some(vec![0, 1, 2]),
            ..LmeParams::default()
        };
        for (label, net) in &two_node {
            let net = net.clone().with_const("input", |_| 1);
            let name = format!("T({}) exhaustive on {label}", original.name());
            results.push(match check_local_mutual_exclusion(&net, &t, &exhaustive) {
                Ok(r) => check(
                    suite,
                    name,
                    r.passed() && r.mode == CheckMode::Exhaustive,
                    format!("{} configurations {:?}", r.checked, r.mode),
                ),
                Err(e) => check(suite, name, false, e.to_string()),
            });
            // without priorities two families share a node somewhere
            let name = format!("{} itself violates it on {label}", original.name());
            results.push(
                match check_local_mutual_exclusion(&net, &original, &exhaustive) {
                    Ok(r) => check(
                        suite,
                        name,
                        !r.passed(),
                        format!("after {} configurations", r.checked),
                    ),
                    Err(e) => check(suite, name, false, e.to_string()),
                },
            );
        }
        let mut rng = rng_from_seed(seed);
        for n in [5, 10, 15] {
            let net = random_network(&mut rng, n, Shape::RandomTree);
            let net = with_random_constants(net, original.schema(), &mut rng, 10);
            let params = LmeParams {
                samples,
                seed: seed.wrapping_add(n as u64),
                ..LmeParams::default()
            };
            let name = format!("T({}) sampled on random-tree({n})", original.name());
            results.push(match check_local_mutual_exclusion(&net, &t, &params) {
                Ok(r) => check(
                    suite,
                    name,
                    r.passed(),
                    format!("{} configurations", r.checked),
                ),
                Err(e) => check(suite, name, false, e.to_string()),
            });
        }
    }
    results
}

fn bounds_grid(seed: u64) -> Vec<CheckResult> {
    type Formula = fn(u64, u64, u64) -> u64;
    // closed forms in n, H and Delta
    let checks: [(&str, AlgorithmSpec, bool, Formula); 4] = [
        ("te refined = n^2(3+2H)", te::te(), false, |n, h, _| {
            n * n * (3 + 2 * h)
        }),
        ("te total = 2(2+Delta)n^3", te::te(), true, |n, _, d| {
            2 * (2 + d) * n.pow(3)
        }),
        (
            "nolp refined = (H+1)n + 2n^3 + 4(H+1)n^3",
            nolp::nolp(),
            false,
            |n, h, _| (h + 1) * n + 2 * n.pow(3) + 4 * (h + 1) * n.pow(3),
        ),
        (
            "nolp total = 3(2+Delta)^2 n^4",
            nolp::nolp(),
            true,
            |n, _, d| 3 * (2 + d).pow(2) * n.pow(4),
        ),
    ];
    let mut results = Vec::new();
    for (name, alg, total, formula) in checks {
        let mut trees = 0;
        let mut mismatch = None;
        'grid: for n in 1..=50usize {
            for shape in [Shape::Line, Shape::Star, Shape::RandomTree] {
                let net = random_network(&mut rng_from_seed(seed ^ n as u64), n, shape);
                let report = follows_acyclic_strategy(
                    &net,
                    &alg,
                    AnalysisOptions {
                        correct_alone: None,
                    },
                );
                let got = if total {
                    total_move_bound(&report, &net)
                } else {
                    refined_move_bound(&report, &net)
                };
                let expected = formula(n as u64, net.height() as u64, net.max_degree() as u64);
                trees += 1;
                if got != Ok(BoundValue::Exact(expected)) {
                    mismatch = Some(format!("{shape}({n}): got {got:?}, expected {expected}"));
                    break 'grid;
                }
            }
        }
        let detail = mismatch
            .clone()
            .unwrap_or_else(|| format!("{trees} trees, n in 1..=50"));
        results.push(check(
            Suite::BoundsGrid,
            name.to_string(),
            mismatch.is_none(),
            detail,
        ));
    }
    results
}
