use std::fs;
use std::path::PathBuf;

use acyclic_core::analysis::{build_causality_graph, CorrectAloneParams};
use acyclic_core::bounds::{default_step_limit, Audit, LmeEvidence, RoundBound};
use acyclic_core::engine::{
    explore_exhaustive, Daemon, ExplorationResult, InitDomain, Outcome, Scripted,
};
use acyclic_core::io::{self, RunSummary, FORMAT};
use acyclic_core::transform::{
    check_local_mutual_exclusion, replay_on_original, transformed_causality_height, CheckMode,
    LmeParams, LmeResult, ReplayReport, TransformedHeight,
};
use acyclic_core::{
    audit_trace, bound_report, derive_order, follows_acyclic_strategy, transform_default,
    Activation, AlgorithmSpec, AnalysisOptions, AnalysisReport, BoundReport, PriorityOrder,
    RunOptions,
};
use anyhow::{bail, Context};
use clap::Args;
use serde::Serialize;

use crate::config::{
    self, DaemonName, DaemonSpec, ExperimentConfig, InitArgs, InitSource, NetworkArgs,
    NetworkSource, WorstCaseKind,
};
use crate::output::Output;
use crate::Status;

/// Step limit for algorithms whose causality graph gives no bound.
const FALLBACK_STEP_LIMIT: u64 = 1_000_000;
/// State cap of `analyze --exhaustive`.
const EXPLORE_LIMIT: usize = 2_000_000;

fn analysis_options(trials: u64, seed: u64) -> AnalysisOptions {
    AnalysisOptions {
        correct_alone: (trials > 0).then(|| CorrectAloneParams {
            trials,
            seed,
            ..CorrectAloneParams::default()
        }),
    }
}

fn values_up_to(bound: i64) -> anyhow::Result<Vec<i64>> {
    if bound < 0 {
        bail!("exhaustive value bound must be non-negative");
    }
    Ok((0..=bound).collect())
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Registered algorithm name.
    pub algorithm: String,
    #[command(flatten)]
    pub net: NetworkArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Correct-alone trials per family; 0 skips the test.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Also explore every execution from every configuration with values
    /// in [0, BOUND].
    #[arg(long, value_name = "BOUND")]
    pub exhaustive: Option<i64>,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    format: u32,
    config: &'a ExperimentConfig,
    analysis: &'a AnalysisReport,
    bounds: Option<BoundReport>,
    exploration: Option<ExplorationResult>,
}

pub fn analyze(args: AnalyzeArgs, out: &Output) -> anyhow::Result<Status> {
    let alg = config::algorithm(&args.algorithm)?;
    let (net, source) = config::network(&args.net, &args.algorithm, args.seed)?;
    let mut cfg = ExperimentConfig::new("analyze", &args.algorithm, args.seed);
    cfg.network = Some(source);
    cfg.exhaustive = args.exhaustive;
    cfg.outputs.report = out.path(args.report_out.as_deref(), "analyze.json");

    let analysis = follows_acyclic_strategy(&net, &alg, analysis_options(args.trials, args.seed));
    let bounds = bound_report(&analysis, &net, None).ok();
    let exploration = match args.exhaustive {
        Some(bound) => {
            let domain = InitDomain::uniform(&alg, &values_up_to(bound)?);
            Some(explore_exhaustive(&net, &alg, &domain, EXPLORE_LIMIT)?)
        }
        None => None,
    };
    let explored_ok = exploration
        .as_ref()
        .is_none_or(|e| e.all_terminate && e.all_terminal_satisfy_sp != Some(false));

    let mut table = analysis.table();
    if let Some(b) = &bounds {
        table += &b.table();
    }
    if let Some(e) = &exploration {
        table += &format!(
            "exhaustive: {} initial, {} states, {} sinks, all terminate: {}, sinks legitimate: {}\n",
            e.initial_count,
            e.state_count,
            e.sink_count,
            e.all_terminate,
            e.all_terminal_satisfy_sp.map_or("n/a".to_string(), |b| b.to_string()),
        );
    }
    let verdict = analysis.verdict && explored_ok;
    let report = AnalyzeReport {
        format: FORMAT,
        config: &cfg,
        analysis: &analysis,
        bounds,
        exploration,
    };
    out.report(
        &report,
        &table,
        cfg.outputs.report.as_deref(),
        "analyze.json",
    )?;
    Ok(Status::from_bool(verdict))
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Registered algorithm name.
    pub algorithm: String,
    #[command(flatten)]
    pub net: NetworkArgs,
    #[command(flatten)]
    pub init: InitArgs,
    /// Daemon; scripted runs default to their script, others to
    /// random-distributed.
    #[arg(long, value_enum)]
    pub daemon: Option<DaemonName>,
    /// Selection probability of the random distributed daemon.
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to the total move bound plus one.
    #[arg(long)]
    pub steps_limit: Option<u64>,
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
    /// Run the priority-transformed algorithm instead.
    #[arg(long)]
    pub transform: bool,
}

#[derive(Serialize)]
struct RunReport<'a> {
    format: u32,
    config: &'a ExperimentConfig,
    order: Option<Vec<String>>,
    summary: RunSummary,
    audit: Option<Audit>,
    /// Audit of a transformed run against the original algorithm's bounds.
    original_audit: Option<Audit>,
    replay: Option<ReplayReport>,
    round_bound: Option<RoundBound>,
    passed: bool,
}

pub fn run(args: RunArgs, out: &Output) -> anyhow::Result<Status> {
    let original = config::algorithm(&args.algorithm)?;
    let mut cfg = ExperimentConfig::new("run", &args.algorithm, args.seed);
    cfg.transform = args.transform;

    let (net, init, script) = match args.init.worstcase {
        Some(kind) => {
            if args.algorithm != "te" {
                bail!("worst-case constructions exist for `te` only");
            }
            let n = args.net.n.context("--worstcase needs --n")?;
            let wc = kind.build(n)?;
            cfg.network = Some(NetworkSource::WorstCase { kind, n });
            cfg.init = Some(InitSource::WorstCase { kind });
            let schedule = wc.schedule();
            (wc.network, wc.initial, Some(schedule))
        }
        None => {
            let (net, source) = config::network(&args.net, &args.algorithm, args.seed)?;
            let (init, init_source) = config::initial(&args.init, &net, &original, args.seed)?;
            cfg.network = Some(source);
            cfg.init = Some(init_source);
            (net, init, None)
        }
    };

    let (alg, order) = if args.transform {
        let (order, t) = transform_default(&original)?;
        (t, Some(order.labels(&original)))
    } else {
        (original.clone(), None)
    };

    let mut daemon: Box<dyn Daemon> = match (args.daemon, script) {
        (None, Some(script)) => {
            cfg.daemon = Some(DaemonSpec::Scripted {
                moves: script.len(),
            });
            Box::new(Scripted::new(script))
        }
        (name, _) => {
            let kind =
                config::daemon_kind(name.unwrap_or(DaemonName::RandomDistributed), args.rho)?;
            cfg.daemon = Some(DaemonSpec::Builtin(kind));
            kind.build(args.seed)
        }
    };
    let limit = args
        .steps_limit
        .unwrap_or_else(|| default_step_limit(&net, &alg, FALLBACK_STEP_LIMIT));
    cfg.step_limit = Some(limit);
    cfg.outputs.trace = out.path(args.trace_out.as_deref(), "trace.csv");
    cfg.outputs.summary = out.path(args.summary_out.as_deref(), "summary.json");

    let trace = match acyclic_core::run(
        &net,
        &alg,
        &init,
        daemon.as_mut(),
        RunOptions::with_limit(limit),
    ) {
        Ok(trace) => trace,
        Err(e) => {
            eprintln!("run failed: {e}");
            return Ok(Status::Failure);
        }
    };

    let no_sampling = AnalysisOptions {
        correct_alone: None,
    };
    let lme = args.transform.then_some(LmeEvidence::Transformer);
    let bounds = bound_report(
        &follows_acyclic_strategy(&net, &alg, no_sampling),
        &net,
        lme,
    )
    .ok();
    let audit = bounds.as_ref().map(|b| audit_trace(&trace.summary(), b));
    let (original_audit, replay) = if args.transform {
        let original_bounds = bound_report(
            &follows_acyclic_strategy(&net, &original, no_sampling),
            &net,
            None,
        )
        .ok();
        (
            original_bounds.map(|b| audit_trace(&trace.summary(), &b)),
            Some(replay_on_original(&net, &trace, &original)),
        )
    } else {
        (None, None)
    };

    let summary = RunSummary::new(&net, &alg, &trace);
    let passed = trace.outcome == Outcome::Terminal
        && audit.as_ref().is_none_or(|a| a.passed)
        && original_audit.as_ref().is_none_or(|a| a.passed)
        && replay.as_ref().is_none_or(|r| r.ok)
        && summary.legitimate != Some(false);

    if let Some(path) = &cfg.outputs.trace {
        let mut csv = Vec::new();
        io::write_trace_csv(&mut csv, &trace, &alg)?;
        out.write(path, &csv)?;
    }

    let mut table = format!(
        "{} on {} nodes (H={}, Delta={})\n",
        alg.name(),
        net.len(),
        net.height(),
        net.max_degree()
    );
    let outcome = match summary.outcome {
        Outcome::Terminal => "terminal",
        Outcome::StepLimitExceeded => "step limit exceeded",
    };
    table += &format!("outcome: {outcome} after {} steps\n", summary.steps);
    let per_family: Vec<String> = alg
        .families()
        .iter()
        .zip(trace.moves_per_family())
        .map(|(f, m)| format!("{} {m}", f.label()))
        .collect();
    table += &format!(
        "moves: {} ({})\n",
        summary.total_moves,
        per_family.join(", ")
    );
    table += &format!("rounds: {}\n", summary.rounds);
    if let Some(legitimate) = summary.legitimate {
        table += &format!("legitimate: {legitimate}\n");
    }
    for (name, audit) in [("audit", &audit), ("original audit", &original_audit)] {
        match audit {
            Some(a) if a.passed => table += &format!("{name}: passed\n"),
            Some(a) => {
                table += &format!("{name}: FAILED\n");
                for v in &a.violations {
                    table += &format!("  - {v}\n");
                }
            }
            None if name == "audit" => table += "audit: no bounds for this algorithm\n",
            None => {}
        }
    }
    if let Some(r) = &replay {
        table += &format!(
            "replay on original: {}\n",
            r.failure.as_deref().unwrap_or("ok")
        );
    }

    let round_bound = bounds.as_ref().and_then(|b| b.round_bound);
    let report = RunReport {
        format: FORMAT,
        config: &cfg,
        order,
        summary,
        audit,
        original_audit,
        replay,
        round_bound,
        passed,
    };
    out.report(
        &report,
        &table,
        cfg.outputs.summary.as_deref(),
        "summary.json",
    )?;
    Ok(Status::from_bool(passed))
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Registered algorithm name.
    pub algorithm: String,
    #[command(flatten)]
    pub net: NetworkArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Priority order as comma-separated family labels, highest first;
    /// derived from the causality graph when omitted.
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<String>>,
    /// Sampled configurations for the local mutual exclusion check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Enumerate configurations with values in [0, BOUND] instead of
    /// sampling, when the space is small enough.
    #[arg(long, value_name = "BOUND")]
    pub exhaustive: Option<i64>,
    /// Correct-alone trials per family of T(A); 0 skips the test.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct LmeView {
    mode: CheckMode,
    checked: u64,
    passed: bool,
    counterexample: Option<LmeCounterexampleView>,
}

#[derive(Serialize)]
struct LmeCounterexampleView {
    node: usize,
    families: Vec<String>,
    configuration: serde_json::Value,
}

fn lme_view(result: &LmeResult, alg: &AlgorithmSpec) -> anyhow::Result<LmeView> {
    let counterexample = match &result.counterexample {
        Some(cx) => Some(LmeCounterexampleView {
            node: cx.node.0,
            families: cx
                .families
                .iter()
                .map(|&i| alg.family(i).label().to_string())
                .collect(),
            configuration: serde_json::from_str(&io::configuration_to_json(
                &cx.configuration,
                alg,
            ))?,
        }),
        None => None,
    };
    Ok(LmeView {
        mode: result.mode,
        checked: result.checked,
        passed: result.passed(),
        counterexample,
    })
}

#[derive(Serialize)]
struct TransformReport<'a> {
    format: u32,
    config: &'a ExperimentConfig,
    order: Vec<String>,
    analysis: &'a AnalysisReport,
    local_mutual_exclusion: LmeView,
    transformed_height: TransformedHeight,
}

fn parse_order(labels: &[String], alg: &AlgorithmSpec) -> anyhow::Result<PriorityOrder> {
    let sequence = labels
        .iter()
        .map(|l| {
            alg.family_by_label(l)
                .with_context(|| format!("`{}` has no family `{l}`", alg.name()))
        })
        .collect::<anyhow::Result<_>>()?;
    let order = PriorityOrder::new(sequence);
    order.validate(alg, &build_causality_graph(alg))?;
    Ok(order)
}

pub fn transform(args: TransformArgs, out: &Output) -> anyhow::Result<Status> {
    let alg = config::algorithm(&args.algorithm)?;
    let (net, source) = config::network(&args.net, &args.algorithm, args.seed)?;
    let mut cfg = ExperimentConfig::new("transform", &args.algorithm, args.seed);
    cfg.network = Some(source);
    cfg.transform = true;
    cfg.exhaustive = args.exhaustive;
    cfg.outputs.report = out.path(args.report_out.as_deref(), "transform.json");

    let order = match &args.order {
        Some(labels) => parse_order(labels, &alg)?,
        None => match derive_order(&build_causality_graph(&alg)) {
            Ok(order) => order,
            Err(e) => {
                eprintln!("no priority order: {e}");
                return Ok(Status::Failure);
            }
        },
    };
    let t = acyclic_core::transform(&alg, &order)?;
    let analysis = follows_acyclic_strategy(&net, &t, analysis_options(args.trials, args.seed));
    let params = LmeParams {
        samples: args.samples,
        seed: args.seed,
        exhaustive_values: args.exhaustive.map(values_up_to).transpose()?,
        ..LmeParams::default()
    };
    let lme = check_local_mutual_exclusion(&net, &t, &params)?;
    let height = transformed_causality_height(&net, &alg, &order, 1000, args.seed)?;

    let labels = order.labels(&alg);
    let mut table = format!("priority order: {}\n", labels.join(" > "));
    table += &analysis.table();
    table += &format!(
        "local mutual exclusion: {} ({} configurations, {:?})\n",
        if lme.passed() { "holds" } else { "VIOLATED" },
        lme.checked,
        lme.mode
    );
    table += &format!(
        "causality height of T(A): {} (k - 1 = {})\n",
        height
            .height
            .map_or("cyclic".to_string(), |h| h.to_string()),
        height.expected
    );
    let passed = analysis.verdict && lme.passed();
    let report = TransformReport {
        format: FORMAT,
        config: &cfg,
        order: labels,
        analysis: &analysis,
        local_mutual_exclusion: lme_view(&lme, &t)?,
        transformed_height: height,
    };
    out.report(
        &report,
        &table,
        cfg.outputs.report.as_deref(),
        "transform.json",
    )?;
    Ok(Status::from_bool(passed))
}

#[derive(Debug, Args)]
pub struct WorstcaseArgs {
    #[arg(value_enum)]
    pub kind: WorstCaseKind,
    #[arg(long)]
    pub n: usize,
    /// Replay the schedule on the priority-transformed `te`.
    #[arg(long)]
    pub transform: bool,
    /// Write the network JSON here.
    #[arg(long)]
    pub network_out: Option<PathBuf>,
    /// Write the initial configuration JSON here.
    #[arg(long)]
    pub init_out: Option<PathBuf>,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ScheduledMove {
    node: usize,
    family: String,
}

#[derive(Serialize)]
struct Replay {
    terminal: bool,
    legitimate: Option<bool>,
    script_moves: usize,
    completion_moves: usize,
    total_moves: u64,
    rounds: u64,
    error: Option<String>,
}

#[derive(Serialize)]
struct WorstcaseReport<'a> {
    format: u32,
    config: &'a ExperimentConfig,
    kind: WorstCaseKind,
    n: usize,
    network: serde_json::Value,
    initial: serde_json::Value,
    script: Vec<ScheduledMove>,
    completion: Vec<ScheduledMove>,
    replay: Replay,
}

fn scheduled(moves: &[Activation], alg: &AlgorithmSpec) -> Vec<ScheduledMove> {
    moves
        .iter()
        .map(|a| ScheduledMove {
            node: a.node.0,
            family: alg.family(a.family).label().to_string(),
        })
        .collect()
}

pub fn worstcase(args: WorstcaseArgs, out: &Output) -> anyhow::Result<Status> {
    let wc = args.kind.build(args.n)?;
    let original = acyclic_core::algorithms::te();
    let alg = if args.transform {
        transform_default(&original)?.1
    } else {
        original
    };
    let mut cfg = ExperimentConfig::new("worstcase", "te", 0);
    cfg.network = Some(NetworkSource::WorstCase {
        kind: args.kind,
        n: args.n,
    });
    cfg.init = Some(InitSource::WorstCase { kind: args.kind });
    cfg.daemon = Some(DaemonSpec::Scripted {
        moves: wc.script.len() + wc.completion.len(),
    });
    cfg.transform = args.transform;
    let name = format!("worstcase-{}-{}", args.kind.name(), args.n);
    cfg.outputs.report = out.path(args.report_out.as_deref(), &format!("{name}.json"));

    let network_json = io::network_to_json(&wc.network);
    let init_json = io::configuration_to_json(&wc.initial, &alg);
    if let Some(path) = &args.network_out {
        out.write(path, network_json.as_bytes())?;
    }
    if let Some(path) = &args.init_out {
        out.write(path, init_json.as_bytes())?;
    }

    let schedule = wc.schedule();
    let limit = schedule.len() as u64 + 1;
    let replay = match acyclic_core::run(
        &wc.network,
        &alg,
        &wc.initial,
        &mut Scripted::new(schedule),
        RunOptions::with_limit(limit),
    ) {
        Ok(trace) => Replay {
            terminal: trace.outcome == Outcome::Terminal,
            legitimate: alg.is_legitimate(&wc.network, &trace.final_config),
            script_moves: wc.script.len(),
            completion_moves: wc.completion.len(),
            total_moves: trace.total_moves,
            rounds: trace.rounds,
            error: None,
        },
        Err(e) => Replay {
            terminal: false,
            legitimate: None,
            script_moves: wc.script.len(),
            completion_moves: wc.completion.len(),
            total_moves: 0,
            rounds: 0,
            error: Some(e.to_string()),
        },
    };
    let ok = replay.terminal && replay.error.is_none();
    let table = format!(
        "{} n={}: {} scripted moves + {} to terminal = {} moves, {} rounds, terminal: {}{}\n",
        args.kind.name(),
        args.n,
        replay.script_moves,
        replay.completion_moves,
        replay.total_moves,
        replay.rounds,
        replay.terminal,
        replay
            .error
            .as_ref()
            .map_or(String::new(), |e| format!(" ({e})")),
    );
    let report = WorstcaseReport {
        format: FORMAT,
        config: &cfg,
        kind: args.kind,
        n: args.n,
        network: serde_json::from_str(&network_json)?,
        initial: serde_json::from_str(&init_json)?,
        script: scheduled(&wc.script, &alg),
        completion: scheduled(&wc.completion, &alg),
        replay,
    };
    out.report(
        &report,
        &table,
        cfg.outputs.report.as_deref(),
        &format!("{name}.json"),
    )?;
    Ok(Status::from_bool(ok))
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Registered algorithm name.
    pub algorithm: String,
    #[command(flatten)]
    pub net: NetworkArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bounds of the priority-transformed algorithm, with its round bound.
    #[arg(long)]
    pub transform: bool,
    /// Establish local mutual exclusion by enumerating configurations with
    /// values in [0, BOUND]; a success adds the round bound.
    #[arg(long, value_name = "BOUND", conflicts_with = "transform")]
    pub exhaustive: Option<i64>,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct BoundsFile<'a> {
    format: u32,
    config: &'a ExperimentConfig,
    bounds: BoundReport,
}

pub fn bounds(args: BoundsArgs, out: &Output) -> anyhow::Result<Status> {
    let original = config::algorithm(&args.algorithm)?;
    let (net, source) = config::network(&args.net, &args.algorithm, args.seed)?;
    let mut cfg = ExperimentConfig::new("bounds", &args.algorithm, args.seed);
    cfg.network = Some(source);
    cfg.transform = args.transform;
    cfg.exhaustive = args.exhaustive;
    cfg.outputs.report = out.path(args.report_out.as_deref(), "bounds.json");

    let (alg, mut lme) = if args.transform {
        (
            transform_default(&original)?.1,
            Some(LmeEvidence::Transformer),
        )
    } else {
        (original, None)
    };
    let mut notes = String::new();
    if let Some(bound) = args.exhaustive {
        let params = LmeParams {
            exhaustive_values: Some(values_up_to(bound)?),
            samples: 0,
            ..LmeParams::default()
        };
        let result = check_local_mutual_exclusion(&net, &alg, &params)?;
        match (result.mode, result.passed()) {
            (CheckMode::Exhaustive, true) => lme = Some(LmeEvidence::Exhaustive),
            (CheckMode::Exhaustive, false) => {
                notes += "local mutual exclusion fails on the enumerated space\n"
            }
            (CheckMode::Sampled, _) => notes += "configuration space too large to enumerate\n",
        }
    }
    let analysis = follows_acyclic_strategy(
        &net,
        &alg,
        AnalysisOptions {
            correct_alone: None,
        },
    );
    let report = match bound_report(&analysis, &net, lme) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("no bounds: {e}");
            return Ok(Status::Failure);
        }
    };
    let table = report.table() + &notes;
    let file = BoundsFile {
        format: FORMAT,
        config: &cfg,
        bounds: report,
    };
    out.report(&file, &table, cfg.outputs.report.as_deref(), "bounds.json")?;
    Ok(Status::Success)
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Trace CSV written by `run`.
    #[arg(long)]
    pub trace: PathBuf,
    /// Bounds report JSON written by `bounds`.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct AuditFile<'a> {
    format: u32,
    config: &'a ExperimentConfig,
    audit: Audit,
}

/// Accepts a bare bound report or the file written by `bounds`.
fn read_bound_report(text: &str) -> anyhow::Result<BoundReport> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    if let Some(inner) = value.get_mut("bounds") {
        value = inner.take();
    }
    Ok(serde_json::from_value(value)?)
}

pub fn audit(args: AuditArgs, out: &Output) -> anyhow::Result<Status> {
    let report_text = fs::read_to_string(&args.report)
        .with_context(|| format!("cannot read {}", args.report.display()))?;
    let bounds = read_bound_report(&report_text)
        .with_context(|| format!("invalid bounds report {}", args.report.display()))?;
    let csv = fs::File::open(&args.trace)
        .with_context(|| format!("cannot read {}", args.trace.display()))?;
    let summary = io::read_trace_csv(csv, bounds.per_node.len(), &bounds.families)
        .with_context(|| format!("invalid trace {}", args.trace.display()))?;

    let mut cfg = ExperimentConfig::new("audit", &bounds.algorithm, 0);
    cfg.outputs.trace = Some(args.trace.clone());
    cfg.outputs.report = out.path(args.report_out.as_deref(), "audit.json");
    let audit = audit_trace(&summary, &bounds);

    let mut table = format!(
        "{} moves, {} rounds: {}\n",
        audit.total_moves,
        audit.rounds,
        if audit.passed {
            "within bounds"
        } else {
            "BOUND VIOLATED"
        }
    );
    for v in &audit.violations {
        table += &format!("  - {v}\n");
    }
    let passed = audit.passed;
    let file = AuditFile {
        format: FORMAT,
        config: &cfg,
        audit,
    };
    out.report(&file, &table, cfg.outputs.report.as_deref(), "audit.json")?;
    Ok(Status::from_bool(passed))
}
