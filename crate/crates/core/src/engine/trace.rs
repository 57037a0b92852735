//! Running executions and accounting for moves and rounds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::daemon::{Daemon, DaemonError};
use crate::model::{
    apply_step, enabled_nodes, enabled_set, Activation, AlgorithmSpec, Configuration, EvalError,
    ForestNetwork, StepError,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Terminal,
    StepLimitExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("step {step}: {source}")]
    Daemon { step: usize, source: DaemonError },
    #[error("step {step}: {source}")]
    Step { step: usize, source: StepError },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub selection: Vec<Activation>,
    /// Digest of the configuration reached by this step.
    pub digest: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Maximum number of steps before giving up.
    pub step_limit: u64,
    /// Keep every intermediate configuration, not only digests.
    pub keep_configs: bool,
}

impl RunOptions {
    pub fn with_limit(step_limit: u64) -> Self {
        Self {
            step_limit,
            keep_configs: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExecutionTrace {
    pub initial: Configuration,
    pub steps: Vec<StepRecord>,
    /// Configurations after each step, when requested.
    pub configs: Option<Vec<Configuration>>,
    pub final_config: Configuration,
    /// `moves[p][i]`: how many times `p` executed family `i`.
    pub moves: Vec<Vec<u64>>,
    pub total_moves: u64,
    pub rounds: u64,
    /// Number of steps completed when each round ended; a trailing partial
    /// round ends at the last step.
    pub round_boundaries: Vec<usize>,
    pub outcome: Outcome,
}

impl ExecutionTrace {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Moves per family, summed over nodes.
    pub fn moves_per_family(&self) -> Vec<u64> {
        let k = self.moves.first().map_or(0, Vec::len);
        (0..k)
            .map(|i| self.moves.iter().map(|row| row[i]).sum())
            .collect()
    }

    /// One-based round in which step `step` (zero-based) happened.
    pub fn round_of_step(&self, step: usize) -> u64 {
        self.round_boundaries.iter().filter(|&&b| b <= step).count() as u64 + 1
    }

    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            moves: self.moves.clone(),
            total_moves: self.total_moves,
            rounds: self.rounds,
            steps: self.steps.len() as u64,
        }
    }
}

/// What an audit needs from a trace; also recoverable from a trace CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub moves: Vec<Vec<u64>>,
    pub total_moves: u64,
    pub rounds: u64,
    pub steps: u64,
}

/// Incremental round accounting at process granularity: a round ends once
/// every process enabled at its start has moved or been neutralized.
#[derive(Debug, Clone)]
pub struct RoundCounter {
    pending: Vec<bool>,
    pending_count: usize,
    steps_in_round: usize,
    steps: usize,
    rounds: u64,
    boundaries: Vec<usize>,
}

impl RoundCounter {
    /// `enabled` flags processes enabled in the initial configuration.
    pub fn new(enabled: Vec<bool>) -> Self {
        let pending_count = enabled.iter().filter(|&&e| e).count();
        Self {
            pending: enabled,
            pending_count,
            steps_in_round: 0,
            steps: 0,
            rounds: 0,
            boundaries: Vec::new(),
        }
    }

    /// Records one step given who moved and who is enabled afterwards.
    pub fn observe(&mut self, selection: &[Activation], enabled_after: &[bool]) {
        self.steps += 1;
        self.steps_in_round += 1;
        for a in selection {
            if std::mem::replace(&mut self.pending[a.node.0], false) {
                self.pending_count -= 1;
            }
        }
        for (p, pending) in self.pending.iter_mut().enumerate() {
            if *pending && !enabled_after[p] {
                *pending = false;
                self.pending_count -= 1;
            }
        }
        if self.pending_count == 0 {
            self.rounds += 1;
            self.boundaries.push(self.steps);
            self.steps_in_round = 0;
            self.pending = enabled_after.to_vec();
            self.pending_count = enabled_after.iter().filter(|&&e| e).count();
        }
    }

    /// Rounds so far, with a trailing partial round counted as one.
    pub fn finish(&self) -> (u64, Vec<usize>) {
        let mut boundaries = self.boundaries.clone();
        let mut rounds = self.rounds;
        if self.steps_in_round > 0 {
            rounds += 1;
            boundaries.push(self.steps);
        }
        (rounds, boundaries)
    }
}

/// Recomputes rounds by replaying the selections of a trace.
pub fn count_rounds(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    initial: &Configuration,
    selections: &[Vec<Activation>],
) -> Result<(u64, Vec<usize>), StepError> {
    let mut counter = RoundCounter::new(enabled_nodes(net, alg, initial)?);
    let mut cfg = initial.clone();
    for selection in selections {
        cfg = apply_step(net, alg, &cfg, selection)?;
        counter.observe(selection, &enabled_nodes(net, alg, &cfg)?);
    }
    Ok(counter.finish())
}

/// Executes `alg` from `init` under `daemon` until a terminal configuration
/// or `options.step_limit` steps.
pub fn run(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    init: &Configuration,
    daemon: &mut dyn Daemon,
    options: RunOptions,
) -> Result<ExecutionTrace, RunError> {
    let mut cfg = init.clone();
    let mut moves = vec![vec![0u64; alg.k()]; net.len()];
    let mut total_moves = 0;
    let mut steps = Vec::new();
    let mut configs = options.keep_configs.then(Vec::new);
    let mut enabled = enabled_set(net, alg, &cfg)?;
    let mut counter = RoundCounter::new(flags(net.len(), &enabled));

    let outcome = loop {
        if enabled.is_empty() {
            break Outcome::Terminal;
        }
        if steps.len() as u64 >= options.step_limit {
            break Outcome::StepLimitExceeded;
        }
        let step = steps.len();
        let selection = daemon
            .select(&enabled)
            .map_err(|source| RunError::Daemon { step, source })?;
        cfg = apply_step(net, alg, &cfg, &selection)
            .map_err(|source| RunError::Step { step, source })?;
        for a in &selection {
            moves[a.node.0][a.family.0] += 1;
        }
        total_moves += selection.len() as u64;
        enabled = enabled_set(net, alg, &cfg)?;
        counter.observe(&selection, &flags(net.len(), &enabled));
        steps.push(StepRecord {
            selection,
            digest: cfg.digest(),
        });
        if let Some(configs) = configs.as_mut() {
            configs.push(cfg.clone());
        }
    };

    let (rounds, round_boundaries) = counter.finish();
    Ok(ExecutionTrace {
        initial: init.clone(),
        steps,
        configs,
        final_config: cfg,
        moves,
        total_moves,
        rounds,
        round_boundaries,
        outcome,
    })
}

fn flags(n: usize, enabled: &[Activation]) -> Vec<bool> {
    let mut out = vec![false; n];
    for a in enabled {
        out[a.node.0] = true;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::te;
    use crate::engine::daemon::{RandomCentral, Scripted, Synchronous};
    use crate::model::{is_terminal, NodeId};

    fn zero_line(n: usize) -> (ForestNetwork, Configuration) {
        let net = ForestNetwork::line(n).with_const("input", |_| 1);
        let cfg = Configuration::zeroed(&net, &te::schema()).unwrap();
        (net, cfg)
    }

    #[test]
    fn synchronous_steps_are_rounds() {
        let (net, init) = zero_line(5);
        let alg = te::te();
        let trace = run(
            &net,
            &alg,
            &init,
            &mut Synchronous,
            RunOptions::with_limit(1000),
        )
        .unwrap();
        assert_eq!(trace.outcome, Outcome::Terminal);
        assert_eq!(trace.rounds, trace.steps.len() as u64);
        assert_eq!(
            trace.round_boundaries,
            (1..=trace.steps.len()).collect::<Vec<_>>()
        );
        assert!(te::legitimacy(&net, &trace.final_config));
    }

    #[test]
    fn terminal_start_gives_an_empty_trace() {
        let net = ForestNetwork::line(1).with_const("input", |_| 3);
        let alg = te::te();
        let init = Configuration::zeroed(&net, &te::schema())
            .unwrap()
            .with(&te::schema(), 0, "sub", 3)
            .unwrap()
            .with(&te::schema(), 0, "res", 3)
            .unwrap();
        let trace = run(
            &net,
            &alg,
            &init,
            &mut Synchronous,
            RunOptions::with_limit(10),
        )
        .unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!((trace.rounds, trace.total_moves), (0, 0));
    }

    #[test]
    fn counters_agree() {
        let (net, init) = zero_line(6);
        let alg = te::te();
        let trace = run(
            &net,
            &alg,
            &init,
            &mut RandomCentral::new(4),
            RunOptions::with_limit(10_000),
        )
        .unwrap();
        let by_node: u64 = trace.moves.iter().flatten().sum();
        let by_step: u64 = trace.steps.iter().map(|s| s.selection.len() as u64).sum();
        assert_eq!(trace.total_moves, by_node);
        assert_eq!(trace.total_moves, by_step);
        assert!(trace.rounds <= trace.total_moves);
        assert!(is_terminal(&net, &alg, &trace.final_config).unwrap());
        let selections: Vec<_> = trace.steps.iter().map(|s| s.selection.clone()).collect();
        let (rounds, boundaries) = count_rounds(&net, &alg, &init, &selections).unwrap();
        assert_eq!(
            (rounds, boundaries),
            (trace.rounds, trace.round_boundaries.clone())
        );
    }

    #[test]
    fn step_limit_is_reported() {
        let (net, init) = zero_line(4);
        let trace = run(
            &net,
            &te::te(),
            &init,
            &mut Synchronous,
            RunOptions::with_limit(1),
        )
        .unwrap();
        assert_eq!(trace.outcome, Outcome::StepLimitExceeded);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.rounds, 1);
    }

    #[test]
    fn neutralization_closes_a_round() {
        // 2-line, all zero: S enabled at both nodes (leaf needs 1, root 1 + child).
        // Moving only the leaf leaves the root enabled, so the round stays open.
        let (net, init) = zero_line(2);
        let alg = te::te();
        let script = vec![
            Activation {
                node: NodeId(1),
                family: te::S,
            },
            Activation {
                node: NodeId(0),
                family: te::S,
            },
        ];
        let trace = run(
            &net,
            &alg,
            &init,
            &mut Scripted::new(script),
            RunOptions::with_limit(2),
        )
        .unwrap();
        assert_eq!(trace.round_boundaries, vec![2]);
        assert_eq!(trace.round_of_step(0), 1);
        assert_eq!(trace.round_of_step(1), 1);
    }

    #[test]
    fn scripted_error_carries_the_step() {
        let (net, init) = zero_line(2);
        let script = vec![Activation {
            node: NodeId(0),
            family: te::R,
        }];
        let err = run(
            &net,
            &te::te(),
            &init,
            &mut Scripted::new(script),
            RunOptions::with_limit(5),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            RunError::Daemon {
                step: 0,
                source: DaemonError::ScriptedDisabled { .. }
            }
        ));
    }
}
