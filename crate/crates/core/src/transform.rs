//! Priority transformer: guards of lower-priority families are strengthened
//! with the negation of every higher-priority guard at the same node.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{build_causality_graph, CausalityGraph};
use crate::engine::explore::initial_configurations;
use crate::engine::{random_configuration, rng_from_seed, ExecutionTrace, InitDomain, Outcome};
use crate::model::{
    apply_step, enabled_set, is_terminal, AlgorithmSpec, Configuration, EvalError, FamilyId,
    FamilySpec, ForestNetwork, GuardFn, NodeId, ReadSet,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("graph of actions' causality has a cycle; no compatible order exists")]
    Cyclic,
    #[error("order is not a permutation of the {0} families")]
    NotPermutation(usize),
    #[error("order puts {later} before {earlier} although {earlier} precedes it causally")]
    Incompatible { earlier: String, later: String },
}

/// Families from highest to lowest priority.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PriorityOrder {
    sequence: Vec<FamilyId>,
}

impl PriorityOrder {
    pub fn new(sequence: Vec<FamilyId>) -> Self {
        Self { sequence }
    }

    pub fn sequence(&self) -> &[FamilyId] {
        &self.sequence
    }

    /// Position of `i` in the order (0 is the highest priority).
    pub fn rank(&self, i: FamilyId) -> Option<usize> {
        self.sequence.iter().position(|&f| f == i)
    }

    /// Labels in priority order.
    pub fn labels(&self, alg: &AlgorithmSpec) -> Vec<String> {
        self.sequence
            .iter()
            .map(|&i| alg.family(i).label().to_string())
            .collect()
    }

    /// Checks that the order is a permutation compatible with `≺`.
    pub fn validate(
        &self,
        alg: &AlgorithmSpec,
        graph: &CausalityGraph,
    ) -> Result<(), TransformError> {
        let k = alg.k();
        let mut seen = vec![false; k];
        for &i in &self.sequence {
            if i.0 >= k || std::mem::replace(&mut seen[i.0], true) {
                return Err(TransformError::NotPermutation(k));
            }
        }
        if self.sequence.len() != k {
            return Err(TransformError::NotPermutation(k));
        }
        for (j, i) in graph.edges() {
            if self.rank(j) > self.rank(i) {
                return Err(TransformError::Incompatible {
                    earlier: alg.family(j).label().to_string(),
                    later: alg.family(i).label().to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Topological order of the causality graph, ties broken by declaration order.
pub fn derive_order(graph: &CausalityGraph) -> Result<PriorityOrder, TransformError> {
    graph
        .topological_order()
        .map(PriorityOrder::new)
        .ok_or(TransformError::Cyclic)
}

/// Builds `T(A)`. Statements and labels are kept; reads grow to cover the
/// negated guards.
pub fn transform(
    alg: &AlgorithmSpec,
    order: &PriorityOrder,
) -> Result<AlgorithmSpec, TransformError> {
    order.validate(alg, &build_causality_graph(alg))?;
    let mut families: Vec<Option<FamilySpec>> = vec![None; alg.k()];
    for (rank, &i) in order.sequence().iter().enumerate() {
        let higher = &order.sequence()[..rank];
        let original = alg.family(i);
        let reads = higher
            .iter()
            .fold(original.reads().clone(), |acc: ReadSet, &j| {
                acc.union(alg.family(j).reads())
            });
        let negated: Vec<Arc<GuardFn>> = higher
            .iter()
            .map(|&j| alg.family(j).guard_fn().clone())
            .collect();
        let own = original.guard_fn().clone();
        let guard: Arc<GuardFn> = Arc::new(move |view| {
            for g in &negated {
                if g(view)? {
                    return Ok(false);
                }
            }
            own(view)
        });
        families[i.0] = Some(FamilySpec::from_parts(
            original.label().to_string(),
            reads,
            original.writes().to_vec(),
            guard,
            original.statement_fn().clone(),
        ));
    }
    let families = families
        .into_iter()
        .map(|f| f.expect("order is a permutation"))
        .collect();
    let out = AlgorithmSpec::with_shared_schema(
        format!("T({})", alg.name()),
        alg.schema_arc().clone(),
        families,
    )
    .expect("same schema and writes as a valid algorithm");
    Ok(out.with_legitimacy_arc(alg.legitimacy().cloned()))
}

/// Convenience: derive the order and transform.
pub fn transform_default(
    alg: &AlgorithmSpec,
) -> Result<(PriorityOrder, AlgorithmSpec), TransformError> {
    let order = derive_order(&build_causality_graph(alg))?;
    let t = transform(alg, &order)?;
    Ok((order, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LmeParams {
    pub samples: u64,
    pub seed: u64,
    pub value_bound: i64,
    /// Values for non-finite writables when enumerating; `None` forces sampling.
    pub exhaustive_values: Option<Vec<i64>>,
    /// Largest configuration space that is enumerated.
    pub exhaustive_limit: u64,
}

impl Default for LmeParams {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 0,
            value_bound: 100,
            exhaustive_values: None,
            exhaustive_limit: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LmeCounterexample {
    pub configuration: Configuration,
    pub node: NodeId,
    pub families: Vec<FamilyId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LmeResult {
    pub mode: CheckMode,
    pub checked: u64,
    pub counterexample: Option<LmeCounterexample>,
}

impl LmeResult {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// First node with two enabled families in `cfg`, if any.
pub fn lme_violation(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    cfg: &Configuration,
) -> Result<Option<LmeCounterexample>, EvalError> {
    let enabled = enabled_set(net, alg, cfg)?;
    for w in enabled.windows(2) {
        if w[0].node == w[1].node {
            let node = w[0].node;
            return Ok(Some(LmeCounterexample {
                configuration: cfg.clone(),
                node,
                families: enabled
                    .iter()
                    .filter(|a| a.node == node)
                    .map(|a| a.family)
                    .collect(),
            }));
        }
    }
    Ok(None)
}

fn space_size(net: &ForestNetwork, domain: &InitDomain, alg: &AlgorithmSpec) -> Option<u64> {
    let mut size: u64 = 1;
    for v in alg.schema().writables() {
        let per_node = domain.get(v)?.len() as u64;
        for _ in 0..net.len() {
            size = size.checked_mul(per_node)?;
        }
    }
    Some(size)
}

/// No node may have two enabled families. Enumerates the configuration space
/// when it is small enough, samples otherwise.
pub fn check_local_mutual_exclusion(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    params: &LmeParams,
) -> Result<LmeResult, EvalError> {
    if let Some(values) = &params.exhaustive_values {
        let domain = InitDomain::uniform(alg, values);
        if space_size(net, &domain, alg).is_some_and(|s| s <= params.exhaustive_limit) {
            let configs =
                initial_configurations(net, alg, &domain).expect("domain covers every writable");
            let mut checked = 0;
            for cfg in configs {
                checked += 1;
                if let Some(cx) = lme_violation(net, alg, &cfg)? {
                    return Ok(LmeResult {
                        mode: CheckMode::Exhaustive,
                        checked,
                        counterexample: Some(cx),
                    });
                }
            }
            return Ok(LmeResult {
                mode: CheckMode::Exhaustive,
                checked,
                counterexample: None,
            });
        }
    }
    let mut rng = rng_from_seed(params.seed);
    for checked in 1..=params.samples {
        let cfg = random_configuration(net, alg.schema(), &mut rng, params.value_bound);
        if let Some(cx) = lme_violation(net, alg, &cfg)? {
            return Ok(LmeResult {
                mode: CheckMode::Sampled,
                checked,
                counterexample: Some(cx),
            });
        }
    }
    Ok(LmeResult {
        mode: CheckMode::Sampled,
        checked: params.samples,
        counterexample: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayReport {
    pub ok: bool,
    /// Description of the first mismatch.
    pub failure: Option<String>,
}

/// Replays a trace of `T(A)` on `A`: every selected pair must be enabled for
/// `A` in the same pre-configuration and produce the same configuration, and
/// the last configuration must be terminal for `A` exactly when the trace
/// ended terminal.
pub fn replay_on_original(
    net: &ForestNetwork,
    trace: &ExecutionTrace,
    original: &AlgorithmSpec,
) -> ReplayReport {
    let fail = |msg: String| ReplayReport {
        ok: false,
        failure: Some(msg),
    };
    let mut cfg = trace.initial.clone();
    for (step, record) in trace.steps.iter().enumerate() {
        let next = match apply_step(net, original, &cfg, &record.selection) {
            Ok(next) => next,
            Err(e) => return fail(format!("step {step}: {e}")),
        };
        let same = match &trace.configs {
            Some(configs) => configs[step] == next,
            None => next.digest() == record.digest,
        };
        if !same {
            return fail(format!(
                "step {step}: writes differ from the recorded configuration"
            ));
        }
        cfg = next;
    }
    if cfg != trace.final_config {
        return fail("final configuration differs".to_string());
    }
    match is_terminal(net, original, &cfg) {
        Ok(terminal) if terminal == (trace.outcome == Outcome::Terminal) => ReplayReport {
            ok: true,
            failure: None,
        },
        Ok(terminal) => fail(format!(
            "last configuration terminal for the original: {terminal}, trace outcome {:?}",
            trace.outcome
        )),
        Err(e) => fail(e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformedHeight {
    pub height: Option<usize>,
    pub expected: usize,
    /// Families for which no sampled configuration satisfied the guard.
    pub never_enabled: Vec<String>,
}

impl TransformedHeight {
    pub fn matches(&self) -> bool {
        self.height == Some(self.expected)
    }
}

/// Height of the causality graph of `T(A)`, compared with `k - 1`; also
/// samples `net` for a configuration enabling each original guard.
pub fn transformed_causality_height(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    order: &PriorityOrder,
    samples: u64,
    seed: u64,
) -> Result<TransformedHeight, TransformError> {
    let t = transform(alg, order)?;
    let graph = build_causality_graph(&t);
    let mut rng = rng_from_seed(seed);
    let mut satisfied = vec![false; alg.k()];
    for _ in 0..samples {
        let cfg = random_configuration(net, alg.schema(), &mut rng, 100);
        if let Ok(enabled) = enabled_set(net, alg, &cfg) {
            for a in enabled {
                satisfied[a.family.0] = true;
            }
        }
        if satisfied.iter().all(|&s| s) {
            break;
        }
    }
    Ok(TransformedHeight {
        height: graph.height(),
        expected: alg.k().saturating_sub(1),
        never_enabled: alg
            .family_ids()
            .filter(|i| !satisfied[i.0])
            .map(|i| alg.family(i).label().to_string())
            .collect(),
    })
}
