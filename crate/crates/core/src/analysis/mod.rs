//! Quasi-syntactic classification of families and the quantities the move
//! bounds are built from.

mod causality;
mod correct_alone;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use causality::{build_causality_graph, CausalityGraph};
pub use correct_alone::{test_correct_alone, CorrectAloneOutcome, CorrectAloneParams};

use crate::model::{AlgorithmSpec, EvalError, FamilyId, ForestNetwork, NodeId, Relation};

/// Report layout version.
pub const REPORT_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("family {0} is neither bottom-up nor top-down")]
    Unoriented(String),
    #[error("graph of actions' causality has a cycle")]
    Cyclic,
}

/// Labels a family may carry; both, one or none can hold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Labels {
    pub bottom_up: bool,
    pub top_down: bool,
}

impl Labels {
    /// TopDown wins when both hold: its zone is capped by `H + 1`.
    pub fn orientation(self) -> Option<Orientation> {
        if self.top_down {
            Some(Orientation::TopDown)
        } else if self.bottom_up {
            Some(Orientation::BottomUp)
        } else {
            None
        }
    }
}

impl fmt::Display for Labels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.bottom_up, self.top_down) {
            (true, true) => f.write_str("bottom-up+top-down"),
            (true, false) => f.write_str("bottom-up"),
            (false, true) => f.write_str("top-down"),
            (false, false) => f.write_str("none"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    BottomUp,
    TopDown,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::BottomUp => "bottom-up",
            Orientation::TopDown => "top-down",
        })
    }
}

/// Labels of every family, looking only at reads of the family's own block.
pub fn classify(alg: &AlgorithmSpec) -> Vec<Labels> {
    let schema = alg.schema();
    alg.family_ids()
        .map(|i| {
            let own: Vec<Relation> = alg
                .family(i)
                .reads()
                .iter()
                .filter(|r| schema.writer(r.var) == Some(i))
                .map(|r| r.relation)
                .collect();
            Labels {
                bottom_up: own
                    .iter()
                    .all(|r| matches!(r, Relation::Own | Relation::Children)),
                top_down: own
                    .iter()
                    .all(|r| matches!(r, Relation::Own | Relation::Parent)),
            }
        })
        .collect()
}

/// `Z(p, A_i)`: ancestors of `p` for top-down families, descendants otherwise.
pub fn impacting_zone(net: &ForestNetwork, orientation: Orientation, p: NodeId) -> Vec<NodeId> {
    match orientation {
        Orientation::TopDown => net.ancestors(p),
        Orientation::BottomUp => net.descendants(p),
    }
}

/// `M(A_i, p)`: level of `p` for top-down families, height otherwise.
pub fn m_value(net: &ForestNetwork, orientation: Orientation, p: NodeId) -> usize {
    match orientation {
        Orientation::TopDown => net.level_of(p),
        Orientation::BottomUp => net.height_of(p),
    }
}

/// `|Others(A_i, p)|`, counted from declarations: a neighbor `q` is in the set
/// when `A_i` reads, at `q`'s position, a variable some `A_j` (`j ≠ i`) writes.
pub fn others_count(net: &ForestNetwork, alg: &AlgorithmSpec, p: NodeId, i: FamilyId) -> usize {
    let schema = alg.schema();
    let foreign = |rel: Relation| {
        alg.family(i)
            .reads()
            .iter()
            .any(|r| r.relation == rel && schema.writer(r.var).is_some_and(|j| j != i))
    };
    let parent = net.parent(p);
    let children = net.children(p);
    net.neighbors(p)
        .iter()
        .filter(|&&q| {
            let rel = if Some(q) == parent {
                Relation::Parent
            } else if children.contains(&q) {
                Relation::Children
            } else {
                Relation::OtherNeighbors
            };
            foreign(rel)
        })
        .count()
}

/// `maxO(A_i)` for every family: the largest local `|Others|`, lifted along
/// `≺`. Iterates to a fixpoint, so it terminates on cyclic graphs too.
pub fn max_others(net: &ForestNetwork, alg: &AlgorithmSpec, graph: &CausalityGraph) -> Vec<usize> {
    let mut max_o: Vec<usize> = alg
        .family_ids()
        .map(|i| {
            net.nodes()
                .map(|p| others_count(net, alg, p, i))
                .max()
                .unwrap_or(0)
        })
        .collect();
    loop {
        let mut changed = false;
        for i in alg.family_ids() {
            let lifted = graph.predecessors(i).map(|j| max_o[j.0]).max().unwrap_or(0);
            if lifted > max_o[i.0] {
                max_o[i.0] = lifted;
                changed = true;
            }
        }
        if !changed {
            return max_o;
        }
    }
}

/// Options for [`follows_acyclic_strategy`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisOptions {
    /// `None` skips the dynamic correct-alone test (reported as untested).
    pub correct_alone: Option<CorrectAloneParams>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            correct_alone: Some(CorrectAloneParams::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum CorrectAloneSummary {
    Untested,
    Pass {
        trials: u64,
    },
    Vacuous {
        attempts: u64,
    },
    Counterexample {
        node: NodeId,
        trial: u64,
        partners: usize,
    },
    Error {
        message: String,
    },
}

impl CorrectAloneSummary {
    /// Only a counterexample or an evaluation error refutes correct-alone.
    pub fn refuted(&self) -> bool {
        matches!(
            self,
            CorrectAloneSummary::Counterexample { .. } | CorrectAloneSummary::Error { .. }
        )
    }
}

impl From<Result<CorrectAloneOutcome, EvalError>> for CorrectAloneSummary {
    fn from(outcome: Result<CorrectAloneOutcome, EvalError>) -> Self {
        match outcome {
            Ok(CorrectAloneOutcome::Pass { trials }) => Self::Pass { trials },
            Ok(CorrectAloneOutcome::Vacuous { attempts }) => Self::Vacuous { attempts },
            Ok(CorrectAloneOutcome::Counterexample {
                trial,
                node,
                partners,
                ..
            }) => Self::Counterexample {
                node,
                trial,
                partners: partners.len(),
            },
            Err(e) => Self::Error {
                message: e.to_string(),
            },
        }
    }
}

impl fmt::Display for CorrectAloneSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Untested => f.write_str("untested"),
            Self::Pass { trials } => write!(f, "pass ({trials})"),
            Self::Vacuous { .. } => f.write_str("never enabled"),
            Self::Counterexample { node, trial, .. } => {
                write!(f, "counterexample at {node} (trial {trial})")
            }
            Self::Error { message } => write!(f, "error: {message}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub index: usize,
    pub label: String,
    pub labels: Labels,
    pub orientation: Option<Orientation>,
    /// `𝔥(A_i)`; absent when the causality graph is cyclic.
    pub height: Option<usize>,
    pub max_others: usize,
    pub correct_alone: CorrectAloneSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CausalitySummary {
    /// Edges as `[from, to]` family labels.
    pub edges: Vec<[String; 2]>,
    pub acyclic: bool,
    pub height: Option<usize>,
    pub in_degree: usize,
}

/// Per-(node, family) metrics; zone and `M` are absent for unoriented families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeFamilyMetrics {
    pub node: NodeId,
    pub family: String,
    pub zone_size: Option<usize>,
    pub m: Option<usize>,
    pub others: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkSummary {
    pub n: usize,
    #[serde(rename = "H")]
    pub height: usize,
    #[serde(rename = "Delta")]
    pub max_degree: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub format: u32,
    pub algorithm: String,
    pub network: NetworkSummary,
    pub k: usize,
    pub families: Vec<FamilyReport>,
    pub causality: CausalitySummary,
    pub metrics: Vec<NodeFamilyMetrics>,
    pub verdict: bool,
    /// Why the verdict is false; empty when it holds.
    pub reasons: Vec<String>,
    #[serde(skip)]
    graph: CausalityGraph,
}

impl AnalysisReport {
    pub fn graph(&self) -> &CausalityGraph {
        &self.graph
    }

    pub fn orientation(&self, i: FamilyId) -> Result<Orientation, AnalysisError> {
        let family = &self.families[i.0];
        family
            .orientation
            .ok_or_else(|| AnalysisError::Unoriented(family.label.clone()))
    }

    pub fn max_o(&self, i: FamilyId) -> usize {
        self.families[i.0].max_others
    }

    /// `Z(p, A_i)` using the family's chosen orientation.
    pub fn zone(
        &self,
        net: &ForestNetwork,
        p: NodeId,
        i: FamilyId,
    ) -> Result<Vec<NodeId>, AnalysisError> {
        Ok(impacting_zone(net, self.orientation(i)?, p))
    }

    pub fn m(&self, net: &ForestNetwork, p: NodeId, i: FamilyId) -> Result<usize, AnalysisError> {
        Ok(m_value(net, self.orientation(i)?, p))
    }

    pub fn family_label(&self, i: FamilyId) -> &str {
        &self.families[i.0].label
    }

    /// Plain-text table: one row per family.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<8} {:<20} {:>4} {:>5}  correct-alone\n",
            "family", "labels", "h", "maxO"
        );
        for f in &self.families {
            let h = f.height.map_or("-".to_string(), |h| h.to_string());
            out += &format!(
                "{:<8} {:<20} {:>4} {:>5}  {}\n",
                f.label,
                f.labels.to_string(),
                h,
                f.max_others,
                f.correct_alone
            );
        }
        let edges: Vec<String> = self
            .causality
            .edges
            .iter()
            .map(|[a, b]| format!("{a}->{b}"))
            .collect();
        out += &format!(
            "causality: {{{}}}  h={}  d={}  k={}\n",
            edges.join(", "),
            self.causality
                .height
                .map_or("cyclic".to_string(), |h| h.to_string()),
            self.causality.in_degree,
            self.k
        );
        out += &format!("acyclic strategy: {}\n", self.verdict);
        for r in &self.reasons {
            out += &format!("  - {r}\n");
        }
        out
    }
}

/// Runs every analysis on `alg` over `net` and decides whether the algorithm
/// follows an acyclic strategy. Correct-alone is tested, not proven.
pub fn follows_acyclic_strategy(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    options: AnalysisOptions,
) -> AnalysisReport {
    let labels = classify(alg);
    let graph = build_causality_graph(alg);
    let max_o = max_others(net, alg, &graph);
    let mut reasons = Vec::new();
    if !graph.is_acyclic() {
        reasons.push("graph of actions' causality has a cycle".to_string());
    }

    let mut families = Vec::with_capacity(alg.k());
    for i in alg.family_ids() {
        let label = alg.family(i).label().to_string();
        let correct_alone = match options.correct_alone {
            Some(params) => test_correct_alone(net, alg, i, params).into(),
            None => CorrectAloneSummary::Untested,
        };
        if correct_alone.refuted() {
            reasons.push(format!("{label} is not correct-alone: {correct_alone}"));
        }
        let orientation = labels[i.0].orientation();
        if orientation.is_none() {
            reasons.push(format!("{label} is neither bottom-up nor top-down"));
        }
        families.push(FamilyReport {
            index: i.0,
            label,
            labels: labels[i.0],
            orientation,
            height: graph.family_height(i),
            max_others: max_o[i.0],
            correct_alone,
        });
    }

    let causality = CausalitySummary {
        edges: graph
            .edges()
            .map(|(j, i)| [families[j.0].label.clone(), families[i.0].label.clone()])
            .collect(),
        acyclic: graph.is_acyclic(),
        height: graph.height(),
        in_degree: graph.in_degree(),
    };

    let mut metrics = Vec::with_capacity(net.len() * alg.k());
    for p in net.nodes() {
        for f in &families {
            let i = FamilyId(f.index);
            metrics.push(NodeFamilyMetrics {
                node: p,
                family: f.label.clone(),
                zone_size: f.orientation.map(|o| impacting_zone(net, o, p).len()),
                m: f.orientation.map(|o| m_value(net, o, p)),
                others: others_count(net, alg, p, i),
            });
        }
    }

    AnalysisReport {
        format: REPORT_FORMAT,
        algorithm: alg.name().to_string(),
        network: NetworkSummary {
            n: net.len(),
            height: net.height(),
            max_degree: net.max_degree(),
        },
        k: alg.k(),
        families,
        causality,
        metrics,
        verdict: reasons.is_empty(),
        reasons,
        graph,
    }
}
