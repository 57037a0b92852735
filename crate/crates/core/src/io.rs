//! File formats: network and initial-configuration JSON, trace CSV, run
//! summary JSON.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{ExecutionTrace, Outcome, TraceSummary};
use crate::model::{
    AlgorithmSpec, Configuration, ForestNetwork, ModelError, NetworkError, NodeId, RawNetwork,
};

pub const FORMAT: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("initial configuration: {0}")]
    Init(String),
    #[error("trace CSV: {0}")]
    Trace(String),
}

pub fn parse_network(json: &str) -> Result<ForestNetwork, IoError> {
    let raw: RawNetwork = serde_json::from_str(json)?;
    Ok(ForestNetwork::validate(&raw)?)
}

pub fn network_to_json(net: &ForestNetwork) -> String {
    serde_json::to_string_pretty(&net.to_raw()).expect("networks serialize")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InitFile {
    values: Vec<BTreeMap<String, i64>>,
}

/// Reads `{"values":[{"id":0,"sub":7},...]}`. Nodes or variables left out
/// take their domain's default value (0 for integer domains).
pub fn parse_configuration(
    json: &str,
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
) -> Result<Configuration, IoError> {
    let file: InitFile = serde_json::from_str(json)?;
    let schema = alg.schema();
    let mut cfg = Configuration::new(net, schema, |_, v| schema.decl(v).domain.default_value())?;
    for entry in &file.values {
        let id = *entry
            .get("id")
            .ok_or_else(|| IoError::Init("entry without `id`".to_string()))?;
        let node = usize::try_from(id)
            .ok()
            .filter(|&p| p < net.len())
            .ok_or_else(|| IoError::Init(format!("unknown node id {id}")))?;
        for (name, &value) in entry.iter().filter(|(k, _)| k.as_str() != "id") {
            let v = schema.var(name)?;
            cfg.set(schema, NodeId(node), v, value)?;
        }
    }
    Ok(cfg)
}

/// Writables of `cfg` in the initial-configuration format.
pub fn configuration_to_json(cfg: &Configuration, alg: &AlgorithmSpec) -> String {
    let schema = alg.schema();
    let values = (0..cfg.node_count())
        .map(|p| {
            let mut entry = BTreeMap::new();
            entry.insert("id".to_string(), p as i64);
            for v in schema.writables() {
                entry.insert(schema.name(v).to_string(), cfg.get(NodeId(p), v));
            }
            entry
        })
        .collect();
    serde_json::to_string_pretty(&InitFile { values }).expect("maps serialize")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub node: usize,
    pub family: String,
    /// One-based position of the move in the whole execution.
    pub move_index: u64,
    /// One-based round containing the step.
    pub round: u64,
}

/// One row per move.
pub fn trace_rows(trace: &ExecutionTrace, alg: &AlgorithmSpec) -> Vec<TraceRow> {
    let mut rows = Vec::with_capacity(trace.total_moves as usize);
    let mut move_index = 0;
    for (step, record) in trace.steps.iter().enumerate() {
        let round = trace.round_of_step(step);
        for a in &record.selection {
            move_index += 1;
            rows.push(TraceRow {
                step,
                node: a.node.0,
                family: alg.family(a.family).label().to_string(),
                move_index,
                round,
            });
        }
    }
    rows
}

pub fn write_trace_csv(
    out: impl Write,
    trace: &ExecutionTrace,
    alg: &AlgorithmSpec,
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    let rows = trace_rows(trace, alg);
    if rows.is_empty() {
        w.write_record(["step", "node", "family", "move_index", "round"])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Rebuilds move counters from a trace CSV written for `n` nodes and the
/// families labelled `labels`.
pub fn read_trace_csv(
    input: impl Read,
    n: usize,
    labels: &[String],
) -> Result<TraceSummary, IoError> {
    let mut r = csv::Reader::from_reader(input);
    let mut moves = vec![vec![0u64; labels.len()]; n];
    let mut total_moves = 0;
    let mut rounds = 0;
    let mut steps = 0;
    for row in r.deserialize() {
        let row: TraceRow = row?;
        if row.node >= n {
            return Err(IoError::Trace(format!("node {} outside 0..{n}", row.node)));
        }
        let i = labels
            .iter()
            .position(|l| *l == row.family)
            .ok_or_else(|| IoError::Trace(format!("unknown family `{}`", row.family)))?;
        moves[row.node][i] += 1;
        total_moves += 1;
        rounds = rounds.max(row.round);
        steps = steps.max(row.step as u64 + 1);
    }
    Ok(TraceSummary {
        moves,
        total_moves,
        rounds,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub format: u32,
    pub algorithm: String,
    pub n: usize,
    pub outcome: Outcome,
    pub steps: usize,
    pub total_moves: u64,
    pub moves_per_family: BTreeMap<String, u64>,
    pub rounds: u64,
    pub round_boundaries: Vec<usize>,
    /// `None` when the algorithm registers no legitimacy predicate.
    pub legitimate: Option<bool>,
    pub final_digest: String,
}

impl RunSummary {
    pub fn new(net: &ForestNetwork, alg: &AlgorithmSpec, trace: &ExecutionTrace) -> Self {
        Self {
            format: FORMAT,
            algorithm: alg.name().to_string(),
            n: net.len(),
            outcome: trace.outcome.clone(),
            steps: trace.steps.len(),
            total_moves: trace.total_moves,
            moves_per_family: alg
                .families()
                .iter()
                .map(|f| f.label().to_string())
                .zip(trace.moves_per_family())
                .collect(),
            rounds: trace.rounds,
            round_boundaries: trace.round_boundaries.clone(),
            legitimate: alg.is_legitimate(net, &trace.final_config),
            final_digest: format!("{:016x}", trace.final_config.digest()),
        }
    }
}
