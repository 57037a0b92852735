//! Daemons: who moves next.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::instance::{rng_from_seed, SimRng};
use crate::model::{Activation, FamilyId, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DaemonError {
    #[error("scripted activation {activation} (script position {position}) is not enabled")]
    ScriptedDisabled {
        position: usize,
        activation: Activation,
    },
    #[error("script exhausted after {0} activations while processes are still enabled")]
    ScriptExhausted(usize),
}

/// A scheduler. `enabled` is never empty and is sorted by node, then family;
/// the answer must be a non-empty subset with at most one family per node.
pub trait Daemon {
    fn select(&mut self, enabled: &[Activation]) -> Result<Vec<Activation>, DaemonError>;

    /// Scripted daemons report remaining work; others never run dry.
    fn exhausted(&self) -> bool {
        false
    }
}

/// Groups the enabled pairs by node, keeping node order.
fn by_node(enabled: &[Activation]) -> Vec<(NodeId, Vec<FamilyId>)> {
    let mut out: Vec<(NodeId, Vec<FamilyId>)> = Vec::new();
    for a in enabled {
        match out.last_mut() {
            Some((p, fams)) if *p == a.node => fams.push(a.family),
            _ => out.push((a.node, vec![a.family])),
        }
    }
    out
}

/// Every enabled process moves, each with its lowest-index enabled family.
#[derive(Debug, Clone, Default)]
pub struct Synchronous;

impl Daemon for Synchronous {
    fn select(&mut self, enabled: &[Activation]) -> Result<Vec<Activation>, DaemonError> {
        Ok(by_node(enabled)
            .into_iter()
            .map(|(node, fams)| Activation {
                node,
                family: fams[0],
            })
            .collect())
    }
}

/// Each enabled process moves with probability `rho`; empty draws are redone.
#[derive(Debug, Clone)]
pub struct RandomDistributed {
    rho: f64,
    rng: SimRng,
}

impl RandomDistributed {
    pub fn new(rho: f64, seed: u64) -> Self {
        assert!(
            rho > 0.0 && rho <= 1.0,
            "activation probability must lie in (0, 1]"
        );
        Self {
            rho,
            rng: rng_from_seed(seed),
        }
    }
}

impl Daemon for RandomDistributed {
    fn select(&mut self, enabled: &[Activation]) -> Result<Vec<Activation>, DaemonError> {
        let groups = by_node(enabled);
        loop {
            let mut chosen = Vec::new();
            for (node, fams) in &groups {
                if self.rng.gen_bool(self.rho) {
                    let family = *fams.choose(&mut self.rng).expect("non-empty group");
                    chosen.push(Activation {
                        node: *node,
                        family,
                    });
                }
            }
            if !chosen.is_empty() {
                return Ok(chosen);
            }
        }
    }
}

/// One uniformly chosen enabled pair per step.
#[derive(Debug, Clone)]
pub struct RandomCentral {
    rng: SimRng,
}

impl RandomCentral {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: rng_from_seed(seed),
        }
    }
}

impl Daemon for RandomCentral {
    fn select(&mut self, enabled: &[Activation]) -> Result<Vec<Activation>, DaemonError> {
        Ok(vec![*enabled
            .choose(&mut self.rng)
            .expect("non-empty enabled set")])
    }
}

/// Central daemon cycling through node indices; picks the first enabled node
/// at or after its cursor and that node's lowest enabled family.
#[derive(Debug, Clone, Default)]
pub struct RoundRobinCentral {
    cursor: usize,
}

impl Daemon for RoundRobinCentral {
    fn select(&mut self, enabled: &[Activation]) -> Result<Vec<Activation>, DaemonError> {
        let pick = enabled
            .iter()
            .find(|a| a.node.0 >= self.cursor)
            .unwrap_or(&enabled[0]);
        self.cursor = pick.node.0 + 1;
        Ok(vec![*pick])
    }
}

/// Replays a fixed list of single activations.
#[derive(Debug, Clone)]
pub struct Scripted {
    script: Vec<Activation>,
    position: usize,
}

impl Scripted {
    pub fn new(script: Vec<Activation>) -> Self {
        Self {
            script,
            position: 0,
        }
    }

    pub fn position(&self) -> usize {
        self.position
    }
}

impl Daemon for Scripted {
    fn select(&mut self, enabled: &[Activation]) -> Result<Vec<Activation>, DaemonError> {
        let Some(&activation) = self.script.get(self.position) else {
            return Err(DaemonError::ScriptExhausted(self.position));
        };
        if !enabled.contains(&activation) {
            return Err(DaemonError::ScriptedDisabled {
                position: self.position,
                activation,
            });
        }
        self.position += 1;
        Ok(vec![activation])
    }

    fn exhausted(&self) -> bool {
        self.position >= self.script.len()
    }
}

/// Serializable description of a built-in randomizable daemon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DaemonKind {
    Synchronous,
    RandomDistributed { rho: f64 },
    RandomCentral,
    RoundRobin,
}

impl DaemonKind {
    /// The four built-in strategies, with `rho = 0.5`.
    pub const ALL: [DaemonKind; 4] = [
        DaemonKind::Synchronous,
        DaemonKind::RandomDistributed { rho: 0.5 },
        DaemonKind::RandomCentral,
        DaemonKind::RoundRobin,
    ];

    pub fn build(self, seed: u64) -> Box<dyn Daemon> {
        match self {
            DaemonKind::Synchronous => Box::new(Synchronous),
            DaemonKind::RandomDistributed { rho } => Box::new(RandomDistributed::new(rho, seed)),
            DaemonKind::RandomCentral => Box::new(RandomCentral::new(seed)),
            DaemonKind::RoundRobin => Box::new(RoundRobinCentral::default()),
        }
    }
}

impl fmt::Display for DaemonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DaemonKind::Synchronous => f.write_str("synchronous"),
            DaemonKind::RandomDistributed { .. } => f.write_str("random-distributed"),
            DaemonKind::RandomCentral => f.write_str("random-central"),
            DaemonKind::RoundRobin => f.write_str("round-robin"),
        }
    }
}

impl FromStr for DaemonKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "synchronous" => Ok(DaemonKind::Synchronous),
            "random-distributed" => Ok(DaemonKind::RandomDistributed { rho: 0.5 }),
            "random-central" => Ok(DaemonKind::RandomCentral),
            "round-robin" => Ok(DaemonKind::RoundRobin),
            other => Err(format!(
                "unknown daemon `{other}` (synchronous, random-distributed, random-central, round-robin)"
            )),
        }
    }
}
