//! Exhaustive exploration of every execution from a finite set of starts.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    apply_step, enabled_set, Activation, AlgorithmSpec, Configuration, Domain, EvalError,
    ForestNetwork, ModelError, NodeId, StepError, VarId,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error("more than {0} reachable configurations")]
    TooManyStates(usize),
    #[error("no initial values given for writable `{0}`")]
    MissingDomain(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Initial values per writable variable; every node draws independently.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InitDomain {
    values: HashMap<VarId, Vec<i64>>,
}

impl InitDomain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: VarId, values: impl IntoIterator<Item = i64>) -> Self {
        self.values.insert(var, values.into_iter().collect());
        self
    }

    /// `values` for every writable of `alg`, except that variables with a
    /// finite domain range over that domain instead.
    pub fn uniform(alg: &AlgorithmSpec, values: &[i64]) -> Self {
        let mut out = Self::new();
        for v in alg.schema().writables() {
            out = match &alg.schema().decl(v).domain {
                Domain::Finite(own) => out.with(v, own.iter().copied()),
                _ => out.with(v, values.iter().copied()),
            };
        }
        out
    }

    pub fn get(&self, var: VarId) -> Option<&[i64]> {
        self.values.get(&var).map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplorationResult {
    pub initial_count: usize,
    pub state_count: usize,
    pub transition_count: usize,
    pub sink_count: usize,
    /// No cycle in the transition relation: every execution is finite.
    pub all_terminate: bool,
    /// `None` when the algorithm registers no legitimacy predicate.
    pub all_terminal_satisfy_sp: Option<bool>,
    /// Maximum number of moves along any path; `None` when a cycle exists.
    pub longest_move_path: Option<u64>,
    #[serde(skip)]
    pub sinks: Vec<Configuration>,
    /// A cycle of configurations, first repeated at the end, if one exists.
    #[serde(skip)]
    pub witness_cycle: Option<Vec<Configuration>>,
}

/// Every non-empty selection with at most one enabled family per node.
pub fn all_selections(enabled: &[Activation]) -> Vec<Vec<Activation>> {
    let mut groups: Vec<Vec<Activation>> = Vec::new();
    for &a in enabled {
        match groups.last_mut() {
            Some(g) if g[0].node == a.node => g.push(a),
            _ => groups.push(vec![a]),
        }
    }
    let mut out = vec![Vec::new()];
    for group in &groups {
        let mut next = Vec::with_capacity(out.len() * (group.len() + 1));
        for partial in &out {
            next.push(partial.clone());
            for &a in group {
                let mut extended = partial.clone();
                extended.push(a);
                next.push(extended);
            }
        }
        out = next;
    }
    out.retain(|s| !s.is_empty());
    out
}

/// Product of the domain over every (node, writable) cell.
pub(crate) fn initial_configurations(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    domain: &InitDomain,
) -> Result<Vec<Configuration>, ExploreError> {
    let schema = alg.schema();
    let cells: Vec<(usize, VarId, &[i64])> = net
        .nodes()
        .flat_map(|p| schema.writables().map(move |v| (p.0, v)))
        .map(|(p, v)| {
            domain
                .get(v)
                .map(|vals| (p, v, vals))
                .ok_or_else(|| ExploreError::MissingDomain(schema.name(v).to_string()))
        })
        .collect::<Result<_, _>>()?;
    let base = Configuration::new(net, schema, |_, v| schema.decl(v).domain.default_value())?;
    let mut out = vec![base];
    for (p, v, vals) in cells {
        let mut next = Vec::with_capacity(out.len() * vals.len());
        for cfg in &out {
            for &x in vals {
                let mut c = cfg.clone();
                c.put(NodeId(p), v, x);
                next.push(c);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Builds the full transition graph reachable from every configuration in
/// the product of `domain`, branching on all legal daemon choices.
pub fn explore_exhaustive(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    domain: &InitDomain,
    max_states: usize,
) -> Result<ExplorationResult, ExploreError> {
    let initial = initial_configurations(net, alg, domain)?;
    let initial_count = initial.len();
    let mut index: HashMap<Configuration, usize> = HashMap::new();
    let mut states: Vec<Configuration> = Vec::new();
    // successor lists with move weights
    let mut succ: Vec<Vec<(usize, u64)>> = Vec::new();
    let mut queue = Vec::new();

    let mut intern = |cfg: Configuration,
                      states: &mut Vec<Configuration>,
                      succ: &mut Vec<Vec<(usize, u64)>>,
                      queue: &mut Vec<usize>|
     -> Result<usize, ExploreError> {
        if let Some(&id) = index.get(&cfg) {
            return Ok(id);
        }
        if states.len() >= max_states {
            return Err(ExploreError::TooManyStates(max_states));
        }
        let id = states.len();
        index.insert(cfg.clone(), id);
        states.push(cfg);
        succ.push(Vec::new());
        queue.push(id);
        Ok(id)
    };

    for cfg in initial {
        intern(cfg, &mut states, &mut succ, &mut queue)?;
    }
    let mut transition_count = 0;
    let mut head = 0;
    while head < queue.len() {
        let id = queue[head];
        head += 1;
        let enabled = enabled_set(net, alg, &states[id])?;
        for selection in all_selections(&enabled) {
            let next = apply_step(net, alg, &states[id], &selection)?;
            let to = intern(next, &mut states, &mut succ, &mut queue)?;
            succ[id].push((to, selection.len() as u64));
            transition_count += 1;
        }
    }

    let sinks: Vec<Configuration> = (0..states.len())
        .filter(|&s| succ[s].is_empty())
        .map(|s| states[s].clone())
        .collect();
    let all_terminal_satisfy_sp = alg.legitimacy().map(|sp| sinks.iter().all(|c| sp(net, c)));

    let (order, cycle) = topo_or_cycle(&succ);
    let witness_cycle = cycle.map(|ids| ids.into_iter().map(|s| states[s].clone()).collect());
    let longest_move_path = order.map(|order| {
        let mut best = vec![0u64; states.len()];
        for &s in order.iter().rev() {
            best[s] = succ[s].iter().map(|&(t, w)| best[t] + w).max().unwrap_or(0);
        }
        best.into_iter().max().unwrap_or(0)
    });

    Ok(ExplorationResult {
        initial_count,
        state_count: states.len(),
        transition_count,
        sink_count: sinks.len(),
        all_terminate: witness_cycle.is_none(),
        all_terminal_satisfy_sp,
        longest_move_path,
        sinks,
        witness_cycle,
    })
}

/// Topological order (sources first) or a cycle, via iterative DFS.
fn topo_or_cycle(succ: &[Vec<(usize, u64)>]) -> (Option<Vec<usize>>, Option<Vec<usize>>) {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let n = succ.len();
    let mut color = vec![WHITE; n];
    let mut post = Vec::with_capacity(n);
    for root in 0..n {
        if color[root] != WHITE {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        color[root] = GREY;
        while let Some(&mut (s, ref mut next)) = stack.last_mut() {
            if let Some(&(t, _)) = succ[s].get(*next) {
                *next += 1;
                match color[t] {
                    WHITE => {
                        color[t] = GREY;
                        stack.push((t, 0));
                    }
                    GREY => {
                        let start = stack
                            .iter()
                            .position(|&(u, _)| u == t)
                            .expect("grey is on stack");
                        let mut cycle: Vec<usize> =
                            stack[start..].iter().map(|&(u, _)| u).collect();
                        cycle.push(t);
                        return (None, Some(cycle));
                    }
                    _ => {}
                }
            } else {
                color[s] = BLACK;
                post.push(s);
                stack.pop();
            }
        }
    }
    post.reverse();
    (Some(post), None)
}
