//! Randomized evidence for the correct-alone property.
//!
//! A trial draws a configuration, picks a node `p` where the family is
//! enabled, and executes `A_i(p)` together with a random set of other
//! activations that leave `GRead(A_i(p)) \ W(A_i(p))` untouched. The family
//! must be disabled at `p` afterwards.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::engine::instance::{random_configuration, rng_from_seed};
use crate::model::{
    apply_step, enabled_set, Activation, AlgorithmSpec, Configuration, EvalError, FamilyId,
    ForestNetwork, NodeId, Relation, StepError, VarId,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorrectAloneParams {
    pub trials: u64,
    pub value_bound: i64,
    pub seed: u64,
}

impl Default for CorrectAloneParams {
    fn default() -> Self {
        Self {
            trials: 1_000,
            value_bound: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorrectAloneOutcome {
    /// `trials` enabled samples, none of which stayed enabled.
    Pass { trials: u64 },
    /// No configuration enabling the family was found.
    Vacuous { attempts: u64 },
    Counterexample {
        trial: u64,
        node: NodeId,
        configuration: Configuration,
        partners: Vec<Activation>,
    },
}

impl CorrectAloneOutcome {
    pub fn passed(&self) -> bool {
        !matches!(self, CorrectAloneOutcome::Counterexample { .. })
    }
}

/// Concrete `(node, variable)` cells read by `A_i(p)`.
pub(crate) fn read_cells(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    p: NodeId,
    i: FamilyId,
) -> HashSet<(NodeId, VarId)> {
    let mut cells = HashSet::new();
    let parent = net.parent(p);
    let children = net.children(p);
    for read in alg.family(i).reads().iter() {
        match read.relation {
            Relation::Own => {
                cells.insert((p, read.var));
            }
            Relation::Parent => {
                if let Some(q) = parent {
                    cells.insert((q, read.var));
                }
            }
            Relation::Children => {
                cells.extend(children.iter().map(|&q| (q, read.var)));
            }
            Relation::OtherNeighbors => {
                cells.extend(
                    net.neighbors(p)
                        .iter()
                        .filter(|&&q| Some(q) != parent && !children.contains(&q))
                        .map(|&q| (q, read.var)),
                );
            }
        }
    }
    cells
}

pub fn test_correct_alone(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    family: FamilyId,
    params: CorrectAloneParams,
) -> Result<CorrectAloneOutcome, EvalError> {
    let mut rng = rng_from_seed(params.seed);
    let max_attempts = params.trials.saturating_mul(20).max(100);
    let mut trials = 0;
    let mut attempts = 0;
    while trials < params.trials && attempts < max_attempts {
        attempts += 1;
        let cfg = random_configuration(net, alg.schema(), &mut rng, params.value_bound);
        let enabled = enabled_set(net, alg, &cfg)?;
        let candidates: Vec<NodeId> = enabled
            .iter()
            .filter(|a| a.family == family)
            .map(|a| a.node)
            .collect();
        let Some(&p) = candidates.choose(&mut rng) else {
            continue;
        };
        trials += 1;

        let own_writes: HashSet<(NodeId, VarId)> = alg
            .family(family)
            .writes()
            .iter()
            .map(|&v| (p, v))
            .collect();
        let protected: HashSet<_> = read_cells(net, alg, p, family)
            .difference(&own_writes)
            .copied()
            .collect();

        // one random enabled family per other node, kept with probability 1/2
        let mut partners = Vec::new();
        let mut by_node: Vec<Vec<FamilyId>> = vec![Vec::new(); net.len()];
        for a in &enabled {
            if a.node != p {
                by_node[a.node.0].push(a.family);
            }
        }
        for (q, families) in by_node.iter().enumerate() {
            let Some(&j) = families.choose(&mut rng) else {
                continue;
            };
            if !rng.gen_bool(0.5) {
                continue;
            }
            let q = NodeId(q);
            let touches = alg
                .family(j)
                .writes()
                .iter()
                .any(|&v| protected.contains(&(q, v)));
            if !touches {
                partners.push(Activation { node: q, family: j });
            }
        }

        let mut selection = vec![Activation { node: p, family }];
        selection.extend(&partners);
        let next = match apply_step(net, alg, &cfg, &selection) {
            Ok(next) => next,
            Err(StepError::Eval(e)) => return Err(e),
            Err(other) => unreachable!("selection built from the enabled set: {other}"),
        };
        if alg.eval_guard(net, &next, p, family)? {
            return Ok(CorrectAloneOutcome::Counterexample {
                trial: trials,
                node: p,
                configuration: cfg,
                partners,
            });
        }
    }
    Ok(if trials == 0 {
        CorrectAloneOutcome::Vacuous { attempts }
    } else {
        CorrectAloneOutcome::Pass { trials }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{controls, te};

    #[test]
    fn broken_counter_fails_immediately() {
        let alg = controls::broken_counter();
        let net = ForestNetwork::line(3);
        let out =
            test_correct_alone(&net, &alg, FamilyId(0), CorrectAloneParams::default()).unwrap();
        assert!(matches!(
            out,
            CorrectAloneOutcome::Counterexample { trial: 1, .. }
        ));
    }

    #[test]
    fn te_families_pass_on_a_small_tree() {
        let alg = te::te();
        let net = ForestNetwork::from_parents(vec![None, Some(0), Some(0), Some(1), Some(1)])
            .unwrap()
            .with_const("input", |p| p.0 as i64);
        for f in alg.family_ids() {
            let params = CorrectAloneParams {
                trials: 500,
                value_bound: 20,
                seed: 3,
            };
            let out = test_correct_alone(&net, &alg, f, params).unwrap();
            assert_eq!(out, CorrectAloneOutcome::Pass { trials: 500 });
        }
    }

    #[test]
    fn read_cells_follow_relations() {
        let alg = te::te();
        let net = ForestNetwork::line(3).with_const("input", |_| 1);
        let cells = read_cells(&net, &alg, NodeId(1), te::R);
        // res at p1 and its parent p0, sub at p1
        assert_eq!(cells.len(), 3);
        assert!(cells.contains(&(NodeId(0), alg.schema().var("res").unwrap())));
    }
}
