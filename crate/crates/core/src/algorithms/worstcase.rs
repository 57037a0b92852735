//! Scripted executions of `te` that reach its move and round lower bounds.
//!
//! Node `p_j` of the constructions (1-based) is `NodeId(j - 1)`.

use thiserror::Error;

use super::te;
use crate::model::{Activation, Configuration, FamilyId, ForestNetwork, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorstCaseError {
    #[error("construction needs n >= {min}, got {n}")]
    TooSmall { n: usize, min: usize },
}

/// A network, a start configuration and a central-daemon schedule.
#[derive(Debug, Clone)]
pub struct WorstCase {
    pub network: ForestNetwork,
    pub initial: Configuration,
    /// The adversarial schedule proper.
    pub script: Vec<Activation>,
    /// Moves appended after `script` to reach a terminal configuration.
    pub completion: Vec<Activation>,
}

impl WorstCase {
    /// `script` followed by `completion`.
    pub fn schedule(&self) -> Vec<Activation> {
        self.script
            .iter()
            .chain(&self.completion)
            .copied()
            .collect()
    }
}

fn act(j: usize, family: FamilyId) -> Activation {
    Activation {
        node: NodeId(j - 1),
        family,
    }
}

fn te_config(
    net: &ForestNetwork,
    sub: impl Fn(usize) -> i64,
    res: impl Fn(usize) -> i64,
) -> Configuration {
    let schema = te::schema();
    let sub_var = schema.var("sub").unwrap();
    Configuration::new(net, &schema, |p, v| {
        if v == sub_var {
            sub(p.0 + 1)
        } else {
            res(p.0 + 1)
        }
    })
    .expect("pattern values are natural")
}

fn unit_input_line(n: usize) -> ForestNetwork {
    ForestNetwork::line(n).with_const("input", |_| 1)
}

/// Beyond the active prefix the line alternates `0` (odd positions) and
/// `j - 2` (even positions `j`), with `res = 0`.
fn suffix_sub(j: usize) -> i64 {
    if j.is_multiple_of(2) {
        j as i64 - 2
    } else {
        0
    }
}

/// Configuration `X_{2i+1}` on the unit-input line of `n` nodes.
pub fn line_x_configuration(n: usize, i: usize) -> Configuration {
    let front = 2 * i + 1;
    let sub = |j: usize| {
        if j <= front {
            (front - j) as i64
        } else {
            suffix_sub(j)
        }
    };
    let res = |j: usize| if j < front { 2 * i as i64 } else { 0 };
    te_config(&unit_input_line(n), sub, res)
}

/// Configuration `Y_{2i+2}` on the unit-input line of `n` nodes.
pub fn line_y_configuration(n: usize, i: usize) -> Configuration {
    let front = 2 * i + 2;
    let sub = |j: usize| {
        if j <= front {
            (4 * i + 2 - j) as i64
        } else {
            suffix_sub(j)
        }
    };
    let res = |j: usize| if j < front { (4 * i + 1) as i64 } else { 0 };
    te_config(&unit_input_line(n), sub, res)
}

/// Line `p_1 … p_n` started in `X_3`, driven back and forth through
/// `Y_4, X_5, Y_6, …` up to `X_n` (odd `n`) or `Y_n` (even `n`).
pub fn te_line_worst_case(n: usize) -> Result<WorstCase, WorstCaseError> {
    if n < 4 {
        return Err(WorstCaseError::TooSmall { n, min: 4 });
    }
    let mut script = Vec::new();
    let mut i = 1;
    while 2 * i + 2 <= n {
        // X_{2i+1} -> Y_{2i+2}
        for j in (1..=2 * i + 1).rev() {
            script.push(act(j, te::S));
            for k in j..=2 * i + 1 {
                script.push(act(k, te::R));
            }
        }
        // Y_{2i+2} -> X_{2i+3}
        if 2 * i + 3 <= n {
            for j in (1..=2 * i + 2).rev() {
                script.push(act(j, te::S));
            }
            for j in 1..=2 * i + 2 {
                script.push(act(j, te::R));
            }
        }
        i += 1;
    }
    // X_n / Y_n still has a wrong leaf: recompute sub bottom-up, then res top-down
    let completion = (1..=n)
        .rev()
        .map(|j| act(j, te::S))
        .chain((1..=n).map(|j| act(j, te::R)))
        .collect();
    Ok(WorstCase {
        network: unit_input_line(n),
        initial: line_x_configuration(n, 1),
        script,
        completion,
    })
}

/// Configuration `C_i` on the unit-input star with root `p_1`.
pub fn star_configuration(n: usize, i: usize) -> Configuration {
    let net = ForestNetwork::star(n).with_const("input", |_| 1);
    let sub = |j: usize| match j {
        1 => i as i64,
        j if j <= i => 1,
        _ => 0,
    };
    te_config(&net, sub, |_| i as i64)
}

/// Star `p_1` (root) with leaves `p_2 … p_n`, driven from `C_1` to the
/// terminal `C_n` one leaf at a time.
pub fn te_star_round_case(n: usize) -> Result<WorstCase, WorstCaseError> {
    if n < 2 {
        return Err(WorstCaseError::TooSmall { n, min: 2 });
    }
    let mut script = Vec::new();
    for i in 1..n {
        script.push(act(i + 1, te::S));
        script.push(act(1, te::S));
        script.push(act(1, te::R));
        for j in 2..=n {
            script.push(act(j, te::R));
        }
    }
    Ok(WorstCase {
        network: ForestNetwork::star(n).with_const("input", |_| 1),
        initial: star_configuration(n, 1),
        script,
        completion: Vec::new(),
    })
}
