//! Built-in algorithms and their scripted worst-case executions.

pub mod controls;
pub mod nolp;
pub mod te;
pub mod worstcase;

use crate::model::AlgorithmSpec;

pub use nolp::nolp;
pub use te::te;
pub use worstcase::{te_line_worst_case, te_star_round_case, WorstCase, WorstCaseError};

/// Names accepted by [`by_name`].
pub const REGISTERED: &[&str] = &["te", "nolp", "subtree-size"];

/// Built-in algorithm registry.
pub fn by_name(name: &str) -> Option<AlgorithmSpec> {
    match name {
        "te" => Some(te()),
        "nolp" => Some(nolp()),
        "subtree-size" => Some(controls::subtree_size()),
        _ => None,
    }
}

/// Constants a built-in algorithm expects on generated networks, with the
/// value each node gets when no network file supplies them.
pub fn default_constants(name: &str) -> &'static [(&'static str, i64)] {
    match name {
        "te" => &[("input", 1)],
        _ => &[],
    }
}
