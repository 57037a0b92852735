//! Simulation and verification of silent self-stabilizing algorithms on
//! networks with a spanning forest.
//!
//! An algorithm is a list of families of guarded actions, family `i` writing
//! exactly its own block of variables. [`analysis`] classifies the families
//! and builds the graph of actions' causality, [`bounds`] turns that into
//! move and round bounds, [`engine`] runs executions under daemons, and
//! [`transform`] adds local mutual exclusion by guard priorities.
//!
//! ```
//! use acyclic_core::algorithms::te;
//! use acyclic_core::analysis::{follows_acyclic_strategy, AnalysisOptions};
//! use acyclic_core::bounds::{total_move_bound, BoundValue};
//! use acyclic_core::model::ForestNetwork;
//!
//! let net = ForestNetwork::star(5).with_const("input", |_| 1);
//! let report = follows_acyclic_strategy(&net, &te(), AnalysisOptions::default());
//! assert!(report.verdict);
//! // (1 + d(1 + Δ))^𝔥 · k · n^(𝔥+2) with d = 𝔥 = 1, k = 2, Δ = 4
//! assert_eq!(total_move_bound(&report, &net).unwrap(), BoundValue::Exact(6 * 2 * 125));
//! ```

pub mod algorithms;
pub mod analysis;
pub mod bounds;
pub mod engine;
pub mod io;
pub mod model;
pub mod transform;

pub use analysis::{follows_acyclic_strategy, AnalysisOptions, AnalysisReport};
pub use bounds::{audit_trace, bound_report, BoundReport, BoundValue};
pub use engine::{run, DaemonKind, ExecutionTrace, RunOptions};
pub use model::{Activation, AlgorithmSpec, Configuration, FamilyId, ForestNetwork, NodeId};
pub use transform::{derive_order, transform, transform_default, PriorityOrder};
