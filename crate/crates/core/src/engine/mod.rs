//! Daemons, executions, round accounting and exhaustive exploration.

pub mod daemon;
pub mod explore;
pub mod instance;
pub mod trace;

pub use daemon::{
    Daemon, DaemonError, DaemonKind, RandomCentral, RandomDistributed, RoundRobinCentral, Scripted,
    Synchronous,
};
pub use explore::{
    all_selections, explore_exhaustive, ExplorationResult, ExploreError, InitDomain,
};
pub use instance::{
    random_configuration, random_instance, random_network, rng_from_seed, with_random_constants,
    Shape, SimRng,
};
pub use trace::{
    count_rounds, run, ExecutionTrace, Outcome, RoundCounter, RunError, RunOptions, StepRecord,
    TraceSummary,
};
