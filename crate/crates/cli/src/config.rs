//! Resolution of command-line flags into networks, initial configurations
//! and the provenance record embedded in every report.

use std::fs;
use std::path::{Path, PathBuf};

use acyclic_core::algorithms::{self, te_line_worst_case, te_star_round_case, WorstCase};
use acyclic_core::engine::{random_configuration, random_network, rng_from_seed, Shape};
use acyclic_core::io;
use acyclic_core::{AlgorithmSpec, Configuration, DaemonKind, ForestNetwork};
use anyhow::{anyhow, bail, Context};
use clap::{Args, ValueEnum};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorstCaseKind {
    TeLine,
    TeStar,
}

impl WorstCaseKind {
    pub fn build(self, n: usize) -> anyhow::Result<WorstCase> {
        Ok(match self {
            WorstCaseKind::TeLine => te_line_worst_case(n)?,
            WorstCaseKind::TeStar => te_star_round_case(n)?,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            WorstCaseKind::TeLine => "te-line",
            WorstCaseKind::TeStar => "te-star",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DaemonName {
    Synchronous,
    RandomDistributed,
    RandomCentral,
    RoundRobin,
}

#[derive(Debug, Clone, Args)]
pub struct NetworkArgs {
    /// Network JSON file.
    #[arg(long, conflicts_with_all = ["shape", "n"])]
    pub network: Option<PathBuf>,
    /// Generated tree shape: line, star or random-tree.
    #[arg(long, value_parser = parse_shape)]
    pub shape: Option<Shape>,
    /// Number of nodes of a generated tree or worst-case construction.
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed for random trees (defaults to --seed).
    #[arg(long)]
    pub net_seed: Option<u64>,
    /// Constant for every node of a generated network, as NAME=VALUE.
    #[arg(long = "const", value_parser = parse_constant)]
    pub constants: Vec<(String, i64)>,
}

fn parse_shape(s: &str) -> Result<Shape, String> {
    s.parse()
}

fn parse_constant(s: &str) -> Result<(String, i64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value = value
        .parse()
        .map_err(|_| format!("`{value}` is not an integer"))?;
    Ok((name.to_string(), value))
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum NetworkSource {
    File {
        path: PathBuf,
    },
    Generated {
        shape: Shape,
        n: usize,
        seed: u64,
        constants: Vec<(String, i64)>,
    },
    WorstCase {
        kind: WorstCaseKind,
        n: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum InitSource {
    File { path: PathBuf },
    Random { bound: i64, seed: u64 },
    Zero,
    WorstCase { kind: WorstCaseKind },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum DaemonSpec {
    Builtin(DaemonKind),
    Scripted { moves: usize },
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Outputs {
    pub report: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

/// Everything a command resolved from its flags; embedded in reports.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub algorithm: String,
    pub network: Option<NetworkSource>,
    pub daemon: Option<DaemonSpec>,
    pub seed: u64,
    pub init: Option<InitSource>,
    pub step_limit: Option<u64>,
    pub outputs: Outputs,
    pub transform: bool,
    /// Value bound of exhaustive checks, when requested.
    pub exhaustive: Option<i64>,
}

impl ExperimentConfig {
    pub fn new(command: &str, algorithm: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            algorithm: algorithm.to_string(),
            network: None,
            daemon: None,
            seed,
            init: None,
            step_limit: None,
            outputs: Outputs::default(),
            transform: false,
            exhaustive: None,
        }
    }
}

pub fn algorithm(name: &str) -> anyhow::Result<AlgorithmSpec> {
    algorithms::by_name(name).ok_or_else(|| {
        anyhow!(
            "unknown algorithm `{name}` (registered: {})",
            algorithms::REGISTERED.join(", ")
        )
    })
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Builds the network named by the flags. Generated networks get the
/// algorithm's default constants, overridden by `--const`.
pub fn network(
    args: &NetworkArgs,
    alg_name: &str,
    seed: u64,
) -> anyhow::Result<(ForestNetwork, NetworkSource)> {
    if let Some(path) = &args.network {
        let net = io::parse_network(&read(path)?)
            .with_context(|| format!("invalid network {}", path.display()))?;
        return Ok((net, NetworkSource::File { path: path.clone() }));
    }
    let (Some(shape), Some(n)) = (args.shape, args.n) else {
        bail!("give either --network FILE or both --shape and --n");
    };
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let seed = args.net_seed.unwrap_or(seed);
    let mut net = random_network(&mut rng_from_seed(seed), n, shape);
    let mut constants: Vec<(String, i64)> = algorithms::default_constants(alg_name)
        .iter()
        .map(|&(name, v)| (name.to_string(), v))
        .collect();
    for (name, v) in &args.constants {
        match constants.iter_mut().find(|(c, _)| c == name) {
            Some(slot) => slot.1 = *v,
            None => constants.push((name.clone(), *v)),
        }
    }
    for (name, v) in &constants {
        net = net.with_const(name, |_| *v);
    }
    Ok((
        net,
        NetworkSource::Generated {
            shape,
            n,
            seed,
            constants,
        },
    ))
}

#[derive(Debug, Clone, Args)]
pub struct InitArgs {
    /// Initial configuration JSON file.
    #[arg(long, conflicts_with_all = ["init_bound", "zero", "worstcase"])]
    pub init: Option<PathBuf>,
    /// Draw the initial configuration uniformly with values in [0, BOUND].
    #[arg(long, conflicts_with_all = ["zero", "worstcase"])]
    pub init_bound: Option<i64>,
    /// Start from the all-default configuration.
    #[arg(long, conflicts_with = "worstcase")]
    pub zero: bool,
    /// Replay a scripted worst-case execution of `te` on its own network.
    #[arg(long, value_enum, conflicts_with_all = ["network", "shape"])]
    pub worstcase: Option<WorstCaseKind>,
}

pub const DEFAULT_INIT_BOUND: i64 = 100;

pub fn initial(
    args: &InitArgs,
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    seed: u64,
) -> anyhow::Result<(Configuration, InitSource)> {
    if let Some(path) = &args.init {
        let cfg = io::parse_configuration(&read(path)?, net, alg)
            .with_context(|| format!("invalid initial configuration {}", path.display()))?;
        return Ok((cfg, InitSource::File { path: path.clone() }));
    }
    if args.zero {
        let schema = alg.schema();
        let cfg = Configuration::new(net, schema, |_, v| schema.decl(v).domain.default_value())?;
        return Ok((cfg, InitSource::Zero));
    }
    let bound = args.init_bound.unwrap_or(DEFAULT_INIT_BOUND);
    if bound < 0 {
        bail!("--init-bound must be non-negative");
    }
    // a stream distinct from the one that shaped a random tree
    let mut rng = rng_from_seed(seed ^ 0x9e37_79b9_7f4a_7c15);
    let cfg = random_configuration(net, alg.schema(), &mut rng, bound);
    Ok((cfg, InitSource::Random { bound, seed }))
}

pub fn daemon_kind(name: DaemonName, rho: f64) -> anyhow::Result<DaemonKind> {
    Ok(match name {
        DaemonName::Synchronous => DaemonKind::Synchronous,
        DaemonName::RandomDistributed => {
            if !(rho > 0.0 && rho <= 1.0) {
                bail!("--rho must lie in (0, 1]");
            }
            DaemonKind::RandomDistributed { rho }
        }
        DaemonName::RandomCentral => DaemonKind::RandomCentral,
        DaemonName::RoundRobin => DaemonKind::RoundRobin,
    })
}
