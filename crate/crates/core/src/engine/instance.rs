//! Seeded random networks and configurations.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{AlgorithmSpec, Configuration, Domain, ForestNetwork, NodeId, VariableSchema};

/// Deterministic generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Line,
    Star,
    RandomTree,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Line => "line",
            Shape::Star => "star",
            Shape::RandomTree => "random-tree",
        })
    }
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "line" => Ok(Shape::Line),
            "star" => Ok(Shape::Star),
            "random-tree" => Ok(Shape::RandomTree),
            other => Err(format!("unknown shape `{other}` (line, star, random-tree)")),
        }
    }
}

/// A tree of the requested shape rooted at node 0. Random trees attach each
/// node `i > 0` to a uniformly chosen earlier node.
pub fn random_network(rng: &mut impl Rng, n: usize, shape: Shape) -> ForestNetwork {
    assert!(n >= 1, "networks need at least one node");
    match shape {
        Shape::Line => ForestNetwork::line(n),
        Shape::Star => ForestNetwork::star(n),
        Shape::RandomTree => {
            let parent = (0..n)
                .map(|i| (i > 0).then(|| rng.gen_range(0..i)))
                .collect();
            ForestNetwork::from_parents(parent).expect("recursive trees are forests")
        }
    }
}

/// Uniform draw from a domain, integer domains clamped to `[0, bound]`
/// (`[-bound, bound]` for signed integers).
pub fn random_value(rng: &mut impl Rng, domain: &Domain, bound: i64) -> i64 {
    match domain {
        Domain::Natural => rng.gen_range(0..=bound),
        Domain::Integer => rng.gen_range(-bound..=bound),
        Domain::Finite(values) => *values.choose(rng).expect("non-empty domain"),
    }
}

/// Random writables over an existing network (constants taken from `net`).
pub fn random_configuration(
    net: &ForestNetwork,
    schema: &VariableSchema,
    rng: &mut impl Rng,
    bound: i64,
) -> Configuration {
    Configuration::new(net, schema, |_, v| {
        random_value(rng, &schema.decl(v).domain, bound)
    })
    .expect("constants present and draws in domain")
}

/// Attaches random values in `[0, bound]` for every constant of `schema`.
pub fn with_random_constants(
    net: ForestNetwork,
    schema: &VariableSchema,
    rng: &mut impl Rng,
    bound: i64,
) -> ForestNetwork {
    let mut net = net;
    for v in schema.constants() {
        let decl = schema.decl(v).clone();
        let values: Vec<i64> = (0..net.len())
            .map(|_| random_value(rng, &decl.domain, bound))
            .collect();
        net = net.with_const(&decl.name, |p: NodeId| values[p.0]);
    }
    net
}

/// Network of the given shape plus a uniformly random configuration;
/// constants and writables are drawn from `[0, bound]`.
pub fn random_instance(
    seed: u64,
    n: usize,
    shape: Shape,
    bound: i64,
    alg: &AlgorithmSpec,
) -> (ForestNetwork, Configuration) {
    let mut rng = rng_from_seed(seed);
    let net = random_network(&mut rng, n, shape);
    let net = with_random_constants(net, alg.schema(), &mut rng, bound);
    let cfg = random_configuration(&net, alg.schema(), &mut rng, bound);
    (net, cfg)
}
