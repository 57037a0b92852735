//! Closed-form move and round bounds, and audits of traces against them.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::{build_causality_graph, AnalysisError, AnalysisReport, Orientation};
use crate::engine::TraceSummary;
use crate::model::{AlgorithmSpec, FamilyId, ForestNetwork, NodeId};

/// Exact value, or a marker that it does not fit in 64 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundValue {
    Exact(u64),
    Overflow,
}

impl BoundValue {
    pub fn exact(self) -> Option<u64> {
        match self {
            BoundValue::Exact(v) => Some(v),
            BoundValue::Overflow => None,
        }
    }

    /// Whether `x` stays within the bound; everything fits under an overflow.
    pub fn admits(self, x: u64) -> bool {
        match self {
            BoundValue::Exact(v) => x <= v,
            BoundValue::Overflow => true,
        }
    }

    fn lift(v: Option<u64>) -> Self {
        v.map_or(BoundValue::Overflow, BoundValue::Exact)
    }

    pub fn add(self, other: Self) -> Self {
        match (self, other) {
            (BoundValue::Exact(a), BoundValue::Exact(b)) => Self::lift(a.checked_add(b)),
            _ => BoundValue::Overflow,
        }
    }

    pub fn mul(self, other: Self) -> Self {
        match (self, other) {
            (BoundValue::Exact(a), BoundValue::Exact(b)) => Self::lift(a.checked_mul(b)),
            _ => BoundValue::Overflow,
        }
    }

    pub fn pow(self, e: usize) -> Self {
        match self {
            BoundValue::Exact(a) => {
                Self::lift(u32::try_from(e).ok().and_then(|e| a.checked_pow(e)))
            }
            BoundValue::Overflow => BoundValue::Overflow,
        }
    }
}

impl From<u64> for BoundValue {
    fn from(v: u64) -> Self {
        BoundValue::Exact(v)
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(v) => write!(f, "{v}"),
            BoundValue::Overflow => f.write_str("exceeds 2^64"),
        }
    }
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BoundValue::Exact(v) => s.serialize_u64(*v),
            BoundValue::Overflow => s.serialize_str("exceeds 2^64"),
        }
    }
}

impl<'de> Deserialize<'de> for BoundValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(BoundValue::Exact(v)),
            Raw::Text(t) if t == "exceeds 2^64" => Ok(BoundValue::Overflow),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("not a bound: `{t}`"))),
        }
    }
}

fn num(x: usize) -> BoundValue {
    BoundValue::Exact(x as u64)
}

/// `(n·(1 + d·(1 + maxO)))^h`, the factor in front of `|Z|`.
fn move_factor(n: usize, d: usize, max_o: usize, h: usize) -> BoundValue {
    let inner = num(1).add(num(d).mul(num(1).add(num(max_o))));
    num(n).mul(inner).pow(h)
}

fn family_height(report: &AnalysisReport, i: FamilyId) -> Result<usize, AnalysisError> {
    report.families[i.0].height.ok_or(AnalysisError::Cyclic)
}

/// Per-node move bound: `(n·(1 + d·(1 + maxO(A_i))))^𝔥(A_i) · |Z(p, A_i)|`.
pub fn per_node_move_bound(
    report: &AnalysisReport,
    net: &ForestNetwork,
    p: NodeId,
    i: FamilyId,
) -> Result<BoundValue, AnalysisError> {
    let zone = report.zone(net, p, i)?.len();
    let factor = move_factor(
        net.len(),
        report.causality.in_degree,
        report.max_o(i),
        family_height(report, i)?,
    );
    Ok(factor.mul(num(zone)))
}

/// `(1 + d·(1 + Δ))^𝔥 · k · n^(𝔥+2)`.
pub fn corollary_bound(k: usize, d: usize, h: usize, n: usize, delta: usize) -> BoundValue {
    num(1)
        .add(num(d).mul(num(1).add(num(delta))))
        .pow(h)
        .mul(num(k))
        .mul(num(n).pow(h + 2))
}

pub fn total_move_bound(
    report: &AnalysisReport,
    net: &ForestNetwork,
) -> Result<BoundValue, AnalysisError> {
    let h = report.causality.height.ok_or(AnalysisError::Cyclic)?;
    Ok(corollary_bound(
        report.k,
        report.causality.in_degree,
        h,
        net.len(),
        net.max_degree(),
    ))
}

/// Sum over families of `n · factor(A_i) · zcap(A_i)`, where the zone is
/// capped by `H + 1` for top-down families and by `n` for bottom-up ones.
pub fn refined_move_bound(
    report: &AnalysisReport,
    net: &ForestNetwork,
) -> Result<BoundValue, AnalysisError> {
    let n = net.len();
    let mut total = num(0);
    for f in &report.families {
        let i = FamilyId(f.index);
        let cap = match report.orientation(i)? {
            Orientation::TopDown => net.height() + 1,
            Orientation::BottomUp => n,
        };
        let factor = move_factor(
            n,
            report.causality.in_degree,
            f.max_others,
            family_height(report, i)?,
        );
        total = total.add(num(n).mul(factor).mul(num(cap)));
    }
    Ok(total)
}

/// How local mutual exclusion was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LmeEvidence {
    /// The algorithm is the output of the priority transformer.
    Transformer,
    /// Checked on every configuration of a finite domain.
    Exhaustive,
    /// Only sampled.
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundBound {
    pub value: BoundValue,
    pub evidence: LmeEvidence,
}

/// `(𝔥 + 1)·(H + 1)`, only claimed under local mutual exclusion.
pub fn round_bound(
    report: &AnalysisReport,
    net: &ForestNetwork,
    lme: Option<LmeEvidence>,
) -> Result<Option<RoundBound>, AnalysisError> {
    let h = report.causality.height.ok_or(AnalysisError::Cyclic)?;
    Ok(lme.map(|evidence| RoundBound {
        value: num(h + 1).mul(num(net.height() + 1)),
        evidence,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundParameters {
    pub n: usize,
    #[serde(rename = "H")]
    pub height: usize,
    #[serde(rename = "Delta")]
    pub max_degree: usize,
    pub k: usize,
    pub d: usize,
    pub h: usize,
    pub family_heights: Vec<usize>,
    pub max_others: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub format: u32,
    pub algorithm: String,
    pub families: Vec<String>,
    pub parameters: BoundParameters,
    /// `per_node[p][i]`.
    pub per_node: Vec<Vec<BoundValue>>,
    pub per_family: Vec<BoundValue>,
    pub total_move_bound: BoundValue,
    pub refined_total: BoundValue,
    /// Sum of the per-node bounds with exact zone sizes.
    pub zone_exact_total: BoundValue,
    pub round_bound: Option<RoundBound>,
}

impl BoundReport {
    pub fn table(&self) -> String {
        let p = &self.parameters;
        let mut out = format!(
            "n={} H={} Delta={} k={} d={} h={}\n",
            p.n, p.height, p.max_degree, p.k, p.d, p.h
        );
        out += &format!(
            "{:<8} {:>4} {:>5} {:>22}\n",
            "family", "h", "maxO", "moves bound"
        );
        for (i, label) in self.families.iter().enumerate() {
            out += &format!(
                "{:<8} {:>4} {:>5} {:>22}\n",
                label,
                p.family_heights[i],
                p.max_others[i],
                self.per_family[i].to_string()
            );
        }
        out += &format!("total (corollary)     {}\n", self.total_move_bound);
        out += &format!("total (refined)       {}\n", self.refined_total);
        out += &format!("total (exact zones)   {}\n", self.zone_exact_total);
        match &self.round_bound {
            Some(r) => out += &format!("rounds                {} ({:?})\n", r.value, r.evidence),
            None => out += "rounds                no bound without local mutual exclusion\n",
        }
        out
    }
}

/// Evaluates every bound. Fails when the algorithm has a cyclic causality
/// graph or an unoriented family.
pub fn bound_report(
    report: &AnalysisReport,
    net: &ForestNetwork,
    lme: Option<LmeEvidence>,
) -> Result<BoundReport, AnalysisError> {
    let k = report.k;
    let mut per_node = Vec::with_capacity(net.len());
    let mut per_family = vec![num(0); k];
    for p in net.nodes() {
        let mut row = Vec::with_capacity(k);
        for i in 0..k {
            let b = per_node_move_bound(report, net, p, FamilyId(i))?;
            per_family[i] = per_family[i].add(b);
            row.push(b);
        }
        per_node.push(row);
    }
    let zone_exact_total = per_family.iter().fold(num(0), |acc, &b| acc.add(b));
    Ok(BoundReport {
        format: crate::analysis::REPORT_FORMAT,
        algorithm: report.algorithm.clone(),
        families: report.families.iter().map(|f| f.label.clone()).collect(),
        parameters: BoundParameters {
            n: net.len(),
            height: net.height(),
            max_degree: net.max_degree(),
            k,
            d: report.causality.in_degree,
            h: report.causality.height.ok_or(AnalysisError::Cyclic)?,
            family_heights: report
                .families
                .iter()
                .map(|f| f.height.ok_or(AnalysisError::Cyclic))
                .collect::<Result<_, _>>()?,
            max_others: report.families.iter().map(|f| f.max_others).collect(),
        },
        per_node,
        per_family,
        total_move_bound: total_move_bound(report, net)?,
        refined_total: refined_move_bound(report, net)?,
        zone_exact_total,
        round_bound: round_bound(report, net, lme)?,
    })
}

/// Corollary bound plus one, from the causality graph alone. Cyclic
/// algorithms get `fallback`.
pub fn default_step_limit(net: &ForestNetwork, alg: &AlgorithmSpec, fallback: u64) -> u64 {
    let graph = build_causality_graph(alg);
    match graph.height() {
        Some(h) => corollary_bound(alg.k(), graph.in_degree(), h, net.len(), net.max_degree())
            .exact()
            .map_or(u64::MAX, |b| b.saturating_add(1)),
        None => fallback,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    PerNode {
        node: NodeId,
        family: String,
        moves: u64,
        bound: BoundValue,
    },
    Total {
        which: String,
        moves: u64,
        bound: BoundValue,
    },
    Rounds {
        rounds: u64,
        bound: BoundValue,
    },
    Shape {
        message: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PerNode {
                node,
                family,
                moves,
                bound,
            } => {
                write!(f, "{family}({node}) moved {moves} times, bound {bound}")
            }
            Violation::Total {
                which,
                moves,
                bound,
            } => {
                write!(f, "{moves} moves exceed the {which} bound {bound}")
            }
            Violation::Rounds { rounds, bound } => {
                write!(f, "{rounds} rounds exceed the bound {bound}")
            }
            Violation::Shape { message } => f.write_str(message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Audit {
    pub passed: bool,
    pub total_moves: u64,
    pub rounds: u64,
    pub violations: Vec<Violation>,
}

/// Checks every counter of a trace against the bounds.
pub fn audit_trace(trace: &TraceSummary, bounds: &BoundReport) -> Audit {
    let mut violations = Vec::new();
    let n = bounds.per_node.len();
    let k = bounds.families.len();
    if trace.moves.len() != n || trace.moves.iter().any(|row| row.len() != k) {
        violations.push(Violation::Shape {
            message: format!("trace is not {n} nodes by {k} families"),
        });
    } else {
        for (p, row) in trace.moves.iter().enumerate() {
            for (i, &m) in row.iter().enumerate() {
                let bound = bounds.per_node[p][i];
                if !bound.admits(m) {
                    violations.push(Violation::PerNode {
                        node: NodeId(p),
                        family: bounds.families[i].clone(),
                        moves: m,
                        bound,
                    });
                }
            }
        }
    }
    for (which, bound) in [
        ("corollary", bounds.total_move_bound),
        ("refined", bounds.refined_total),
        ("exact-zone", bounds.zone_exact_total),
    ] {
        if !bound.admits(trace.total_moves) {
            violations.push(Violation::Total {
                which: which.to_string(),
                moves: trace.total_moves,
                bound,
            });
        }
    }
    if let Some(r) = bounds.round_bound {
        if !r.value.admits(trace.rounds) {
            violations.push(Violation::Rounds {
                rounds: trace.rounds,
                bound: r.value,
            });
        }
    }
    Audit {
        passed: violations.is_empty(),
        total_moves: trace.total_moves,
        rounds: trace.rounds,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{controls, nolp, te};
    use crate::analysis::{follows_acyclic_strategy, AnalysisOptions};

    fn analyze(net: &ForestNetwork, alg: &AlgorithmSpec) -> AnalysisReport {
        follows_acyclic_strategy(
            net,
            alg,
            AnalysisOptions {
                correct_alone: None,
            },
        )
    }

    #[test]
    fn reports_survive_json() {
        let net = ForestNetwork::line(40);
        let report = bound_report(
            &analyze(&net, &nolp::nolp()),
            &net,
            Some(LmeEvidence::Exhaustive),
        )
        .unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: BoundReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        let big = serde_json::to_value(BoundValue::Overflow).unwrap();
        assert_eq!(
            serde_json::from_value::<BoundValue>(big).unwrap(),
            BoundValue::Overflow
        );
        assert!(serde_json::from_str::<BoundValue>("\"lots\"").is_err());
    }

    #[test]
    fn arithmetic_overflows_instead_of_wrapping() {
        assert_eq!(
            BoundValue::Exact(u64::MAX).add(1.into()),
            BoundValue::Overflow
        );
        assert_eq!(
            BoundValue::Exact(1 << 32).mul((1u64 << 32).into()),
            BoundValue::Overflow
        );
        assert_eq!(
            BoundValue::Exact(10).pow(19),
            BoundValue::Exact(10u64.pow(19))
        );
        assert_eq!(BoundValue::Exact(10).pow(20), BoundValue::Overflow);
        assert!(BoundValue::Overflow.admits(u64::MAX));
        assert_eq!(
            serde_json::to_string(&BoundValue::Overflow).unwrap(),
            "\"exceeds 2^64\""
        );
    }

    #[test]
    fn te_per_node_values() {
        // line of 5: H = 4
        let net = ForestNetwork::line(5).with_const("input", |_| 1);
        let report = analyze(&net, &te::te());
        let n = 5u64;
        for p in net.nodes() {
            let s = per_node_move_bound(&report, &net, p, te::S).unwrap();
            assert_eq!(s, BoundValue::Exact(n - p.0 as u64));
            let r = per_node_move_bound(&report, &net, p, te::R).unwrap();
            assert_eq!(r, BoundValue::Exact(2 * n * (p.0 as u64 + 1)));
        }
    }

    #[test]
    fn single_node_te_refined_is_three() {
        let net = ForestNetwork::line(1).with_const("input", |_| 1);
        let report = analyze(&net, &te::te());
        assert_eq!(
            refined_move_bound(&report, &net).unwrap(),
            BoundValue::Exact(3)
        );
    }

    #[test]
    fn single_bottom_up_family_corollary_is_n_squared() {
        let net = ForestNetwork::star(7);
        let report = analyze(&net, &controls::subtree_size());
        assert_eq!(
            total_move_bound(&report, &net).unwrap(),
            BoundValue::Exact(49)
        );
    }

    #[test]
    fn round_bound_needs_lme() {
        let net = ForestNetwork::line(4);
        let report = analyze(&net, &nolp::nolp());
        assert_eq!(round_bound(&report, &net, None).unwrap(), None);
        let r = round_bound(&report, &net, Some(LmeEvidence::Transformer))
            .unwrap()
            .unwrap();
        assert_eq!(r.value, BoundValue::Exact(3 * 4));
    }

    #[test]
    fn audit_flags_each_kind_of_violation() {
        let net = ForestNetwork::line(2).with_const("input", |_| 1);
        let report = analyze(&net, &te::te());
        let bounds = bound_report(&report, &net, Some(LmeEvidence::Transformer)).unwrap();
        let empty = TraceSummary {
            moves: vec![vec![0, 0]; 2],
            total_moves: 0,
            rounds: 0,
            steps: 0,
        };
        assert!(audit_trace(&empty, &bounds).passed);
        let bad = TraceSummary {
            moves: vec![vec![3, 0], vec![0, 0]],
            total_moves: 3,
            rounds: 99,
            steps: 3,
        };
        let audit = audit_trace(&bad, &bounds);
        assert!(!audit.passed);
        assert!(audit
            .violations
            .iter()
            .any(|v| matches!(v, Violation::PerNode { .. })));
        assert!(audit
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Rounds { .. })));
        let wrong = TraceSummary {
            moves: vec![vec![0]],
            total_moves: 0,
            rounds: 0,
            steps: 0,
        };
        assert!(!audit_trace(&wrong, &bounds).passed);
    }

    #[test]
    fn cyclic_algorithms_have_no_bounds() {
        let net = ForestNetwork::line(2);
        let report = analyze(&net, &controls::mutual_readers());
        assert_eq!(total_move_bound(&report, &net), Err(AnalysisError::Cyclic));
        assert_eq!(
            default_step_limit(&net, &controls::mutual_readers(), 77),
            77
        );
    }
}
