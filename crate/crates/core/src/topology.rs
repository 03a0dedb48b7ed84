//! Invariant bookkeeping for rational blow-downs and the π1 gcd closure.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::contraction::ChainEmbedding;
use crate::lattice::SurfaceModel;
use crate::linalg;
use crate::tchains::WahlParams;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("Noether's formula fails: K^2 + e = {0} is not divisible by 12")]
    Noether(i64),
    #[error("signature {sigma} does not equal b2+ - b2- = {b2_plus} - {b2_minus}")]
    Signature { sigma: i64, b2_plus: i64, b2_minus: i64 },
    #[error("blowing down {removed} classes leaves b2- = {b2_minus}")]
    NegativeB2 { removed: i64, b2_minus: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub e: i64,
    pub sigma: i64,
    pub b2_plus: i64,
    pub b2_minus: i64,
    pub k_squared: i64,
}

impl SurfaceSummary {
    /// The plane blown up `n` times.
    pub fn rational(n: usize) -> Self {
        let n = n as i64;
        SurfaceSummary { e: 3 + n, sigma: 1 - n, b2_plus: 1, b2_minus: n, k_squared: 9 - n }
    }

    pub fn of_model(model: &SurfaceModel) -> Self {
        Self::rational(model.blowups())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub name: String,
    pub p: u64,
    pub q: u64,
    pub length: usize,
}

impl Configuration {
    pub fn lens_order(&self) -> u64 {
        self.p * self.p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub name: String,
    pub p: u64,
    pub q: u64,
}

/// A sphere meeting two configurations; the circle it cuts out on each
/// boundary is the stated power of that boundary's generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub a: String,
    pub b: String,
    pub power_a: u64,
    pub power_b: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    #[serde(default)]
    pub reconstructed: bool,
}

impl ConnectionGraph {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn validate(&self) -> Result<(), TopologyError> {
        let mut index = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            WahlParams::new(n.p, n.q).map_err(|e| TopologyError::MalformedGraph(format!("node {}: {e}", n.name)))?;
            if index.insert(n.name.as_str(), i).is_some() {
                return Err(TopologyError::MalformedGraph(format!("duplicate node {}", n.name)));
            }
        }
        for e in &self.edges {
            for end in [&e.a, &e.b] {
                if !index.contains_key(end.as_str()) {
                    return Err(TopologyError::MalformedGraph(format!("edge names unknown node {end}")));
                }
            }
            if e.a == e.b {
                return Err(TopologyError::MalformedGraph(format!("loop at {}", e.a)));
            }
            if e.power_a == 0 || e.power_b == 0 {
                return Err(TopologyError::MalformedGraph(format!("zero power on edge {}-{}", e.a, e.b)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi1Step {
    pub edge: usize,
    pub node: String,
    pub from: String,
    pub to: String,
}

impl fmt::Display for Pi1Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "edge {}: order of g[{}] divides {} (was {})", self.edge, self.node, self.to, self.from)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi1Result {
    pub trivial: bool,
    /// Surviving order bound for each node's boundary generator.
    pub orders: BTreeMap<String, String>,
    pub log: Vec<Pi1Step>,
}

/// gcd closure in the given edge order.
pub fn pi1_closure(graph: &ConnectionGraph) -> Result<Pi1Result, TopologyError> {
    let order: Vec<usize> = (0..graph.edges.len()).collect();
    pi1_closure_with_order(graph, &order)
}

/// Each node's generator `g` has order dividing `p^2`. An edge says
/// `g_a^{w_a}` is conjugate to `g_b^{±w_b}`, so the order of `g_a` divides
/// `w_a · o_b / gcd(o_b, w_b)`, and symmetrically. Iterated to a fixpoint.
pub fn pi1_closure_with_order(graph: &ConnectionGraph, order: &[usize]) -> Result<Pi1Result, TopologyError> {
    graph.validate()?;
    let orders: Vec<(String, BigInt)> =
        graph.nodes.iter().map(|n| (n.name.clone(), BigInt::from(n.p) * BigInt::from(n.p))).collect();
    gcd_closure(&orders, &graph.edges, order)
}

/// The closure on raw starting orders, for generators not tied to a `C_{p,q}`.
pub fn gcd_closure(
    nodes: &[(String, BigInt)],
    edges: &[GraphEdge],
    order: &[usize],
) -> Result<Pi1Result, TopologyError> {
    let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, (n, _))| (n.as_str(), i)).collect();
    let lookup = |name: &str| {
        index.get(name).copied().ok_or_else(|| TopologyError::MalformedGraph(format!("edge names unknown node {name}")))
    };
    if let Some(&bad) = order.iter().find(|&&i| i >= edges.len()) {
        return Err(TopologyError::MalformedGraph(format!("edge index {bad} out of range")));
    }
    let mut o: Vec<BigInt> = nodes.iter().map(|(_, v)| v.clone()).collect();
    let mut log = Vec::new();
    loop {
        let mut changed = false;
        for &ei in order {
            let e = &edges[ei];
            let (a, b) = (lookup(&e.a)?, lookup(&e.b)?);
            let (wa, wb) = (BigInt::from(e.power_a), BigInt::from(e.power_b));
            for (x, wx, y, wy) in [(a, &wa, b, &wb), (b, &wb, a, &wa)] {
                let bound = wx * (&o[y] / o[y].gcd(wy));
                let next = o[x].gcd(&bound);
                if next != o[x] {
                    log.push(Pi1Step {
                        edge: ei,
                        node: nodes[x].0.clone(),
                        from: o[x].to_string(),
                        to: next.to_string(),
                    });
                    o[x] = next;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Pi1Result {
        trivial: o.iter().all(One::is_one),
        orders: nodes.iter().zip(&o).map(|((n, _), v)| (n.clone(), v.to_string())).collect(),
        log,
    })
}

/// Powers of the first sphere's meridian carried by each sphere's meridian
/// in the boundary of a linear plumbing: `μ_1 = 1`, `μ_{i+1} = b_i μ_i - μ_{i-1}`.
pub fn meridian_powers(bs: &[u32]) -> Vec<BigInt> {
    let (mut prev, mut cur) = (BigInt::from(0), BigInt::one());
    let mut out = Vec::with_capacity(bs.len());
    for &b in bs {
        out.push(cur.clone());
        let next = BigInt::from(b) * &cur - &prev;
        prev = cur;
        cur = next;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
    Undetermined,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
            Parity::Undetermined => "undetermined",
        })
    }
}

/// Odd when the orthogonal complement of the chains in `H_2(Z)` holds a
/// class of odd square; such a class survives in the blow-down. An even
/// complement has finite index only, so it decides nothing.
pub fn residual_parity(model: &SurfaceModel, embs: &[ChainEmbedding]) -> Parity {
    residual_odd_class(model, embs).map_or(Parity::Undetermined, |_| Parity::Odd)
}

/// A complement basis vector of odd square, if any.
pub fn residual_odd_class(model: &SurfaceModel, embs: &[ChainEmbedding]) -> Option<Vec<BigInt>> {
    let n = model.rank();
    let mut rows = Vec::new();
    for emb in embs {
        for c in &emb.curves {
            let class = model.class(c).ok()?;
            let ints = class.to_integers()?;
            // x.G = x_0 g_0 - Σ x_i g_i
            rows.push(ints.iter().enumerate().map(|(i, g)| if i == 0 { g.clone() } else { -g }).collect());
        }
    }
    linalg::integer_kernel(&rows, n).into_iter().find(|v| {
        let sq: BigInt = v.iter().enumerate().map(|(i, x)| if i == 0 { x * x } else { -(x * x) }).sum();
        sq.is_odd()
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowdownSpec {
    pub surface: SurfaceSummary,
    pub configurations: Vec<Configuration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<ConnectionGraph>,
    pub parity: Parity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub e: i64,
    pub sigma: i64,
    pub b2_plus: i64,
    pub b2_minus: i64,
    pub chi: i64,
    pub k_squared: i64,
    pub parity: Parity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi1_trivial: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

pub fn blowdown_invariants(spec: &BlowdownSpec) -> Result<InvariantReport, TopologyError> {
    let s = &spec.surface;
    if s.sigma != s.b2_plus - s.b2_minus {
        return Err(TopologyError::Signature { sigma: s.sigma, b2_plus: s.b2_plus, b2_minus: s.b2_minus });
    }
    let removed: i64 = spec.configurations.iter().map(|c| c.length as i64).sum();
    let b2_minus = s.b2_minus - removed;
    if b2_minus < 0 {
        return Err(TopologyError::NegativeB2 { removed, b2_minus });
    }
    let e = s.e - removed;
    let k_squared = s.k_squared + removed;
    let (chi, rem) = (k_squared + e).div_rem(&12);
    if rem != 0 {
        return Err(TopologyError::Noether(k_squared + e));
    }
    let pi1_trivial = match &spec.graph {
        Some(g) => Some(pi1_closure(g)?.trivial),
        None => None,
    };
    let mut report = InvariantReport {
        e,
        sigma: s.sigma + removed,
        b2_plus: s.b2_plus,
        b2_minus,
        chi,
        k_squared,
        parity: spec.parity,
        pi1_trivial,
        fingerprint: None,
    };
    report.fingerprint = fingerprint(&report);
    Ok(report)
}

/// `P2#n(-P2)` when `(b2+, b2-, parity, π1)` is `(1, n, odd, trivial)`.
pub fn fingerprint(r: &InvariantReport) -> Option<String> {
    (r.b2_plus == 1 && r.parity == Parity::Odd && r.pi1_trivial == Some(true))
        .then(|| format!("P2#{}(-P2)", r.b2_minus))
}

/// `χ(2K) = χ + K^2`; positive means the arithmetic obstruction applies.
pub fn rationality_exclusion(k_squared: i64, chi: i64) -> (bool, i64) {
    let value = chi + k_squared;
    (value > 0, value)
}
