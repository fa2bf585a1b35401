//! Susceptible-infected spreading and exact spreading-order probabilities.
//!
//! At every step the next infected node is drawn with probability
//! proportional to its number of already-infected neighbors. The probability
//! of a full order therefore factors into per-step ratios
//! weight(chosen) / W, where W sums the infected-neighbor counts of all
//! susceptible boundary nodes. W depends only on the infected set S:
//! W = sum of underlying degrees over S minus twice the number of
//! underlying edges inside S, which is exactly what a snapshot records.

use std::collections::{BTreeMap, VecDeque};

use num::{BigInt, BigRational, One};
use serde::{Deserialize, Serialize};

use crate::graph::{bfs_distances, Graph};
use crate::rng::{rng_for, stage};
use crate::{Error, Result};

/// One simulation step: which node was infected, with what weight, out of
/// what total boundary weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpreadStep {
    pub node: usize,
    pub weight: usize,
    pub boundary_weight: usize,
}

/// An observed infected subgraph.
///
/// Nodes are snapshot-local ids 0..n-1; `node_ids` maps them back to the
/// underlying graph. `graph` is the subgraph induced on the infected set, and
/// `underlying_degree` carries each node's degree in the full graph, which is
/// all the boundary-weight engine needs.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub graph: Graph,
    pub node_ids: Vec<u64>,
    pub underlying_degree: Vec<usize>,
    pub true_source: Option<usize>,
    pub infection_order: Option<Vec<usize>>,
    pub trace: Option<Vec<SpreadStep>>,
}

impl Snapshot {
    /// Assemble and validate a snapshot from parts.
    pub fn new(
        graph: Graph,
        node_ids: Vec<u64>,
        underlying_degree: Vec<usize>,
        true_source: Option<usize>,
    ) -> Result<Snapshot> {
        let n = graph.node_count();
        if node_ids.len() != n || underlying_degree.len() != n {
            return Err(Error::InvalidParam(
                "snapshot: nodes, ids, and degrees must align".into(),
            ));
        }
        if n == 0 {
            return Err(Error::InvalidParam("snapshot: empty".into()));
        }
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        for v in 0..n {
            if underlying_degree[v] < graph.degree(v) {
                return Err(Error::InvalidParam(format!(
                    "snapshot: node {v} has underlying degree {} below induced degree {}",
                    underlying_degree[v],
                    graph.degree(v)
                )));
            }
        }
        if let Some(s) = true_source {
            if s >= n {
                return Err(Error::NodeOutOfRange(s));
            }
        }
        Ok(Snapshot {
            graph,
            node_ids,
            underlying_degree,
            true_source,
            infection_order: None,
            trace: None,
        })
    }

    /// Induce a snapshot from an underlying graph and its infected node set.
    pub fn from_underlying(g: &Graph, infected: &[usize], source: Option<usize>) -> Result<Snapshot> {
        let mut nodes: Vec<usize> = infected.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.len() != infected.len() {
            return Err(Error::InvalidParam("snapshot: repeated infected node".into()));
        }
        let mut local = vec![usize::MAX; g.node_count()];
        for (i, &v) in nodes.iter().enumerate() {
            if v >= g.node_count() {
                return Err(Error::NodeOutOfRange(v));
            }
            local[v] = i;
        }
        let mut edges = Vec::new();
        for &v in &nodes {
            for &u in g.neighbors(v) {
                if v < u && local[u] != usize::MAX {
                    edges.push((local[v], local[u]));
                }
            }
        }
        let graph = Graph::from_edges(nodes.len(), &edges)?;
        let source_local = match source {
            Some(s) => {
                if s >= g.node_count() || local[s] == usize::MAX {
                    return Err(Error::InvalidParam("snapshot: source not infected".into()));
                }
                Some(local[s])
            }
            None => None,
        };
        Snapshot::new(
            graph,
            nodes.iter().map(|&v| v as u64).collect(),
            nodes.iter().map(|&v| g.degree(v)).collect(),
            source_local,
        )
    }

    /// The whole underlying graph as a snapshot (everything infected).
    pub fn of_whole_graph(g: &Graph, source: Option<usize>) -> Result<Snapshot> {
        let all: Vec<usize> = (0..g.node_count()).collect();
        Snapshot::from_underlying(g, &all, source)
    }

    pub fn n(&self) -> usize {
        self.graph.node_count()
    }

    /// End vertex: a node that is a leaf of the underlying graph.
    pub fn is_end_vertex(&self, v: usize) -> bool {
        self.underlying_degree[v] == 1
    }

    pub fn end_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.is_end_vertex(v)).collect()
    }

    /// Distances inside the induced subgraph.
    pub fn distances_from(&self, v: usize) -> Vec<Option<usize>> {
        bfs_distances(&self.graph, v)
    }
}

#[derive(Serialize, Deserialize)]
struct SnapshotJson {
    nodes: Vec<u64>,
    edges: Vec<(u64, u64)>,
    underlying_degree: Vec<usize>,
    end_vertices: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<u64>,
}

impl Snapshot {
    pub fn to_json(&self) -> String {
        let doc = SnapshotJson {
            nodes: self.node_ids.clone(),
            edges: self
                .graph
                .edges()
                .into_iter()
                .map(|(u, v)| (self.node_ids[u], self.node_ids[v]))
                .collect(),
            underlying_degree: self.underlying_degree.clone(),
            end_vertices: self
                .end_vertices()
                .into_iter()
                .map(|v| self.node_ids[v])
                .collect(),
            source: self.true_source.map(|s| self.node_ids[s]),
        };
        serde_json::to_string_pretty(&doc).expect("snapshot serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Snapshot> {
        let doc: SnapshotJson = serde_json::from_str(text)?;
        let mut index: BTreeMap<u64, usize> = BTreeMap::new();
        for (i, &id) in doc.nodes.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(Error::InvalidParam(format!("snapshot: repeated node id {id}")));
            }
        }
        let lookup = |id: u64| -> Result<usize> {
            index
                .get(&id)
                .copied()
                .ok_or_else(|| Error::InvalidParam(format!("snapshot: unknown node id {id}")))
        };
        let mut edges = Vec::with_capacity(doc.edges.len());
        for &(a, b) in &doc.edges {
            edges.push((lookup(a)?, lookup(b)?));
        }
        let graph = Graph::from_edges(doc.nodes.len(), &edges)?;
        let source = doc.source.map(lookup).transpose()?;
        let snap = Snapshot::new(graph, doc.nodes.clone(), doc.underlying_degree.clone(), source)?;
        for &e in &doc.end_vertices {
            let v = lookup(e)?;
            if !snap.is_end_vertex(v) {
                return Err(Error::InvalidParam(format!(
                    "snapshot: node {e} listed as end vertex but has underlying degree {}",
                    snap.underlying_degree[v]
                )));
            }
        }
        Ok(snap)
    }
}

/// When to halt a simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    /// Halt once this many nodes are infected.
    pub target_size: usize,
    /// Halt early once the number of infected end vertices reaches
    /// ceil(target_size * num / den). (1, 1) disables the early stop.
    pub end_fraction: (u32, u32),
}

impl StopRule {
    pub fn size(target_size: usize) -> StopRule {
        StopRule {
            target_size,
            end_fraction: (1, 1),
        }
    }

    fn end_threshold(&self) -> usize {
        let (num, den) = self.end_fraction;
        ((self.target_size as u64 * num as u64 + den as u64 - 1) / den as u64) as usize
    }

    fn validate(&self) -> Result<()> {
        let (num, den) = self.end_fraction;
        if self.target_size == 0 || num == 0 || den == 0 || num > den {
            return Err(Error::InvalidParam(
                "stop rule: need target_size >= 1 and end fraction in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Simulate SI spreading on `g` from `source`.
///
/// Step k draws from an independent stream derived from (seed, k), so traces
/// are reproducible regardless of how the boundary is stored or iterated.
pub fn simulate_si(g: &Graph, source: usize, rule: StopRule, seed: u64) -> Result<Snapshot> {
    rule.validate()?;
    if source >= g.node_count() {
        return Err(Error::NodeOutOfRange(source));
    }
    let mut infected = vec![false; g.node_count()];
    infected[source] = true;
    let mut order = vec![source];
    let mut trace = vec![SpreadStep {
        node: source,
        weight: 1,
        boundary_weight: 1,
    }];
    let mut boundary: BTreeMap<usize, usize> = BTreeMap::new();
    for &u in g.neighbors(source) {
        *boundary.entry(u).or_insert(0) += 1;
    }
    let mut end_count = usize::from(g.degree(source) == 1);
    let threshold = rule.end_threshold();

    while order.len() < rule.target_size && !boundary.is_empty() && end_count < threshold {
        let total: usize = boundary.values().sum();
        let mut rng = rng_for(seed, order.len() as u64, stage::SPREAD_STEP);
        let mut r = rand::Rng::gen_range(&mut rng, 0..total);
        let (&chosen, &weight) = boundary
            .iter()
            .find(|(_, &w)| {
                if r < w {
                    true
                } else {
                    r -= w;
                    false
                }
            })
            .expect("total > 0 guarantees a pick");
        trace.push(SpreadStep {
            node: chosen,
            weight,
            boundary_weight: total,
        });
        boundary.remove(&chosen);
        infected[chosen] = true;
        order.push(chosen);
        if g.degree(chosen) == 1 {
            end_count += 1;
        }
        for &u in g.neighbors(chosen) {
            if !infected[u] {
                *boundary.entry(u).or_insert(0) += 1;
            }
        }
    }

    let mut snap = Snapshot::from_underlying(g, &order, Some(source))?;
    let mut local = BTreeMap::new();
    for (i, &id) in snap.node_ids.iter().enumerate() {
        local.insert(id as usize, i);
    }
    snap.infection_order = Some(order.iter().map(|&v| local[&v]).collect());
    snap.trace = Some(
        trace
            .into_iter()
            .map(|s| SpreadStep {
                node: local[&s.node],
                ..s
            })
            .collect(),
    );
    Ok(snap)
}

/// Simulate SI spreading from the root of the infinite d-regular tree,
/// materializing nodes lazily. Every susceptible boundary node has exactly
/// one infected neighbor, so the per-step choice is uniform over a boundary
/// of size d + (k-1)(d-2) at k infected.
pub fn simulate_si_infinite_regular(d: usize, target_size: usize, seed: u64) -> Result<Snapshot> {
    if d < 2 {
        return Err(Error::InvalidParam("infinite regular tree: need d >= 2".into()));
    }
    if target_size == 0 {
        return Err(Error::InvalidParam("target_size must be >= 1".into()));
    }
    // parent[v] for every materialized node; root is 0.
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut infected = vec![true];
    let mut order = vec![0usize];
    let mut trace = vec![SpreadStep {
        node: 0,
        weight: 1,
        boundary_weight: 1,
    }];
    let mut boundary: Vec<usize> = Vec::new();
    let materialize_children = |v: usize,
                                    parent: &mut Vec<Option<usize>>,
                                    infected: &mut Vec<bool>,
                                    boundary: &mut Vec<usize>| {
        let count = if v == 0 { d } else { d - 1 };
        for _ in 0..count {
            parent.push(Some(v));
            infected.push(false);
            boundary.push(parent.len() - 1);
        }
    };
    materialize_children(0, &mut parent, &mut infected, &mut boundary);

    while order.len() < target_size {
        let mut rng = rng_for(seed, order.len() as u64, stage::SPREAD_STEP);
        let idx = rand::Rng::gen_range(&mut rng, 0..boundary.len());
        let chosen = boundary.swap_remove(idx);
        trace.push(SpreadStep {
            node: chosen,
            weight: 1,
            boundary_weight: boundary.len() + 1,
        });
        infected[chosen] = true;
        order.push(chosen);
        materialize_children(chosen, &mut parent, &mut infected, &mut boundary);
    }

    // Compact to the infected set.
    let mut nodes = order.clone();
    nodes.sort_unstable();
    let mut local = vec![usize::MAX; parent.len()];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    let mut edges = Vec::with_capacity(nodes.len().saturating_sub(1));
    for &v in &nodes {
        if let Some(p) = parent[v] {
            if infected[p] {
                edges.push((local[p].min(local[v]), local[p].max(local[v])));
            }
        }
    }
    let graph = Graph::from_edges(nodes.len(), &edges)?;
    let mut snap = Snapshot::new(
        graph,
        nodes.iter().map(|&v| v as u64).collect(),
        vec![d; nodes.len()],
        Some(local[0]),
    )?;
    snap.infection_order = Some(order.iter().map(|&v| local[v]).collect());
    snap.trace = Some(
        trace
            .into_iter()
            .map(|s| SpreadStep {
                node: local[s.node],
                ..s
            })
            .collect(),
    );
    Ok(snap)
}

/// Node cap for exhaustive order enumeration.
pub const ENUM_NODE_CAP: usize = 12;
/// Cap on the number of emitted orders.
pub const ENUM_ORDER_CAP: usize = 10_000_000;

/// All spreading orders of the snapshot starting at `start`, in lexicographic
/// order. Every node after the first must be adjacent (in the snapshot) to an
/// earlier node.
pub fn enumerate_spreading_orders(snap: &Snapshot, start: usize) -> Result<Vec<Vec<usize>>> {
    enumerate_spreading_orders_with_caps(snap, start, ENUM_NODE_CAP, ENUM_ORDER_CAP)
}

pub fn enumerate_spreading_orders_with_caps(
    snap: &Snapshot,
    start: usize,
    node_cap: usize,
    order_cap: usize,
) -> Result<Vec<Vec<usize>>> {
    let n = snap.n();
    if start >= n {
        return Err(Error::NodeOutOfRange(start));
    }
    if n > node_cap {
        return Err(Error::CapExceeded {
            what: "order enumeration nodes",
            limit: node_cap,
        });
    }
    let mut out = Vec::new();
    let mut order = vec![start];
    let mut infected = vec![false; n];
    infected[start] = true;
    fn recurse(
        g: &Graph,
        order: &mut Vec<usize>,
        infected: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        order_cap: usize,
    ) -> Result<()> {
        let n = g.node_count();
        if order.len() == n {
            if out.len() >= order_cap {
                return Err(Error::CapExceeded {
                    what: "order enumeration count",
                    limit: order_cap,
                });
            }
            out.push(order.clone());
            return Ok(());
        }
        for v in 0..n {
            if !infected[v] && g.neighbors(v).iter().any(|&u| infected[u]) {
                infected[v] = true;
                order.push(v);
                recurse(g, order, infected, out, order_cap)?;
                order.pop();
                infected[v] = false;
            }
        }
        Ok(())
    }
    recurse(&snap.graph, &mut order, &mut infected, &mut out, order_cap)?;
    Ok(out)
}

/// Exact probability of observing `order` under SI spreading from order[0].
pub fn spreading_order_probability(snap: &Snapshot, order: &[usize]) -> Result<BigRational> {
    let n = snap.n();
    if order.len() != n {
        return Err(Error::InvalidOrder(format!(
            "length {} != snapshot size {n}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n {
            return Err(Error::NodeOutOfRange(v));
        }
        if seen[v] {
            return Err(Error::InvalidOrder(format!("node {v} repeated")));
        }
        seen[v] = true;
    }
    let mut infected = vec![false; n];
    infected[order[0]] = true;
    let mut sum_deg = snap.underlying_degree[order[0]];
    let mut inner_edges = 0usize;
    let mut p = BigRational::one();
    for &v in &order[1..] {
        let weight = snap
            .graph
            .neighbors(v)
            .iter()
            .filter(|&&u| infected[u])
            .count();
        if weight == 0 {
            return Err(Error::InvalidOrder(format!(
                "node {v} has no earlier infected neighbor"
            )));
        }
        let boundary = sum_deg - 2 * inner_edges;
        p *= BigRational::new(BigInt::from(weight), BigInt::from(boundary));
        infected[v] = true;
        sum_deg += snap.underlying_degree[v];
        inner_edges += weight;
    }
    Ok(p)
}

/// Breadth-first check that an infected set could have arisen from `start`
/// (spreading orders exist iff the snapshot is connected, which `Snapshot`
/// already guarantees); exposed for order validation in tests.
pub fn reaches_all(snap: &Snapshot, start: usize) -> bool {
    let mut seen = vec![false; snap.n()];
    seen[start] = true;
    let mut q = VecDeque::from([start]);
    let mut count = 1;
    while let Some(u) = q.pop_front() {
        for &v in snap.graph.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                q.push_back(v);
            }
        }
    }
    count == snap.n()
}
