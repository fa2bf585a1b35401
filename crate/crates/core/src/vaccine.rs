//! Protection-node placement against cascading failures: the squared
//! component-size objective, centroid decomposition, centrality-ranked
//! selection, and brute-force plus degree-ranked baselines with bound
//! checks.
//!
//! With a failure origin uniform over nodes, the expected number of failed
//! nodes under protection set V_P is (1/N) times the sum of squared
//! component sizes of the graph minus V_P, so minimizing the integer sum of
//! squares is the whole problem. Objectives stay u128 in the search loops;
//! division by N happens only at reporting.

use num::{BigInt, BigRational};
use rayon::prelude::*;

use crate::centrality::distance_centrality;
use crate::estimators::bfs_spanning_tree;
use crate::graph::Graph;
use crate::numeric::binomial;
use crate::{Error, Result};

/// Recursive centroid hierarchy of a tree. `level` is 1 at the root;
/// `vaccine_centrality[v]` is the size of v's subtree inside this
/// hierarchy, so the root scores N and siblings partition their parent's
/// component.
#[derive(Clone, Debug)]
pub struct CentroidTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub level: Vec<usize>,
    pub vaccine_centrality: Vec<usize>,
}

impl CentroidTree {
    pub fn height(&self) -> usize {
        self.level.iter().copied().max().unwrap_or(0)
    }
}

/// A chosen node set with its exact objective: the sum of squared component
/// sizes after the set is removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtectionSet {
    pub method: &'static str,
    pub nodes: Vec<usize>,
    pub objective: u128,
}

fn check_nodes(g: &Graph, nodes: &[usize]) -> Result<()> {
    for &v in nodes {
        if v >= g.node_count() {
            return Err(Error::NodeOutOfRange(v));
        }
    }
    Ok(())
}

/// Sum of squared component sizes of g with the protected nodes removed.
pub fn cascade_objective(g: &Graph, protected: &[usize]) -> Result<u128> {
    check_nodes(g, protected)?;
    let n = g.node_count();
    let mut blocked = vec![false; n];
    for &v in protected {
        blocked[v] = true;
    }
    let mut seen = blocked.clone();
    let mut total = 0u128;
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push(s);
        let mut size = 0u128;
        while let Some(u) = stack.pop() {
            size += 1;
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        total += size * size;
    }
    Ok(total)
}

/// Expected failed-node count for a uniformly random failure origin:
/// the objective over N, exactly.
pub fn expected_outage(g: &Graph, protected: &[usize]) -> Result<BigRational> {
    let obj = cascade_objective(g, protected)?;
    Ok(BigRational::new(
        BigInt::from(obj),
        BigInt::from(g.node_count()),
    ))
}

/// Centroid of one alive component, as (centroid, component size). Ties
/// between two centroids resolve to the lower id.
fn component_centroid(g: &Graph, alive: &[bool], start: usize) -> (usize, usize) {
    let mut nodes = vec![start];
    let mut in_comp = vec![false; g.node_count()];
    in_comp[start] = true;
    let mut i = 0;
    while i < nodes.len() {
        let u = nodes[i];
        i += 1;
        for &w in g.neighbors(u) {
            if alive[w] && !in_comp[w] {
                in_comp[w] = true;
                nodes.push(w);
            }
        }
    }
    let size = nodes.len();
    // Subtree sizes under an iterative rooting at `start`.
    let mut parent = vec![usize::MAX; g.node_count()];
    let mut order = Vec::with_capacity(size);
    let mut stack = vec![start];
    parent[start] = start;
    while let Some(u) = stack.pop() {
        order.push(u);
        for &w in g.neighbors(u) {
            if in_comp[w] && parent[w] == usize::MAX {
                parent[w] = u;
                stack.push(w);
            }
        }
    }
    let mut sub = vec![1usize; g.node_count()];
    for &u in order.iter().rev() {
        if u != start {
            sub[parent[u]] += sub[u];
        }
    }
    let mut best = (usize::MAX, usize::MAX);
    for &v in &nodes {
        let mut heaviest = size - sub[v];
        for &w in g.neighbors(v) {
            if in_comp[w] && parent[w] == v {
                heaviest = heaviest.max(sub[w]);
            }
        }
        if heaviest < best.0 || (heaviest == best.0 && v < best.1) {
            best = (heaviest, v);
        }
    }
    (best.1, size)
}

/// Recursively peel centroids off a tree, linking each to the centroid of
/// the enclosing component one level up.
pub fn centroid_decomposition(g: &Graph) -> Result<CentroidTree> {
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    let n = g.node_count();
    let mut alive = vec![true; n];
    let mut parent = vec![None; n];
    let mut level = vec![0usize; n];
    // (component representative, parent centroid, level)
    let mut work = vec![(0usize, None, 1usize)];
    let mut root = 0;
    while let Some((rep, par, lv)) = work.pop() {
        let (c, _) = component_centroid(g, &alive, rep);
        parent[c] = par;
        level[c] = lv;
        if par.is_none() {
            root = c;
        }
        alive[c] = false;
        for &w in g.neighbors(c) {
            if alive[w] {
                work.push((w, Some(c), lv + 1));
            }
        }
    }
    // Subtree sizes inside the centroid hierarchy, deepest levels first.
    let mut by_depth: Vec<usize> = (0..n).collect();
    by_depth.sort_by_key(|&v| std::cmp::Reverse(level[v]));
    let mut vaccine_centrality = vec![1usize; n];
    for &v in &by_depth {
        if let Some(p) = parent[v] {
            vaccine_centrality[p] += vaccine_centrality[v];
        }
    }
    Ok(CentroidTree {
        root,
        parent,
        level,
        vaccine_centrality,
    })
}

fn protection_from(method: &'static str, g: &Graph, mut nodes: Vec<usize>) -> Result<ProtectionSet> {
    nodes.sort_unstable();
    nodes.dedup();
    let objective = cascade_objective(g, &nodes)?;
    Ok(ProtectionSet {
        method,
        nodes,
        objective,
    })
}

fn validate_k(g: &Graph, k: usize) -> Result<()> {
    if k == 0 || k > g.node_count() {
        return Err(Error::InvalidParam(format!(
            "protection set: k={k} outside 1..={}",
            g.node_count()
        )));
    }
    Ok(())
}

/// Rank nodes by centrality in the centroid hierarchy (component size when
/// that node's level is reached) and keep the top k. Ties prefer shallower
/// level, then lower id.
pub fn select_protection_set(g: &Graph, k: usize) -> Result<ProtectionSet> {
    validate_k(g, k)?;
    let ct = centroid_decomposition(g)?;
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| {
        ct.vaccine_centrality[b]
            .cmp(&ct.vaccine_centrality[a])
            .then(ct.level[a].cmp(&ct.level[b]))
            .then(a.cmp(&b))
    });
    order.truncate(k);
    protection_from("vaccine_centrality", g, order)
}

/// General-graph entry: select on a breadth-first spanning tree (rooted at
/// the distance center by default), evaluate on the real graph.
pub fn select_protection_set_general(
    g: &Graph,
    k: usize,
    root: Option<usize>,
) -> Result<ProtectionSet> {
    validate_k(g, k)?;
    let root = match root {
        Some(r) => {
            if r >= g.node_count() {
                return Err(Error::NodeOutOfRange(r));
            }
            r
        }
        None => distance_centrality(g)?.best[0],
    };
    let tree = bfs_spanning_tree(g, root)?;
    let ct = centroid_decomposition(&tree)?;
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| {
        ct.vaccine_centrality[b]
            .cmp(&ct.vaccine_centrality[a])
            .then(ct.level[a].cmp(&ct.level[b]))
            .then(a.cmp(&b))
    });
    order.truncate(k);
    protection_from("vaccine_centrality", g, order)
}

/// Combinatorial-search cap for the exhaustive baseline.
pub const BRUTE_FORCE_CAP: u64 = 1_000_000;

/// Exhaustive minimizer of the objective over all k-subsets; ties pick the
/// lexicographically smallest set. Parallel over the subset's first node.
pub fn brute_force_protection(g: &Graph, k: usize) -> Result<ProtectionSet> {
    validate_k(g, k)?;
    let n = g.node_count();
    if binomial(n, k) > BRUTE_FORCE_CAP.into() {
        return Err(Error::CapExceeded {
            what: "brute-force protection subsets",
            limit: BRUTE_FORCE_CAP as usize,
        });
    }
    fn explore(
        g: &Graph,
        k: usize,
        from: usize,
        chosen: &mut Vec<usize>,
        best: &mut Option<(u128, Vec<usize>)>,
    ) {
        if chosen.len() == k {
            let obj = cascade_objective(g, chosen).expect("validated ids");
            let better = match best {
                None => true,
                Some((b, set)) => obj < *b || (obj == *b && chosen < set),
            };
            if better {
                *best = Some((obj, chosen.clone()));
            }
            return;
        }
        let remaining = k - chosen.len();
        for v in from..=g.node_count().saturating_sub(remaining) {
            chosen.push(v);
            explore(g, k, v + 1, chosen, best);
            chosen.pop();
        }
    }
    let best = (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let mut chosen = vec![first];
            let mut best = None;
            explore(g, k, first + 1, &mut chosen, &mut best);
            best
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) => x,
                (x, None) => x,
                (Some(x), Some(y)) => {
                    if (y.0, &y.1) < (x.0, &x.1) {
                        Some(y)
                    } else {
                        Some(x)
                    }
                }
            },
        );
    let (objective, nodes) = best.expect("k >= 1 so at least one subset");
    Ok(ProtectionSet {
        method: "brute_force",
        nodes,
        objective,
    })
}

/// Baseline: the k nodes of largest degree, ties toward lower ids.
pub fn degree_heuristic_protection(g: &Graph, k: usize) -> Result<ProtectionSet> {
    validate_k(g, k)?;
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    order.truncate(k);
    protection_from("degree", g, order)
}

/// Single-vaccine bound chain: squared minimax component size, best
/// objective, and (N-1) times the minimax size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub lower: u128,
    pub best_sum: u128,
    pub upper: u128,
    pub holds: bool,
    pub centroid_attains_minimax: bool,
}

fn component_sizes_without(g: &Graph, v: usize) -> Vec<usize> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    seen[v] = true;
    let mut sizes = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    sizes
}

pub fn bound_check(g: &Graph) -> Result<BoundReport> {
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    let n = g.node_count();
    let mut minimax = u128::MAX;
    let mut minimax_set = Vec::new();
    let mut best_sum = u128::MAX;
    for v in 0..n {
        let sizes = component_sizes_without(g, v);
        let mx = sizes.iter().copied().max().unwrap_or(0) as u128;
        let sum: u128 = sizes.iter().map(|&c| (c as u128) * (c as u128)).sum();
        best_sum = best_sum.min(sum);
        if mx < minimax {
            minimax = mx;
            minimax_set.clear();
        }
        if mx == minimax {
            minimax_set.push(v);
        }
    }
    let lower = minimax * minimax;
    let upper = (n as u128 - 1) * minimax;
    let centroid = centroid_decomposition(g)?.root;
    Ok(BoundReport {
        lower,
        best_sum,
        upper,
        holds: lower <= best_sum && best_sum <= upper,
        centroid_attains_minimax: minimax_set.contains(&centroid),
    })
}

/// JSON report for one selection, with the exact expected outage as a
/// fraction string and the k=1 bound chain when the graph is a tree.
pub fn protection_report_json(g: &Graph, ps: &ProtectionSet) -> String {
    let outage = expected_outage(g, &ps.nodes).expect("set validated at construction");
    let bound = bound_check(g).ok().map(|b| {
        serde_json::json!({
            "lower": b.lower as u64,
            "best_sum": b.best_sum as u64,
            "upper": b.upper as u64,
            "holds": b.holds,
        })
    });
    let doc = serde_json::json!({
        "k": ps.nodes.len(),
        "method": ps.method,
        "protection_set": ps.nodes,
        "objective": ps.objective as u64,
        "expected_outage": format!("{}/{}", outage.numer(), outage.denom()),
        "bound_chain": bound,
    });
    serde_json::to_string_pretty(&doc).expect("serializable")
}
