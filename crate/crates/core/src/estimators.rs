//! Source estimators: each consumes a snapshot and emits a suspect set with
//! scores, plus the hop-distance error metric used to compare them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{
    distance_centrality, jordan_center, rumor_center, rumor_centrality_tree, rumor_order_counts,
    sdc_scores, Scores,
};
use crate::graph::{rooted_view, Graph};
use crate::likelihood::{exact_source_likelihood, tree_order_count};
use crate::numeric::{ln_biguint, rational_to_f64};
use crate::spread::Snapshot;
use crate::{tol, Error, Result};

/// The estimator families under comparison. `BfsRc` scores candidates by
/// the rumor centrality of breadth-first spanning trees; with `shared_tree`
/// one tree rooted at the distance center is scored for every node instead
/// of one tree per candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EstimatorKind {
    RumorCenter,
    BfsRc { shared_tree: bool },
    MultiEndVertex,
    Sdc,
    Jordan,
    ExactMl,
}

impl EstimatorKind {
    pub fn label(&self) -> &'static str {
        match self {
            EstimatorKind::RumorCenter => "rumor_center",
            EstimatorKind::BfsRc { shared_tree: false } => "bfs_rc",
            EstimatorKind::BfsRc { shared_tree: true } => "bfs_rc_shared",
            EstimatorKind::MultiEndVertex => "multi_end_vertex",
            EstimatorKind::Sdc => "sdc",
            EstimatorKind::Jordan => "jordan",
            EstimatorKind::ExactMl => "exact_ml",
        }
    }
}

/// A suspect set with one score per suspect. Counting methods store natural
/// logs of their counts; distance-flavored methods store the raw distance
/// quantity (smaller is better there). The representative is the lowest
/// suspect id.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub method: &'static str,
    pub suspects: Vec<usize>,
    pub scores: Vec<f64>,
    pub representative: usize,
}

impl Estimate {
    fn assemble(method: &'static str, mut pairs: Vec<(usize, f64)>) -> Result<Estimate> {
        if pairs.is_empty() {
            return Err(Error::InvalidParam(format!("{method}: empty suspect set")));
        }
        pairs.sort_by_key(|&(v, _)| v);
        let representative = pairs[0].0;
        let (suspects, scores) = pairs.into_iter().unzip();
        Ok(Estimate {
            method,
            suspects,
            scores,
            representative,
        })
    }
}

/// Breadth-first spanning tree with sorted-neighbor, first-discoverer
/// tie-breaking, so the result is deterministic.
pub fn bfs_spanning_tree(g: &Graph, root: usize) -> Result<Graph> {
    let n = g.node_count();
    if root >= n {
        return Err(Error::NodeOutOfRange(root));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                edges.push((u, w));
                queue.push_back(w);
            }
        }
    }
    Graph::from_edges(n, &edges)
}

fn scores_at(table_scores: &Scores, v: usize) -> f64 {
    match table_scores {
        Scores::Exact(vals) => rational_to_f64(&vals[v]),
        Scores::BigInt(vals) => ln_biguint(&vals[v]),
        Scores::LogReal(vals) => vals[v],
    }
}

fn rumor_center_estimate(snap: &Snapshot) -> Result<Estimate> {
    let centers = rumor_center(&snap.graph)?;
    let counts = rumor_order_counts(&snap.graph)?;
    let pairs = centers.iter().map(|&v| (v, ln_biguint(&counts[v]))).collect();
    Estimate::assemble("rumor_center", pairs)
}

fn bfs_rc_estimate(snap: &Snapshot, shared_tree: bool) -> Result<Estimate> {
    let g = &snap.graph;
    let n = g.node_count();
    if shared_tree {
        let root = distance_centrality(g)?.best[0];
        let tree = bfs_spanning_tree(g, root)?;
        let table = rumor_centrality_tree(&tree)?;
        let pairs = table
            .best
            .iter()
            .map(|&v| (v, scores_at(&table.scores, v)))
            .collect();
        return Estimate::assemble("bfs_rc_shared", pairs);
    }
    // One spanning tree per candidate, scored at its own root.
    let counts: Vec<_> = (0..n)
        .into_par_iter()
        .map(|v| {
            let tree = bfs_spanning_tree(g, v)?;
            tree_order_count(&tree, v)
        })
        .collect::<Result<_>>()?;
    let best: Vec<usize> = if n <= tol::BIGINT_NODE_CUTOFF {
        let top = counts.iter().max().expect("nonempty");
        (0..n).filter(|&v| &counts[v] == top).collect()
    } else {
        let logs: Vec<f64> = counts.iter().map(ln_biguint).collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (0..n).filter(|&v| logs[v] >= top - tol::LOG_TIE).collect()
    };
    let pairs = best.into_iter().map(|v| (v, ln_biguint(&counts[v]))).collect();
    Estimate::assemble("bfs_rc", pairs)
}

/// Nodes kept by the downward sweep of the end-vertex message pass: from
/// the rumor center, repeatedly follow every child whose branch holds the
/// maximal positive count of end vertices.
pub fn end_vertex_subtree(snap: &Snapshot) -> Result<Vec<usize>> {
    Ok(end_vertex_sweep(snap)?.0)
}

/// Returns (kept subtree sorted, per-node end-vertex branch counts, center).
fn end_vertex_sweep(snap: &Snapshot) -> Result<(Vec<usize>, Vec<usize>, usize)> {
    let g = &snap.graph;
    let v_c = rumor_center(g)?[0];
    let rv = rooted_view(g, v_c)?;
    let n = g.node_count();
    let mut cnt = vec![0usize; n];
    for &u in rv.bfs_order.iter().rev() {
        let mut c = snap.is_end_vertex(u) as usize;
        for &ch in &rv.children[u] {
            c += cnt[ch];
        }
        cnt[u] = c;
    }
    let mut kept = vec![false; n];
    kept[v_c] = true;
    let mut stack = vec![v_c];
    while let Some(u) = stack.pop() {
        let mx = rv.children[u].iter().map(|&c| cnt[c]).max().unwrap_or(0);
        if mx == 0 {
            continue;
        }
        for &ch in &rv.children[u] {
            if cnt[ch] == mx {
                kept[ch] = true;
                stack.push(ch);
            }
        }
    }
    let subtree: Vec<usize> = (0..n).filter(|&v| kept[v]).collect();
    Ok((subtree, cnt, v_c))
}

/// End-vertex message passing: suspect the parents of the kept subtree's
/// leaves, always including the rumor center. Linear time after rooting.
/// Scores are the end-vertex counts carried by each suspect's branch.
pub fn multi_end_vertex_estimate(snap: &Snapshot) -> Result<Estimate> {
    let (subtree, cnt, v_c) = end_vertex_sweep(snap)?;
    let rv = rooted_view(&snap.graph, v_c)?;
    let in_subtree = {
        let mut mask = vec![false; snap.n()];
        for &v in &subtree {
            mask[v] = true;
        }
        mask
    };
    let mut kappa = vec![v_c];
    for &v in &subtree {
        let is_leaf = !rv.children[v].iter().any(|&c| in_subtree[c]);
        if is_leaf {
            if let Some(p) = rv.parent[v] {
                kappa.push(p);
            }
        }
    }
    kappa.sort_unstable();
    kappa.dedup();
    let pairs = kappa.into_iter().map(|v| (v, cnt[v] as f64)).collect();
    Estimate::assemble("multi_end_vertex", pairs)
}

fn sdc_estimate(snap: &Snapshot) -> Result<Estimate> {
    let table = sdc_scores(snap)?;
    let pairs = table
        .best
        .iter()
        .map(|&v| (v, scores_at(&table.scores, v)))
        .collect();
    Estimate::assemble("sdc", pairs)
}

fn jordan_estimate(snap: &Snapshot) -> Result<Estimate> {
    let centers = jordan_center(&snap.graph)?;
    let pairs = centers
        .iter()
        .map(|&v| {
            let ecc = snap
                .distances_from(v)
                .into_iter()
                .map(|d| d.expect("connected"))
                .max()
                .unwrap_or(0);
            (v, ecc as f64)
        })
        .collect();
    Estimate::assemble("jordan", pairs)
}

fn exact_ml_estimate(snap: &Snapshot) -> Result<Estimate> {
    let table = exact_source_likelihood(snap)?;
    let pairs = table
        .argmax
        .iter()
        .map(|&v| (v, rational_to_f64(&table.posterior[v])))
        .collect();
    Estimate::assemble("exact_ml", pairs)
}

/// Dispatch a snapshot to the named estimator.
pub fn estimate(snap: &Snapshot, kind: EstimatorKind) -> Result<Estimate> {
    match kind {
        EstimatorKind::RumorCenter => rumor_center_estimate(snap),
        EstimatorKind::BfsRc { shared_tree } => bfs_rc_estimate(snap, shared_tree),
        EstimatorKind::MultiEndVertex => multi_end_vertex_estimate(snap),
        EstimatorKind::Sdc => sdc_estimate(snap),
        EstimatorKind::Jordan => jordan_estimate(snap),
        EstimatorKind::ExactMl => exact_ml_estimate(snap),
    }
}

/// The k nodes of largest rumor centrality, ties broken toward lower ids.
pub fn top_k_baseline(snap: &Snapshot, k: usize) -> Result<Estimate> {
    let n = snap.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParam(format!(
            "top-k: k={k} outside 1..={n}"
        )));
    }
    let table = rumor_centrality_tree(&snap.graph)?;
    let mut order: Vec<usize> = (0..n).collect();
    match &table.scores {
        Scores::BigInt(counts) => {
            order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
        }
        Scores::LogReal(logs) => {
            order.sort_by(|&a, &b| {
                logs[b]
                    .partial_cmp(&logs[a])
                    .expect("finite scores")
                    .then(a.cmp(&b))
            });
        }
        Scores::Exact(vals) => {
            order.sort_by(|&a, &b| vals[b].cmp(&vals[a]).then(a.cmp(&b)));
        }
    }
    order.truncate(k);
    let pairs = order
        .into_iter()
        .map(|v| (v, scores_at(&table.scores, v)))
        .collect();
    Estimate::assemble("top_k", pairs)
}

/// Hops from the true source to the nearest suspect, measured inside the
/// snapshot.
pub fn estimation_error(est: &Estimate, truth: usize, snap: &Snapshot) -> Result<usize> {
    if truth >= snap.n() {
        return Err(Error::NodeOutOfRange(truth));
    }
    let dist = snap.distances_from(truth);
    est.suspects
        .iter()
        .map(|&v| dist[v].ok_or(Error::Disconnected))
        .try_fold(usize::MAX, |acc, d| Ok(acc.min(d?)))
}
