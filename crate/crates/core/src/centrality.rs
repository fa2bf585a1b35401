//! Node-scoring functions: distance and betweenness centrality, branch
//! weights and the centroid via message passing, order-count (rumor)
//! centrality with its unicyclic extension, Jordan center, statistically
//! weighted distance scores, and the Markov-chain stationary view of the
//! order counts.

use num::{BigInt, BigRational, BigUint, One, Zero};
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::graph::{
    bfs_distances, find_unique_cycle, minimum_chordless_cycle_size, rooted_view, Graph, MinCycle,
    MIN_CYCLE_CAP,
};
use crate::numeric::big_ratio;
use crate::spread::Snapshot;
use crate::{tol, Error, Result};

/// Scores in one of three numeric regimes. `LogReal` holds floating-point
/// scores (log-domain for order counts) compared with an absolute tolerance
/// before tie sets form; the exact regimes compare exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum Scores {
    Exact(Vec<BigRational>),
    BigInt(Vec<BigUint>),
    LogReal(Vec<f64>),
}

impl Scores {
    pub fn len(&self) -> usize {
        match self {
            Scores::Exact(v) => v.len(),
            Scores::BigInt(v) => v.len(),
            Scores::LogReal(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

/// Per-node scores plus the extremum set they induce.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    pub scores: Scores,
    pub kind: ExtremumKind,
    /// Ascending node ids attaining the extremum (within tolerance for the
    /// floating regime).
    pub best: Vec<usize>,
}

impl ScoreTable {
    pub fn new(scores: Scores, kind: ExtremumKind) -> Result<ScoreTable> {
        if scores.is_empty() {
            return Err(Error::InvalidParam("score table: no entries".into()));
        }
        let best = match &scores {
            Scores::Exact(v) => extremum_set(v, kind, |a, b| a == b),
            Scores::BigInt(v) => extremum_set(v, kind, |a, b| a == b),
            Scores::LogReal(v) => {
                extremum_set(v, kind, |a, b| (a - b).abs() <= tol::LOG_TIE)
            }
        };
        Ok(ScoreTable { scores, kind, best })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.scores {
            Scores::Exact(v) => {
                out.push_str("node,numerator,denominator,is_extremum\n");
                for (i, s) in v.iter().enumerate() {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        i,
                        s.numer(),
                        s.denom(),
                        self.best.contains(&i) as u8
                    ));
                }
            }
            Scores::BigInt(v) => {
                out.push_str("node,numerator,denominator,is_extremum\n");
                for (i, s) in v.iter().enumerate() {
                    out.push_str(&format!("{i},{s},1,{}\n", self.best.contains(&i) as u8));
                }
            }
            Scores::LogReal(v) => {
                out.push_str("node,log_score,is_extremum\n");
                for (i, s) in v.iter().enumerate() {
                    out.push_str(&format!("{i},{s:.6},{}\n", self.best.contains(&i) as u8));
                }
            }
        }
        out
    }
}

fn extremum_set<T: PartialOrd>(
    scores: &[T],
    kind: ExtremumKind,
    tie: impl Fn(&T, &T) -> bool,
) -> Vec<usize> {
    let mut best = 0usize;
    for i in 1..scores.len() {
        let better = match kind {
            ExtremumKind::Max => scores[i] > scores[best],
            ExtremumKind::Min => scores[i] < scores[best],
        };
        if better {
            best = i;
        }
    }
    (0..scores.len()).filter(|&i| tie(&scores[i], &scores[best])).collect()
}

/// Subtree sizes along directed tree edges: the value sent from `i` to an
/// adjacent `j` is the node count on i's side once the edge is removed.
/// Opposite directions always sum to the node count.
#[derive(Clone, Debug)]
pub struct MessageField {
    n: usize,
    parent: Vec<Option<usize>>,
    subtree: Vec<usize>,
}

impl MessageField {
    pub fn from_tree(g: &Graph) -> Result<MessageField> {
        let view = rooted_view(g, 0)?;
        Ok(MessageField {
            n: g.node_count(),
            parent: view.parent,
            subtree: view.subtree_size,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Value sent from `i` to `j`; `None` when they are not adjacent.
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        if self.parent[i] == Some(j) {
            Some(self.subtree[i])
        } else if self.parent[j] == Some(i) {
            Some(self.n - self.subtree[j])
        } else {
            None
        }
    }

    /// |2·M(i→j) − n| for adjacent i, j: how unbalanced the edge split is,
    /// seen from i's side.
    pub fn split_imbalance(&self, i: usize, j: usize) -> Option<usize> {
        self.get(i, j).map(|m| (2 * m).abs_diff(self.n))
    }

    /// Largest value arriving at `v` (its branch weight).
    pub fn branch_weight(&self, g: &Graph, v: usize) -> usize {
        g.neighbors(v)
            .iter()
            .map(|&u| self.get(u, v).expect("neighbor message"))
            .max()
            .unwrap_or(0)
    }
}

fn ensure_connected(g: &Graph) -> Result<()> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

fn distance_sums(g: &Graph) -> Result<Vec<usize>> {
    ensure_connected(g)?;
    Ok((0..g.node_count())
        .into_par_iter()
        .map(|v| {
            bfs_distances(g, v)
                .into_iter()
                .map(|d| d.expect("connected"))
                .sum()
        })
        .collect())
}

/// Sum of hop distances to every other node; lower is more central.
pub fn distance_centrality(g: &Graph) -> Result<ScoreTable> {
    let sums = distance_sums(g)?;
    ScoreTable::new(
        Scores::BigInt(sums.into_iter().map(BigUint::from).collect()),
        ExtremumKind::Min,
    )
}

/// Node cap for exact rational betweenness; larger graphs use floating point.
pub const BETWEENNESS_EXACT_CAP: usize = 1_000;

/// Fraction of shortest paths over unordered pairs passing through each node.
pub fn betweenness_centrality(g: &Graph) -> Result<ScoreTable> {
    ensure_connected(g)?;
    let n = g.node_count();
    if n <= BETWEENNESS_EXACT_CAP {
        let acc = (0..n)
            .into_par_iter()
            .map(|s| brandes_source_exact(g, s))
            .reduce(
                || vec![BigRational::zero(); n],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            );
        let half = big_ratio(1, 2);
        let scores = acc.into_iter().map(|x| x * &half).collect();
        ScoreTable::new(Scores::Exact(scores), ExtremumKind::Max)
    } else {
        let mut acc = vec![0.0f64; n];
        for s in 0..n {
            for (v, x) in brandes_source_f64(g, s).into_iter().enumerate() {
                acc[v] += x;
            }
        }
        for x in &mut acc {
            *x /= 2.0;
        }
        ScoreTable::new(Scores::LogReal(acc), ExtremumKind::Max)
    }
}

/// One-source shortest-path DAG with path counts, shared by both regimes.
fn sp_dag(g: &Graph, s: usize) -> (Vec<Option<usize>>, Vec<BigUint>, Vec<usize>) {
    let n = g.node_count();
    let mut dist = vec![None; n];
    let mut sigma = vec![BigUint::zero(); n];
    let mut order = Vec::with_capacity(n);
    dist[s] = Some(0);
    sigma[s] = BigUint::one();
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in g.neighbors(u) {
            match dist[w] {
                None => {
                    dist[w] = Some(dist[u].unwrap() + 1);
                    sigma[w] = sigma[u].clone();
                    queue.push_back(w);
                }
                Some(dw) if dw == dist[u].unwrap() + 1 => {
                    let add = sigma[u].clone();
                    sigma[w] += add;
                }
                _ => {}
            }
        }
    }
    (dist, sigma, order)
}

fn brandes_source_exact(g: &Graph, s: usize) -> Vec<BigRational> {
    let n = g.node_count();
    let (dist, sigma, order) = sp_dag(g, s);
    let mut delta = vec![BigRational::zero(); n];
    for &w in order.iter().rev() {
        if w == s {
            continue;
        }
        let coeff = (BigRational::one() + &delta[w])
            / BigRational::from_integer(BigInt::from(sigma[w].clone()));
        for &v in g.neighbors(w) {
            if dist[v].unwrap() + 1 == dist[w].unwrap() {
                let add = BigRational::from_integer(BigInt::from(sigma[v].clone())) * &coeff;
                delta[v] += add;
            }
        }
    }
    delta[s] = BigRational::zero();
    delta
}

fn brandes_source_f64(g: &Graph, s: usize) -> Vec<f64> {
    let n = g.node_count();
    let (dist, sigma, order) = sp_dag(g, s);
    let sigma: Vec<f64> = sigma
        .iter()
        .map(|x| x.to_string().parse::<f64>().unwrap_or(f64::INFINITY))
        .collect();
    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        if w == s {
            continue;
        }
        let coeff = (1.0 + delta[w]) / sigma[w];
        for &v in g.neighbors(w) {
            if dist[v].unwrap() + 1 == dist[w].unwrap() {
                delta[v] += sigma[v] * coeff;
            }
        }
    }
    delta[s] = 0.0;
    delta
}

/// Branch weights for every node of a tree (largest incoming subtree size),
/// plus the message field, with the centroid located by walking from node 0
/// along strictly shrinking split imbalances.
pub fn centroid_by_message_passing(g: &Graph) -> Result<(ScoreTable, MessageField)> {
    let n = g.node_count();
    let field = MessageField::from_tree(g)?;
    let weights: Vec<usize> = (0..n).map(|v| field.branch_weight(g, v)).collect();
    // Walk toward the heaviest side while it holds more than half the nodes.
    let mut at = 0usize;
    loop {
        let heaviest = g
            .neighbors(at)
            .iter()
            .copied()
            .max_by_key(|&u| field.get(u, at).expect("neighbor message"));
        match heaviest {
            Some(u) if 2 * field.get(u, at).unwrap() > n => at = u,
            _ => break,
        }
    }
    let mut centroid = vec![at];
    for &u in g.neighbors(at) {
        if 2 * field.get(u, at).unwrap() == n {
            centroid.push(u);
        }
    }
    centroid.sort_unstable();
    let table = ScoreTable::new(
        Scores::BigInt(weights.iter().map(|&w| BigUint::from(w)).collect()),
        ExtremumKind::Min,
    )?;
    debug_assert_eq!(table.best, centroid);
    Ok((table, field))
}

/// Exact spreading-order counts for every node of a tree: the count at the
/// root transported across each edge by the ratio (subtree size) to
/// (nodes outside the subtree).
pub fn rumor_order_counts(g: &Graph) -> Result<Vec<BigUint>> {
    let n = g.node_count();
    let view = rooted_view(g, 0)?;
    let mut counts = vec![BigUint::zero(); n];
    counts[0] = crate::likelihood::tree_order_count(g, 0)?;
    for &u in &view.bfs_order {
        for &c in &view.children[u] {
            let t = view.subtree_size[c];
            let num = &counts[u] * BigUint::from(t);
            debug_assert!((&num % BigUint::from(n - t)).is_zero());
            counts[c] = num / BigUint::from(n - t);
        }
    }
    Ok(counts)
}

/// Spreading-order counts per node, exact below the big-integer cutoff and
/// log-domain above it.
pub fn rumor_centrality_tree(g: &Graph) -> Result<ScoreTable> {
    let n = g.node_count();
    if n <= tol::BIGINT_NODE_CUTOFF {
        return ScoreTable::new(Scores::BigInt(rumor_order_counts(g)?), ExtremumKind::Max);
    }
    let view = rooted_view(g, 0)?;
    let mut logs = vec![0.0f64; n];
    let mut at_root = ln_gamma(n as f64);
    for v in 1..n {
        at_root -= (view.subtree_size[v] as f64).ln();
    }
    logs[0] = at_root;
    for &u in &view.bfs_order {
        for &c in &view.children[u] {
            let t = view.subtree_size[c] as f64;
            logs[c] = logs[u] + t.ln() - (n as f64 - t).ln();
        }
    }
    ScoreTable::new(Scores::LogReal(logs), ExtremumKind::Max)
}

/// Nodes of a tree whose every branch holds at most half the nodes. Always
/// one or two nodes, and exactly the order-count maximizers.
pub fn rumor_center(g: &Graph) -> Result<Vec<usize>> {
    let n = g.node_count();
    let field = MessageField::from_tree(g)?;
    let centers: Vec<usize> = (0..n)
        .filter(|&v| 2 * field.branch_weight(g, v) <= n)
        .collect();
    debug_assert!(!centers.is_empty() && centers.len() <= 2);
    Ok(centers)
}

/// Order counts on a unicyclic graph: the per-node sum of tree order counts
/// over all spanning trees.
pub fn epidemic_centrality_unicyclic(g: &Graph) -> Result<ScoreTable> {
    let trees = crate::graph::spanning_trees_unicyclic(g)?;
    let n = g.node_count();
    let mut totals = vec![BigUint::zero(); n];
    for st in &trees {
        for (t, c) in totals.iter_mut().zip(rumor_order_counts(&st.tree)?) {
            *t += c;
        }
    }
    ScoreTable::new(Scores::BigInt(totals), ExtremumKind::Max)
}

/// Component sizes of `g` with `v` removed.
fn component_sizes_without(g: &Graph, v: usize) -> Vec<usize> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    seen[v] = true;
    let mut sizes = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut size = 0;
        let mut stack = vec![s];
        seen[s] = true;
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

/// Order-count maximizers of a unicyclic graph without summing over
/// spanning trees. Nodes whose removal leaves only components of at most
/// half the graph win outright when any exist; otherwise the maximizer sits
/// on the cycle and exact relative scores across cycle vertices decide.
pub fn epidemic_center_unicyclic(g: &Graph) -> Result<Vec<usize>> {
    let cycle = find_unique_cycle(g)?;
    let n = g.node_count();
    let balanced: Vec<usize> = (0..n)
        .filter(|&v| component_sizes_without(g, v).iter().all(|&s| 2 * s <= n))
        .collect();
    if !balanced.is_empty() {
        return Ok(balanced);
    }
    let h = cycle.len();
    // Branch sizes: nodes hanging at each cycle vertex, itself included.
    let mut entry = vec![usize::MAX; n];
    let mut queue: std::collections::VecDeque<usize> = cycle.iter().copied().collect();
    for &c in &cycle {
        entry[c] = c;
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if entry[w] == usize::MAX {
                entry[w] = entry[u];
                queue.push_back(w);
            }
        }
    }
    let mut branch = vec![0usize; h];
    for u in 0..n {
        branch[cycle.iter().position(|&c| c == entry[u]).unwrap()] += 1;
    }
    // Relative scores: for each deleted cycle edge the cycle opens into a
    // path; a root's score contribution is the product over the other cycle
    // vertices of one over the node count hanging beyond them.
    let mut score = vec![BigRational::zero(); h];
    for p in 0..h {
        let sizes: Vec<usize> = (1..=h).map(|r| branch[(p + r) % h]).collect();
        let mut prefix = vec![0usize; h + 1];
        for r in 1..=h {
            prefix[r] = prefix[r - 1] + sizes[r - 1];
        }
        let mut lead = vec![BigRational::one(); h + 2];
        for q in 2..=h {
            lead[q] = &lead[q - 1] * big_ratio(1, prefix[q - 1]);
        }
        let mut trail = vec![BigRational::one(); h + 2];
        for q in (1..h).rev() {
            trail[q] = &trail[q + 1] * big_ratio(1, n - prefix[q]);
        }
        for q in 1..=h {
            let term = &lead[q] * &trail[q];
            score[(p + q) % h] += term;
        }
    }
    let best = score.iter().max().expect("nonempty cycle").clone();
    let mut centers: Vec<usize> = (0..h).filter(|&i| score[i] == best).map(|i| cycle[i]).collect();
    centers.sort_unstable();
    Ok(centers)
}

/// Nodes minimizing the eccentricity (largest hop distance to any node).
pub fn jordan_center(g: &Graph) -> Result<Vec<usize>> {
    ensure_connected(g)?;
    let ecc: Vec<usize> = (0..g.node_count())
        .into_par_iter()
        .map(|v| {
            bfs_distances(g, v)
                .into_iter()
                .map(|d| d.expect("connected"))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let best = *ecc.iter().min().expect("nonempty");
    Ok((0..g.node_count()).filter(|&v| ecc[v] == best).collect())
}

/// Distance weight of one snapshot node: end vertices count half, nodes on
/// short chordless cycles slightly below one (c/(c+1)), everything else one.
pub fn sdc_node_weight(snap: &Snapshot, v: usize) -> BigRational {
    if snap.is_end_vertex(v) {
        return big_ratio(1, 2);
    }
    match minimum_chordless_cycle_size(&snap.graph, v, MIN_CYCLE_CAP) {
        MinCycle::Size(c) => big_ratio(c, c + 1),
        MinCycle::Leaf | MinCycle::Absent => BigRational::one(),
    }
}

/// Weighted distance sums over the snapshot graph; lower is more central.
pub fn sdc_scores(snap: &Snapshot) -> Result<ScoreTable> {
    ensure_connected(&snap.graph)?;
    let n = snap.n();
    let weights: Vec<BigRational> = (0..n).map(|u| sdc_node_weight(snap, u)).collect();
    let scores: Vec<BigRational> = (0..n)
        .into_par_iter()
        .map(|v| {
            let dist = bfs_distances(&snap.graph, v);
            let mut sum = BigRational::zero();
            for u in 0..n {
                let d = dist[u].expect("connected");
                if d > 0 {
                    sum += &weights[u] * BigRational::from_integer(BigInt::from(d));
                }
            }
            sum
        })
        .collect();
    ScoreTable::new(Scores::Exact(scores), ExtremumKind::Min)
}

/// Iteration cap for the stationary-distribution power method.
pub const STATIONARY_MAX_ITERS: usize = 1_000_000;

/// Stationary distribution of the lazy random walk whose edge rates are the
/// incoming subtree sizes scaled by c(n-1), with the leftover mass on the
/// self-loop. Proportional to the tree's order counts.
pub fn rumor_markov_stationary(g: &Graph, c: f64) -> Result<ScoreTable> {
    if !(c > 1.0) {
        return Err(Error::InvalidParam(format!(
            "stationary walk: need c > 1, got {c}"
        )));
    }
    let n = g.node_count();
    if n == 1 {
        return ScoreTable::new(Scores::LogReal(vec![1.0]), ExtremumKind::Max);
    }
    let field = MessageField::from_tree(g)?;
    let scale = c * (n as f64 - 1.0);
    // rate[i][idx]: probability of hopping from i to its idx-th neighbor.
    let rates: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            g.neighbors(i)
                .iter()
                .map(|&j| field.get(j, i).expect("neighbor message") as f64 / scale)
                .collect()
        })
        .collect();
    let self_mass: Vec<f64> = (0..n)
        .map(|i| 1.0 - rates[i].iter().sum::<f64>())
        .collect();
    debug_assert!(self_mass.iter().all(|&m| m > 0.0));
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..STATIONARY_MAX_ITERS {
        let mut next = vec![0.0f64; n];
        for i in 0..n {
            next[i] += pi[i] * self_mass[i];
            for (idx, &j) in g.neighbors(i).iter().enumerate() {
                next[j] += pi[i] * rates[i][idx];
            }
        }
        let total: f64 = next.iter().sum();
        for x in &mut next {
            *x /= total;
        }
        let step: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if step < 1e-13 {
            break;
        }
    }
    ScoreTable::new(Scores::LogReal(pi), ExtremumKind::Max)
}
