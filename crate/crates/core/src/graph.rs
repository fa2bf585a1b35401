//! Undirected simple graphs with dense node ids, plus the generator families
//! and tree/unicyclic helpers the rest of the crate builds on.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::rng_from;
use crate::{Error, Result};

/// Undirected simple graph. Adjacency lists are sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// Build from an explicit edge list. Rejects out-of-range endpoints,
    /// self-loops, and duplicate edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(Error::NodeOutOfRange(u));
            }
            if v >= n {
                return Err(Error::NodeOutOfRange(v));
            }
            if u == v {
                return Err(Error::InvalidParam(format!("self-loop at node {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidParam(format!(
                    "duplicate edge {u}-{}",
                    w[0]
                )));
            }
        }
        Ok(Graph {
            adj,
            m: edges.len(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as (u, v) with u < v, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.adj.len() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        bfs_distances(self, 0).iter().all(|d| d.is_some())
    }

    pub fn is_tree(&self) -> bool {
        self.node_count() > 0 && self.m == self.node_count() - 1 && self.is_connected()
    }
}

/// Graph loaded from an external edge list, with the id compaction sidecar.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Dense id -> original id, in first-appearance order.
    pub external_ids: Vec<u64>,
    pub index_of: HashMap<u64, usize>,
}

impl LoadedGraph {
    fn from_records(records: Vec<(u64, u64, usize)>) -> Result<LoadedGraph> {
        let mut index_of: HashMap<u64, usize> = HashMap::new();
        let mut external_ids: Vec<u64> = Vec::new();
        let mut dense: Vec<(usize, usize, usize)> = Vec::with_capacity(records.len());
        for (a, b, line) in records {
            let mut id = |x: u64| -> usize {
                *index_of.entry(x).or_insert_with(|| {
                    external_ids.push(x);
                    external_ids.len() - 1
                })
            };
            let (ia, ib) = (id(a), id(b));
            dense.push((ia.min(ib), ia.max(ib), line));
        }
        let mut sorted = dense.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::DuplicateEdge {
                line: w[1].2,
                u: external_ids[w[1].0],
                v: external_ids[w[1].1],
            });
        }
        let edges: Vec<(usize, usize)> = dense.iter().map(|&(a, b, _)| (a, b)).collect();
        let graph = Graph::from_edges(external_ids.len(), &edges)?;
        Ok(LoadedGraph {
            graph,
            external_ids,
            index_of,
        })
    }
}

fn parse_edge_line(line: &str, lineno: usize) -> Result<Option<(u64, u64)>> {
    let s = line.trim();
    if s.is_empty() || s.starts_with('#') {
        return Ok(None);
    }
    let mut it = s.split_whitespace();
    let a = it.next();
    let b = it.next();
    let extra = it.next();
    match (a, b, extra) {
        (Some(a), Some(b), None) => {
            let pa: u64 = a.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad node id {a:?}"),
            })?;
            let pb: u64 = b.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad node id {b:?}"),
            })?;
            if pa == pb {
                return Err(Error::SelfLoop {
                    line: lineno,
                    node: pa,
                });
            }
            Ok(Some((pa, pb)))
        }
        _ => Err(Error::Parse {
            line: lineno,
            msg: "expected two whitespace-separated node ids".to_string(),
        }),
    }
}

/// Parse an edge list from text: one `u v` pair per line, `#` comments and
/// blank lines ignored. Duplicate edges and self-loops are hard errors with
/// the offending line number.
pub fn from_edge_list_text(text: &str) -> Result<LoadedGraph> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some((a, b)) = parse_edge_line(line, i + 1)? {
            records.push((a, b, i + 1));
        }
    }
    LoadedGraph::from_records(records)
}

/// Streaming variant of [`from_edge_list_text`] for large files.
pub fn from_edge_list_path(path: &Path) -> Result<LoadedGraph> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some((a, b)) = parse_edge_line(&line, i + 1)? {
            records.push((a, b, i + 1));
        }
    }
    LoadedGraph::from_records(records)
}

/// BFS distances from `source`; `None` marks unreachable nodes.
pub fn bfs_distances(g: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    dist[source] = Some(0);
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in g.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// A tree rooted at a chosen node: parents, children, subtree sizes, and a
/// BFS order usable for leaf-to-root sweeps (iterate it in reverse).
#[derive(Clone, Debug)]
pub struct RootedView {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub subtree_size: Vec<usize>,
    pub bfs_order: Vec<usize>,
}

/// Root a tree at `root`. Errors if the graph is not a tree.
pub fn rooted_view(g: &Graph, root: usize) -> Result<RootedView> {
    let n = g.node_count();
    if root >= n {
        return Err(Error::NodeOutOfRange(root));
    }
    if g.edge_count() != n - 1 {
        return Err(Error::NotATree);
    }
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                children[u].push(v);
                queue.push_back(v);
            }
        }
    }
    if order.len() != n {
        return Err(Error::NotATree);
    }
    let mut subtree_size = vec![1usize; n];
    for &u in order.iter().rev() {
        if let Some(p) = parent[u] {
            subtree_size[p] += subtree_size[u];
        }
    }
    Ok(RootedView {
        root,
        parent,
        children,
        subtree_size,
        bfs_order: order,
    })
}

/// Subgraph induced on a node set. Kept nodes are relabeled densely in
/// ascending original-id order. Returns the new graph and the old->new id
/// map (usize::MAX marks dropped nodes).
pub fn induced_subgraph(g: &Graph, nodes: &[usize]) -> Result<(Graph, Vec<usize>)> {
    let mut sorted: Vec<usize> = nodes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != nodes.len() {
        return Err(Error::InvalidParam("induced subgraph: repeated node".into()));
    }
    let mut map = vec![usize::MAX; g.node_count()];
    for (i, &v) in sorted.iter().enumerate() {
        if v >= g.node_count() {
            return Err(Error::NodeOutOfRange(v));
        }
        map[v] = i;
    }
    let mut edges = Vec::new();
    for &v in &sorted {
        for &u in g.neighbors(v) {
            if v < u && map[u] != usize::MAX {
                edges.push((map[v], map[u]));
            }
        }
    }
    Ok((Graph::from_edges(sorted.len(), &edges)?, map))
}

/// Contract a nonempty node set into a single node. Parallel edges arising
/// from the merge are coalesced and self-loops dropped; everything else keeps
/// its relative id order. Returns the new graph and the old->new id map.
pub fn vertex_contraction(g: &Graph, nodes: &[usize]) -> Result<(Graph, Vec<usize>)> {
    let n = g.node_count();
    if nodes.is_empty() {
        return Err(Error::InvalidParam("empty contraction set".into()));
    }
    let mut in_set = vec![false; n];
    for &v in nodes {
        if v >= n {
            return Err(Error::NodeOutOfRange(v));
        }
        in_set[v] = true;
    }
    let rep = *nodes.iter().min().unwrap();
    let mut map = vec![usize::MAX; n];
    let mut next = 0usize;
    for v in 0..n {
        if in_set[v] && v != rep {
            continue;
        }
        map[v] = next;
        next += 1;
    }
    for v in 0..n {
        if in_set[v] {
            map[v] = map[rep];
        }
    }
    let mut edge_set: HashSet<(usize, usize)> = HashSet::new();
    for (u, v) in g.edges() {
        let (a, b) = (map[u], map[v]);
        if a != b {
            edge_set.insert((a.min(b), a.max(b)));
        }
    }
    let mut edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
    edges.sort_unstable();
    Ok((Graph::from_edges(next, &edges)?, map))
}

/// Outcome of a bounded minimum-cycle probe at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinCycle {
    /// The vertex has degree 1.
    Leaf,
    /// Smallest chordless cycle through the vertex has this many nodes.
    Size(usize),
    /// No cycle through the vertex within the cap.
    Absent,
}

/// Default search cap for [`minimum_chordless_cycle_size`].
pub const MIN_CYCLE_CAP: usize = 20;

/// Size of the smallest chordless cycle through `v`, bounded by `cap`.
///
/// The smallest cycle through a fixed vertex is automatically chordless (a
/// chord would split off a strictly shorter cycle still through the vertex),
/// so this probes shortest cycles: remove `v`, then BFS between neighbor
/// pairs with depth capped at `cap - 2`.
pub fn minimum_chordless_cycle_size(g: &Graph, v: usize, cap: usize) -> MinCycle {
    match g.degree(v) {
        0 => return MinCycle::Absent,
        1 => return MinCycle::Leaf,
        _ => {}
    }
    let nbrs = g.neighbors(v);
    let mut best: Option<usize> = None;
    let limit = cap.saturating_sub(2);
    for (i, &a) in nbrs.iter().enumerate() {
        // BFS from a in G \ {v}, depth-limited.
        let mut dist = vec![usize::MAX; g.node_count()];
        dist[a] = 0;
        let mut queue = std::collections::VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if dist[u] >= limit {
                continue;
            }
            for &w in g.neighbors(u) {
                if w != v && dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        for &b in &nbrs[i + 1..] {
            if dist[b] != usize::MAX {
                let len = dist[b] + 2;
                if len <= cap && best.map_or(true, |c| len < c) {
                    best = Some(len);
                }
            }
        }
        if best == Some(3) {
            break;
        }
    }
    match best {
        Some(c) => MinCycle::Size(c),
        None => MinCycle::Absent,
    }
}

/// The unique cycle of a connected unicyclic graph, in walk order starting
/// from its lowest-id vertex toward that vertex's lower-id cycle neighbor.
pub fn find_unique_cycle(g: &Graph) -> Result<Vec<usize>> {
    let n = g.node_count();
    if g.edge_count() != n || !g.is_connected() {
        return Err(Error::NotUnicyclic);
    }
    // Peel leaves until only the cycle remains.
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    while let Some(v) = stack.pop() {
        removed[v] = true;
        for &u in g.neighbors(v) {
            if !removed[u] {
                deg[u] -= 1;
                if deg[u] == 1 {
                    stack.push(u);
                }
            }
        }
    }
    let start = (0..n).find(|&v| !removed[v]).ok_or(Error::NotUnicyclic)?;
    let mut cycle = vec![start];
    let mut prev = start;
    let mut cur = *g
        .neighbors(start)
        .iter()
        .find(|&&u| !removed[u])
        .ok_or(Error::NotUnicyclic)?;
    while cur != start {
        cycle.push(cur);
        let next = *g
            .neighbors(cur)
            .iter()
            .find(|&&u| !removed[u] && u != prev)
            .ok_or(Error::NotUnicyclic)?;
        prev = cur;
        cur = next;
    }
    Ok(cycle)
}

/// One spanning tree of a unicyclic graph.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    /// Deleted cycle edge, as (min, max).
    pub removed_edge: (usize, usize),
    pub tree: Graph,
}

/// All spanning trees of a connected unicyclic graph: one per cycle edge,
/// ordered by the deleted edge's (min, max) pair ascending.
pub fn spanning_trees_unicyclic(g: &Graph) -> Result<Vec<SpanningTree>> {
    let cycle = find_unique_cycle(g)?;
    let h = cycle.len();
    let mut cycle_edges: Vec<(usize, usize)> = (0..h)
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % h]);
            (a.min(b), a.max(b))
        })
        .collect();
    cycle_edges.sort_unstable();
    let all = g.edges();
    let mut out = Vec::with_capacity(h);
    for &e in &cycle_edges {
        let kept: Vec<(usize, usize)> = all.iter().copied().filter(|&f| f != e).collect();
        out.push(SpanningTree {
            removed_edge: e,
            tree: Graph::from_edges(g.node_count(), &kept)?,
        });
    }
    Ok(out)
}

/// Deterministic graph families. All randomized families take explicit seeds
/// and are bit-reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Path on n nodes: 0-1-...-(n-1).
    Line { n: usize },
    /// Ball of the infinite d-regular tree grown in BFS order to n nodes:
    /// the root takes d children, every other internal node d-1.
    RegularTree { d: usize, n: usize },
    /// Path 0..2t-1 with k_ends pendant leaves attached at node 2t-1.
    Broom { t: usize, k_ends: usize },
    /// Hub 0 with k leaves.
    Star { k: usize },
    /// w x h four-neighbor lattice, row-major ids.
    Grid { w: usize, h: usize },
    /// Ring 0..n-1 plus chords i -> i+s for each shift s.
    Circulant { n: usize, s: Vec<usize> },
    /// Uniform-ish d-regular graph by stub pairing with whole-matching
    /// rejection of loops and parallel edges.
    RandomRegular { n: usize, d: usize, seed: u64 },
    /// Preferential attachment: complete seed graph on m+1 nodes, each new
    /// node attaches to m distinct degree-weighted targets.
    BarabasiAlbert { n: usize, m: usize, seed: u64 },
    /// Frontier-grown random tree: each dequeued node draws its child count
    /// uniformly from 0..=d_max (so degrees stay <= d_max+1); growth truncates
    /// at exactly n nodes, and a die-out before n restarts the draw stream.
    RandomBoundedDegreeTree { n: usize, d_max: usize, seed: u64 },
}

/// Build a graph from a family spec.
pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    match *spec {
        GeneratorSpec::Line { n } => {
            if n == 0 {
                return Err(Error::InvalidParam("line: n must be >= 1".into()));
            }
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            Graph::from_edges(n, &edges)
        }
        GeneratorSpec::RegularTree { d, n } => {
            if d < 2 || n == 0 {
                return Err(Error::InvalidParam("regular_tree: need d >= 2, n >= 1".into()));
            }
            let mut edges = Vec::with_capacity(n.saturating_sub(1));
            let mut next = 1usize;
            let mut queue = std::collections::VecDeque::from([0usize]);
            while next < n {
                let u = queue.pop_front().expect("frontier never empties before n");
                let fanout = if u == 0 { d } else { d - 1 };
                for _ in 0..fanout {
                    if next >= n {
                        break;
                    }
                    edges.push((u, next));
                    queue.push_back(next);
                    next += 1;
                }
            }
            Graph::from_edges(n, &edges)
        }
        GeneratorSpec::Broom { t, k_ends } => {
            if t == 0 || k_ends == 0 {
                return Err(Error::InvalidParam("broom: need t >= 1, k_ends >= 1".into()));
            }
            let line = 2 * t;
            let n = line + k_ends;
            let mut edges: Vec<_> = (1..line).map(|i| (i - 1, i)).collect();
            for j in 0..k_ends {
                edges.push((line - 1, line + j));
            }
            Graph::from_edges(n, &edges)
        }
        GeneratorSpec::Star { k } => {
            let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
            Graph::from_edges(k + 1, &edges)
        }
        GeneratorSpec::Grid { w, h } => {
            if w == 0 || h == 0 {
                return Err(Error::InvalidParam("grid: need w, h >= 1".into()));
            }
            let mut edges = Vec::new();
            for r in 0..h {
                for c in 0..w {
                    let id = r * w + c;
                    if c + 1 < w {
                        edges.push((id, id + 1));
                    }
                    if r + 1 < h {
                        edges.push((id, id + w));
                    }
                }
            }
            Graph::from_edges(w * h, &edges)
        }
        GeneratorSpec::Circulant { n, ref s } => {
            if n < 3 {
                return Err(Error::InvalidParam("circulant: need n >= 3".into()));
            }
            let mut edge_set = HashSet::new();
            for &shift in s {
                if shift == 0 || shift > n / 2 {
                    return Err(Error::InvalidParam(format!(
                        "circulant: shift {shift} outside 1..={}",
                        n / 2
                    )));
                }
                for i in 0..n {
                    let j = (i + shift) % n;
                    edge_set.insert((i.min(j), i.max(j)));
                }
            }
            let mut edges: Vec<_> = edge_set.into_iter().collect();
            edges.sort_unstable();
            Graph::from_edges(n, &edges)
        }
        GeneratorSpec::RandomRegular { n, d, seed } => random_regular(n, d, seed),
        GeneratorSpec::BarabasiAlbert { n, m, seed } => barabasi_albert(n, m, seed),
        GeneratorSpec::RandomBoundedDegreeTree { n, d_max, seed } => {
            random_bounded_degree_tree(n, d_max, seed)
        }
    }
}

fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n * d % 2 != 0 || d >= n || d == 0 {
        return Err(Error::InvalidParam(
            "random_regular: need 0 < d < n and n*d even".into(),
        ));
    }
    let mut rng = rng_from(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    // Whole-matching rejection keeps the sample close to uniform.
    for _ in 0..100_000 {
        stubs.shuffle(&mut rng);
        let mut edges: Vec<(usize, usize)> = stubs
            .chunks_exact(2)
            .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
            .collect();
        edges.sort_unstable();
        let simple = edges.iter().all(|&(a, b)| a != b)
            && edges.windows(2).all(|w| w[0] != w[1]);
        if simple {
            return Graph::from_edges(n, &edges);
        }
    }
    Err(Error::InvalidParam(
        "random_regular: rejection cap exhausted".into(),
    ))
}

fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || m + 1 > n {
        return Err(Error::InvalidParam(
            "barabasi_albert: need 1 <= m and m+1 <= n".into(),
        ));
    }
    let mut rng = rng_from(seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut endpoints: Vec<usize> = Vec::new();
    for u in 0..=m {
        for v in u + 1..=m {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    for v in m + 1..n {
        let mut targets = HashSet::new();
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            targets.insert(t);
        }
        let mut ts: Vec<usize> = targets.into_iter().collect();
        ts.sort_unstable();
        for t in ts {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Graph::from_edges(n, &edges)
}

fn random_bounded_degree_tree(n: usize, d_max: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParam("tree: n must be >= 1".into()));
    }
    if n > 1 && d_max == 0 {
        return Err(Error::InvalidParam("tree: d_max must be >= 1 for n > 1".into()));
    }
    let mut rng = rng_from(seed);
    for _ in 0..100_000 {
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n - 1);
        let mut next = 1usize;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while next < n {
            let Some(u) = queue.pop_front() else { break };
            let fanout = rng.gen_range(0..=d_max);
            for _ in 0..fanout {
                if next >= n {
                    break;
                }
                edges.push((u, next));
                queue.push_back(next);
                next += 1;
            }
        }
        if next == n {
            return Graph::from_edges(n, &edges);
        }
    }
    Err(Error::InvalidParam(
        "tree: growth died out before reaching n in every restart".into(),
    ))
}

/// Decode a Prüfer sequence (entries in 0..n) into the labeled tree on n
/// nodes; n = seq.len() + 2.
pub fn tree_from_pruefer(seq: &[usize]) -> Result<Graph> {
    let n = seq.len() + 2;
    let mut deg = vec![1usize; n];
    for &s in seq {
        if s >= n {
            return Err(Error::NodeOutOfRange(s));
        }
        deg[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&v| deg[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &s in seq {
        let std::cmp::Reverse(leaf) = leaves.pop().expect("sequence leaves a leaf available");
        edges.push((leaf.min(s), leaf.max(s)));
        deg[leaf] -= 1;
        deg[s] -= 1;
        if deg[s] == 1 {
            leaves.push(std::cmp::Reverse(s));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().unwrap();
    let std::cmp::Reverse(b) = leaves.pop().unwrap();
    edges.push((a.min(b), a.max(b)));
    Graph::from_edges(n, &edges)
}

/// Uniform random labeled tree on n nodes (via a random Prüfer sequence).
pub fn random_labeled_tree(n: usize, seed: u64) -> Graph {
    assert!(n >= 1);
    if n == 1 {
        return Graph::from_edges(1, &[]).unwrap();
    }
    if n == 2 {
        return Graph::from_edges(2, &[(0, 1)]).unwrap();
    }
    let mut rng = rng_from(seed);
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    tree_from_pruefer(&seq).unwrap()
}

/// All free trees on n nodes, one representative per isomorphism class,
/// grown by leaf attachment and deduplicated by a canonical encoding rooted
/// at the centroid. Counts follow 1, 1, 1, 2, 3, 6, 11, 23, 47, ...
pub fn all_free_trees(n: usize) -> Vec<Graph> {
    assert!(n >= 1);
    fn canonical(g: &Graph) -> String {
        fn encode(g: &Graph, root: usize) -> String {
            let view = rooted_view(g, root).unwrap();
            fn enc(view: &RootedView, u: usize) -> String {
                let mut parts: Vec<String> =
                    view.children[u].iter().map(|&c| enc(view, c)).collect();
                parts.sort();
                format!("({})", parts.concat())
            }
            enc(&view, root)
        }
        let view = rooted_view(g, 0).unwrap();
        let n = g.node_count();
        let mut best: Option<String> = None;
        for v in 0..n {
            let mut max_branch = n - view.subtree_size[v];
            for &c in &view.children[v] {
                max_branch = max_branch.max(view.subtree_size[c]);
            }
            if max_branch <= n / 2 {
                let e = encode(g, v);
                if best.as_ref().map_or(true, |b| e < *b) {
                    best = Some(e);
                }
            }
        }
        best.unwrap()
    }
    let mut current = vec![Graph::from_edges(1, &[]).unwrap()];
    for size in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &current {
            for v in 0..g.node_count() {
                let mut edges = g.edges();
                edges.push((v, size - 1));
                let h = Graph::from_edges(size, &edges).unwrap();
                if seen.insert(canonical(&h)) {
                    next.push(h);
                }
            }
        }
        current = next;
    }
    current
}
