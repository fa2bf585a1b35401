//! Exact source likelihoods P(G_n | v).
//!
//! The brute-force evaluator sums `spreading_order_probability` over every
//! enumerated order and works on any snapshot within the enumeration caps.
//! The structured evaluators (single designated vertex, line, broom,
//! unicyclic) factor the same sum through order-position counts: on a tree
//! every step infects through exactly one edge, so an order's probability
//! depends only on where the irregular vertex lands in it. Counting orders
//! per landing position and multiplying by the per-position probability
//! reproduces the brute-force sum at polynomial cost.

use std::collections::VecDeque;

use num::{BigInt, BigRational, BigUint, One, Signed, Zero};

use crate::graph::{
    find_unique_cycle, induced_subgraph, rooted_view, vertex_contraction, Graph,
};
use crate::numeric::{big_ratio, binomial, factorial, rational_to_f64};
use crate::spread::{
    enumerate_spreading_orders_with_caps, spreading_order_probability, Snapshot, ENUM_NODE_CAP,
    ENUM_ORDER_CAP,
};
use crate::{Error, Result};

/// Per-node exact likelihoods with the induced posterior (uniform prior).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LikelihoodTable {
    pub values: Vec<BigRational>,
    pub posterior: Vec<BigRational>,
    /// Ascending node ids attaining the maximum value. Ties stay a set.
    pub argmax: Vec<usize>,
}

impl LikelihoodTable {
    pub fn from_values(values: Vec<BigRational>) -> Result<LikelihoodTable> {
        if values.is_empty() {
            return Err(Error::InvalidParam("likelihood table: no entries".into()));
        }
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidParam("likelihood table: negative entry".into()));
        }
        let total: BigRational = values.iter().fold(BigRational::zero(), |a, b| a + b);
        if total.is_zero() {
            return Err(Error::InvalidParam("likelihood table: all entries zero".into()));
        }
        let posterior: Vec<BigRational> = values.iter().map(|v| v / &total).collect();
        let best = values.iter().max().expect("nonempty").clone();
        let argmax: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == best)
            .map(|(i, _)| i)
            .collect();
        Ok(LikelihoodTable {
            values,
            posterior,
            argmax,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,numerator,denominator,posterior\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{:.6}\n",
                i,
                v.numer(),
                v.denom(),
                rational_to_f64(&self.posterior[i])
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                serde_json::json!({
                    "node": i,
                    "numerator": v.numer().to_string(),
                    "denominator": v.denom().to_string(),
                    "posterior": format!("{:.6}", rational_to_f64(&self.posterior[i])),
                })
            })
            .collect();
        let doc = serde_json::json!({ "likelihood": rows, "argmax": self.argmax });
        serde_json::to_string_pretty(&doc).expect("static shape")
    }
}

/// Brute-force likelihood: for each node, the sum of exact order
/// probabilities over all spreading orders rooted there.
pub fn exact_source_likelihood(snap: &Snapshot) -> Result<LikelihoodTable> {
    exact_source_likelihood_with_caps(snap, ENUM_NODE_CAP, ENUM_ORDER_CAP)
}

pub fn exact_source_likelihood_with_caps(
    snap: &Snapshot,
    node_cap: usize,
    order_cap: usize,
) -> Result<LikelihoodTable> {
    let mut values = Vec::with_capacity(snap.n());
    for v in 0..snap.n() {
        let orders = enumerate_spreading_orders_with_caps(snap, v, node_cap, order_cap)?;
        let mut sum = BigRational::zero();
        for order in &orders {
            sum += spreading_order_probability(snap, order)?;
        }
        values.push(sum);
    }
    LikelihoodTable::from_values(values)
}

/// z(j) = (j-1)(d-2): the boundary-weight increment after j infections on a
/// d-regular tree.
fn z(d: usize, j: usize) -> usize {
    (j - 1) * (d - 2)
}

/// Probability of one spreading order on an n-node tree snapshot whose nodes
/// all have underlying degree `d` except a single designated vertex of
/// underlying degree `delta`, infected at position `k`.
///
/// Before the designated vertex joins, j infected nodes expose boundary
/// weight d + z(j); afterwards the boundary is z(j) + delta.
pub fn irregular_position_probability(
    d: usize,
    delta: usize,
    n: usize,
    k: usize,
) -> Result<BigRational> {
    if d < 2 || delta == 0 {
        return Err(Error::InvalidParam(
            "position probability: need d >= 2 and delta >= 1".into(),
        ));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParam(format!(
            "position probability: k={k} outside 1..={n}"
        )));
    }
    let mut p = BigRational::one();
    for j in 1..k {
        p *= big_ratio(1, d + z(d, j));
    }
    for j in k..n {
        p *= big_ratio(1, z(d, j) + delta);
    }
    Ok(p)
}

/// Per-order probability when the designated vertex is an end vertex
/// (underlying degree 1) infected at position k >= 2.
pub fn end_vertex_position_probability(d: usize, n: usize, k: usize) -> Result<BigRational> {
    if d < 3 {
        return Err(Error::InvalidParam(
            "end vertex position probability: need d >= 3".into(),
        ));
    }
    if k < 2 || k > n {
        return Err(Error::InvalidParam(format!(
            "end vertex position probability: k={k} outside 2..={n}"
        )));
    }
    irregular_position_probability(d, 1, n, k)
}

/// Number of spreading orders of the tree `g` starting from `root`:
/// (n-1)! divided by the product of subtree sizes below the root.
pub fn tree_order_count(g: &Graph, root: usize) -> Result<BigUint> {
    let view = rooted_view(g, root)?;
    let mut den = BigUint::one();
    for v in 0..g.node_count() {
        if v != root {
            den *= BigUint::from(view.subtree_size[v]);
        }
    }
    let num = factorial(g.node_count().saturating_sub(1));
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// Node-count cap for subtree-enumeration-based counting.
pub const POSITION_NODE_CAP: usize = 18;
/// Cap on enumerated subtrees per counting call.
pub const POSITION_SUBTREE_CAP: usize = 1_000_000;

/// Visit every connected `size`-subset of `g` containing `root` exactly once.
fn connected_subsets<F>(g: &Graph, root: usize, size: usize, cap: usize, visit: &mut F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    fn rec<F>(
        g: &Graph,
        size: usize,
        cap: usize,
        chosen: &mut Vec<usize>,
        in_chosen: &mut [bool],
        banned: &mut [bool],
        mut cands: Vec<usize>,
        visit: &mut F,
        count: &mut usize,
    ) -> Result<()>
    where
        F: FnMut(&[usize]) -> Result<()>,
    {
        if chosen.len() == size {
            *count += 1;
            if *count > cap {
                return Err(Error::CapExceeded {
                    what: "subtree enumeration",
                    limit: cap,
                });
            }
            return visit(chosen);
        }
        let mut locally_banned = Vec::new();
        let mut res = Ok(());
        while let Some(u) = cands.pop() {
            chosen.push(u);
            in_chosen[u] = true;
            let mut next = cands.clone();
            for &w in g.neighbors(u) {
                if !in_chosen[w] && !banned[w] && !next.contains(&w) {
                    next.push(w);
                }
            }
            res = rec(g, size, cap, chosen, in_chosen, banned, next, visit, count);
            chosen.pop();
            in_chosen[u] = false;
            if res.is_err() {
                break;
            }
            // Excluding u here forbids it in every later branch of this frame,
            // which is what makes each subset appear exactly once.
            banned[u] = true;
            locally_banned.push(u);
        }
        for u in locally_banned {
            banned[u] = false;
        }
        res
    }

    if size == 0 || size > g.node_count() {
        return Ok(());
    }
    let mut chosen = vec![root];
    let mut in_chosen = vec![false; g.node_count()];
    in_chosen[root] = true;
    let mut banned = vec![false; g.node_count()];
    let cands: Vec<usize> = g.neighbors(root).to_vec();
    let mut count = 0usize;
    rec(
        g,
        size,
        cap,
        &mut chosen,
        &mut in_chosen,
        &mut banned,
        cands,
        visit,
        &mut count,
    )
}

/// Sum over connected supersets S' of `core` (inside `allowed`, with `extra`
/// additional nodes) of: orders of S' from `v`, times orders of the graph
/// after contracting S' plus the designated vertex `x`.
///
/// This is the shared counting step: S' is the exact infected set right
/// before x joins, and contracting S' with x leaves the count of ways to
/// finish the spread.
fn core_extension_counts(
    g: &Graph,
    allowed: &[usize],
    core: &[usize],
    v: usize,
    x: usize,
    extra: usize,
    subtree_cap: usize,
) -> Result<BigUint> {
    let (ga, map_a) = induced_subgraph(g, allowed)?;
    let mut allowed_sorted = allowed.to_vec();
    allowed_sorted.sort_unstable();
    let core_a: Vec<usize> = core.iter().map(|&u| map_a[u]).collect();
    let (gc, map_c) = vertex_contraction(&ga, &core_a)?;
    let v_star = map_c[core_a[0]];
    let mut inv_c = vec![usize::MAX; gc.node_count()];
    for u in 0..ga.node_count() {
        if map_c[u] != v_star {
            inv_c[map_c[u]] = u;
        }
    }
    let mut total = BigUint::zero();
    connected_subsets(&gc, v_star, extra + 1, subtree_cap, &mut |subset| {
        let mut s_prime = core.to_vec();
        for &c in subset {
            if c != v_star {
                s_prime.push(allowed_sorted[inv_c[c]]);
            }
        }
        let (gs, map_s) = induced_subgraph(g, &s_prime)?;
        let before = tree_order_count(&gs, map_s[v])?;
        s_prime.push(x);
        let (gq, map_q) = vertex_contraction(g, &s_prime)?;
        let after = tree_order_count(&gq, map_q[x])?;
        total += before * after;
        Ok(())
    })?;
    Ok(total)
}

/// Count of spreading orders of tree `g` from `v` in which `x` lands at
/// position `k`. Infeasible k yields zero.
fn designated_position_count(
    g: &Graph,
    v: usize,
    x: usize,
    k: usize,
    subtree_cap: usize,
) -> Result<BigUint> {
    let n = g.node_count();
    if v == x {
        return if k == 1 {
            tree_order_count(g, v)
        } else {
            Ok(BigUint::zero())
        };
    }
    if k < 2 || k > n {
        return Ok(BigUint::zero());
    }
    let view = rooted_view(g, v)?;
    let mut path = vec![x];
    while *path.last().unwrap() != v {
        path.push(view.parent[*path.last().unwrap()].expect("walking toward the root"));
    }
    let d_vx = path.len() - 1;
    if k - 1 < d_vx {
        return Ok(BigUint::zero());
    }
    // Nodes behind x (its own subtree when rooted at v) cannot be infected
    // before x is.
    let mut behind = vec![false; n];
    behind[x] = true;
    let mut stack = vec![x];
    while let Some(u) = stack.pop() {
        for &c in &view.children[u] {
            behind[c] = true;
            stack.push(c);
        }
    }
    let allowed: Vec<usize> = (0..n).filter(|&u| !behind[u]).collect();
    if k - 1 > allowed.len() {
        return Ok(BigUint::zero());
    }
    core_extension_counts(g, &allowed, &path[1..], v, x, (k - 1) - d_vx, subtree_cap)
}

/// Public counting entry point: orders from `v` with the end vertex `v_e` at
/// position `k`.
pub fn position_count(snap: &Snapshot, v: usize, v_e: usize, k: usize) -> Result<BigUint> {
    let n = snap.n();
    if v >= n {
        return Err(Error::NodeOutOfRange(v));
    }
    if v_e >= n {
        return Err(Error::NodeOutOfRange(v_e));
    }
    if !snap.is_end_vertex(v_e) {
        return Err(Error::InvalidParam(format!(
            "position count: node {v_e} is not an end vertex"
        )));
    }
    if !snap.graph.is_tree() {
        return Err(Error::NotATree);
    }
    if n > POSITION_NODE_CAP {
        return Err(Error::CapExceeded {
            what: "position count nodes",
            limit: POSITION_NODE_CAP,
        });
    }
    designated_position_count(&snap.graph, v, v_e, k, POSITION_SUBTREE_CAP)
}

/// Likelihood table for a tree snapshot over an underlying graph where every
/// node has degree `d` except `x`, whose underlying degree is `delta`.
/// Decomposes each source's likelihood by the position of `x`.
pub fn single_irregular_tree_likelihood(
    g: &Graph,
    x: usize,
    d: usize,
    delta: usize,
) -> Result<LikelihoodTable> {
    let n = g.node_count();
    if x >= n {
        return Err(Error::NodeOutOfRange(x));
    }
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    if n > POSITION_NODE_CAP {
        return Err(Error::CapExceeded {
            what: "position-decomposed likelihood nodes",
            limit: POSITION_NODE_CAP,
        });
    }
    for v in 0..n {
        let bound = if v == x { delta } else { d };
        if g.degree(v) > bound {
            return Err(Error::InvalidParam(format!(
                "node {v} has snapshot degree {} above its underlying degree {bound}",
                g.degree(v)
            )));
        }
    }
    let mut values = Vec::with_capacity(n);
    for v in 0..n {
        let mut sum = BigRational::zero();
        for k in 1..=n {
            let m = designated_position_count(g, v, x, k, POSITION_SUBTREE_CAP)?;
            if !m.is_zero() {
                sum += BigRational::from_integer(BigInt::from(m))
                    * irregular_position_probability(d, delta, n, k)?;
            }
        }
        values.push(sum);
    }
    LikelihoodTable::from_values(values)
}

/// Likelihood along a line snapshot of n nodes over a d-regular underlying
/// graph, with the end vertex at the last position. Entry i (0-based) is the
/// source at position i+1; the closed form sums binomial position counts.
pub fn line_likelihood(d: usize, n: usize) -> Result<LikelihoodTable> {
    if d < 3 || n < 2 {
        return Err(Error::InvalidParam("line likelihood: need d >= 3, n >= 2".into()));
    }
    let mut values = Vec::with_capacity(n);
    for p in 1..=n {
        if p == n {
            // Source is the end vertex itself; its single order has the
            // designated vertex first.
            values.push(irregular_position_probability(d, 1, n, 1)?);
            continue;
        }
        let mut sum = BigRational::zero();
        for k in (n - p + 1)..=n {
            let m = binomial(k - 2, k + p - 1 - n);
            if !m.is_zero() {
                sum += BigRational::from_integer(BigInt::from(m))
                    * irregular_position_probability(d, 1, n, k)?;
            }
        }
        values.push(sum);
    }
    LikelihoodTable::from_values(values)
}

/// Likelihood on a broom: a line of 2t nodes with `k_ends` end vertices
/// pendant on the far line end, over a d-regular underlying graph.
/// Entries 0..2t-1 are line positions 1..2t; entries 2t.. are the pendants
/// (all symmetric). Evaluated by a forward pass over infected shapes
/// (line segment [lo, hi], e pendants), each carrying its exact probability
/// mass; on this graph the shape determines the boundary weight
/// (d-2)(hi-lo+1) - e + 2.
pub fn broom_likelihood(d: usize, t: usize, k_ends: usize) -> Result<LikelihoodTable> {
    if d < 3 || t == 0 || k_ends == 0 || k_ends > d - 1 {
        return Err(Error::InvalidParam(
            "broom likelihood: need d >= 3, t >= 1, 1 <= k_ends <= d-1".into(),
        ));
    }
    let l = 2 * t;
    let run = |start_lo: usize, start_hi: usize, start_e: usize| -> BigRational {
        let mut dp =
            vec![vec![vec![BigRational::zero(); k_ends + 1]; l + 1]; l + 1];
        dp[start_lo][start_hi][start_e] = BigRational::one();
        let n = l + k_ends;
        let start_total = start_hi - start_lo + 1 + start_e;
        for total in start_total..n {
            for lo in 1..=l {
                for hi in lo..=l {
                    let len = hi - lo + 1;
                    if len > total {
                        continue;
                    }
                    let e = total - len;
                    if e > k_ends || (e > 0 && hi != l) {
                        continue;
                    }
                    if dp[lo][hi][e].is_zero() {
                        continue;
                    }
                    let mass = dp[lo][hi][e].clone();
                    let w = (d - 2) * len + 2 - e;
                    if lo > 1 {
                        let add = &mass * big_ratio(1, w);
                        dp[lo - 1][hi][e] += add;
                    }
                    if hi < l {
                        let add = &mass * big_ratio(1, w);
                        dp[lo][hi + 1][e] += add;
                    }
                    if hi == l && e < k_ends {
                        let add = &mass * big_ratio(k_ends - e, w);
                        dp[lo][hi][e + 1] += add;
                    }
                }
            }
        }
        dp[1][l][k_ends].clone()
    };
    let mut values = Vec::with_capacity(l + k_ends);
    for p in 1..=l {
        values.push(run(p, p, 0));
    }
    // A pendant source infects the line end with probability 1 first.
    let pendant = run(l, l, 1);
    for _ in 0..k_ends {
        values.push(pendant.clone());
    }
    LikelihoodTable::from_values(values)
}

/// Per-order probability on an n-node unicyclic snapshot over a d-regular
/// underlying graph, where the cycle's last vertex lands at position k.
/// That step enters through two edges; afterwards j infected nodes expose
/// boundary weight j(d-2).
pub fn cycle_position_probability(d: usize, n: usize, k: usize) -> Result<BigRational> {
    if d < 3 {
        return Err(Error::InvalidParam(
            "cycle position probability: need d >= 3".into(),
        ));
    }
    if k < 3 || k > n {
        return Err(Error::InvalidParam(format!(
            "cycle position probability: k={k} outside 3..={n}"
        )));
    }
    let mut p = big_ratio(2, 1);
    for j in 1..k {
        p *= big_ratio(1, d + z(d, j));
    }
    for j in k..n {
        p *= big_ratio(1, j * (d - 2));
    }
    Ok(p)
}

/// Likelihood table for a unicyclic snapshot over a d-regular underlying
/// graph (no end vertices). Orders are grouped by which cycle vertex closes
/// the cycle and at which position; counts come from the same
/// core-extension machinery as the tree case.
pub fn pseudo_tree_likelihood(snap: &Snapshot) -> Result<LikelihoodTable> {
    let g = &snap.graph;
    let n = snap.n();
    if g.edge_count() != n {
        return Err(Error::NotUnicyclic);
    }
    let d = snap.underlying_degree[0];
    if d < 3 || snap.underlying_degree.iter().any(|&x| x != d) {
        return Err(Error::InvalidParam(
            "cyclic likelihood: underlying degrees must all equal some d >= 3".into(),
        ));
    }
    if n > POSITION_NODE_CAP {
        return Err(Error::CapExceeded {
            what: "cyclic likelihood nodes",
            limit: POSITION_NODE_CAP,
        });
    }
    let cycle = find_unique_cycle(g)?;
    let mut on_cycle = vec![false; n];
    for &c in &cycle {
        on_cycle[c] = true;
    }
    // entry[u]: the cycle vertex closest to u; parent[u]: next hop toward it.
    let mut entry = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue: VecDeque<usize> = cycle.iter().copied().collect();
    for &c in &cycle {
        entry[c] = c;
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if entry[w] == usize::MAX {
                entry[w] = entry[u];
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    let mut values = Vec::with_capacity(n);
    for v in 0..n {
        let mut path = vec![v];
        while *path.last().unwrap() != entry[v] {
            path.push(parent[*path.last().unwrap()]);
        }
        let mut total = BigRational::zero();
        for &vl in &cycle {
            if vl == entry[v] {
                continue;
            }
            // Everything reached through vl stays uninfected until vl joins.
            let allowed: Vec<usize> = (0..n).filter(|&u| entry[u] != vl).collect();
            let mut core: Vec<usize> = cycle.iter().copied().filter(|&c| c != vl).collect();
            for &p in &path {
                if !on_cycle[p] {
                    core.push(p);
                }
            }
            for extra in 0..=(allowed.len() - core.len()) {
                let k = core.len() + extra + 1;
                let m = core_extension_counts(
                    g,
                    &allowed,
                    &core,
                    v,
                    vl,
                    extra,
                    POSITION_SUBTREE_CAP,
                )?;
                if !m.is_zero() {
                    total += BigRational::from_integer(BigInt::from(m))
                        * cycle_position_probability(d, n, k)?;
                }
            }
        }
        values.push(total);
    }
    LikelihoodTable::from_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{all_free_trees, generate, random_labeled_tree, GeneratorSpec};
    use std::collections::HashSet;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Star with one extra hop: hub 0 with legs 1, 2, 3; node 4 hangs off 1
    /// and is the only end vertex.
    fn hub_tail_snapshot() -> Snapshot {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 4)]).unwrap();
        Snapshot::new(g, vec![0, 1, 2, 3, 4], vec![3, 3, 3, 3, 1], None).unwrap()
    }

    fn star_infinite_snapshot() -> Snapshot {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        Snapshot::new(g, vec![0, 1, 2, 3], vec![3, 3, 3, 3], None).unwrap()
    }

    fn line_snapshot(d: usize, n: usize) -> Snapshot {
        let g = generate(&GeneratorSpec::Line { n }).unwrap();
        let mut deg = vec![d; n];
        deg[n - 1] = 1;
        Snapshot::new(g, (0..n as u64).collect(), deg, None).unwrap()
    }

    #[test]
    fn star_snapshot_likelihoods() {
        let table = exact_source_likelihood(&star_infinite_snapshot()).unwrap();
        assert_eq!(table.values[0], ratio(1, 10));
        for v in 1..4 {
            assert_eq!(table.values[v], ratio(1, 30));
        }
        assert_eq!(table.argmax, vec![0]);
        // Posterior renormalizes the same numbers.
        assert_eq!(table.posterior[0], ratio(1, 2));
    }

    #[test]
    fn hub_tail_snapshot_likelihoods() {
        let table = exact_source_likelihood(&hub_tail_snapshot()).unwrap();
        assert_eq!(table.values[0], ratio(34, 720));
        assert_eq!(table.values[1], ratio(40, 720));
        assert_eq!(table.values[2], ratio(7, 720));
        assert_eq!(table.values[3], ratio(7, 720));
        // The neighbor of the end vertex beats the order-count center...
        assert!(table.values[1] > table.values[0]);
        let counts: Vec<BigUint> = (0..5)
            .map(|v| tree_order_count(&hub_tail_snapshot().graph, v).unwrap())
            .collect();
        let best_count = counts.iter().max().unwrap().clone();
        assert_eq!(counts.iter().position(|c| *c == best_count), Some(0));
        // ...while the end vertex itself outscores every interior node.
        assert_eq!(table.values[4], ratio(60, 720));
        assert_eq!(table.argmax, vec![4]);
    }

    #[test]
    fn whole_graph_snapshot_has_uniform_posterior() {
        let g = generate(&GeneratorSpec::RegularTree { d: 3, n: 7 }).unwrap();
        let snap = Snapshot::of_whole_graph(&g, None).unwrap();
        let table = exact_source_likelihood(&snap).unwrap();
        for v in 0..7 {
            assert_eq!(table.values[v], BigRational::one());
            assert_eq!(table.posterior[v], ratio(1, 7));
        }
    }

    #[test]
    fn end_vertex_position_probability_anchors() {
        assert_eq!(end_vertex_position_probability(3, 5, 3).unwrap(), ratio(1, 144));
        assert_eq!(end_vertex_position_probability(3, 5, 4).unwrap(), ratio(1, 240));
        assert_eq!(end_vertex_position_probability(3, 5, 5).unwrap(), ratio(1, 360));
        assert!(end_vertex_position_probability(3, 5, 1).is_err());
        assert!(end_vertex_position_probability(2, 5, 3).is_err());
    }

    #[test]
    fn position_probability_matches_engine_on_single_end_trees() {
        // Every enumerated order's exact probability must equal the
        // per-position formula with k = where the end vertex landed.
        for seed in 0..12u64 {
            let n = 4 + (seed as usize % 4);
            let g = random_labeled_tree(n, seed);
            for d in [3usize, 4] {
                if (0..n).any(|v| g.degree(v) > d) {
                    continue;
                }
                let leaf = (0..n).find(|&v| g.degree(v) == 1).unwrap();
                let mut deg = vec![d; n];
                deg[leaf] = 1;
                let snap =
                    Snapshot::new(g.clone(), (0..n as u64).collect(), deg, None).unwrap();
                for v in 0..n {
                    for order in crate::spread::enumerate_spreading_orders(&snap, v).unwrap() {
                        let k = order.iter().position(|&u| u == leaf).unwrap() + 1;
                        assert_eq!(
                            spreading_order_probability(&snap, &order).unwrap(),
                            irregular_position_probability(d, 1, n, k).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn position_probability_monotone_in_position() {
        for d in [3usize, 4, 7] {
            let n = 8;
            for k in 1..n {
                assert!(
                    irregular_position_probability(d, 1, n, k).unwrap()
                        > irregular_position_probability(d, 1, n, k + 1).unwrap()
                );
            }
        }
    }

    #[test]
    fn position_count_matches_enumeration_filter() {
        for seed in 0..15u64 {
            let n = 4 + (seed as usize % 6);
            let g = random_labeled_tree(n, 1000 + seed);
            let leaf = (0..n).find(|&v| g.degree(v) == 1).unwrap();
            let mut deg = vec![4usize; n];
            for v in 0..n {
                deg[v] = deg[v].max(g.degree(v));
            }
            deg[leaf] = 1;
            let snap = Snapshot::new(g.clone(), (0..n as u64).collect(), deg, None).unwrap();
            for v in 0..n {
                let orders = crate::spread::enumerate_spreading_orders(&snap, v).unwrap();
                let mut by_k = vec![0usize; n + 1];
                for order in &orders {
                    by_k[order.iter().position(|&u| u == leaf).unwrap() + 1] += 1;
                }
                let mut total = BigUint::zero();
                for k in 1..=n {
                    let m = position_count(&snap, v, leaf, k).unwrap();
                    assert_eq!(m, BigUint::from(by_k[k]), "seed {seed} v {v} k {k}");
                    total += m;
                }
                // Summing over positions recovers the full order count.
                assert_eq!(total, tree_order_count(&g, v).unwrap());
            }
        }
    }

    #[test]
    fn position_count_validates_inputs() {
        let snap = hub_tail_snapshot();
        assert!(position_count(&snap, 0, 1, 3).is_err()); // not an end vertex
        assert_eq!(position_count(&snap, 0, 4, 1).unwrap(), BigUint::zero());
        assert_eq!(position_count(&snap, 4, 4, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(position_count(&snap, 4, 4, 3).unwrap(), BigUint::zero());
        assert_eq!(position_count(&snap, 0, 4, 200).unwrap(), BigUint::zero());
    }

    #[test]
    fn line_counts_are_binomial() {
        // On a line with the end vertex last, the position counts predicted
        // by the closed form match the subtree-enumeration engine.
        let n = 7;
        let snap = line_snapshot(3, n);
        for p in 1..n {
            let v = p - 1;
            for k in 1..=n {
                let direct = position_count(&snap, v, n - 1, k).unwrap();
                let closed = if k >= n - p + 1 {
                    binomial(k - 2, k + p - 1 - n)
                } else {
                    BigUint::zero()
                };
                assert_eq!(direct, closed, "p {p} k {k}");
            }
        }
    }

    #[test]
    fn line_likelihood_matches_oracle() {
        for d in [3usize, 4] {
            for n in 2..=7 {
                let table = line_likelihood(d, n).unwrap();
                let oracle = exact_source_likelihood(&line_snapshot(d, n)).unwrap();
                assert_eq!(table.values, oracle.values, "d {d} n {n}");
            }
        }
    }

    #[test]
    fn irregular_decomposition_matches_oracle() {
        for seed in 0..10u64 {
            let n = 4 + (seed as usize % 5);
            let g = random_labeled_tree(n, 7000 + seed);
            let max_deg = (0..n).map(|v| g.degree(v)).max().unwrap();
            let d = max_deg.max(3);
            for x in 0..n {
                for delta in [1usize, 2, d + 2] {
                    if delta < g.degree(x) {
                        continue;
                    }
                    let mut deg = vec![d; n];
                    deg[x] = delta;
                    let snap =
                        Snapshot::new(g.clone(), (0..n as u64).collect(), deg, None).unwrap();
                    let fast = single_irregular_tree_likelihood(&g, x, d, delta).unwrap();
                    let oracle = exact_source_likelihood(&snap).unwrap();
                    assert_eq!(fast.values, oracle.values, "seed {seed} x {x} delta {delta}");
                }
            }
        }
    }

    #[test]
    fn broom_reduces_to_line_and_matches_oracle() {
        // One pendant is exactly a line of 2t+1 nodes.
        let b = broom_likelihood(4, 2, 1).unwrap();
        let l = line_likelihood(4, 5).unwrap();
        assert_eq!(b.values, l.values);

        for (d, t, k_ends) in [(4usize, 2usize, 2usize), (3, 1, 2), (5, 2, 3)] {
            let table = broom_likelihood(d, t, k_ends).unwrap();
            let g = generate(&GeneratorSpec::Broom { t, k_ends }).unwrap();
            let n = 2 * t + k_ends;
            let mut deg = vec![d; n];
            for p in 2 * t..n {
                deg[p] = 1;
            }
            let snap = Snapshot::new(g, (0..n as u64).collect(), deg, None).unwrap();
            let oracle = exact_source_likelihood(&snap).unwrap();
            assert_eq!(table.values, oracle.values, "d {d} t {t} k {k_ends}");
        }
    }

    #[test]
    fn cycle_position_probability_anchors() {
        assert_eq!(cycle_position_probability(3, 6, 4).unwrap(), ratio(2, 1200));
        assert_eq!(cycle_position_probability(3, 6, 5).unwrap(), ratio(2, 1800));
        assert_eq!(cycle_position_probability(3, 6, 6).unwrap(), ratio(2, 2520));
        assert!(cycle_position_probability(3, 6, 2).is_err());
    }

    /// Triangle 0-1-2 with pendants: 3 on 0, 5 on 3, 4 on 1; all nodes have
    /// underlying degree 3.
    fn unicyclic_six() -> Snapshot {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (0, 3), (3, 5), (1, 4)]).unwrap();
        Snapshot::new(g, vec![0, 1, 2, 3, 4, 5], vec![3; 6], None).unwrap()
    }

    #[test]
    fn pseudo_tree_likelihood_matches_oracle() {
        let snap = unicyclic_six();
        let fast = pseudo_tree_likelihood(&snap).unwrap();
        let oracle = exact_source_likelihood(&snap).unwrap();
        assert_eq!(fast.values, oracle.values);

        // Triangle alone: symmetric.
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let snap = Snapshot::new(tri, vec![0, 1, 2], vec![3; 3], None).unwrap();
        let table = pseudo_tree_likelihood(&snap).unwrap();
        assert_eq!(table.values[0], ratio(1, 3));
        assert_eq!(table.values[1], ratio(1, 3));
        assert_eq!(table.values[2], ratio(1, 3));
        assert_eq!(exact_source_likelihood(&snap).unwrap().values, table.values);
    }

    #[test]
    fn pseudo_tree_likelihood_matches_oracle_on_random_instances() {
        // Random unicyclic snapshots: tree plus one extra edge, d large
        // enough to dominate every snapshot degree.
        let mut tested = 0;
        for seed in 0..40u64 {
            let n = 5 + (seed as usize % 4);
            let g = random_labeled_tree(n, 3000 + seed);
            let mut edges = g.edges();
            let mut extra = None;
            'outer: for a in 0..n {
                for b in (a + 2)..n {
                    if !g.has_edge(a, b) {
                        extra = Some((a, b));
                        break 'outer;
                    }
                }
            }
            let Some(e) = extra else { continue };
            edges.push(e);
            let ug = Graph::from_edges(n, &edges).unwrap();
            let d = (0..n).map(|v| ug.degree(v)).max().unwrap().max(3);
            let snap =
                Snapshot::new(ug, (0..n as u64).collect(), vec![d; n], None).unwrap();
            let fast = pseudo_tree_likelihood(&snap).unwrap();
            let oracle = exact_source_likelihood(&snap).unwrap();
            assert_eq!(fast.values, oracle.values, "seed {seed}");
            tested += 1;
        }
        assert!(tested >= 30);
    }

    #[test]
    fn table_serialization_is_stable() {
        let table = exact_source_likelihood(&star_infinite_snapshot()).unwrap();
        let csv = table.to_csv();
        assert!(csv.starts_with("node,numerator,denominator,posterior\n"));
        assert!(csv.contains("0,1,10,0.500000"));
        assert!(csv.contains("1,1,30,0.166667"));
        let json = table.to_json();
        assert!(json.contains("\"argmax\""));
        assert!(json.contains("\"denominator\": \"10\""));
    }

    // --- shape sweeps -----------------------------------------------------

    #[test]
    fn free_tree_counts_are_standard() {
        let counts: Vec<usize> = (1..=9).map(|n| all_free_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47]);
    }

    fn order_count_centers(g: &Graph) -> Vec<usize> {
        let counts: Vec<BigUint> = (0..g.node_count())
            .map(|v| tree_order_count(g, v).unwrap())
            .collect();
        let best = counts.iter().max().unwrap().clone();
        (0..g.node_count()).filter(|&v| counts[v] == best).collect()
    }

    fn path_between(g: &Graph, a: usize, b: usize) -> Vec<usize> {
        let view = rooted_view(g, a).unwrap();
        let mut path = vec![b];
        while *path.last().unwrap() != a {
            path.push(view.parent[*path.last().unwrap()].unwrap());
        }
        path
    }

    #[test]
    fn argmax_stays_on_center_to_irregular_path() {
        // With one vertex of deficient underlying degree (delta < d), every
        // maximum likelihood node lies on a path between an order-count
        // center and that vertex. Degree excess pushes the estimate the
        // other way, so only deficiency is swept here.
        for n in 4..=9 {
            for g in all_free_trees(n) {
                let max_deg = (0..n).map(|v| g.degree(v)).max().unwrap();
                for d in [3usize, 4] {
                    if max_deg > d {
                        continue;
                    }
                    for x in 0..n {
                        for delta in 1..d {
                            if delta < g.degree(x) {
                                continue;
                            }
                            let table =
                                single_irregular_tree_likelihood(&g, x, d, delta).unwrap();
                            let centers = order_count_centers(&g);
                            let mut on_path: HashSet<usize> = HashSet::new();
                            for &c in &centers {
                                on_path.extend(path_between(&g, c, x));
                            }
                            for &w in &table.argmax {
                                assert!(
                                    on_path.contains(&w),
                                    "n {n} d {d} x {x} delta {delta} argmax {w}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn end_vertex_adjacent_to_center_is_optimal() {
        // Whenever the end vertex sits next to an order-count center, it
        // attains the maximum likelihood.
        for n in 4..=9 {
            for g in all_free_trees(n) {
                let max_deg = (0..n).map(|v| g.degree(v)).max().unwrap();
                for d in [3usize, 4] {
                    if max_deg > d {
                        continue;
                    }
                    let centers = order_count_centers(&g);
                    for x in 0..n {
                        if g.degree(x) != 1 {
                            continue;
                        }
                        if !centers.iter().any(|&c| g.has_edge(c, x)) {
                            continue;
                        }
                        let table = single_irregular_tree_likelihood(&g, x, d, 1).unwrap();
                        assert!(
                            table.argmax.contains(&x),
                            "n {n} d {d} end {x} argmax {:?}",
                            table.argmax
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn center_to_end_count_ratio_extremes() {
        // Over all trees of a given size with a designated end leaf, the
        // ratio of the center's order count to the leaf's is extremized at
        // the expected separations: largest at floor((n-1)/2), smallest at 1.
        for n in 5..=9 {
            let mut best: Option<(BigRational, usize)> = None;
            let mut worst: Option<(BigRational, usize)> = None;
            for g in all_free_trees(n) {
                let centers = order_count_centers(&g);
                let counts: Vec<BigUint> = (0..n)
                    .map(|v| tree_order_count(&g, v).unwrap())
                    .collect();
                for leaf in 0..n {
                    if g.degree(leaf) != 1 {
                        continue;
                    }
                    let dist = centers
                        .iter()
                        .map(|&c| path_between(&g, c, leaf).len() - 1)
                        .min()
                        .unwrap();
                    let ratio = BigRational::new(
                        BigInt::from(counts[centers[0]].clone()),
                        BigInt::from(counts[leaf].clone()),
                    );
                    if best.as_ref().map_or(true, |(r, _)| ratio > *r) {
                        best = Some((ratio.clone(), dist));
                    }
                    if worst.as_ref().map_or(true, |(r, _)| ratio < *r) {
                        worst = Some((ratio.clone(), dist));
                    }
                }
            }
            assert_eq!(best.unwrap().1, (n - 1) / 2, "n {n}");
            assert_eq!(worst.unwrap().1, 1, "n {n}");
        }
    }
}
