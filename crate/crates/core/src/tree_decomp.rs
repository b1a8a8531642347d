//! Rooted tree decompositions, their normal form, forget orders and weak reachability.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

/// A broken decomposition axiom together with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("parent map does not describe a tree rooted at {root}")]
    NotATree { root: usize },
    #[error("bag of node {node} mentions vertex {vertex} outside the graph")]
    ForeignVertex { node: usize, vertex: usize },
    #[error("vertex {0} is in no bag")]
    UncoveredVertex(usize),
    #[error("edge {0}-{1} is in no bag")]
    UncoveredEdge(usize, usize),
    #[error("nodes holding vertex {0} are not connected")]
    Interpolation(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("invalid decomposition: {0}")]
    Invalid(#[from] Violation),
    #[error("decomposition is not normalized: {0}")]
    NotNormalized(String),
    #[error("graph has {n} vertices, exact search is capped at {cap}")]
    TooLarge { n: usize, cap: usize },
}

/// Tree decomposition with bags indexed by node id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub nodes: usize,
    pub root: usize,
    /// `parent[root]` is `None`.
    pub parent: Vec<Option<usize>>,
    pub bags: Vec<BTreeSet<usize>>,
}

impl TreeDecomposition {
    pub fn single_bag(bag: impl IntoIterator<Item = usize>) -> Self {
        TreeDecomposition {
            nodes: 1,
            root: 0,
            parent: vec![None],
            bags: vec![bag.into_iter().collect()],
        }
    }

    /// Builds a decomposition from `(parent, bag)` pairs; node 0 is the root.
    pub fn from_parts(parts: Vec<(Option<usize>, Vec<usize>)>) -> Self {
        let (parent, bags): (Vec<_>, Vec<_>) =
            parts.into_iter().map(|(p, b)| (p, b.into_iter().collect())).unzip();
        TreeDecomposition { nodes: parent.len(), root: 0, parent, bags }
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![vec![]; self.nodes];
        for (t, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                ch[p].push(t);
            }
        }
        ch
    }

    /// Nodes in breadth-first order from the root, or `None` if the parent map is not a tree.
    pub fn bfs_order(&self) -> Option<Vec<usize>> {
        if self.parent.len() != self.nodes
            || self.bags.len() != self.nodes
            || self.root >= self.nodes
            || self.parent[self.root].is_some()
        {
            return None;
        }
        let ch = self.children();
        let mut order = vec![self.root];
        let mut i = 0;
        while i < order.len() {
            order.extend(ch[order[i]].iter().copied());
            i += 1;
        }
        (order.len() == self.nodes).then_some(order)
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.nodes];
        for t in self.bfs_order().expect("tree") {
            if let Some(p) = self.parent[t] {
                depth[t] = depth[p] + 1;
            }
        }
        depth
    }

    pub fn validate(&self, m: &Graph) -> Result<(), Violation> {
        let order = self.bfs_order().ok_or(Violation::NotATree { root: self.root })?;
        let n = m.vertex_count();
        for (t, bag) in self.bags.iter().enumerate() {
            if let Some(&v) = bag.iter().find(|&&v| v >= n) {
                return Err(Violation::ForeignVertex { node: t, vertex: v });
            }
        }
        for v in m.vertices() {
            if !self.bags.iter().any(|b| b.contains(&v)) {
                return Err(Violation::UncoveredVertex(v));
            }
        }
        for (u, v) in m.edges() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(Violation::UncoveredEdge(u, v));
            }
        }
        // Connected iff exactly one holder has a parent outside the holders.
        for v in m.vertices() {
            let tops = order
                .iter()
                .filter(|&&t| {
                    self.bags[t].contains(&v)
                        && self.parent[t].is_none_or(|p| !self.bags[p].contains(&v))
                })
                .count();
            if tops != 1 {
                return Err(Violation::Interpolation(v));
            }
        }
        Ok(())
    }

    /// Reasons this decomposition falls short of the normal form, if any.
    pub fn normal_form_defect(&self) -> Option<String> {
        let Some(_) = self.bfs_order() else {
            return Some("not a tree".into());
        };
        if !self.bags[self.root].is_empty() {
            return Some("root bag not empty".into());
        }
        let ch = self.children();
        for (t, kids) in ch.iter().enumerate() {
            if kids.len() > 2 {
                return Some(format!("node {t} has {} children", kids.len()));
            }
            if t != self.root && kids.is_empty() && self.bags[t].len() != 1 {
                return Some(format!("leaf {t} bag is not a singleton"));
            }
            if let Some(p) = self.parent[t] {
                let (a, b) = (&self.bags[t], &self.bags[p]);
                if a.difference(b).count() > 1 || b.difference(a).count() > 1 {
                    return Some(format!("edge {p}-{t} is not smooth"));
                }
            }
        }
        None
    }

    pub fn is_normalized(&self) -> bool {
        self.normal_form_defect().is_none()
    }

    /// Union of the bags in the subtree below `t`, for every `t`.
    pub fn subtree_unions(&self) -> Vec<BTreeSet<usize>> {
        let mut plus = self.bags.clone();
        for &t in self.bfs_order().expect("tree").iter().rev() {
            if let Some(p) = self.parent[t] {
                let below = plus[t].clone();
                plus[p].extend(below);
            }
        }
        plus
    }

    /// Vertices occurring only at `t` or below; the whole vertex set at the root.
    pub fn only_below(&self, all_vertices: usize) -> Vec<BTreeSet<usize>> {
        let plus = self.subtree_unions();
        (0..self.nodes)
            .map(|t| match self.parent[t] {
                None => (0..all_vertices).collect(),
                Some(p) => plus[t].difference(&self.bags[p]).copied().collect(),
            })
            .collect()
    }

    /// Normal form: empty root bag, at most two children, singleton leaves, smooth edges.
    /// Width and validity are preserved; nodes are renumbered breadth-first.
    pub fn normalize(&self, m: &Graph) -> Result<TreeDecomposition, DecompError> {
        self.validate(m)?;
        let mut b = Builder::from(self);
        b.prune_empty_leaves();
        b.binarize();
        b.smooth();
        b.graft_root_and_leaves();
        Ok(b.finish())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Mutable adjacency form used while normalizing.
struct Builder {
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    bags: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
}

impl Builder {
    fn from(td: &TreeDecomposition) -> Self {
        Builder {
            root: td.root,
            parent: td.parent.clone(),
            children: td.children(),
            bags: td.bags.clone(),
            alive: vec![true; td.nodes],
        }
    }

    fn push(&mut self, parent: Option<usize>, bag: BTreeSet<usize>) -> usize {
        let id = self.bags.len();
        self.parent.push(parent);
        self.children.push(vec![]);
        self.bags.push(bag);
        self.alive.push(true);
        if let Some(p) = parent {
            self.children[p].push(id);
        }
        id
    }

    fn set_parent(&mut self, t: usize, new_parent: usize) {
        if let Some(old) = self.parent[t] {
            self.children[old].retain(|&c| c != t);
        }
        self.parent[t] = Some(new_parent);
        self.children[new_parent].push(t);
    }

    fn prune_empty_leaves(&mut self) {
        let mut queue: Vec<usize> = (0..self.bags.len()).collect();
        while let Some(t) = queue.pop() {
            if self.alive[t] && t != self.root && self.children[t].is_empty() && self.bags[t].is_empty() {
                self.alive[t] = false;
                let p = self.parent[t].unwrap();
                self.children[p].retain(|&c| c != t);
                queue.push(p);
            }
        }
    }

    fn binarize(&mut self) {
        let mut stack = vec![self.root];
        while let Some(t) = stack.pop() {
            if self.children[t].len() > 2 {
                let rest: Vec<usize> = self.children[t][1..].to_vec();
                let copy = self.push(Some(t), self.bags[t].clone());
                for c in rest {
                    self.set_parent(c, copy);
                }
            }
            stack.extend(self.children[t].iter().copied());
        }
    }

    /// Inserts a chain between `upper` (above) and `lower` (below) so that each step
    /// drops or adds a single vertex: first drop `lower`-only vertices, then add `upper`-only ones.
    fn interpolate(&mut self, upper: usize, lower: usize) {
        let drop: Vec<usize> = self.bags[lower].difference(&self.bags[upper]).copied().collect();
        let add: Vec<usize> = self.bags[upper].difference(&self.bags[lower]).copied().collect();
        let mut steps = vec![];
        let mut cur = self.bags[lower].clone();
        for &v in &drop {
            cur.remove(&v);
            steps.push(cur.clone());
        }
        for &v in &add {
            cur.insert(v);
            steps.push(cur.clone());
        }
        // The last state equals the upper bag itself.
        steps.pop();
        // `steps` runs bottom-up from just above `lower` to just below `upper`.
        let mut below = lower;
        for bag in steps {
            let node = self.push(Some(upper), bag);
            self.set_parent(below, node);
            below = node;
        }
    }

    fn smooth(&mut self) {
        let edges: Vec<(usize, usize)> = (0..self.bags.len())
            .filter(|&t| self.alive[t])
            .filter_map(|t| self.parent[t].map(|p| (p, t)))
            .collect();
        for (p, t) in edges {
            self.interpolate(p, t);
        }
    }

    fn graft_root_and_leaves(&mut self) {
        if !self.bags[self.root].is_empty() {
            let old = self.root;
            let new_root = self.push(None, BTreeSet::new());
            self.set_parent(old, new_root);
            self.root = new_root;
            self.interpolate(new_root, old);
        }
        let leaves: Vec<usize> = (0..self.bags.len())
            .filter(|&t| self.alive[t] && t != self.root && self.children[t].is_empty())
            .filter(|&t| self.bags[t].len() > 1)
            .collect();
        for t in leaves {
            let keep = *self.bags[t].iter().next().unwrap();
            let leaf = self.push(Some(t), BTreeSet::from([keep]));
            self.interpolate(t, leaf);
        }
    }

    fn finish(self) -> TreeDecomposition {
        let mut order = vec![self.root];
        let mut i = 0;
        while i < order.len() {
            let mut ch = self.children[order[i]].clone();
            ch.sort_unstable();
            order.extend(ch);
            i += 1;
        }
        let mut rename = vec![usize::MAX; self.bags.len()];
        for (new, &old) in order.iter().enumerate() {
            rename[old] = new;
        }
        TreeDecomposition {
            nodes: order.len(),
            root: 0,
            parent: order.iter().map(|&t| self.parent[t].map(|p| rename[p])).collect(),
            bags: order.iter().map(|&t| self.bags[t].clone()).collect(),
        }
    }
}

/// Linear order on the vertices compatible with the forget nodes of a normalized decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForgetOrder {
    /// Vertices from smallest to largest.
    pub order: Vec<usize>,
    /// `rank[v]` is the position of `v` in `order`.
    pub rank: Vec<usize>,
    pub forget_node: Vec<usize>,
}

impl ForgetOrder {
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }
}

/// Forget nodes and a compatible vertex order: vertices forgotten nearer the root come first,
/// ties by node id and then vertex id.
pub fn forget_order(td: &TreeDecomposition, vertex_count: usize) -> Result<ForgetOrder, DecompError> {
    if let Some(defect) = td.normal_form_defect() {
        return Err(DecompError::NotNormalized(defect));
    }
    let mut forget_node = vec![usize::MAX; vertex_count];
    for t in 0..td.nodes {
        let above = td.parent[t].map(|p| &td.bags[p]);
        for &h in &td.bags[t] {
            if h >= vertex_count {
                return Err(Violation::ForeignVertex { node: t, vertex: h }.into());
            }
            if above.is_none_or(|a| !a.contains(&h)) {
                if forget_node[h] != usize::MAX {
                    return Err(Violation::Interpolation(h).into());
                }
                forget_node[h] = t;
            }
        }
    }
    if let Some(h) = forget_node.iter().position(|&t| t == usize::MAX) {
        return Err(Violation::UncoveredVertex(h).into());
    }
    let depth = td.depths();
    let mut order: Vec<usize> = (0..vertex_count).collect();
    order.sort_by_key(|&h| (depth[forget_node[h]], forget_node[h], h));
    let mut rank = vec![0; vertex_count];
    for (i, &h) in order.iter().enumerate() {
        rank[h] = i;
    }
    Ok(ForgetOrder { order, rank, forget_node })
}

/// Whether `anc` is an ancestor of (or equal to) `t`.
pub fn is_ancestor(td: &TreeDecomposition, anc: usize, mut t: usize) -> bool {
    loop {
        if t == anc {
            return true;
        }
        match td.parent[t] {
            Some(p) => t = p,
            None => return false,
        }
    }
}

/// Weakly `r`-reachable set of `v`: all `u` that are minimal on some `u`-`v` path of length at most `r`.
/// `rank` gives each vertex's position in the order.
pub fn wreach(m: &Graph, rank: &[usize], r: usize, v: usize) -> BTreeSet<usize> {
    m.vertices()
        .filter(|&u| rank[u] <= rank[v] && reaches_above(m, rank, r, u, v))
        .collect()
}

/// Weakly reachable sets for every vertex at once.
pub fn wreach_all(m: &Graph, rank: &[usize], r: usize) -> Vec<BTreeSet<usize>> {
    let mut sets = vec![BTreeSet::new(); m.vertex_count()];
    for u in m.vertices() {
        for w in bfs_above(m, rank, r, u) {
            sets[w].insert(u);
        }
    }
    sets
}

/// Vertices reachable from `u` within `r` steps through vertices ranked above `u`.
fn bfs_above(m: &Graph, rank: &[usize], r: usize, u: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; m.vertex_count()];
    dist[u] = 0;
    let mut queue = VecDeque::from([u]);
    let mut seen = vec![u];
    while let Some(x) = queue.pop_front() {
        if dist[x] == r {
            continue;
        }
        for y in m.neighbors(x) {
            if rank[y] > rank[u] && dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                seen.push(y);
                queue.push_back(y);
            }
        }
    }
    seen
}

fn reaches_above(m: &Graph, rank: &[usize], r: usize, u: usize, v: usize) -> bool {
    bfs_above(m, rank, r, u).contains(&v)
}

pub const DEFAULT_EXACT_CAP: usize = 10;

/// Minimum-width decomposition by dynamic programming over vertex subsets.
pub fn decompose_small(m: &Graph, cap: usize) -> Result<TreeDecomposition, DecompError> {
    let n = m.vertex_count();
    if n > cap || n > 20 {
        return Err(DecompError::TooLarge { n, cap });
    }
    if n == 0 {
        return Ok(TreeDecomposition::single_bag([]));
    }
    let full = (1usize << n) - 1;
    // best[s]: least achievable max "higher degree" when the vertices of s are eliminated first.
    let mut best = vec![usize::MAX; 1 << n];
    let mut choice = vec![0usize; 1 << n];
    best[0] = 0;
    for s in 1..=full {
        for v in 0..n {
            if s >> v & 1 == 0 {
                continue;
            }
            let rest = s & !(1 << v);
            let cost = best[rest].max(frontier(m, rest, v).count_ones() as usize);
            if cost < best[s] {
                best[s] = cost;
                choice[s] = v;
            }
        }
    }
    let mut order = vec![];
    let mut s = full;
    while s != 0 {
        order.push(choice[s]);
        s &= !(1 << choice[s]);
    }
    order.reverse();
    Ok(from_elimination_order(m, &order))
}

/// Vertices outside `eliminated ∪ {v}` reachable from `v` through `eliminated`, as a bitmask.
fn frontier(m: &Graph, eliminated: usize, v: usize) -> u32 {
    let mut seen = 1u32 << v;
    let mut out = 0u32;
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for y in m.neighbors(x) {
            if seen >> y & 1 == 1 {
                continue;
            }
            seen |= 1 << y;
            if eliminated >> y & 1 == 1 {
                stack.push(y);
            } else {
                out |= 1 << y;
            }
        }
    }
    out
}

/// Decomposition induced by eliminating vertices in `order`.
pub fn from_elimination_order(m: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = m.vertex_count();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut filled: Vec<BTreeSet<usize>> =
        m.vertices().map(|v| m.neighbors(v).collect()).collect();
    let mut bags = vec![];
    let mut parent = vec![];
    for &v in order {
        let higher: Vec<usize> = filled[v].iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        for &a in &higher {
            for &b in &higher {
                if a != b {
                    filled[a].insert(b);
                }
            }
        }
        parent.push(higher.iter().min_by_key(|&&w| pos[w]).map(|&w| pos[w]));
        let mut bag: BTreeSet<usize> = higher.into_iter().collect();
        bag.insert(v);
        bags.push(bag);
    }
    // Node i is the bag of order[i]; the last one becomes the root and collects orphan components.
    let last = n - 1;
    for (i, p) in parent.iter_mut().enumerate() {
        if p.is_none() && i != last {
            *p = Some(last);
        }
    }
    TreeDecomposition { nodes: n, root: last, parent, bags }
}

/// Random partial `k`-tree on `n` vertices with a witnessing decomposition.
/// Each edge of the underlying `k`-tree survives with probability `keep`.
pub fn random_partial_k_tree<R: Rng>(
    n: usize,
    k: usize,
    keep: f64,
    rng: &mut R,
) -> (Graph, TreeDecomposition) {
    let start = n.min(k + 1);
    let mut edges = vec![];
    for u in 0..start {
        for v in u + 1..start {
            edges.push((u, v));
        }
    }
    let mut parts: Vec<(Option<usize>, Vec<usize>)> = vec![(None, (0..start).collect())];
    for v in start..n {
        let host = rng.gen_range(0..parts.len());
        let mut clique = parts[host].1.clone();
        clique.shuffle(rng);
        clique.truncate(k);
        for &u in &clique {
            edges.push((u, v));
        }
        clique.push(v);
        parts.push((Some(host), clique));
    }
    let kept: Vec<_> = edges.into_iter().filter(|_| rng.gen_bool(keep)).collect();
    let g = Graph::from_edges(n, &kept).expect("in range");
    (g, TreeDecomposition::from_parts(parts))
}
