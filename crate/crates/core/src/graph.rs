//! Finite graphs with optional loops, strong products, powers and generators.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("power exponent must be at least 1")]
    ZeroPower,
    #[error("generator dimension must be positive: {0}")]
    BadDimension(String),
    #[error("half-graph order must be at least 1")]
    ZeroOrder,
    #[error("sides of a bipartition must be disjoint (vertex {0} in both)")]
    OverlappingSides(usize),
    #[error("ball needs at least one center")]
    NoCenters,
}

/// Simple graph on vertices `0..n`, with loops kept apart from edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
    loops: BTreeSet<usize>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![BTreeSet::new(); n], loops: BTreeSet::new() }
    }

    /// Builds a graph from an edge list; pairs `(v, v)` become loops.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.adj.len()
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v < self.adj.len() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.adj.len() })
        }
    }

    pub fn try_add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            self.loops.insert(u);
        } else {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
        Ok(())
    }

    /// Panics on out-of-range endpoints. Use [`Graph::try_add_edge`] for untrusted input.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.try_add_edge(u, v).expect("edge endpoint out of range");
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if u == v {
            self.loops.remove(&u);
        } else if u < self.adj.len() && v < self.adj.len() {
            self.adj[u].remove(&v);
            self.adj[v].remove(&u);
        }
    }

    pub fn add_loop(&mut self, v: usize) {
        self.add_edge(v, v);
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(BTreeSet::new());
        self.adj.len() - 1
    }

    /// Adjacency between distinct vertices. Loops are ignored here.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && u < self.adj.len() && self.adj[u].contains(&v)
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.loops.contains(&v)
    }

    /// Adjacency in the loop-graph sense: equal vertices are adjacent iff looped.
    pub fn adjacent_or_looped(&self, u: usize, v: usize) -> bool {
        if u == v {
            self.has_loop(u)
        } else {
            self.has_edge(u, v)
        }
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn loops(&self) -> impl Iterator<Item = usize> + '_ {
        self.loops.iter().copied()
    }

    pub fn loop_count(&self) -> usize {
        self.loops.len()
    }

    /// Edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn is_reflexive(&self) -> bool {
        self.loops.len() == self.adj.len()
    }

    pub fn without_loops(&self) -> Graph {
        Graph { adj: self.adj.clone(), loops: BTreeSet::new() }
    }

    pub fn reflexive_closure(&self) -> Graph {
        Graph { adj: self.adj.clone(), loops: self.vertices().collect() }
    }

    pub fn complement(&self) -> Graph {
        let n = self.vertex_count();
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Induced subgraph on `keep`, renumbered in the order given.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut g = Graph::new(keep.len());
        for (i, &u) in keep.iter().enumerate() {
            if self.has_loop(u) {
                g.loops.insert(i);
            }
            for (j, &v) in keep.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// BFS distances from a set of sources. `None` means unreachable.
    pub fn bfs_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for w in self.neighbors(u) {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> Option<usize> {
        self.bfs_from(&[u])[v]
    }

    /// Largest finite distance over all pairs (0 for the empty graph).
    pub fn diameter(&self) -> usize {
        self.vertices()
            .filter_map(|v| self.bfs_from(&[v]).into_iter().flatten().max())
            .max()
            .unwrap_or(0)
    }

    /// Whether `f` maps edges to edges of `target`, where loops in `target` absorb collapsed edges.
    pub fn is_homomorphism_to(&self, target: &Graph, f: impl Fn(usize) -> usize) -> bool {
        self.edges().all(|(u, v)| target.adjacent_or_looped(f(u), f(v)))
    }
}

/// A graph with a total vertex coloring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColoredGraph {
    pub graph: Graph,
    pub colors: Vec<usize>,
}

impl ColoredGraph {
    pub fn new(graph: Graph, colors: Vec<usize>) -> Self {
        assert_eq!(graph.vertex_count(), colors.len(), "coloring must be total");
        ColoredGraph { graph, colors }
    }

    pub fn uncolored(graph: Graph) -> Self {
        let n = graph.vertex_count();
        ColoredGraph { graph, colors: vec![0; n] }
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }
}

/// Vertex `[q, m]` of a strong product `Q ⊠ M`, flattened row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductVertex {
    pub q: usize,
    pub m: usize,
}

impl ProductVertex {
    pub fn index(self, right_size: usize) -> usize {
        self.q * right_size + self.m
    }

    pub fn from_index(index: usize, right_size: usize) -> Self {
        ProductVertex { q: index / right_size, m: index % right_size }
    }
}

/// Strong product of the loopless parts of the factors.
pub fn strong_product(left: &Graph, right: &Graph) -> Graph {
    let (nl, nr) = (left.vertex_count(), right.vertex_count());
    let mut g = Graph::new(nl * nr);
    let near = |g: &Graph, a: usize, b: usize| a == b || g.has_edge(a, b);
    for a in 0..nl * nr {
        let pa = ProductVertex::from_index(a, nr);
        for b in a + 1..nl * nr {
            let pb = ProductVertex::from_index(b, nr);
            if near(left, pa.q, pb.q) && near(right, pa.m, pb.m) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// `r`-th power: distinct vertices at distance at most `r` become adjacent.
pub fn power(g: &Graph, r: usize, reflexive: bool) -> Result<Graph, GraphError> {
    if r == 0 {
        return Err(GraphError::ZeroPower);
    }
    let n = g.vertex_count();
    let mut out = Graph::new(n);
    for u in 0..n {
        for (v, d) in g.bfs_from(&[u]).into_iter().enumerate() {
            if v > u && d.is_some_and(|d| d <= r) {
                out.add_edge(u, v);
            }
        }
    }
    if reflexive {
        out = out.reflexive_closure();
    }
    Ok(out)
}

/// Named graph families.
///
/// Numbering: paths are `0..n`; grids are row-major over their coordinates;
/// the pinned grid apex is the last vertex; half-graph `u_i` is `i-1` and `v_j` is `n+j-1`;
/// copy `c` of a disjoint union shifts ids by `c·|V|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    Path(usize),
    Grid2d(usize, usize),
    Grid3d(usize, usize, usize),
    PinnedGrid(usize),
    HalfGraph(usize),
    DisjointCopies(Box<Generator>, usize),
}

pub fn grid_index(dims: &[usize], coords: &[usize]) -> usize {
    dims.iter().zip(coords).fold(0, |acc, (&d, &c)| acc * d + c)
}

fn grid(dims: &[usize]) -> Graph {
    let n: usize = dims.iter().product();
    let mut g = Graph::new(n);
    let mut coords = vec![0; dims.len()];
    for v in 0..n {
        let mut rest = v;
        for k in (0..dims.len()).rev() {
            coords[k] = rest % dims[k];
            rest /= dims[k];
        }
        for k in 0..dims.len() {
            if coords[k] + 1 < dims[k] {
                coords[k] += 1;
                g.add_edge(v, grid_index(dims, &coords));
                coords[k] -= 1;
            }
        }
    }
    g
}

impl Generator {
    pub fn build(&self) -> Result<Graph, GraphError> {
        let positive = |name: &str, xs: &[usize]| {
            if xs.iter().all(|&x| x > 0) {
                Ok(())
            } else {
                Err(GraphError::BadDimension(format!("{name}{xs:?}")))
            }
        };
        match *self {
            Generator::Path(n) => {
                positive("path", &[n])?;
                Ok(grid(&[n]))
            }
            Generator::Grid2d(a, b) => {
                positive("grid2d", &[a, b])?;
                Ok(grid(&[a, b]))
            }
            Generator::Grid3d(a, b, c) => {
                positive("grid3d", &[a, b, c])?;
                Ok(grid(&[a, b, c]))
            }
            Generator::PinnedGrid(n) => {
                positive("pinned_grid", &[n])?;
                let side = n * n;
                let mut g = grid(&[side, side]);
                let apex = g.add_vertex();
                for i in 1..=n {
                    for j in 1..=n {
                        g.add_edge(apex, grid_index(&[side, side], &[i * n - 1, j * n - 1]));
                    }
                }
                Ok(g)
            }
            Generator::HalfGraph(n) => {
                positive("half_graph", &[n])?;
                let mut g = Graph::new(2 * n);
                for i in 0..n {
                    for j in i..n {
                        g.add_edge(i, n + j);
                    }
                }
                Ok(g)
            }
            Generator::DisjointCopies(ref inner, copies) => {
                positive("disjoint_copies", &[copies])?;
                let one = inner.build()?;
                let k = one.vertex_count();
                let mut g = Graph::new(k * copies);
                for c in 0..copies {
                    for (u, v) in one.edges() {
                        g.add_edge(c * k + u, c * k + v);
                    }
                    for v in one.loops() {
                        g.add_loop(c * k + v);
                    }
                }
                Ok(g)
            }
        }
    }
}

/// Two ordered tuples `(u_1..u_k)`, `(v_1..v_k)` with `u_i v_j` an edge iff `i <= j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfGraphWitness {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HalfGraphSearch {
    Found(HalfGraphWitness),
    Absent,
    /// Instance larger than the search cap; nothing is claimed.
    Inconclusive,
}

pub const DEFAULT_HALF_GRAPH_CAP: usize = 16;

/// Checks that a witness really is a bi-induced half-graph in `g`.
pub fn is_half_graph_witness(g: &Graph, w: &HalfGraphWitness) -> bool {
    let k = w.left.len();
    let mut all: Vec<usize> = w.left.iter().chain(&w.right).copied().collect();
    all.sort_unstable();
    all.dedup();
    w.right.len() == k
        && all.len() == 2 * k
        && (0..k).all(|i| (0..k).all(|j| g.has_edge(w.left[i], w.right[j]) == (i <= j)))
}

/// Exact search for a bi-induced half-graph of the given order across `(side_a, side_b)`.
pub fn find_bi_induced_half_graph(
    g: &Graph,
    side_a: &[usize],
    side_b: &[usize],
    order: usize,
    cap: usize,
) -> Result<HalfGraphSearch, GraphError> {
    if order == 0 {
        return Err(GraphError::ZeroOrder);
    }
    for &v in side_a.iter().chain(side_b) {
        g.check(v)?;
    }
    if let Some(&v) = side_a.iter().find(|v| side_b.contains(v)) {
        return Err(GraphError::OverlappingSides(v));
    }
    if side_a.len() + side_b.len() > cap {
        return Ok(HalfGraphSearch::Inconclusive);
    }
    if side_a.len() < order || side_b.len() < order {
        return Ok(HalfGraphSearch::Absent);
    }
    let mut left = Vec::with_capacity(order);
    let mut right = Vec::with_capacity(order);
    let found = extend_half_graph(g, side_a, side_b, order, &mut left, &mut right);
    Ok(if found {
        HalfGraphSearch::Found(HalfGraphWitness { left, right })
    } else {
        HalfGraphSearch::Absent
    })
}

/// Like [`find_bi_induced_half_graph`] but lets every vertex serve on either side,
/// which amounts to trying all bipartitions of the vertex set.
pub fn find_half_graph_any_sides(g: &Graph, order: usize, cap: usize) -> Result<HalfGraphSearch, GraphError> {
    if order == 0 {
        return Err(GraphError::ZeroOrder);
    }
    if g.vertex_count() > cap {
        return Ok(HalfGraphSearch::Inconclusive);
    }
    let all: Vec<usize> = g.vertices().collect();
    let mut left = Vec::with_capacity(order);
    let mut right = Vec::with_capacity(order);
    let found = 2 * order <= all.len() && extend_half_graph(g, &all, &all, order, &mut left, &mut right);
    Ok(if found {
        HalfGraphSearch::Found(HalfGraphWitness { left, right })
    } else {
        HalfGraphSearch::Absent
    })
}

fn extend_half_graph(
    g: &Graph,
    side_a: &[usize],
    side_b: &[usize],
    order: usize,
    left: &mut Vec<usize>,
    right: &mut Vec<usize>,
) -> bool {
    if left.len() == order {
        return true;
    }
    let used = |x: usize, left: &[usize], right: &[usize]| left.contains(&x) || right.contains(&x);
    for &u in side_a {
        if used(u, left, right) || right.iter().any(|&v| g.has_edge(u, v)) {
            continue;
        }
        for &v in side_b {
            if v == u || used(v, left, right) || !g.has_edge(u, v) || !left.iter().all(|&w| g.has_edge(w, v)) {
                continue;
            }
            left.push(u);
            right.push(v);
            if extend_half_graph(g, side_a, side_b, order, left, right) {
                return true;
            }
            left.pop();
            right.pop();
        }
    }
    false
}

/// Greedy proper coloring in id order, least free color first.
pub fn greedy_proper_coloring(g: &Graph) -> Vec<usize> {
    let mut colors: Vec<usize> = Vec::with_capacity(g.vertex_count());
    for v in g.vertices() {
        let taken: BTreeSet<usize> = g.neighbors(v).filter(|&w| w < v).map(|w| colors[w]).collect();
        colors.push((0..).find(|c| !taken.contains(c)).unwrap());
    }
    colors
}

pub fn color_count(colors: &[usize]) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

/// An `r`-ball: induced subgraph plus its vertex map and distances to the centers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub graph: Graph,
    /// `vertices[i]` is the original id of ball vertex `i`, ascending.
    pub vertices: Vec<usize>,
    pub distance: Vec<usize>,
}

impl Ball {
    pub fn local_id(&self, original: usize) -> Option<usize> {
        self.vertices.binary_search(&original).ok()
    }
}

pub fn ball(g: &Graph, centers: &[usize], r: usize) -> Result<Ball, GraphError> {
    if centers.is_empty() {
        return Err(GraphError::NoCenters);
    }
    for &c in centers {
        g.check(c)?;
    }
    let dist = g.bfs_from(centers);
    let (vertices, distance): (Vec<usize>, Vec<usize>) = dist
        .iter()
        .enumerate()
        .filter_map(|(v, d)| d.filter(|&d| d <= r).map(|d| (v, d)))
        .unzip();
    Ok(Ball { graph: g.induced(&vertices), vertices, distance })
}
