//! Builds an expression over a reflexive power of `Q` whose value is `xi(G)`, for a colored
//! spanning subgraph `G` of `Q ⊠ M`, working bottom-up over a normalized decomposition of `M`.
//!
//! A running color of `v = [p, h]` is stored compactly: the set `R` of pairs `(s_Q(p'), h')` with
//! `p'` in the ball around `p` and `h'` weakly reachable from `h` and not yet forgotten, plus the
//! type of the full ordered tuple over `R` followed by `v`. Every subset of `R` passes the
//! completeness condition and its type is a projection of the full type, so this pair carries
//! exactly the information of the partial function over subsets (see `explicit_color`).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::expr::{evaluate, palette, Expr, ExprError};
use crate::graph::{greedy_proper_coloring, power, ColoredGraph, Graph, GraphError, ProductVertex};
use crate::logic::{check_strong_locality, interpret, Formula, Locality, LogicError, TypeId, TypeTable};
use crate::tree_decomp::{forget_order, wreach_all, DecompError, ForgetOrder, TreeDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("G has {got} vertices, expected |V(Q)|*|V(M)| = {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("edge {0}-{1} of G is not an edge of the strong product")]
    NotInProduct(usize, usize),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("formula is not strongly {r}-local on this instance: {witness:?}")]
    NotLocal { r: usize, witness: Locality },
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Renumber(#[from] RenumberError),
    #[error("node {node}: vertices sharing color {color} get different restricted colors")]
    ColorAudit { node: usize, color: usize },
    #[error("node {node}: more than one vertex forgotten")]
    NotSmooth { node: usize },
    #[error("node {node}: edge {u}-{v} of xi(G) is missing from the value")]
    MissingEdge { node: usize, u: usize, v: usize },
    #[error("node {node}: extra edge {u}-{v}; type rank too low, try q_type = {suggest}")]
    TypeRankTooLow { node: usize, u: usize, v: usize, suggest: usize },
    #[error("node {node}: value disagrees with the invariant ({what})")]
    Invariant { node: usize, what: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisConfig {
    /// Locality radius of the formula.
    pub r: usize,
    /// Rank of the types used as colors.
    pub q_type: usize,
    /// Ceiling for the separation radius.
    pub r_sep_cap: usize,
    /// Compare every intermediate value with `xi(G)`.
    pub check_nodes: bool,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig { r: 1, q_type: 2, r_sep_cap: 16, check_nodes: true }
    }
}

/// `max(r, min(4^rank, cap))`.
pub fn separation_radius(r: usize, formula_rank: usize, cap: usize) -> usize {
    let full = 4usize.checked_pow(formula_rank as u32).unwrap_or(usize::MAX);
    r.max(full.min(cap))
}

/// Compact running color; see the module docs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RunningColor {
    /// Type of the vertex alone.
    pub base: TypeId,
    /// Admissible pairs `(s_Q color, M-vertex)` in tuple order.
    pub pairs: Vec<(usize, usize)>,
    /// Type of the tuple over all pairs, followed by the vertex.
    pub full: TypeId,
}

/// Explicit partial function from admissible pair sets to types.
pub type ColorTable = BTreeMap<Vec<(usize, usize)>, TypeId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum SynthColor {
    NewVertex,
    Column { s: usize, color: usize },
    Plain(usize),
    Tagged(u8, usize),
}

/// A subexpression together with the `G`-vertex of each value vertex, in creation order.
#[derive(Debug, Clone)]
pub struct Part {
    pub expr: Expr,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Reach {
    s: usize,
    h: usize,
    vertex: usize,
}

pub struct SynthesisContext {
    pub q: Graph,
    pub m: Graph,
    pub td: TreeDecomposition,
    pub forget: ForgetOrder,
    pub config: SynthesisConfig,
    pub r_sep: usize,
    /// Proper coloring of `Q` to the power `3 * r_sep`.
    pub s_q: Vec<usize>,
    /// `G` recolored with `(original color, s_Q color)`.
    pub gs: ColoredGraph,
    pub xi_graph: Graph,
    /// `Y_t` for every node.
    pub only_below: Vec<BTreeSet<usize>>,
    /// `Q` to the power `r_sep`, reflexive.
    pub param_graph: Graph,
    reach: Vec<Vec<Reach>>,
    types: TypeTable,
    base_types: HashMap<usize, TypeId>,
    running: Vec<RunningColor>,
    running_ids: HashMap<RunningColor, usize>,
    running_memo: HashMap<(usize, Vec<usize>), usize>,
    colors: Vec<SynthColor>,
    color_ids: HashMap<SynthColor, usize>,
}

impl SynthesisContext {
    pub fn new(
        q: &Graph,
        m: &Graph,
        td: &TreeDecomposition,
        g: &ColoredGraph,
        xi: &Formula,
        config: SynthesisConfig,
    ) -> Result<Self, SynthesisError> {
        let (nq, nm) = (q.vertex_count(), m.vertex_count());
        if g.vertex_count() != nq * nm {
            return Err(SynthesisError::ShapeMismatch { expected: nq * nm, got: g.vertex_count() });
        }
        for (u, v) in g.graph.edges() {
            let (a, b) = (ProductVertex::from_index(u, nm), ProductVertex::from_index(v, nm));
            let close = |x: usize, y: usize, h: &Graph| x == y || h.has_edge(x, y);
            if !close(a.q, b.q, q) || !close(a.m, b.m, m) {
                return Err(SynthesisError::NotInProduct(u, v));
            }
        }
        let xi_graph = interpret(g, xi)?;
        match check_strong_locality(g, xi, 2, config.r)? {
            Locality::Holds => {}
            witness => return Err(SynthesisError::NotLocal { r: config.r, witness }),
        }
        let td = if td.is_normalized() { td.clone() } else { td.normalize(m)? };
        td.validate(m).map_err(DecompError::from)?;
        let forget = forget_order(&td, nm)?;
        let r_sep = separation_radius(config.r, xi.quantifier_rank(), config.r_sep_cap);
        let s_q = greedy_proper_coloring(&power(q, 3 * r_sep, false)?);
        let s_count = s_q.iter().max().map_or(0, |&c| c + 1);
        let gs_colors = (0..g.vertex_count())
            .map(|v| g.colors[v] * s_count + s_q[ProductVertex::from_index(v, nm).q])
            .collect();
        let gs = ColoredGraph::new(g.graph.clone(), gs_colors);
        let wreach = wreach_all(m, &forget.rank, r_sep);
        let reach = (0..g.vertex_count())
            .map(|v| {
                let pv = ProductVertex::from_index(v, nm);
                let dist = q.bfs_from(&[pv.q]);
                let mut entries: Vec<Reach> = wreach[pv.m]
                    .iter()
                    .flat_map(|&h| {
                        let s_q = &s_q;
                        dist.iter().enumerate().filter(|(_, d)| d.is_some_and(|d| d <= r_sep)).map(move |(p, _)| Reach {
                            s: s_q[p],
                            h,
                            vertex: ProductVertex { q: p, m: h }.index(nm),
                        })
                    })
                    .collect();
                entries.sort_by_key(|e| (forget.rank[e.h], e.s));
                entries
            })
            .collect();
        Ok(SynthesisContext {
            q: q.clone(),
            m: m.clone(),
            only_below: td.only_below(nm),
            td,
            forget,
            config,
            r_sep,
            param_graph: power(q, r_sep, true)?,
            s_q,
            gs,
            xi_graph,
            reach,
            types: TypeTable::new(config.q_type, usize::MAX),
            base_types: HashMap::new(),
            running: vec![],
            running_ids: HashMap::new(),
            running_memo: HashMap::new(),
            colors: vec![],
            color_ids: HashMap::new(),
        })
    }

    fn vertex(&self, v: usize) -> ProductVertex {
        ProductVertex::from_index(v, self.m.vertex_count())
    }

    fn type_of(&mut self, tuple: &[usize]) -> TypeId {
        self.types.rank_type(&self.gs, tuple, self.config.q_type).expect("caps sized for synthesis")
    }

    fn base_type(&mut self, v: usize) -> TypeId {
        if let Some(&t) = self.base_types.get(&v) {
            return t;
        }
        let t = self.type_of(&[v]);
        self.base_types.insert(v, t);
        t
    }

    /// Running color of `v` once the vertices in `forgotten` are gone, as an interned id.
    fn running_id(&mut self, v: usize, forgotten: &BTreeSet<usize>) -> usize {
        let kept: Vec<usize> =
            (0..self.reach[v].len()).filter(|&i| !forgotten.contains(&self.reach[v][i].h)).collect();
        if let Some(&id) = self.running_memo.get(&(v, kept.clone())) {
            return id;
        }
        let mut tuple: Vec<usize> = kept.iter().map(|&i| self.reach[v][i].vertex).collect();
        tuple.push(v);
        let color = RunningColor {
            base: self.base_type(v),
            pairs: kept.iter().map(|&i| (self.reach[v][i].s, self.reach[v][i].h)).collect(),
            full: self.type_of(&tuple),
        };
        let next = self.running.len();
        let id = *self.running_ids.entry(color.clone()).or_insert(next);
        if id == next {
            self.running.push(color);
        }
        self.running_memo.insert((v, kept), id);
        id
    }

    pub fn initial_color(&mut self, v: usize) -> RunningColor {
        let id = self.running_id(v, &BTreeSet::new());
        self.running[id].clone()
    }

    pub fn restrict_color(&mut self, v: usize, t: usize) -> RunningColor {
        let y = self.only_below[t].clone();
        let id = self.running_id(v, &y);
        self.running[id].clone()
    }

    /// The running color of `v` at `t` as an explicit table over every admissible pair set.
    /// Exponential; meant for cross-checking the compact form on small instances.
    pub fn explicit_color(&mut self, v: usize, t: Option<usize>) -> ColorTable {
        let pv = self.vertex(v);
        let forgotten = t.map(|t| self.only_below[t].clone()).unwrap_or_default();
        let s_count = self.s_q.iter().max().map_or(0, |&c| c + 1);
        let hs: Vec<usize> = {
            let mut hs: Vec<usize> = self.reach[v].iter().map(|e| e.h).collect();
            hs.sort_unstable();
            hs.dedup();
            hs.retain(|h| !forgotten.contains(h));
            hs
        };
        let universe: Vec<(usize, usize)> = hs.iter().flat_map(|&h| (0..s_count).map(move |s| (s, h))).collect();
        let dist = self.q.bfs_from(&[pv.q]);
        let ball: Vec<usize> = (0..self.q.vertex_count()).filter(|&p| dist[p].is_some_and(|d| d <= self.r_sep)).collect();
        let mut table = ColorTable::new();
        for mask in 0u64..(1u64 << universe.len()) {
            let w: BTreeSet<(usize, usize)> =
                (0..universe.len()).filter(|i| mask >> i & 1 == 1).map(|i| universe[i]).collect();
            let mut z: Vec<(usize, usize)> = ball
                .iter()
                .flat_map(|&p| hs.iter().map(move |&h| (p, h)))
                .filter(|&(p, h)| w.contains(&(self.s_q[p], h)))
                .collect();
            let covered: BTreeSet<(usize, usize)> = z.iter().map(|&(p, h)| (self.s_q[p], h)).collect();
            if covered != w {
                continue;
            }
            z.sort_by_key(|&(p, h)| (self.forget.rank[h], self.s_q[p], p));
            let mut tuple: Vec<usize> =
                z.iter().map(|&(p, h)| ProductVertex { q: p, m: h }.index(self.m.vertex_count())).collect();
            tuple.push(v);
            let key = z.iter().map(|&(p, h)| (self.s_q[p], h)).collect();
            let ty = self.type_of(&tuple);
            table.insert(key, ty);
        }
        table
    }

    fn color(&mut self, c: SynthColor) -> usize {
        let next = self.colors.len();
        let id = *self.color_ids.entry(c).or_insert(next);
        if id == next {
            self.colors.push(c);
        }
        id
    }

    /// Column `V(Q) x {h}` of `xi(G)`, built one vertex at a time; every vertex ends with its
    /// initial color.
    pub fn build_column_expression(&mut self, h: usize) -> Part {
        let nm = self.m.vertex_count();
        let fresh = self.color(SynthColor::NewVertex);
        let mut expr: Option<Expr> = None;
        let mut vertices = vec![];
        let mut final_colors = BTreeSet::new();
        for p in self.q.vertices() {
            let v = ProductVertex { q: p, m: h }.index(nm);
            let initial = self.running_id(v, &BTreeSet::new());
            let own = self.color(SynthColor::Column { s: self.s_q[p], color: initial });
            final_colors.insert((own, initial));
            expr = Some(match expr {
                None => Expr::create(p, own),
                Some(e) => {
                    let mut e = Expr::union(e, Expr::create(p, fresh));
                    let mut targets = BTreeSet::new();
                    for &u in &vertices {
                        if self.xi_graph.has_edge(u, v) {
                            let pu = self.vertex(u).q;
                            let cu = self.running_id(u, &BTreeSet::new());
                            targets.insert(self.color(SynthColor::Column { s: self.s_q[pu], color: cu }));
                        }
                    }
                    for c in targets {
                        e = e.add_edges(fresh, c);
                    }
                    e.recolor(fresh, own)
                }
            });
            vertices.push(v);
        }
        let mut expr = expr.expect("Q has a vertex");
        for (own, initial) in final_colors {
            let plain = self.color(SynthColor::Plain(initial));
            expr = expr.recolor(own, plain);
        }
        Part { expr, vertices }
    }

    /// Combines the expressions of the children of `t` (and the column of the vertex forgotten
    /// at `t`, if any) into one valued `xi(G)[V(Q) x Y_t]`, colored by running colors at `t`.
    pub fn assemble_node(&mut self, t: usize, children: Vec<(usize, Option<Part>)>) -> Result<Option<Part>, SynthesisError> {
        let below: BTreeSet<usize> = children.iter().flat_map(|&(c, _)| self.only_below[c].iter().copied()).collect();
        let new: Vec<usize> = self.only_below[t].difference(&below).copied().collect();
        if new.len() > 1 {
            return Err(SynthesisError::NotSmooth { node: t });
        }
        // Tag each part's colors with its position: children first, the new column last.
        let mut parts: Vec<(Part, Vec<usize>)> = vec![];
        for (child, part) in children {
            if let Some(part) = part {
                let y = self.only_below[child].clone();
                let colors = part.vertices.iter().map(|&v| self.running_id(v, &y)).collect();
                parts.push((part, colors));
            }
        }
        if let Some(&h) = new.first() {
            let part = self.build_column_expression(h);
            let colors = part.vertices.iter().map(|&v| self.running_id(v, &BTreeSet::new())).collect();
            parts.push((part, colors));
        }
        if parts.is_empty() {
            return Ok(None);
        }
        let mut owner: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut tagged_parts = vec![];
        let mut vertices = vec![];
        for (i, (part, colors)) in parts.into_iter().enumerate() {
            let tag = i as u8 + 1;
            let mut expr = part.expr;
            let mut seen = BTreeSet::new();
            for (&v, &c) in part.vertices.iter().zip(&colors) {
                let tagged = self.color(SynthColor::Tagged(tag, c));
                owner.insert(v, (i, tagged));
                if seen.insert(c) {
                    let plain = self.color(SynthColor::Plain(c));
                    expr = expr.recolor(plain, tagged);
                }
            }
            vertices.extend(part.vertices);
            tagged_parts.push(expr);
        }
        let mut expr = Expr::union_all(tagged_parts).expect("nonempty");
        let mut pairs = BTreeSet::new();
        for &u in &vertices {
            let (i, cu) = owner[&u];
            for w in self.xi_graph.neighbors(u) {
                if let Some(&(j, cw)) = owner.get(&w) {
                    if i < j {
                        pairs.insert((cu, cw));
                    }
                }
            }
        }
        for (a, b) in pairs {
            expr = expr.add_edges(a, b);
        }
        let y = self.only_below[t].clone();
        let mut retag: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in &vertices {
            let from = owner[&v].1;
            let to = self.running_id(v, &y);
            let to = self.color(SynthColor::Plain(to));
            if *retag.entry(from).or_insert(to) != to {
                return Err(SynthesisError::ColorAudit { node: t, color: from });
            }
        }
        for (from, to) in retag {
            expr = expr.recolor(from, to);
        }
        Ok(Some(Part { expr, vertices }))
    }

    /// Compares the value of `part` with `xi(G)` on its vertices, and checks parameters and colors.
    pub fn check_part(&mut self, t: usize, part: &Part) -> Result<(), SynthesisError> {
        let value = evaluate(&part.expr, &self.param_graph)?;
        let expected: BTreeSet<usize> =
            part.vertices.iter().copied().collect();
        let nm = self.m.vertex_count();
        let want: BTreeSet<usize> = self
            .only_below[t]
            .iter()
            .flat_map(|&h| self.q.vertices().map(move |p| ProductVertex { q: p, m: h }.index(nm)))
            .collect();
        if expected != want || expected.len() != part.vertices.len() {
            return Err(SynthesisError::Invariant { node: t, what: "vertex set" });
        }
        if !value.params_are_homomorphic(&self.param_graph) {
            return Err(SynthesisError::Invariant { node: t, what: "parameter homomorphism" });
        }
        let y = self.only_below[t].clone();
        for (i, &v) in part.vertices.iter().enumerate() {
            if value.params[i] != self.vertex(v).q {
                return Err(SynthesisError::Invariant { node: t, what: "parameter" });
            }
            let c = self.running_id(v, &y);
            if value.colors[i] != self.color(SynthColor::Plain(c)) {
                return Err(SynthesisError::Invariant { node: t, what: "running color" });
            }
        }
        for i in 0..part.vertices.len() {
            for j in i + 1..part.vertices.len() {
                let (u, v) = (part.vertices[i], part.vertices[j]);
                match (value.graph.has_edge(i, j), self.xi_graph.has_edge(u, v)) {
                    (false, true) => return Err(SynthesisError::MissingEdge { node: t, u, v }),
                    (true, false) => {
                        let suggest = self.config.q_type + 1;
                        return Err(SynthesisError::TypeRankTooLow { node: t, u, v, suggest });
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn running_color_count(&self) -> usize {
        self.running.len()
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisReport {
    /// Expression with colors renumbered to `0..palette`; intended parameter graph is `Q` to the
    /// power `r`, reflexive.
    pub expr: Expr,
    /// `G`-vertex of each value vertex, in creation order.
    pub vertices: Vec<ProductVertex>,
    pub palette: usize,
    pub r: usize,
    pub r_sep: usize,
    pub q_type: usize,
    /// Distinct colors in each node's value, by node id (zero where the value is empty).
    pub node_colors: Vec<usize>,
    pub running_colors: usize,
    /// Value over `Q` to the power `r_sep` equals `xi(G)`.
    pub verified_sep: bool,
    /// Value over `Q` to the power `r` equals `xi(G)`.
    pub verified: bool,
}

pub fn synthesize(ctx: &mut SynthesisContext) -> Result<SynthesisReport, SynthesisError> {
    let order = ctx.td.bfs_order().expect("normalized decomposition is a tree");
    let kids = ctx.td.children();
    let mut done: Vec<Option<Option<Part>>> = vec![None; ctx.td.nodes];
    let mut node_colors = vec![0; ctx.td.nodes];
    for &t in order.iter().rev() {
        let children = kids[t].iter().map(|&c| (c, done[c].take().expect("children first"))).collect();
        let part = ctx.assemble_node(t, children)?;
        if let Some(part) = &part {
            if ctx.config.check_nodes {
                ctx.check_part(t, part)?;
            }
            let y = ctx.only_below[t].clone();
            let distinct: BTreeSet<usize> = part.vertices.iter().map(|&v| ctx.running_id(v, &y)).collect();
            node_colors[t] = distinct.len();
        }
        done[t] = Some(part);
    }
    let root = done[ctx.td.root].take().flatten().expect("root covers every vertex");
    let expr = renumber_colors(&root.expr)?;
    let vertices: Vec<ProductVertex> = root.vertices.iter().map(|&v| ctx.vertex(v)).collect();
    let agrees = |param_graph: &Graph| -> Result<bool, SynthesisError> {
        let value = evaluate(&expr, param_graph)?;
        let n = root.vertices.len();
        Ok((0..n).all(|i| {
            (i + 1..n).all(|j| value.graph.has_edge(i, j) == ctx.xi_graph.has_edge(root.vertices[i], root.vertices[j]))
        }))
    };
    let verified_sep = agrees(&ctx.param_graph)?;
    let verified = agrees(&power(&ctx.q, ctx.config.r, true)?)?;
    Ok(SynthesisReport {
        palette: palette(&expr),
        expr,
        vertices,
        r: ctx.config.r,
        r_sep: ctx.r_sep,
        q_type: ctx.config.q_type,
        node_colors,
        running_colors: ctx.running_color_count(),
        verified_sep,
        verified,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenumberError {
    #[error("no free color number below {palette} at a recoloring")]
    Exhausted { palette: usize },
}

/// Renames colors to `0..palette(expr)` top-down: the root's colors are numbered in order, and each
/// child inherits its parent's numbering except for a color that a recoloring merges away, which
/// takes the smallest number the parent does not use.
pub fn renumber_colors(expr: &Expr) -> Result<Expr, RenumberError> {
    // Pre-order flattening; children always follow their parent.
    let mut nodes: Vec<&Expr> = vec![];
    let mut kids: Vec<Vec<usize>> = vec![];
    let mut stack = vec![(expr, None::<usize>)];
    while let Some((e, parent)) = stack.pop() {
        let id = nodes.len();
        nodes.push(e);
        kids.push(vec![]);
        if let Some(p) = parent {
            kids[p].push(id);
        }
        match e {
            Expr::Create { .. } => {}
            Expr::Union { left, right } => {
                stack.push((right, Some(id)));
                stack.push((left, Some(id)));
            }
            Expr::Recolor { child, .. } | Expr::AddEdges { child, .. } => stack.push((child, Some(id))),
        }
    }
    // Union children were pushed right first, so they are recorded in left-right order.
    let mut present: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes.len()];
    for i in (0..nodes.len()).rev() {
        present[i] = match nodes[i] {
            Expr::Create { color, .. } => BTreeSet::from([*color]),
            Expr::Union { .. } => present[kids[i][0]].union(&present[kids[i][1]]).copied().collect(),
            Expr::Recolor { from, to, .. } => {
                let mut k = present[kids[i][0]].clone();
                if k.remove(from) {
                    k.insert(*to);
                }
                k
            }
            Expr::AddEdges { .. } => present[kids[i][0]].clone(),
        };
    }
    let budget = present.iter().map(BTreeSet::len).max().unwrap_or(0);
    let mut numbering: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); nodes.len()];
    numbering[0] = present[0].iter().enumerate().map(|(i, &c)| (c, i)).collect();
    for i in 0..nodes.len() {
        for &k in &kids[i] {
            let own = &numbering[i];
            let mut map: BTreeMap<usize, usize> =
                present[k].iter().filter_map(|c| own.get(c).map(|&n| (*c, n))).collect();
            if let Expr::Recolor { from, to, .. } = nodes[i] {
                if present[k].contains(from) && from != to {
                    let number = if present[k].contains(to) {
                        let used: BTreeSet<usize> = own.values().copied().collect();
                        (0..budget).find(|n| !used.contains(n)).ok_or(RenumberError::Exhausted { palette: budget })?
                    } else {
                        own[to]
                    };
                    map.insert(*from, number);
                }
            }
            numbering[k] = map;
        }
    }
    let mut built: Vec<Option<Expr>> = vec![None; nodes.len()];
    for i in (0..nodes.len()).rev() {
        let mut take = |k: usize| built[kids[i][k]].take().expect("built bottom-up");
        let own = &numbering[i];
        let e = match nodes[i] {
            Expr::Create { param, color } => Expr::create(*param, own[color]),
            Expr::Union { .. } => {
                let left = take(0);
                Expr::union(left, take(1))
            }
            Expr::Recolor { from, to, .. } => {
                let child = take(0);
                match numbering[kids[i][0]].get(from) {
                    Some(&a) if a != own[to] => child.recolor(a, own[to]),
                    _ => child,
                }
            }
            Expr::AddEdges { c1, c2, .. } => {
                let child = take(0);
                match (own.get(c1), own.get(c2)) {
                    (Some(&a), Some(&b)) => child.add_edges(a, b),
                    _ => child,
                }
            }
        };
        built[i] = Some(e);
    }
    Ok(built[0].take().expect("root"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ops::Not;
    use crate::graph::{strong_product, Generator};
    use crate::logic::{x, y};
    use crate::tree_decomp::decompose_small;

    fn path(n: usize) -> Graph {
        Generator::Path(n).build().unwrap()
    }

    fn full_product(q: &Graph, m: &Graph, color: usize) -> ColoredGraph {
        let g = strong_product(q, m);
        let n = g.vertex_count();
        ColoredGraph::new(g, vec![color; n])
    }

    fn context(q: &Graph, m: &Graph, g: &ColoredGraph, xi: &Formula, r: usize) -> SynthesisContext {
        let td = decompose_small(m, 10).unwrap();
        let config = SynthesisConfig { r, ..SynthesisConfig::default() };
        SynthesisContext::new(q, m, &td, g, xi, config).unwrap()
    }

    #[test]
    fn separation_radius_caps() {
        assert_eq!(separation_radius(1, 0, 16), 1);
        assert_eq!(separation_radius(2, 1, 16), 4);
        assert_eq!(separation_radius(1, 3, 16), 16);
        assert_eq!(separation_radius(20, 3, 16), 20);
    }

    #[test]
    fn renumber_reuses_merged_color() {
        let e = Expr::union(Expr::create(0, 7), Expr::create(0, 9)).add_edges(7, 9).recolor(7, 9);
        let out = renumber_colors(&e).unwrap();
        let h = crate::expr::looped_point();
        assert_eq!(evaluate(&out, &h).unwrap().graph, evaluate(&e, &h).unwrap().graph);
        assert_eq!(palette(&out), 2);
        let mut colors: Vec<usize> = out.creates().into_iter().map(|(_, c)| c).collect();
        colors.sort_unstable();
        assert_eq!(colors, vec![0, 1]);
    }

    #[test]
    fn renumber_is_a_bijection_on_small_palettes() {
        let e = Expr::union(Expr::create(0, 40), Expr::create(1, 50)).add_edges(40, 50);
        let out = renumber_colors(&e).unwrap();
        assert_eq!(out, Expr::union(Expr::create(0, 0), Expr::create(1, 1)).add_edges(0, 1));
    }

    #[test]
    fn path_times_point() {
        let (q, m) = (path(2), path(1));
        let g = full_product(&q, &m, 1);
        let xi = Formula::Edge(x(1), x(2));
        let mut ctx = context(&q, &m, &g, &xi, 1);
        let report = synthesize(&mut ctx).unwrap();
        assert!(report.verified && report.verified_sep);
        let value = evaluate(&report.expr, &power(&q, 1, true).unwrap()).unwrap();
        assert_eq!(value.graph, q);
    }

    #[test]
    fn false_gives_edgeless() {
        let (q, m) = (path(3), path(2));
        let g = full_product(&q, &m, 0);
        let mut ctx = context(&q, &m, &g, &Formula::False, 1);
        let report = synthesize(&mut ctx).unwrap();
        assert!(report.verified);
        assert_eq!(evaluate(&report.expr, &power(&q, 1, true).unwrap()).unwrap().graph.edge_count(), 0);
    }

    #[test]
    fn initial_color_base_is_vertex_type() {
        let (q, m) = (path(3), path(2));
        let g = full_product(&q, &m, 0);
        let mut ctx = context(&q, &m, &g, &Formula::Edge(x(1), x(2)), 1);
        for v in 0..6 {
            let c = ctx.initial_color(v);
            assert_eq!(c.base, ctx.type_of(&[v]));
            let explicit = ctx.explicit_color(v, None);
            assert_eq!(explicit[&vec![]], c.base);
            assert_eq!(explicit.len(), 1 << c.pairs.len());
        }
    }

    #[test]
    fn restriction_at_root_keeps_only_empty_set() {
        let (q, m) = (path(3), path(2));
        let g = full_product(&q, &m, 0);
        let mut ctx = context(&q, &m, &g, &Formula::Edge(x(1), x(2)), 1);
        let root = ctx.td.root;
        for v in 0..6 {
            assert!(ctx.restrict_color(v, root).pairs.is_empty());
            assert_eq!(ctx.explicit_color(v, Some(root)).len(), 1);
        }
    }

    #[test]
    fn compact_colors_match_explicit_tables() {
        let (q, m) = (path(3), path(2));
        let n = 6;
        let mut g = full_product(&q, &m, 0);
        g.colors = vec![0, 1, 1, 0, 0, 1];
        g.graph.remove_edge(0, 3);
        let mut ctx = context(&q, &m, &g, &Formula::Edge(x(1), x(2)), 1);
        let nodes: Vec<Option<usize>> = std::iter::once(None).chain((0..ctx.td.nodes).map(Some)).collect();
        for &t in &nodes {
            let compact: Vec<RunningColor> = (0..n)
                .map(|v| match t {
                    None => ctx.initial_color(v),
                    Some(t) => ctx.restrict_color(v, t),
                })
                .collect();
            let explicit: Vec<ColorTable> = (0..n).map(|v| ctx.explicit_color(v, t)).collect();
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(compact[a] == compact[b], explicit[a] == explicit[b], "node {t:?}, {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn restriction_is_monotone_towards_the_root() {
        let (q, m) = (path(3), path(3));
        let g = full_product(&q, &m, 0);
        let mut ctx = context(&q, &m, &g, &Formula::Edge(x(1), x(2)), 1);
        for t in 0..ctx.td.nodes {
            if let Some(p) = ctx.td.parent[t] {
                for v in 0..9 {
                    let below: BTreeSet<_> = ctx.restrict_color(v, t).pairs.into_iter().collect();
                    let above: BTreeSet<_> = ctx.restrict_color(v, p).pairs.into_iter().collect();
                    assert!(above.is_subset(&below));
                }
            }
        }
    }

    #[test]
    fn column_of_full_product_is_q() {
        let (q, m) = (path(2), path(2));
        let g = full_product(&q, &m, 0);
        let mut ctx = context(&q, &m, &g, &Formula::Edge(x(1), x(2)), 1);
        let part = ctx.build_column_expression(1);
        let value = evaluate(&part.expr, &ctx.param_graph).unwrap();
        assert_eq!(value.graph, q);
        assert_eq!(part.vertices, vec![1, 3]);
    }

    #[test]
    fn distance_two_on_black_vertices() {
        let (q, m) = (path(4), path(2));
        let mut g = full_product(&q, &m, 0);
        for v in [0, 2, 3, 5, 6] {
            g.colors[v] = 1;
        }
        for (u, v) in [(0, 3), (2, 5), (4, 7)] {
            g.graph.remove_edge(u, v);
        }
        let black = |v| Formula::Color(1, v);
        let xi = Formula::And(vec![
            Formula::Eq(x(1), x(2)).not(),
            black(x(1)),
            black(x(2)),
            Formula::Or(vec![
                Formula::Edge(x(1), x(2)),
                Formula::exists(1, Formula::And(vec![Formula::Edge(x(1), y(1)), Formula::Edge(y(1), x(2))])),
            ]),
        ]);
        let mut ctx = context(&q, &m, &g, &xi, 2);
        let report = synthesize(&mut ctx).unwrap();
        assert!(report.verified);
    }

    #[test]
    fn rejects_non_local_formula() {
        let (q, m) = (path(4), path(1));
        let g = full_product(&q, &m, 0);
        let td = decompose_small(&m, 10).unwrap();
        let xi = Formula::Edge(x(1), x(2)).not();
        let err = SynthesisContext::new(&q, &m, &td, &g, &xi, SynthesisConfig::default()).err().unwrap();
        assert!(matches!(err, SynthesisError::NotLocal { .. }));
    }
}
