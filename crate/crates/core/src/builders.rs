//! Constructions of expressions: grids, strong products, and path-power contraction.

use thiserror::Error;

use crate::expr::{evaluate, looped_point, Expr, ExprError, LabeledGraph};
use crate::graph::{power, Generator, Graph, ProductVertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("dimensions must be positive, got {0}x{1}")]
    BadDimensions(usize, usize),
    #[error("parameter graph must be reflexive")]
    NotReflexive,
    #[error("kept vertex {0} is not a vertex of the product")]
    AbsentVertex(usize),
    #[error("no product vertex selected")]
    EmptySelection,
    #[error("contraction needs r >= 1")]
    ZeroRadius,
    #[error("parameter graph is not the reflexive {0}-th power of a path")]
    NotPathPower(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Frozen color for finished grid columns.
pub const GRID_BLUE: usize = 0;
const RED: (usize, usize) = (1, 2);
const GREEN: (usize, usize) = (3, 4);

fn grid_shades(column: usize) -> (usize, usize) {
    if column.is_multiple_of(2) {
        RED
    } else {
        GREEN
    }
}

/// Expression for the `a x b` grid over the reflexive path on `b` vertices.
///
/// Vertex `(column i, row j)` has parameter `j` and is value vertex `i*b + j`.
/// Rows alternate dark and light shades; columns alternate red and green. After a
/// column is joined to its right neighbour it is recolored to [`GRID_BLUE`].
pub fn grid_expression(a: usize, b: usize) -> Result<Expr, BuildError> {
    if a == 0 || b == 0 {
        return Err(BuildError::BadDimensions(a, b));
    }
    let column = |i: usize| {
        let (dark, light) = grid_shades(i);
        let col = Expr::union_all((0..b).map(|j| Expr::create(j, if j % 2 == 0 { dark } else { light })))
            .expect("b >= 1");
        if b > 1 {
            col.add_edges(dark, light)
        } else {
            col
        }
    };
    let mut acc = column(0);
    for i in 1..a {
        let (prev_dark, prev_light) = grid_shades(i - 1);
        let (dark, light) = grid_shades(i);
        acc = Expr::union(acc, column(i))
            .add_edges(prev_dark, dark)
            .add_edges(prev_light, light)
            .recolor(prev_dark, GRID_BLUE)
            .recolor(prev_light, GRID_BLUE);
    }
    Ok(acc)
}

/// Injective placement of a graph's vertices inside `left ⊠ right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductEmbedding {
    pub left: Graph,
    pub right: Graph,
    pub map: Vec<ProductVertex>,
}

impl ProductEmbedding {
    fn product_adjacent(&self, a: ProductVertex, b: ProductVertex) -> bool {
        let near = |g: &Graph, x: usize, y: usize| x == y || g.has_edge(x, y);
        a != b && near(&self.left, a.q, b.q) && near(&self.right, a.m, b.m)
    }

    /// Whether `g` is exactly the subgraph of the product induced by the image.
    pub fn is_induced_embedding_of(&self, g: &Graph) -> bool {
        let mut image = self.map.clone();
        image.sort_unstable();
        image.dedup();
        image.len() == self.map.len()
            && self.map.len() == g.vertex_count()
            && g.vertices().all(|u| {
                (u + 1..g.vertex_count())
                    .all(|v| g.has_edge(u, v) == self.product_adjacent(self.map[u], self.map[v]))
            })
    }
}

/// Places the value of an expression over a reflexive `ho` inside `(ho without loops) ⊠ M`,
/// where `M` is the deparameterized value, via `v ↦ [param(v), v]`.
pub fn expression_to_product(expr: &Expr, ho: &Graph) -> Result<(LabeledGraph, ProductEmbedding), BuildError> {
    if !ho.is_reflexive() {
        return Err(BuildError::NotReflexive);
    }
    let value = evaluate(expr, ho)?;
    let right = evaluate(&expr.deparameterize(), &looped_point())?.graph;
    let map = value.params.iter().enumerate().map(|(v, &q)| ProductVertex { q, m: v }).collect();
    Ok((value, ProductEmbedding { left: ho.without_loops(), right, map }))
}

/// Expression over `ho` whose value is the subgraph of `(ho without loops) ⊠ M` induced by `keep`
/// (all vertices when `None`), where `M` is the value of `m_expr` over the looped point.
///
/// Returns the expression and, for each of its value vertices, the product vertex it stands for.
pub fn product_to_expression(
    ho: &Graph,
    m_expr: &Expr,
    keep: Option<&[usize]>,
) -> Result<(Expr, Vec<ProductVertex>), BuildError> {
    if !ho.is_reflexive() {
        return Err(BuildError::NotReflexive);
    }
    let m_size = m_expr.vertex_count();
    let total = ho.vertex_count() * m_size;
    let mut kept = vec![keep.is_none(); total];
    for &v in keep.unwrap_or(&[]) {
        *kept.get_mut(v).ok_or(BuildError::AbsentVertex(v))? = true;
    }
    let mut next_m = 0;
    let mut placed = vec![];
    let expr = lift_rows(m_expr, &mut |color| {
        let m = next_m;
        next_m += 1;
        let row: Vec<usize> =
            ho.vertices().filter(|&q| kept[ProductVertex { q, m }.index(m_size)]).collect();
        placed.extend(row.iter().map(|&q| ProductVertex { q, m }));
        Expr::union_all(row.into_iter().map(|q| Expr::create(q, color))).map(|e| e.add_edges(color, color))
    });
    let expr = expr.ok_or(BuildError::EmptySelection)?;
    Ok((expr, placed))
}

/// Rebuilds `e` with each Create replaced by `row(color)`, dropping subtrees whose rows are all empty.
fn lift_rows(e: &Expr, row: &mut impl FnMut(usize) -> Option<Expr>) -> Option<Expr> {
    match e {
        Expr::Create { color, .. } => row(*color),
        Expr::Union { left, right } => match (lift_rows(left, row), lift_rows(right, row)) {
            (Some(l), Some(r)) => Some(Expr::union(l, r)),
            (l, r) => l.or(r),
        },
        Expr::Recolor { from, to, child } => lift_rows(child, row).map(|c| c.recolor(*from, *to)),
        Expr::AddEdges { c1, c2, child } => lift_rows(child, row).map(|c| c.add_edges(*c1, *c2)),
    }
}

/// Expression for the `n x n x n` grid over the reflexive path on `n` vertices.
///
/// Value vertex `i` is grid vertex `i` (row-major), and its parameter is the middle coordinate.
/// Slices along the first coordinate are built one at a time; inside a slice a vertex is colored by
/// its last coordinate and the parity of its parameter, so `4n + 1` colors suffice.
pub fn grid3d_expression(n: usize) -> Result<Expr, BuildError> {
    if n == 0 {
        return Err(BuildError::BadDimensions(n, n));
    }
    const DEAD: usize = 0;
    let color = |slice: usize, z: usize, parity: usize| 1 + (slice % 2) * 2 * n + 2 * z + parity;
    let slice = |x: usize| {
        let mut e = Expr::union_all(
            (0..n).flat_map(|y| (0..n).map(move |z| (y, z))).map(|(y, z)| Expr::create(y, color(x, z, y % 2))),
        )
        .expect("n >= 1");
        for z in 0..n {
            if n > 1 {
                e = e.add_edges(color(x, z, 0), color(x, z, 1));
            }
            if z + 1 < n {
                for parity in 0..2 {
                    e = e.add_edges(color(x, z, parity), color(x, z + 1, parity));
                }
            }
        }
        e
    };
    let mut acc = slice(0);
    for x in 1..n {
        acc = Expr::union(acc, slice(x));
        for z in 0..n {
            for parity in 0..2 {
                acc = acc.add_edges(color(x - 1, z, parity), color(x, z, parity));
            }
        }
        for z in 0..n {
            for parity in 0..2 {
                acc = acc.recolor(color(x - 1, z, parity), DEAD);
            }
        }
    }
    Ok(acc)
}

/// Expression for any graph over a reflexive path, with parameters given by breadth-first layers
/// (each component layered from its smallest vertex).
///
/// Returns the expression, the reflexive path it lives on, and the vertex of `g` behind each value
/// vertex. Every vertex keeps a private color until the layer after its own is finished, so the
/// palette is at most one more than the largest pair of consecutive layers.
pub fn layered_expression(g: &Graph) -> Result<(Expr, Graph, Vec<usize>), BuildError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(BuildError::EmptySelection);
    }
    let mut layer = vec![usize::MAX; n];
    for root in 0..n {
        if layer[root] == usize::MAX {
            for (v, d) in g.bfs_from(&[root]).into_iter().enumerate() {
                if let Some(d) = d {
                    layer[v] = d;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (layer[v], v));
    const DEAD: usize = 0;
    let own = |v: usize| v + 1;
    let mut created = vec![false; n];
    let mut acc: Option<Expr> = None;
    let mut start = 0;
    while start < n {
        let depth = layer[order[start]];
        let end = order[start..].iter().position(|&v| layer[v] != depth).map_or(n, |i| start + i);
        for &v in &order[start..end] {
            let mut e = match acc.take() {
                None => Expr::create(depth, own(v)),
                Some(a) => Expr::union(a, Expr::create(depth, own(v))),
            };
            for u in g.neighbors(v) {
                if created[u] {
                    e = e.add_edges(own(u), own(v));
                }
            }
            created[v] = true;
            acc = Some(e);
        }
        if depth > 0 {
            let mut e = acc.take().expect("nonempty");
            for &v in order[..start].iter().filter(|&&v| layer[v] + 1 == depth) {
                e = e.recolor(own(v), DEAD);
            }
            acc = Some(e);
        }
        start = end;
    }
    let length = layer.iter().max().expect("n > 0") + 1;
    let path = Generator::Path(length).build().expect("length > 0").reflexive_closure();
    Ok((acc.expect("n > 0"), path, order))
}

/// Rewrites an expression over the reflexive `r`-th power of the path `p_0..p_{n-1}` into one
/// over the reflexive path on the blocks `floor(i/r)`, emulating the lost adjacencies with colors.
///
/// A vertex of color `c` at `p_i` gets color `c*3r + (i mod 3r)`. Edge additions are kept only
/// between residue classes whose difference is at most `r` modulo `3r`; together with block
/// adjacency this pins the index difference to at most `r`, so the value is unchanged.
pub fn contract_path_power(expr: &Expr, param_graph: &Graph, r: usize) -> Result<(Expr, Graph), BuildError> {
    if r == 0 {
        return Err(BuildError::ZeroRadius);
    }
    let n = param_graph.vertex_count();
    let expected = if n == 0 {
        Graph::new(0)
    } else {
        power(&Generator::Path(n).build().expect("n > 0"), r, true).expect("r > 0")
    };
    if *param_graph != expected {
        return Err(BuildError::NotPathPower(r));
    }
    let blocks = n.div_ceil(r);
    let target = if blocks == 0 {
        Graph::new(0)
    } else {
        Generator::Path(blocks).build().expect("blocks > 0").reflexive_closure()
    };
    let period = 3 * r;
    let close = |a: usize, b: usize| {
        let d = (a + period - b) % period;
        d <= r || d >= period - r
    };
    fn walk(e: &Expr, period: usize, n: usize, r: usize, close: &impl Fn(usize, usize) -> bool) -> Result<Expr, BuildError> {
        Ok(match e {
            Expr::Create { param, color } => {
                if *param >= n {
                    return Err(ExprError::ParamOutOfRange { param: *param, n }.into());
                }
                Expr::create(param / r, color * period + param % period)
            }
            Expr::Union { left, right } => {
                Expr::union(walk(left, period, n, r, close)?, walk(right, period, n, r, close)?)
            }
            Expr::Recolor { from, to, child } => {
                let mut out = walk(child, period, n, r, close)?;
                if from != to {
                    for a in 0..period {
                        out = out.recolor(from * period + a, to * period + a);
                    }
                }
                out
            }
            Expr::AddEdges { c1, c2, child } => {
                let mut out = walk(child, period, n, r, close)?;
                for a in 0..period {
                    for b in 0..period {
                        if close(a, b) && (c1 != c2 || a <= b) {
                            out = out.add_edges(c1 * period + a, c2 * period + b);
                        }
                    }
                }
                out
            }
        })
    }
    Ok((walk(expr, period, n, r, &close)?, target))
}
