//! Perturbations of graphs and an instance-level checker for the color lower bounds on
//! expressions over reflexive paths valued perturbed 3D grids or disjoint pinned grids.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{evaluate, palette, Expr, ExprError};
use crate::graph::{grid_index, Generator, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LowerBoundError {
    #[error("perturbation covers {got} vertices, graph has {expected}")]
    PartitionMismatch { expected: usize, got: usize },
    #[error("vertex {vertex} is in class {class}, but there are only {k} classes")]
    ClassOutOfRange { vertex: usize, class: usize, k: usize },
    #[error("a class is still small in the cube of side {} at {:?}, which cannot shrink further", .0.side, .0.origin)]
    GridTooSmall(Subgrid),
    #[error("a balanced split needs at least 3 vertices, found {0}")]
    TooFewVertices(usize),
    #[error("partition is not 1/3-balanced: {a} of {total} vertices on one side")]
    Imbalanced { a: usize, total: usize },
    #[error("grids of dimension {0} are not supported")]
    BadDimension(usize),
    #[error("parameter graph is not a reflexive path")]
    NotAReflexivePath,
    #[error("expression value differs from the perturbed grid: {0}")]
    WrongValue(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Partition into `k` labelled classes with a symmetric flip relation on the labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    pub k: usize,
    /// Class of every vertex.
    pub parts: Vec<usize>,
    /// Flipped pairs, stored with the smaller label first.
    pub flips: BTreeSet<(usize, usize)>,
}

impl Perturbation {
    pub fn new(k: usize, parts: Vec<usize>, flips: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, LowerBoundError> {
        if let Some((vertex, &class)) = parts.iter().enumerate().find(|(_, &c)| c >= k) {
            return Err(LowerBoundError::ClassOutOfRange { vertex, class, k });
        }
        let flips = flips.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect::<BTreeSet<_>>();
        if let Some(&(_, b)) = flips.iter().find(|&&(_, b)| b >= k) {
            return Err(LowerBoundError::ClassOutOfRange { vertex: usize::MAX, class: b, k });
        }
        Ok(Perturbation { k, parts, flips })
    }

    /// One class, no flips.
    pub fn identity(n: usize) -> Self {
        Perturbation { k: 1, parts: vec![0; n], flips: BTreeSet::new() }
    }

    pub fn is_flipped(&self, a: usize, b: usize) -> bool {
        self.flips.contains(&(a.min(b), a.max(b)))
    }

    pub fn class_sizes(&self, vertices: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for v in vertices {
            sizes[self.parts[v]] += 1;
        }
        sizes
    }

    /// The same classes and flips on the vertices `keep`, renumbered `0..keep.len()`.
    pub fn restrict(&self, keep: &[usize]) -> Perturbation {
        Perturbation { k: self.k, parts: keep.iter().map(|&v| self.parts[v]).collect(), flips: self.flips.clone() }
    }
}

/// `uv` is an edge of the result iff it is an edge of `g` XOR the classes of `u` and `v` are flipped.
pub fn apply_perturbation(g: &Graph, p: &Perturbation) -> Result<Graph, LowerBoundError> {
    let n = g.vertex_count();
    if p.parts.len() != n {
        return Err(LowerBoundError::PartitionMismatch { expected: n, got: p.parts.len() });
    }
    let mut out = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if g.has_edge(u, v) != p.is_flipped(p.parts[u], p.parts[v]) {
                out.add_edge(u, v);
            }
        }
    }
    for v in g.loops() {
        out.add_loop(v);
    }
    Ok(out)
}

/// More than this many vertices of a class inside a 3D subgrid make the class large there.
pub const SMALL_3D: usize = 12;
/// More than this many grid vertices make a class large in the pinned-grid setting.
pub const SMALL_PINNED: usize = 8;

/// Axis-aligned cube inside the `n x n x n` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Subgrid {
    pub origin: [usize; 3],
    pub side: usize,
}

impl Subgrid {
    /// Vertices of the cube in the ambient grid, in the cube's own row-major order.
    pub fn vertices(&self, n: usize) -> Vec<usize> {
        let s = self.side;
        let mut out = Vec::with_capacity(s * s * s);
        for a in 0..s {
            for b in 0..s {
                for c in 0..s {
                    let o = self.origin;
                    out.push(grid_index(&[n, n, n], &[o[0] + a, o[1] + b, o[2] + c]));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanSubgrid {
    pub subgrid: Subgrid,
    pub rounds: usize,
    /// The perturbation on the cube's vertices (cube row-major order).
    pub restricted: Perturbation,
}

/// Repeatedly moves to the first of the 27 third-size subcubes that avoids a class meeting the
/// current cube in between 1 and 12 vertices, until no such class remains.
pub fn prune_to_clean_subgrid(n: usize, p: &Perturbation) -> Result<CleanSubgrid, LowerBoundError> {
    if p.parts.len() != n * n * n {
        return Err(LowerBoundError::PartitionMismatch { expected: n * n * n, got: p.parts.len() });
    }
    let mut cube = Subgrid { origin: [0; 3], side: n };
    let mut rounds = 0;
    loop {
        let vertices = cube.vertices(n);
        let sizes = p.class_sizes(vertices.iter().copied());
        let Some(small) = (0..p.k).find(|&i| (1..=SMALL_3D).contains(&sizes[i])) else {
            return Ok(CleanSubgrid { subgrid: cube, rounds, restricted: p.restrict(&vertices) });
        };
        let third = cube.side / 3;
        if third == 0 {
            return Err(LowerBoundError::GridTooSmall(cube));
        }
        let candidates = (0..27).map(|i| Subgrid {
            origin: [
                cube.origin[0] + (i / 9) * third,
                cube.origin[1] + (i / 3 % 3) * third,
                cube.origin[2] + (i % 3) * third,
            ],
            side: third,
        });
        cube = candidates
            .into_iter()
            .find(|c| c.vertices(n).iter().all(|&v| p.parts[v] != small))
            .expect("a small class meets at most 12 of 27 disjoint subcubes");
        rounds += 1;
    }
}

/// A Union node with a child holding between a third and two thirds of all vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnionSplit {
    /// Pre-order index of the Union node.
    pub union_node: usize,
    /// Pre-order index of the balanced child.
    pub child_node: usize,
    /// Value vertices of the child, in the whole expression's numbering.
    pub range: Range<usize>,
    pub total: usize,
}

/// Walks down from the root through subexpressions holding at least `2N/3` vertices; the last
/// Union on that walk has a child with between `N/3` and `2N/3` vertices.
pub fn balanced_union_subexpression(expr: &Expr) -> Result<UnionSplit, LowerBoundError> {
    let nodes = expr.preorder();
    let mut kids: Vec<Vec<usize>> = vec![vec![]; nodes.len()];
    {
        // Rebuild child links: a node's first child follows it, the second follows the first's subtree.
        let mut sizes_in_nodes = vec![1usize; nodes.len()];
        for i in (0..nodes.len()).rev() {
            match nodes[i] {
                Expr::Create { .. } => {}
                Expr::Union { .. } => {
                    let l = i + 1;
                    let r = l + sizes_in_nodes[l];
                    kids[i] = vec![l, r];
                    sizes_in_nodes[i] += sizes_in_nodes[l] + sizes_in_nodes[r];
                }
                _ => {
                    kids[i] = vec![i + 1];
                    sizes_in_nodes[i] += sizes_in_nodes[i + 1];
                }
            }
        }
    }
    let mut count = vec![0usize; nodes.len()];
    for i in (0..nodes.len()).rev() {
        count[i] = match nodes[i] {
            Expr::Create { .. } => 1,
            _ => kids[i].iter().map(|&k| count[k]).sum(),
        };
    }
    let total = count[0];
    if total < 3 {
        return Err(LowerBoundError::TooFewVertices(total));
    }
    let heavy = |c: usize| 3 * c >= 2 * total;
    let (mut at, mut offset) = (0, 0);
    loop {
        match nodes[at] {
            Expr::Create { .. } => unreachable!("a single vertex is never two thirds of three or more"),
            Expr::Union { .. } => {
                let (l, r) = (kids[at][0], kids[at][1]);
                if heavy(count[l]) {
                    at = l;
                } else if heavy(count[r]) {
                    offset += count[l];
                    at = r;
                } else {
                    let (child, start) = if count[l] >= count[r] { (l, offset) } else { (r, offset + count[l]) };
                    return Ok(UnionSplit {
                        union_node: at,
                        child_node: child,
                        range: start..start + count[child],
                        total,
                    });
                }
            }
            _ => at = kids[at][0],
        }
    }
}

fn grid_neighbors(side: usize, dim: usize, v: usize) -> Vec<usize> {
    let dims = vec![side; dim];
    let mut coords = vec![0; dim];
    let mut rest = v;
    for k in (0..dim).rev() {
        coords[k] = rest % side;
        rest /= side;
    }
    let mut out = vec![];
    for k in 0..dim {
        if coords[k] > 0 {
            coords[k] -= 1;
            out.push(grid_index(&dims, &coords));
            coords[k] += 1;
        }
        if coords[k] + 1 < side {
            coords[k] += 1;
            out.push(grid_index(&dims, &coords));
            coords[k] -= 1;
        }
    }
    out
}

/// The first two-colored edge along `line`, oriented `(A-end, B-end)`.
fn two_colored_edge(line: &[usize], in_a: &[bool]) -> Option<(usize, usize)> {
    line.windows(2).find(|w| in_a[w[0]] != in_a[w[1]]).map(|w| if in_a[w[0]] { (w[0], w[1]) } else { (w[1], w[0]) })
}

fn monochromatic(line: &[usize], in_a: &[bool]) -> Option<bool> {
    let first = in_a[line[0]];
    line.iter().all(|&v| in_a[v] == first).then_some(first)
}

/// Two-colored edges of one plane: one per non-monochromatic line of a suitable direction.
fn plane_census(side: usize, at: impl Fn(usize, usize) -> usize, in_a: &[bool], out: &mut Vec<(usize, usize)>) {
    let rows: Vec<Vec<usize>> = (0..side).map(|i| (0..side).map(|j| at(i, j)).collect()).collect();
    let cols: Vec<Vec<usize>> = (0..side).map(|j| (0..side).map(|i| at(i, j)).collect()).collect();
    let both_colors = |lines: &[Vec<usize>]| {
        let monos: BTreeSet<bool> = lines.iter().filter_map(|l| monochromatic(l, in_a)).collect();
        monos.len() == 2
    };
    let pick = if both_colors(&rows) {
        &cols
    } else if both_colors(&cols) {
        &rows
    } else {
        let mixed = |lines: &[Vec<usize>]| lines.iter().filter(|l| monochromatic(l, in_a).is_none()).count();
        if mixed(&rows) >= mixed(&cols) {
            &rows
        } else {
            &cols
        }
    };
    out.extend(pick.iter().filter_map(|l| two_colored_edge(l, in_a)));
}

/// Two-colored edges found by the plane and line census.
fn census(side: usize, dim: usize, in_a: &[bool]) -> Vec<(usize, usize)> {
    let mut out = vec![];
    if dim == 2 {
        plane_census(side, |i, j| grid_index(&[side, side], &[i, j]), in_a, &mut out);
        return out;
    }
    let dims = [side; 3];
    let plane_a: Vec<usize> =
        (0..side).map(|x| (0..side * side).filter(|&ij| in_a[grid_index(&dims, &[x, ij / side, ij % side])]).count()).collect();
    let area = side * side;
    // Not 1/6-balanced planes, by majority color.
    let skewed = |x: usize| 6 * plane_a[x].min(area - plane_a[x]) < area;
    let a_major = (0..side).find(|&x| skewed(x) && 2 * plane_a[x] > area);
    let b_major = (0..side).find(|&x| skewed(x) && 2 * plane_a[x] < area);
    if a_major.is_some() && b_major.is_some() {
        for ij in 0..area {
            let line: Vec<usize> = (0..side).map(|x| grid_index(&dims, &[x, ij / side, ij % side])).collect();
            out.extend(two_colored_edge(&line, in_a));
        }
    } else {
        for x in (0..side).filter(|&x| !skewed(x)) {
            plane_census(side, |i, j| grid_index(&dims, &[x, i, j]), in_a, &mut out);
        }
    }
    out
}

/// Induced matching between `A` and `B` in the grid of the given side and dimension (2 or 3),
/// where `in_a[v]` tells the side of `v` (row-major ids). Edges are `(A-end, B-end)`.
pub fn induced_matching_bicolored_grid(side: usize, dim: usize, in_a: &[bool]) -> Result<Vec<(usize, usize)>, LowerBoundError> {
    if dim != 2 && dim != 3 {
        return Err(LowerBoundError::BadDimension(dim));
    }
    let total = side.pow(dim as u32);
    if in_a.len() != total {
        return Err(LowerBoundError::PartitionMismatch { expected: total, got: in_a.len() });
    }
    let a = in_a.iter().filter(|&&x| x).count();
    if 3 * a < total || 3 * (total - a) < total {
        return Err(LowerBoundError::Imbalanced { a, total });
    }
    let mut blocked = vec![false; total];
    let mut matching = vec![];
    for (u, w) in census(side, dim, in_a) {
        if blocked[u] || blocked[w] {
            continue;
        }
        matching.push((u, w));
        for x in [u, w] {
            blocked[x] = true;
            for y in grid_neighbors(side, dim, x) {
                blocked[y] = true;
            }
        }
    }
    Ok(matching)
}

/// Whether `edges` is an induced matching of `g` with every edge joining `A` to `B`.
pub fn is_induced_matching(g: &Graph, edges: &[(usize, usize)], in_a: &[bool]) -> bool {
    let ends: Vec<usize> = edges.iter().flat_map(|&(u, w)| [u, w]).collect();
    let distinct: BTreeSet<usize> = ends.iter().copied().collect();
    distinct.len() == ends.len()
        && edges.iter().all(|&(u, w)| g.has_edge(u, w) && in_a[u] != in_a[w])
        && edges.iter().enumerate().all(|(i, &(a, b))| {
            edges[i + 1..].iter().all(|&(c, d)| [a, b].iter().all(|&x| [c, d].iter().all(|&y| !g.has_edge(x, y))))
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridVariant {
    /// `n x n x n` grid.
    Grid3d,
    /// `n` disjoint pinned grids of order `n`.
    Pinned,
}

impl GridVariant {
    pub fn generator(self, n: usize) -> Generator {
        match self {
            GridVariant::Grid3d => Generator::Grid3d(n, n, n),
            GridVariant::Pinned => Generator::DisjointCopies(Box::new(Generator::PinnedGrid(n)), n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub variant: GridVariant,
    pub n: usize,
    pub k: usize,
    /// Cleaned cube (3D variant).
    pub subgrid: Option<Subgrid>,
    /// Surviving pinned-grid copy and number of removed copies (pinned variant).
    pub kept_copy: Option<usize>,
    pub removed_copies: usize,
    /// Number of parameter vertices spanned by the region.
    pub span: usize,
    pub split: Option<UnionSplit>,
    pub matching: Vec<(usize, usize)>,
    /// Parameter carrying the most A-ends of the matching, and how many.
    pub anchor: Option<(usize, usize)>,
    /// Distinct colors of the anchored A-ends inside the balanced child.
    pub anchor_colors: usize,
    /// `ceil(anchored / k^2)`.
    pub lower_bound: usize,
    /// The asymptotic figure with the worst-case span.
    pub worst_case_bound: f64,
    /// Matching size over measured span over `k^2`.
    pub measured_span_bound: f64,
    pub palette: usize,
    /// The region was too small for a balanced split; later steps were skipped.
    pub degenerate: bool,
    pub checks: Vec<Check>,
    pub verified: bool,
}

struct Region {
    /// Vertices of the region in the ambient graph.
    vertices: Vec<usize>,
    /// Side and dimension of the grid the region's vertices form, in region order.
    side: usize,
    dim: usize,
}

fn bfs_within(h: &Graph, from: usize) -> Vec<Option<usize>> {
    h.bfs_from(&[from])
}

/// Runs the steps of the lower-bound argument on one expression and records every checked claim.
///
/// `vertex_map[i]` is the grid vertex behind value vertex `i` of `expr` over `path`.
pub fn audit_color_lower_bound(
    expr: &Expr,
    path: &Graph,
    vertex_map: &[usize],
    n: usize,
    p: &Perturbation,
    variant: GridVariant,
) -> Result<AuditReport, LowerBoundError> {
    let len = path.vertex_count();
    if len == 0 || *path != Generator::Path(len).build().expect("len > 0").reflexive_closure() {
        return Err(LowerBoundError::NotAReflexivePath);
    }
    let base = variant.generator(n).build().map_err(|e| LowerBoundError::WrongValue(e.to_string()))?;
    let h = apply_perturbation(&base, p)?;
    let value = evaluate(expr, path)?;
    let nv = h.vertex_count();
    let mut seen = vec![false; nv];
    if value.vertex_count() != nv || vertex_map.len() != nv || vertex_map.iter().any(|&v| v >= nv || std::mem::replace(&mut seen[v], true)) {
        return Err(LowerBoundError::WrongValue("vertex map is not a bijection onto the grid".into()));
    }
    for a in 0..nv {
        for b in a + 1..nv {
            if value.graph.has_edge(a, b) != h.has_edge(vertex_map[a], vertex_map[b]) {
                return Err(LowerBoundError::WrongValue(format!("pair {}-{}", vertex_map[a], vertex_map[b])));
            }
        }
    }
    let mut checks = vec![];
    let mut check = |name: &'static str, passed: bool, detail: String| checks.push(Check { name, passed, detail });
    let k = p.k;
    let mut report = AuditReport {
        variant,
        n,
        k,
        subgrid: None,
        kept_copy: None,
        removed_copies: 0,
        span: 0,
        split: None,
        matching: vec![],
        anchor: None,
        anchor_colors: 0,
        lower_bound: 0,
        worst_case_bound: 0.0,
        measured_span_bound: 0.0,
        palette: palette(expr),
        degenerate: false,
        checks: vec![],
        verified: false,
    };

    // Region selection and the distance claims.
    let region = match variant {
        GridVariant::Grid3d => {
            let clean = prune_to_clean_subgrid(n, p)?;
            let cube = clean.subgrid;
            let m = cube.side;
            let vertices = cube.vertices(n);
            let sizes = p.class_sizes(vertices.iter().copied());
            check("clean subgrid", sizes.iter().all(|&s| s == 0 || s > SMALL_3D), format!("class sizes {sizes:?}"));
            check("rounds at most k", clean.rounds <= k, format!("{} rounds", clean.rounds));
            check("side at least n/3^k", m >= n / 3usize.pow(k as u32), format!("side {m}"));
            let inner = h.induced(&vertices);
            let grid = Generator::Grid3d(m, m, m).build().expect("m > 0");
            let mut worst = 0;
            let mut diameter = 0;
            let mut connected = true;
            for u in grid.vertices() {
                let dist = bfs_within(&inner, u);
                for w in grid.neighbors(u) {
                    worst = worst.max(dist[w].unwrap_or(usize::MAX));
                }
                for d in &dist {
                    match d {
                        Some(d) => diameter = diameter.max(*d),
                        None => connected = false,
                    }
                }
            }
            check("grid neighbours within distance 3", worst <= 3, format!("max {worst}"));
            check(
                "diameter below 9m",
                connected && diameter < 9 * m,
                format!("diameter {diameter}, connected {connected}"),
            );
            report.subgrid = Some(cube);
            Region { vertices, side: m, dim: 3 }
        }
        GridVariant::Pinned => {
            let copy = n.pow(4) + 1;
            let apex = |j: usize| j * copy + n.pow(4);
            let mut alive: BTreeSet<usize> = (0..n).collect();
            loop {
                let mut grid_count = vec![0; k];
                let mut apex_count = vec![0; k];
                for &j in &alive {
                    for v in j * copy..apex(j) {
                        grid_count[p.parts[v]] += 1;
                    }
                    apex_count[p.parts[apex(j)]] += 1;
                }
                let doomed = alive.iter().copied().find(|&j| {
                    (j * copy..apex(j)).any(|v| grid_count[p.parts[v]] <= SMALL_PINNED) || apex_count[p.parts[apex(j)]] == 1
                });
                match doomed {
                    Some(j) => {
                        alive.remove(&j);
                        report.removed_copies += 1;
                    }
                    None => break,
                }
            }
            check(
                "removed copies at most 9k",
                report.removed_copies <= 9 * k,
                format!("{} removed", report.removed_copies),
            );
            let Some(&first) = alive.iter().next() else {
                report.degenerate = true;
                report.checks = checks;
                report.verified = report.checks.iter().all(|c| c.passed);
                return Ok(report);
            };
            report.kept_copy = Some(first);
            let kept: Vec<usize> = alive.iter().flat_map(|&j| j * copy..(j + 1) * copy).collect();
            let kept_grid: Vec<usize> = alive.iter().flat_map(|&j| j * copy..apex(j)).collect();
            let whole = h.induced(&kept);
            let grid_only = h.induced(&kept_grid);
            let local = |list: &[usize], v: usize| list.binary_search(&v).expect("kept");
            let side = n * n;
            let x: Vec<usize> = (first * copy..apex(first)).collect();
            let square = Generator::Grid2d(side, side).build().expect("side > 0");
            let mut worst = 0;
            let mut far = 0;
            for (i, &u) in x.iter().enumerate() {
                let d_grid = bfs_within(&grid_only, local(&kept_grid, u));
                for w in square.neighbors(i) {
                    worst = worst.max(d_grid[local(&kept_grid, x[w])].unwrap_or(usize::MAX));
                }
                let d = bfs_within(&whole, local(&kept, u));
                for &w in &x {
                    far = far.max(d[local(&kept, w)].unwrap_or(usize::MAX));
                }
            }
            check("grid neighbours within distance 3", worst <= 3, format!("max {worst}"));
            check("grid vertices within 18n+4", far <= 18 * n + 4, format!("max {far}"));
            Region { vertices: x, side, dim: 2 }
        }
    };

    // Restrict the expression to the region.
    let position: BTreeMap<usize, usize> = region.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let kept_values: Vec<usize> = (0..nv).filter(|&i| position.contains_key(&vertex_map[i])).collect();
    let restricted = expr
        .restrict(&|i| position.contains_key(&vertex_map[i]))
        .expect("region is nonempty");
    let params: Vec<usize> = kept_values.iter().map(|&i| value.params[i]).collect();
    let (lo, hi) = (*params.iter().min().expect("nonempty"), *params.iter().max().expect("nonempty"));
    report.span = hi - lo + 1;
    let span_bound = match variant {
        GridVariant::Grid3d => 9 * region.side,
        GridVariant::Pinned => 18 * n + 5,
    };
    check("parameter span", report.span <= span_bound, format!("{} of at most {span_bound}", report.span));

    let split = match balanced_union_subexpression(&restricted) {
        Ok(split) => split,
        Err(LowerBoundError::TooFewVertices(_)) => {
            report.degenerate = true;
            report.checks = checks;
            report.verified = report.checks.iter().all(|c| c.passed);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    // Region-local side of every restricted value vertex.
    let region_of: Vec<usize> = kept_values.iter().map(|&i| position[&vertex_map[i]]).collect();
    let mut in_a = vec![false; region.vertices.len()];
    for j in split.range.clone() {
        in_a[region_of[j]] = true;
    }
    let matching = induced_matching_bicolored_grid(region.side, region.dim, &in_a)?;
    let grid = match region.dim {
        2 => Generator::Grid2d(region.side, region.side),
        _ => Generator::Grid3d(region.side, region.side, region.side),
    }
    .build()
    .expect("side > 0");
    check("induced matching valid", is_induced_matching(&grid, &matching, &in_a), format!("{} edges", matching.len()));
    let side = region.side;
    let (size_ok, bound) = match region.dim {
        2 => (75 * matching.len() >= side, format!("side/75 = {:.3}", side as f64 / 75.0)),
        _ => (36 * 61 * matching.len() >= side * side, format!("side^2/2196 = {:.3}", (side * side) as f64 / 2196.0)),
    };
    check("matching size bound", size_ok, format!("{} vs {bound}", matching.len()));

    // Pigeonhole over parameters of the A-ends.
    let restricted_of: BTreeMap<usize, usize> = region_of.iter().enumerate().map(|(j, &r)| (r, j)).collect();
    let param_of = |r: usize| params[restricted_of[&r]];
    let mut by_param: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &(a, b) in &matching {
        by_param.entry(param_of(a)).or_default().push((a, b));
    }
    let k2 = (k * k) as f64;
    report.worst_case_bound = match variant {
        GridVariant::Grid3d => side as f64 / (9.0 * 36.0 * 61.0 * k2),
        GridVariant::Pinned => (side * side) as f64 / 75.0 / (18 * n + 4) as f64 / k2,
    };
    report.measured_span_bound = matching.len() as f64 / report.span as f64 / k2;
    if let Some((&anchor, group)) = by_param.iter().max_by_key(|(&param, g)| (g.len(), std::cmp::Reverse(param))) {
        report.anchor = Some((anchor, group.len()));
        check(
            "pigeonhole",
            group.len() * report.span >= matching.len(),
            format!("{} ends at parameter {anchor}", group.len()),
        );
        // Mates are grid neighbours, hence within distance 3 after perturbation.
        let spread = group.iter().map(|&(_, b)| param_of(b).abs_diff(anchor)).max().unwrap_or(0);
        check("mates within three parameters", spread <= 3, format!("max offset {spread}"));
        let child = restricted.preorder()[split.child_node];
        let child_value = evaluate(child, path)?;
        let color_of = |r: usize| child_value.colors[restricted_of[&r] - split.range.start];
        let mut profiles: BTreeMap<usize, BTreeSet<(usize, usize)>> = BTreeMap::new();
        let mut clash = None;
        for &(a, b) in group {
            let profile = (p.parts[region.vertices[a]], p.parts[region.vertices[b]]);
            if !profiles.entry(color_of(a)).or_default().insert(profile) {
                clash = Some((a, b));
            }
        }
        check(
            "same-colored ends have distinct class profiles",
            clash.is_none(),
            clash.map_or(String::new(), |(a, b)| format!("clash at {a}-{b}")),
        );
        report.anchor_colors = profiles.len();
        report.lower_bound = group.len().div_ceil(k * k);
        check(
            "anchored ends use at least L colors",
            report.anchor_colors >= report.lower_bound,
            format!("{} colors, L = {}", report.anchor_colors, report.lower_bound),
        );
    }
    check(
        "palette at least L",
        report.palette >= report.lower_bound,
        format!("palette {}, L = {}", report.palette, report.lower_bound),
    );
    report.split = Some(split);
    report.matching = matching
        .iter()
        .map(|&(a, b)| (region.vertices[a], region.vertices[b]))
        .collect();
    report.checks = checks;
    report.verified = report.checks.iter().all(|c| c.passed);
    Ok(report)
}
