//! Constructions for turning stable expressions back into bounded tree-width products:
//! twin-free half-graph extraction, universal-vertex augmentation, formulas recovering the
//! factors of a colored strong product, and encoding colors by pendant leaves.

use std::collections::BTreeSet;
use std::ops::Not;

use thiserror::Error;

use crate::graph::{is_half_graph_witness, ColoredGraph, Graph, HalfGraphWitness};
use crate::logic::{eval_formula, x, y, Assignment, Formula, LogicError, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackwardsError {
    #[error("sides must have equal length at least {need}, got {a} and {b}")]
    SidesTooShort { need: usize, a: usize, b: usize },
    #[error("the given sides are not a bi-induced half-graph")]
    NotAHalfGraph,
    #[error("no twin-free choice in block {block}")]
    NoTwinFreeChoice { block: usize },
    #[error("palette sizes must be positive")]
    ZeroCount,
    #[error("universal color {color} outside a palette of {palette}")]
    BadUniversalColor { color: usize, palette: usize },
    #[error("vertex {vertex} has color {color}, expected 1..={k}")]
    ColorOutOfRange { vertex: usize, color: usize, k: usize },
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// `u` and `v` have the same neighbours apart from each other.
pub fn are_twins(g: &Graph, u: usize, v: usize) -> bool {
    let strip = |a: usize, b: usize| g.neighbors(a).filter(|&w| w != b).collect::<BTreeSet<_>>();
    u != v && strip(u, v) == strip(v, u)
}

/// First twin pair among `vertices`, if any.
pub fn find_twin_pair(g: &Graph, vertices: &[usize]) -> Option<(usize, usize)> {
    vertices
        .iter()
        .enumerate()
        .flat_map(|(i, &u)| vertices[i + 1..].iter().map(move |&v| (u, v)))
        .find(|&(u, v)| are_twins(g, u, v))
}

/// Picks a twin-free bi-induced half-graph of order `kprime + 1` out of one of order
/// `2(kprime + 2)^2` given by its ordered sides.
///
/// Sides are cut into blocks of `kprime + 2`; the `j`-th left vertex comes from left block
/// `2j - 1` and the `j`-th right vertex from right block `2j`, each avoiding twins of the
/// vertices already picked on the other side.
pub fn extract_twin_free_half_graph(
    g: &Graph,
    left: &[usize],
    right: &[usize],
    kprime: usize,
) -> Result<HalfGraphWitness, BackwardsError> {
    let block = kprime + 2;
    let need = 2 * block * block;
    if left.len() != right.len() || left.len() < need {
        return Err(BackwardsError::SidesTooShort { need, a: left.len(), b: right.len() });
    }
    let full = HalfGraphWitness { left: left.to_vec(), right: right.to_vec() };
    if !is_half_graph_witness(g, &full) {
        return Err(BackwardsError::NotAHalfGraph);
    }
    // 1-based block `i` of a side.
    let blk = |side: &[usize], i: usize| side[(i - 1) * block..i * block].to_vec();
    let mut out = HalfGraphWitness { left: vec![], right: vec![] };
    for j in 1..=kprime + 1 {
        let a = blk(left, 2 * j - 1)
            .into_iter()
            .find(|&a| out.right.iter().all(|&b| !are_twins(g, a, b)))
            .ok_or(BackwardsError::NoTwinFreeChoice { block: 2 * j - 1 })?;
        out.left.push(a);
        let b = blk(right, 2 * j)
            .into_iter()
            .find(|&b| out.left.iter().all(|&a| !are_twins(g, a, b)))
            .ok_or(BackwardsError::NoTwinFreeChoice { block: 2 * j })?;
        out.right.push(b);
    }
    Ok(out)
}

/// Adds a vertex adjacent to all others; returns the graph and the new vertex.
pub fn augment_universal(m: &Graph) -> (Graph, usize) {
    let mut out = m.clone();
    let u = out.add_vertex();
    for v in 0..u {
        out.add_edge(u, v);
    }
    (out, u)
}

/// Formulas over `Q ⊠ M_uni` colored by `c1(q) * c2_count + c2(m)`, with `c1`, `c2` proper
/// colorings and `M_uni` having a universal vertex of color `universal_color`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorFormulas {
    /// Same row.
    pub same_row: Formula,
    /// Adjacent rows.
    pub adjacent_rows: Formula,
    /// Same column, for pairs in equal or adjacent rows.
    pub same_column: Formula,
    /// Adjacent non-universal columns, for pairs in equal or adjacent rows.
    pub adjacent_columns: Formula,
}

struct Palette {
    c1: usize,
    c2: usize,
}

impl Palette {
    fn row_color(&self, a: usize, v: Var) -> Formula {
        Formula::Or((0..self.c2).map(|b| Formula::Color(a * self.c2 + b, v)).collect())
    }

    fn column_color(&self, b: usize, v: Var) -> Formula {
        Formula::Or((0..self.c1).map(|a| Formula::Color(a * self.c2 + b, v)).collect())
    }

    fn same_row_color(&self, u: Var, v: Var) -> Formula {
        Formula::Or((0..self.c1).map(|a| Formula::And(vec![self.row_color(a, u), self.row_color(a, v)])).collect())
    }

    fn same_column_color(&self, u: Var, v: Var) -> Formula {
        Formula::Or((0..self.c2).map(|b| Formula::And(vec![self.column_color(b, u), self.column_color(b, v)])).collect())
    }

    /// Uses bound variable `z` internally.
    fn same_row(&self, u: Var, v: Var, z: usize) -> Formula {
        Formula::Or(vec![
            Formula::Eq(u, v),
            Formula::And(vec![Formula::Edge(u, v), self.same_row_color(u, v)]),
            Formula::exists(
                z,
                Formula::And(vec![
                    Formula::Edge(u, y(z)),
                    Formula::Edge(y(z), v),
                    self.same_row_color(u, y(z)),
                    self.same_row_color(v, y(z)),
                ]),
            ),
        ])
    }

    fn same_column(&self, u: Var, v: Var) -> Formula {
        Formula::Or(vec![Formula::Eq(u, v), Formula::And(vec![Formula::Edge(u, v), self.same_column_color(u, v)])])
    }
}

pub fn factor_formulas(c1_count: usize, c2_count: usize, universal_color: usize) -> Result<FactorFormulas, BackwardsError> {
    if c1_count == 0 || c2_count == 0 {
        return Err(BackwardsError::ZeroCount);
    }
    if universal_color >= c2_count {
        return Err(BackwardsError::BadUniversalColor { color: universal_color, palette: c2_count });
    }
    let p = Palette { c1: c1_count, c2: c2_count };
    let (a, b) = (x(1), x(2));
    let same_row = p.same_row(a, b, 0);
    let adjacent_rows = Formula::And(vec![
        same_row.clone().not(),
        Formula::exists(0, Formula::And(vec![Formula::Edge(b, y(0)), p.same_row(a, y(0), 1)])),
    ]);
    let same_column = p.same_column(a, b);
    let adjacent_columns = Formula::And(vec![
        same_column.clone().not(),
        p.column_color(universal_color, a).not(),
        p.column_color(universal_color, b).not(),
        Formula::exists(0, Formula::And(vec![Formula::Edge(b, y(0)), p.same_column(a, y(0))])),
    ]);
    Ok(FactorFormulas { same_row, adjacent_rows, same_column, adjacent_columns })
}

/// Formulas reading a leaf-encoded colored graph back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafDecoding {
    /// `x1` has degree at least 2.
    pub original: Formula,
    /// Entry `c - 1`: `x1` has exactly `c + 1` neighbours of degree one.
    pub color: Vec<Formula>,
}

fn degree_one(v: Var, z: usize, w: usize) -> Formula {
    Formula::exists(
        z,
        Formula::And(vec![
            Formula::Edge(v, y(z)),
            Formula::forall(w, Formula::Edge(v, y(w)).implies(Formula::Eq(y(w), y(z)))),
        ]),
    )
}

fn exactly_pendant(count: usize) -> Formula {
    let (z, w) = (count + 1, count + 2);
    let pendant = |i: usize| Formula::And(vec![Formula::Edge(x(1), y(i)), degree_one(y(i), z, w)]);
    let none_else = Formula::forall(
        count,
        pendant(count).implies(Formula::Or((0..count).map(|i| Formula::Eq(y(count), y(i))).collect())),
    );
    (0..count).rev().fold(none_else, |body, i| {
        let mut parts = vec![pendant(i)];
        parts.extend((0..i).map(|j| Formula::Eq(y(i), y(j)).not()));
        parts.push(body);
        Formula::exists(i, Formula::And(parts))
    })
}

pub fn leaf_decoding(k: usize) -> LeafDecoding {
    let original = Formula::exists(
        0,
        Formula::And(vec![
            Formula::Edge(x(1), y(0)),
            Formula::exists(1, Formula::And(vec![Formula::Edge(x(1), y(1)), Formula::Eq(y(0), y(1)).not()])),
        ]),
    );
    LeafDecoding { original, color: (1..=k).map(|c| exactly_pendant(c + 1)).collect() }
}

/// Adds `c(v) + 1` pendant leaves to every vertex; leaves get ids after the originals.
pub fn encode_colored_graph_as_leaves(g: &ColoredGraph, k: usize) -> Result<(Graph, LeafDecoding), BackwardsError> {
    let mut out = g.graph.clone();
    for v in g.graph.vertices() {
        let c = g.color(v);
        if !(1..=k).contains(&c) {
            return Err(BackwardsError::ColorOutOfRange { vertex: v, color: c, k });
        }
        for _ in 0..=c {
            let leaf = out.add_vertex();
            out.add_edge(v, leaf);
        }
    }
    Ok((out, leaf_decoding(k)))
}

/// Evaluates the decoding formulas: the colored graph induced on the vertices satisfying
/// `original`, colored by the first color formula that holds (0 if none).
pub fn decode_leaves(h: &Graph, decoding: &LeafDecoding) -> Result<ColoredGraph, BackwardsError> {
    let s = ColoredGraph::uncolored(h.clone());
    let holds = |f: &Formula, v: usize| eval_formula(&s, f, &Assignment::from_tuple(&[v]));
    let mut kept = vec![];
    let mut colors = vec![];
    for v in h.vertices() {
        if holds(&decoding.original, v)? {
            kept.push(v);
            let mut color = 0;
            for (i, f) in decoding.color.iter().enumerate() {
                if holds(f, v)? {
                    color = i + 1;
                    break;
                }
            }
            colors.push(color);
        }
    }
    Ok(ColoredGraph::new(h.induced(&kept), colors))
}
