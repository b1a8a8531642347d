//! Parameterized clique-width expressions and their evaluation.
//!
//! An expression builds a labeled graph. Every vertex carries a parameter vertex of a
//! companion loop graph `H` and a color; edges may only be added between vertices whose
//! parameters are adjacent in `H` (a loop makes a parameter adjacent to itself).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{find_half_graph_any_sides, Graph, HalfGraphSearch, HalfGraphWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("parameter vertex {param} is not a vertex of the parameter graph ({n} vertices)")]
    ParamOutOfRange { param: usize, n: usize },
    #[error("malformed expression JSON: {0}")]
    Json(String),
}

/// Expression tree. Value vertices are numbered in creation order, leftmost first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Create { param: usize, color: usize },
    Union { left: Box<Expr>, right: Box<Expr> },
    Recolor { from: usize, to: usize, child: Box<Expr> },
    AddEdges { c1: usize, c2: usize, child: Box<Expr> },
}

impl Expr {
    pub fn create(param: usize, color: usize) -> Expr {
        Expr::Create { param, color }
    }

    pub fn union(left: Expr, right: Expr) -> Expr {
        Expr::Union { left: Box::new(left), right: Box::new(right) }
    }

    pub fn recolor(self, from: usize, to: usize) -> Expr {
        Expr::Recolor { from, to, child: Box::new(self) }
    }

    pub fn add_edges(self, c1: usize, c2: usize) -> Expr {
        Expr::AddEdges { c1, c2, child: Box::new(self) }
    }

    /// Left-leaning union of all parts; `None` for an empty iterator.
    pub fn union_all(parts: impl IntoIterator<Item = Expr>) -> Option<Expr> {
        parts.into_iter().reduce(Expr::union)
    }

    /// Number of vertices of the value.
    pub fn vertex_count(&self) -> usize {
        self.creates().len()
    }

    /// `(param, color)` of every Create, in value-vertex order.
    pub fn creates(&self) -> Vec<(usize, usize)> {
        let mut out = vec![];
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            match e {
                Expr::Create { param, color } => out.push((*param, *color)),
                Expr::Union { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
                Expr::Recolor { child, .. } | Expr::AddEdges { child, .. } => stack.push(child),
            }
        }
        out
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            count += 1;
            match e {
                Expr::Create { .. } => {}
                Expr::Union { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
                Expr::Recolor { child, .. } | Expr::AddEdges { child, .. } => stack.push(child),
            }
        }
        count
    }

    /// Rebuilds the tree with every Create replaced by `f(param, color)`.
    pub fn map_creates(&self, f: &mut impl FnMut(usize, usize) -> Expr) -> Expr {
        match self {
            Expr::Create { param, color } => f(*param, *color),
            Expr::Union { left, right } => Expr::union(left.map_creates(f), right.map_creates(f)),
            Expr::Recolor { from, to, child } => child.map_creates(f).recolor(*from, *to),
            Expr::AddEdges { c1, c2, child } => child.map_creates(f).add_edges(*c1, *c2),
        }
    }

    /// Drops the value vertices (numbered in creation order) for which `keep` is false,
    /// together with any operation left without vertices. `None` when nothing is kept.
    pub fn restrict(&self, keep: &impl Fn(usize) -> bool) -> Option<Expr> {
        fn go(e: &Expr, next: &mut usize, keep: &impl Fn(usize) -> bool) -> Option<Expr> {
            match e {
                Expr::Create { .. } => {
                    *next += 1;
                    keep(*next - 1).then(|| e.clone())
                }
                Expr::Union { left, right } => match (go(left, next, keep), go(right, next, keep)) {
                    (Some(l), Some(r)) => Some(Expr::union(l, r)),
                    (l, r) => l.or(r),
                },
                Expr::Recolor { from, to, child } => go(child, next, keep).map(|c| c.recolor(*from, *to)),
                Expr::AddEdges { c1, c2, child } => go(child, next, keep).map(|c| c.add_edges(*c1, *c2)),
            }
        }
        go(self, &mut 0, keep)
    }

    /// All subexpressions in pre-order (a node before its children, left before right).
    pub fn preorder(&self) -> Vec<&Expr> {
        let mut out = vec![];
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            out.push(e);
            match e {
                Expr::Create { .. } => {}
                Expr::Union { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
                Expr::Recolor { child, .. } | Expr::AddEdges { child, .. } => stack.push(child),
            }
        }
        out
    }

    /// Same shape with every parameter replaced by the single looped vertex `0`.
    pub fn deparameterize(&self) -> Expr {
        self.map_creates(&mut |_, color| Expr::create(0, color))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Expr, ExprError> {
        let mut de = serde_json::Deserializer::from_str(text);
        de.disable_recursion_limit();
        let e = Expr::deserialize(&mut de).map_err(|e| ExprError::Json(e.to_string()))?;
        de.end().map_err(|e| ExprError::Json(e.to_string()))?;
        Ok(e)
    }
}

/// The single looped vertex, parameter graph of ordinary clique-width.
pub fn looped_point() -> Graph {
    let mut g = Graph::new(1);
    g.add_loop(0);
    g
}

/// Value of an expression: a graph with a parameter and a color per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub params: Vec<usize>,
    pub colors: Vec<usize>,
}

impl LabeledGraph {
    pub fn vertex_count(&self) -> usize {
        self.params.len()
    }

    /// Whether the parameter map sends every edge to an edge or loop of `h`.
    pub fn params_are_homomorphic(&self, h: &Graph) -> bool {
        self.graph.is_homomorphism_to(h, |v| self.params[v])
    }
}

enum Step<'a> {
    Enter(&'a Expr),
    Exit(&'a Expr),
}

/// Post-order walk that keeps the tree depth off the call stack.
/// `inner` sees each operation node after its children, together with their results.
fn post_order<'a, S, T>(
    root: &'a Expr,
    state: &mut S,
    mut leaf: impl FnMut(&mut S, usize, usize) -> Result<T, ExprError>,
    mut inner: impl FnMut(&mut S, &'a Expr, Vec<T>) -> T,
) -> Result<T, ExprError> {
    let mut work = vec![Step::Enter(root)];
    let mut results: Vec<T> = vec![];
    while let Some(step) = work.pop() {
        match step {
            Step::Enter(Expr::Create { param, color }) => results.push(leaf(state, *param, *color)?),
            Step::Enter(e @ Expr::Union { left, right }) => {
                work.push(Step::Exit(e));
                work.push(Step::Enter(right));
                work.push(Step::Enter(left));
            }
            Step::Enter(e @ (Expr::Recolor { child, .. } | Expr::AddEdges { child, .. })) => {
                work.push(Step::Exit(e));
                work.push(Step::Enter(child));
            }
            Step::Exit(e) => {
                let arity = if matches!(e, Expr::Union { .. }) { 2 } else { 1 };
                let kids = results.split_off(results.len() - arity);
                results.push(inner(state, e, kids));
            }
        }
    }
    Ok(results.pop().expect("one result"))
}

/// Evaluates `expr` over the parameter graph `h`.
pub fn evaluate(expr: &Expr, h: &Graph) -> Result<LabeledGraph, ExprError> {
    let n = h.vertex_count();
    let mut value = LabeledGraph {
        graph: Graph::new(expr.vertex_count()),
        params: vec![],
        colors: vec![],
    };
    // Each subexpression's value occupies a contiguous id range.
    post_order(
        expr,
        &mut value,
        |value, param, color| {
            if param >= n {
                return Err(ExprError::ParamOutOfRange { param, n });
            }
            value.params.push(param);
            value.colors.push(color);
            Ok((value.params.len() - 1, value.params.len()))
        },
        |value, e, kids| {
            let (lo, hi) = (kids[0].0, kids[kids.len() - 1].1);
            match e {
                Expr::Recolor { from, to, .. } => {
                    for c in &mut value.colors[lo..hi] {
                        if c == from {
                            *c = *to;
                        }
                    }
                }
                Expr::AddEdges { c1, c2, .. } => {
                    let colors = &value.colors;
                    let first: Vec<usize> = (lo..hi).filter(|&v| colors[v] == *c1).collect();
                    let second: Vec<usize> = (lo..hi).filter(|&v| colors[v] == *c2).collect();
                    for &u in &first {
                        for &v in &second {
                            if u != v && h.adjacent_or_looped(value.params[u], value.params[v]) {
                                value.graph.add_edge(u, v);
                            }
                        }
                    }
                }
                _ => {}
            }
            (lo, hi)
        },
    )?;
    debug_assert!(value.params_are_homomorphic(h), "parameter map must be a homomorphism");
    Ok(value)
}

/// Largest number of distinct colors present in the value of any subexpression.
pub fn palette(expr: &Expr) -> usize {
    let mut widest = 0;
    post_order(
        expr,
        &mut widest,
        |widest, _, color| {
            *widest = (*widest).max(1);
            Ok(BTreeSet::from([color]))
        },
        |widest, e, mut kids| {
            let mut set = kids.pop().unwrap();
            match e {
                Expr::Union { .. } => set.extend(kids.pop().unwrap()),
                Expr::Recolor { from, to, .. } => {
                    if set.remove(from) {
                        set.insert(*to);
                    }
                }
                Expr::AddEdges { .. } | Expr::Create { .. } => {}
            }
            *widest = (*widest).max(set.len());
            set
        },
    )
    .expect("palette walk has no failure cases");
    widest
}

/// Outcome of a stability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Witness(HalfGraphWitness),
    /// The deparameterized value exceeds the exact-search cap.
    Inconclusive,
}

/// Searches the deparameterized value for a bi-induced half-graph of order `k`,
/// letting every vertex serve on either side.
pub fn is_k_stable(expr: &Expr, k: usize, cap: usize) -> Result<Stability, ExprError> {
    let value = evaluate(&expr.deparameterize(), &looped_point())?;
    let search = find_half_graph_any_sides(&value.graph, k.max(1), cap)
        .expect("order is positive and vertices are in range");
    Ok(match search {
        HalfGraphSearch::Found(w) => Stability::Witness(w),
        HalfGraphSearch::Absent => Stability::Stable,
        HalfGraphSearch::Inconclusive => Stability::Inconclusive,
    })
}
