//! Generators and brute-force helpers shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hcw_core::expr::Expr;
use hcw_core::graph::{ColoredGraph, Generator, Graph};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn path(n: usize) -> Graph {
    Generator::Path(n).build().unwrap()
}

pub fn cycle(n: usize) -> Graph {
    let mut g = path(n);
    if n >= 3 {
        g.add_edge(0, n - 1);
    }
    g
}

/// Uniform labelled tree on `n` vertices, decoded from a random Prüfer sequence.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Graph {
    let seq: Vec<usize> = (0..n.saturating_sub(2)).map(|_| rng.gen_range(0..n)).collect();
    tree_from_pruefer(n, &seq)
}

pub fn tree_from_pruefer(n: usize, seq: &[usize]) -> Graph {
    let mut g = Graph::new(n);
    if n < 2 {
        return g;
    }
    let mut degree = vec![1; n];
    for &v in seq {
        degree[v] += 1;
    }
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf remains");
        g.add_edge(leaf, v);
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    g.add_edge(rest[0], rest[1]);
    g
}

/// Random graph on `n` vertices with maximum degree at most `max_degree`.
pub fn random_bounded_degree<R: Rng>(n: usize, max_degree: usize, density: f64, rng: &mut R) -> Graph {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    let mut g = Graph::new(n);
    for (u, v) in pairs {
        if g.degree(u) < max_degree && g.degree(v) < max_degree && rng.gen_bool(density) {
            g.add_edge(u, v);
        }
    }
    g
}

pub fn random_graph<R: Rng>(n: usize, density: f64, rng: &mut R) -> Graph {
    random_bounded_degree(n, n, density, rng)
}

/// Random expression with exactly `vertices` creates over parameters `0..params`.
pub fn random_expr<R: Rng>(vertices: usize, params: usize, colors: usize, rng: &mut R) -> Expr {
    let mut e = if vertices == 1 {
        Expr::create(rng.gen_range(0..params), rng.gen_range(0..colors))
    } else {
        let left = rng.gen_range(1..vertices);
        Expr::union(random_expr(left, params, colors, rng), random_expr(vertices - left, params, colors, rng))
    };
    for _ in 0..rng.gen_range(0..3) {
        let (a, b) = (rng.gen_range(0..colors), rng.gen_range(0..colors));
        e = if rng.gen_bool(0.7) { e.add_edges(a, b) } else { e.recolor(a, b) };
    }
    e
}

/// Canonical code of a colored graph: lexicographically least (adjacency bits, colors) over all
/// vertex permutations.
fn canonical_code(n: usize, adj: &[Vec<bool>], colors: &[usize], perms: &[Vec<usize>]) -> (u64, Vec<usize>) {
    perms
        .iter()
        .map(|p| {
            let mut bits = 0u64;
            for u in 0..n {
                for v in u + 1..n {
                    bits = (bits << 1) | u64::from(adj[p[u]][p[v]]);
                }
            }
            (bits, p.iter().map(|&v| colors[v]).collect::<Vec<_>>())
        })
        .min()
        .expect("at least one permutation")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    permutations(n - 1)
        .into_iter()
        .flat_map(|p| {
            (0..n).map(move |i| {
                let mut q = p.clone();
                q.insert(i, n - 1);
                q
            })
        })
        .collect()
}

/// All graphs on `n` vertices with vertex colors in `0..colors`, one per isomorphism class.
pub fn graphs_up_to_iso(n: usize, colors: usize) -> Vec<ColoredGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = vec![];
    for mask in 0u64..1 << pairs.len() {
        let mut adj = vec![vec![false; n]; n];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[u][v] = true;
                adj[v][u] = true;
            }
        }
        for coloring in 0..colors.pow(n as u32) {
            let cs: Vec<usize> = (0..n).map(|v| coloring / colors.pow(v as u32) % colors).collect();
            if seen.insert(canonical_code(n, &adj, &cs, &perms)) {
                let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
                out.push(ColoredGraph::new(Graph::from_edges(n, &edges).unwrap(), cs));
            }
        }
    }
    out
}

/// Whether `edges` is an induced matching of the unit-distance grid of the given side and
/// dimension, every edge running from `A` to `B`. Works on coordinates, independent of any graph.
pub fn brute_force_induced_matching(side: usize, dim: usize, edges: &[(usize, usize)], in_a: &[bool]) -> bool {
    let coords = |v: usize| -> Vec<usize> { (0..dim).rev().map(|i| v / side.pow(i as u32) % side).collect() };
    let adjacent = |u: usize, v: usize| {
        let (a, b) = (coords(u), coords(v));
        a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y)).sum::<usize>() == 1
    };
    let total = side.pow(dim as u32);
    let ends: Vec<usize> = edges.iter().flat_map(|&(u, w)| [u, w]).collect();
    ends.iter().all(|&v| v < total)
        && ends.iter().collect::<BTreeSet<_>>().len() == ends.len()
        && edges.iter().all(|&(u, w)| in_a[u] && !in_a[w] && adjacent(u, w))
        && edges.iter().enumerate().all(|(i, &(a, b))| {
            edges.iter().skip(i + 1).all(|&(c, d)| [a, b].iter().all(|&x| [c, d].iter().all(|&y| !adjacent(x, y))))
        })
}
