//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use common::{brute_force_induced_matching, cycle, graphs_up_to_iso, path, random_bounded_degree, random_expr, random_graph, random_tree};
use hcw_core::backwards::{augment_universal, factor_formulas};
use hcw_core::builders::{contract_path_power, expression_to_product, grid3d_expression, grid_expression, layered_expression, product_to_expression};
use hcw_core::expr::{evaluate, palette, Expr};
use hcw_core::graph::{greedy_proper_coloring, power, strong_product, ColoredGraph, Generator, Graph, ProductVertex};
use hcw_core::logic::{eval_formula, ef_equivalent, interpret, strongly_local_library, Assignment, Formula, TypeId, TypeTable, DEFAULT_MAX_RANK, DEFAULT_MAX_TUPLE};
use hcw_core::lower_bounds::{apply_perturbation, audit_color_lower_bound, induced_matching_bicolored_grid, GridVariant, Perturbation};
use hcw_core::synthesis::{synthesize, SynthesisConfig, SynthesisContext};
use hcw_core::tree_decomp::{decompose_small, forget_order, random_partial_k_tree, wreach_all, DEFAULT_EXACT_CAP};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID_PALETTE: usize = 5;
const GRID_SIZES: std::ops::RangeInclusive<usize> = 1..=6;
const GRID_TIME: Duration = Duration::from_secs(1);
const PRODUCT_INSTANCES: usize = 200;
const PRODUCT_TIME: Duration = Duration::from_secs(10);
const SYNTHESIS_INSTANCES: usize = 240;
const SYNTHESIS_TIME: Duration = Duration::from_secs(300);
const STABILITY_SIZES: [usize; 4] = [4, 8, 16, 32];
const TYPE_TIME: Duration = Duration::from_secs(120);
const WREACH_INSTANCES: usize = 100;
const MATCHING_SIDES: [usize; 3] = [6, 12, 18];
const MATCHING_PARTITIONS: usize = 50;
const PERTURBATION_INSTANCES: usize = 100;
const AUDIT_TIME: Duration = Duration::from_secs(120);

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn reflexive_path(n: usize) -> Graph {
    path(n).reflexive_closure()
}

/// Whether value vertex `i` adjacent to `j` exactly when `target` has an edge between their images.
fn same_edges(value: &Graph, target: &Graph, map: &[usize]) -> bool {
    let mut image = map.to_vec();
    image.sort_unstable();
    image.dedup();
    value.vertex_count() == target.vertex_count()
        && map.len() == value.vertex_count()
        && image.len() == map.len()
        && value
            .vertices()
            .all(|i| (i + 1..value.vertex_count()).all(|j| value.has_edge(i, j) == target.has_edge(map[i], map[j])))
}

fn grid_expression_values() -> Outcome {
    let start = Instant::now();
    let mut wrong_value = vec![];
    let mut wrong_palette = vec![];
    for a in GRID_SIZES {
        for b in GRID_SIZES {
            let e = grid_expression(a, b).unwrap();
            let value = evaluate(&e, &reflexive_path(b)).unwrap();
            if value.graph != Generator::Grid2d(a, b).build().unwrap() {
                wrong_value.push((a, b));
            }
            let p = palette(&e);
            if p != GRID_PALETTE {
                wrong_palette.push(format!("{a}x{b}:{p}"));
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        wrong_value.is_empty() && wrong_palette.is_empty() && elapsed < GRID_TIME,
        format!(
            "values wrong on {wrong_value:?}; palette != {GRID_PALETTE} on {} sizes [{}]; {elapsed:?}",
            wrong_palette.len(),
            wrong_palette.join(" ")
        ),
    )
}

fn product_round_trips() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(2);
    let mut failures = vec![];
    for i in 0..PRODUCT_INSTANCES {
        let ho = match rng.gen_range(0..2) {
            0 => reflexive_path(rng.gen_range(1..=5)),
            _ => cycle(rng.gen_range(3..=5)).reflexive_closure(),
        };
        let e = random_expr(rng.gen_range(1..=8), ho.vertex_count(), rng.gen_range(1..=4), &mut rng);
        let (value, embedding) = expression_to_product(&e, &ho).unwrap();
        if !embedding.is_induced_embedding_of(&value.graph) {
            failures.push(format!("#{i} embedding"));
            continue;
        }
        let m_size = embedding.right.vertex_count();
        let keep: Vec<usize> = embedding.map.iter().map(|p| p.index(m_size)).collect();
        let (back, placed) = product_to_expression(&ho, &e.deparameterize(), Some(&keep)).unwrap();
        let back_value = evaluate(&back, &ho).unwrap();
        let map: Vec<usize> = placed.iter().map(|p| p.m).collect();
        let params_agree = placed.iter().all(|p| value.params[p.m] == p.q);
        if !params_agree || !same_edges(&back_value.graph, &value.graph, &map) {
            failures.push(format!("#{i} round trip"));
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        failures.is_empty() && elapsed < PRODUCT_TIME,
        format!("{PRODUCT_INSTANCES} expressions, failures {failures:?}; {elapsed:?}"),
    )
}

struct SynthesisInstance {
    q: Graph,
    m: Graph,
    g: ColoredGraph,
    formula: Formula,
    name: &'static str,
    r: usize,
}

fn random_synthesis_instance<R: Rng>(rng: &mut R) -> SynthesisInstance {
    let q = random_bounded_degree(rng.gen_range(1..=6), 3, 0.6, rng);
    let m_size = rng.gen_range(1..=4);
    let m = if rng.gen_bool(0.5) { path(m_size) } else { random_tree(m_size, rng) };
    let full = strong_product(&q, &m);
    let mut graph = Graph::new(full.vertex_count());
    for (u, v) in full.edges() {
        if rng.gen_bool(0.7) {
            graph.add_edge(u, v);
        }
    }
    let colors = (0..graph.vertex_count()).map(|_| rng.gen_range(0..2)).collect();
    let library = strongly_local_library();
    let pick = library.choose(rng).unwrap().clone();
    let r = rng.gen_range(pick.radius..=2);
    SynthesisInstance { q, m, g: ColoredGraph::new(graph, colors), formula: pick.formula, name: pick.name, r }
}

fn synthesis_end_to_end() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(3);
    let mut mismatches = vec![];
    let mut max_palette = 0;
    for i in 0..SYNTHESIS_INSTANCES {
        let inst = random_synthesis_instance(&mut rng);
        let td = decompose_small(&inst.m, DEFAULT_EXACT_CAP).unwrap();
        let config = SynthesisConfig { r: inst.r, ..SynthesisConfig::default() };
        let report = SynthesisContext::new(&inst.q, &inst.m, &td, &inst.g, &inst.formula, config)
            .and_then(|mut ctx| synthesize(&mut ctx));
        let report = match report {
            Ok(report) => report,
            Err(e) => {
                mismatches.push(format!("#{i} {}: {e}", inst.name));
                continue;
            }
        };
        max_palette = max_palette.max(report.palette);
        let target = interpret(&inst.g, &inst.formula).unwrap();
        let value = evaluate(&report.expr, &power(&inst.q, inst.r, true).unwrap()).unwrap();
        let map: Vec<usize> = report.vertices.iter().map(|p| p.index(inst.m.vertex_count())).collect();
        if !same_edges(&value.graph, &target, &map) {
            mismatches.push(format!("#{i} {}", inst.name));
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        mismatches.is_empty() && elapsed < SYNTHESIS_TIME,
        format!("{SYNTHESIS_INSTANCES} instances, mismatches {mismatches:?}, max palette {max_palette}; {elapsed:?}"),
    )
}

fn palette_stability() -> Outcome {
    let m = path(3);
    let td = decompose_small(&m, DEFAULT_EXACT_CAP).unwrap();
    let library = strongly_local_library();
    let formula = library.iter().find(|f| f.name == "edge_same_color").unwrap().formula.clone();
    let config = SynthesisConfig { r: 1, q_type: 2, ..SynthesisConfig::default() };
    let mut palettes = vec![];
    for size in STABILITY_SIZES {
        let q = path(size);
        let graph = strong_product(&q, &m);
        let colors = graph.vertices().map(|v| (v / 2) % 2).collect();
        let g = ColoredGraph::new(graph, colors);
        let mut ctx = SynthesisContext::new(&q, &m, &td, &g, &formula, config).unwrap();
        let report = synthesize(&mut ctx).unwrap();
        if !report.verified {
            return Outcome::new(false, format!("|V(Q)| = {size}: value differs from the interpretation"));
        }
        palettes.push(report.palette);
    }
    // Smallest size from which the palette no longer changes; it must not be the last one.
    let saturating = (0..palettes.len()).find(|&i| palettes[i..].iter().all(|&p| p == palettes[i])).unwrap();
    Outcome::new(
        saturating + 1 < palettes.len(),
        format!(
            "palettes {:?} over |V(Q)| {:?}; constant from {}",
            palettes, STABILITY_SIZES, STABILITY_SIZES[saturating]
        ),
    )
}

fn types_match_games() -> Outcome {
    let start = Instant::now();
    let graphs: Vec<ColoredGraph> = (1..=5).flat_map(|n| graphs_up_to_iso(n, 2)).collect();
    let mut items: Vec<(usize, Vec<usize>)> = vec![];
    for (gi, g) in graphs.iter().enumerate() {
        let n = g.vertex_count();
        items.push((gi, vec![]));
        items.extend((0..n).map(|v| (gi, vec![v])));
        items.extend((0..n).flat_map(|u| (0..n).map(move |v| (gi, vec![u, v]))));
    }
    let mut table = TypeTable::new(DEFAULT_MAX_RANK, DEFAULT_MAX_TUPLE);
    let ef = |a: usize, b: usize, q: usize| {
        let ((ga, ta), (gb, tb)) = (&items[a], &items[b]);
        ef_equivalent(&graphs[*ga], ta, &graphs[*gb], tb, q).unwrap()
    };
    let mut previous: Option<Vec<TypeId>> = None;
    let (mut same_checks, mut distinct_checks, mut errors) = (0usize, 0usize, vec![]);
    for q in 0..=2 {
        let types: Vec<TypeId> = items.iter().map(|(gi, t)| table.rank_type(&graphs[*gi], t, q).unwrap()).collect();
        let mut rep: HashMap<TypeId, usize> = HashMap::new();
        for (i, &t) in types.iter().enumerate() {
            let r = *rep.entry(t).or_insert(i);
            if items[r].1.len() != items[i].1.len() {
                errors.push(format!("q={q}: one type for tuples of different lengths"));
            }
            if let Some(prev) = &previous {
                if prev[r] != prev[i] {
                    errors.push(format!("q={q}: equal type but different rank-{} types", q - 1));
                }
            }
            if r != i {
                same_checks += 1;
                if !ef(r, i, q) {
                    errors.push(format!("q={q}: equal types, Spoiler wins on items {r} and {i}"));
                }
            }
        }
        // Items already separated at rank q-1 are separated by the (q-1)-round game, hence by
        // the q-round game; only representatives sharing a lower type need a game here.
        let mut buckets: BTreeMap<(usize, Option<TypeId>), Vec<usize>> = BTreeMap::new();
        for &r in rep.values() {
            buckets.entry((items[r].1.len(), previous.as_ref().map(|p| p[r]))).or_default().push(r);
        }
        for reps in buckets.values() {
            for (i, &a) in reps.iter().enumerate() {
                for &b in &reps[i + 1..] {
                    distinct_checks += 1;
                    if ef(a, b, q) {
                        errors.push(format!("q={q}: different types, Duplicator wins on items {a} and {b}"));
                    }
                }
            }
        }
        previous = Some(types);
    }
    errors.truncate(5);
    let elapsed = start.elapsed();
    Outcome::new(
        errors.is_empty() && elapsed < TYPE_TIME,
        format!(
            "{} graphs, {} tuples, {same_checks} same-type and {distinct_checks} different-type games, errors {errors:?}; {elapsed:?}",
            graphs.len(),
            items.len()
        ),
    )
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn weak_coloring_bound() -> Outcome {
    let mut rng = rng(6);
    let mut violations = vec![];
    let mut worst = 0.0f64;
    for i in 0..WREACH_INSTANCES {
        let (n, k) = (rng.gen_range(3..=16), rng.gen_range(1..=2));
        let (g, td) = random_partial_k_tree(n, k, rng.gen_range(0.4..=1.0), &mut rng);
        let td = td.normalize(&g).unwrap();
        let order = forget_order(&td, n).unwrap();
        for r in 1..=4 {
            let bound = binomial(r + k, k);
            let largest = wreach_all(&g, &order.rank, r).iter().map(|s| s.len()).max().unwrap();
            worst = worst.max(largest as f64 / bound as f64);
            if largest > bound {
                violations.push(format!("#{i} n={n} k={k} r={r}: {largest} > {bound}"));
            }
        }
    }
    Outcome::new(
        violations.is_empty(),
        format!("{WREACH_INSTANCES} partial k-trees, r in 1..=4, violations {violations:?}, largest ratio {worst:.2}"),
    )
}

fn balanced_partition<R: Rng>(side: usize, dim: usize, structured: bool, rng: &mut R) -> Vec<bool> {
    let total = side.pow(dim as u32);
    let size = rng.gen_range(total.div_ceil(3)..=2 * total / 3);
    let mut order: Vec<usize> = (0..total).collect();
    if structured {
        let weights: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let key: Vec<f64> = (0..total)
            .map(|v| {
                let noise = rng.gen_range(0.0..0.5);
                (0..dim).map(|i| weights[i] * (v / side.pow(i as u32) % side) as f64).sum::<f64>() + noise
            })
            .collect();
        order.sort_by(|&a, &b| key[a].total_cmp(&key[b]));
    } else {
        order.shuffle(rng);
    }
    let mut in_a = vec![false; total];
    for &v in &order[..size] {
        in_a[v] = true;
    }
    in_a
}

fn matching_bounds() -> Outcome {
    let mut rng = rng(7);
    let mut failures = vec![];
    let mut smallest_ratio = f64::INFINITY;
    for side in MATCHING_SIDES {
        for dim in [2, 3] {
            let bound = if dim == 3 { (side * side) as f64 / (36.0 * 61.0) } else { side as f64 / 75.0 };
            for i in 0..MATCHING_PARTITIONS {
                let in_a = balanced_partition(side, dim, i % 2 == 0, &mut rng);
                match induced_matching_bicolored_grid(side, dim, &in_a) {
                    Ok(m) => {
                        smallest_ratio = smallest_ratio.min(m.len() as f64 / bound);
                        if !brute_force_induced_matching(side, dim, &m, &in_a) {
                            failures.push(format!("side {side} dim {dim} #{i}: invalid"));
                        } else if (m.len() as f64) < bound {
                            failures.push(format!("side {side} dim {dim} #{i}: {} < {bound:.3}", m.len()));
                        }
                    }
                    Err(e) => failures.push(format!("side {side} dim {dim} #{i}: {e}")),
                }
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("{} partitions, failures {failures:?}, smallest size/bound {smallest_ratio:.1}", MATCHING_SIDES.len() * 2 * MATCHING_PARTITIONS),
    )
}

fn random_perturbation<R: Rng>(n: usize, k: usize, rng: &mut R) -> Perturbation {
    let parts = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let flips: Vec<(usize, usize)> =
        (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).filter(|_| rng.gen_bool(0.5)).collect();
    Perturbation::new(k, parts, flips).unwrap()
}

fn perturbation_algebra() -> Outcome {
    let mut rng = rng(8);
    let mut failures = vec![];
    for i in 0..PERTURBATION_INSTANCES {
        let n = rng.gen_range(1..=12);
        let g = random_graph(n, rng.gen_range(0.0..=1.0), &mut rng);
        let p = random_perturbation(n, rng.gen_range(1..=3), &mut rng);
        let once = apply_perturbation(&g, &p).unwrap();
        if once.vertex_count() != n {
            failures.push(format!("#{i} vertex count"));
        }
        if apply_perturbation(&once, &p).unwrap() != g {
            failures.push(format!("#{i} not an involution"));
        }
        let full = Perturbation::new(1, vec![0; n], [(0, 0)]).unwrap();
        if apply_perturbation(&g, &full).unwrap() != g.complement() {
            failures.push(format!("#{i} full flip is not the complement"));
        }
    }
    Outcome::new(failures.is_empty(), format!("{PERTURBATION_INSTANCES} graphs, failures {failures:?}"))
}

fn audit_instances() -> Vec<(String, usize, Perturbation)> {
    let mut rng = rng(9);
    let mut out = vec![];
    for n in [3, 4] {
        let total = n * n * n;
        out.push((format!("n={n} identity"), n, Perturbation::identity(total)));
        out.push((format!("n={n} complement"), n, Perturbation::new(1, vec![0; total], [(0, 0)]).unwrap()));
        for flips in [vec![(0, 1)], vec![(0, 0)], vec![(0, 0), (1, 1)], vec![(0, 0), (0, 1), (1, 1)]] {
            let mut parts: Vec<usize> = (0..total).map(|v| usize::from(2 * v >= total)).collect();
            parts.shuffle(&mut rng);
            out.push((format!("n={n} k=2 flips {flips:?}"), n, Perturbation::new(2, parts, flips).unwrap()));
        }
    }
    out
}

fn audit_soundness() -> Outcome {
    let mut failures = vec![];
    let mut summary = vec![];
    let instances = audit_instances();
    for (name, n, p) in &instances {
        let start = Instant::now();
        let (expr, path, map) = if p.k == 1 && p.flips.is_empty() {
            let e = grid3d_expression(*n).unwrap();
            let len = e.creates().iter().map(|&(param, _)| param).max().unwrap() + 1;
            (e, reflexive_path(len), (0..n * n * n).collect())
        } else {
            let grid = Generator::Grid3d(*n, *n, *n).build().unwrap();
            layered_expression(&apply_perturbation(&grid, p).unwrap()).unwrap()
        };
        let measured = palette(&expr);
        match audit_color_lower_bound(&expr, &path, &map, *n, p, GridVariant::Grid3d) {
            Ok(report) => {
                let elapsed = start.elapsed();
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
                if !report.verified || report.degenerate || !failed.is_empty() {
                    failures.push(format!("{name}: failed {failed:?}"));
                } else if report.lower_bound > measured {
                    failures.push(format!("{name}: L {} > palette {measured}", report.lower_bound));
                } else if elapsed >= AUDIT_TIME {
                    failures.push(format!("{name}: {elapsed:?}"));
                }
                summary.push(format!("L={}<={measured}", report.lower_bound));
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("{} audits [{}], failures {failures:?}", instances.len(), summary.join(" ")),
    )
}

fn factor_formula_semantics() -> Outcome {
    let start = Instant::now();
    let left_graphs: Vec<Graph> = (1..=5).flat_map(|n| graphs_up_to_iso(n, 1)).map(|g| g.graph).collect();
    let right_graphs: Vec<Graph> = (1..=4).flat_map(|n| graphs_up_to_iso(n, 1)).map(|g| g.graph).collect();
    let mut failures = vec![];
    let mut pairs = 0usize;
    for (li, q) in left_graphs.iter().enumerate() {
        for (ri, m) in right_graphs.iter().enumerate() {
            let (m_uni, universal) = augment_universal(m);
            let (c1, c2) = (greedy_proper_coloring(q), greedy_proper_coloring(&m_uni));
            let (n1, n2) = (c1.iter().max().unwrap() + 1, c2.iter().max().unwrap() + 1);
            let f = factor_formulas(n1, n2, c2[universal]).unwrap();
            let size = m_uni.vertex_count();
            let product = strong_product(q, &m_uni);
            let colors = (0..product.vertex_count())
                .map(|i| {
                    let p = ProductVertex::from_index(i, size);
                    c1[p.q] * n2 + c2[p.m]
                })
                .collect();
            let s = ColoredGraph::new(product, colors);
            let holds = |phi: &Formula, a: usize, b: usize| eval_formula(&s, phi, &Assignment::from_tuple(&[a, b])).unwrap();
            let mut wrong = BTreeMap::new();
            for a in s.graph.vertices() {
                for b in s.graph.vertices() {
                    pairs += 1;
                    let (pa, pb) = (ProductVertex::from_index(a, size), ProductVertex::from_index(b, size));
                    let rows_adjacent = q.has_edge(pa.q, pb.q);
                    let mut check = |name: &'static str, got: bool, want: bool| {
                        if got != want {
                            *wrong.entry(name).or_insert(0) += 1;
                        }
                    };
                    check("same row", holds(&f.same_row, a, b), pa.q == pb.q);
                    check("adjacent rows", holds(&f.adjacent_rows, a, b), rows_adjacent);
                    if pa.q == pb.q || rows_adjacent {
                        check("same column", holds(&f.same_column, a, b), pa.m == pb.m);
                        let want = pa.m != universal && pb.m != universal && m.has_edge(pa.m, pb.m);
                        check("adjacent columns", holds(&f.adjacent_columns, a, b), want);
                    }
                }
            }
            if !wrong.is_empty() {
                failures.push(format!("Q'#{li} M#{ri}: {wrong:?}"));
            }
        }
    }
    failures.truncate(5);
    Outcome::new(
        failures.is_empty(),
        format!(
            "{} x {} factor graphs, {pairs} pairs, failures {failures:?}; {:?}",
            left_graphs.len(),
            right_graphs.len(),
            start.elapsed()
        ),
    )
}

/// One vertex per parameter, each with its own color, joined along `edges`.
fn spelled_out(len: usize, edges: &[(usize, usize)]) -> Expr {
    let mut e = Expr::union_all((0..len).map(|i| Expr::create(i, i))).unwrap();
    for &(u, v) in edges {
        e = e.add_edges(u, v);
    }
    e
}

fn contraction_suite() -> Outcome {
    let mut rng = rng(11);
    let mut failures = vec![];
    let mut cases = 0usize;
    let mut worst = 0.0f64;
    for r in 1..=3 {
        for len in 1..=6 {
            let params = power(&path(len), r, true).unwrap();
            let allowed: Vec<(usize, usize)> = params.edges().collect();
            let mut exprs: Vec<Expr> = (0u32..1 << allowed.len())
                .map(|mask| {
                    let chosen: Vec<(usize, usize)> =
                        allowed.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
                    spelled_out(len, &chosen)
                })
                .collect();
            exprs.extend((0..50).map(|_| random_expr(rng.gen_range(1..=6), len, rng.gen_range(1..=3), &mut rng)));
            for e in exprs {
                cases += 1;
                let before = evaluate(&e, &params).unwrap();
                let (contracted, target) = contract_path_power(&e, &params, r).unwrap();
                let after = evaluate(&contracted, &target).unwrap();
                let (old, new) = (palette(&e), palette(&contracted));
                worst = worst.max(new as f64 / (3 * r * old) as f64);
                if after.graph != before.graph {
                    failures.push(format!("r={r} len={len}: value changed"));
                } else if new > 3 * r * old {
                    failures.push(format!("r={r} len={len}: palette {new} > 3*{r}*{old}"));
                }
            }
        }
    }
    failures.truncate(5);
    Outcome::new(
        failures.is_empty(),
        format!("{cases} expressions, failures {failures:?}, largest palette ratio to 3r*l {worst:.2}"),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("grid expressions", grid_expression_values),
        ("expression/product conversions", product_round_trips),
        ("synthesis end to end", synthesis_end_to_end),
        ("palette stability", palette_stability),
        ("types versus games", types_match_games),
        ("weak coloring bound", weak_coloring_bound),
        ("induced matching bounds", matching_bounds),
        ("perturbation algebra", perturbation_algebra),
        ("lower-bound audit", audit_soundness),
        ("factor formulas", factor_formula_semantics),
        ("path power contraction", contraction_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name}: {}", i + 1, outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
