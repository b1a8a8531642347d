use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use hcw_core::backwards::{encode_colored_graph_as_leaves, factor_formulas};
use hcw_core::builders::{
    contract_path_power, expression_to_product, grid3d_expression, grid_expression, layered_expression,
    product_to_expression,
};
use hcw_core::expr::{evaluate, is_k_stable, palette, Expr, Stability};
use hcw_core::graph::{power, strong_product, ColoredGraph, Generator, Graph};
use hcw_core::io::{parse_graph, serialize_graph, to_dot, GraphData};
use hcw_core::logic::{interpret, parse_formula, Formula};
use hcw_core::lower_bounds::{apply_perturbation, audit_color_lower_bound, Perturbation};
use hcw_core::synthesis::{synthesize, SynthesisConfig, SynthesisContext, SynthesisError};
use hcw_core::tree_decomp::{random_partial_k_tree, TreeDecomposition};

use crate::{
    BackwardsCommand, BuildCommand, Cli, Command, ConvertCommand, Family, Format, LowerBoundCommand, SynthesizeArgs,
};

#[derive(Debug, Error)]
pub enum Failure {
    /// Bad arguments or unreadable inputs.
    #[error("{0}")]
    Usage(String),
    /// The inputs were fine but a check did not pass.
    #[error("{0}")]
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification(_) => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<GraphData, Failure> {
    parse_graph(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_expr(path: &Path) -> Result<Expr, Failure> {
    Expr::from_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_formula(path: &Path) -> Result<Formula, Failure> {
    parse_formula(read(path)?.trim()).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// `out.json` -> `out.<tag>.json`.
pub fn sidecar(path: &Path, tag: &str) -> PathBuf {
    path.with_extension(format!("{tag}.json"))
}

fn graph_json(g: &Graph) -> Value {
    serde_json::from_str(&serialize_graph(&GraphData::plain(g.clone()))).expect("valid JSON")
}

fn reflexive_path(len: usize) -> Graph {
    match len {
        0 => Graph::new(0),
        _ => Generator::Path(len).build().expect("len > 0").reflexive_closure(),
    }
}

fn max_param(e: &Expr) -> usize {
    e.creates().iter().map(|&(p, _)| p).max().unwrap_or(0)
}

struct Output<'a> {
    cli: &'a Cli,
}

impl Output<'_> {
    fn text(&self, text: &str) -> Result<(), Failure> {
        match &self.cli.output {
            Some(path) => write(path, text),
            None => {
                // A closed pipe (e.g. `| head`) is not an error worth reporting.
                let _ = writeln!(io::stdout().lock(), "{}", text.trim_end());
                Ok(())
            }
        }
    }

    fn json(&self, value: &Value) -> Result<(), Failure> {
        self.not_dot()?;
        self.text(&serde_json::to_string_pretty(value).expect("serializable"))
    }

    fn graph(&self, data: &GraphData) -> Result<(), Failure> {
        match self.cli.format {
            Format::Json => self.text(&serialize_graph(data)),
            Format::Dot => self.text(&to_dot(data)),
        }
    }

    fn expr(&self, e: &Expr) -> Result<(), Failure> {
        self.not_dot()?;
        self.text(&e.to_json())
    }

    fn not_dot(&self) -> Result<(), Failure> {
        match self.cli.format {
            Format::Dot => Err(usage("--format dot only applies to graph outputs")),
            Format::Json => Ok(()),
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let out = Output { cli };
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match &cli.command {
        Command::Generate { family, sizes, copies, keep, td_out } => {
            let (g, td) = generate(*family, sizes, *keep, &mut rng)?;
            let g = match copies {
                Some(0) => return Err(usage("--copies must be positive")),
                Some(c) => disjoint_copies(&g, *c),
                None => g,
            };
            if let Some(path) = td_out {
                let td = td.ok_or_else(|| usage("--td-out is only available for partial-k-tree"))?;
                write(path, &td.to_json())?;
            }
            out.graph(&GraphData::plain(g))
        }
        Command::Product { left, right } => {
            out.graph(&GraphData::plain(strong_product(&read_graph(left)?.graph, &read_graph(right)?.graph)))
        }
        Command::Power { graph, r, reflexive } => {
            out.graph(&GraphData::plain(power(&read_graph(graph)?.graph, *r, *reflexive).map_err(usage)?))
        }
        Command::Build { what } => build(&out, what),
        Command::Convert { what } => convert(&out, what),
        Command::Interpret { g, xi } => {
            let s = read_graph(g)?.into_colored();
            out.graph(&GraphData::plain(interpret(&s, &read_formula(xi)?).map_err(usage)?))
        }
        Command::Synthesize(args) => run_synthesize(cli, &out, args),
        Command::CheckStable { expr, k, cap } => {
            let e = read_expr(expr)?;
            let verdict = is_k_stable(&e, *k, *cap).map_err(usage)?;
            let (value, failed) = match verdict {
                Stability::Stable => (json!({ "stable": true }), None),
                Stability::Witness(w) => (
                    json!({ "stable": false, "left": w.left, "right": w.right }),
                    Some(format!("half-graph of order {k} found")),
                ),
                Stability::Inconclusive => (
                    json!({ "stable": null, "reason": "value larger than the search cap" }),
                    Some("search cap exceeded".to_string()),
                ),
            };
            out.json(&value)?;
            failed.map_or(Ok(()), |m| Err(Failure::Verification(m)))
        }
        Command::LowerBound { what } => lower_bound(&out, what, &mut rng),
        Command::Backwards { what } => backwards(&out, what),
        Command::Verify { expr, against, params, vertex_map } => verify(&out, expr, against, params, vertex_map),
    }
}

fn generate(
    family: Family,
    sizes: &[usize],
    keep: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Graph, Option<TreeDecomposition>), Failure> {
    let want = match family {
        Family::Grid2d | Family::PartialKTree => 2,
        Family::Grid3d => 3,
        _ => 1,
    };
    if sizes.len() != want {
        return Err(usage(format!("{family:?} takes {want} size argument(s), got {}", sizes.len())));
    }
    let generator = match family {
        Family::Path => Generator::Path(sizes[0]),
        Family::Grid2d => Generator::Grid2d(sizes[0], sizes[1]),
        Family::Grid3d => Generator::Grid3d(sizes[0], sizes[1], sizes[2]),
        Family::PinnedGrid => Generator::PinnedGrid(sizes[0]),
        Family::HalfGraph => Generator::HalfGraph(sizes[0]),
        Family::Cycle => {
            let n = sizes[0];
            if n < 3 {
                return Err(usage("cycles need at least 3 vertices"));
            }
            let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            return Ok((Graph::from_edges(n, &edges).map_err(usage)?, None));
        }
        Family::PartialKTree => {
            if !(0.0..=1.0).contains(&keep) {
                return Err(usage("--keep must lie in [0, 1]"));
            }
            let (g, td) = random_partial_k_tree(sizes[0], sizes[1], keep, rng);
            return Ok((g, Some(td)));
        }
    };
    Ok((generator.build().map_err(usage)?, None))
}

fn disjoint_copies(g: &Graph, copies: usize) -> Graph {
    let n = g.vertex_count();
    let mut out = Graph::new(n * copies);
    for c in 0..copies {
        for (u, v) in g.edges() {
            out.add_edge(c * n + u, c * n + v);
        }
        for v in g.loops() {
            out.add_loop(c * n + v);
        }
    }
    out
}

fn build(out: &Output, what: &BuildCommand) -> Result<(), Failure> {
    match what {
        BuildCommand::GridExpr { a, b } => out.expr(&grid_expression(*a, *b).map_err(usage)?),
        BuildCommand::Grid3dExpr { n } => out.expr(&grid3d_expression(*n).map_err(usage)?),
        BuildCommand::Layered { graph, params_out, map_out } => {
            let (e, path, map) = layered_expression(&read_graph(graph)?.graph).map_err(usage)?;
            if let Some(p) = params_out {
                write(p, &serialize_graph(&GraphData::plain(path)))?;
            }
            if let Some(p) = map_out {
                write(p, &serde_json::to_string(&map).expect("serializable"))?;
            }
            out.expr(&e)
        }
    }
}

fn convert(out: &Output, what: &ConvertCommand) -> Result<(), Failure> {
    match what {
        ConvertCommand::ExprToProduct { expr, params } => {
            let (value, emb) = expression_to_product(&read_expr(expr)?, &read_graph(params)?.graph).map_err(usage)?;
            out.json(&json!({
                "value": graph_json(&value.graph),
                "params": value.params,
                "colors": value.colors,
                "left": graph_json(&emb.left),
                "right": graph_json(&emb.right),
                "map": emb.map.iter().map(|p| [p.q, p.m]).collect::<Vec<_>>(),
                "induced": emb.is_induced_embedding_of(&value.graph),
            }))
        }
        ConvertCommand::ProductToExpr { params, m_expr } => {
            let (e, _) = product_to_expression(&read_graph(params)?.graph, &read_expr(m_expr)?, None).map_err(usage)?;
            out.expr(&e)
        }
        ConvertCommand::ContractPower { r, expr, params, params_out } => {
            let (e, path) = contract_path_power(&read_expr(expr)?, &read_graph(params)?.graph, *r).map_err(usage)?;
            if let Some(p) = params_out {
                write(p, &serialize_graph(&GraphData::plain(path)))?;
            }
            out.expr(&e)
        }
    }
}

fn run_synthesize(cli: &Cli, out: &Output, args: &SynthesizeArgs) -> Result<(), Failure> {
    let q = read_graph(&args.q)?.graph;
    let m = read_graph(&args.m)?.graph;
    let td = TreeDecomposition::from_json(&read(&args.td)?).map_err(|e| usage(format!("{}: {e}", args.td.display())))?;
    let g = read_graph(&args.g)?.into_colored();
    let xi = read_formula(&args.xi)?;
    let config = SynthesisConfig { r: args.r, q_type: args.q_type, r_sep_cap: args.r_sep_cap, check_nodes: true };
    let result = SynthesisContext::new(&q, &m, &td, &g, &xi, config).and_then(|mut ctx| synthesize(&mut ctx));
    let report = match result {
        Ok(report) => report,
        Err(
            e @ (SynthesisError::MissingEdge { .. }
            | SynthesisError::TypeRankTooLow { .. }
            | SynthesisError::ColorAudit { .. }
            | SynthesisError::Invariant { .. }),
        ) => return Err(Failure::Verification(e.to_string())),
        Err(e) => return Err(usage(e)),
    };
    let params = power(&q, args.r, true).map_err(usage)?;
    let nm = m.vertex_count();
    let map: Vec<usize> = report.vertices.iter().map(|p| p.index(nm)).collect();
    out.expr(&report.expr)?;
    if let Some(path) = &cli.output {
        write(&sidecar(path, "params"), &serialize_graph(&GraphData::plain(params)))?;
        write(&sidecar(path, "map"), &serde_json::to_string(&map).expect("serializable"))?;
    }
    let summary = json!({
        "palette": report.palette,
        "r": report.r,
        "r_sep": report.r_sep,
        "q_type": report.q_type,
        "node_colors": report.node_colors,
        "running_colors": report.running_colors,
        "verified_sep": report.verified_sep,
        "verified": report.verified,
    });
    let text = serde_json::to_string_pretty(&summary).expect("serializable");
    match (&args.report, &cli.output) {
        (Some(path), _) => write(path, &text)?,
        (None, Some(_)) => println!("{text}"),
        (None, None) => eprintln!("{text}"),
    }
    if report.verified && report.verified_sep {
        Ok(())
    } else {
        Err(Failure::Verification("synthesized value differs from xi(G)".into()))
    }
}

fn lower_bound(out: &Output, what: &LowerBoundCommand, rng: &mut ChaCha8Rng) -> Result<(), Failure> {
    match what {
        LowerBoundCommand::Audit { expr, n, perturbation, variant, vertex_map } => {
            let e = read_expr(expr)?;
            let p: Perturbation = read_json(perturbation)?;
            let p = Perturbation::new(p.k, p.parts, p.flips).map_err(usage)?;
            let map: Vec<usize> = match vertex_map {
                Some(path) => read_json(path)?,
                None => (0..e.vertex_count()).collect(),
            };
            let path = reflexive_path(max_param(&e) + 1);
            let report = audit_color_lower_bound(&e, &path, &map, *n, &p, (*variant).into()).map_err(usage)?;
            out.json(&serde_json::to_value(&report).expect("serializable"))?;
            if report.verified {
                Ok(())
            } else {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
                Err(Failure::Verification(format!("failed checks: {}", failed.join(", "))))
            }
        }
        LowerBoundCommand::Perturb { graph, perturbation } => {
            let p: Perturbation = read_json(perturbation)?;
            let p = Perturbation::new(p.k, p.parts, p.flips).map_err(usage)?;
            out.graph(&GraphData::plain(apply_perturbation(&read_graph(graph)?.graph, &p).map_err(usage)?))
        }
        LowerBoundCommand::RandomPerturbation { vertices, k, flip } => {
            if *k == 0 || !(0.0..=1.0).contains(flip) {
                return Err(usage("need k >= 1 and a flip probability in [0, 1]"));
            }
            let parts: Vec<usize> = (0..*vertices).map(|_| rng.gen_range(0..*k)).collect();
            let flips: Vec<(usize, usize)> =
                (0..*k).flat_map(|a| (a..*k).map(move |b| (a, b))).filter(|_| rng.gen_bool(*flip)).collect();
            let p = Perturbation::new(*k, parts, flips).map_err(usage)?;
            out.json(&serde_json::to_value(&p).expect("serializable"))
        }
    }
}

fn backwards(out: &Output, what: &BackwardsCommand) -> Result<(), Failure> {
    match what {
        BackwardsCommand::EncodeColors { g, k, formulas } => {
            let data = read_graph(g)?;
            let colors = data.colors.ok_or_else(|| usage("encode-colors needs a colored graph"))?;
            let (h, decoding) = encode_colored_graph_as_leaves(&ColoredGraph::new(data.graph, colors), *k).map_err(usage)?;
            if let Some(path) = formulas {
                let mut text = format!("original {}\n", decoding.original);
                for (i, f) in decoding.color.iter().enumerate() {
                    text.push_str(&format!("color{} {f}\n", i + 1));
                }
                write(path, &text)?;
            }
            out.graph(&GraphData::plain(h))
        }
        BackwardsCommand::FactorFormulas { c1, c2, universal_color } => {
            let f = factor_formulas(*c1, *c2, *universal_color).map_err(usage)?;
            out.not_dot()?;
            out.text(&format!(
                "same_row {}\nadjacent_rows {}\nsame_column {}\nadjacent_columns {}\n",
                f.same_row, f.adjacent_rows, f.same_column, f.adjacent_columns
            ))
        }
    }
}

fn verify(
    out: &Output,
    expr: &Path,
    against: &Path,
    params: &Option<PathBuf>,
    vertex_map: &Option<PathBuf>,
) -> Result<(), Failure> {
    let e = read_expr(expr)?;
    let target = read_graph(against)?.graph;
    let find = |given: &Option<PathBuf>, tag: &str| {
        given.clone().or_else(|| Some(sidecar(expr, tag)).filter(|p| p.exists()))
    };
    let h = match find(params, "params") {
        Some(path) => read_graph(&path)?.graph,
        None => {
            let len = max_param(&e) + 1;
            let mut complete = Graph::new(len);
            for u in 0..len {
                complete.add_loop(u);
                for v in u + 1..len {
                    complete.add_edge(u, v);
                }
            }
            complete
        }
    };
    let value = evaluate(&e, &h).map_err(usage)?;
    let n = value.vertex_count();
    let map: Vec<usize> = match find(vertex_map, "map") {
        Some(path) => read_json(&path)?,
        None => (0..n).collect(),
    };
    let mut seen = vec![false; target.vertex_count()];
    if map.len() != n || n != target.vertex_count() || map.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        out.json(&json!({ "equal": false, "value_vertices": n, "target_vertices": target.vertex_count() }))?;
        return Err(Failure::Verification("vertex sets differ".into()));
    }
    let mismatches: Vec<[usize; 2]> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| value.graph.has_edge(a, b) != target.has_edge(map[a], map[b]))
        .map(|(a, b)| [map[a].min(map[b]), map[a].max(map[b])])
        .collect();
    out.json(&json!({
        "equal": mismatches.is_empty(),
        "value_vertices": n,
        "palette": palette(&e),
        "mismatches": mismatches.iter().take(20).collect::<Vec<_>>(),
    }))?;
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} pairs differ", mismatches.len())))
    }
}
