//! Graph files: `{"n", "edges", "loops", "colors"?}` JSON and DOT export.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ColoredGraph, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("malformed graph JSON: {0}")]
    Json(String),
    #[error("vertex id {id} is out of range for {n} vertices")]
    Dangling { id: usize, n: usize },
    #[error("color key {0:?} is not a vertex id")]
    BadColorKey(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    #[serde(default)]
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    loops: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    colors: Option<BTreeMap<String, usize>>,
}

/// A parsed graph file; `colors` is present iff the file has a `colors` object.
/// Vertices missing from that object get color 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphData {
    pub graph: Graph,
    pub colors: Option<Vec<usize>>,
}

impl GraphData {
    pub fn plain(graph: Graph) -> Self {
        GraphData { graph, colors: None }
    }

    pub fn colored(g: ColoredGraph) -> Self {
        GraphData { graph: g.graph, colors: Some(g.colors) }
    }

    /// Colored view; uncolored graphs get color 0 everywhere.
    pub fn into_colored(self) -> ColoredGraph {
        match self.colors {
            Some(colors) => ColoredGraph::new(self.graph, colors),
            None => ColoredGraph::uncolored(self.graph),
        }
    }
}

pub fn parse_graph(text: &str) -> Result<GraphData, IoError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    let n = file.n;
    let check = |id: usize| if id < n { Ok(id) } else { Err(IoError::Dangling { id, n }) };
    let mut graph = Graph::new(n);
    for [u, v] in file.edges {
        let (u, v) = (check(u)?, check(v)?);
        if u == v {
            graph.add_loop(u);
        } else {
            graph.add_edge(u, v);
        }
    }
    for v in file.loops {
        graph.add_loop(check(v)?);
    }
    let colors = match file.colors {
        None => None,
        Some(map) => {
            let mut colors = vec![0; n];
            for (key, c) in map {
                let id: usize = key.parse().map_err(|_| IoError::BadColorKey(key.clone()))?;
                colors[check(id)?] = c;
            }
            Some(colors)
        }
    };
    Ok(GraphData { graph, colors })
}

/// Canonical JSON: edges as sorted `[min, max]` pairs, sorted loops, colors keyed by id.
pub fn serialize_graph(data: &GraphData) -> String {
    let file = GraphFile {
        n: data.graph.vertex_count(),
        edges: data.graph.edges().map(|(u, v)| [u, v]).collect(),
        loops: data.graph.loops().collect(),
        colors: data.colors.as_ref().map(|cs| cs.iter().enumerate().map(|(v, &c)| (v.to_string(), c)).collect()),
    };
    serde_json::to_string(&file).expect("serializable")
}

pub fn to_dot(data: &GraphData) -> String {
    let mut out = String::from("graph G {\n");
    for v in data.graph.vertices() {
        match &data.colors {
            Some(cs) => writeln!(out, "  {v} [label=\"{v}:{}\"];", cs[v]),
            None => writeln!(out, "  {v};"),
        }
        .expect("write to string");
    }
    for (u, v) in data.graph.edges() {
        writeln!(out, "  {u} -- {v};").expect("write to string");
    }
    for v in data.graph.loops() {
        writeln!(out, "  {v} -- {v};").expect("write to string");
    }
    out.push_str("}\n");
    out
}
