//! DOT and JSON output.
//!
//! DOT output lists nodes and edges in sorted label order, so it depends
//! only on the labeled graph and not on how it was built.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::cube::{Cell, CubeComplex, LinkLabels};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, GraphJson, Multigraph};
use crate::lasheras::Obstruction;
use crate::par::Exec;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn graph_dot(name: &str, g: &Multigraph) -> String {
    let mut nodes: Vec<&str> = g.labels().iter().map(String::as_str).collect();
    nodes.sort_unstable();
    let mut edges: Vec<(&str, &str)> = g
        .edges()
        .map(|(_, [u, v])| {
            let (a, b) = (g.label(u), g.label(v));
            if a <= b { (a, b) } else { (b, a) }
        })
        .collect();
    edges.sort_unstable();
    let mut out = format!("graph {} {{\n", quote(name));
    for n in nodes {
        writeln!(out, "  {};", quote(n)).unwrap();
    }
    for (a, b) in edges {
        writeln!(out, "  {} -- {};", quote(a), quote(b)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// The 1-skeleton of `x`, nodes labeled by configurations.
pub fn skeleton_graph(x: &CubeComplex) -> Multigraph {
    let mut g = Multigraph::new();
    for v in 0..x.num_cells(0) {
        g.add_vertex(&x.config_label(v)).expect("configuration labels are unique");
    }
    for e in 0..x.num_cells(1) {
        let [t, h] = x.edge_ends(e);
        g.add_edge(crate::graph::VertexId(t), crate::graph::VertexId(h));
    }
    g
}

pub fn skeleton_dot(x: &CubeComplex) -> String {
    graph_dot("skeleton", &skeleton_graph(x))
}

pub fn link_dot(x: &CubeComplex, v: usize, labels: LinkLabels) -> Result<String> {
    let link = x.vertex_link(v)?;
    Ok(graph_dot(&format!("Lk({})", x.config_label(v)), &link.graph(labels)))
}

pub fn xprime_dot(ob: &Obstruction) -> String {
    graph_dot("X'", &ob.xprime().graph(ob.complex()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellJson {
    /// Indices into the graph's edge list.
    pub moving: Vec<usize>,
    /// Vertex labels.
    pub parked: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub strands: usize,
    pub graph: GraphJson,
    /// Cells keyed by dimension.
    pub cells: BTreeMap<String, Vec<CellJson>>,
}

pub fn complex_json(x: &CubeComplex) -> ComplexJson {
    let g = x.graph();
    let mut cells = BTreeMap::new();
    for k in 0..=x.dim() {
        if x.num_cells(k) == 0 {
            continue;
        }
        let level = x
            .cells(k)
            .iter()
            .map(|c| CellJson {
                moving: c.moving.iter().map(|e| e.0).collect(),
                parked: c.parked.iter().map(|&v| g.label(v).to_string()).collect(),
            })
            .collect();
        cells.insert(k.to_string(), level);
    }
    ComplexJson { strands: x.strands(), graph: GraphJson::from(g), cells }
}

pub fn complex_from_json(j: &ComplexJson) -> Result<CubeComplex> {
    let g = Multigraph::try_from(j.graph.clone())?;
    let mut cells = Vec::new();
    for (k, level) in &j.cells {
        let dim: usize = k.parse().map_err(|_| Error::Parse(format!("cell dimension {k:?}")))?;
        for c in level {
            if c.moving.len() != dim {
                return Err(Error::Parse(format!("cell listed under dimension {dim} moves {} edges", c.moving.len())));
            }
            if let Some(&e) = c.moving.iter().find(|&&e| e >= g.edge_count()) {
                return Err(Error::Parse(format!("edge index {e} out of range")));
            }
            let parked = c.parked.iter().map(|l| g.require(l)).collect::<Result<Vec<_>>>()?;
            cells.push(Cell::new(c.moving.iter().map(|&e| EdgeId(e)).collect(), parked));
        }
    }
    CubeComplex::from_cells(g, j.strands, cells, Exec::Sequential)
}
