//! The unordered discrete configuration space `Conf_n(G)` as a cube complex.
//!
//! A k-cell is a set of k pairwise disjoint edges (the strands currently
//! moving) together with n-k parked vertices off those edges. Its 2k
//! codimension-one faces are obtained by parking one moving strand at
//! either end of its edge.

use std::collections::{HashMap, HashSet};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{check_admissible, Admissibility, EdgeId, Multigraph, VertexId};
use crate::par::{self, Exec};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    /// Sorted by edge id.
    pub moving: Vec<EdgeId>,
    /// Sorted by vertex id.
    pub parked: Vec<VertexId>,
}

impl Cell {
    pub fn new(mut moving: Vec<EdgeId>, mut parked: Vec<VertexId>) -> Self {
        moving.sort();
        parked.sort();
        Cell { moving, parked }
    }

    pub fn dim(&self) -> usize {
        self.moving.len()
    }

    /// Park moving strand `j` at endpoint `end` (0 = tail, 1 = head).
    pub fn face(&self, g: &Multigraph, j: usize, end: usize) -> Cell {
        let e = self.moving[j];
        let mut moving = self.moving.clone();
        moving.remove(j);
        let mut parked = self.parked.clone();
        let v = g.endpoints(e)[end];
        let pos = parked.binary_search(&v).unwrap_or_else(|p| p);
        parked.insert(pos, v);
        Cell { moving, parked }
    }

    /// Occupied vertices of the corner where every moving strand sits at
    /// the given ends.
    pub fn corner(&self, g: &Multigraph, ends: &[usize]) -> Vec<VertexId> {
        let mut occ = self.parked.clone();
        occ.extend(self.moving.iter().zip(ends).map(|(&e, &s)| g.endpoints(e)[s]));
        occ.sort();
        occ
    }

    fn is_valid(&self, g: &Multigraph, n: usize) -> bool {
        if self.moving.len() + self.parked.len() != n {
            return false;
        }
        let mut seen = HashSet::new();
        for &e in &self.moving {
            let [u, v] = g.endpoints(e);
            if u == v || !seen.insert(u) || !seen.insert(v) {
                return false;
            }
        }
        self.parked.iter().all(|p| seen.insert(*p))
    }
}

/// Cell counts by dimension, without trailing zero entries (an empty
/// complex reports `[0]`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct FVector(pub Vec<usize>);

impl FVector {
    pub fn euler_characteristic(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(", "))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    /// Build even when the graph fails the admissibility check.
    pub force: bool,
    pub policy: Admissibility,
    pub exec: Exec,
}

#[derive(Debug, Clone)]
pub struct CubeComplex {
    graph: Multigraph,
    strands: usize,
    cells: Vec<Vec<Cell>>,
    lookup: Vec<HashMap<Cell, usize>>,
    // faces[k][c]: for each moving strand j, [tail face, head face], flattened
    faces: Vec<Vec<Vec<usize>>>,
    cofaces: Vec<Vec<Vec<usize>>>,
    warnings: Vec<String>,
    single_char_labels: bool,
}

/// `Conf_n(g)` with default options (admissibility enforced, parallel).
pub fn build_uconf(g: &Multigraph, n: usize) -> Result<CubeComplex> {
    build_uconf_with(g, n, &BuildOptions::default())
}

pub fn build_uconf_with(g: &Multigraph, n: usize, opts: &BuildOptions) -> Result<CubeComplex> {
    if n == 0 {
        return Err(Error::InvalidParameter("strand count must be >= 1".into()));
    }
    let mut warnings = Vec::new();
    if let Err(violation) = check_admissible(g, n, &opts.policy) {
        if !opts.force {
            return Err(Error::NotAdmissible { strands: n, violation });
        }
        warnings.push(format!(
            "graph is not admissible for {n} strands ({violation}); the complex need not be homotopy equivalent to the configuration space"
        ));
    }
    if g.has_loops() {
        warnings.push("loop edges never carry a moving strand".into());
    }
    let cells = enumerate_cells(g, n, opts.exec);
    CubeComplex::assemble(g.clone(), n, cells, warnings, opts.exec)
}

fn enumerate_cells(g: &Multigraph, n: usize, exec: Exec) -> Vec<Vec<Cell>> {
    let nv = g.vertex_count();
    let ne = g.edge_count();
    let mut out = Vec::new();
    for k in 0..=n {
        let level: Vec<Cell> = if k == 0 {
            (0..nv)
                .map(VertexId)
                .combinations(n)
                .map(|parked| Cell { moving: Vec::new(), parked })
                .collect()
        } else {
            par::map_range(exec, ne, |first| {
                let mut acc = Vec::new();
                let e = EdgeId(first);
                let [u, v] = g.endpoints(e);
                if u != v {
                    let mut used = vec![false; nv];
                    used[u.0] = true;
                    used[v.0] = true;
                    let mut chosen = vec![e];
                    extend_moving(g, n, k, &mut chosen, &mut used, &mut acc);
                }
                acc
            })
            .into_iter()
            .flatten()
            .collect()
        };
        if level.is_empty() && k > 0 {
            break;
        }
        out.push(level);
    }
    out
}

fn extend_moving(
    g: &Multigraph,
    n: usize,
    k: usize,
    chosen: &mut Vec<EdgeId>,
    used: &mut [bool],
    acc: &mut Vec<Cell>,
) {
    if chosen.len() == k {
        let free = (0..g.vertex_count()).filter(|&v| !used[v]).map(VertexId);
        for parked in free.combinations(n - k) {
            acc.push(Cell { moving: chosen.clone(), parked });
        }
        return;
    }
    let start = chosen.last().unwrap().0 + 1;
    for i in start..g.edge_count() {
        let [u, v] = g.endpoints(EdgeId(i));
        if u == v || used[u.0] || used[v.0] {
            continue;
        }
        used[u.0] = true;
        used[v.0] = true;
        chosen.push(EdgeId(i));
        extend_moving(g, n, k, chosen, used, acc);
        chosen.pop();
        used[u.0] = false;
        used[v.0] = false;
    }
}

impl CubeComplex {
    fn assemble(
        graph: Multigraph,
        strands: usize,
        mut cells: Vec<Vec<Cell>>,
        warnings: Vec<String>,
        exec: Exec,
    ) -> Result<Self> {
        for level in &mut cells {
            level.sort();
            level.dedup();
        }
        while cells.len() > 1 && cells.last().is_some_and(|l| l.is_empty()) {
            cells.pop();
        }
        if cells.is_empty() {
            cells.push(Vec::new());
        }
        let lookup: Vec<HashMap<Cell, usize>> = cells
            .iter()
            .map(|level| level.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect())
            .collect();
        let mut faces = vec![vec![Vec::new(); cells[0].len()]];
        for k in 1..cells.len() {
            let below = &lookup[k - 1];
            let level: Vec<Result<Vec<usize>>> = par::map(exec, &cells[k], |c| {
                let mut fs = Vec::with_capacity(2 * k);
                for j in 0..k {
                    for end in 0..2 {
                        let f = c.face(&graph, j, end);
                        let idx = below.get(&f).copied().ok_or_else(|| {
                            Error::InvalidInput(format!("cell set is not closed under faces: {f:?} missing"))
                        })?;
                        fs.push(idx);
                    }
                }
                Ok(fs)
            });
            faces.push(level.into_iter().collect::<Result<_>>()?);
        }
        let mut cofaces: Vec<Vec<Vec<usize>>> = cells.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for k in 1..cells.len() {
            for (c, fs) in faces[k].iter().enumerate() {
                for &f in fs {
                    cofaces[k - 1][f].push(c);
                }
            }
        }
        for level in &mut cofaces {
            for cs in level {
                cs.dedup();
            }
        }
        let single_char_labels = graph.labels().iter().all(|l| l.chars().count() == 1);
        Ok(CubeComplex { graph, strands, cells, lookup, faces, cofaces, warnings, single_char_labels })
    }

    /// A complex on `graph` made of exactly `cells`, which must be valid
    /// cells for `strands` strands and closed under taking faces.
    pub fn from_cells(graph: Multigraph, strands: usize, cells: Vec<Cell>, exec: Exec) -> Result<Self> {
        let mut levels: Vec<Vec<Cell>> = Vec::new();
        for c in cells {
            if !c.is_valid(&graph, strands) {
                return Err(Error::InvalidInput(format!("not a cell for {strands} strands: {c:?}")));
            }
            let d = c.dim();
            if levels.len() <= d {
                levels.resize(d + 1, Vec::new());
            }
            levels[d].push(c);
        }
        CubeComplex::assemble(graph, strands, levels, Vec::new(), exec)
    }

    /// A copy without the given cell and everything having it as a face.
    pub fn without_cell(&self, dim: usize, idx: usize) -> Result<Self> {
        self.cell(dim, idx)?;
        let mut dropped: Vec<HashSet<usize>> = vec![HashSet::new(); self.cells.len()];
        dropped[dim].insert(idx);
        for k in dim..self.cells.len().saturating_sub(1) {
            let up: Vec<usize> = dropped[k].iter().flat_map(|&c| self.cofaces[k][c].iter().copied()).collect();
            dropped[k + 1].extend(up);
        }
        let keep = self
            .cells
            .iter()
            .enumerate()
            .flat_map(|(k, level)| {
                let dropped = &dropped[k];
                level.iter().enumerate().filter(move |(i, _)| !dropped.contains(i)).map(|(_, c)| c.clone())
            })
            .collect();
        let mut out = CubeComplex::from_cells(self.graph.clone(), self.strands, keep, Exec::Sequential)?;
        out.warnings = self.warnings.clone();
        Ok(out)
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Highest dimension with at least one cell (0 for the empty complex).
    pub fn dim(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn cells(&self, k: usize) -> &[Cell] {
        self.cells.get(k).map_or(&[], |v| v.as_slice())
    }

    pub fn cell(&self, k: usize, idx: usize) -> Result<&Cell> {
        self.cells
            .get(k)
            .and_then(|l| l.get(idx))
            .ok_or_else(|| Error::NotFound(format!("{k}-cell #{idx}")))
    }

    pub fn index_of(&self, c: &Cell) -> Option<usize> {
        self.lookup.get(c.dim()).and_then(|m| m.get(c).copied())
    }

    pub fn num_cells(&self, k: usize) -> usize {
        self.cells(k).len()
    }

    /// Faces of a k-cell: `[tail_0, head_0, tail_1, head_1, ...]` where
    /// `tail_j` parks moving strand `j` at the tail of its edge.
    pub fn faces(&self, k: usize, idx: usize) -> &[usize] {
        &self.faces[k][idx]
    }

    pub fn cofaces(&self, k: usize, idx: usize) -> &[usize] {
        self.cofaces.get(k).and_then(|l| l.get(idx)).map_or(&[], |v| v.as_slice())
    }

    pub fn f_vector(&self) -> FVector {
        let mut counts: Vec<usize> = self.cells.iter().map(Vec::len).collect();
        while counts.len() > 1 && counts.last() == Some(&0) {
            counts.pop();
        }
        FVector(counts)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().euler_characteristic()
    }

    /// Number of 2-cells having the 1-cell `e` as a face.
    pub fn edge_face_count(&self, e: usize) -> Result<usize> {
        self.cell(1, e)?;
        Ok(self.cofaces(1, e).len())
    }

    /// Label of a configuration (0-cell): vertex labels in graph order,
    /// concatenated when every label is one character, comma-joined otherwise.
    pub fn config_label(&self, v: usize) -> String {
        self.occupied_label(&self.cells[0][v].parked)
    }

    fn occupied_label(&self, occ: &[VertexId]) -> String {
        let sep = if self.single_char_labels { "" } else { "," };
        occ.iter().map(|&x| self.graph.label(x)).join(sep)
    }

    /// Human-readable label of any cell: moving edges as `u-v`, then
    /// parked vertices, e.g. `a-1|b-2|3`.
    pub fn cell_label(&self, c: &Cell) -> String {
        if c.moving.is_empty() {
            return self.occupied_label(&c.parked);
        }
        let mut parts: Vec<String> = c.moving.iter().map(|&e| self.edge_label(e)).collect();
        if !c.parked.is_empty() {
            parts.push(self.occupied_label(&c.parked));
        }
        parts.join("|")
    }

    pub fn edge_label(&self, e: EdgeId) -> String {
        let [u, v] = self.graph.endpoints(e);
        format!("{}-{}", self.graph.label(u), self.graph.label(v))
    }

    /// Resolves a configuration label (`ab1`, `a,b,1`, any order) to a 0-cell.
    pub fn resolve_config(&self, spec: &str) -> Result<usize> {
        let parts: Vec<String> = if spec.contains(',') {
            spec.split(',').map(|s| s.trim().to_string()).collect()
        } else if self.single_char_labels {
            spec.chars().map(String::from).collect()
        } else {
            vec![spec.to_string()]
        };
        let mut occ = Vec::with_capacity(parts.len());
        for p in &parts {
            occ.push(self.graph.vertex(p).ok_or_else(|| {
                Error::NotFound(format!("configuration {spec:?}: no vertex {p:?}"))
            })?);
        }
        let cell = Cell::new(Vec::new(), occ);
        self.index_of(&cell)
            .ok_or_else(|| Error::NotFound(format!("configuration {spec:?}")))
    }

    /// Endpoints of a 1-cell as 0-cell indices: `[tail, head]`.
    pub fn edge_ends(&self, e: usize) -> [usize; 2] {
        let f = &self.faces[1][e];
        [f[0], f[1]]
    }

    /// All cells (by dimension) having the 0-cell `v` as a vertex.
    pub fn star(&self, v: usize) -> Vec<Vec<usize>> {
        let mut levels = vec![vec![v]];
        for k in 0..self.dim() {
            let mut up: Vec<usize> = levels[k].iter().flat_map(|&c| self.cofaces(k, c).iter().copied()).collect();
            up.sort_unstable();
            up.dedup();
            if up.is_empty() {
                break;
            }
            levels.push(up);
        }
        levels
    }

    pub fn vertex_link(&self, v: usize) -> Result<LinkComplex> {
        self.cell(0, v)?;
        let star = self.star(v);
        let occupied = &self.cells[0][v].parked;
        let mut vertices = Vec::new();
        let mut by_edge: HashMap<EdgeId, usize> = HashMap::new();
        if let Some(ones) = star.get(1) {
            for &c in ones {
                let e = self.cells[1][c].moving[0];
                let [t, h] = self.edge_ends(c);
                let neighbor = if t == v { h } else { t };
                by_edge.insert(e, vertices.len());
                vertices.push(LinkVertex {
                    cell: c,
                    direction: e,
                    neighbor,
                    direction_label: self.edge_label(e),
                    config_label: self.config_label(neighbor),
                });
            }
        }
        disambiguate(&mut vertices, |lv| &mut lv.direction_label);
        disambiguate(&mut vertices, |lv| &mut lv.config_label);
        let mut simplices = Vec::new();
        for (k, level) in star.iter().enumerate().skip(2) {
            for &c in level {
                let mut s: Vec<usize> = self.cells[k][c]
                    .moving
                    .iter()
                    .map(|e| {
                        by_edge.get(e).copied().ok_or_else(|| {
                            Error::Internal(format!("cube at {} uses edge {} without a link vertex", self.config_label(v), e.0))
                        })
                    })
                    .collect::<Result<_>>()?;
                s.sort_unstable();
                simplices.push(s);
            }
        }
        simplices.sort();
        Ok(LinkComplex {
            base: v,
            base_label: self.occupied_label(occupied),
            vertices,
            simplices,
        })
    }

    /// Flag, connectivity and cut checks for every vertex link.
    pub fn check_links(&self, exec: Exec) -> Result<Vec<LinkReport>> {
        par::map_range(exec, self.num_cells(0), |v| self.vertex_link(v).map(|l| l.report()))
            .into_iter()
            .collect()
    }
}

fn disambiguate<F>(vertices: &mut [LinkVertex], field: F)
where
    F: Fn(&mut LinkVertex) -> &mut String,
{
    let mut counts: HashMap<String, usize> = HashMap::new();
    for lv in vertices.iter_mut() {
        *counts.entry(field(lv).clone()).or_default() += 1;
    }
    for lv in vertices.iter_mut() {
        let e = lv.direction.0;
        let s = field(lv);
        if counts[s.as_str()] > 1 {
            s.push_str(&format!("#{e}"));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkVertex {
    /// The 1-cell leaving the base configuration.
    pub cell: usize,
    /// The graph edge along which one strand moves.
    pub direction: EdgeId,
    /// The configuration at the far end of `cell`.
    pub neighbor: usize,
    pub direction_label: String,
    pub config_label: String,
}

/// Which labels to put on link vertices when exporting the link as a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinkLabels {
    /// Adjacent configuration, e.g. `a12` in the link of `ab1`.
    #[default]
    Config,
    /// Moving edge, e.g. `a-2`.
    Direction,
}

/// Link of a 0-cell: one vertex per incident 1-cell, one (k-1)-simplex per
/// k-cube at the base configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkComplex {
    pub base: usize,
    pub base_label: String,
    pub vertices: Vec<LinkVertex>,
    /// Simplices of dimension >= 1 as sorted vertex index lists.
    pub simplices: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkReport {
    pub vertex: String,
    pub link_vertices: usize,
    pub link_edges: usize,
    pub flag: bool,
    pub connected: bool,
    pub has_cut_vertex: bool,
    pub has_cut_edge: bool,
    pub min_girth: Option<usize>,
}

impl LinkComplex {
    pub fn dim(&self) -> isize {
        if self.vertices.is_empty() {
            return -1;
        }
        self.simplices.iter().map(|s| s.len() as isize - 1).max().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = [usize; 2]> + '_ {
        self.simplices.iter().filter(|s| s.len() == 2).map(|s| [s[0], s[1]])
    }

    pub fn labels(&self, which: LinkLabels) -> Vec<&str> {
        self.vertices
            .iter()
            .map(|lv| match which {
                LinkLabels::Config => lv.config_label.as_str(),
                LinkLabels::Direction => lv.direction_label.as_str(),
            })
            .collect()
    }

    /// The 1-skeleton as a graph with the chosen labels.
    pub fn graph(&self, which: LinkLabels) -> Multigraph {
        let mut g = Multigraph::new();
        for l in self.labels(which) {
            g.add_vertex(l).expect("link labels are unique");
        }
        for [a, b] in self.edges() {
            g.add_edge(VertexId(a), VertexId(b));
        }
        g
    }

    /// Link vertex index by either label.
    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.vertices
            .iter()
            .position(|lv| lv.config_label == label || lv.direction_label == label)
    }

    /// Every clique of the 1-skeleton spans a simplex.
    pub fn is_flag(&self) -> bool {
        self.non_flag_clique().is_none()
    }

    /// A clique of size >= 3 that is not a simplex, if any.
    pub fn non_flag_clique(&self) -> Option<Vec<usize>> {
        let n = self.vertices.len();
        let mut adj = vec![vec![false; n]; n];
        for [a, b] in self.edges() {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        let simplices: HashSet<&[usize]> = self.simplices.iter().map(Vec::as_slice).collect();
        let mut stack: Vec<Vec<usize>> = self.edges().map(|e| e.to_vec()).collect();
        while let Some(clique) = stack.pop() {
            let last = *clique.last().unwrap();
            for w in last + 1..n {
                if clique.iter().all(|&u| adj[u][w]) {
                    let mut bigger = clique.clone();
                    bigger.push(w);
                    if !simplices.contains(bigger.as_slice()) {
                        return Some(bigger);
                    }
                    stack.push(bigger);
                }
            }
        }
        None
    }

    pub fn report(&self) -> LinkReport {
        let g = self.graph(LinkLabels::Config);
        let (cut_vertex, cut_edge) = cut_structure(&g);
        LinkReport {
            vertex: self.base_label.clone(),
            link_vertices: g.vertex_count(),
            link_edges: g.edge_count(),
            flag: self.is_flag(),
            connected: g.vertex_count() > 0 && g.is_connected(),
            has_cut_vertex: cut_vertex,
            has_cut_edge: cut_edge,
            min_girth: g.girth(),
        }
    }
}

/// Whether a graph has an articulation point and whether it has a bridge.
pub fn cut_structure(g: &Multigraph) -> (bool, bool) {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut cut_vertex = false;
    let mut cut_edge = false;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // iterative DFS: (vertex, parent edge, next incident index)
        let mut stack: Vec<(usize, Option<EdgeId>, usize)> = vec![(root, None, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        while let Some(&mut (u, pe, ref mut next)) = stack.last_mut() {
            let inc = g.incident(VertexId(u));
            if *next < inc.len() {
                let e = inc[*next];
                *next += 1;
                if Some(e) == pe {
                    continue;
                }
                let w = g.opposite(e, VertexId(u)).0;
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if u == root {
                        root_children += 1;
                    }
                    stack.push((w, Some(e), 0));
                } else {
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] > disc[p] {
                        cut_edge = true;
                    }
                    if p != root && low[u] >= disc[p] {
                        cut_vertex = true;
                    }
                }
            }
        }
        if root_children > 1 {
            cut_vertex = true;
        }
    }
    (cut_vertex, cut_edge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_theta, make_tripod, subdivide_edge};
    use num_integer::binomial;
    use proptest::prelude::*;

    fn theta(m: usize) -> CubeComplex {
        build_uconf(&make_theta(m).unwrap(), 3).unwrap()
    }

    // Counts by direct formula over vertex triples, (edge, pair) and
    // (disjoint pair, vertex) choices.
    fn counting_oracle(g: &Multigraph, n: usize) -> Vec<usize> {
        let nv = g.vertex_count();
        let edges: Vec<[VertexId; 2]> = g.edges().map(|(_, e)| e).collect();
        let mut f = vec![binomial(nv, n)];
        let mut k = 1;
        loop {
            let mut count = 0;
            for combo in (0..edges.len()).combinations(k) {
                let mut vs: Vec<VertexId> = combo.iter().flat_map(|&i| edges[i]).collect();
                vs.sort();
                vs.dedup();
                if vs.len() == 2 * k && k <= n && nv >= 2 * k {
                    count += binomial(nv - 2 * k, n - k);
                }
            }
            if count == 0 {
                break;
            }
            f.push(count);
            k += 1;
        }
        f
    }

    #[test]
    fn tripod_hexagon() {
        let x = build_uconf(&make_tripod(), 2).unwrap();
        assert_eq!(x.f_vector(), FVector(vec![6, 6]));
        assert_eq!(x.euler_characteristic(), 0);
        for v in 0..6 {
            let l = x.vertex_link(v).unwrap();
            assert_eq!(l.vertices.len(), 2);
            assert!(!l.report().connected);
        }
    }

    #[test]
    fn theta_f_vectors() {
        assert_eq!(theta(5).f_vector(), FVector(vec![35, 100, 60]));
        assert_eq!(theta(4).f_vector(), FVector(vec![20, 48, 24]));
        assert_eq!(theta(7).f_vector(), FVector(vec![84, 294, 210]));
        assert_eq!(theta(5).euler_characteristic(), -5);
        assert_eq!(theta(7).euler_characteristic(), 0);
        assert_eq!(theta(4).euler_characteristic(), -4);
    }

    #[test]
    fn euler_formula_sweep() {
        for m in 3..=10i64 {
            let x = theta(m as usize);
            assert_eq!(x.euler_characteristic(), m * (m - 2) * (m - 7) / 6, "m = {m}");
        }
    }

    #[test]
    fn too_many_strands_gives_empty_complex() {
        let g = Multigraph::from_labels(&["a", "b"], &[("a", "b")]).unwrap();
        let opts = BuildOptions { force: true, ..Default::default() };
        let x = build_uconf_with(&g, 3, &opts).unwrap();
        assert_eq!(x.f_vector(), FVector(vec![0]));
        assert!(!x.warnings().is_empty());
        assert!(matches!(build_uconf(&g, 3), Err(Error::NotAdmissible { .. })));
    }

    #[test]
    fn sequential_and_parallel_builds_agree() {
        let g = make_theta(7).unwrap();
        let a = build_uconf_with(&g, 3, &BuildOptions { exec: Exec::Sequential, ..Default::default() }).unwrap();
        let b = build_uconf_with(&g, 3, &BuildOptions { exec: Exec::Parallel, ..Default::default() }).unwrap();
        assert_eq!(a.cells, b.cells);
        assert_eq!(a.faces, b.faces);
    }

    #[test]
    fn labels_resolve_in_any_order() {
        let x = theta(5);
        let v = x.resolve_config("ab1").unwrap();
        assert_eq!(x.config_label(v), "ab1");
        assert_eq!(x.resolve_config("1ba").unwrap(), v);
        assert_eq!(x.resolve_config("a,b,1").unwrap(), v);
        assert!(x.resolve_config("abq").is_err());
        assert!(x.resolve_config("ab").is_err());
    }

    #[test]
    fn theta5_links() {
        let x = theta(5);
        let l = x.vertex_link(x.resolve_config("123").unwrap()).unwrap();
        assert_eq!((l.vertices.len(), l.edges().count()), (6, 6));
        let l = x.vertex_link(x.resolve_config("a12").unwrap()).unwrap();
        assert_eq!((l.vertices.len(), l.edges().count()), (5, 6));
        let l = x.vertex_link(x.resolve_config("ab1").unwrap()).unwrap();
        assert_eq!((l.vertices.len(), l.edges().count()), (8, 12));
        let labels: HashSet<&str> = l.labels(LinkLabels::Config).into_iter().collect();
        for s in ["a12", "a13", "a14", "a15", "b12", "b13", "b14", "b15"] {
            assert!(labels.contains(s), "{s}");
        }
        let dirs: HashSet<&str> = l.labels(LinkLabels::Direction).into_iter().collect();
        assert!(dirs.contains("2-b") && dirs.contains("a-2"));
    }

    #[test]
    fn abi_link_is_bipartite_minus_matching() {
        for m in 3..=8 {
            let x = theta(m);
            let l = x.vertex_link(x.resolve_config("ab1").unwrap()).unwrap();
            let g = l.graph(LinkLabels::Config);
            assert_eq!(g.vertex_count(), 2 * (m - 1));
            for j in 2..=m {
                for k in 2..=m {
                    let aj = g.vertex(&format!("a1{j}")).unwrap();
                    let bk = g.vertex(&format!("b1{k}")).unwrap();
                    assert_eq!(g.edge_between(aj, bk).is_some(), j != k, "m={m} j={j} k={k}");
                }
            }
            assert_eq!(g.edge_count(), (m - 1) * (m - 2));
        }
    }

    #[test]
    fn edge_face_counts() {
        let x = theta(5);
        let edge = |p: &str, q: &str| {
            let (u, v) = (x.resolve_config(p).unwrap(), x.resolve_config(q).unwrap());
            x.cofaces(0, u).iter().copied().find(|&e| x.edge_ends(e).contains(&v)).unwrap()
        };
        assert_eq!(x.edge_face_count(edge("123", "a12")).unwrap(), 2);
        assert_eq!(x.edge_face_count(edge("ab1", "a12")).unwrap(), 3);
        let x7 = theta(7);
        let (u, v) = (x7.resolve_config("ab1").unwrap(), x7.resolve_config("a12").unwrap());
        let e = x7.cofaces(0, u).iter().copied().find(|&e| x7.edge_ends(e).contains(&v)).unwrap();
        assert_eq!(x7.edge_face_count(e).unwrap(), 5);
        assert!(x.edge_face_count(100_000).is_err());
    }

    #[test]
    fn check_links_theta() {
        let reports = theta(5).check_links(Exec::Parallel).unwrap();
        assert_eq!(reports.len(), 35);
        assert!(reports.iter().all(|r| r.flag && r.connected && !r.has_cut_vertex && !r.has_cut_edge));
        let reports = theta(7).check_links(Exec::Sequential).unwrap();
        assert!(reports.iter().all(|r| r.flag));
        assert!(reports.iter().all(|r| r.min_girth == Some(4) || r.min_girth == Some(6)));
    }

    #[test]
    fn higher_dimensional_links_are_flag() {
        // three disjoint edges allow 3-cubes
        let g = Multigraph::from_labels(
            &["x", "y", "z", "p", "q", "r", "c"],
            &[("x", "p"), ("y", "q"), ("z", "r"), ("c", "x"), ("c", "y"), ("c", "z")],
        )
        .unwrap();
        let opts = BuildOptions { force: true, ..Default::default() };
        let x = build_uconf_with(&g, 3, &opts).unwrap();
        assert_eq!(x.dim(), 3);
        for v in 0..x.num_cells(0) {
            let l = x.vertex_link(v).unwrap();
            assert!(l.is_flag());
        }
        let v = x.resolve_config("xyz").unwrap();
        assert_eq!(x.vertex_link(v).unwrap().dim(), 2);
    }

    #[test]
    fn non_flag_detected() {
        let l = LinkComplex {
            base: 0,
            base_label: "v".into(),
            vertices: (0..3)
                .map(|i| LinkVertex {
                    cell: i,
                    direction: EdgeId(i),
                    neighbor: i,
                    direction_label: format!("d{i}"),
                    config_label: format!("c{i}"),
                })
                .collect(),
            simplices: vec![vec![0, 1], vec![0, 2], vec![1, 2]],
        };
        assert_eq!(l.non_flag_clique(), Some(vec![0, 1, 2]));
    }

    #[test]
    fn drop_cell_removes_cofaces() {
        let x = theta(4);
        let y = x.without_cell(1, 0).unwrap();
        let removed = x.cofaces(1, 0).len();
        assert_eq!(y.f_vector().0, vec![20, 47, 24 - removed]);
    }

    #[test]
    fn cut_structure_basics() {
        let path = Multigraph::from_labels(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert_eq!(cut_structure(&path), (true, true));
        let tri = Multigraph::from_labels(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        assert_eq!(cut_structure(&tri), (false, false));
        let bowtie = Multigraph::from_labels(
            &["a", "b", "c", "d", "e"],
            &[("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("d", "e"), ("e", "c")],
        )
        .unwrap();
        assert_eq!(cut_structure(&bowtie), (true, false));
    }

    fn barycentric_chi(x: &CubeComplex) -> i64 {
        let mut f = vec![0i64; x.dim() + 1];
        for k in 0..=x.dim() {
            // interior cells of the subdivided k-cube: 2^k top cells,
            // in general C(k,j) 2^j cells of dim j lie in the open cube
            for j in 0..=k {
                f[j] += (x.num_cells(k) * binomial(k, j) * (1usize << j)) as i64;
            }
        }
        f.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c } else { -c }).sum()
    }

    #[test]
    fn barycentric_subdivision_keeps_chi() {
        for m in 3..=7 {
            let x = theta(m);
            assert_eq!(barycentric_chi(&x), x.euler_characteristic());
        }
    }

    fn arb_connected_graph() -> impl Strategy<Value = Multigraph> {
        (3usize..7).prop_flat_map(|n| {
            (prop::collection::vec(0..n, n - 1), prop::collection::vec((0..n, 0..n), 0..4)).prop_map(
                move |(parents, extra)| {
                    let mut g = Multigraph::new();
                    for i in 0..n {
                        g.add_vertex(&format!("v{i}")).unwrap();
                    }
                    for i in 1..n {
                        g.add_edge(VertexId(i), VertexId(parents[i - 1] % i));
                    }
                    for (u, v) in extra {
                        if u != v && g.edge_between(VertexId(u), VertexId(v)).is_none() {
                            g.add_edge(VertexId(u), VertexId(v));
                        }
                    }
                    g
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn structure_matches_counting_oracle(g in arb_connected_graph(), n in 1usize..4) {
            let opts = BuildOptions { force: true, ..Default::default() };
            let x = build_uconf_with(&g, n, &opts).unwrap();
            let mut expect = counting_oracle(&g, n);
            while expect.len() > 1 && expect.last() == Some(&0) {
                expect.pop();
            }
            prop_assert_eq!(&x.f_vector().0, &expect);
            for k in 1..=x.dim() {
                for (i, c) in x.cells(k).iter().enumerate() {
                    prop_assert_eq!(x.faces(k, i).len(), 2 * k);
                    prop_assert!(c.is_valid(&g, n));
                }
            }
        }

        #[test]
        fn link_vertex_count_matches_direct_enumeration(g in arb_connected_graph(), n in 1usize..4) {
            let opts = BuildOptions { force: true, ..Default::default() };
            let x = build_uconf_with(&g, n, &opts).unwrap();
            for v in 0..x.num_cells(0) {
                let occ: HashSet<VertexId> = x.cells(0)[v].parked.iter().copied().collect();
                let direct = g.edges().filter(|(_, [a, b])| occ.contains(a) != occ.contains(b)).count();
                prop_assert_eq!(x.vertex_link(v).unwrap().vertices.len(), direct);
            }
        }

        #[test]
        fn squares_iff_disjoint_edges(g in arb_connected_graph()) {
            let opts = BuildOptions { force: true, ..Default::default() };
            let x = build_uconf_with(&g, 2, &opts).unwrap();
            let disjoint = g.edges().any(|(e, _)| g.edges().any(|(f, _)| crate::graph::edges_disjoint(&g, e, f).unwrap()));
            prop_assert_eq!(x.num_cells(2) > 0, disjoint && g.vertex_count() >= 4);
        }
    }

    #[test]
    fn subdivided_theta_builds() {
        let g = make_theta(3).unwrap();
        let g = subdivide_edge(&g, EdgeId(0), 1).unwrap();
        let x = build_uconf(&g, 3).unwrap();
        assert_eq!(x.f_vector().0, counting_oracle(&g, 3));
    }
}
