//! Finite undirected multigraphs with labeled vertices.
//!
//! Edge ids are positions in the edge list, vertex ids are positions in the
//! vertex list; both follow input order so that everything downstream is
//! reproducible from the serialized form.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Multigraph {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: Vec<[VertexId; 2]>,
    incident: Vec<Vec<EdgeId>>,
}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from labels and label pairs.
    pub fn from_labels<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut g = Multigraph::new();
        for v in vertices {
            g.add_vertex(v.as_ref())?;
        }
        for (u, v) in edges {
            let a = g.require(u.as_ref())?;
            let b = g.require(v.as_ref())?;
            g.add_edge(a, b);
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, label: &str) -> Result<VertexId> {
        if label.is_empty() {
            return Err(Error::InvalidInput("vertex labels must be nonempty".into()));
        }
        if self.index.contains_key(label) {
            return Err(Error::InvalidInput(format!("duplicate vertex label {label:?}")));
        }
        let id = VertexId(self.labels.len());
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        self.incident.push(Vec::new());
        Ok(id)
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> EdgeId {
        assert!(u.0 < self.labels.len() && v.0 < self.labels.len(), "edge endpoint out of range");
        let id = EdgeId(self.edges.len());
        self.edges.push([u, v]);
        self.incident[u.0].push(id);
        if u != v {
            self.incident[v.0].push(id);
        }
        id
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.labels.len()).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, [VertexId; 2])> + '_ {
        self.edges.iter().enumerate().map(|(i, &e)| (EdgeId(i), e))
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<VertexId> {
        self.vertex(label)
            .ok_or_else(|| Error::NotFound(format!("vertex {label:?}")))
    }

    pub fn endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e.0]
    }

    pub fn try_endpoints(&self, e: EdgeId) -> Result<[VertexId; 2]> {
        self.edges
            .get(e.0)
            .copied()
            .ok_or_else(|| Error::NotFound(format!("edge {}", e.0)))
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v.0]
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: VertexId) -> usize {
        self.incident[v.0]
            .iter()
            .map(|&e| if self.is_loop(e) { 2 } else { 1 })
            .sum()
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let [u, v] = self.edges[e.0];
        u == v
    }

    /// The endpoint of `e` that is not `v` (or `v` itself for a loop).
    pub fn opposite(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.edges[e.0];
        if a == v {
            b
        } else {
            debug_assert_eq!(b, v);
            a
        }
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.incident[v.0].iter().map(move |&e| self.opposite(e, v))
    }

    /// First edge joining `u` and `v`, if any.
    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.incident[u.0]
            .iter()
            .copied()
            .find(|&e| self.opposite(e, u) == v)
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|[u, v]| u == v)
    }

    pub fn has_multi_edges(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges
            .iter()
            .any(|&[u, v]| !seen.insert(if u <= v { (u, v) } else { (v, u) }))
    }

    pub fn is_simple(&self) -> bool {
        !self.has_loops() && !self.has_multi_edges()
    }

    /// Component index per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.vertex_count()];
        let mut count = 0;
        for s in 0..self.vertex_count() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut queue = VecDeque::from([VertexId(s)]);
            while let Some(u) = queue.pop_front() {
                for w in self.neighbors(u) {
                    if comp[w.0] == usize::MAX {
                        comp[w.0] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Length of a shortest cycle (loops count 1, parallel pairs 2).
    pub fn girth(&self) -> Option<usize> {
        if self.has_loops() {
            return Some(1);
        }
        let mut best: Option<usize> = None;
        for s in self.vertices() {
            let mut dist = vec![usize::MAX; self.vertex_count()];
            let mut via = vec![usize::MAX; self.vertex_count()];
            dist[s.0] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &e in self.incident(u) {
                    if e.0 == via[u.0] {
                        continue;
                    }
                    let w = self.opposite(e, u);
                    if dist[w.0] == usize::MAX {
                        dist[w.0] = dist[u.0] + 1;
                        via[w.0] = e.0;
                        queue.push_back(w);
                    } else {
                        let len = dist[u.0] + dist[w.0] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// The subgraph induced by `keep`, in the order given.
    /// Returns the subgraph together with its vertex and edge maps back into `self`.
    pub fn induced(&self, keep: &[VertexId]) -> Result<(Multigraph, Vec<VertexId>, Vec<EdgeId>)> {
        let mut local = vec![usize::MAX; self.vertex_count()];
        let mut sub = Multigraph::new();
        for &v in keep {
            if v.0 >= self.vertex_count() {
                return Err(Error::NotFound(format!("vertex index {}", v.0)));
            }
            if local[v.0] != usize::MAX {
                return Err(Error::InvalidInput(format!(
                    "vertex {:?} listed twice",
                    self.label(v)
                )));
            }
            local[v.0] = sub.add_vertex(self.label(v))?.0;
        }
        let mut edge_map = Vec::new();
        for (e, [u, v]) in self.edges() {
            if local[u.0] != usize::MAX && local[v.0] != usize::MAX {
                sub.add_edge(VertexId(local[u.0]), VertexId(local[v.0]));
                edge_map.push(e);
            }
        }
        Ok((sub, keep.to_vec(), edge_map))
    }
}

/// Θ_m: poles `a`, `b` joined by m strands through `1..=m`.
pub fn make_theta(m: usize) -> Result<Multigraph> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!("theta graph needs m >= 3, got {m}")));
    }
    Ok(theta_unchecked(m))
}

pub(crate) fn theta_unchecked(m: usize) -> Multigraph {
    let mut g = Multigraph::new();
    let a = g.add_vertex("a").unwrap();
    let b = g.add_vertex("b").unwrap();
    for j in 1..=m {
        let v = g.add_vertex(&j.to_string()).unwrap();
        g.add_edge(a, v);
        g.add_edge(v, b);
    }
    g
}

/// The tripod Y: center `x` with leaves `c`, `a`, `b`.
pub fn make_tripod() -> Multigraph {
    Multigraph::from_labels(&["c", "x", "a", "b"], &[("c", "x"), ("x", "a"), ("x", "b")]).unwrap()
}

/// Replaces `e` with a path of `k + 1` edges through `k` fresh vertices.
///
/// The first segment keeps the id of `e`; the remaining `k` segments are
/// appended to the edge list. Fresh vertices are labeled `"<e>.<i>"`,
/// with `'` appended until the label is unused.
pub fn subdivide_edge(g: &Multigraph, e: EdgeId, k: usize) -> Result<Multigraph> {
    if k == 0 {
        return Err(Error::InvalidParameter("subdivision count must be >= 1".into()));
    }
    let [u, v] = g.try_endpoints(e)?;
    let mut out = g.clone();
    let mut chain = Vec::with_capacity(k);
    for i in 1..=k {
        let mut label = format!("{}.{}", e.0, i);
        while out.vertex(&label).is_some() {
            label.push('\'');
        }
        chain.push(out.add_vertex(&label)?);
    }
    // rewire the original slot to u -> first fresh vertex
    let first = chain[0];
    out.edges[e.0] = [u, first];
    if u != v {
        out.incident[v.0].retain(|&x| x != e);
    }
    out.incident[first.0].push(e);
    for w in chain.windows(2) {
        out.add_edge(w[0], w[1]);
    }
    out.add_edge(*chain.last().unwrap(), v);
    Ok(out)
}

/// Whether the closed edges `e1` and `e2` share no vertex.
pub fn edges_disjoint(g: &Multigraph, e1: EdgeId, e2: EdgeId) -> Result<bool> {
    let [a, b] = g.try_endpoints(e1)?;
    let [c, d] = g.try_endpoints(e2)?;
    Ok(a != c && a != d && b != c && b != d)
}

/// Thresholds used to decide whether a graph is fine enough for `n` strands.
///
/// With the defaults a graph is admissible when it has at least `n`
/// vertices, every branch between essential vertices (degree != 2) has at
/// least `n - 1` edges and every embedded cycle has at least `n + 1` edges.
/// Cycles are additionally required to have length >= 3 so that loops and
/// parallel edges are always removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Admissibility {
    pub path_slack: isize,
    pub cycle_slack: isize,
}

impl Default for Admissibility {
    fn default() -> Self {
        Admissibility { path_slack: -1, cycle_slack: 1 }
    }
}

impl Admissibility {
    pub fn min_path(&self, n: usize) -> usize {
        (n as isize + self.path_slack).max(1) as usize
    }

    pub fn min_cycle(&self, n: usize) -> usize {
        (n as isize + self.cycle_slack).max(3) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    Disconnected,
    TooFewVertices { have: usize, need: usize },
    ShortPath { from: String, to: String, length: usize, need: usize },
    ShortCycle { length: usize, need: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Disconnected => write!(f, "graph is disconnected"),
            Violation::TooFewVertices { have, need } => {
                write!(f, "graph has {have} vertices, needs at least {need}")
            }
            Violation::ShortPath { from, to, length, need } => write!(
                f,
                "path between essential vertices {from} and {to} has {length} edges, needs {need}"
            ),
            Violation::ShortCycle { length, need } => {
                write!(f, "graph has a cycle of length {length}, needs {need}")
            }
        }
    }
}

/// A maximal path whose interior vertices all have degree 2.
#[derive(Debug, Clone)]
struct Branch {
    ends: [VertexId; 2],
    edges: Vec<EdgeId>,
    /// No essential vertex at all: the branch is a whole cycle component.
    closed: bool,
}

fn branches(g: &Multigraph) -> Vec<Branch> {
    let essential: Vec<bool> = g.vertices().map(|v| g.degree(v) != 2).collect();
    let mut used = vec![false; g.edge_count()];
    let mut out = Vec::new();
    for s in g.vertices().filter(|v| essential[v.0]) {
        for &e0 in g.incident(s) {
            if used[e0.0] {
                continue;
            }
            let mut edges = vec![e0];
            used[e0.0] = true;
            let mut cur = g.opposite(e0, s);
            let mut last = e0;
            while !essential[cur.0] {
                let next = g
                    .incident(cur)
                    .iter()
                    .copied()
                    .find(|&x| x != last)
                    .expect("degree-2 vertex has a second edge");
                used[next.0] = true;
                edges.push(next);
                cur = g.opposite(next, cur);
                last = next;
            }
            out.push(Branch { ends: [s, cur], edges, closed: false });
        }
    }
    // components made entirely of degree-2 vertices
    for (e, [u, _]) in g.edges() {
        if used[e.0] {
            continue;
        }
        let mut edges = vec![e];
        used[e.0] = true;
        let start = u;
        let mut cur = g.opposite(e, u);
        let mut last = e;
        while cur != start {
            let next = g.incident(cur).iter().copied().find(|&x| x != last).unwrap();
            used[next.0] = true;
            edges.push(next);
            cur = g.opposite(next, cur);
            last = next;
        }
        out.push(Branch { ends: [start, start], edges, closed: true });
    }
    out
}

/// Checks the admissibility conditions, reporting the first one violated.
pub fn check_admissible(g: &Multigraph, n: usize, policy: &Admissibility) -> Result<(), Violation> {
    if !g.is_connected() {
        return Err(Violation::Disconnected);
    }
    if g.vertex_count() < n {
        return Err(Violation::TooFewVertices { have: g.vertex_count(), need: n });
    }
    let need_path = policy.min_path(n);
    for br in branches(g) {
        if !br.closed && br.ends[0] != br.ends[1] && br.edges.len() < need_path {
            return Err(Violation::ShortPath {
                from: g.label(br.ends[0]).to_string(),
                to: g.label(br.ends[1]).to_string(),
                length: br.edges.len(),
                need: need_path,
            });
        }
    }
    let need_cycle = policy.min_cycle(n);
    if let Some(girth) = g.girth() {
        if girth < need_cycle {
            return Err(Violation::ShortCycle { length: girth, need: need_cycle });
        }
    }
    Ok(())
}

/// Shortest cycle in the branch multigraph, weighted by branch length.
/// Returns the branch indices on that cycle and its total length.
fn shortest_weighted_cycle(ends: &[[usize; 2]], lens: &[usize], nv: usize) -> Option<(Vec<usize>, usize)> {
    let mut best: Option<(Vec<usize>, usize)> = None;
    for (b, &[u, v]) in ends.iter().enumerate() {
        if u == v {
            if best.as_ref().is_none_or(|(_, w)| lens[b] < *w) {
                best = Some((vec![b], lens[b]));
            }
            continue;
        }
        // Dijkstra from u to v avoiding branch b
        let mut dist = vec![usize::MAX; nv];
        let mut via: Vec<Option<(usize, usize)>> = vec![None; nv];
        let mut done = vec![false; nv];
        dist[u] = 0;
        loop {
            let Some(x) = (0..nv).filter(|&x| !done[x] && dist[x] != usize::MAX).min_by_key(|&x| dist[x]) else {
                break;
            };
            done[x] = true;
            if x == v {
                break;
            }
            for (c, &[p, q]) in ends.iter().enumerate() {
                if c == b || p == q {
                    continue;
                }
                let y = if p == x { q } else if q == x { p } else { continue };
                let d = dist[x] + lens[c];
                if d < dist[y] {
                    dist[y] = d;
                    via[y] = Some((x, c));
                }
            }
        }
        if dist[v] == usize::MAX {
            continue;
        }
        let total = dist[v] + lens[b];
        if best.as_ref().is_none_or(|(_, w)| total < *w) {
            let mut cyc = vec![b];
            let mut cur = v;
            while let Some((prev, c)) = via[cur] {
                cyc.push(c);
                cur = prev;
            }
            best = Some((cyc, total));
        }
    }
    best
}

/// Subdivides `g` until it is admissible for `n` strands.
///
/// Branch lengths are raised greedily: first every branch to the path
/// minimum (cycles to the cycle minimum), then the shortest branch on the
/// current shortest cycle until the girth is large enough, then the
/// longest branch until there are enough vertices. Already admissible
/// graphs are returned unchanged.
pub fn admissible_subdivision(g: &Multigraph, n: usize, policy: &Admissibility) -> Result<Multigraph> {
    if n == 0 {
        return Err(Error::InvalidParameter("strand count must be >= 1".into()));
    }
    if g.vertex_count() == 0 || !g.is_connected() {
        return Err(Error::InvalidInput("admissible subdivision needs a connected, nonempty graph".into()));
    }
    if check_admissible(g, n, policy).is_ok() {
        return Ok(g.clone());
    }
    let brs = branches(g);
    let mut target: Vec<usize> = brs.iter().map(|b| b.edges.len()).collect();
    let need_path = policy.min_path(n);
    let need_cycle = policy.min_cycle(n);
    for (i, b) in brs.iter().enumerate() {
        let min = if b.closed || b.ends[0] == b.ends[1] { need_cycle } else { need_path };
        target[i] = target[i].max(min);
    }
    let ends: Vec<[usize; 2]> = brs.iter().map(|b| [b.ends[0].0, b.ends[1].0]).collect();
    while let Some((cyc, w)) = shortest_weighted_cycle(&ends, &target, g.vertex_count()) {
        if w >= need_cycle {
            break;
        }
        let pick = *cyc.iter().min_by_key(|&&c| (target[c], c)).unwrap();
        target[pick] += need_cycle - w;
    }
    let extra: usize = brs.iter().zip(&target).map(|(b, &t)| t - b.edges.len()).sum();
    let have = g.vertex_count() + extra;
    if have < n {
        let Some(longest) = (0..brs.len()).max_by_key(|&i| (target[i], std::cmp::Reverse(i))) else {
            return Err(Error::InvalidInput(format!(
                "graph without edges cannot be subdivided to {n} vertices"
            )));
        };
        target[longest] += n - have;
    }
    let mut out = g.clone();
    for (b, &t) in brs.iter().zip(&target) {
        let k = t - b.edges.len();
        if k > 0 {
            out = subdivide_edge(&out, b.edges[0], k)?;
        }
    }
    debug_assert!(check_admissible(&out, n, policy).is_ok());
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl From<&Multigraph> for GraphJson {
    fn from(g: &Multigraph) -> Self {
        GraphJson {
            vertices: g.labels.clone(),
            edges: g
                .edges
                .iter()
                .map(|&[u, v]| [g.label(u).to_string(), g.label(v).to_string()])
                .collect(),
        }
    }
}

impl TryFrom<GraphJson> for Multigraph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Self> {
        let mut g = Multigraph::new();
        for (i, v) in j.vertices.iter().enumerate() {
            g.add_vertex(v)
                .map_err(|e| Error::Parse(format!("vertices[{i}]: {e}")))?;
        }
        for (i, [u, v]) in j.edges.iter().enumerate() {
            let a = g.vertex(u).ok_or_else(|| {
                Error::Parse(format!("edges[{i}]: endpoint {u:?} is not a declared vertex"))
            })?;
            let b = g.vertex(v).ok_or_else(|| {
                Error::Parse(format!("edges[{i}]: endpoint {v:?} is not a declared vertex"))
            })?;
            g.add_edge(a, b);
        }
        Ok(g)
    }
}

pub fn parse_graph(text: &str) -> Result<Multigraph> {
    let j: GraphJson = serde_json::from_str(text)?;
    Multigraph::try_from(j)
}

pub fn serialize_graph(g: &Multigraph) -> String {
    serde_json::to_string_pretty(&GraphJson::from(g)).expect("graph json serializes")
}
