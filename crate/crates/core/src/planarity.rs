//! Planarity of small graphs: combinatorial embeddings (rotation systems),
//! face tracing, Kuratowski witnesses and exhaustive embedding enumeration.
//!
//! Face tracing convention: after traversing the dart `x -> u`, the walk
//! continues with `u -> succ_u(x)`, where `succ_u` is the successor in the
//! rotation at `u`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Multigraph, VertexId};

/// A sequence considered up to rotation.
#[derive(Debug, Clone)]
pub struct CyclicOrder<T> {
    items: Vec<T>,
}

impl<T: Clone + Ord> Eq for CyclicOrder<T> {}

impl<T: Clone + Ord> CyclicOrder<T> {
    pub fn new(items: Vec<T>) -> Self {
        CyclicOrder { items }
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut items = self.items.clone();
        items.reverse();
        CyclicOrder { items }
    }

    /// Rotation starting at the smallest item.
    pub fn canonical(&self) -> Vec<T> {
        let Some(start) = (0..self.items.len()).min_by(|&a, &b| self.items[a].cmp(&self.items[b])) else {
            return Vec::new();
        };
        self.items[start..].iter().chain(&self.items[..start]).cloned().collect()
    }

    pub fn is_opposite(&self, other: &Self) -> bool {
        *self == other.reversed()
    }

    pub fn map<U: Clone + Ord>(&self, f: impl FnMut(&T) -> U) -> CyclicOrder<U> {
        CyclicOrder { items: self.items.iter().map(f).collect() }
    }
}

impl<T: Clone + Ord> PartialEq for CyclicOrder<T> {
    fn eq(&self, other: &Self) -> bool {
        let n = self.items.len();
        if n != other.items.len() {
            return false;
        }
        if n == 0 {
            return true;
        }
        (0..n).any(|s| (0..n).all(|i| self.items[(s + i) % n] == other.items[i]))
    }
}

impl<T: Clone + Ord + Hash> Hash for CyclicOrder<T> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

impl<T: fmt::Display> fmt::Display for CyclicOrder<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.items.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A rotation system on a graph plus a handedness flag.
///
/// `rotation[v]` lists the edges at `v` in cyclic order. The order in which
/// neighbors are *read* is the rotation itself when `clockwise` is set and
/// its reverse otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    graph: Multigraph,
    rotation: Vec<Vec<EdgeId>>,
    clockwise: bool,
}

/// A directed edge: `edge` traversed away from `from`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub edge: EdgeId,
    pub from: VertexId,
}

impl Embedding {
    pub fn new(graph: Multigraph, rotation: Vec<Vec<EdgeId>>, clockwise: bool) -> Result<Self> {
        if rotation.len() != graph.vertex_count() {
            return Err(Error::InvalidInput(format!(
                "rotation covers {} vertices, graph has {}",
                rotation.len(),
                graph.vertex_count()
            )));
        }
        if graph.has_loops() {
            return Err(Error::InvalidInput("rotation systems here are for loopless graphs".into()));
        }
        for v in graph.vertices() {
            let mut a = rotation[v.0].clone();
            let mut b = graph.incident(v).to_vec();
            a.sort();
            b.sort();
            if a != b {
                return Err(Error::InvalidInput(format!(
                    "rotation at {} is not a cyclic order of its incident edges",
                    graph.label(v)
                )));
            }
        }
        Ok(Embedding { graph, rotation, clockwise })
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn rotation(&self, v: VertexId) -> &[EdgeId] {
        &self.rotation[v.0]
    }

    pub fn clockwise(&self) -> bool {
        self.clockwise
    }

    /// Same rotation system, opposite handedness.
    pub fn flipped(&self) -> Self {
        Embedding { clockwise: !self.clockwise, ..self.clone() }
    }

    /// Neighbors of `w` in reading order.
    pub fn cyclic_neighbors(&self, w: VertexId) -> Result<CyclicOrder<VertexId>> {
        if w.0 >= self.graph.vertex_count() {
            return Err(Error::NotFound(format!("vertex index {}", w.0)));
        }
        let order = CyclicOrder::new(self.rotation[w.0].iter().map(|&e| self.graph.opposite(e, w)).collect());
        Ok(if self.clockwise { order } else { order.reversed() })
    }

    pub fn cyclic_neighbor_labels(&self, w: &str) -> Result<CyclicOrder<String>> {
        let v = self.graph.require(w)?;
        Ok(self.cyclic_neighbors(v)?.map(|&u| self.graph.label(u).to_string()))
    }

    /// Reading orders at every vertex, each rotated to start at its
    /// smallest neighbor; equal keys mean identical readings.
    pub fn reading_key(&self) -> Vec<Vec<VertexId>> {
        self.graph
            .vertices()
            .map(|v| self.cyclic_neighbors(v).expect("vertex in range").canonical())
            .collect()
    }

    fn successor(&self, at: VertexId, e: EdgeId) -> EdgeId {
        let rot = &self.rotation[at.0];
        let i = rot.iter().position(|&x| x == e).expect("edge in rotation");
        rot[(i + 1) % rot.len()]
    }

    /// Facial walks as dart sequences.
    pub fn face_darts(&self) -> Vec<Vec<Dart>> {
        let mut seen = HashSet::new();
        let mut faces = Vec::new();
        for v in self.graph.vertices() {
            for &e in &self.rotation[v.0] {
                let start = Dart { edge: e, from: v };
                if seen.contains(&start) {
                    continue;
                }
                let mut face = Vec::new();
                let mut d = start;
                loop {
                    seen.insert(d);
                    face.push(d);
                    let u = self.graph.opposite(d.edge, d.from);
                    d = Dart { edge: self.successor(u, d.edge), from: u };
                    if d == start {
                        break;
                    }
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Orientable genus from Euler's formula, summed over components.
    pub fn genus(&self) -> usize {
        let (_, comps) = self.graph.components();
        let isolated = self.graph.vertices().filter(|&v| self.graph.degree(v) == 0).count();
        let faces = self.face_darts().len() + isolated;
        let v = self.graph.vertex_count() as isize;
        let e = self.graph.edge_count() as isize;
        let twice = 2 * comps as isize - v + e - faces as isize;
        (twice / 2) as usize
    }

    pub fn is_planar(&self) -> bool {
        self.genus() == 0
    }

    pub fn to_json(&self) -> EmbeddingJson {
        let rotation = self
            .graph
            .vertices()
            .map(|v| {
                let ns = self.rotation[v.0].iter().map(|&e| self.graph.label(self.graph.opposite(e, v)).to_string());
                (self.graph.label(v).to_string(), ns.collect())
            })
            .collect();
        EmbeddingJson { orientation: if self.clockwise { "cw" } else { "ccw" }.into(), rotation }
    }

    /// Reads an embedding of the simple graph `graph` from its JSON form.
    pub fn from_json(graph: &Multigraph, j: &EmbeddingJson) -> Result<Self> {
        let clockwise = match j.orientation.as_str() {
            "cw" => true,
            "ccw" => false,
            other => return Err(Error::Parse(format!("orientation must be \"cw\" or \"ccw\", got {other:?}"))),
        };
        if graph.has_multi_edges() {
            return Err(Error::InvalidInput("label-based rotations need a simple graph".into()));
        }
        let mut missing = Vec::new();
        let mut rotation = Vec::with_capacity(graph.vertex_count());
        for v in graph.vertices() {
            let label = graph.label(v);
            let Some(ns) = j.rotation.get(label) else {
                missing.push(label.to_string());
                rotation.push(Vec::new());
                continue;
            };
            let mut es = Vec::with_capacity(ns.len());
            for n in ns {
                let e = graph
                    .vertex(n)
                    .and_then(|u| graph.edge_between(v, u))
                    .ok_or_else(|| Error::InvalidInput(format!("{label} has no neighbor {n:?}")))?;
                es.push(e);
            }
            rotation.push(es);
        }
        let extra: Vec<&String> = j.rotation.keys().filter(|k| graph.vertex(k).is_none()).collect();
        if !missing.is_empty() || !extra.is_empty() {
            return Err(Error::InvalidInput(format!("missing vertices {missing:?}, unknown vertices {extra:?}")));
        }
        Embedding::new(graph.clone(), rotation, clockwise)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub orientation: String,
    pub rotation: BTreeMap<String, Vec<String>>,
}

/// Facial walks as vertex sequences.
pub fn faces_of(emb: &Embedding) -> Vec<Vec<VertexId>> {
    emb.face_darts().into_iter().map(|f| f.into_iter().map(|d| d.from).collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KuratowskiKind {
    K5,
    K33,
}

impl fmt::Display for KuratowskiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KuratowskiKind::K5 => "K5",
            KuratowskiKind::K33 => "K3,3",
        })
    }
}

/// A subdivision of K5 or K3,3 inside a graph, by vertex labels.
///
/// For K3,3 the first three branch vertices form one side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KuratowskiWitness {
    pub kind: KuratowskiKind,
    pub branch_vertices: Vec<String>,
    pub paths: Vec<Vec<String>>,
}

impl KuratowskiWitness {
    /// Checks the witness against `h` without trusting how it was found.
    pub fn verify(&self, h: &Multigraph) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(format!("witness rejected: {m}")));
        let (nb, pairs): (usize, Vec<(usize, usize)>) = match self.kind {
            KuratowskiKind::K5 => (5, (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect()),
            KuratowskiKind::K33 => (6, (0..3).flat_map(|i| (3..6).map(move |j| (i, j))).collect()),
        };
        if self.branch_vertices.len() != nb {
            return bad(format!("{} branch vertices", self.branch_vertices.len()));
        }
        let mut branch = HashMap::new();
        for (i, b) in self.branch_vertices.iter().enumerate() {
            let v = h.vertex(b).ok_or_else(|| Error::InvalidInput(format!("witness rejected: no vertex {b:?}")))?;
            if branch.insert(v, i).is_some() {
                return bad(format!("branch vertex {b} repeated"));
            }
        }
        if self.paths.len() != pairs.len() {
            return bad(format!("{} paths, expected {}", self.paths.len(), pairs.len()));
        }
        let mut covered = HashSet::new();
        let mut interior = HashSet::new();
        let mut used_edges = HashSet::new();
        for p in &self.paths {
            if p.len() < 2 {
                return bad("path with fewer than two vertices".into());
            }
            let vs: Vec<VertexId> = p
                .iter()
                .map(|l| h.vertex(l).ok_or_else(|| Error::InvalidInput(format!("witness rejected: no vertex {l:?}"))))
                .collect::<Result<_>>()?;
            let (Some(&i), Some(&j)) = (branch.get(&vs[0]), branch.get(vs.last().unwrap())) else {
                return bad(format!("path {p:?} does not join branch vertices"));
            };
            if !covered.insert((i.min(j), i.max(j))) {
                return bad(format!("two paths join {} and {}", p[0], p.last().unwrap()));
            }
            for &x in &vs[1..vs.len() - 1] {
                if branch.contains_key(&x) || !interior.insert(x) {
                    return bad(format!("paths are not internally disjoint at {}", h.label(x)));
                }
            }
            for w in vs.windows(2) {
                let e = h
                    .edge_between(w[0], w[1])
                    .ok_or_else(|| Error::InvalidInput(format!("witness rejected: {} and {} are not adjacent", h.label(w[0]), h.label(w[1]))))?;
                if !used_edges.insert(e) {
                    return bad("an edge is used twice".into());
                }
            }
        }
        let want: HashSet<(usize, usize)> = pairs.into_iter().collect();
        if covered != want {
            return bad("paths do not realize the required branch pairs".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Planarity {
    Planar(Embedding),
    NonPlanar(KuratowskiWitness),
}

/// Decides planarity and returns a certificate either way.
pub fn test_planar(h: &Multigraph) -> Result<Planarity> {
    if h.has_loops() {
        return Err(Error::InvalidInput("planarity test expects a loopless graph".into()));
    }
    let (adj, rep) = simple_skeleton(h);
    match embed_simple(&adj) {
        Some(rot) => Ok(Planarity::Planar(expand_rotation(h, &rot, &rep)?)),
        None => Ok(Planarity::NonPlanar(kuratowski(h, &adj)?)),
    }
}

pub fn is_planar(h: &Multigraph) -> bool {
    let (adj, _) = simple_skeleton(h);
    embed_simple(&adj).is_some()
}

/// Underlying simple graph as sorted adjacency lists, and the edges
/// realizing each adjacent pair.
fn simple_skeleton(h: &Multigraph) -> (Vec<Vec<usize>>, HashMap<(usize, usize), Vec<EdgeId>>) {
    let mut rep: HashMap<(usize, usize), Vec<EdgeId>> = HashMap::new();
    for (e, [u, v]) in h.edges() {
        if u != v {
            rep.entry((u.0.min(v.0), u.0.max(v.0))).or_default().push(e);
        }
    }
    let mut adj = vec![Vec::new(); h.vertex_count()];
    for &(u, v) in rep.keys() {
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    (adj, rep)
}

/// Turns a neighbor rotation of the simple skeleton into an edge rotation,
/// putting parallel edges side by side (in opposite order at the two ends).
fn expand_rotation(h: &Multigraph, rot: &[Vec<usize>], rep: &HashMap<(usize, usize), Vec<EdgeId>>) -> Result<Embedding> {
    let rotation = rot
        .iter()
        .enumerate()
        .map(|(u, ns)| {
            ns.iter()
                .flat_map(|&w| {
                    let es = &rep[&(u.min(w), u.max(w))];
                    let fwd = u < w;
                    let it: Box<dyn Iterator<Item = EdgeId>> =
                        if fwd { Box::new(es.iter().copied()) } else { Box::new(es.iter().rev().copied()) };
                    it
                })
                .collect()
        })
        .collect();
    let emb = Embedding::new(h.clone(), rotation, true)?;
    if !emb.is_planar() {
        return Err(Error::Internal("constructed rotation system is not planar".into()));
    }
    Ok(emb)
}

/// Planar rotation system of a simple graph, or `None` if it is not planar.
fn embed_simple(adj: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let n = adj.len();
    let mut rot = vec![Vec::new(); n];
    for block in biconnected_blocks(adj) {
        if block.len() == 1 {
            let (u, v) = block[0];
            rot[u].push(v);
            rot[v].push(u);
            continue;
        }
        let block_rot = embed_block(n, &block)?;
        for (v, r) in block_rot.into_iter().enumerate() {
            rot[v].extend(r);
        }
    }
    Some(rot)
}

/// Edge sets of the biconnected blocks.
fn biconnected_blocks(adj: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    struct St<'a> {
        adj: &'a [Vec<usize>],
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<(usize, usize)>,
        blocks: Vec<Vec<(usize, usize)>>,
    }
    fn dfs(s: &mut St, u: usize, parent: usize) {
        s.disc[u] = s.time;
        s.low[u] = s.time;
        s.time += 1;
        for i in 0..s.adj[u].len() {
            let w = s.adj[u][i];
            if s.disc[w] == usize::MAX {
                s.stack.push((u, w));
                dfs(s, w, u);
                s.low[u] = s.low[u].min(s.low[w]);
                if s.low[w] >= s.disc[u] {
                    let mut block = Vec::new();
                    while let Some(e) = s.stack.pop() {
                        block.push(e);
                        if e == (u, w) {
                            break;
                        }
                    }
                    s.blocks.push(block);
                }
            } else if w != parent && s.disc[w] < s.disc[u] {
                s.stack.push((u, w));
                s.low[u] = s.low[u].min(s.disc[w]);
            }
        }
    }
    let n = adj.len();
    let mut s = St { adj, disc: vec![usize::MAX; n], low: vec![0; n], time: 0, stack: Vec::new(), blocks: Vec::new() };
    for v in 0..n {
        if s.disc[v] == usize::MAX {
            dfs(&mut s, v, usize::MAX);
        }
    }
    s.blocks
}

/// Demoucron-Malgrange-Pertuiset on one biconnected block with a cycle.
fn embed_block(n: usize, block: &[(usize, usize)]) -> Option<Vec<Vec<usize>>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in block {
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let cycle = find_cycle(&adj, block[0].0)?;
    let mut rot: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut in_h = vec![false; n];
    let mut h_edges: HashSet<(usize, usize)> = HashSet::new();
    let l = cycle.len();
    for i in 0..l {
        let (p, c, nx) = (cycle[(i + l - 1) % l], cycle[i], cycle[(i + 1) % l]);
        rot[c] = vec![p, nx];
        in_h[c] = true;
        h_edges.insert((c.min(nx), c.max(nx)));
    }
    while h_edges.len() < block.len() {
        let faces = trace_faces(&rot);
        let face_sets: Vec<HashSet<usize>> = faces.iter().map(|f| f.iter().copied().collect()).collect();
        let fragments = fragments(&adj, &in_h, &h_edges);
        let mut choice: Option<(usize, usize)> = None;
        for (fi, frag) in fragments.iter().enumerate() {
            let ok: Vec<usize> = (0..faces.len())
                .filter(|&f| frag.attachments.iter().all(|a| face_sets[f].contains(a)))
                .collect();
            match ok.len() {
                0 => return None,
                1 => {
                    choice = Some((fi, ok[0]));
                    break;
                }
                _ => {
                    if choice.is_none() {
                        choice = Some((fi, ok[0]));
                    }
                }
            }
        }
        let (fi, f) = choice?;
        let path = &fragments[fi].path;
        let face = &faces[f];
        let k = path.len() - 1;
        let (x, y) = (path[0], path[k]);
        let before = |v: usize| {
            let i = face.iter().position(|&z| z == v).expect("attachment on face");
            face[(i + face.len() - 1) % face.len()]
        };
        let (wx, wy) = (before(x), before(y));
        insert_after(&mut rot[x], wx, path[1]);
        insert_after(&mut rot[y], wy, path[k - 1]);
        for i in 1..k {
            rot[path[i]] = vec![path[i - 1], path[i + 1]];
            in_h[path[i]] = true;
        }
        for w in path.windows(2) {
            h_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    Some(rot)
}

fn insert_after(rot: &mut Vec<usize>, after: usize, new: usize) {
    let i = rot.iter().position(|&z| z == after).expect("corner neighbor present");
    rot.insert(i + 1, new);
}

fn find_cycle(adj: &[Vec<usize>], start: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut stack = vec![(start, 0usize)];
    depth[start] = 0;
    while let Some((u, i)) = stack.pop() {
        if i < adj[u].len() {
            stack.push((u, i + 1));
            let w = adj[u][i];
            if depth[w] == usize::MAX {
                depth[w] = depth[u] + 1;
                parent[w] = u;
                stack.push((w, 0));
            } else if w != parent[u] && depth[w] < depth[u] {
                let mut cyc = vec![u];
                let mut x = u;
                while x != w {
                    x = parent[x];
                    cyc.push(x);
                }
                return Some(cyc);
            }
        }
    }
    None
}

/// Facial walks (vertex sequences) of a neighbor rotation.
fn trace_faces(rot: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = HashSet::new();
    let mut faces = Vec::new();
    for u in 0..rot.len() {
        for &w in &rot[u] {
            if seen.contains(&(u, w)) {
                continue;
            }
            let mut face = Vec::new();
            let (mut a, mut b) = (u, w);
            loop {
                seen.insert((a, b));
                face.push(a);
                let r = &rot[b];
                let i = r.iter().position(|&z| z == a).unwrap();
                let c = r[(i + 1) % r.len()];
                (a, b) = (b, c);
                if (a, b) == (u, w) {
                    break;
                }
            }
            faces.push(face);
        }
    }
    faces
}

struct Fragment {
    attachments: Vec<usize>,
    /// A path through the fragment between two distinct attachments.
    path: Vec<usize>,
}

fn fragments(adj: &[Vec<usize>], in_h: &[bool], h_edges: &HashSet<(usize, usize)>) -> Vec<Fragment> {
    let n = adj.len();
    let mut out = Vec::new();
    for u in 0..n {
        if !in_h[u] {
            continue;
        }
        for &w in &adj[u] {
            if u < w && in_h[w] && !h_edges.contains(&(u, w)) {
                out.push(Fragment { attachments: vec![u, w], path: vec![u, w] });
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    for s in 0..n {
        if in_h[s] || comp[s] != usize::MAX || adj[s].is_empty() {
            continue;
        }
        let id = s;
        comp[s] = id;
        let mut queue = VecDeque::from([s]);
        let mut members = Vec::new();
        let mut attach = HashSet::new();
        while let Some(x) = queue.pop_front() {
            members.push(x);
            for &y in &adj[x] {
                if in_h[y] {
                    attach.insert(y);
                } else if comp[y] == usize::MAX {
                    comp[y] = id;
                    queue.push_back(y);
                }
            }
        }
        let mut attachments: Vec<usize> = attach.into_iter().collect();
        attachments.sort_unstable();
        let a = attachments[0];
        let c = *adj[a].iter().find(|&&y| comp[y] == id).expect("attachment touches its fragment");
        let mut prev = HashMap::from([(c, c)]);
        let mut queue = VecDeque::from([c]);
        let mut end = None;
        'bfs: while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if in_h[y] && y != a {
                    end = Some((x, y));
                    break 'bfs;
                }
            }
            for &y in &adj[x] {
                if !in_h[y] && !prev.contains_key(&y) {
                    prev.insert(y, x);
                    queue.push_back(y);
                }
            }
        }
        // a block fragment always reaches a second attachment
        let (t, b) = end.expect("fragment of a biconnected graph has two attachments");
        let mut mid = vec![t];
        let mut x = t;
        while x != c {
            x = prev[&x];
            mid.push(x);
        }
        mid.reverse();
        let mut path = vec![a];
        path.extend(mid);
        path.push(b);
        out.push(Fragment { attachments, path });
    }
    out
}

/// Shrinks a non-planar graph to an edge-minimal non-planar subgraph and
/// reads off the Kuratowski subdivision.
fn kuratowski(h: &Multigraph, adj: &[Vec<usize>]) -> Result<KuratowskiWitness> {
    let n = adj.len();
    let mut edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| adj[u].iter().filter(move |&&w| u < w).map(move |&w| (u, w))).collect();
    let build = |es: &[(usize, usize)]| {
        let mut a = vec![Vec::new(); n];
        for &(u, w) in es {
            a[u].push(w);
            a[w].push(u);
        }
        a
    };
    let mut i = 0;
    while i < edges.len() {
        let mut trial = edges.clone();
        trial.remove(i);
        if embed_simple(&build(&trial)).is_none() {
            edges = trial;
        } else {
            i += 1;
        }
    }
    let a = build(&edges);
    let branch: Vec<usize> = (0..n).filter(|&v| a[v].len() >= 3).collect();
    let kind = match (branch.len(), branch.iter().map(|&v| a[v].len()).max()) {
        (5, Some(4)) => KuratowskiKind::K5,
        (6, Some(3)) => KuratowskiKind::K33,
        (b, d) => {
            return Err(Error::Internal(format!(
                "minimal non-planar subgraph has {b} branch vertices of max degree {d:?}"
            )))
        }
    };
    let is_branch: HashSet<usize> = branch.iter().copied().collect();
    let mut paths = Vec::new();
    let mut ends: Vec<(usize, usize)> = Vec::new();
    for &s in &branch {
        for &first in &a[s] {
            let mut p = vec![s, first];
            let (mut prev, mut cur) = (s, first);
            while !is_branch.contains(&cur) {
                let next = *a[cur].iter().find(|&&z| z != prev).expect("interior vertex has degree 2");
                (prev, cur) = (cur, next);
                p.push(cur);
            }
            if s < cur {
                ends.push((s, cur));
                paths.push(p);
            }
        }
    }
    let order = match kind {
        KuratowskiKind::K5 => branch.clone(),
        KuratowskiKind::K33 => {
            let first = branch[0];
            let mut side: Vec<usize> = ends
                .iter()
                .filter_map(|&(x, y)| if x == first { Some(y) } else if y == first { Some(x) } else { None })
                .collect();
            side.sort_unstable();
            let mut left: Vec<usize> = branch.iter().copied().filter(|b| !side.contains(b)).collect();
            left.extend(side);
            left
        }
    };
    let label = |v: usize| h.label(VertexId(v)).to_string();
    let w = KuratowskiWitness {
        kind,
        branch_vertices: order.into_iter().map(label).collect(),
        paths: paths.into_iter().map(|p| p.into_iter().map(label).collect()).collect(),
    };
    w.verify(h)?;
    Ok(w)
}

/// Streams every planar rotation system of `h` in both handednesses,
/// at most `cap` embeddings in total.
///
/// Rotations are canonical (the first incident edge of each vertex stays
/// first), so no rotation system is produced twice. Partial assignments are
/// pruned when the faces already closed plus half the remaining darts cannot
/// reach the face count Euler's formula requires.
pub fn for_each_planar_embedding<F>(h: &Multigraph, cap: usize, mut f: F) -> Result<usize>
where
    F: FnMut(Embedding) -> ControlFlow<()>,
{
    if let Planarity::NonPlanar(w) = test_planar(h)? {
        return Err(Error::NonPlanar(Box::new(w)));
    }
    let nv = h.vertex_count();
    let (_, comps) = h.components();
    let isolated = h.vertices().filter(|&v| h.degree(v) == 0).count();
    let target = (h.edge_count() + 2 * comps) as isize - nv as isize - isolated as isize;
    let total_darts = 2 * h.edge_count();
    let mut rotation: Vec<Vec<EdgeId>> = vec![Vec::new(); nv];
    let mut assigned = vec![false; nv];
    let order: Vec<VertexId> = {
        let mut vs: Vec<VertexId> = h.vertices().collect();
        vs.sort_by_key(|&v| std::cmp::Reverse(h.degree(v)));
        vs
    };
    let mut emitted = 0usize;
    let mut stop = false;

    #[allow(clippy::too_many_arguments)]
    fn rec<F: FnMut(Embedding) -> ControlFlow<()>>(
        h: &Multigraph,
        order: &[VertexId],
        depth: usize,
        rotation: &mut Vec<Vec<EdgeId>>,
        assigned: &mut Vec<bool>,
        target: isize,
        total_darts: usize,
        cap: usize,
        emitted: &mut usize,
        stop: &mut bool,
        f: &mut F,
    ) {
        if *stop {
            return;
        }
        let (closed, closed_darts) = partial_faces(h, rotation, assigned);
        let bound = closed as isize + ((total_darts - closed_darts) / 2) as isize;
        if bound < target {
            return;
        }
        if depth == order.len() {
            if closed as isize != target {
                return;
            }
            for cw in [true, false] {
                if *emitted >= cap {
                    *stop = true;
                    return;
                }
                let emb = Embedding { graph: h.clone(), rotation: rotation.clone(), clockwise: cw };
                *emitted += 1;
                if f(emb).is_break() {
                    *stop = true;
                    return;
                }
            }
            return;
        }
        let v = order[depth];
        let inc = h.incident(v);
        if inc.len() <= 2 {
            rotation[v.0] = inc.to_vec();
            assigned[v.0] = true;
            rec(h, order, depth + 1, rotation, assigned, target, total_darts, cap, emitted, stop, f);
            assigned[v.0] = false;
            return;
        }
        let (first, rest) = inc.split_first().unwrap();
        let mut perm = rest.to_vec();
        permute(&mut perm, 0, &mut |p| {
            if *stop {
                return;
            }
            let mut r = vec![*first];
            r.extend_from_slice(p);
            rotation[v.0] = r;
            assigned[v.0] = true;
            rec(h, order, depth + 1, rotation, assigned, target, total_darts, cap, emitted, stop, f);
            assigned[v.0] = false;
        });
    }

    rec(h, &order, 0, &mut rotation, &mut assigned, target, total_darts, cap, &mut emitted, &mut stop, &mut f);
    Ok(emitted)
}

pub fn enumerate_planar_embeddings(h: &Multigraph, cap: usize) -> Result<Vec<Embedding>> {
    let mut out = Vec::new();
    for_each_planar_embedding(h, cap, |e| {
        out.push(e);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

fn permute<T: Clone>(items: &mut Vec<T>, k: usize, f: &mut dyn FnMut(&[T])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Faces already closed under a partial rotation and the darts they use.
fn partial_faces(h: &Multigraph, rotation: &[Vec<EdgeId>], assigned: &[bool]) -> (usize, usize) {
    let mut seen: HashSet<Dart> = HashSet::new();
    let mut closed = 0;
    let mut closed_darts = 0;
    for v in h.vertices() {
        if !assigned[v.0] {
            continue;
        }
        for &e in &rotation[v.0] {
            let start = Dart { edge: e, from: v };
            if seen.contains(&start) {
                continue;
            }
            let mut walk = vec![start];
            let mut d = start;
            let ok = loop {
                let u = h.opposite(d.edge, d.from);
                if !assigned[u.0] {
                    break false;
                }
                let r = &rotation[u.0];
                let i = r.iter().position(|&x| x == d.edge).unwrap();
                d = Dart { edge: r[(i + 1) % r.len()], from: u };
                if d == start {
                    break true;
                }
                if seen.contains(&d) || walk.contains(&d) {
                    break false;
                }
                walk.push(d);
            };
            if ok {
                closed += 1;
                closed_darts += walk.len();
                seen.extend(walk);
            }
        }
    }
    (closed, closed_darts)
}
