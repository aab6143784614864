//! Lasheras' obstruction to thickening a 2-complex into an orientable
//! 3-manifold.
//!
//! Every vertex link must be planar. A family of planar embeddings of the
//! links assigns to each edge `e = vw` lying in at least three faces two
//! cyclic orders of the faces around `e`: one read around `w` in the link of
//! `v`, one read around `v` in the link of `w`. The cochain `ω(e)` is 0 when
//! the two orders are opposite and 1 otherwise.
//!
//! The complex is a general [`TwoComplex`] (faces are closed edge walks,
//! loops allowed); [`TwoComplex::from_cube`] converts a square complex.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cube::CubeComplex;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Multigraph, VertexId};
use crate::planarity::{for_each_planar_embedding, test_planar, CyclicOrder, Embedding, EmbeddingJson, Planarity};

/// One step of a face boundary: an edge and whether it is traversed from
/// tail to head.
pub type Step = (usize, bool);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoComplex {
    vertex_labels: Vec<String>,
    vertex_index: HashMap<String, usize>,
    aliases: HashMap<String, usize>,
    edges: Vec<[usize; 2]>,
    edge_labels: Vec<String>,
    faces: Vec<Vec<Step>>,
}

impl TwoComplex {
    /// `edges` are `(label, tail, head)`; each face is a closed walk.
    pub fn new(vertex_labels: Vec<String>, edges: Vec<(String, usize, usize)>, faces: Vec<Vec<Step>>) -> Result<Self> {
        let mut vertex_index = HashMap::new();
        for (i, l) in vertex_labels.iter().enumerate() {
            if vertex_index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate vertex label {l:?}")));
            }
        }
        let nv = vertex_labels.len();
        let mut edge_labels = Vec::with_capacity(edges.len());
        let mut ends = Vec::with_capacity(edges.len());
        for (l, t, h) in edges {
            if t >= nv || h >= nv {
                return Err(Error::InvalidInput(format!("edge {l} has an endpoint out of range")));
            }
            edge_labels.push(l);
            ends.push([t, h]);
        }
        for (fi, face) in faces.iter().enumerate() {
            if face.is_empty() {
                return Err(Error::InvalidInput(format!("face {fi} is empty")));
            }
            for (i, &(e, fw)) in face.iter().enumerate() {
                let (ne, nfw) = face[(i + 1) % face.len()];
                if e >= ends.len() || ne >= ends.len() {
                    return Err(Error::InvalidInput(format!("face {fi} uses an unknown edge")));
                }
                let arrive = if fw { ends[e][1] } else { ends[e][0] };
                let leave = if nfw { ends[ne][0] } else { ends[ne][1] };
                if arrive != leave {
                    return Err(Error::InvalidInput(format!("face {fi} is not a closed walk at step {i}")));
                }
                if e == ne && fw != nfw {
                    return Err(Error::InvalidInput(format!("face {fi} backtracks along edge {}", edge_labels[e])));
                }
            }
        }
        Ok(TwoComplex { vertex_labels, vertex_index, aliases: HashMap::new(), edges: ends, edge_labels, faces })
    }

    /// The 2-skeleton of a square complex. Square `e0 < e1` is walked
    /// `(t0,t1) -> (h0,t1) -> (h0,h1) -> (t0,h1)`.
    pub fn from_cube(x: &CubeComplex) -> Result<Self> {
        if x.dim() > 2 {
            return Err(Error::InvalidInput(format!(
                "the obstruction is defined for 2-complexes, this complex has dimension {}",
                x.dim()
            )));
        }
        let vertex_labels: Vec<String> = (0..x.num_cells(0)).map(|v| x.config_label(v)).collect();
        let edges = (0..x.num_cells(1))
            .map(|e| {
                let [t, h] = x.edge_ends(e);
                (format!("{}~{}", vertex_labels[t], vertex_labels[h]), t, h)
            })
            .collect();
        let faces = (0..x.num_cells(2))
            .map(|s| {
                let f = x.faces(2, s);
                vec![(f[2], true), (f[1], true), (f[3], false), (f[0], false)]
            })
            .collect();
        let mut c = TwoComplex::new(vertex_labels, edges, faces)?;
        if x.graph().labels().iter().all(|l| l.chars().count() == 1) {
            for (i, l) in c.vertex_labels.iter().enumerate() {
                let chars: Vec<char> = l.chars().collect();
                if chars.len() <= 6 {
                    for p in chars.iter().permutations(chars.len()) {
                        c.aliases.insert(p.into_iter().collect(), i);
                    }
                }
            }
        }
        Ok(c)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex_label(&self, v: usize) -> &str {
        &self.vertex_labels[v]
    }

    pub fn edge_label(&self, e: usize) -> &str {
        &self.edge_labels[e]
    }

    pub fn edge_ends(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn face(&self, f: usize) -> &[Step] {
        &self.faces[f]
    }

    /// Vertex by label; labels of configuration complexes may be given in
    /// any order of their letters (`a31` for `a13`).
    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.vertex_index.get(label).or_else(|| self.aliases.get(label)).copied()
    }

    fn canonical_label(&self, label: &str) -> String {
        self.vertex(label).map_or_else(|| label.to_string(), |v| self.vertex_labels[v].clone())
    }

    /// Positions `(face, step)` at which `e` occurs.
    pub fn occurrences(&self, e: usize) -> Vec<(usize, usize)> {
        self.faces
            .iter()
            .enumerate()
            .flat_map(|(f, face)| face.iter().enumerate().filter(move |(_, s)| s.0 == e).map(move |(i, _)| (f, i)))
            .collect()
    }

    /// Links of every vertex.
    pub fn links(&self) -> Result<Vec<VertexLink>> {
        let mut links: Vec<VertexLink> = (0..self.vertex_count())
            .map(|v| VertexLink { vertex: v, graph: Multigraph::new(), ends: Vec::new(), corners: Vec::new(), end_index: HashMap::new(), corner_index: HashMap::new() })
            .collect();
        for (e, &[t, h]) in self.edges.iter().enumerate() {
            for (end, v) in [(0u8, t), (1u8, h)] {
                let l = &mut links[v];
                l.end_index.insert((e, end), l.ends.len());
                l.ends.push((e, end));
            }
        }
        for l in &mut links {
            let own = &self.vertex_labels[l.vertex];
            let mut counts: HashMap<String, usize> = HashMap::new();
            let base: Vec<String> = l
                .ends
                .iter()
                .map(|&(e, end)| {
                    let [t, h] = self.edges[e];
                    let other = if end == 0 { h } else { t };
                    if t == h || other == l.vertex {
                        format!("{}{}", self.edge_labels[e], if end == 0 { "-" } else { "+" })
                    } else {
                        self.vertex_labels[other].clone()
                    }
                })
                .collect();
            for b in &base {
                *counts.entry(b.clone()).or_default() += 1;
            }
            for (i, b) in base.iter().enumerate() {
                let (e, end) = l.ends[i];
                let label = if counts[b] > 1 {
                    format!("{}{}", self.edge_labels[e], if end == 0 { "-" } else { "+" })
                } else {
                    b.clone()
                };
                l.graph.add_vertex(&label).map_err(|_| {
                    Error::InvalidInput(format!("ambiguous link labels at {own}"))
                })?;
            }
        }
        for (f, face) in self.faces.iter().enumerate() {
            let len = face.len();
            for j in 0..len {
                let (e, fw) = face[j];
                let (ne, nfw) = face[(j + 1) % len];
                let v = if fw { self.edges[e][1] } else { self.edges[e][0] };
                let arrive = (e, if fw { 1 } else { 0 });
                let leave = (ne, if nfw { 0 } else { 1 });
                let l = &mut links[v];
                let a = l.end_index[&arrive];
                let b = l.end_index[&leave];
                let id = l.graph.add_edge(VertexId(a), VertexId(b));
                l.corner_index.insert((f, j), id);
                l.corners.push((f, j));
            }
        }
        Ok(links)
    }
}

/// Link of a vertex: one link vertex per edge end at the vertex, one link
/// edge per face corner.
#[derive(Debug, Clone)]
pub struct VertexLink {
    pub vertex: usize,
    pub graph: Multigraph,
    /// Link vertex `i` is end `ends[i].1` (0 tail, 1 head) of edge `ends[i].0`.
    pub ends: Vec<(usize, u8)>,
    /// Link edge `i` is corner `corners[i].1` of face `corners[i].0`.
    pub corners: Vec<(usize, usize)>,
    end_index: HashMap<(usize, u8), usize>,
    corner_index: HashMap<(usize, usize), EdgeId>,
}

/// Edges lying in at least three faces, with their endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XPrime {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

pub fn build_xprime(x: &TwoComplex) -> XPrime {
    let mut count = vec![0usize; x.edge_count()];
    for face in &x.faces {
        for &(e, _) in face {
            count[e] += 1;
        }
    }
    let edges: Vec<usize> = (0..x.edge_count()).filter(|&e| count[e] >= 3).collect();
    let mut vertices: Vec<usize> = edges.iter().flat_map(|&e| x.edges[e]).collect();
    vertices.sort_unstable();
    vertices.dedup();
    XPrime { vertices, edges }
}

impl XPrime {
    /// The graph of X′ labeled by vertex labels of `x`.
    pub fn graph(&self, x: &TwoComplex) -> Multigraph {
        let mut g = Multigraph::new();
        let mut local = HashMap::new();
        for &v in &self.vertices {
            local.insert(v, g.add_vertex(x.vertex_label(v)).expect("vertex labels are unique"));
        }
        for &e in &self.edges {
            let [t, h] = x.edges[e];
            g.add_edge(local[&t], local[&h]);
        }
        g
    }
}

/// A Z/2 value per X′ edge, in the order of [`XPrime::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    pub values: Vec<bool>,
}

impl Cochain {
    pub fn zero(len: usize) -> Self {
        Cochain { values: vec![false; len] }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| !v)
    }

    pub fn support(&self) -> Vec<usize> {
        self.values.iter().enumerate().filter(|(_, v)| **v).map(|(i, _)| i).collect()
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        Cochain { values: self.values.iter().zip(&other.values).map(|(a, b)| a ^ b).collect() }
    }
}

/// `δ` of the indicator cochain of a vertex set.
pub fn coboundary_of(x: &TwoComplex, xp: &XPrime, vertices: &[usize]) -> Cochain {
    let set: HashSet<usize> = vertices.iter().copied().collect();
    Cochain {
        values: xp
            .edges
            .iter()
            .map(|&e| {
                let [t, h] = x.edges[e];
                set.contains(&t) ^ set.contains(&h)
            })
            .collect(),
    }
}

/// Solves `δc = ω` over Z/2 component by component. Returns the vertices
/// with `c = 1`, taking in each component the smaller of the two solutions.
pub fn is_coboundary(x: &TwoComplex, xp: &XPrime, omega: &Cochain) -> Option<Vec<usize>> {
    let mut adj: HashMap<usize, Vec<(usize, bool)>> = HashMap::new();
    for (i, &e) in xp.edges.iter().enumerate() {
        let [t, h] = x.edges[e];
        let w = omega.values[i];
        if t == h {
            if w {
                return None;
            }
            continue;
        }
        adj.entry(t).or_default().push((h, w));
        adj.entry(h).or_default().push((t, w));
    }
    let mut value: HashMap<usize, bool> = HashMap::new();
    let mut flips = Vec::new();
    for &root in &xp.vertices {
        if value.contains_key(&root) {
            continue;
        }
        value.insert(root, false);
        let mut comp = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let cu = value[&u];
            for &(w, bit) in adj.get(&u).map_or(&[][..], |v| v.as_slice()) {
                let want = cu ^ bit;
                match value.get(&w) {
                    Some(&cw) if cw != want => return None,
                    Some(_) => {}
                    None => {
                        value.insert(w, want);
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
        }
        let ones: Vec<usize> = comp.iter().copied().filter(|v| value[v]).collect();
        if 2 * ones.len() <= comp.len() {
            flips.extend(ones);
        } else {
            flips.extend(comp.iter().copied().filter(|v| !value[v]));
        }
    }
    flips.sort_unstable();
    Some(flips)
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FamilyJson {
    pub families: BTreeMap<String, EmbeddingJson>,
}

pub fn parse_family(text: &str) -> Result<FamilyJson> {
    Ok(serde_json::from_str(text)?)
}

/// Embeddings of vertex links, keyed by vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmbeddingFamily {
    pub embeddings: BTreeMap<usize, Embedding>,
}

#[derive(Debug, Clone)]
struct Side {
    vertex: usize,
    link_vertex: VertexId,
    occurrence_of: HashMap<EdgeId, usize>,
}

/// Links, X′ and the face bookkeeping around every X′ edge.
#[derive(Debug, Clone)]
pub struct Obstruction {
    complex: TwoComplex,
    links: Vec<VertexLink>,
    xprime: XPrime,
    sides: Vec<[Side; 2]>,
    occurrences: Vec<Vec<(usize, usize)>>,
}

impl Obstruction {
    pub fn new(complex: TwoComplex) -> Result<Self> {
        let links = complex.links()?;
        let xprime = build_xprime(&complex);
        let mut sides = Vec::with_capacity(xprime.edges.len());
        let mut occurrences = Vec::with_capacity(xprime.edges.len());
        for &e in &xprime.edges {
            let occ = complex.occurrences(e);
            let [t, h] = complex.edges[e];
            let mut tail = Side { vertex: t, link_vertex: VertexId(links[t].end_index[&(e, 0)]), occurrence_of: HashMap::new() };
            let mut head = Side { vertex: h, link_vertex: VertexId(links[h].end_index[&(e, 1)]), occurrence_of: HashMap::new() };
            for (k, &(f, i)) in occ.iter().enumerate() {
                let len = complex.faces[f].len();
                let fw = complex.faces[f][i].1;
                let before = (f, (i + len - 1) % len);
                let after = (f, i);
                let (tc, hc) = if fw { (before, after) } else { (after, before) };
                tail.occurrence_of.insert(links[t].corner_index[&tc], k);
                head.occurrence_of.insert(links[h].corner_index[&hc], k);
            }
            sides.push([tail, head]);
            occurrences.push(occ);
        }
        Ok(Obstruction { complex, links, xprime, sides, occurrences })
    }

    pub fn from_cube(x: &CubeComplex) -> Result<Self> {
        Obstruction::new(TwoComplex::from_cube(x)?)
    }

    pub fn complex(&self) -> &TwoComplex {
        &self.complex
    }

    pub fn xprime(&self) -> &XPrime {
        &self.xprime
    }

    pub fn link(&self, v: usize) -> &VertexLink {
        &self.links[v]
    }

    /// Faces around the i-th X′ edge, indexing the cyclic orders of
    /// [`Obstruction::edge_link_orders`].
    pub fn edge_faces(&self, i: usize) -> Vec<usize> {
        self.occurrences[i].iter().map(|&(f, _)| f).collect()
    }

    /// Index of an X′ edge by its endpoint labels, in either order.
    pub fn xprime_edge(&self, u: &str, v: &str) -> Result<usize> {
        let a = self.complex.vertex(u).ok_or_else(|| Error::NotFound(format!("vertex {u:?}")))?;
        let b = self.complex.vertex(v).ok_or_else(|| Error::NotFound(format!("vertex {v:?}")))?;
        self.xprime
            .edges
            .iter()
            .position(|&e| {
                let [t, h] = self.complex.edges[e];
                (t, h) == (a, b) || (t, h) == (b, a)
            })
            .ok_or_else(|| Error::NotFound(format!("X' edge between {u} and {v}")))
    }

    fn reading(&self, emb: &Embedding, side: &Side) -> CyclicOrder<usize> {
        let order = CyclicOrder::new(emb.rotation(side.link_vertex).to_vec());
        let order = if emb.clockwise() { order } else { order.reversed() };
        order.map(|e| side.occurrence_of[e])
    }

    /// The two cyclic orders on the faces around X′ edge `i`: read in the
    /// link of its tail, and in the link of its head.
    pub fn edge_link_orders(&self, family: &EmbeddingFamily, i: usize) -> Result<(CyclicOrder<usize>, CyclicOrder<usize>)> {
        let [tail, head] = &self.sides[i];
        let get = |s: &Side| {
            family
                .embeddings
                .get(&s.vertex)
                .ok_or_else(|| Error::IncompleteFamily(self.complex.vertex_label(s.vertex).to_string()))
        };
        Ok((self.reading(get(tail)?, tail), self.reading(get(head)?, head)))
    }

    pub fn omega(&self, family: &EmbeddingFamily) -> Result<Cochain> {
        let values = (0..self.xprime.edges.len())
            .map(|i| {
                let (a, b) = self.edge_link_orders(family, i)?;
                Ok(!a.is_opposite(&b))
            })
            .collect::<Result<_>>()?;
        Ok(Cochain { values })
    }

    pub fn is_coboundary(&self, omega: &Cochain) -> Option<Vec<usize>> {
        is_coboundary(&self.complex, &self.xprime, omega)
    }

    /// Reads and checks a family: every entry must be a planar rotation
    /// system of the computed link, and every X′ vertex must be covered.
    pub fn family_from_json(&self, j: &FamilyJson) -> Result<EmbeddingFamily> {
        let mut embeddings = BTreeMap::new();
        for (label, ej) in &j.families {
            let v = self
                .complex
                .vertex(label)
                .ok_or_else(|| Error::FamilyMismatch { vertex: label.clone(), detail: "no such vertex in the complex".into() })?;
            let canon = EmbeddingJson {
                orientation: ej.orientation.clone(),
                rotation: ej
                    .rotation
                    .iter()
                    .map(|(k, ns)| (self.canonical_link_label(v, k), ns.iter().map(|n| self.canonical_link_label(v, n)).collect()))
                    .collect(),
            };
            let emb = Embedding::from_json(&self.links[v].graph, &canon).map_err(|e| Error::FamilyMismatch {
                vertex: self.complex.vertex_label(v).to_string(),
                detail: match e {
                    Error::InvalidInput(s) | Error::Parse(s) => s,
                    other => other.to_string(),
                },
            })?;
            if !emb.is_planar() {
                return Err(Error::FamilyMismatch {
                    vertex: self.complex.vertex_label(v).to_string(),
                    detail: format!("rotation system has genus {}", emb.genus()),
                });
            }
            if embeddings.insert(v, emb).is_some() {
                return Err(Error::FamilyMismatch { vertex: label.clone(), detail: "listed twice".into() });
            }
        }
        let family = EmbeddingFamily { embeddings };
        self.check_complete(&family)?;
        Ok(family)
    }

    fn canonical_link_label(&self, v: usize, label: &str) -> String {
        if self.links[v].graph.vertex(label).is_some() {
            label.to_string()
        } else {
            self.complex.canonical_label(label)
        }
    }

    /// Fails with a Kuratowski witness at the first X′ vertex whose link is
    /// not planar.
    pub fn check_planar_links(&self) -> Result<()> {
        for &v in &self.xprime.vertices {
            if let Planarity::NonPlanar(w) = test_planar(&self.links[v].graph)? {
                return Err(Error::NonPlanarLink { vertex: self.complex.vertex_label(v).to_string(), witness: Box::new(w) });
            }
        }
        Ok(())
    }

    pub fn check_complete(&self, family: &EmbeddingFamily) -> Result<()> {
        match self.xprime.vertices.iter().find(|v| !family.embeddings.contains_key(v)) {
            Some(&v) => Err(Error::IncompleteFamily(self.complex.vertex_label(v).to_string())),
            None => Ok(()),
        }
    }

    pub fn family_to_json(&self, family: &EmbeddingFamily) -> FamilyJson {
        FamilyJson {
            families: family
                .embeddings
                .iter()
                .map(|(&v, e)| (self.complex.vertex_label(v).to_string(), e.to_json()))
                .collect(),
        }
    }

    /// The family with the handedness of the given vertices reversed.
    pub fn flip(&self, family: &EmbeddingFamily, vertices: &[usize]) -> EmbeddingFamily {
        let mut out = family.clone();
        for v in vertices {
            if let Some(e) = out.embeddings.get_mut(v) {
                *e = e.flipped();
            }
        }
        out
    }

    pub fn verify(&self, family: &EmbeddingFamily) -> Result<ObstructionReport> {
        self.check_complete(family)?;
        let omega = self.omega(family)?;
        let certificate = self.is_coboundary(&omega);
        if let Some(flips) = &certificate {
            let fixed = self.omega(&self.flip(family, flips))?;
            if !fixed.is_zero() {
                return Err(Error::Internal("flip certificate does not kill the cochain".into()));
            }
        }
        let label = |v: usize| self.complex.vertex_label(v).to_string();
        let entries = self
            .xprime
            .edges
            .iter()
            .zip(&omega.values)
            .map(|(&e, &w)| {
                let [t, h] = self.complex.edges[e];
                OmegaEntry { from: label(t), to: label(h), value: u8::from(w) }
            })
            .collect();
        let xg = self.xprime.graph(&self.complex);
        Ok(ObstructionReport {
            xprime: XPrimeSummary { vertices: xg.vertex_count(), edges: xg.edge_count() },
            omega: entries,
            nonzero: omega.support().len(),
            zero: omega.is_zero(),
            coboundary: certificate.is_some(),
            flip_certificate: certificate.map(|f| f.into_iter().map(label).collect()),
            family: self.family_to_json(family),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaEntry {
    pub from: String,
    pub to: String,
    pub value: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XPrimeSummary {
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub xprime: XPrimeSummary,
    pub omega: Vec<OmegaEntry>,
    pub nonzero: usize,
    pub zero: bool,
    pub coboundary: bool,
    pub flip_certificate: Option<Vec<String>>,
    pub family: FamilyJson,
}

/// Parses and verifies a family file against `x`.
pub fn verify_family(x: &CubeComplex, family_text: &str) -> Result<ObstructionReport> {
    let ob = Obstruction::from_cube(x)?;
    ob.check_planar_links()?;
    let family = ob.family_from_json(&parse_family(family_text)?)?;
    ob.verify(&family)
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub budget: Duration,
    pub seed: u64,
    pub threads: usize,
    /// Upper bound on embeddings enumerated per link.
    pub cap: usize,
    /// Embeddings fixed in advance, by vertex label.
    pub pinned: FamilyJson,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: Duration::from_secs(60), seed: 0, threads: 1, cap: 100_000, pinned: FamilyJson::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(EmbeddingFamily),
    Exhausted,
    Timeout,
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub nodes: u64,
    /// Vertices whose embedding list hit the cap; `Exhausted` is then only
    /// exhaustive over the truncated lists.
    pub truncated: Vec<String>,
    pub elapsed: Duration,
}

struct Candidates {
    vertex: usize,
    embeddings: Vec<Embedding>,
    // per candidate, per incident X′ side: canonical reading
    readings: Vec<Vec<Vec<usize>>>,
}

/// Backtracking search for a family with `ω ≡ 0`.
///
/// X′ vertices are visited by decreasing X′ degree (ties shuffled by the
/// seed). Each is given one of its link's planar embeddings; embeddings that
/// agree on all readings relevant to X′ are tried once. A branch is cut as
/// soon as an X′ edge with both ends assigned has `ω = 1`.
pub fn search_trivializing_family(ob: &Obstruction, opts: &SearchOptions) -> Result<SearchReport> {
    let start = Instant::now();
    let xp = &ob.xprime;
    let pinned = if opts.pinned.families.is_empty() {
        EmbeddingFamily::default()
    } else {
        let mut fam = EmbeddingFamily::default();
        let partial = ob.family_from_json(&opts.pinned).or_else(|e| match e {
            Error::IncompleteFamily(_) => {
                // pinned entries may cover only part of X′
                let mut out = EmbeddingFamily::default();
                for (label, ej) in &opts.pinned.families {
                    let one = FamilyJson { families: BTreeMap::from([(label.clone(), ej.clone())]) };
                    let v = ob.complex.vertex(label).ok_or_else(|| Error::NotFound(label.clone()))?;
                    let parsed = ob.family_from_json_unchecked(&one)?;
                    out.embeddings.insert(v, parsed.embeddings[&v].clone());
                }
                Ok(out)
            }
            other => Err(other),
        })?;
        fam.embeddings.extend(partial.embeddings);
        fam
    };

    // sides of each vertex, as (x′ edge index, 0 tail / 1 head)
    let mut incident: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (i, s) in ob.sides.iter().enumerate() {
        incident.entry(s[0].vertex).or_default().push((i, 0));
        incident.entry(s[1].vertex).or_default().push((i, 1));
    }
    let mut order: Vec<usize> = xp.vertices.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    order.shuffle(&mut rng);
    order.sort_by_key(|v| std::cmp::Reverse(incident.get(v).map_or(0, Vec::len)));

    let mut truncated = Vec::new();
    let mut cands = Vec::with_capacity(order.len());
    for &v in &order {
        let sides = &incident[&v];
        let link = &ob.links[v].graph;
        let pool: Vec<Embedding> = if let Some(e) = pinned.embeddings.get(&v) {
            vec![e.clone()]
        } else {
            if let Planarity::NonPlanar(w) = test_planar(link)? {
                return Err(Error::NonPlanarLink { vertex: ob.complex.vertex_label(v).to_string(), witness: Box::new(w) });
            }
            let mut pool = Vec::new();
            let count = for_each_planar_embedding(link, opts.cap, |e| {
                pool.push(e);
                ControlFlow::Continue(())
            })?;
            if count >= opts.cap {
                truncated.push(ob.complex.vertex_label(v).to_string());
            }
            pool
        };
        let mut seen = HashSet::new();
        let mut embeddings = Vec::new();
        let mut readings = Vec::new();
        for e in pool {
            let r: Vec<Vec<usize>> = sides
                .iter()
                .map(|&(i, s)| {
                    let rd = ob.reading(&e, &ob.sides[i][s]);
                    // store tails as read and heads reversed so that ω = 0 means equal keys
                    if s == 0 { rd.canonical() } else { rd.reversed().canonical() }
                })
                .collect();
            if seen.insert(r.clone()) {
                embeddings.push(e);
                readings.push(r);
            }
        }
        cands.push(Candidates { vertex: v, embeddings, readings });
    }

    if cands.is_empty() {
        return Ok(SearchReport { outcome: SearchOutcome::Found(EmbeddingFamily::default()), nodes: 0, truncated, elapsed: start.elapsed() });
    }

    // for each depth, the checks to run: (x′ edge, my side slot, other depth, other side slot)
    let depth_of: HashMap<usize, usize> = cands.iter().enumerate().map(|(d, c)| (c.vertex, d)).collect();
    let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); cands.len()];
    for (d, c) in cands.iter().enumerate() {
        let sides = &incident[&c.vertex];
        for (slot, &(i, s)) in sides.iter().enumerate() {
            let other_vertex = ob.sides[i][1 - s].vertex;
            let od = depth_of[&other_vertex];
            let oslot = incident[&other_vertex].iter().position(|&(j, t)| j == i && t == 1 - s).unwrap();
            if od < d || (od == d && s == 0) {
                checks[d].push((slot, od, oslot));
            }
        }
    }

    let deadline = start + opts.budget;
    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let timed_out = AtomicBool::new(false);
    let ctx = SearchCtx { cands: &cands, checks: &checks, deadline, nodes: &nodes, stop: &stop, timed_out: &timed_out };

    let found: Option<Vec<usize>> = run_split(&ctx, opts.threads);

    let outcome = match found {
        Some(choice) => {
            let mut fam = EmbeddingFamily::default();
            for (d, &k) in choice.iter().enumerate() {
                fam.embeddings.insert(cands[d].vertex, cands[d].embeddings[k].clone());
            }
            let check = ob.omega(&fam)?;
            if !check.is_zero() {
                return Err(Error::Internal("search produced a family with nonzero cochain".into()));
            }
            SearchOutcome::Found(fam)
        }
        None if timed_out.load(Ordering::Relaxed) => SearchOutcome::Timeout,
        None => SearchOutcome::Exhausted,
    };
    Ok(SearchReport { outcome, nodes: nodes.load(Ordering::Relaxed), truncated, elapsed: start.elapsed() })
}

impl Obstruction {
    fn family_from_json_unchecked(&self, j: &FamilyJson) -> Result<EmbeddingFamily> {
        let mut embeddings = BTreeMap::new();
        for (label, ej) in &j.families {
            let v = self.complex.vertex(label).ok_or_else(|| Error::NotFound(format!("vertex {label:?}")))?;
            let canon = EmbeddingJson {
                orientation: ej.orientation.clone(),
                rotation: ej
                    .rotation
                    .iter()
                    .map(|(k, ns)| (self.canonical_link_label(v, k), ns.iter().map(|n| self.canonical_link_label(v, n)).collect()))
                    .collect(),
            };
            let emb = Embedding::from_json(&self.links[v].graph, &canon)
                .map_err(|e| Error::FamilyMismatch { vertex: label.clone(), detail: e.to_string() })?;
            if !emb.is_planar() {
                return Err(Error::FamilyMismatch { vertex: label.clone(), detail: format!("rotation system has genus {}", emb.genus()) });
            }
            embeddings.insert(v, emb);
        }
        Ok(EmbeddingFamily { embeddings })
    }
}

struct SearchCtx<'a> {
    cands: &'a [Candidates],
    checks: &'a [Vec<(usize, usize, usize)>],
    deadline: Instant,
    nodes: &'a AtomicU64,
    stop: &'a AtomicBool,
    timed_out: &'a AtomicBool,
}

impl SearchCtx<'_> {
    fn consistent(&self, d: usize, k: usize, choice: &[usize]) -> bool {
        let mine = &self.cands[d].readings[k];
        self.checks[d].iter().all(|&(slot, od, oslot)| {
            let theirs = if od == d { &self.cands[d].readings[k] } else { &self.cands[od].readings[choice[od]] };
            mine[slot] == theirs[oslot]
        })
    }

    fn dfs(&self, d: usize, choice: &mut Vec<usize>) -> bool {
        if d == self.cands.len() {
            return true;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n.is_multiple_of(1024) && Instant::now() >= self.deadline {
            self.timed_out.store(true, Ordering::Relaxed);
            self.stop.store(true, Ordering::Relaxed);
        }
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        for k in 0..self.cands[d].embeddings.len() {
            if !self.consistent(d, k, choice) {
                continue;
            }
            choice.push(k);
            if self.dfs(d + 1, choice) {
                return true;
            }
            choice.pop();
            if self.stop.load(Ordering::Relaxed) {
                return false;
            }
        }
        false
    }
}

/// Runs the search, splitting over the first vertex's candidates when
/// more than one thread is requested.
fn run_split(ctx: &SearchCtx, threads: usize) -> Option<Vec<usize>> {
    #[cfg(feature = "parallel")]
    if threads > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().ok()?;
        let firsts: Vec<usize> = (0..ctx.cands[0].embeddings.len()).filter(|&k| ctx.consistent(0, k, &[])).collect();
        return pool.install(|| {
            firsts.par_iter().find_map_any(|&k| {
                let mut choice = vec![k];
                if ctx.dfs(1, &mut choice) {
                    ctx.stop.store(true, Ordering::Relaxed);
                    Some(choice)
                } else {
                    None
                }
            })
        });
    }
    let _ = threads;
    let mut choice = Vec::new();
    ctx.dfs(0, &mut choice).then_some(choice)
}

/// A uniformly random planar embedding for every X′ vertex.
pub fn random_family(ob: &Obstruction, seed: u64, cap: usize) -> Result<EmbeddingFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fam = EmbeddingFamily::default();
    for &v in &ob.xprime.vertices {
        let all = crate::planarity::enumerate_planar_embeddings(&ob.links[v].graph, cap)?;
        if all.is_empty() {
            return Err(Error::Internal(format!("no embedding for {}", ob.complex.vertex_label(v))));
        }
        let k = rng.random_range(0..all.len());
        fam.embeddings.insert(v, all[k].clone());
    }
    Ok(fam)
}

/// Moves a family along a graph automorphism of the underlying graph of a
/// configuration complex (`auto[v]` is the image of vertex `v`).
pub fn transport_family(x: &CubeComplex, family: &FamilyJson, auto: &[VertexId]) -> Result<FamilyJson> {
    let g = x.graph();
    if auto.len() != g.vertex_count() {
        return Err(Error::InvalidInput("automorphism has the wrong length".into()));
    }
    let map = |label: &str| -> Result<String> {
        let v = x.resolve_config(label)?;
        let occ: Vec<VertexId> = x.cells(0)[v].parked.iter().map(|p| auto[p.0]).collect();
        let cell = crate::cube::Cell::new(Vec::new(), occ);
        let w = x.index_of(&cell).ok_or_else(|| Error::InvalidInput("map is not an automorphism".into()))?;
        Ok(x.config_label(w))
    };
    let mut out = FamilyJson::default();
    for (label, ej) in &family.families {
        let rotation = ej
            .rotation
            .iter()
            .map(|(k, ns)| Ok((map(k)?, ns.iter().map(|n| map(n)).collect::<Result<Vec<_>>>()?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        out.families.insert(map(label)?, EmbeddingJson { orientation: ej.orientation.clone(), rotation });
    }
    Ok(out)
}

/// A square complex with one loop edge `t` on three faces whose orders are
/// forced equal, so no family makes `ω(t) = 0`.
///
/// Vertex `v` carries the loop `t` and edges `e_k: v -> w_k`; edges
/// `f_k: w_k -> w_σ(k)` close the squares `t e_k f_k e_σ(k)^-1`. With `σ` a
/// transposition the complex cannot be thickened; with `σ` the identity it can.
pub fn toy_loop_complex(sigma: [usize; 3]) -> Result<TwoComplex> {
    let labels = vec!["v".to_string(), "w1".to_string(), "w2".to_string(), "w3".to_string()];
    let mut edges = vec![("t".to_string(), 0, 0)];
    for k in 1..=3 {
        edges.push((format!("e{k}"), 0, k));
    }
    for k in 1..=3 {
        edges.push((format!("f{k}"), k, sigma[k - 1]));
    }
    let faces = (1..=3).map(|k| vec![(0, true), (k, true), (3 + k, true), (sigma[k - 1], false)]).collect();
    TwoComplex::new(labels, edges, faces)
}
