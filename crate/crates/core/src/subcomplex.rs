//! Configuration subcomplexes of induced subgraphs and the full-link test
//! for locally convex inclusions.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::cube::{build_uconf_with, BuildOptions, Cell, CubeComplex};
use crate::error::{Error, Result};
use crate::graph::{check_admissible, EdgeId, Multigraph, VertexId};
use crate::par::{self, Exec};

/// `Conf_n(Γ′) ⊂ Conf_n(Γ)` for an induced subgraph `Γ′`.
#[derive(Debug, Clone)]
pub struct SubcomplexInclusion {
    pub ambient: Arc<CubeComplex>,
    pub sub: CubeComplex,
    /// `cell_map[k][c]` is the ambient index of the k-cell `c` of `sub`.
    pub cell_map: Vec<Vec<usize>>,
    vertex_map: Vec<VertexId>,
    edge_map: Vec<EdgeId>,
}

/// Builds `Conf_n` of the subgraph of `g` induced by `labels`, along with
/// `Conf_n(g)` and the inclusion.
pub fn induced_subcomplex(g: &Multigraph, labels: &[&str], n: usize, opts: &BuildOptions) -> Result<SubcomplexInclusion> {
    let ambient = Arc::new(build_uconf_with(g, n, opts)?);
    induced_in(&ambient, labels, opts)
}

/// As [`induced_subcomplex`], reusing an already built ambient complex.
pub fn induced_in(ambient: &Arc<CubeComplex>, labels: &[&str], opts: &BuildOptions) -> Result<SubcomplexInclusion> {
    let g = ambient.graph();
    let keep = labels.iter().map(|l| g.require(l)).collect::<Result<Vec<_>>>()?;
    let (subgraph, vertex_map, edge_map) = g.induced(&keep)?;
    let n = ambient.strands();
    if !opts.force {
        check_admissible(&subgraph, n, &opts.policy).map_err(|violation| Error::NotAdmissible { strands: n, violation })?;
    }
    let sub = build_uconf_with(&subgraph, n, &BuildOptions { force: true, ..*opts })?;
    SubcomplexInclusion::new(Arc::clone(ambient), sub, vertex_map, edge_map)
}

impl SubcomplexInclusion {
    fn new(ambient: Arc<CubeComplex>, sub: CubeComplex, vertex_map: Vec<VertexId>, edge_map: Vec<EdgeId>) -> Result<Self> {
        let mut cell_map = Vec::new();
        for k in 0..=sub.dim() {
            if sub.num_cells(k) == 0 {
                break;
            }
            let level = sub
                .cells(k)
                .iter()
                .map(|c| {
                    let image = Cell::new(
                        c.moving.iter().map(|e| edge_map[e.0]).collect(),
                        c.parked.iter().map(|v| vertex_map[v.0]).collect(),
                    );
                    ambient
                        .index_of(&image)
                        .ok_or_else(|| Error::Internal(format!("cell {} has no image", sub.cell_label(c))))
                })
                .collect::<Result<Vec<_>>>()?;
            cell_map.push(level);
        }
        let inc = SubcomplexInclusion { ambient, sub, cell_map, vertex_map, edge_map };
        inc.check_faces()?;
        Ok(inc)
    }

    /// Injectivity of the cell map and compatibility with every face map.
    pub fn check_faces(&self) -> Result<()> {
        for (k, level) in self.cell_map.iter().enumerate() {
            let distinct: HashSet<usize> = level.iter().copied().collect();
            if distinct.len() != level.len() {
                return Err(Error::Internal(format!("cell map is not injective in dimension {k}")));
            }
            if k == 0 {
                continue;
            }
            for (c, &img) in level.iter().enumerate() {
                let mapped: Vec<usize> = self.sub.faces(k, c).iter().map(|&f| self.cell_map[k - 1][f]).collect();
                if mapped != self.ambient.faces(k, img) {
                    return Err(Error::Internal(format!("face maps disagree on {}", self.sub.cell_label(&self.sub.cells(k)[c]))));
                }
            }
        }
        Ok(())
    }

    /// The inclusion with one sub-cell (and its cofaces) removed.
    pub fn drop_cell(&self, dim: usize, idx: usize) -> Result<Self> {
        let sub = self.sub.without_cell(dim, idx)?;
        SubcomplexInclusion::new(Arc::clone(&self.ambient), sub, self.vertex_map.clone(), self.edge_map.clone())
    }

    /// Ambient cells hit by the inclusion.
    pub fn image(&self) -> BTreeSet<Cell> {
        self.cell_map
            .iter()
            .enumerate()
            .flat_map(|(k, level)| level.iter().map(move |&c| self.ambient.cells(k)[c].clone()))
            .collect()
    }

    fn image_sets(&self) -> Vec<HashSet<usize>> {
        self.cell_map.iter().map(|l| l.iter().copied().collect()).collect()
    }

    /// Checks that each sub-link is a full subcomplex of the ambient link.
    pub fn check_full_links(&self, exec: Exec) -> Result<FullnessReport> {
        let image = self.image_sets();
        let per_vertex = par::map_range(exec, self.sub.num_cells(0), |v| self.link_witnesses(v, &image));
        let mut witnesses = Vec::new();
        for w in per_vertex {
            witnesses.extend(w?);
        }
        Ok(FullnessReport { full: witnesses.is_empty(), witnesses })
    }

    fn link_witnesses(&self, v: usize, image: &[HashSet<usize>]) -> Result<Vec<FullnessWitness>> {
        let x = &*self.ambient;
        let base = self.cell_map[0][v];
        let link = x.vertex_link(base)?;
        let in_sub: Vec<bool> = link.vertices.iter().map(|lv| image.get(1).is_some_and(|s| s.contains(&lv.cell))).collect();
        let star = x.star(base);
        let mut out = Vec::new();
        for (k, level) in star.iter().enumerate().skip(2) {
            for &c in level {
                let cube = &x.cells(k)[c];
                let verts: Vec<usize> = cube
                    .moving
                    .iter()
                    .map(|e| link.vertices.iter().position(|lv| lv.direction == *e).expect("cube direction in link"))
                    .collect();
                if verts.iter().all(|&i| in_sub[i]) && !image.get(k).is_some_and(|s| s.contains(&c)) {
                    out.push(FullnessWitness {
                        vertex: x.config_label(base),
                        simplex: verts.iter().map(|&i| link.vertices[i].config_label.clone()).collect(),
                        cell: x.cell_label(cube),
                    });
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FullnessWitness {
    /// Base configuration, in ambient labels.
    pub vertex: String,
    /// Link vertices (neighboring configurations) spanning the missing simplex.
    pub simplex: Vec<String>,
    /// The ambient cube the simplex comes from.
    pub cell: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FullnessReport {
    pub full: bool,
    pub witnesses: Vec<FullnessWitness>,
}

/// Cells lying in both images, as a complex on the ambient graph.
pub fn pairwise_intersection(a: &SubcomplexInclusion, b: &SubcomplexInclusion) -> Result<CubeComplex> {
    if !Arc::ptr_eq(&a.ambient, &b.ambient)
        && (a.ambient.graph() != b.ambient.graph() || a.ambient.strands() != b.ambient.strands())
    {
        return Err(Error::InvalidInput("inclusions have different ambient complexes".into()));
    }
    let ib = b.image();
    let cells: Vec<Cell> = a.image().into_iter().filter(|c| ib.contains(c)).collect();
    CubeComplex::from_cells(a.ambient.graph().clone(), a.ambient.strands(), cells, Exec::Sequential)
}

/// The cells of a complex as a set, for comparing complexes on one graph.
pub fn cell_set(x: &CubeComplex) -> BTreeSet<Cell> {
    (0..=x.dim()).flat_map(|k| x.cells(k).iter().cloned()).collect()
}
