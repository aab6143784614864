//! Cellular homology of cube complexes.
//!
//! The boundary of a k-cell with moving edges `e_0 < e_1 < ...` (by edge id)
//! is `sum_j (-1)^j (head_j - tail_j)`, where `head_j`/`tail_j` park strand
//! `j` at the head/tail of its edge as listed in the graph.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cube::{CubeComplex, LinkLabels};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coeff {
    Z2,
    Q,
}

/// `∂_k`: rows are (k-1)-cells, columns are k-cells.
pub fn boundary_matrix(x: &CubeComplex, k: usize) -> SparseMatrix {
    let rows = if k == 0 { 0 } else { x.num_cells(k - 1) };
    let cols = x.num_cells(k);
    let mut entries = Vec::new();
    if k > 0 {
        for c in 0..cols {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for (j, pair) in x.faces(k, c).chunks(2).enumerate() {
                let s = if j % 2 == 0 { 1 } else { -1 };
                *acc.entry(pair[1]).or_default() += s;
                *acc.entry(pair[0]).or_default() -= s;
            }
            entries.extend(acc.into_iter().filter(|&(_, v)| v != 0).map(|(r, v)| (r, c, v)));
        }
    }
    entries.sort_unstable();
    SparseMatrix { rows, cols, entries }
}

/// Checks `∂_{k-1} ∘ ∂_k = 0` in every degree.
pub fn check_boundary_squared(x: &CubeComplex) -> Result<()> {
    for k in 2..=x.dim() {
        let outer = boundary_matrix(x, k - 1);
        let mut by_col: Vec<Vec<(usize, i64)>> = vec![Vec::new(); outer.cols];
        for &(r, c, v) in &outer.entries {
            by_col[c].push((r, v));
        }
        let inner = boundary_matrix(x, k);
        let mut cols: Vec<Vec<(usize, i64)>> = vec![Vec::new(); inner.cols];
        for &(r, c, v) in &inner.entries {
            cols[c].push((r, v));
        }
        for (c, col) in cols.iter().enumerate() {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(mid, v) in col {
                for &(r, w) in &by_col[mid] {
                    *acc.entry(r).or_default() += v * w;
                }
            }
            if let Some((r, _)) = acc.iter().find(|(_, v)| **v != 0) {
                return Err(Error::Internal(format!(
                    "boundary of boundary is nonzero: degree {k}, cell {c}, face {r}"
                )));
            }
        }
    }
    Ok(())
}

fn ranks(x: &CubeComplex, rank: impl Fn(&SparseMatrix) -> usize) -> Vec<usize> {
    // rank of ∂_k for k = 0..=dim+1
    (0..=x.dim() + 1).map(|k| if k > x.dim() { 0 } else { rank(&boundary_matrix(x, k)) }).collect()
}

pub fn betti_numbers(x: &CubeComplex, coeff: Coeff) -> Vec<usize> {
    let r = match coeff {
        Coeff::Z2 => ranks(x, SparseMatrix::rank_z2),
        Coeff::Q => ranks(x, SparseMatrix::rank_q),
    };
    (0..=x.dim()).map(|k| x.num_cells(k) - r[k] - r[k + 1]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub coeff: String,
    #[serde(rename = "H")]
    pub groups: Vec<HomologyGroup>,
}

impl HomologySummary {
    pub fn from_betti(coeff: Coeff, betti: &[usize]) -> Self {
        let name = match coeff {
            Coeff::Z2 => "Z2",
            Coeff::Q => "Q",
        };
        HomologySummary {
            coeff: name.into(),
            groups: betti.iter().map(|&rank| HomologyGroup { rank, torsion: Vec::new() }).collect(),
        }
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.rank).collect()
    }
}

/// Integral homology via Smith normal form of each boundary map.
pub fn integral_homology(x: &CubeComplex) -> Result<HomologySummary> {
    check_boundary_squared(x)?;
    let invariants: Vec<Vec<num_bigint::BigInt>> =
        (0..=x.dim() + 1).map(|k| if k > x.dim() { Vec::new() } else { boundary_matrix(x, k).smith_invariants() }).collect();
    let mut groups = Vec::new();
    for k in 0..=x.dim() {
        let rank = x.num_cells(k) - invariants[k].len() - invariants[k + 1].len();
        let torsion = invariants[k + 1]
            .iter()
            .filter(|d| **d > num_bigint::BigInt::from(1))
            .map(|d| d.to_u64().ok_or_else(|| Error::Internal(format!("torsion coefficient {d} exceeds u64"))))
            .collect::<Result<_>>()?;
        groups.push(HomologyGroup { rank, torsion });
    }
    Ok(HomologySummary { coeff: "Z".into(), groups })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceClass {
    ClosedSurface { orientable: bool, genus: i64, euler: i64 },
    NotASurface { vertex: String, reason: String },
}

impl SurfaceClass {
    pub fn is_closed_surface(&self) -> bool {
        matches!(self, SurfaceClass::ClosedSurface { .. })
    }
}

/// Decides whether a 2-dimensional complex is a closed connected surface.
///
/// A surface needs every vertex link to be one cycle of length at least 3.
/// Orientability is read off `H_2(X; Z)`. The homology of a connected closed
/// surface must also have `b_2 = 1` mod 2; disagreement is an error.
/// Genus is orientable genus or the number of cross-caps.
pub fn classify_surface(x: &CubeComplex) -> Result<SurfaceClass> {
    if x.dim() != 2 {
        return Err(Error::InvalidInput(format!(
            "surface classification needs a 2-dimensional complex, got dimension {}",
            x.dim()
        )));
    }
    for v in 0..x.num_cells(0) {
        let link = x.vertex_link(v)?;
        let g = link.graph(LinkLabels::Config);
        let reason = if g.vertex_count() < 3 {
            Some(format!("link has {} vertices", g.vertex_count()))
        } else if let Some(w) = g.vertices().find(|&w| g.degree(w) != 2) {
            Some(format!(
                "link vertex {} has degree {} (link has {} vertices, {} edges)",
                g.label(w),
                g.degree(w),
                g.vertex_count(),
                g.edge_count()
            ))
        } else if !g.is_connected() {
            Some("link is a union of several cycles".to_string())
        } else {
            None
        };
        if let Some(reason) = reason {
            return Ok(SurfaceClass::NotASurface { vertex: link.base_label, reason });
        }
    }
    let z2 = betti_numbers(x, Coeff::Z2);
    if z2[0] != 1 {
        return Ok(SurfaceClass::NotASurface {
            vertex: x.config_label(0),
            reason: format!("complex has {} components", z2[0]),
        });
    }
    if z2[2] != 1 {
        return Err(Error::Internal(format!(
            "every link is a cycle but H_2(X; Z2) has rank {}",
            z2[2]
        )));
    }
    let hz = integral_homology(x)?;
    let h2 = &hz.groups[2];
    let orientable = match (h2.rank, hz.groups[1].torsion.as_slice()) {
        (1, []) => true,
        (0, [2]) => false,
        (r, t) => {
            return Err(Error::Internal(format!(
                "closed surface with H_2 rank {r} and H_1 torsion {t:?}"
            )))
        }
    };
    let euler = x.euler_characteristic();
    let genus = if orientable { (2 - euler) / 2 } else { 2 - euler };
    Ok(SurfaceClass::ClosedSurface { orientable, genus, euler })
}

/// Whether the complex is a single circle: 1-dimensional, connected and
/// every vertex on exactly two edges.
pub fn is_circle(x: &CubeComplex) -> bool {
    x.dim() == 1
        && x.num_cells(0) > 0
        && (0..x.num_cells(0)).all(|v| x.cofaces(0, v).len() == 2)
        && betti_numbers(x, Coeff::Z2) == [1, 1]
}
