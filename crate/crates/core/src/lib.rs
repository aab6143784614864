//! Discrete configuration spaces of finite graphs.
//!
//! `Conf_n(G)` is built as a cube complex whose k-cells are k pairwise
//! disjoint moving edges together with n-k parked vertices. On top of the
//! complex this crate provides vertex links (flag, connectivity and
//! planarity checks), exact homology, closed-surface recognition, the
//! Z/2 thickening-obstruction cochain of a family of planar link
//! embeddings, and the full-link test for induced subcomplexes.
//!
//! Batch work (cell enumeration, per-vertex link analysis, subcomplex
//! sweeps) runs on rayon when the `parallel` feature is enabled; every
//! such entry point takes an [`Exec`] so the sequential path stays
//! available for comparison and reproducibility.

pub mod cube;
pub mod error;
pub mod export;
pub mod graph;
pub mod homology;
pub mod iso;
pub mod lasheras;
mod linalg;
pub mod par;
pub mod planarity;
pub mod subcomplex;

pub use cube::{build_uconf, BuildOptions, Cell, CubeComplex, FVector, LinkComplex, LinkReport};
pub use error::{Error, Result};
pub use graph::{make_theta, Admissibility, EdgeId, Multigraph, VertexId};
pub use par::Exec;
