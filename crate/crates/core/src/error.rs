use thiserror::Error;

use crate::graph::Violation;
use crate::planarity::KuratowskiWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("graph is not admissible for {strands} strands: {violation}")]
    NotAdmissible { strands: usize, violation: Violation },
    #[error("link of {vertex} is not planar ({} subdivision found)", witness.kind)]
    NonPlanarLink {
        vertex: String,
        witness: Box<KuratowskiWitness>,
    },
    #[error("graph is not planar ({} subdivision found)", .0.kind)]
    NonPlanar(Box<KuratowskiWitness>),
    #[error("embedding family has no entry for required vertex {0}")]
    IncompleteFamily(String),
    #[error("embedding of {vertex} does not match its link: {detail}")]
    FamilyMismatch { vertex: String, detail: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e))
    }
}
