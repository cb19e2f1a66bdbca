use thiserror::Error;

use crate::simplicial::{label, Tet, Vertex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the library. Degeneracy variants name the
/// quantity that vanished so a failing seed can be diagnosed from the report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operands live in different generator spaces")]
    SpaceMismatch,

    #[error("invalid generator space: {0}")]
    InvalidSpace(String),

    #[error("tetrahedron {} is not a generator of this space", label(.0))]
    UnknownGenerator(Tet),

    #[error("generator index {0} out of range")]
    GeneratorIndex(usize),

    #[error("variable {} appears twice in a multiple Berezin integral", label(.0))]
    RepeatedVariable(Tet),

    #[error("exponent needs an even element with zero constant term")]
    NotEvenNilpotent,

    #[error("invalid cochain: {0}")]
    InvalidCochain(String),

    #[error("{0:?} is not a permutation")]
    NotAPermutation(Vec<Vertex>),

    #[error("edge {} is not contained in simplex {}", label(.edge), label(.simplex))]
    EdgeNotInSimplex { edge: [Vertex; 2], simplex: Vec<Vertex> },

    #[error("matrix is not skew-symmetric (max |F + Fᵀ| = {0:e})")]
    NotSkew(f64),

    #[error("interchange flags cannot be applied to a weight matrix")]
    InterchangeNotSupported,

    #[error("degenerate position: {0}")]
    Degenerate(String),

    #[error("non-generic input: {what} has dimension {found}, expected {expected}")]
    NonGeneric {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error(
        "λ₋ = 0: κ-type ratio f^({})|{} / f^({})|{} is undefined",
        label(.t1), label(.tau), label(.t2), label(.tau)
    )]
    KappaDegenerate { t1: Tet, t2: Tet, tau: Tet },

    #[error("square-root branch inconsistency: {0}")]
    BranchInconsistent(String),

    #[error("cocycle does not match the edge-operator family (deviation {0:e})")]
    CocycleMismatch(f64),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(
        "gauge consistency failure at tetrahedron {} between {} and {}: residual {residual:e}",
        label(.tet), label(&.simplices.0), label(&.simplices.1)
    )]
    Consistency {
        tet: Tet,
        simplices: ([Vertex; 5], [Vertex; 5]),
        residual: f64,
    },

    #[error("odd interchange parity on simplex {}; the weight would leave the Gaussian family", label(.0))]
    OddInterchange([Vertex; 5]),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl Error {
    /// Variant name, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SpaceMismatch => "SpaceMismatch",
            Error::InvalidSpace(_) => "InvalidSpace",
            Error::UnknownGenerator(_) => "UnknownGenerator",
            Error::GeneratorIndex(_) => "GeneratorIndex",
            Error::RepeatedVariable(_) => "RepeatedVariable",
            Error::NotEvenNilpotent => "NotEvenNilpotent",
            Error::InvalidCochain(_) => "InvalidCochain",
            Error::NotAPermutation(_) => "NotAPermutation",
            Error::EdgeNotInSimplex { .. } => "EdgeNotInSimplex",
            Error::NotSkew(_) => "NotSkew",
            Error::InterchangeNotSupported => "InterchangeNotSupported",
            Error::Degenerate(_) => "Degenerate",
            Error::NonGeneric { .. } => "NonGeneric",
            Error::KappaDegenerate { .. } => "KappaDegenerate",
            Error::BranchInconsistent(_) => "BranchInconsistent",
            Error::CocycleMismatch(_) => "CocycleMismatch",
            Error::Numeric(_) => "Numeric",
            Error::Consistency { .. } => "Consistency",
            Error::OddInterchange(_) => "OddInterchange",
            Error::Json(_) => "Json",
        }
    }
}
