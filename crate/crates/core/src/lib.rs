//! Grassmann–Berezin calculus on simplices and a Grassmann-algebraic
//! parameterization of the Pachner 3–3 move by 2-cocycles.

pub mod acceptance;
pub mod cocycle2weight;
pub mod edgeops;
pub mod elliptic;
pub mod error;
pub mod grassmann;
pub mod json;
pub mod linalg;
pub mod operators;
pub mod pachner;
pub mod sampling;
pub mod simplicial;
pub mod weights;

pub type C64 = num_complex::Complex64;

pub use cocycle2weight::{kappa, reconstruct_f, reconstruct_f_with, SqrtChoice};
pub use edgeops::{normalize_family, EdgeOperatorFamily};
pub use elliptic::EllipticParams;
pub use error::{Error, Result};
pub use grassmann::{GeneratorSpace, GrassmannElement, Parity};
pub use operators::{LinearOperator, OperatorSubspace};
pub use pachner::{reconcile, verify_33, PachnerReport, PachnerScene, ReconciledWeights, Side, Tolerances};
pub use simplicial::{Cochain, Edge, Face, Simplex4, SimplexComplex, Tet, Vertex};
pub use weights::{GaugeTransform, WeightMatrix};
