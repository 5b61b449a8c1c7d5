//! Detection of genuine multipartite entanglement via semidefinite
//! relaxations of biseparability, witness lifting, realignment tests, and
//! Monte-Carlo mean-width estimation of the relevant state-set geometry.

pub mod error;
pub mod herm;
pub mod io;
pub mod maps;
pub mod relax;
pub mod reshape;
pub mod sdp;
pub mod shape;
pub mod volume;
pub mod witness;
pub mod zoo;

pub use error::{Error, Result};
pub use herm::{DensityMatrix, HermitianOperator, Norms};
pub use maps::{PositiveMapKind, PositiveMapSpec};
pub use shape::{enumerate_bipartitions, Bipartition, SubsystemShape};
