//! Exact computations for the rational cohomology of configuration spaces
//! of closed manifolds: graph complexes, spectral sequences and Massey
//! product obstructions.

pub mod algebra;
pub mod bgcomplex;
pub mod bicomplex;
pub mod ctcomplex;
pub mod duality;
pub mod error;
pub mod field;
pub mod format;
pub mod graphs;
pub mod linalg;
pub mod massey;
pub mod reports;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{Field, Fp, Rat};

/// Algebras over the rationals.
pub type QAlgebra = algebra::Algebra<Rat>;
