//! Minimal-surface data for weakly almost Fuchsian hyperbolic 3-manifolds.

pub mod error;
pub mod field;
pub mod hyperbolic;
pub mod linalg;
pub mod mesh;

pub use error::{Error, Result};
pub use field::ScalarField;
pub use mesh::{LinearOperatorHandle, SurfaceMesh};
pub mod classify;
pub mod explorer;
pub mod foliation;
pub mod gauss;
pub mod mms;
pub mod qdiff;
pub mod quadrature;
pub mod stability;
pub mod triple;

pub use triple::MinimalTriple;
