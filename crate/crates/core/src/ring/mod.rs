//! Exact coefficient rings, lattice vectors and the (quantum) Laurent torus.

pub mod lattice;
pub mod laurent;
pub mod newton;
pub mod pointed;
pub mod vcoeff;

pub use lattice::{LatticeVec, SkewForm};
pub use laurent::Laurent;
pub use pointed::{assemble, extract_pointed, leading, PStar, PointedElement};
pub use vcoeff::VCoeff;
