//! octolat: discrete octonionic function theory on bounded lattices in `Z^8`.
//!
//! The crate provides the octonion composition algebra, bounded lattice
//! domains with two-layer boundaries and discrete normals, difference and
//! Dirac operators, the discrete fundamental solutions of the Laplacian and
//! Dirac operators with a persistent symmetry-reduced kernel table, the
//! star-product Cauchy machinery (Cauchy-Bitsadze, Teodorescu, singular and
//! Plemelj operators), and scaling-limit convergence experiments.

pub mod boundary;
pub mod convergence;
pub mod kernel;
pub mod lattice;
pub mod octonion;
pub mod operators;
pub mod sampling;
pub mod verify;


pub use boundary::CauchyEngine;
pub use convergence::{ContinuousDomain, ConvergenceReport};
pub use kernel::{KernelError, KernelTable};
pub use lattice::{Coord, DomainSpec, Field, LatticeDomain, LatticeError, PointSet};
pub use octonion::Octonion;
pub use operators::DiffMode;
