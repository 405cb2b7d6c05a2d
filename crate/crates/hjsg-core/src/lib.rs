//! Adaptive sparse-grid multiresolution local discontinuous Galerkin solver
//! for Hamilton-Jacobi equations `phi_t + H(grad phi) = 0` on `[0, 1]^d`.
//!
//! The solver represents the DG solution in an orthonormal multiwavelet
//! hierarchy, reconstructs one-sided gradients with LDG flux operators
//! applied one dimension at a time, evaluates a global Lax-Friedrichs
//! numerical Hamiltonian at nested interpolation points, and projects the
//! multiresolution interpolant of the flux back onto the trial space. The
//! active element set adapts by thresholding detail-coefficient norms.

pub mod adapt;
pub mod alpert;
pub mod apply;
pub mod bench;
pub mod element;
pub mod error;
pub mod field;
pub mod hamiltonian;
pub mod interp;
pub mod io;
pub mod ldg;
pub mod legendre;
pub mod norms;
pub mod point;
pub mod project;
pub mod space;
pub mod tables;
pub mod time;

pub use element::{DegreeIndex, ElementKey, LevelVec, Node1d};
pub use error::{Result, SolverError};
pub use field::{inner_product, BasisFamily, CoeffField};
pub use space::AdaptiveSpace;
