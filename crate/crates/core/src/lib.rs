//! Left-invariant Riemannian and Weyl geometry on metric Lie algebras.
//!
//! A Lie algebra is given by structure constants `[e_i, e_j] = sum_k c^k_ij e_k`
//! and carries an inner product `g`. From these the crate computes the
//! Levi-Civita connection, curvature and Ricci tensors, Weyl connections for a
//! given Lee form, and the set of Lee forms solving the Weyl-Einstein equation.
//! Almost abelian algebras and the three-dimensional solvable catalog have
//! closed-form classifiers that serve as independent oracles for the solver.

pub mod almostabelian;
pub mod catalog3d;
pub mod error;
pub mod liealg;
pub mod linalg;
pub mod riemann;
pub mod samples;
pub mod tensor;
pub mod tol;
pub mod weyl;

pub use error::{GeomError, Result};
pub use liealg::{validate_algebra, LieAlgebra, StructureFlags, ValidityReport, Violation, ViolationKind};
pub use riemann::{ConnectionTable, CurvatureData, MetricLieAlgebra};
pub use tensor::Tensor4;
pub use weyl::{LeeForm, WeylStructure};
