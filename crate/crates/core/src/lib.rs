//! Exact symbolic computation for partial product systems built from
//! graded graphs.
//!
//! The library constructs finite graded graphs with partial composition
//! ([`graded_graph`]), runs exact module arithmetic over the vertex-function
//! coefficient algebra ([`elements`]), builds truncated Fock modules with
//! creation operators and decides the Fock covariance identity ([`fock`]),
//! computes in the dense *-subalgebra of the Toeplitz algebra via a
//! generator normal form with a matrix oracle ([`toeplitz`]), classifies
//! gauge-invariant ideals through bounded-horizon kernel certificates
//! ([`ideals`]), and decides Fell-bundle extendability ([`fell`]).
//!
//! Everything is exact: scalars are Gaussian rationals and every check is a
//! finite identity, so there are no tolerances anywhere.

#![forbid(unsafe_code)]

pub mod corpus;
pub mod elements;
pub mod fell;
pub mod fock;
pub mod graded_graph;
pub mod ideals;
pub mod scalar;
pub mod toeplitz;

pub use elements::{Element, IdealMask, VertexFunction};
pub use graded_graph::{Arrow, ArrowId, GradedSystem, Mode, VertexId};
pub use scalar::Scalar;
