//! Exact superspace calculus for the two-dimensional supersymmetric
//! CP^(N-1) sigma model.
//!
//! The crate builds solution projectors from holomorphic chains, the
//! associated Maurer-Cartan 1-superforms and spectral frames, and the
//! su(N)-valued surfaces they define. Every identity is evaluated as a
//! truncated jet over an exact coefficient field and certified by literal
//! equality with zero.
//!
//! All math is generic over [`algebra::Scalar`]; the aliases below fix the
//! Gaussian rationals, which is what the verifier uses.

pub mod algebra;
pub mod cli;
pub mod defect;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod spectral;
pub mod superfield;

pub use error::{Error, Result};

/// Gaussian rationals `Q(i)` with arbitrary-precision parts.
pub type Gq = algebra::GaussianRational;

pub type Grassmann = algebra::GrassmannElement<Gq>;
