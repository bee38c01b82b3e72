//! Exact scalars and the finite Grassmann algebra.

mod gauss;
mod generators;
mod grassmann;
mod scalar;

pub use gauss::GaussianRational;
pub use generators::{GeneratorTable, Monomial, THETA_MINUS, THETA_PLUS};
pub use grassmann::{GrassmannElement, Parity, Terms};
pub(crate) use grassmann::terms;
pub use scalar::{gaussian, Scalar};
