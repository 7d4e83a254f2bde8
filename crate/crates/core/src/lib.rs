//! Symbolic and numeric calculus of Lagrangians on jet spaces of super-paths.

pub mod algebra;
pub mod bicomplex;
pub mod covariant;
pub mod error;
pub mod evolutionary;
pub mod frontend;
pub mod jet;
pub mod numeric;
pub mod random;
pub mod selftest;
pub mod variational;

pub use algebra::{GradedPoly, Generator, Monomial, Parity, Q};
pub use error::{Error, Result};
pub use jet::{JetCoord, MultiIndex, Signature};
