//! Numerical toolkit for finite maximal subdiagonal algebras, modelled by
//! block upper-triangular subalgebras of the matrix algebra `M_n` with its
//! normalized trace.
//!
//! The crate provides the Fuglede-Kadison determinant, the trace-preserving
//! conditional expectation onto the block diagonal, positive and inner-outer
//! factorizations, Szegő-type minimizations, and the Beurling decomposition
//! of right-invariant subspaces, together with seeded verification suites.

pub mod algebra;
pub mod beurling;
pub mod error;
pub mod factor;
pub mod fkdet;
pub mod io;
pub mod matcore;
pub mod report;
pub mod rng;
pub mod suites;
pub mod szego;
pub mod tol;

pub use error::{Error, Result};
pub use matcore::{CMatrix, C64};
