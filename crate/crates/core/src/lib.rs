//! Computable noncommutative tori: a twisted Fourier algebra, Galerkin
//! truncations with a dense Hermitian eigensolver, and verifiers for Cwikel
//! estimates, Birman-Schwinger counting, CLR, Lieb-Thirring and Sobolev
//! inequalities.

// Domain checks are written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod bsp;
pub mod check;
pub mod cwikel;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod majorization;
pub mod sampling;
pub mod spectra;

pub use algebra::{phase_cocycle, FourierElement, PhaseAngle, Point, ThetaMatrix};
pub use check::{CheckRecord, Status, Tally};
pub use error::{Error, Result};
