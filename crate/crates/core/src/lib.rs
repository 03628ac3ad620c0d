//! Grushin reduction of a semiclassical pseudodifferential operator at a
//! doubly characteristic point.
//!
//! The crate is organised bottom-up:
//!
//! * [`symbols`]: exact algebra of polynomial phase-space symbols (Moyal
//!   product, Taylor jets, the `a_k` symbol family).
//! * [`quadratic`]: Hamilton map of the quadratic part, ellipticity and
//!   sector checks, the spectrum lattice, singular space and ground state.
//! * [`fock`]: Weyl quantization on a truncated Hermite basis with
//!   trusted-degree bookkeeping.
//! * [`grushin`]: kernels, reduced inverse, correctors, the matrices `A_j`
//!   and the effective family `E±(h)`.
//! * [`lab`]: rescaled model operators, eigenvalue tracking, expansion fits
//!   and pseudospectrum scans.

pub mod error;
pub mod fock;
pub mod grushin;
pub mod lab;
pub mod linalg;
pub mod parallel;
pub mod quadratic;
pub mod symbols;

pub use error::{Error, Result};
pub use faer::c64;
