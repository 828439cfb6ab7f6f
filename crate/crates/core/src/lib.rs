//! Photon addition and subtraction on squeezed vacuum, compared against
//! squeezed superpositions of coherent states.
//!
//! Three back-ends cross-check one another:
//!
//! * [`fock`]: truncated number-basis linear algebra, the ground truth;
//! * [`analytic`]: closed-form fidelities of the ideal two-photon-subtracted
//!   and subtracted-then-added states;
//! * [`gaussian`]: covariance-matrix simulation of beam-splitter / parametric
//!   amplifier taps followed by on/off detectors, yielding a signed Gaussian
//!   mixture.
//!
//! [`wigner`] evaluates phase-space quasi-probabilities and overlaps, and
//! [`optimize`] drives the fidelity landscapes.
//!
//! The crate is `no_std` and needs only `alloc`. All quadrature conventions
//! live in [`convention`].

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod convention;
pub mod coupler;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod hermite;
pub mod linalg;
pub mod optimize;
pub mod target;
pub mod wigner;

pub use coupler::{CouplerKind, CouplerParams};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use target::{CatTarget, Parity};
