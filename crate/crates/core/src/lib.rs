//! Charge-trap dephasing and single-qubit gates for dipole (2-dot) and
//! quadrupole (4-dot) charge qubits.
//!
//! A 2-dot qubit stores its logical state in which of two dots holds an
//! excess electron, so its logical states carry a dipole moment. The 4-dot
//! encoding places two electrons on diagonally opposite corners of a square;
//! both logical states share the same charge centroid and couple to
//! external potentials only at quadrupole order.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: dot layouts, logical-state occupancies, trap sampling and
//!   placement-error perturbation.
//! - [`electrostatics`]: trap-induced on-site shifts, per-trap couplings,
//!   effective coupling and uniform-field energies.
//! - [`telegraph`]: random telegraph (Poisson switching) noise records.
//! - [`coherence`]: analytic and Monte Carlo coherence decay and decay times.
//! - [`gates`]: the 4-level Hubbard model, rational-eigenvalue gate design,
//!   noiseless and noisy propagation, average gate fidelity.
//! - [`harness`]: seeded experiment drivers and the command-line front end.

pub mod coherence;
pub mod electrostatics;
pub mod error;
pub mod gates;
pub mod geometry;
pub mod harness;
pub mod rng;
pub mod stats;
pub mod telegraph;

pub use error::{Error, Result};
