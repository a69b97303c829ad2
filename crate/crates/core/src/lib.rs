//! Correction-function method for two-electron atoms.
//!
//! The wavefunction is written as `ψ = φ(r1, r2) χ(r12)` with a fixed
//! orbital-product `φ`. Averaging the Hamiltonian over each constant-`r12`
//! surface turns the Schrödinger equation into a one-dimensional eigenproblem
//! for `χ`, whose lowest eigenvalue is then minimized over the effective
//! charges of the orbitals.

pub mod chi_solver;
pub mod error;
pub mod expoly;
pub mod grid;
pub mod observables;
pub mod optimize;
pub mod orbitals;
pub mod quadrature;
pub mod reference;
pub mod report;
pub mod surface_integrals;
pub mod surface_sampler;
pub mod tridiag;
pub mod variational;

pub use error::{Error, Result};
