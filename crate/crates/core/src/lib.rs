//! Exact diagonalization and continuous-variable (CV) analytics for the
//! two-component Bose-Hubbard dimer.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds microscopic couplings, the derived effective couplings
//!   and the weak/strong regime classification.
//! * [`fock`] enumerates the occupation-number basis and assembles the exact
//!   Hamiltonian matrix.
//! * [`exact`] diagonalizes it (dense or block-Lanczos) and exposes spectra
//!   and probability grids.
//! * [`cv`] implements the effective potential, its stationary points, the
//!   harmonic approximants, closed-form spectra and Hermite-Gauss states.
//! * [`semiclassical`] integrates the mean-field phase-space dynamics.
//! * [`harness`] drives sweeps, exact-vs-CV comparisons and file output.

pub mod cv;
pub mod error;
pub mod exact;
pub mod fock;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod semiclassical;

pub use error::{Error, Result};
pub use model::{EffectiveParams, InteractionSign, ModelParams, Regime, Strength};
