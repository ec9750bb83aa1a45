//! Simulator for microwave three-wave mixing in a three-junction
//! superconducting flux qutrit.
//!
//! The crate builds the circuit Hamiltonian and loop-current operator in a
//! truncated charge basis ([`circuit`]), extracts the lowest three levels
//! and their transition elements ([`spectral`]), evaluates the closed-form
//! second-order susceptibilities and the input-output field ([`response`]),
//! cross-checks them against direct master-equation integration
//! ([`lindblad`]), and drives bias-flux sweeps and operating-point searches
//! ([`sweep`]). Configuration, tabular serialization and figure emission
//! live in [`config`], [`table_io`], [`svg`] and [`figures`].
//!
//! Conventions used throughout:
//! - energies are `E/h` in GHz; ordinary frequencies `nu` in GHz on every
//!   public surface, with `2 pi` applied inside response formulas;
//! - supercurrent matrix elements are normalized by `I_0 = 2 pi E_J/Phi_0`;
//! - drive amplitudes are flux amplitudes in `Phi_0` units;
//! - the charging energy follows `E_c = e^2/(2 C_J)`.

pub mod circuit;
pub mod config;
pub mod error;
pub mod figures;
pub mod lindblad;
pub mod response;
pub mod spectral;
pub mod svg;
pub mod sweep;
pub mod table_io;

pub use error::{Error, Result};
