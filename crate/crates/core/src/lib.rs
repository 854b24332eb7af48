//! Pulse-level simulator for a small heteronuclear spin system, a compiler
//! that lowers quantum gates to RF pulse sequences, and a switching layer
//! that routes classical bit frames through permutation circuits built from
//! controlled-not gates, with synthetic FID/spectrum readout.
//!
//! Modules, bottom up:
//!
//! - [`matrix`]: dense complex matrices.
//! - [`quantum`]: state vectors, density operators, unitaries, spin-1/2
//!   rotations and global-phase-aware equivalence.
//! - [`spin`]: the physical model (channels, calibration, J coupling) and
//!   pulse/delay/sequence propagators.
//! - [`gates`]: the gate-level IR and ideal unitaries.
//! - [`compiler`]: lowering gates and circuits to pulse sequences, with a
//!   verification oracle.
//! - [`switch`]: classical/quantum conversion and constant-depth
//!   permutation routing.
//! - [`acquisition`]: FID synthesis, spectra and peak picking.

pub mod acquisition;
pub mod compiler;
pub mod error;
pub mod gates;
pub mod matrix;
pub mod quantum;
pub mod spin;
pub mod switch;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Largest register this crate will represent densely.
pub const MAX_SPINS: usize = 12;

pub use num_complex::Complex64;
