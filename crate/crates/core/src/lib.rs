//! Composite pulse sequences that implement arbitrary single-qubit gates
//! while cancelling systematic control errors to first order.
//!
//! The control field produces elementary rotations `(θ)_φ` about axes in the
//! xy-plane. Two systematic errors are modelled: a relative amplitude error
//! `ε` (`θ → (1+ε)θ`) and an off-resonance term `f σz` that rides on the
//! control amplitude.
//!
//! - [`su2`] holds the 2×2 algebra, infidelity and target factorization
//!   `U ≅ Θ·Z_{φ₂}`.
//! - [`error_model`] builds exact and first-order faulty propagators and
//!   extracts first-order error generators.
//! - [`planar`] cancels the amplitude error of `Θ` by inserting two full
//!   turns whose error vectors close a quadrilateral.
//! - [`corpse`] adds off-resonance robustness by nesting CORPSE triples.
//! - [`targets`] assembles robust sequences for Z, Hadamard and arbitrary gates.
//! - [`analysis`] runs infidelity sweeps, time-cost accounting and scaling fits.
//! - [`document`] and [`cli`] provide the file format and command line.
//!
//! All sequences are stored in **time order**: the first pulse applied is the
//! first element.

pub mod analysis;
pub mod cli;
pub mod corpse;
pub mod document;
pub mod error;
pub mod error_model;
pub mod planar;
pub mod su2;
pub mod targets;

pub use error::{Error, Result};
pub use su2::{Pulse, Sequence, ThetaDecomposition, Unitary2};
pub use targets::{Robustness, TargetKind, TargetSpec};
