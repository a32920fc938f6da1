//! Heisenberg-picture model of a continuous-variable optical teleporter and
//! the Mach-Zehnder interferometer used to test it.
//!
//! Field operators are kept as sparse linear (Bogoliubov) expressions over
//! registered bosonic modes, so every network built from beamsplitters, loss
//! channels, parametric amplifiers and the teleporter stays exact. Photon
//! counting expectations are evaluated symbolically on sparse multimode Fock
//! superpositions ([`fock`]), and certified independently by a truncated
//! dense state-vector simulation ([`oracle`]).

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod experiments;
pub mod expr;
pub mod fock;
pub mod interferometer;
pub(crate) mod linalg;
pub mod modes;
pub mod oracle;
pub mod spectral;
pub mod teleporter;

pub use error::CoreError;
pub use expr::FieldExpression;
pub use fock::FockState;
pub use interferometer::{MzConfig, VisibilityReport};
pub use modes::{ModeId, ModeRegistry};
pub use teleporter::TeleporterParams;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Coefficients below this magnitude are dropped from canonical sparse forms.
pub const ZERO_PRUNE: f64 = 1e-15;
