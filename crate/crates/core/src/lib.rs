//! Quasi-free fermionic Lindblad semigroups.
//!
//! Covariance-matrix dynamics, stationary states and ergodicity criteria for
//! quadratic open fermionic systems, checked against an exact dense
//! Fock-space oracle.

pub mod error;
pub mod exec;
pub mod fock;
pub mod linalg;
pub mod lindblad;
pub mod models;
pub mod oracle;
pub mod phase;
pub mod quasifree;
pub mod tolerance;

pub use error::{Error, Result};
pub use exec::Execution;
pub use tolerance::Tolerances;
