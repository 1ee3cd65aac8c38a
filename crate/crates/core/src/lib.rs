//! Three-qubit Grover search with Rydberg atoms resonantly coupled to a
//! weakly decaying single-mode microwave cavity.
//!
//! * [`hilbert`]: level scheme, logical encoding, truncated product basis.
//! * [`dynamics`]: resonant and no-jump Hamiltonians, time evolution, gate
//!   extraction by simulation, transit geometry.
//! * [`gates`]: analytic 8×8 logical operators.
//! * [`grover`]: the iterated search and its success figures.
//! * [`imperfections`]: timing-mismatch and coupling-offset infidelities.
//! * [`config`] and [`experiment`]: sweep configuration, experiment runners,
//!   and CSV output used by the `sim` binary.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod gates;
pub mod grover;
pub mod hilbert;
pub mod imperfections;

pub use error::{Error, Result};
