//! Lossy continuous-variable teleportation: the teleportation and direct
//! transmission channels in a truncated Fock basis, closed-form fidelities and
//! nonclassical depths, and the phase-space tools that check them.

pub mod analytics;
pub mod channels;
pub mod error;
pub mod fock;
pub mod phase_space;
pub mod quadrature;
pub mod special;

pub use channels::{ChannelParams, MeasurementOutcome};
pub use error::{Error, Result};
pub use fock::{build_state, DensityMatrix, StateSpec};
