//! Nonadiabatic holonomic one-qubit gates in a three-level Λ system under systematic
//! Rabi-frequency errors.
//!
//! * [`qmath`]: operators, exponentials and fidelities on (|0⟩, |1⟩, |e⟩)
//! * [`schemes`]: ideal and error-affected gates for the two-loop, single-loop and
//!   single-shot schemes
//! * [`analytic`]: second-order fidelity formulas and comparison curves
//! * [`pathfinder`]: parameters realising a target rotation
//! * [`oracle`]: time-stepped propagation used to cross-check closed forms

pub mod analytic;
pub mod error;
pub mod oracle;
pub mod pathfinder;
pub mod qmath;
pub mod schemes;

pub use analytic::{GatePath, TargetGate};
pub use error::{Error, Result};
pub use qmath::{gate_fidelity, Unitary};
pub use schemes::RabiError;
