//! Quantum-switch entanglement generation.
//!
//! Local unitaries placed in a coherent superposition of causal orders turn
//! product inputs into Bell, GHZ-like and W-like states. This crate simulates
//! the switch on dense state vectors, checks the per-qubit orthogonality
//! conditions that make the output maximally entangled, sweeps the
//! entanglement surfaces over the gate and input parameters, and evaluates
//! the networked constructions (entanglement mapping, hierarchical GHZ
//! distribution).
//!
//! Conventions shared by every module: qubit 0 is the leftmost tensor factor
//! (most significant bit of a basis index); control registers come after the
//! targets; a control measured in `|+⟩` is labelled `+`, in `|−⟩` is `-`.

pub mod cli;
pub mod error;
pub mod format;
pub mod gates;
pub mod metrics;
pub mod netsim;
pub mod parallel;
pub mod qla;
pub mod spec_io;
pub mod sweep;
pub mod switch;
pub mod verify;

pub use error::{Error, Result};
