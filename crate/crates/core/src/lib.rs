//! Hamilton-Randers simulator.
//!
//! A numerical laboratory for deterministic molecule ensembles with two time
//! parameters: a compact internal time driving a geometric interpolation
//! flow, and an external time along which ensemble cycles repeat. The crate
//! builds the phase-space geometry, runs the flows and cycles, assembles
//! emergent wave functions from world-line densities, and checks the
//! concentration, Lipschitz, and operator-correspondence properties that
//! make the ensembles behave quantum-mechanically at the end of each cycle.

// Validation guards are written `!(x > 0.0)` on purpose: the negation also
// rejects NaN, which `x <= 0.0` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod concentration;
pub mod constants;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod flow;
pub mod geometry;
pub mod lipschitz;
pub mod quantization;
pub mod rng;

pub use error::{Error, Result};
