//! Compact electro-thermal modelling of Seebeck-driven quadratic transfer
//! (QTC) elements.
//!
//! The chain runs from a layered cantilever description to a lumped thermal
//! network and on to a simulated device:
//!
//! * [`layerstack`] reduces the layers to effective thermal resistance,
//!   capacitance and conductivity temperature coefficient.
//! * [`rcline`] evaluates the distributed RC line and its Foster expansion.
//! * [`cauer`] turns a Foster network into a Cauer ladder.
//! * [`circuit`] simulates the electro-thermal equivalent circuit.
//! * [`analysis`] extracts conversion constants, temperature coefficients
//!   and harmonic spectra.
//! * [`netlist`] writes the device as a SPICE behavioural subcircuit.
//!
//! Everything works in SI units: metres, watts, joules, kelvin. Temperature
//! rises are kelvin above the substrate reference temperature.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cauer;
pub mod circuit;
mod error;
pub mod layerstack;
pub mod netlist;
pub mod rcline;

pub use error::{Error, Result};
