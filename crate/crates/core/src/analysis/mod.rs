//! Secondary characteristics extracted from the device model: conversion
//! constant, temperature coefficients, windowed spectra and harmonic tables.

mod characteristics;
mod distortion;
mod spectrum;

pub use characteristics::{
    dc_sweep, fit_conversion_constant, heater_tcc_two_point, seebeck_tcc_from_balance,
    temperature_sweep, ConversionFit, SweepPoint,
};
pub use distortion::{calibrate_coupling, steady_state_spectrum, SteadyStateRun, SteadyStateSetup};
pub use spectrum::{
    apply_window, harmonic_report, spectrum, HarmonicReport, HarmonicRow, Spectrum, WindowKind,
};

use crate::error::{invalid, Result};

/// Uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    dt: f64,
    samples: Vec<f64>,
}

impl Waveform {
    pub fn new(dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("sample interval must be > 0"));
        }
        if samples.len() < 2 {
            return Err(invalid("a waveform needs at least two samples"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(invalid("waveform samples must be finite"));
        }
        Ok(Waveform { dt, samples })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.dt * (self.samples.len() - 1) as f64
    }

    /// The trailing `n` samples.
    pub fn tail(&self, n: usize) -> Result<Waveform> {
        if n > self.samples.len() {
            return Err(invalid(format!(
                "cannot take {n} samples from a waveform of {}",
                self.samples.len()
            )));
        }
        Waveform::new(self.dt, self.samples[self.samples.len() - n..].to_vec())
    }
}
