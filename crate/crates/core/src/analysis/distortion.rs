//! Periodic steady-state runs for harmonic analysis.
//!
//! The analysis record is an integer number of drive periods sampled on a
//! grid that puts every harmonic of the drive exactly on a bin. A warm-up of
//! at least ten dominant time constants (rounded up to whole periods) is
//! simulated first and discarded.

use super::spectrum::{spectrum, Spectrum, WindowKind};
use super::Waveform;
use crate::circuit::{DeviceModel, Drive};
use crate::error::{invalid, Result};

const WARMUP_TIME_CONSTANTS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateSetup {
    /// Sine amplitude (V).
    pub amplitude: f64,
    /// Drive frequency (Hz).
    pub frequency: f64,
    /// Drive periods in the analysis record.
    pub periods: usize,
    /// Samples in the analysis record; must be a multiple of `periods`.
    pub samples: usize,
    pub window: WindowKind,
}

impl SteadyStateSetup {
    pub fn new(amplitude: f64, frequency: f64) -> Self {
        SteadyStateSetup {
            amplitude,
            frequency,
            periods: 32,
            samples: 32_768,
            window: WindowKind::Hamming,
        }
    }

    pub fn dt(&self) -> f64 {
        self.periods as f64 / (self.frequency * self.samples as f64)
    }

    fn validate(&self) -> Result<()> {
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return Err(invalid("drive frequency must be > 0"));
        }
        if self.periods == 0 || self.samples < 8 {
            return Err(invalid("analysis record needs at least one period and eight samples"));
        }
        if !self.samples.is_multiple_of(self.periods) {
            return Err(invalid(format!(
                "{} samples do not divide evenly into {} periods",
                self.samples, self.periods
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateRun {
    pub setup: SteadyStateSetup,
    pub warmup_periods: usize,
    /// Analysis record of the hot-point rise (K).
    pub hot_point: Waveform,
    /// Analysis record of the output voltage (V).
    pub output: Waveform,
    /// Spectrum of `output` with the setup's window.
    pub spectrum: Spectrum,
}

impl SteadyStateRun {
    pub fn hot_point_spectrum(&self) -> Result<Spectrum> {
        spectrum(&self.hot_point, self.setup.window)
    }
}

pub fn steady_state_spectrum(model: &DeviceModel, setup: SteadyStateSetup) -> Result<SteadyStateRun> {
    setup.validate()?;
    let per_period = setup.samples / setup.periods;
    let settle = WARMUP_TIME_CONSTANTS * model.max_time_constant() * setup.frequency;
    let warmup_periods = (settle.ceil() as usize).max(1);
    let steps = warmup_periods * per_period + setup.samples;
    let dt = setup.dt();

    let drive = Drive::sine(setup.amplitude, setup.frequency);
    let record = model.transient(&drive, dt, steps as f64 * dt)?;
    let hot_point = record.hot_point.tail(setup.samples)?;
    let output = record.output.tail(setup.samples)?;
    let spectrum = spectrum(&output, setup.window)?;
    Ok(SteadyStateRun {
        setup,
        warmup_periods,
        hot_point,
        output,
        spectrum,
    })
}

/// Feed-through coefficient that puts the fundamental `db_below_second` dB
/// under the second harmonic of the output.
///
/// The thermal path only produces even harmonics, so the fundamental comes
/// entirely from the coupling term and scales linearly with it.
pub fn calibrate_coupling(model: &DeviceModel, setup: SteadyStateSetup, db_below_second: f64) -> Result<f64> {
    let uncoupled = DeviceModel {
        coupling: 0.0,
        ..model.clone()
    };
    let run = steady_state_spectrum(&uncoupled, setup)?;
    let bin = 2 * setup.periods;
    let second = run.spectrum.magnitudes[bin];
    Ok(second * 10f64.powf(-db_below_second / 20.0) / setup.amplitude.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::harmonic_report;
    use crate::cauer::{CauerLadder, CauerStage};

    fn model() -> DeviceModel {
        let ladder = CauerLadder::new(vec![
            CauerStage { shunt_capacitance: 29.2e-9, series_resistance: 18_310.0 },
            CauerStage { shunt_capacitance: 44.6e-9, series_resistance: 32_550.0 },
        ])
        .unwrap();
        DeviceModel::linear(670.01, 12, 9.803e-5, ladder)
    }

    fn small_setup() -> SteadyStateSetup {
        SteadyStateSetup {
            periods: 8,
            samples: 8192,
            ..SteadyStateSetup::new(1.0, 70.0)
        }
    }

    #[test]
    fn grid_is_bin_aligned() {
        let run = steady_state_spectrum(&model(), small_setup()).unwrap();
        assert_eq!(run.output.len(), 8192);
        assert!((run.spectrum.df - 70.0 / 8.0).abs() < 1e-9);
        assert!(run.warmup_periods >= 2);
        let rep = harmonic_report(&run.spectrum, 70.0, &[1, 2, 3]).unwrap();
        assert_eq!(rep.rows.len(), 4);
    }

    #[test]
    fn setup_validation() {
        let bad = SteadyStateSetup { periods: 3, samples: 1000, ..small_setup() };
        assert!(steady_state_spectrum(&model(), bad).is_err());
        let coarse = SteadyStateSetup { periods: 64, samples: 64, ..small_setup() };
        assert!(steady_state_spectrum(&model(), coarse).is_err());
    }

    #[test]
    fn calibrated_coupling_hits_target() {
        let m = DeviceModel {
            alpha_r: 0.00105,
            alpha_s: 0.00113,
            alpha_lambda: 0.00177,
            ..model()
        };
        let setup = small_setup();
        let kappa = calibrate_coupling(&m, setup, 28.0).unwrap();
        assert!(kappa > 0.0);
        let run = steady_state_spectrum(&DeviceModel { coupling: kappa, ..m }, setup).unwrap();
        let rep = harmonic_report(&run.spectrum, 70.0, &[1, 2]).unwrap();
        let gap = rep.level(2).unwrap() - rep.level(1).unwrap();
        assert!((gap - 28.0).abs() < 1e-2, "{gap}");
    }
}
