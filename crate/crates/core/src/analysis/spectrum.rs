use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::Waveform;
use crate::error::{invalid, Error, Result};

/// Largest distance (in bins) between a harmonic and the nearest bin centre.
const ALIGNMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowKind {
    Rect,
    Hamming,
    Hann,
    Bartlett,
}

impl WindowKind {
    pub const ALL: [WindowKind; 4] = [
        WindowKind::Rect,
        WindowKind::Hamming,
        WindowKind::Hann,
        WindowKind::Bartlett,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Rect => "rect",
            WindowKind::Hamming => "hamming",
            WindowKind::Hann => "hann",
            WindowKind::Bartlett => "bartlett",
        }
    }

    /// Symmetric window coefficient for sample `n` of `len`.
    pub fn coefficient(self, n: usize, len: usize) -> f64 {
        let x = n as f64 / (len - 1) as f64;
        match self {
            WindowKind::Rect => 1.0,
            WindowKind::Hamming => 0.54 - 0.46 * (2.0 * PI * x).cos(),
            WindowKind::Hann => 0.5 * (1.0 - (2.0 * PI * x).cos()),
            WindowKind::Bartlett => 1.0 - (2.0 * x - 1.0).abs(),
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rect" | "rectangular" => Ok(WindowKind::Rect),
            "hamming" => Ok(WindowKind::Hamming),
            "hann" | "hanning" => Ok(WindowKind::Hann),
            "bartlett" | "triangular" => Ok(WindowKind::Bartlett),
            other => Err(invalid(format!(
                "unknown window '{other}' (expected rect, hamming, hann or bartlett)"
            ))),
        }
    }
}

pub fn apply_window(w: &Waveform, kind: WindowKind) -> Waveform {
    let len = w.len();
    let samples = w
        .samples()
        .iter()
        .enumerate()
        .map(|(n, &v)| v * kind.coefficient(n, len))
        .collect();
    Waveform::new(w.dt(), samples).expect("windowing keeps a valid waveform valid")
}

/// One-sided amplitude spectrum.
///
/// Bins are normalised by the window's coherent gain (the sum of its
/// coefficients), so bin 0 holds the mean and a bin-centred sinusoid of
/// amplitude `a` reads `a` whatever the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub df: f64,
    pub magnitudes: Vec<f64>,
    pub window: WindowKind,
}

impl Spectrum {
    pub fn frequency(&self, bin: usize) -> f64 {
        bin as f64 * self.df
    }

    /// Index of the largest non-DC bin.
    pub fn peak_bin(&self) -> Option<usize> {
        self.magnitudes
            .iter()
            .enumerate()
            .skip(1)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    }
}

pub fn spectrum(w: &Waveform, kind: WindowKind) -> Result<Spectrum> {
    let n = w.len();
    if n < 8 {
        return Err(invalid("spectrum needs at least 8 samples"));
    }
    let windowed = apply_window(w, kind);
    let gain: f64 = (0..n).map(|i| kind.coefficient(i, n)).sum();
    let mut buf: Vec<Complex<f64>> = windowed
        .samples()
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let magnitudes = buf[..=half]
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let one_sided = if k == 0 || (n.is_multiple_of(2) && k == half) { 1.0 } else { 2.0 };
            one_sided * x.norm() / gain
        })
        .collect();
    Ok(Spectrum {
        df: 1.0 / (n as f64 * w.dt()),
        magnitudes,
        window: kind,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicRow {
    /// 0 for the DC row.
    pub harmonic: usize,
    pub frequency: f64,
    /// Level relative to the DC bin (dB).
    pub level_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicReport {
    pub rows: Vec<HarmonicRow>,
}

impl HarmonicReport {
    pub fn level(&self, harmonic: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.harmonic == harmonic)
            .map(|r| r.level_db)
    }
}

/// Levels of the requested harmonics of `f1` relative to the DC bin.
pub fn harmonic_report(spec: &Spectrum, f1: f64, harmonics: &[usize]) -> Result<HarmonicReport> {
    if !(f1.is_finite() && f1 > 0.0) {
        return Err(invalid("fundamental frequency must be > 0"));
    }
    let dc = spec.magnitudes[0];
    if !(dc > 0.0) {
        return Err(invalid("DC bin is zero; levels relative to DC are undefined"));
    }
    let mut rows = vec![HarmonicRow {
        harmonic: 0,
        frequency: 0.0,
        level_db: 0.0,
    }];
    for &k in harmonics.iter().filter(|&&k| k != 0) {
        let frequency = k as f64 * f1;
        let bin = frequency / spec.df;
        let nearest = bin.round();
        if nearest as usize >= spec.magnitudes.len() {
            return Err(invalid(format!(
                "harmonic {k} at {frequency} Hz lies above the Nyquist frequency"
            )));
        }
        if (bin - nearest).abs() > ALIGNMENT_TOL {
            return Err(Error::Alignment {
                harmonic: k,
                frequency,
                bin_width: spec.df,
            });
        }
        let mag = spec.magnitudes[nearest as usize];
        rows.push(HarmonicRow {
            harmonic: k,
            frequency,
            level_db: 20.0 * (mag / dc).log10(),
        });
    }
    Ok(HarmonicReport { rows })
}
