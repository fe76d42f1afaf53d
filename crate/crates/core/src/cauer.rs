//! Foster to Cauer transformation of RC one-ports.
//!
//! The Foster sum is brought to a common denominator and then expanded as a
//! continued fraction about `s -> inf`, alternately pulling a shunt capacitor
//! out of the admittance and a series resistor out of the impedance. The
//! resulting ladder starts with a shunt capacitor at the driven node and ends
//! with a series resistor to the thermal ground:
//!
//! ```text
//!  in o---+---[R1]---+---[R2]--- ... ---+---[RN]---+
//!         |          |                  |          |
//!        C1         C2                 CN         GND
//!         |          |                  |
//!        GND        GND                GND
//! ```
//!
//! Polynomial expansion loses accuracy quickly with the number of stages, so
//! synthesis is limited to [`MAX_STAGES`] and every result is checked against
//! the source network before it is returned.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::rcline::FosterNetwork;

pub const MAX_STAGES: usize = 6;

/// Relative size below which a leading coefficient counts as cancelled.
const CANCEL_TOL: f64 = 1e-12;

/// Largest relative impedance error tolerated by the post-synthesis check.
const EQUIVALENCE_TOL: f64 = 1e-6;

/// Ratio of two real polynomials in `s`, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalImpedance {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

impl RationalImpedance {
    pub fn evaluate(&self, s: Complex64) -> Complex64 {
        horner(&self.numerator, s) / horner(&self.denominator, s)
    }

    pub fn dc_value(&self) -> f64 {
        self.numerator[0] / self.denominator[0]
    }
}

fn horner(coeffs: &[f64], s: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

/// `a * b` for ascending coefficient vectors.
fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn check_distinct(network: &FosterNetwork) -> Result<()> {
    let stages = network.stages();
    for (i, a) in stages.iter().enumerate() {
        for b in &stages[i + 1..] {
            if (a.time_constant - b.time_constant).abs()
                <= 1e-9 * a.time_constant.max(b.time_constant)
            {
                return Err(invalid(format!(
                    "duplicate Foster time constant {:e} s; merge the stages first",
                    a.time_constant
                )));
            }
        }
    }
    Ok(())
}

/// Common-denominator form with every time constant scaled by `1/tau` and
/// every resistance by `1/r0`.
fn scaled_rational(network: &FosterNetwork, tau: f64, r0: f64) -> (Vec<f64>, Vec<f64>) {
    let mut num = vec![0.0];
    let mut den = vec![1.0];
    for st in network.stages() {
        let factor = [1.0, st.time_constant / tau];
        let mut next_num = poly_mul(&num, &factor);
        next_num.resize(den.len(), 0.0);
        for (n, d) in next_num.iter_mut().zip(&den) {
            *n += st.resistance / r0 * d;
        }
        num = next_num;
        den = poly_mul(&den, &factor);
    }
    (num, den)
}

/// Exact polynomial form of `sum R_n / (1 + s t_n)`.
pub fn rational_from_foster(network: &FosterNetwork) -> Result<RationalImpedance> {
    check_distinct(network)?;
    let (numerator, denominator) = scaled_rational(network, 1.0, 1.0);
    Ok(RationalImpedance {
        numerator,
        denominator,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauerStage {
    /// J/K, from this stage's node to the thermal ground.
    pub shunt_capacitance: f64,
    /// K/W, from this stage's node to the next one (or to ground for the last stage).
    pub series_resistance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauerLadder {
    stages: Vec<CauerStage>,
}

impl CauerLadder {
    pub fn new(stages: Vec<CauerStage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(invalid("Cauer ladder needs at least one stage"));
        }
        for (i, st) in stages.iter().enumerate() {
            let ok = |v: f64| v.is_finite() && v > 0.0;
            if !ok(st.shunt_capacitance) || !ok(st.series_resistance) {
                return Err(invalid(format!(
                    "Cauer stage {} must have positive capacitance and resistance",
                    i + 1
                )));
            }
        }
        Ok(CauerLadder { stages })
    }

    pub fn stages(&self) -> &[CauerStage] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn dc_resistance(&self) -> f64 {
        self.stages.iter().map(|st| st.series_resistance).sum()
    }

    /// Driving-point impedance, evaluated from the grounded end inwards.
    pub fn impedance(&self, s: Complex64) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for st in self.stages.iter().rev() {
            z += st.series_resistance;
            z = 1.0 / (s * st.shunt_capacitance + 1.0 / z);
        }
        z
    }

    /// Natural time constants of the ladder in descending order.
    ///
    /// These are the eigen time constants of the node equations
    /// `C dU/dt = -G U` and coincide with the Foster time constants of the
    /// network the ladder was synthesised from.
    pub fn time_constants(&self) -> Vec<f64> {
        let n = self.stages.len();
        let mut g = DMatrix::<f64>::zeros(n, n);
        for (k, st) in self.stages.iter().enumerate() {
            let cond = 1.0 / st.series_resistance;
            g[(k, k)] += cond;
            if k + 1 < n {
                g[(k + 1, k + 1)] += cond;
                g[(k, k + 1)] -= cond;
                g[(k + 1, k)] -= cond;
            }
        }
        let scale: Vec<f64> = self
            .stages
            .iter()
            .map(|st| 1.0 / st.shunt_capacitance.sqrt())
            .collect();
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] *= scale[i] * scale[j];
            }
        }
        let mut taus: Vec<f64> = SymmetricEigen::new(g)
            .eigenvalues
            .iter()
            .map(|&rate| 1.0 / rate)
            .collect();
        taus.sort_by(|a, b| b.total_cmp(a));
        taus
    }
}

/// Continued-fraction synthesis of a positive Foster network.
pub fn foster_to_cauer(network: &FosterNetwork) -> Result<CauerLadder> {
    let n = network.len();
    if n > MAX_STAGES {
        return Err(invalid(format!(
            "Cauer synthesis supports at most {MAX_STAGES} stages, got {n}"
        )));
    }
    for (i, st) in network.stages().iter().enumerate() {
        if st.resistance <= 0.0 {
            return Err(Error::Synthesis {
                stage: i + 1,
                reason: format!(
                    "resistance {:e} K/W is not positive, the network is not positive-real",
                    st.resistance
                ),
            });
        }
    }
    check_distinct(network)?;

    // geometric mean of the time constants keeps the scaled coefficients
    // centred around one
    let tau = (network
        .stages()
        .iter()
        .map(|st| st.time_constant.ln())
        .sum::<f64>()
        / n as f64)
        .exp();
    let r0 = network.dc_resistance();
    let (mut num, mut den) = scaled_rational(network, tau, r0);

    let mut stages = Vec::with_capacity(n);
    for k in 1..=n {
        // admittance den/num: degree d over d-1, extract C*s
        let c = den[den.len() - 1] / num[num.len() - 1];
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Conditioning(format!(
                "non-positive shunt capacitance in ladder stage {k}"
            )));
        }
        let carried = if num.len() >= 2 { c * num[num.len() - 2] } else { 0.0 };
        let reference = den[den.len() - 2].abs().max(carried.abs());
        for i in (1..den.len()).rev() {
            den[i] -= c * num[i - 1];
        }
        drop_leading(&mut den, reference, k, "capacitor")?;

        // impedance num/den: equal degrees, extract R
        let r = num[num.len() - 1] / den[den.len() - 1];
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Conditioning(format!(
                "non-positive series resistance in ladder stage {k}"
            )));
        }
        let reference = if num.len() >= 2 {
            num[num.len() - 2].abs().max((r * den[den.len() - 2]).abs())
        } else {
            0.0
        };
        for (a, b) in num.iter_mut().zip(&den) {
            *a -= r * b;
        }
        if k < n {
            drop_leading(&mut num, reference, k, "resistor")?;
        } else {
            let scale = den.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if num.iter().any(|v| v.abs() > CANCEL_TOL * scale.max(r)) {
                return Err(Error::Conditioning(
                    "remainder not exhausted after the last stage".into(),
                ));
            }
        }

        stages.push(CauerStage {
            shunt_capacitance: c * tau / r0,
            series_resistance: r * r0,
        });
    }

    let ladder = CauerLadder::new(stages)?;
    verify_equivalence(network, &ladder)?;
    Ok(ladder)
}

/// Removes the cancelled leading coefficient and rejects a remainder whose
/// new leading coefficient cancelled as well. `reference` is the larger of
/// the two terms that were subtracted to form that coefficient.
fn drop_leading(poly: &mut Vec<f64>, reference: f64, stage: usize, what: &str) -> Result<()> {
    poly.pop();
    match poly.last() {
        Some(&lead) if lead.abs() > CANCEL_TOL * reference => Ok(()),
        _ => Err(Error::Conditioning(format!(
            "leading coefficient cancelled after the {what} of stage {stage}"
        ))),
    }
}

fn verify_equivalence(network: &FosterNetwork, ladder: &CauerLadder) -> Result<()> {
    let taus = network.stages().iter().map(|st| st.time_constant);
    let t_max = taus.clone().fold(0.0, f64::max);
    let t_min = taus.fold(f64::INFINITY, f64::min);
    let lo = (0.01 / t_max).ln();
    let hi = (100.0 / t_min).ln();
    const POINTS: usize = 50;
    for i in 0..POINTS {
        let w = (lo + (hi - lo) * i as f64 / (POINTS - 1) as f64).exp();
        let s = Complex64::new(0.0, w);
        let expected = network.impedance(s)?;
        let err = (ladder.impedance(s) - expected).norm() / expected.norm();
        if !(err < EQUIVALENCE_TOL) {
            return Err(Error::Conditioning(format!(
                "synthesised ladder deviates by {err:e} at {w:e} rad/s"
            )));
        }
    }
    Ok(())
}
