//! Distributed RC line model of the cantilever and its Foster expansion.
//!
//! Heat is injected at the free end of a uniform line whose far end is held
//! at substrate temperature. The transfer impedance to a point `x` measured
//! from the cold end is
//!
//! ```text
//! Z(s) = R / u * sinh(u * x/L) / cosh(u),   u = sqrt(s R C)
//! ```
//!
//! Its poles sit on the negative real axis at `-(pi^2/4)(2n-1)^2 / (R C)`, and
//! the residues give one parallel RC Foster stage per pole.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Below this |u| the hyperbolic ratio is evaluated from its Taylor series.
const SERIES_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributedLine {
    r_total: f64,
    c_total: f64,
    x_over_l: f64,
}

/// Magnitude of a negative-real pole and its time constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    /// `p_n` in 1/s; the pole itself is at `-p_n`.
    pub magnitude: f64,
    /// `1 / p_n` in s.
    pub time_constant: f64,
}

/// One parallel RC cell of a Foster network.
///
/// The resistance is signed: the Foster residues alternate with the pole
/// index, and for some observation points a stage comes out negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FosterStage {
    /// K/W
    pub resistance: f64,
    /// s
    pub time_constant: f64,
}

impl FosterStage {
    pub fn new(resistance: f64, time_constant: f64) -> Result<Self> {
        if !(time_constant.is_finite() && time_constant > 0.0) {
            return Err(invalid("Foster time constant must be > 0"));
        }
        if !resistance.is_finite() || resistance == 0.0 {
            return Err(invalid("Foster resistance must be finite and nonzero"));
        }
        Ok(FosterStage {
            resistance,
            time_constant,
        })
    }

    /// `t / R` in J/K, carrying the sign of the resistance.
    pub fn capacitance(&self) -> f64 {
        self.time_constant / self.resistance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FosterNetwork {
    stages: Vec<FosterStage>,
}

impl FosterNetwork {
    pub fn new(stages: Vec<FosterStage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(invalid("Foster network needs at least one stage"));
        }
        Ok(FosterNetwork { stages })
    }

    pub fn stages(&self) -> &[FosterStage] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Sum of the stage resistances, i.e. `Z(0)`.
    pub fn dc_resistance(&self) -> f64 {
        self.stages.iter().map(|st| st.resistance).sum()
    }

    /// `sum R_n / (1 + s t_n)`.
    pub fn impedance(&self, s: Complex64) -> Result<Complex64> {
        let mut z = Complex64::new(0.0, 0.0);
        for (i, st) in self.stages.iter().enumerate() {
            let den = Complex64::new(1.0, 0.0) + s * st.time_constant;
            if den.norm() <= 1e-14 {
                return Err(Error::PoleEvaluation { stage: i + 1, s });
            }
            z += st.resistance / den;
        }
        Ok(z)
    }
}

impl DistributedLine {
    pub fn new(r_total: f64, c_total: f64, x_over_l: f64) -> Result<Self> {
        if !(r_total.is_finite() && r_total > 0.0) {
            return Err(invalid("line resistance must be > 0"));
        }
        if !(c_total.is_finite() && c_total > 0.0) {
            return Err(invalid("line capacitance must be > 0"));
        }
        if !(x_over_l > 0.0 && x_over_l <= 1.0) {
            return Err(invalid("observation point x/L must lie in (0, 1]"));
        }
        Ok(DistributedLine {
            r_total,
            c_total,
            x_over_l,
        })
    }

    pub fn r_total(&self) -> f64 {
        self.r_total
    }

    pub fn c_total(&self) -> f64 {
        self.c_total
    }

    pub fn x_over_l(&self) -> f64 {
        self.x_over_l
    }

    pub fn rc(&self) -> f64 {
        self.r_total * self.c_total
    }

    /// Transfer impedance at complex frequency `s`.
    ///
    /// `sinh(a u) / (u cosh u)` is even in `u`, so the principal square root
    /// gives the same value as the other branch.
    pub fn impedance(&self, s: Complex64) -> Complex64 {
        let a = self.x_over_l;
        let u = (s * self.rc()).sqrt();
        let ratio = if u.norm() < SERIES_THRESHOLD {
            let z = u * u;
            let num = a * (1.0 + z * (a * a / 6.0) + z * z * (a.powi(4) / 120.0));
            let den = 1.0 + z / 2.0 + z * z / 24.0;
            num / den
        } else {
            (u * a).sinh() / (u * u.cosh())
        };
        ratio * self.r_total
    }

    pub fn pole(&self, n: usize) -> Result<Pole> {
        if n == 0 {
            return Err(invalid("pole index starts at 1"));
        }
        let odd = (2 * n - 1) as f64;
        let magnitude = PI * PI / 4.0 * odd * odd / self.rc();
        Ok(Pole {
            magnitude,
            time_constant: 1.0 / magnitude,
        })
    }

    pub fn foster_stage(&self, n: usize) -> Result<FosterStage> {
        let pole = self.pole(n)?;
        let odd = (2 * n - 1) as f64;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let resistance = self.r_total * 8.0 * sign / (PI * PI * odd * odd)
            * (PI / 2.0 * odd * self.x_over_l).sin();
        FosterStage::new(resistance, pole.time_constant)
    }

    /// The first `n_stages` Foster stages.
    pub fn foster_network(&self, n_stages: usize) -> Result<FosterNetwork> {
        if n_stages == 0 {
            return Err(invalid("Foster network needs at least one stage"));
        }
        let stages = (1..=n_stages)
            .map(|n| self.foster_stage(n))
            .collect::<Result<Vec<_>>>()?;
        FosterNetwork::new(stages)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_line() -> DistributedLine {
        DistributedLine::new(56_570.0, 11.6e-8, 0.9674).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dc_limit() {
        let line = reference_line();
        let z0 = line.impedance(c(0.0, 0.0));
        assert_eq!(z0.im, 0.0);
        assert_relative_eq!(z0.re, 56_570.0 * 0.9674, max_relative = 1e-15);
        assert!((z0.re - 54_726.0).abs() < 1.0);
    }

    #[test]
    fn approaches_dc_limit_continuously() {
        let line = reference_line();
        let dc = line.r_total() * line.x_over_l();
        let mut last = f64::INFINITY;
        for k in 0..11 {
            let s = c(0.0, 10f64.powi(2 - k));
            let err = (line.impedance(s) - dc).norm();
            assert!(err < last);
            last = err;
        }
        assert!(last / dc < 1e-8);
        // both sides of the series threshold agree
        let w_edge = SERIES_THRESHOLD * SERIES_THRESHOLD / line.rc();
        let below = line.impedance(c(0.0, w_edge * 0.998));
        let above = line.impedance(c(0.0, w_edge * 1.002));
        assert_relative_eq!(below.re, above.re, max_relative = 1e-9);
    }

    #[test]
    fn conjugate_symmetry() {
        let line = reference_line();
        for &s in &[c(120.0, 40.0), c(-50.0, 3000.0), c(1e4, -2e5), c(3.0, 1e-3)] {
            let a = line.impedance(s.conj());
            let b = line.impedance(s).conj();
            assert_relative_eq!(a.re, b.re, max_relative = 1e-12);
            assert_relative_eq!(a.im, b.im, max_relative = 1e-12);
        }
    }

    #[test]
    fn impedance_at_70hz_matches_high_precision_value() {
        // 50-digit evaluation of the closed form
        let z = reference_line().impedance(c(0.0, 2.0 * PI * 70.0));
        assert_relative_eq!(z.re, 28_180.427_043_972_207, max_relative = 1e-12);
        assert_relative_eq!(z.im, -23_379.108_863_504_983, max_relative = 1e-12);
    }

    #[test]
    fn first_two_poles() {
        let line = reference_line();
        let p1 = line.pole(1).unwrap();
        let p2 = line.pole(2).unwrap();
        assert!((p1.magnitude / 375.0 - 1.0).abs() < 0.01);
        assert!((p1.time_constant / 2.664e-3 - 1.0).abs() < 0.01);
        assert!((p2.magnitude / 3377.0 - 1.0).abs() < 0.01);
        assert!((p2.time_constant / 0.296e-3 - 1.0).abs() < 0.01);
        assert!(line.pole(0).is_err());
    }

    #[test]
    fn pole_ratios_and_independence_of_x() {
        let a = reference_line();
        let b = DistributedLine::new(56_570.0, 11.6e-8, 0.25).unwrap();
        let p1 = a.pole(1).unwrap().magnitude;
        for n in 1..12 {
            let pn = a.pole(n).unwrap().magnitude;
            let odd = (2 * n - 1) as f64;
            assert_relative_eq!(pn / p1, odd * odd, max_relative = 1e-14);
            assert_eq!(a.pole(n).unwrap(), b.pole(n).unwrap());
        }
    }

    #[test]
    fn foster_stages_of_reference_line() {
        let line = reference_line();
        let s1 = line.foster_stage(1).unwrap();
        let s2 = line.foster_stage(2).unwrap();
        assert!((s1.resistance / 45_800.0 - 1.0).abs() < 0.01);
        assert!((s1.capacitance() / 58.2e-9 - 1.0).abs() < 0.01);
        assert!((s2.resistance / 5_050.0 - 1.0).abs() < 0.01);
        assert!((s2.capacitance() / 58.6e-9 - 1.0).abs() < 0.01);
        assert_relative_eq!(s1.capacitance(), s1.time_constant / s1.resistance);
    }

    #[test]
    fn foster_stage_at_line_end() {
        let line = DistributedLine::new(1_000.0, 1e-6, 1.0).unwrap();
        let s1 = line.foster_stage(1).unwrap();
        assert_relative_eq!(s1.resistance, 1_000.0 * 8.0 / (PI * PI), max_relative = 1e-15);
    }

    #[test]
    fn foster_network_sizes() {
        let line = reference_line();
        let one = line.foster_network(1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.dc_resistance(), line.foster_stage(1).unwrap().resistance);
        assert!(line.foster_network(0).is_err());
        let ten = line.foster_network(10).unwrap();
        let target = line.r_total() * line.x_over_l();
        assert!((ten.dc_resistance() / target - 1.0).abs() < 0.005);
    }

    #[test]
    fn foster_dc_error_shrinks_with_stage_count() {
        // Monotone up to nine stages for this observation point; the series
        // overshoots afterwards because sin((2n-1) pi x / 2L) changes sign.
        let line = reference_line();
        let target = line.r_total() * line.x_over_l();
        let errs: Vec<f64> = (1..=9)
            .map(|n| (line.foster_network(n).unwrap().dc_resistance() - target).abs())
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn foster_resistance_envelope() {
        let line = DistributedLine::new(1.0, 1.0, 0.63).unwrap();
        for n in 1..30 {
            let st = line.foster_stage(n).unwrap();
            let odd = (2 * n - 1) as f64;
            assert!(st.resistance.abs() <= 8.0 / (PI * PI * odd * odd) + 1e-15);
            let expected_sign = if n % 2 == 1 { 1.0 } else { -1.0 } * (PI / 2.0 * odd * 0.63).sin().signum();
            assert_eq!(st.resistance.signum(), expected_sign);
        }
    }

    #[test]
    fn foster_impedance_values() {
        let line = reference_line();
        // paper's printed pair sums to 50850
        let printed = FosterNetwork::new(vec![
            FosterStage::new(45_800.0, 2.664e-3).unwrap(),
            FosterStage::new(5_050.0, 0.296e-3).unwrap(),
        ])
        .unwrap();
        assert_relative_eq!(printed.impedance(c(0.0, 0.0)).unwrap().re, 50_850.0);

        let single = FosterNetwork::new(vec![line.foster_stage(1).unwrap()]).unwrap();
        let st = single.stages()[0];
        let z = single.impedance(c(0.0, 1.0 / st.time_constant)).unwrap();
        let expected = st.resistance / c(1.0, 1.0);
        assert_relative_eq!(z.re, expected.re, max_relative = 1e-14);
        assert_relative_eq!(z.im, expected.im, max_relative = 1e-14);
    }

    #[test]
    fn foster_impedance_term_by_term() {
        let net = FosterNetwork::new(vec![
            FosterStage::new(1200.0, 3e-3).unwrap(),
            FosterStage::new(-150.0, 4e-4).unwrap(),
            FosterStage::new(80.0, 2.5e-5).unwrap(),
        ])
        .unwrap();
        for &s in &[c(0.0, 100.0), c(-20.0, 5000.0), c(300.0, -7.0)] {
            let mut expected = c(0.0, 0.0);
            for (r, t) in [(1200.0, 3e-3), (-150.0, 4e-4), (80.0, 2.5e-5)] {
                let y = c(1.0 / r, 0.0) + s * (t / r);
                expected += c(1.0, 0.0) / y;
            }
            let z = net.impedance(s).unwrap();
            assert_relative_eq!(z.re, expected.re, max_relative = 1e-12);
            assert_relative_eq!(z.im, expected.im, max_relative = 1e-12);
        }
    }

    #[test]
    fn foster_impedance_at_pole_fails() {
        let net = FosterNetwork::new(vec![
            FosterStage::new(10.0, 1e-3).unwrap(),
            FosterStage::new(5.0, 1e-4).unwrap(),
        ])
        .unwrap();
        match net.impedance(c(-1e4, 0.0)) {
            Err(Error::PoleEvaluation { stage, .. }) => assert_eq!(stage, 2),
            other => panic!("expected pole error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_lines_rejected() {
        assert!(DistributedLine::new(0.0, 1.0, 0.5).is_err());
        assert!(DistributedLine::new(1.0, -1.0, 0.5).is_err());
        assert!(DistributedLine::new(1.0, 1.0, 0.0).is_err());
        assert!(DistributedLine::new(1.0, 1.0, 1.01).is_err());
        assert!(DistributedLine::new(1.0, 1.0, 1.0).is_ok());
    }
}
