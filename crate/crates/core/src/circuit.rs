//! Electro-thermal equivalent circuit of the QTC element.
//!
//! The heater dissipates `U_in^2 / R_H` into the driven node of a Cauer
//! ladder; the ladder node voltages are temperature rises above the
//! substrate. The thermopile turns the hot-point rise `U_H` (node 1) into
//! the output voltage. Three linear temperature coefficients make the model
//! nonlinear, all evaluated at `T - T0 = ambient_offset + U_H`:
//!
//! * heater:      `R_H = R_H0 (1 + alpha_R dT)`
//! * conduction:  every ladder resistance is divided by `1 - alpha_lambda dT`
//! * thermopile:  `U_S = N S0 U_H (1 - alpha_S dT) + kappa U_in`
//!
//! `kappa` is the parasitic feed-through from the input wiring.

use std::f64::consts::PI;

use crate::analysis::Waveform;
use crate::cauer::CauerLadder;
use crate::error::{invalid, Error, Result};

const DC_DAMPING: f64 = 0.5;
const DC_TOLERANCE: f64 = 1e-12;
const DC_MAX_ITERATIONS: usize = 200;

/// Minimum number of RK4 steps per smallest ladder time constant.
pub const STEPS_PER_TIME_CONSTANT: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceModel {
    /// Heater resistance at `T0` (ohm).
    pub r_heater0: f64,
    /// Heater temperature coefficient (1/K).
    pub alpha_r: f64,
    pub n_couples: u32,
    /// Seebeck coefficient of one couple at `T0` (V/K).
    pub seebeck0: f64,
    /// Seebeck temperature coefficient (1/K).
    pub alpha_s: f64,
    /// Conductivity temperature coefficient (1/K).
    pub alpha_lambda: f64,
    /// Input-to-output feed-through (V/V).
    pub coupling: f64,
    pub ladder: CauerLadder,
    /// Reference temperature (degC).
    pub t0: f64,
    /// `T_amb - T0` (K).
    pub ambient_offset: f64,
    /// Thermopile series resistance (ohm); only used for netlists.
    pub r_thermopile: f64,
}

/// Solved DC state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Hot-point temperature rise (K).
    pub u_h: f64,
    /// Open-circuit output voltage (V).
    pub u_out: f64,
}

/// Heater drive voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    Dc { level: f64 },
    Sine { amplitude: f64, frequency: f64, offset: f64 },
}

impl Drive {
    pub fn sine(amplitude: f64, frequency: f64) -> Self {
        Drive::Sine {
            amplitude,
            frequency,
            offset: 0.0,
        }
    }

    pub fn voltage(&self, t: f64) -> f64 {
        match *self {
            Drive::Dc { level } => level,
            Drive::Sine {
                amplitude,
                frequency,
                offset,
            } => offset + amplitude * (2.0 * PI * frequency * t).sin(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Drive::Dc { level } if !level.is_finite() => Err(invalid("drive level must be finite")),
            Drive::Sine {
                amplitude,
                frequency,
                offset,
            } => {
                if !(frequency.is_finite() && frequency > 0.0) {
                    Err(invalid("sine drive frequency must be > 0"))
                } else if !amplitude.is_finite() || !offset.is_finite() {
                    Err(invalid("sine drive amplitude and offset must be finite"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Sampled transient: hot-point rise (K) and output voltage (V).
#[derive(Debug, Clone, PartialEq)]
pub struct TransientRecord {
    pub hot_point: Waveform,
    pub output: Waveform,
}

enum Source<'a> {
    Heater(&'a Drive),
    Power(f64),
}

impl DeviceModel {
    /// A model with every temperature coefficient and the coupling set to zero.
    pub fn linear(r_heater0: f64, n_couples: u32, seebeck0: f64, ladder: CauerLadder) -> Self {
        DeviceModel {
            r_heater0,
            alpha_r: 0.0,
            n_couples,
            seebeck0,
            alpha_s: 0.0,
            alpha_lambda: 0.0,
            coupling: 0.0,
            ladder,
            t0: 25.0,
            ambient_offset: 0.0,
            r_thermopile: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_heater0.is_finite() && self.r_heater0 > 0.0) {
            return Err(invalid("heater resistance must be > 0"));
        }
        if self.n_couples == 0 {
            return Err(invalid("thermopile needs at least one couple"));
        }
        if !(self.seebeck0.is_finite() && self.seebeck0 > 0.0) {
            return Err(invalid("Seebeck coefficient must be > 0"));
        }
        if !(self.r_thermopile.is_finite() && self.r_thermopile > 0.0) {
            return Err(invalid("thermopile resistance must be > 0"));
        }
        let finite = [
            self.alpha_r,
            self.alpha_s,
            self.alpha_lambda,
            self.coupling,
            self.t0,
            self.ambient_offset,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(invalid("temperature coefficients, coupling and temperatures must be finite"));
        }
        Ok(())
    }

    pub fn is_linear(&self) -> bool {
        self.alpha_r == 0.0 && self.alpha_s == 0.0 && self.alpha_lambda == 0.0
    }

    /// Temperature argument `T - T0` seen by every coefficient.
    fn delta_t(&self, u_h: f64) -> f64 {
        self.ambient_offset + u_h
    }

    pub fn heater_resistance(&self, u_h: f64) -> Result<f64> {
        let r = self.r_heater0 * (1.0 + self.alpha_r * self.delta_t(u_h));
        if r > 0.0 {
            Ok(r)
        } else {
            Err(Error::ModelRange(format!(
                "heater resistance {r:e} ohm at a temperature rise of {u_h} K"
            )))
        }
    }

    pub fn input_power(&self, u_in: f64, u_h: f64) -> Result<f64> {
        Ok(u_in * u_in / self.heater_resistance(u_h)?)
    }

    /// Open-circuit thermopile voltage including the input feed-through.
    pub fn output_voltage(&self, u_h: f64, u_in: f64) -> f64 {
        self.n_couples as f64 * self.seebeck0 * u_h * (1.0 - self.alpha_s * self.delta_t(u_h))
            + self.coupling * u_in
    }

    /// `1 - alpha_lambda dT`, the factor applied to every ladder conductance.
    pub fn conductance_factor(&self, u_h: f64) -> Result<f64> {
        let f = 1.0 - self.alpha_lambda * self.delta_t(u_h);
        if f > 0.0 {
            Ok(f)
        } else {
            Err(Error::ModelRange(format!(
                "conductivity factor {f:e} is not positive at a temperature rise of {u_h} K"
            )))
        }
    }

    pub fn dc_operating_point(&self, u_in: f64) -> Result<OperatingPoint> {
        self.validate()?;
        let r_dc = self.ladder.dc_resistance();
        let u_h = if self.is_linear() {
            u_in * u_in / self.r_heater0 * r_dc
        } else {
            let rise = |u: f64| -> Result<f64> {
                Ok(self.input_power(u_in, u)? * r_dc / self.conductance_factor(u)?)
            };
            let mut u = 0.0;
            let mut converged = None;
            let mut last_step = f64::INFINITY;
            for _ in 0..DC_MAX_ITERATIONS {
                let next = (1.0 - DC_DAMPING) * u + DC_DAMPING * rise(u)?;
                last_step = (next - u).abs();
                u = next;
                if !u.is_finite() {
                    break;
                }
                if last_step < DC_TOLERANCE {
                    converged = Some(u);
                    break;
                }
            }
            match converged {
                Some(u) => u,
                None => {
                    return Err(Error::Convergence {
                        iterations: DC_MAX_ITERATIONS,
                        last_step,
                    })
                }
            }
        };
        Ok(OperatingPoint {
            u_h,
            u_out: self.output_voltage(u_h, u_in),
        })
    }

    /// Smallest natural time constant of the (unscaled) ladder.
    pub fn min_time_constant(&self) -> f64 {
        *self.ladder.time_constants().last().expect("ladder is never empty")
    }

    pub fn max_time_constant(&self) -> f64 {
        self.ladder.time_constants()[0]
    }

    /// Largest step accepted by [`transient`](Self::transient).
    pub fn max_step(&self) -> f64 {
        self.min_time_constant() / STEPS_PER_TIME_CONSTANT
    }

    /// Fixed-step RK4 integration from the all-zero state.
    ///
    /// Samples are taken at every step, including `t = 0`, so the record holds
    /// `round(duration / dt) + 1` points.
    pub fn transient(&self, drive: &Drive, dt: f64, duration: f64) -> Result<TransientRecord> {
        drive.validate()?;
        let (hot, out) = self.integrate(Source::Heater(drive), dt, duration)?;
        Ok(TransientRecord {
            hot_point: Waveform::new(dt, hot)?,
            output: Waveform::new(dt, out)?,
        })
    }

    /// Hot-point response to a constant power step injected straight into
    /// the driven node.
    pub fn step_response(&self, power: f64, dt: f64, duration: f64) -> Result<Waveform> {
        if !power.is_finite() {
            return Err(invalid("step power must be finite"));
        }
        let (hot, _) = self.integrate(Source::Power(power), dt, duration)?;
        Waveform::new(dt, hot)
    }

    fn integrate(&self, source: Source<'_>, dt: f64, duration: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        self.validate()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("time step must be > 0"));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(invalid("duration must be > 0"));
        }
        let max_step = self.max_step();
        if dt > max_step * (1.0 + 1e-9) {
            return Err(invalid(format!(
                "time step {dt:e} s exceeds the stability bound {max_step:e} s (t_min / {STEPS_PER_TIME_CONSTANT})"
            )));
        }
        let steps = (duration / dt).round() as usize;
        if steps == 0 {
            return Err(invalid("duration is shorter than one time step"));
        }

        let nodes = self.ladder.len();
        let input = |t: f64| match source {
            Source::Heater(drive) => drive.voltage(t),
            Source::Power(_) => 0.0,
        };
        let deriv = |t: f64, u: &[f64], du: &mut [f64]| -> Result<()> {
            let injected = match source {
                Source::Heater(drive) => self.input_power(drive.voltage(t), u[0])?,
                Source::Power(p) => p,
            };
            let g_scale = self.conductance_factor(u[0])?;
            let mut inflow = injected;
            for (k, st) in self.ladder.stages().iter().enumerate() {
                let next = if k + 1 < nodes { u[k + 1] } else { 0.0 };
                let outflow = (u[k] - next) * g_scale / st.series_resistance;
                du[k] = (inflow - outflow) / st.shunt_capacitance;
                inflow = outflow;
            }
            Ok(())
        };

        let mut hot = Vec::with_capacity(steps + 1);
        let mut out = Vec::with_capacity(steps + 1);
        let mut u = vec![0.0; nodes];
        let (mut k1, mut k2, mut k3, mut k4) = (
            vec![0.0; nodes],
            vec![0.0; nodes],
            vec![0.0; nodes],
            vec![0.0; nodes],
        );
        let mut tmp = vec![0.0; nodes];
        hot.push(u[0]);
        out.push(self.output_voltage(u[0], input(0.0)));

        for step in 0..steps {
            let t = step as f64 * dt;
            deriv(t, &u, &mut k1)?;
            for i in 0..nodes {
                tmp[i] = u[i] + 0.5 * dt * k1[i];
            }
            deriv(t + 0.5 * dt, &tmp, &mut k2)?;
            for i in 0..nodes {
                tmp[i] = u[i] + 0.5 * dt * k2[i];
            }
            deriv(t + 0.5 * dt, &tmp, &mut k3)?;
            for i in 0..nodes {
                tmp[i] = u[i] + dt * k3[i];
            }
            deriv(t + dt, &tmp, &mut k4)?;
            for i in 0..nodes {
                u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            let t_next = (step + 1) as f64 * dt;
            if u.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { time: t_next });
            }
            hot.push(u[0]);
            out.push(self.output_voltage(u[0], input(t_next)));
        }
        Ok((hot, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauer::CauerStage;
    use approx::assert_relative_eq;

    fn printed_ladder() -> CauerLadder {
        CauerLadder::new(vec![
            CauerStage { shunt_capacitance: 29.2e-9, series_resistance: 18_310.0 },
            CauerStage { shunt_capacitance: 44.6e-9, series_resistance: 32_550.0 },
        ])
        .unwrap()
    }

    fn linear_model() -> DeviceModel {
        DeviceModel::linear(670.01, 12, 9.803e-5, printed_ladder())
    }

    fn nonlinear_model() -> DeviceModel {
        DeviceModel {
            alpha_r: 0.00105,
            alpha_s: 0.00113,
            alpha_lambda: 0.00177,
            t0: 10.0,
            ..linear_model()
        }
    }

    #[test]
    fn heater_resistance() {
        let mut m = linear_model();
        assert_eq!(m.heater_resistance(42.0).unwrap(), 670.01);
        m.alpha_r = 0.00105;
        m.ambient_offset = 80.0;
        let r = m.heater_resistance(0.0).unwrap();
        assert!((r / 726.3 - 1.0).abs() < 1e-3);
        assert!((r / 726.18 - 1.0).abs() < 1e-3);

        let mut m = linear_model();
        m.r_heater0 = 100.0;
        m.alpha_r = 0.001;
        assert_relative_eq!(m.heater_resistance(10.0).unwrap(), 101.0, max_relative = 1e-15);
        m.alpha_r = -0.2;
        assert!(matches!(m.heater_resistance(10.0), Err(Error::ModelRange(_))));
    }

    #[test]
    fn input_power() {
        let m = linear_model();
        assert_eq!(m.input_power(0.0, 3.0).unwrap(), 0.0);
        assert_relative_eq!(m.input_power(0.5, 0.0).unwrap(), 3.7313e-4, max_relative = 1e-4);
        assert_eq!(m.input_power(-0.7, 1.0).unwrap(), m.input_power(0.7, 1.0).unwrap());
    }

    #[test]
    fn output_voltage() {
        let mut m = linear_model();
        assert_eq!(m.output_voltage(0.0, 0.3), 0.0);
        assert_relative_eq!(m.output_voltage(18.978, 0.0), 22.33e-3, max_relative = 1e-3);
        m.coupling = 0.01;
        assert_relative_eq!(m.output_voltage(0.0, 1.0), 0.01, max_relative = 1e-15);
    }

    #[test]
    fn linear_operating_point() {
        let m = linear_model();
        let zero = m.dc_operating_point(0.0).unwrap();
        assert_eq!((zero.u_h, zero.u_out), (0.0, 0.0));

        let op = m.dc_operating_point(0.5).unwrap();
        assert_relative_eq!(op.u_h, 0.25 / 670.01 * 50_860.0, max_relative = 1e-14);
        assert!((op.u_h - 18.98).abs() < 0.01);
        assert!((op.u_out / 22.33e-3 - 1.0).abs() < 1e-3);
        assert!((op.u_out / 0.25 / 0.0893 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn nonlinear_fixed_point_is_self_consistent() {
        let m = nonlinear_model();
        let op = m.dc_operating_point(1.0).unwrap();
        let r_dc = m.ladder.dc_resistance();
        let rhs = m.input_power(1.0, op.u_h).unwrap() * r_dc / m.conductance_factor(op.u_h).unwrap();
        assert!((op.u_h - rhs).abs() < 1e-10);
        assert_relative_eq!(op.u_out, m.output_voltage(op.u_h, 1.0));
    }

    #[test]
    fn operating_point_out_of_range() {
        let mut m = nonlinear_model();
        m.alpha_lambda = 0.05;
        assert!(matches!(m.dc_operating_point(1.0), Err(Error::ModelRange(_))));
    }

    #[test]
    fn operating_point_convergence_failure() {
        // gain of the fixed-point map far above one: the iteration runs away
        let mut m = nonlinear_model();
        m.alpha_r = -0.004;
        m.alpha_lambda = 0.0;
        match m.dc_operating_point(1.5) {
            Err(Error::Convergence { .. }) | Err(Error::ModelRange(_)) => {}
            other => panic!("expected a failure, got {other:?}"),
        }
    }

    #[test]
    fn step_bound_enforced() {
        let m = linear_model();
        let bound = m.max_step();
        assert!(m.step_response(1e-3, bound * 1.01, 1e-3).is_err());
        assert!(m.step_response(1e-3, bound, 1e-3).is_ok());
        assert!(m.step_response(1e-3, -1.0, 1e-3).is_err());
    }

    #[test]
    fn zero_drive_stays_zero() {
        let m = nonlinear_model();
        let rec = m.transient(&Drive::Dc { level: 0.0 }, m.max_step(), 5e-3).unwrap();
        assert!(rec.hot_point.samples().iter().all(|&v| v == 0.0));
        assert!(rec.output.samples().iter().all(|&v| v == 0.0));
        let zero = m.step_response(0.0, m.max_step(), 5e-3).unwrap();
        assert!(zero.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn step_settles_to_dc_resistance() {
        let m = linear_model();
        let w = m.step_response(1e-3, m.max_step(), 40e-3).unwrap();
        let last = *w.samples().last().unwrap();
        assert!((last / 50.86 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn dc_transient_settles_to_operating_point() {
        let mut m = nonlinear_model();
        m.alpha_r *= 0.1;
        m.alpha_s *= 0.1;
        m.alpha_lambda *= 0.1;
        let dt = m.max_step();
        let rec = m.transient(&Drive::Dc { level: 0.8 }, dt, 30.0 * m.max_time_constant()).unwrap();
        let op = m.dc_operating_point(0.8).unwrap();
        let settled = *rec.hot_point.samples().last().unwrap();
        assert!((settled - op.u_h).abs() < 1e-6, "{settled} vs {}", op.u_h);
    }

    #[test]
    fn heat_balance_at_steady_state() {
        let m = linear_model();
        let rec = m.transient(&Drive::Dc { level: 0.6 }, m.max_step(), 40e-3).unwrap();
        let u1 = *rec.hot_point.samples().last().unwrap();
        // node 2 follows from the divider u2 = u1 R2 / (R1 + R2)
        let st = m.ladder.stages();
        let u2 = u1 * st[1].series_resistance / m.ladder.dc_resistance();
        let flow = u2 / st[1].series_resistance;
        let p = m.input_power(0.6, 0.0).unwrap();
        assert!((flow / p - 1.0).abs() < 1e-3);
    }

    #[test]
    fn record_length() {
        let m = linear_model();
        let dt = m.max_step();
        let rec = m.transient(&Drive::sine(1.0, 70.0), dt, 100.0 * dt).unwrap();
        assert_eq!(rec.hot_point.len(), 101);
        assert_eq!(rec.output.len(), 101);
        assert_eq!(rec.hot_point.dt(), dt);
    }

    #[test]
    fn invalid_drive() {
        let m = linear_model();
        let bad = Drive::Sine { amplitude: 1.0, frequency: 0.0, offset: 0.0 };
        assert!(m.transient(&bad, m.max_step(), 1e-3).is_err());
    }

    #[test]
    fn divergence_reported() {
        // a strongly negative alpha_lambda makes the conductance factor grow
        // without bound instead of hitting the range check
        let mut m = nonlinear_model();
        m.alpha_lambda = -1e3;
        m.alpha_r = 0.0;
        let res = m.transient(&Drive::Dc { level: 5.0 }, m.max_step(), 0.05);
        assert!(matches!(res, Err(Error::Divergence { .. }) | Err(Error::ModelRange(_))), "{res:?}");
    }
}
