use crate::circuit::DeviceModel;
use crate::error::{invalid, Result};

/// Exponents this close to 2 are treated as a quadratic transfer.
const QUADRATIC_TOL: f64 = 0.05;

/// Power-law fit `u_out = K u_in^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConversionFit {
    /// Conversion constant. For a quadratic fit this is the mean of
    /// `u_out / u_in^2`; otherwise the power-law prefactor.
    pub k: f64,
    pub exponent: f64,
    /// False when the fitted exponent is not close to 2.
    pub quadratic: bool,
}

/// Least-squares line through `(ln u_in, ln u_out)`.
pub fn fit_conversion_constant(pairs: &[(f64, f64)]) -> Result<ConversionFit> {
    if pairs.len() < 3 {
        return Err(invalid("conversion fit needs at least three points"));
    }
    if pairs.iter().any(|&(u, v)| !(u > 0.0 && v > 0.0 && u.is_finite() && v.is_finite())) {
        return Err(invalid("conversion fit needs strictly positive input and output voltages"));
    }
    let mut inputs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    inputs.sort_by(f64::total_cmp);
    if inputs.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("conversion fit needs distinct input voltages"));
    }

    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let exponent = sxy / sxx;
    let quadratic = (exponent - 2.0).abs() <= QUADRATIC_TOL;
    let k = if quadratic {
        pairs.iter().map(|&(u, v)| v / (u * u)).sum::<f64>() / n
    } else {
        (y_mean - exponent * x_mean).exp()
    };
    Ok(ConversionFit {
        k,
        exponent,
        quadratic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub u_in: f64,
    pub u_h: f64,
    pub u_out: f64,
}

impl SweepPoint {
    /// `u_out / u_in^2`, undefined at zero input.
    pub fn conversion_constant(&self) -> Option<f64> {
        (self.u_in != 0.0).then(|| self.u_out / (self.u_in * self.u_in))
    }
}

pub fn dc_sweep(model: &DeviceModel, u_values: &[f64]) -> Result<Vec<SweepPoint>> {
    u_values
        .iter()
        .map(|&u_in| {
            let op = model.dc_operating_point(u_in)?;
            Ok(SweepPoint {
                u_in,
                u_h: op.u_h,
                u_out: op.u_out,
            })
        })
        .collect()
}

/// Linear temperature coefficient from two resistance readings.
pub fn heater_tcc_two_point(r_low: f64, t_low: f64, r_high: f64, t_high: f64) -> Result<f64> {
    if t_high == t_low {
        return Err(invalid("the two temperatures must differ"));
    }
    if !(r_low > 0.0) {
        return Err(invalid("reference resistance must be > 0"));
    }
    Ok((r_high / r_low - 1.0) / (t_high - t_low))
}

/// Seebeck coefficient that closes `alpha_K = alpha_lambda - alpha_R - alpha_S`.
pub fn seebeck_tcc_from_balance(alpha_k: f64, alpha_lambda: f64, alpha_r: f64) -> f64 {
    alpha_lambda - alpha_r - alpha_k
}

/// Conversion constant `u_out / u_in^2` at each ambient offset (K above `T0`).
pub fn temperature_sweep(
    model: &DeviceModel,
    ambient_offsets: &[f64],
    u_in: f64,
) -> Result<Vec<(f64, f64)>> {
    if u_in == 0.0 || !u_in.is_finite() {
        return Err(invalid("temperature sweep needs a finite nonzero drive voltage"));
    }
    ambient_offsets
        .iter()
        .map(|&offset| {
            let shifted = DeviceModel {
                ambient_offset: offset,
                ..model.clone()
            };
            let op = shifted.dc_operating_point(u_in)?;
            Ok((offset, op.u_out / (u_in * u_in)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauer::{CauerLadder, CauerStage};
    use approx::assert_relative_eq;

    fn model() -> DeviceModel {
        let ladder = CauerLadder::new(vec![
            CauerStage { shunt_capacitance: 29.2e-9, series_resistance: 18_310.0 },
            CauerStage { shunt_capacitance: 44.6e-9, series_resistance: 32_550.0 },
        ])
        .unwrap();
        DeviceModel::linear(670.01, 12, 9.803e-5, ladder)
    }

    fn quadratic(k: f64) -> Vec<(f64, f64)> {
        (1..=6).map(|i| 0.1 * i as f64).map(|u| (u, k * u * u)).collect()
    }

    #[test]
    fn exact_quadratic_fits() {
        for k in [0.0893, 0.0857] {
            let fit = fit_conversion_constant(&quadratic(k)).unwrap();
            assert_relative_eq!(fit.k, k, max_relative = 1e-12);
            assert_relative_eq!(fit.exponent, 2.0, epsilon = 1e-12);
            assert!(fit.quadratic);
        }
    }

    #[test]
    fn constant_data_flagged() {
        let pairs: Vec<(f64, f64)> = (1..=4).map(|i| (i as f64, 0.3)).collect();
        let fit = fit_conversion_constant(&pairs).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
        assert!(!fit.quadratic);
        assert_relative_eq!(fit.k, 0.3, max_relative = 1e-12);
    }

    #[test]
    fn fit_rejects_bad_data() {
        assert!(fit_conversion_constant(&[(1.0, 1.0), (2.0, 4.0)]).is_err());
        assert!(fit_conversion_constant(&[(0.0, 1.0), (1.0, 1.0), (2.0, 4.0)]).is_err());
        assert!(fit_conversion_constant(&[(1.0, -1.0), (1.5, 1.0), (2.0, 4.0)]).is_err());
        assert!(fit_conversion_constant(&[(1.0, 1.0), (1.0, 1.1), (2.0, 4.0)]).is_err());
    }

    #[test]
    fn sweep_of_linear_model() {
        let m = model();
        assert!(dc_sweep(&m, &[]).unwrap().is_empty());
        let inputs: Vec<f64> = (0..=6).map(|i| 0.1 * i as f64).collect();
        let pts = dc_sweep(&m, &inputs).unwrap();
        let k = 12.0 * 9.803e-5 * 50_860.0 / 670.01;
        for p in &pts {
            assert_relative_eq!(p.u_out, k * p.u_in * p.u_in, max_relative = 1e-12);
        }
        assert!(pts[0].conversion_constant().is_none());
        assert!((pts[5].conversion_constant().unwrap() / 0.0893 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn sweep_is_even() {
        let m = model();
        let pts = dc_sweep(&m, &[-0.4, 0.4]).unwrap();
        assert_eq!(pts[0].u_out, pts[1].u_out);
    }

    #[test]
    fn two_point_heater_coefficient() {
        let a = heater_tcc_two_point(670.01, 10.0, 726.18, 90.0).unwrap();
        assert!((a - 0.00105).abs() < 1e-5);
        assert_eq!(heater_tcc_two_point(100.0, 20.0, 100.0, 70.0).unwrap(), 0.0);
        let r = |t: f64| 250.0 * (1.0 + 0.002 * (t - 25.0));
        assert_relative_eq!(heater_tcc_two_point(r(25.0), 25.0, r(85.0), 85.0).unwrap(), 0.002, max_relative = 1e-12);
        assert!(heater_tcc_two_point(100.0, 20.0, 110.0, 20.0).is_err());
        assert!(heater_tcc_two_point(0.0, 20.0, 110.0, 30.0).is_err());
    }

    #[test]
    fn seebeck_balance() {
        assert_relative_eq!(seebeck_tcc_from_balance(-0.00041, 0.00177, 0.00105), 0.00113, epsilon = 1e-15);
        assert_eq!(seebeck_tcc_from_balance(0.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn temperature_sweep_trends() {
        let flat = temperature_sweep(&model(), &[-20.0, 0.0, 40.0], 0.3).unwrap();
        assert!(flat.iter().all(|&(_, k)| (k - flat[0].1).abs() < 1e-15));

        let nonlinear = DeviceModel {
            alpha_r: 0.00105,
            alpha_s: 0.00113,
            alpha_lambda: 0.00177,
            ..model()
        };
        let offsets: Vec<f64> = (0..=8).map(|i| 10.0 * i as f64).collect();
        let ks = temperature_sweep(&nonlinear, &offsets, 0.1).unwrap();
        assert!(ks.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(temperature_sweep(&nonlinear, &offsets, 0.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn balance_closes(a_s in -0.01f64..0.01, a_l in -0.01f64..0.01, a_r in -0.01f64..0.01) {
                let a_k = a_l - a_r - a_s;
                prop_assert!((seebeck_tcc_from_balance(a_k, a_l, a_r) - a_s).abs() < 1e-15);
            }

            #[test]
            fn linear_sweep_is_quadratic(scale in 0.05f64..1.5) {
                let inputs: Vec<f64> = (1..=7).map(|i| scale * i as f64 / 7.0).collect();
                let pts = dc_sweep(&model(), &inputs).unwrap();
                let pairs: Vec<(f64, f64)> = pts.iter().map(|p| (p.u_in, p.u_out)).collect();
                let fit = fit_conversion_constant(&pairs).unwrap();
                prop_assert!((fit.exponent - 2.0).abs() < 0.005);
            }
        }
    }
}
