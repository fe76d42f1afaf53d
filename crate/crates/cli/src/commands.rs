//! Command implementations. Each command turns a loaded configuration into
//! an [`Output`]: a CSV table or a netlist.

use std::fmt::Write as _;

use qtc_core::analysis::{
    dc_sweep, harmonic_report, steady_state_spectrum, temperature_sweep, SteadyStateSetup,
};
use qtc_core::netlist::emit_subcircuit;

use crate::config::{DriveKind, ProjectConfig, ThermalSource};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Model(#[from] qtc_core::Error),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Comma-separated, LF-terminated, numbers with 9 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Int(v) => write!(out, "{v}").unwrap(),
                    Cell::Num(v) => write!(out, "{v:.8e}").unwrap(),
                    Cell::Text(v) => out.push_str(v),
                    Cell::Empty => {}
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Table(Table),
    Netlist(String),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Table(t) => t.to_csv(),
            Output::Netlist(s) => s.clone(),
        }
    }
}

/// `steps` evenly spaced points from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CommandError> {
    if !(from.is_finite() && to.is_finite()) {
        return Err(CommandError::Unsupported("sweep bounds must be finite".into()));
    }
    match steps {
        0 => Err(CommandError::Unsupported("--steps must be at least 1".into())),
        1 => Ok(vec![from]),
        n => Ok((0..n)
            .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
            .collect()),
    }
}

fn needs_layers(cfg: &ProjectConfig, command: &str) -> Result<qtc_core::rcline::DistributedLine, CommandError> {
    cfg.distributed_line().ok_or_else(|| {
        CommandError::Unsupported(format!(
            "'{command}' needs a layer stack; this config supplies a [ladder] override"
        ))
    })
}

pub fn params(cfg: &ProjectConfig) -> Table {
    let (r_th, c_th) = match &cfg.thermal {
        ThermalSource::Layers { stack, .. } => (stack.thermal_resistance(), stack.thermal_capacitance()),
        ThermalSource::Ladder(l) => (
            l.dc_resistance(),
            l.stages().iter().map(|s| s.shunt_capacitance).sum(),
        ),
    };
    let m = &cfg.model;
    let k = m.n_couples as f64 * m.seebeck0 * cfg.ladder.dc_resistance() / m.r_heater0;
    let mut t = Table::new(&["quantity", "value", "unit"]);
    for (name, value, unit) in [
        ("r_th", r_th, "K/W"),
        ("c_th", c_th, "J/K"),
        ("alpha_lambda", m.alpha_lambda, "1/K"),
        ("ladder_dc_resistance", cfg.ladder.dc_resistance(), "K/W"),
        ("t_max", m.max_time_constant(), "s"),
        ("t_min", m.min_time_constant(), "s"),
        ("max_step", m.max_step(), "s"),
        ("conversion_constant_linear", k, "1/V"),
    ] {
        t.push(vec![name.into(), value.into(), unit.into()]);
    }
    t
}

pub fn poles(cfg: &ProjectConfig, n: usize) -> Result<Table, CommandError> {
    let line = needs_layers(cfg, "poles")?;
    let mut t = Table::new(&["n", "pole_per_s", "time_constant_s"]);
    for k in 1..=n {
        let p = line.pole(k)?;
        t.push(vec![k.into(), p.magnitude.into(), p.time_constant.into()]);
    }
    Ok(t)
}

pub fn foster(cfg: &ProjectConfig, n: usize) -> Result<Table, CommandError> {
    let line = needs_layers(cfg, "foster")?;
    let network = line.foster_network(n)?;
    let mut t = Table::new(&["n", "r_k_per_w", "c_j_per_k", "time_constant_s"]);
    for (k, st) in network.stages().iter().enumerate() {
        t.push(vec![
            (k + 1).into(),
            st.resistance.into(),
            st.capacitance().into(),
            st.time_constant.into(),
        ]);
    }
    Ok(t)
}

pub fn cauer(cfg: &ProjectConfig) -> Table {
    let mut t = Table::new(&["stage", "c_j_per_k", "r_k_per_w"]);
    for (k, st) in cfg.ladder.stages().iter().enumerate() {
        t.push(vec![
            (k + 1).into(),
            st.shunt_capacitance.into(),
            st.series_resistance.into(),
        ]);
    }
    t
}

pub fn dc_sweep_table(cfg: &ProjectConfig, from: f64, to: f64, steps: usize) -> Result<Table, CommandError> {
    let inputs = linspace(from, to, steps)?;
    let mut t = Table::new(&["u_in_v", "u_h_k", "u_out_v", "k_per_v"]);
    for p in dc_sweep(&cfg.model, &inputs)? {
        let k = p.conversion_constant().map_or(Cell::Empty, Cell::Num);
        t.push(vec![p.u_in.into(), p.u_h.into(), p.u_out.into(), k]);
    }
    Ok(t)
}

pub fn transient(cfg: &ProjectConfig) -> Result<Table, CommandError> {
    let drive = cfg.sim.drive();
    let rec = cfg.model.transient(&drive, cfg.sim.dt, cfg.sim.duration)?;
    let mut t = Table::new(&["t_s", "u_in_v", "u_h_k", "u_out_v"]);
    let dt = rec.hot_point.dt();
    for (i, (&u_h, &u_out)) in rec.hot_point.samples().iter().zip(rec.output.samples()).enumerate() {
        let time = i as f64 * dt;
        t.push(vec![time.into(), drive.voltage(time).into(), u_h.into(), u_out.into()]);
    }
    Ok(t)
}

pub fn spectrum(cfg: &ProjectConfig, harmonics: Option<&[usize]>) -> Result<Table, CommandError> {
    let sim = &cfg.sim;
    if sim.drive != DriveKind::Sine {
        return Err(CommandError::Unsupported("'spectrum' needs drive = sine in [sim]".into()));
    }
    if sim.offset != 0.0 {
        return Err(CommandError::Unsupported("'spectrum' does not support a nonzero offset_v".into()));
    }
    let setup = SteadyStateSetup {
        amplitude: sim.amplitude,
        frequency: sim.frequency,
        periods: sim.spectrum_periods,
        samples: sim.spectrum_samples,
        window: sim.window,
    };
    let run = steady_state_spectrum(&cfg.model, setup)?;
    let report = harmonic_report(&run.spectrum, sim.frequency, harmonics.unwrap_or(&sim.harmonics))?;
    let mut t = Table::new(&["harmonic", "frequency_hz", "level_db"]);
    for row in report.rows {
        t.push(vec![row.harmonic.into(), row.frequency.into(), row.level_db.into()]);
    }
    Ok(t)
}

pub fn temp_sweep(cfg: &ProjectConfig, from: f64, to: f64, steps: usize, u_in: Option<f64>) -> Result<Table, CommandError> {
    let offsets = linspace(from, to, steps)?;
    let u_in = u_in.unwrap_or(cfg.sim.amplitude);
    let mut t = Table::new(&["offset_k", "ambient_c", "k_per_v"]);
    for (offset, k) in temperature_sweep(&cfg.model, &offsets, u_in)? {
        t.push(vec![offset.into(), (cfg.model.t0 + offset).into(), k.into()]);
    }
    Ok(t)
}

pub fn netlist(cfg: &ProjectConfig, name: &str) -> Result<String, CommandError> {
    Ok(emit_subcircuit(&cfg.model, name)?.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_format() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![3usize.into(), 0.1.into(), Cell::Empty]);
        t.push(vec!["x".into(), (-12345.678901234).into(), 0.0.into()]);
        assert_eq!(t.to_csv(), "a,b,c\n3,1.00000000e-1,\nx,-1.23456789e4,0.00000000e0\n");
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.0, 0.6, 7).unwrap();
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[6], 0.6);
        assert!((v[1] - 0.1).abs() < 1e-15);
        assert_eq!(linspace(2.0, 5.0, 1).unwrap(), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_err());
    }
}
