//! Project configuration: a sectioned `key = value` file.
//!
//! ```ini
//! [layer.polysilicon]          ; one section per layer, in any order
//! thickness_um = 0.8
//! conductivity_w_mk = 29
//! vol_heat_capacity_j_m3k = 1.63e6
//! tcc_per_k = 0.0035
//!
//! [geometry]
//! length_um = 213.8
//! width_um = 150
//! x_over_l = 0.9674
//! foster_stages = 2            ; optional
//!
//! [ladder]                     ; optional, replaces layers + geometry
//! c1_j_per_k = 29.2e-9
//! r1_k_per_w = 18310
//!
//! [device]
//! ...
//!
//! [sim]
//! ...
//! ```
//!
//! The full field table lives in the README. Unknown sections and keys are
//! rejected by name.

use std::collections::BTreeMap;
use std::path::Path;

use ini::{Ini, ParseOption};
use qtc_core::analysis::WindowKind;
use qtc_core::cauer::{foster_to_cauer, CauerLadder, CauerStage};
use qtc_core::circuit::{DeviceModel, Drive};
use qtc_core::layerstack::{Layer, LayerStack};
use qtc_core::rcline::DistributedLine;

const UM: f64 = 1e-6;
const DEFAULT_FOSTER_STAGES: usize = 2;
const DEFAULT_SPECTRUM_PERIODS: usize = 32;
const DEFAULT_SPECTRUM_SAMPLES: usize = 32_768;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: line {line}, column {col}: {msg}")]
    Parse {
        path: String,
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{path}: missing section [{section}]")]
    MissingSection { path: String, section: String },
    #[error("{path}: unknown section [{section}]")]
    UnknownSection { path: String, section: String },
    #[error("{path}: section [{section}] appears more than once")]
    DuplicateSection { path: String, section: String },
    #[error("{path}: [{section}] missing key '{key}'")]
    MissingKey {
        path: String,
        section: String,
        key: String,
    },
    #[error("{path}: [{section}] unknown key '{key}'")]
    UnknownKey {
        path: String,
        section: String,
        key: String,
    },
    #[error("{path}: [{section}] {key}: {msg}")]
    InvalidValue {
        path: String,
        section: String,
        key: String,
        msg: String,
    },
    #[error("{path}: {source}")]
    Model {
        path: String,
        source: qtc_core::Error,
    },
}

/// Where the thermal network comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ThermalSource {
    Layers {
        stack: LayerStack,
        x_over_l: f64,
        foster_stages: usize,
    },
    Ladder(CauerLadder),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveKind {
    Dc,
    Sine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub drive: DriveKind,
    pub amplitude: f64,
    pub frequency: f64,
    pub offset: f64,
    pub window: WindowKind,
    pub harmonics: Vec<usize>,
    pub spectrum_periods: usize,
    pub spectrum_samples: usize,
}

impl SimConfig {
    pub fn drive(&self) -> Drive {
        match self.drive {
            DriveKind::Dc => Drive::Dc {
                level: self.amplitude,
            },
            DriveKind::Sine => Drive::Sine {
                amplitude: self.amplitude,
                frequency: self.frequency,
                offset: self.offset,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectConfig {
    pub thermal: ThermalSource,
    /// Thermal network as simulated.
    pub ladder: CauerLadder,
    pub model: DeviceModel,
    pub sim: SimConfig,
    /// Non-fatal remarks, e.g. ignored sections.
    pub warnings: Vec<String>,
}

impl ProjectConfig {
    pub fn distributed_line(&self) -> Option<DistributedLine> {
        match &self.thermal {
            ThermalSource::Layers { stack, x_over_l, .. } => Some(
                DistributedLine::new(stack.thermal_resistance(), stack.thermal_capacitance(), *x_over_l)
                    .expect("validated at load time"),
            ),
            ThermalSource::Ladder(_) => None,
        }
    }
}

pub fn load_config(path: &Path) -> Result<ProjectConfig, ConfigError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: display.clone(),
        source,
    })?;
    parse_config(&text, &display)
}

/// Parses configuration text; `origin` names the source in diagnostics.
pub fn parse_config(text: &str, origin: &str) -> Result<ProjectConfig, ConfigError> {
    check_line_shapes(text).map_err(|(line, msg)| ConfigError::Parse {
        path: origin.to_string(),
        line,
        col: 1,
        msg,
    })?;
    let opts = ParseOption {
        enabled_escape: false,
        ..ParseOption::default()
    };
    let ini = Ini::load_from_str_opt(text, opts).map_err(|e| ConfigError::Parse {
        path: origin.to_string(),
        line: e.line,
        col: e.col,
        msg: e.msg.to_string(),
    })?;
    Loader { path: origin }.load(&ini)
}

/// Every meaningful line must be a one-line `[section]` header or a
/// `key = value` pair; the INI parser itself is more forgiving than that and
/// would report a stray line far from where it occurs.
fn check_line_shapes(text: &str) -> Result<(), (usize, String)> {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') {
            if !line.contains(']') {
                return Err((i + 1, format!("unterminated section header '{line}'")));
            }
        } else if !line.contains('=') {
            return Err((i + 1, format!("expected 'key = value', found '{line}'")));
        }
    }
    Ok(())
}

struct Loader<'a> {
    path: &'a str,
}

/// One section's key/value pairs, with consumption tracking.
struct Section<'a> {
    path: &'a str,
    name: String,
    values: BTreeMap<String, String>,
}

impl<'a> Section<'a> {
    fn invalid(&self, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError::InvalidValue {
            path: self.path.to_string(),
            section: self.name.clone(),
            key: key.to_string(),
            msg: msg.into(),
        }
    }

    fn take_str(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    fn require_str(&mut self, key: &str) -> Result<String, ConfigError> {
        self.take_str(key).ok_or_else(|| ConfigError::MissingKey {
            path: self.path.to_string(),
            section: self.name.clone(),
            key: key.to_string(),
        })
    }

    fn parse_f64(&self, key: &str, raw: &str) -> Result<f64, ConfigError> {
        let v: f64 = raw
            .parse()
            .map_err(|_| self.invalid(key, format!("'{raw}' is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.invalid(key, "value must be finite"))
        }
    }

    fn parse_usize(&self, key: &str, raw: &str) -> Result<usize, ConfigError> {
        raw.parse()
            .map_err(|_| self.invalid(key, format!("'{raw}' is not a non-negative integer")))
    }

    fn f64(&mut self, key: &str) -> Result<f64, ConfigError> {
        let raw = self.require_str(key)?;
        self.parse_f64(key, &raw)
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.take_str(key) {
            Some(raw) => self.parse_f64(key, &raw),
            None => Ok(default),
        }
    }

    fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.take_str(key).map(|raw| self.parse_f64(key, &raw)).transpose()
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.take_str(key) {
            Some(raw) => self.parse_usize(key, &raw),
            None => Ok(default),
        }
    }

    /// Fails on the first key nobody asked for.
    fn finish(self) -> Result<(), ConfigError> {
        match self.values.into_keys().next() {
            Some(key) => Err(ConfigError::UnknownKey {
                path: self.path.to_string(),
                section: self.name,
                key,
            }),
            None => Ok(()),
        }
    }
}

impl<'a> Loader<'a> {
    fn model_error(&self, source: qtc_core::Error) -> ConfigError {
        ConfigError::Model {
            path: self.path.to_string(),
            source,
        }
    }

    fn load(&self, ini: &Ini) -> Result<ProjectConfig, ConfigError> {
        let mut sections: Vec<Section<'a>> = Vec::new();
        for (name, props) in ini.iter() {
            let Some(name) = name else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(ConfigError::UnknownKey {
                        path: self.path.to_string(),
                        section: "(before first section)".to_string(),
                        key: key.to_string(),
                    });
                }
                continue;
            };
            if sections.iter().any(|s| s.name == name) {
                return Err(ConfigError::DuplicateSection {
                    path: self.path.to_string(),
                    section: name.to_string(),
                });
            }
            let mut values = BTreeMap::new();
            for (key, value) in props.iter() {
                if values.insert(key.to_string(), value.trim().to_string()).is_some() {
                    return Err(ConfigError::InvalidValue {
                        path: self.path.to_string(),
                        section: name.to_string(),
                        key: key.to_string(),
                        msg: "key appears more than once".to_string(),
                    });
                }
            }
            sections.push(Section {
                path: self.path,
                name: name.to_string(),
                values,
            });
        }

        let mut layers = Vec::new();
        let mut geometry = None;
        let mut ladder = None;
        let mut device = None;
        let mut sim = None;
        for section in sections {
            match section.name.as_str() {
                "geometry" => geometry = Some(section),
                "ladder" => ladder = Some(section),
                "device" => device = Some(section),
                "sim" => sim = Some(section),
                name if name.starts_with("layer.") && name.len() > "layer.".len() => layers.push(section),
                _ => {
                    return Err(ConfigError::UnknownSection {
                        path: self.path.to_string(),
                        section: section.name,
                    })
                }
            }
        }
        let missing = |section: &str| ConfigError::MissingSection {
            path: self.path.to_string(),
            section: section.to_string(),
        };

        let mut warnings = Vec::new();
        let layer_stack = if layers.is_empty() && geometry.is_none() {
            None
        } else {
            let geometry = geometry.ok_or_else(|| missing("geometry"))?;
            if layers.is_empty() {
                return Err(missing("layer.NAME"));
            }
            Some(self.layer_stack(layers, geometry)?)
        };

        let thermal = match (ladder, layer_stack) {
            (Some(section), stack) => {
                if stack.is_some() {
                    warnings.push("[ladder] override present; layer stack and geometry are ignored".to_string());
                }
                ThermalSource::Ladder(self.ladder(section)?)
            }
            (None, Some(thermal)) => thermal,
            (None, None) => return Err(missing("layer.NAME")),
        };
        let ladder = match &thermal {
            ThermalSource::Ladder(l) => l.clone(),
            ThermalSource::Layers {
                stack,
                x_over_l,
                foster_stages,
            } => {
                let line = DistributedLine::new(stack.thermal_resistance(), stack.thermal_capacitance(), *x_over_l)
                    .map_err(|e| self.model_error(e))?;
                let foster = line.foster_network(*foster_stages).map_err(|e| self.model_error(e))?;
                foster_to_cauer(&foster).map_err(|e| self.model_error(e))?
            }
        };

        let model = self.device(device.ok_or_else(|| missing("device"))?, &thermal, ladder.clone())?;
        let sim = self.sim(sim.ok_or_else(|| missing("sim"))?)?;
        Ok(ProjectConfig {
            thermal,
            ladder,
            model,
            sim,
            warnings,
        })
    }

    fn layer_stack(&self, layers: Vec<Section<'a>>, mut geometry: Section<'a>) -> Result<ThermalSource, ConfigError> {
        let mut parsed = Vec::new();
        for mut s in layers {
            let name = s.name["layer.".len()..].to_string();
            let thickness = s.f64("thickness_um")? * UM;
            let conductivity = s.f64("conductivity_w_mk")?;
            let capacity = s.f64("vol_heat_capacity_j_m3k")?;
            let tcc = s.f64("tcc_per_k")?;
            let layer = Layer::new(name, thickness, conductivity, capacity, tcc).map_err(|e| s.invalid("layer", e.to_string()))?;
            s.finish()?;
            parsed.push(layer);
        }
        let length = geometry.f64("length_um")? * UM;
        let width = geometry.f64("width_um")? * UM;
        let x_over_l = geometry.f64("x_over_l")?;
        let foster_stages = geometry.usize_or("foster_stages", DEFAULT_FOSTER_STAGES)?;
        if !(x_over_l > 0.0 && x_over_l <= 1.0) {
            return Err(geometry.invalid("x_over_l", "must lie in (0, 1]"));
        }
        if !(1..=qtc_core::cauer::MAX_STAGES).contains(&foster_stages) {
            return Err(geometry.invalid(
                "foster_stages",
                format!("must lie in 1..={}", qtc_core::cauer::MAX_STAGES),
            ));
        }
        geometry.finish()?;
        let stack = LayerStack::new(parsed, length, width).map_err(|e| self.model_error(e))?;
        Ok(ThermalSource::Layers {
            stack,
            x_over_l,
            foster_stages,
        })
    }

    fn ladder(&self, mut s: Section<'a>) -> Result<CauerLadder, ConfigError> {
        let mut stages = Vec::new();
        for k in 1.. {
            let c_key = format!("c{k}_j_per_k");
            let r_key = format!("r{k}_k_per_w");
            match (s.opt_f64(&c_key)?, s.opt_f64(&r_key)?) {
                (Some(c), Some(r)) => stages.push(CauerStage {
                    shunt_capacitance: c,
                    series_resistance: r,
                }),
                (None, None) => break,
                (Some(_), None) => return Err(s.invalid(&r_key, format!("missing partner of {c_key}"))),
                (None, Some(_)) => return Err(s.invalid(&c_key, format!("missing partner of {r_key}"))),
            }
        }
        if stages.is_empty() {
            return Err(ConfigError::MissingKey {
                path: self.path.to_string(),
                section: s.name,
                key: "c1_j_per_k".to_string(),
            });
        }
        s.finish()?;
        CauerLadder::new(stages).map_err(|e| self.model_error(e))
    }

    fn device(&self, mut s: Section<'a>, thermal: &ThermalSource, ladder: CauerLadder) -> Result<DeviceModel, ConfigError> {
        let r_heater0 = s.f64("r_heater_ohm")?;
        let alpha_r = s.f64("alpha_r")?;
        let raw_n = s.require_str("n_thermocouples")?;
        let n_couples: u32 = raw_n
            .parse()
            .map_err(|_| s.invalid("n_thermocouples", format!("'{raw_n}' is not a positive integer")))?;
        let seebeck0 = s.f64("seebeck_v_per_k")?;
        let alpha_s = s.f64("alpha_s")?;
        let coupling = s.f64("coupling_kappa")?;
        let t0 = s.f64("t0_celsius")?;
        let r_thermopile = s.f64("r_thermopile_ohm")?;
        let alpha_lambda = match (s.opt_f64("alpha_lambda")?, thermal) {
            (Some(a), _) => a,
            (None, ThermalSource::Layers { stack, .. }) => stack.effective_lambda_tcc(),
            (None, ThermalSource::Ladder(_)) => 0.0,
        };
        let ambient_offset = s.f64_or("ambient_offset_k", 0.0)?;
        s.finish()?;
        let model = DeviceModel {
            r_heater0,
            alpha_r,
            n_couples,
            seebeck0,
            alpha_s,
            alpha_lambda,
            coupling,
            ladder,
            t0,
            ambient_offset,
            r_thermopile,
        };
        model.validate().map_err(|e| self.model_error(e))?;
        Ok(model)
    }

    fn sim(&self, mut s: Section<'a>) -> Result<SimConfig, ConfigError> {
        let dt = s.f64("dt_s")?;
        let duration = s.f64("duration_s")?;
        let drive = match s.require_str("drive")?.to_ascii_lowercase().as_str() {
            "dc" => DriveKind::Dc,
            "sine" => DriveKind::Sine,
            other => return Err(s.invalid("drive", format!("'{other}' is not one of dc, sine"))),
        };
        let amplitude = s.f64("amplitude_v")?;
        let frequency = s.f64("frequency_hz")?;
        let offset = s.f64_or("offset_v", 0.0)?;
        let raw_window = s.require_str("window")?;
        let window: WindowKind = raw_window
            .parse()
            .map_err(|_| s.invalid("window", format!("'{raw_window}' is not one of rect, hamming, hann, bartlett")))?;
        let raw_harmonics = s.require_str("harmonics")?;
        let harmonics = parse_harmonics(&raw_harmonics).map_err(|msg| s.invalid("harmonics", msg))?;
        let spectrum_periods = s.usize_or("spectrum_periods", DEFAULT_SPECTRUM_PERIODS)?;
        let spectrum_samples = s.usize_or("spectrum_samples", DEFAULT_SPECTRUM_SAMPLES)?;
        if dt <= 0.0 {
            return Err(s.invalid("dt_s", "must be > 0"));
        }
        if duration <= 0.0 {
            return Err(s.invalid("duration_s", "must be > 0"));
        }
        if frequency <= 0.0 {
            return Err(s.invalid("frequency_hz", "must be > 0"));
        }
        s.finish()?;
        Ok(SimConfig {
            dt,
            duration,
            drive,
            amplitude,
            frequency,
            offset,
            window,
            harmonics,
            spectrum_periods,
            spectrum_samples,
        })
    }
}

/// Comma-separated positive harmonic indices, e.g. `1,2,4,6`.
pub fn parse_harmonics(raw: &str) -> Result<Vec<usize>, String> {
    let list: Vec<usize> = raw
        .split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<usize>() {
                Ok(k) if k > 0 => Ok(k),
                _ => Err(format!("'{t}' is not a positive harmonic index")),
            }
        })
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err("no harmonics given".to_string());
    }
    Ok(list)
}
