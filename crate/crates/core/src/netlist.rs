//! SPICE subcircuit emission.
//!
//! The device is written as a `.subckt` with four terminals (`inp inn` for the
//! heater, `outp outn` for the thermopile) and one internal node per ladder
//! stage, `th1` (hot point) to `thN`. Thermal quantities ride on electrical
//! ones: 1 V is 1 K of temperature rise above the substrate, 1 A is 1 W of
//! heat flow, and the global node `0` is the substrate.
//!
//! Temperature-dependent elements are B-sources (behavioural current
//! sources) whose expressions read `V(th1)`. The thermopile is written in
//! Norton form, a controlled current source across its series resistance, so
//! the open-circuit voltage between `outp` and `outn` equals the Seebeck
//! voltage without an extra internal node.
//!
//! Element templates (6 significant digits, `d.ddddde+XX`):
//!
//! ```text
//! RH   inp inn <R_H0>                                  heater, alpha_R = 0
//! BRH  inp inn I=V(inp,inn)/(<R_H>)                     heater, alpha_R != 0
//! BPH  0 th1 I=V(inp,inn)*V(inp,inn)/(<R_H>)            dissipated power
//! CTk  thk 0 <C_k>
//! RTk  thk th(k+1)|0 <R_k>                              alpha_lambda = 0
//! BRTk thk th(k+1)|0 I=V(thk[,th(k+1)])*(<1-alpha_lambda dT>)/<R_k>
//! BS   outn outp I=(<N>*<S0>*V(th1)[*(1-<alpha_S>*dT)][+<kappa>*V(inp,inn)])/<R_TP>
//! RTP  outp outn <R_TP>
//! ```
//!
//! where `dT` is `V(th1)`, or `(<offset>+V(th1))` for a nonzero ambient offset.

use std::fmt;

use crate::circuit::DeviceModel;
use crate::error::{invalid, Result};

pub const PORTS: [&str; 4] = ["inp", "inn", "outp", "outn"];

#[derive(Debug, Clone, PartialEq)]
pub struct NetlistDocument {
    /// Comment lines, rendered with a leading `* `.
    pub header: Vec<String>,
    pub name: String,
    pub ports: Vec<String>,
    /// Thermal node names, `th1..thN`.
    pub thermal_nodes: Vec<String>,
    pub elements: Vec<String>,
}

impl NetlistDocument {
    /// All node names an element may reference, ground included.
    pub fn declared_nodes(&self) -> Vec<&str> {
        let mut nodes: Vec<&str> = vec!["0"];
        nodes.extend(self.ports.iter().map(String::as_str));
        nodes.extend(self.thermal_nodes.iter().map(String::as_str));
        nodes
    }
}

impl fmt::Display for NetlistDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.header {
            if line.is_empty() {
                writeln!(f, "*")?;
            } else {
                writeln!(f, "* {line}")?;
            }
        }
        writeln!(f, ".subckt {} {}", self.name, self.ports.join(" "))?;
        for line in &self.elements {
            writeln!(f, "{line}")?;
        }
        writeln!(f, ".ends {}", self.name)
    }
}

/// Scientific notation with 6 significant digits and a signed two-digit
/// exponent, e.g. `6.70010e+02`.
pub fn format_number(x: f64) -> String {
    let s = format!("{x:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn emit_subcircuit(model: &DeviceModel, name: &str) -> Result<NetlistDocument> {
    model.validate()?;
    if !valid_name(name) {
        return Err(invalid(format!(
            "subcircuit name '{name}' must start with a letter and contain only letters, digits and '_'"
        )));
    }
    let n = model.ladder.len();
    let thermal_nodes: Vec<String> = (1..=n).map(|k| format!("th{k}")).collect();
    let num = format_number;

    let delta_t = if model.ambient_offset == 0.0 {
        "V(th1)".to_string()
    } else {
        format!("({}+V(th1))", num(model.ambient_offset))
    };
    let heater = if model.alpha_r == 0.0 {
        num(model.r_heater0)
    } else {
        format!("{}*(1+{}*{delta_t})", num(model.r_heater0), num(model.alpha_r))
    };

    let mut elements = vec!["* heater".to_string()];
    if model.alpha_r == 0.0 {
        elements.push(format!("RH inp inn {}", num(model.r_heater0)));
    } else {
        elements.push(format!("BRH inp inn I=V(inp,inn)/({heater})"));
    }
    elements.push(format!("BPH 0 th1 I=V(inp,inn)*V(inp,inn)/({heater})"));

    elements.push("* thermal ladder".to_string());
    for (k, st) in model.ladder.stages().iter().enumerate() {
        let here = &thermal_nodes[k];
        let next = thermal_nodes.get(k + 1).map_or("0", String::as_str);
        elements.push(format!("CT{} {here} 0 {}", k + 1, num(st.shunt_capacitance)));
        if model.alpha_lambda == 0.0 {
            elements.push(format!("RT{} {here} {next} {}", k + 1, num(st.series_resistance)));
        } else {
            let drop = if next == "0" {
                format!("V({here})")
            } else {
                format!("V({here},{next})")
            };
            elements.push(format!(
                "BRT{} {here} {next} I={drop}*(1-{}*{delta_t})/{}",
                k + 1,
                num(model.alpha_lambda),
                num(st.series_resistance)
            ));
        }
    }

    elements.push("* thermopile".to_string());
    let mut seebeck = format!("{}*{}*V(th1)", model.n_couples, num(model.seebeck0));
    if model.alpha_s != 0.0 {
        seebeck.push_str(&format!("*(1-{}*{delta_t})", num(model.alpha_s)));
    }
    if model.coupling != 0.0 {
        seebeck.push_str(&format!("+{}*V(inp,inn)", num(model.coupling)));
    }
    elements.push(format!("BS outn outp I=({seebeck})/{}", num(model.r_thermopile)));
    elements.push(format!("RTP outp outn {}", num(model.r_thermopile)));

    let header = vec![
        format!("{name}: compact electro-thermal model of a quadratic transfer element"),
        "generated by qtcmodel".to_string(),
        String::new(),
        "thermal nodes carry temperature rise above the substrate as voltage:".to_string(),
        "1 V = 1 K, 1 A = 1 W, 1 ohm = 1 K/W, 1 F = 1 J/K; node 0 is the substrate".to_string(),
        format!(
            "T0 = {} degC, ambient offset = {} K",
            num(model.t0),
            num(model.ambient_offset)
        ),
        format!("Cauer ladder: {n} stage(s), hot point th1"),
        format!(
            "alpha_R = {}, alpha_lambda = {}, alpha_S = {} (1/K), kappa = {}",
            num(model.alpha_r),
            num(model.alpha_lambda),
            num(model.alpha_s),
            num(model.coupling)
        ),
    ];

    Ok(NetlistDocument {
        header,
        name: name.to_string(),
        ports: PORTS.iter().map(|p| p.to_string()).collect(),
        thermal_nodes,
        elements,
    })
}
