//! Effective thermal parameters of a layered cantilever.
//!
//! The cantilever is treated as a one-dimensional bar of length `L` whose
//! cross-section is the full layer stack: `A = width * sum(d_i)`. Conductivity,
//! volumetric heat capacity and the conductivity temperature coefficient are
//! all thickness-weighted means over the layers.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub name: String,
    /// Thickness (m).
    pub thickness: f64,
    /// Thermal conductivity (W/(m K)).
    pub conductivity: f64,
    /// Volumetric heat capacity (J/(K m^3)).
    pub vol_heat_capacity: f64,
    /// Relative temperature coefficient of the conductivity (1/K).
    pub conductivity_tcc: f64,
}

impl Layer {
    pub fn new(
        name: impl Into<String>,
        thickness: f64,
        conductivity: f64,
        vol_heat_capacity: f64,
        conductivity_tcc: f64,
    ) -> Result<Self> {
        let layer = Layer {
            name: name.into(),
            thickness,
            conductivity,
            vol_heat_capacity,
            conductivity_tcc,
        };
        layer.validate()?;
        Ok(layer)
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.thickness) {
            return Err(invalid(format!("layer '{}': thickness must be > 0", self.name)));
        }
        if !positive(self.conductivity) {
            return Err(invalid(format!("layer '{}': conductivity must be > 0", self.name)));
        }
        if !positive(self.vol_heat_capacity) {
            return Err(invalid(format!(
                "layer '{}': volumetric heat capacity must be > 0",
                self.name
            )));
        }
        if !self.conductivity_tcc.is_finite() {
            return Err(invalid(format!(
                "layer '{}': conductivity temperature coefficient must be finite",
                self.name
            )));
        }
        Ok(())
    }
}

/// A validated stack of layers with the cantilever's plan dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    layers: Vec<Layer>,
    length: f64,
    width: f64,
}

impl LayerStack {
    pub fn new(layers: Vec<Layer>, length: f64, width: f64) -> Result<Self> {
        if layers.is_empty() {
            return Err(invalid("layer stack must contain at least one layer"));
        }
        for layer in &layers {
            layer.validate()?;
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid("cantilever length must be > 0"));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(invalid("cantilever width must be > 0"));
        }
        let stack = LayerStack {
            layers,
            length,
            width,
        };
        if !(stack.area() > 0.0) {
            return Err(invalid("cross-sectional area is zero"));
        }
        Ok(stack)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    /// Cross-sectional area `width * sum(d_i)` (m^2).
    pub fn area(&self) -> f64 {
        self.width * self.total_thickness()
    }

    fn weighted_mean(&self, value: impl Fn(&Layer) -> f64) -> f64 {
        let weighted: f64 = self.layers.iter().map(|l| value(l) * l.thickness).sum();
        weighted / self.total_thickness()
    }

    /// Thickness-weighted mean conductivity (W/(m K)).
    pub fn effective_conductivity(&self) -> f64 {
        self.weighted_mean(|l| l.conductivity)
    }

    /// Longitudinal thermal resistance `L / (lambda_eff * A)` (K/W).
    pub fn thermal_resistance(&self) -> f64 {
        self.length / (self.effective_conductivity() * self.area())
    }

    /// Total heat capacity `L * w * sum(C_i d_i)` (J/K).
    pub fn thermal_capacitance(&self) -> f64 {
        self.weighted_mean(|l| l.vol_heat_capacity) * self.length * self.area()
    }

    /// Thickness-weighted conductivity temperature coefficient (1/K).
    pub fn effective_lambda_tcc(&self) -> f64 {
        self.weighted_mean(|l| l.conductivity_tcc)
    }
}
