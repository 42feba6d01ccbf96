//! Physical constants and the particle-field coupling factor.
//!
//! Internal computation runs in natural units (`c = hbar = 1`). The SI record
//! only exists so the command line can convert user input and results.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{PfError, Result};

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT_SI: f64 = 2.997_924_58e8;
/// Reduced Planck constant, J s (CODATA 2018).
pub const HBAR_SI: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    Natural,
    Si,
}

/// Optional overrides applied on top of the base unit system.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantOverrides {
    pub c: Option<f64>,
    pub hbar: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    c: f64,
    hbar: f64,
    h: f64,
    unit_system: UnitSystem,
}

impl Constants {
    pub fn natural() -> Self {
        Self::build(1.0, 1.0, UnitSystem::Natural)
    }

    pub fn si() -> Self {
        Self::build(SPEED_OF_LIGHT_SI, HBAR_SI, UnitSystem::Si)
    }

    fn build(c: f64, hbar: f64, unit_system: UnitSystem) -> Self {
        Constants {
            c,
            hbar,
            h: TAU * hbar,
            unit_system,
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn unit_system(&self) -> UnitSystem {
        self.unit_system
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::natural()
    }
}

/// Build a consistent [`Constants`] record.
///
/// Natural units pin `c = hbar = 1` and ignore overrides of either; an SI
/// record accepts positive overrides.
pub fn make_constants(system: UnitSystem, overrides: ConstantOverrides) -> Result<Constants> {
    for (name, value) in [("c", overrides.c), ("hbar", overrides.hbar)] {
        if let Some(v) = value {
            if !(v.is_finite() && v > 0.0) {
                return Err(PfError::InvalidConfiguration(format!(
                    "{name} override must be positive and finite, got {v}"
                )));
            }
        }
    }
    Ok(match system {
        UnitSystem::Natural => Constants::natural(),
        UnitSystem::Si => Constants::build(
            overrides.c.unwrap_or(SPEED_OF_LIGHT_SI),
            overrides.hbar.unwrap_or(HBAR_SI),
            UnitSystem::Si,
        ),
    })
}

/// Proportionality factor between the PF kinetic energy and the summed
/// particle and field kinetic energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PfCoupling(f64);

impl PfCoupling {
    pub fn new(g: f64) -> Result<Self> {
        if g.is_finite() && g > 0.0 {
            Ok(PfCoupling(g))
        } else {
            Err(PfError::InvalidArgument(format!(
                "coupling factor must be positive, got {g}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for PfCoupling {
    fn default() -> Self {
        PfCoupling(1.0)
    }
}

/// Conversion between SI quantities and the natural-unit values used
/// internally. Lengths stay in metres; masses and energies become inverse
/// metres, times become metres and speeds become fractions of `c`.
#[derive(Debug, Clone, Copy)]
pub struct SiScale {
    c: f64,
    hbar: f64,
}

impl SiScale {
    pub fn new(constants: &Constants) -> Self {
        SiScale {
            c: constants.c(),
            hbar: constants.hbar(),
        }
    }

    pub fn mass_to_natural(&self, kg: f64) -> f64 {
        kg * self.c / self.hbar
    }

    pub fn energy_to_natural(&self, joules: f64) -> f64 {
        joules / (self.hbar * self.c)
    }

    pub fn energy_from_natural(&self, inv_m: f64) -> f64 {
        inv_m * self.hbar * self.c
    }

    pub fn time_to_natural(&self, s: f64) -> f64 {
        s * self.c
    }

    pub fn time_from_natural(&self, m: f64) -> f64 {
        m / self.c
    }

    pub fn speed_to_natural(&self, m_per_s: f64) -> f64 {
        m_per_s / self.c
    }

    pub fn speed_from_natural(&self, beta: f64) -> f64 {
        beta * self.c
    }

    pub fn force_to_natural(&self, newtons: f64) -> f64 {
        newtons / (self.hbar * self.c)
    }

    pub fn force_from_natural(&self, inv_m2: f64) -> f64 {
        inv_m2 * self.hbar * self.c
    }
}
