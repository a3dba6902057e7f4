//! Dimensionless unit scheme and physical constants.
//!
//! Every physics module works unit-free: velocities in units of c, momenta
//! in m_e c, energies in m_e c², lengths in the reduced electron Compton
//! length r_C = ħ/(m_e c), angular momenta in ħ. In these units the orbit
//! equation e²/r = p v reads α/r = p·v. Conversion to CGS/eV happens only
//! at the reporting boundary, anchored by two constants: the Compton length
//! in cm and the electron rest energy in eV.

use crate::error::{Error, Result};

/// Fine-structure constant (CODATA 2018).
pub const DEFAULT_ALPHA: f64 = 7.2973525693e-3;
/// Proton/electron mass ratio (CODATA 2018).
pub const DEFAULT_PROTON_ELECTRON_MASS_RATIO: f64 = 1836.15267343;
/// Reduced electron Compton length ħ/(m_e c) in cm.
pub const DEFAULT_ELECTRON_COMPTON_LENGTH_CM: f64 = 3.8616e-11;
/// Electron rest energy m_e c² in eV.
pub const DEFAULT_ELECTRON_REST_ENERGY_EV: f64 = 510998.95;

/// Optional overrides for [`UnitSystem::new`]; `None` keeps the default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UnitOverrides {
    pub alpha: Option<f64>,
    pub proton_electron_mass_ratio: Option<f64>,
    pub electron_compton_length_cm: Option<f64>,
    pub electron_rest_energy_ev: Option<f64>,
}

/// Anchors of the dimensionless scheme. Immutable after construction, so a
/// single instance can be shared freely across concurrent evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    alpha: f64,
    proton_electron_mass_ratio: f64,
    electron_compton_length_cm: f64,
    electron_rest_energy_ev: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem {
            alpha: DEFAULT_ALPHA,
            proton_electron_mass_ratio: DEFAULT_PROTON_ELECTRON_MASS_RATIO,
            electron_compton_length_cm: DEFAULT_ELECTRON_COMPTON_LENGTH_CM,
            electron_rest_energy_ev: DEFAULT_ELECTRON_REST_ENERGY_EV,
        }
    }
}

fn check(field: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::InvalidField {
            field,
            value,
            reason: "must be finite",
        });
    }
    if !ok {
        return Err(Error::InvalidField {
            field,
            value,
            reason,
        });
    }
    Ok(value)
}

impl UnitSystem {
    /// Builds a unit system from defaults with `overrides` applied.
    /// Rejects out-of-range values with a message naming the field.
    pub fn new(overrides: &UnitOverrides) -> Result<Self> {
        let alpha = overrides.alpha.unwrap_or(DEFAULT_ALPHA);
        let ratio = overrides
            .proton_electron_mass_ratio
            .unwrap_or(DEFAULT_PROTON_ELECTRON_MASS_RATIO);
        let compton = overrides
            .electron_compton_length_cm
            .unwrap_or(DEFAULT_ELECTRON_COMPTON_LENGTH_CM);
        let rest = overrides
            .electron_rest_energy_ev
            .unwrap_or(DEFAULT_ELECTRON_REST_ENERGY_EV);

        Ok(UnitSystem {
            alpha: check(
                "alpha",
                alpha,
                alpha > 0.0 && alpha < 1.0,
                "must lie in (0, 1)",
            )?,
            proton_electron_mass_ratio: check(
                "proton_electron_mass_ratio",
                ratio,
                ratio > 1.0,
                "must exceed 1",
            )?,
            electron_compton_length_cm: check(
                "electron_compton_length_cm",
                compton,
                compton > 0.0,
                "must be positive",
            )?,
            electron_rest_energy_ev: check(
                "electron_rest_energy_ev",
                rest,
                rest > 0.0,
                "must be positive",
            )?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn proton_electron_mass_ratio(&self) -> f64 {
        self.proton_electron_mass_ratio
    }

    pub fn electron_compton_length_cm(&self) -> f64 {
        self.electron_compton_length_cm
    }

    pub fn electron_rest_energy_ev(&self) -> f64 {
        self.electron_rest_energy_ev
    }

    /// Classical electron radius r_e = α·r_C, in cm.
    pub fn classical_electron_radius_cm(&self) -> f64 {
        self.alpha * self.electron_compton_length_cm
    }

    /// Bohr radius r_B = r_C/α, in cm.
    pub fn bohr_radius_cm(&self) -> f64 {
        self.electron_compton_length_cm / self.alpha
    }

    /// Converts a length in r_C units to cm.
    pub fn length_to_cm(&self, length: f64) -> Result<f64> {
        finite("length", length)?;
        Ok(length * self.electron_compton_length_cm)
    }

    /// Converts a length in cm to r_C units.
    pub fn length_from_cm(&self, cm: f64) -> Result<f64> {
        finite("length_cm", cm)?;
        Ok(cm / self.electron_compton_length_cm)
    }

    /// Converts an energy in m_e c² units to eV.
    pub fn energy_to_ev(&self, energy: f64) -> Result<f64> {
        finite("energy", energy)?;
        Ok(energy * self.electron_rest_energy_ev)
    }
}

fn finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidField {
            field,
            value,
            reason: "must be finite",
        })
    }
}
