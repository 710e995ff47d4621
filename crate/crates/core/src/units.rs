//! Unit conventions and element-to-energy conversions.
//!
//! Energies are stored as frequencies in GHz (E/h), times in ns. The only
//! place an ordinary frequency becomes an angular one is [`angular`].

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Elementary charge (C), exact SI value.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant (J s), exact SI value.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = PLANCK / (2.0 * PI);

const FEMTO: f64 = 1e-15;
const NANO: f64 = 1e-9;
const GIGA: f64 = 1e9;

/// Angular frequency (rad/ns) of an ordinary frequency given in GHz.
#[inline]
pub fn angular(freq_ghz: f64) -> f64 {
    2.0 * PI * freq_ghz
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {value}")))
    }
}

/// E_C/h in GHz for a total capacitance in fF: e^2 / (2 C h).
pub fn charging_energy_ghz(capacitance_ff: f64) -> Result<f64> {
    let c = positive("capacitance", capacitance_ff)? * FEMTO;
    Ok(ELEMENTARY_CHARGE.powi(2) / (2.0 * c * PLANCK) / GIGA)
}

/// Capacitance in fF giving the requested E_C/h (GHz).
pub fn capacitance_for_charging_energy(e_c_ghz: f64) -> Result<f64> {
    let e_c = positive("e_c", e_c_ghz)? * GIGA;
    Ok(ELEMENTARY_CHARGE.powi(2) / (2.0 * e_c * PLANCK) / FEMTO)
}

/// (hbar / 2e)^2, the flux-quantum prefactor of inductive energies (J H).
pub fn reduced_flux_quantum_squared() -> f64 {
    (HBAR / (2.0 * ELEMENTARY_CHARGE)).powi(2)
}

/// E_L/h in GHz for an inductance in nH: (hbar/2e)^2 / (L h).
pub fn inductive_energy_ghz(inductance_nh: f64) -> Result<f64> {
    let l = positive("inductance", inductance_nh)? * NANO;
    Ok(reduced_flux_quantum_squared() / (l * PLANCK) / GIGA)
}

/// Inductance in nH giving the requested E_L/h (GHz).
pub fn inductance_for_inductive_energy(e_l_ghz: f64) -> Result<f64> {
    let e_l = positive("e_l", e_l_ghz)? * GIGA;
    Ok(reduced_flux_quantum_squared() / (e_l * PLANCK) / NANO)
}

/// Charging energy and inductive energy of one circuit from its elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitEnergies {
    pub e_c: f64,
    pub e_l: f64,
}

/// Converts a (capacitance fF, inductance nH) pair into circuit energies in GHz.
pub fn energies_from_elements(capacitance_ff: f64, inductance_nh: f64) -> Result<CircuitEnergies> {
    Ok(CircuitEnergies {
        e_c: charging_energy_ghz(capacitance_ff)?,
        e_l: inductive_energy_ghz(inductance_nh)?,
    })
}
