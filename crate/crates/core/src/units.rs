//! Hartree atomic units: hbar = 1, 4 pi eps0 = 1, e = 1, energies in Hartree,
//! lengths in Bohr. Config and CSV I/O use eV, meV and nm; everything past the
//! loader works in atomic units.

use serde::Serialize;

pub const HARTREE_EV: f64 = 27.211386245988;
pub const BOHR_NM: f64 = 0.0529177210903;
pub const SPEED_OF_LIGHT: f64 = 137.035999084;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnitSystem {
    pub hartree_ev: f64,
    pub bohr_nm: f64,
    pub c: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem {
            hartree_ev: HARTREE_EV,
            bohr_nm: BOHR_NM,
            c: SPEED_OF_LIGHT,
        }
    }
}

#[inline]
pub fn from_ev(x: f64) -> f64 {
    x / HARTREE_EV
}

#[inline]
pub fn from_mev(x: f64) -> f64 {
    x * 1e-3 / HARTREE_EV
}

#[inline]
pub fn to_ev(x: f64) -> f64 {
    x * HARTREE_EV
}

#[inline]
pub fn to_mev(x: f64) -> f64 {
    x * HARTREE_EV * 1e3
}

#[inline]
pub fn from_nm(x: f64) -> f64 {
    x / BOHR_NM
}

#[inline]
pub fn to_nm(x: f64) -> f64 {
    x * BOHR_NM
}

/// Dipole moment in e*nm to atomic units (e*Bohr).
#[inline]
pub fn from_enm(x: f64) -> f64 {
    x / BOHR_NM
}
