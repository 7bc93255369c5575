//! Decay rates, plasmon linewidth and the weak-coupling QD-plasmon coupling.

use serde::Serialize;

use crate::config::{GeometryConfig, MaterialModel};
use crate::error::Result;
use crate::mie::scaled_ldos;
use crate::units::SPEED_OF_LIGHT;

/// Free-space spontaneous emission rate 4 w^3 d^2 sqrt(eps_b) / (3 c^3).
pub fn free_space_decay(dipole: f64, omega: f64, eps_b: f64) -> f64 {
    let c3 = SPEED_OF_LIGHT.powi(3);
    4.0 * omega.powi(3) * dipole * dipole * eps_b.sqrt() / (3.0 * c3)
}

pub fn qd_decay_rate(omega: f64, geometry: &GeometryConfig, material: &MaterialModel, n_max: usize) -> Result<f64> {
    let rho = scaled_ldos(omega, geometry, material, n_max)?;
    Ok(free_space_decay(geometry.dipole, omega, material.eps_b) * rho)
}

/// Larmor radiative damping of the dipole plasmon, 2 w0^4 eps_b^2 R^3 / (c^3 (2 eps_b + 1)).
pub fn larmor_radiative_decay(omega0: f64, radius: f64, eps_b: f64) -> f64 {
    2.0 * omega0.powi(4) * eps_b * eps_b * radius.powi(3) / (SPEED_OF_LIGHT.powi(3) * (2.0 * eps_b + 1.0))
}

pub fn plasmon_linewidth(material: &MaterialModel, omega0: f64, radius: f64) -> f64 {
    material.gamma + larmor_radiative_decay(omega0, radius, material.eps_b)
}

/// g = sqrt(gamma0 kappa rho) / 2.
pub fn coupling_strength(gamma0: f64, kappa: f64, scaled_ldos: f64) -> f64 {
    0.5 * (gamma0 * kappa * scaled_ldos).max(0.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateSet {
    pub gamma_ex: f64,
    pub gamma_bx: f64,
    pub gamma0_ex: f64,
    pub gamma_r: f64,
    pub kappa: f64,
    /// x then y.
    pub g_ex: [f64; 2],
    pub g_bx: [f64; 2],
}

impl RateSet {
    /// Weak coupling means kappa well above g and gamma_ex.
    pub fn weak_coupling(&self) -> bool {
        let g = self.g_ex[0].max(self.g_ex[1]);
        self.kappa >= 5.0 * g.max(self.gamma_ex)
    }
}
