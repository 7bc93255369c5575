//! From geometry and material to rates and cascade parameters.

use serde::Serialize;

use crate::cascade::{CascadeParams, Channel, ChannelParams, KappaForm};
use crate::config::{CascadeInputs, Config, GeometryConfig, MaterialModel};
use crate::error::Result;
use crate::mie::{dipole_peak, scaled_ldos};
use crate::rates::{coupling_strength, free_space_decay, larmor_radiative_decay, plasmon_linewidth, RateSet};
use crate::units;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Model {
    pub geometry: GeometryConfig,
    pub rates: RateSet,
    pub params: CascadeParams,
    pub warnings: Vec<String>,
}

/// QD centre energy: the configured value, or the dipole LDOS peak of the
/// reference geometry.
pub fn centre_energy(material: &MaterialModel, inputs: &CascadeInputs) -> Result<f64> {
    match inputs.omega0 {
        Some(w) => Ok(w),
        None => {
            let (r, h) = inputs.reference;
            let g = GeometryConfig::new(r, h, 0.0)?;
            dipole_peak(&g, material, inputs.n_max)
        }
    }
}

pub fn build_model(
    geometry: &GeometryConfig,
    material: &MaterialModel,
    inputs: &CascadeInputs,
    omega0: f64,
) -> Result<Model> {
    let n_max = inputs.n_max;
    let mut warnings = Vec::new();
    if !geometry.markov_valid() {
        warnings.push(format!(
            "h/R = {:.4} below the Markovian bound {:.3} for R = {:.3} nm",
            geometry.h_over_r(),
            crate::config::markov_bound(units::to_nm(geometry.radius)),
            units::to_nm(geometry.radius)
        ));
    }

    let eps_b = material.eps_b;
    let gamma0_ex = free_space_decay(geometry.dipole, omega0, eps_b);
    let gamma_ex = gamma0_ex * scaled_ldos(omega0, geometry, material, n_max)?;
    let gamma_r = larmor_radiative_decay(omega0, geometry.radius, eps_b);
    let kappa = plasmon_linewidth(material, omega0, geometry.radius);

    let detunings = [inputs.detuning_x, inputs.detuning_y];
    let mut g = [0.0; 2];
    for a in Channel::BOTH {
        let exciton = omega0 + if a == Channel::X { 0.5 } else { -0.5 } * inputs.fss;
        let plasmon = exciton - detunings[a.index()];
        let rho = scaled_ldos(plasmon, geometry, material, n_max)?;
        g[a.index()] = coupling_strength(free_space_decay(geometry.dipole, exciton, eps_b), kappa, rho);
    }

    let rates = RateSet {
        gamma_ex,
        gamma_bx: 2.0 * gamma_ex,
        gamma0_ex,
        gamma_r,
        kappa,
        g_ex: g,
        g_bx: g,
    };
    if !rates.weak_coupling() {
        warnings.push(format!(
            "weak-coupling condition violated: kappa = {:.4} meV, max(g, gamma_ex) = {:.4} meV",
            units::to_mev(kappa),
            units::to_mev(g[0].max(g[1]).max(gamma_ex))
        ));
    }

    let channel = |a: Channel| ChannelParams {
        detuning: detunings[a.index()],
        dephasing: inputs.dephasing,
        kappa,
        g_ex: g[a.index()],
        g_bx: g[a.index()],
    };
    let params = CascadeParams {
        omega0,
        fss: inputs.fss,
        binding: inputs.binding,
        biexciton_dephasing: inputs.dephasing,
        gamma_ex,
        gamma_bx: 2.0 * gamma_ex,
        x: channel(Channel::X),
        y: channel(Channel::Y),
        kappa_form: if inputs.paper_literal_kappa {
            KappaForm::PaperLiteral
        } else {
            KappaForm::ChannelConsistent
        },
    };
    params.validate()?;
    Ok(Model {
        geometry: *geometry,
        rates,
        params,
        warnings,
    })
}

impl Config {
    pub fn centre_energy(&self) -> Result<f64> {
        centre_energy(&self.material, &self.inputs)
    }

    pub fn model(&self) -> Result<Model> {
        build_model(&self.geometry, &self.material, &self.inputs, self.centre_energy()?)
    }
}
