//! Biexciton cascade of a quantum dot coupled to the dipole plasmon of a
//! metal nanoparticle.
//!
//! The pipeline runs geometry and material -> Mie LDOS -> decay rates and
//! exciton-plasmon coupling -> closed-form two-photon amplitudes -> spectra
//! and filtered polarisation entanglement. [`bath`] integrates the same
//! cascade in the time domain against a discretised plasmon reservoir and is
//! used to cross-check the closed form.
//!
//! Everything is computed in Hartree atomic units; [`units`] converts at the
//! edges.

pub mod bath;
pub mod cascade;
pub mod config;
pub mod entanglement;
pub mod error;
pub mod mie;
pub mod model;
pub mod par;
pub mod rates;
pub mod special;
pub mod spectra;
pub mod sweep;
pub mod units;

pub use cascade::{amplitude_grid, AmplitudeGrid, Axis, CascadeParams, Channel, FrequencyGrid};
pub use config::{load_config, parse_config, Config, Settings, WindowMode};
pub use entanglement::{filtered_entanglement, FilteredEntanglement, Quadrature, SpectralWindow};
pub use error::{Error, Result};
pub use model::Model;

/// Float formatting used for every CSV written by the tools: 17 significant
/// digits, scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
