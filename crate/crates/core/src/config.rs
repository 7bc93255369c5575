//! Validated parameter sets and the flat `key = value` config format.
//!
//! [`Settings`] holds values in the units the user typed (nm, eV, meV) so a
//! snapshot written back out reproduces the run exactly. [`Settings::resolve`]
//! converts to atomic units and checks every invariant.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{self, UnitSystem};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaterialModel {
    pub eps_inf: f64,
    pub omega_p: f64,
    pub gamma: f64,
    pub eps_b: f64,
}

impl MaterialModel {
    pub fn new(eps_inf: f64, omega_p: f64, gamma: f64, eps_b: f64) -> Result<Self> {
        if !(omega_p > 0.0) {
            return Err(Error::invalid("omega_p", "must be positive"));
        }
        if !(gamma >= 0.0) {
            return Err(Error::invalid("gamma", "must be non-negative"));
        }
        if !(eps_inf >= 1.0) {
            return Err(Error::invalid("eps_inf", "must be >= 1"));
        }
        if !(eps_b >= 1.0) {
            return Err(Error::invalid("eps_b", "must be >= 1"));
        }
        Ok(MaterialModel {
            eps_inf,
            omega_p,
            gamma,
            eps_b,
        })
    }

    /// Silver: eps_inf = 6, omega_p = 7.9 eV, gamma = 51 meV.
    pub fn silver(eps_b: f64) -> Self {
        MaterialModel {
            eps_inf: 6.0,
            omega_p: units::from_ev(7.9),
            gamma: units::from_mev(51.0),
            eps_b,
        }
    }

    /// Drude permittivity with e^{-i w t} time dependence (Im eps >= 0).
    pub fn permittivity(&self, omega: f64) -> Complex64 {
        let w = Complex64::new(omega, 0.0);
        self.eps_inf - self.omega_p * self.omega_p / (w * w + Complex64::new(0.0, self.gamma * omega))
    }

    /// Quasi-static dipole resonance omega_p / sqrt(eps_inf + 2 eps_b).
    pub fn frohlich(&self) -> f64 {
        self.omega_p / (self.eps_inf + 2.0 * self.eps_b).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometryConfig {
    pub radius: f64,
    pub distance: f64,
    pub dipole: f64,
}

impl GeometryConfig {
    /// Radius and surface distance in Bohr, dipole in e*Bohr.
    pub fn new(radius: f64, distance: f64, dipole: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid("radius_nm", "must be positive"));
        }
        if !(distance > 0.0) || !distance.is_finite() {
            return Err(Error::invalid("distance_nm", "must be positive"));
        }
        if !(dipole >= 0.0) {
            return Err(Error::invalid("dipole_enm", "must be non-negative"));
        }
        Ok(GeometryConfig {
            radius,
            distance,
            dipole,
        })
    }

    pub fn from_nm(radius_nm: f64, distance_nm: f64) -> Result<Self> {
        Self::new(
            units::from_nm(radius_nm),
            units::from_nm(distance_nm),
            units::from_enm(0.5),
        )
    }

    /// Emitter radial coordinate r_d = R + h.
    pub fn emitter_radius(&self) -> f64 {
        self.radius + self.distance
    }

    pub fn h_over_r(&self) -> f64 {
        self.distance / self.radius
    }

    pub fn markov_valid(&self) -> bool {
        self.h_over_r() >= markov_bound(units::to_nm(self.radius)) * (1.0 - 1e-12)
    }
}

/// Smallest h/R for which the Markovian treatment holds: 1.4 at R = 7 nm,
/// 1.0 at R = 14 nm, linear in between.
pub fn markov_bound(radius_nm: f64) -> f64 {
    if radius_nm <= 7.0 {
        1.4
    } else if radius_nm >= 14.0 {
        1.0
    } else {
        1.4 - 0.4 * (radius_nm - 7.0) / 7.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowMode {
    Product,
    Single,
}

impl std::str::FromStr for WindowMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product" => Ok(WindowMode::Product),
            "single" => Ok(WindowMode::Single),
            _ => Err(Error::invalid(
                "window_mode",
                format!("expected product or single, got {s:?}"),
            )),
        }
    }
}

impl WindowMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            WindowMode::Product => "product",
            WindowMode::Single => "single",
        }
    }
}

/// QD and cascade inputs in atomic units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CascadeInputs {
    pub fss: f64,
    pub binding: f64,
    pub detuning_x: f64,
    pub detuning_y: f64,
    pub dephasing: f64,
    pub filter_width: f64,
    /// Fixed QD centre energy; `None` means "dipole LDOS peak of the reference geometry".
    pub omega0: Option<f64>,
    pub reference: (f64, f64),
    pub grid_points: usize,
    pub grid_half_span: Option<f64>,
    pub n_max: usize,
    pub paper_literal_kappa: bool,
    pub window_mode: WindowMode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub units: UnitSystem,
    pub geometry: GeometryConfig,
    pub material: MaterialModel,
    pub inputs: CascadeInputs,
    pub settings: Settings,
}

/// User-facing values, in config units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub radius_nm: f64,
    pub distance_nm: f64,
    pub dipole_enm: f64,
    pub eps_inf: f64,
    pub omega_p_ev: f64,
    pub gamma_mev: f64,
    pub eps_b: f64,
    pub delta_xx_mev: f64,
    pub delta_x_mev: f64,
    pub detuning_x_mev: f64,
    pub detuning_y_mev: f64,
    pub dephasing_mev: f64,
    pub filter_width_mev: f64,
    pub omega0_ev: Option<f64>,
    pub reference_radius_nm: f64,
    pub reference_distance_nm: f64,
    pub grid_points: usize,
    pub grid_half_span_mev: Option<f64>,
    pub n_max: usize,
    pub paper_literal_kappa: bool,
    pub window_mode: WindowMode,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            radius_nm: 7.0,
            distance_nm: 10.0,
            dipole_enm: 0.5,
            eps_inf: 6.0,
            omega_p_ev: 7.9,
            gamma_mev: 51.0,
            eps_b: 2.0,
            delta_xx_mev: 1.0,
            delta_x_mev: 0.1,
            detuning_x_mev: 1.0,
            detuning_y_mev: -2.0,
            dephasing_mev: 0.01,
            filter_width_mev: 1.0,
            omega0_ev: None,
            reference_radius_nm: 7.0,
            reference_distance_nm: 10.0,
            grid_points: 401,
            grid_half_span_mev: None,
            n_max: 50,
            paper_literal_kappa: false,
            window_mode: WindowMode::Product,
        }
    }
}

const KEYS: &[&str] = &[
    "radius_nm",
    "distance_nm",
    "dipole_enm",
    "eps_inf",
    "omega_p_ev",
    "gamma_mev",
    "eps_b",
    "delta_xx_mev",
    "delta_x_mev",
    "detuning_x_mev",
    "detuning_y_mev",
    "dephasing_mev",
    "filter_width_mev",
    "omega0_ev",
    "reference_radius_nm",
    "reference_distance_nm",
    "grid_points",
    "grid_half_span_mev",
    "n_max",
    "paper_literal_kappa",
    "window_mode",
];

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        let mut seen = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, got {body:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key {key:?}"),
                });
            }
            if seen.contains(&key) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key {key:?}"),
                });
            }
            seen.push(key);
            s.set(key, value).map_err(|message| Error::Parse { line, message })?;
        }
        Ok(s)
    }

    /// Sets one field from its textual value; used by the parser and by CLI overrides.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num(key: &str, v: &str) -> std::result::Result<f64, String> {
            v.parse::<f64>()
                .map_err(|_| format!("{key}: cannot parse {v:?} as a number"))
        }
        fn int(key: &str, v: &str) -> std::result::Result<usize, String> {
            v.parse::<usize>()
                .map_err(|_| format!("{key}: cannot parse {v:?} as a non-negative integer"))
        }
        fn opt(key: &str, v: &str) -> std::result::Result<Option<f64>, String> {
            if v == "auto" {
                Ok(None)
            } else {
                num(key, v).map(Some)
            }
        }
        match key {
            "radius_nm" => self.radius_nm = num(key, value)?,
            "distance_nm" => self.distance_nm = num(key, value)?,
            "dipole_enm" => self.dipole_enm = num(key, value)?,
            "eps_inf" => self.eps_inf = num(key, value)?,
            "omega_p_ev" => self.omega_p_ev = num(key, value)?,
            "gamma_mev" => self.gamma_mev = num(key, value)?,
            "eps_b" => self.eps_b = num(key, value)?,
            "delta_xx_mev" => self.delta_xx_mev = num(key, value)?,
            "delta_x_mev" => self.delta_x_mev = num(key, value)?,
            "detuning_x_mev" => self.detuning_x_mev = num(key, value)?,
            "detuning_y_mev" => self.detuning_y_mev = num(key, value)?,
            "dephasing_mev" => self.dephasing_mev = num(key, value)?,
            "filter_width_mev" => self.filter_width_mev = num(key, value)?,
            "omega0_ev" => self.omega0_ev = opt(key, value)?,
            "reference_radius_nm" => self.reference_radius_nm = num(key, value)?,
            "reference_distance_nm" => self.reference_distance_nm = num(key, value)?,
            "grid_points" => self.grid_points = int(key, value)?,
            "grid_half_span_mev" => self.grid_half_span_mev = opt(key, value)?,
            "n_max" => self.n_max = int(key, value)?,
            "paper_literal_kappa" => {
                self.paper_literal_kappa = value
                    .parse::<bool>()
                    .map_err(|_| format!("{key}: expected true or false, got {value:?}"))?
            }
            "window_mode" => self.window_mode = value.parse().map_err(|e: Error| e.to_string())?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Config-file text that parses back to `self` exactly.
    pub fn to_text(&self) -> String {
        fn o(v: Option<f64>) -> String {
            v.map_or_else(|| "auto".to_string(), |x| format!("{x}"))
        }
        let mut t = String::new();
        let _ = writeln!(t, "radius_nm = {}", self.radius_nm);
        let _ = writeln!(t, "distance_nm = {}", self.distance_nm);
        let _ = writeln!(t, "dipole_enm = {}", self.dipole_enm);
        let _ = writeln!(t, "eps_inf = {}", self.eps_inf);
        let _ = writeln!(t, "omega_p_ev = {}", self.omega_p_ev);
        let _ = writeln!(t, "gamma_mev = {}", self.gamma_mev);
        let _ = writeln!(t, "eps_b = {}", self.eps_b);
        let _ = writeln!(t, "delta_xx_mev = {}", self.delta_xx_mev);
        let _ = writeln!(t, "delta_x_mev = {}", self.delta_x_mev);
        let _ = writeln!(t, "detuning_x_mev = {}", self.detuning_x_mev);
        let _ = writeln!(t, "detuning_y_mev = {}", self.detuning_y_mev);
        let _ = writeln!(t, "dephasing_mev = {}", self.dephasing_mev);
        let _ = writeln!(t, "filter_width_mev = {}", self.filter_width_mev);
        let _ = writeln!(t, "omega0_ev = {}", o(self.omega0_ev));
        let _ = writeln!(t, "reference_radius_nm = {}", self.reference_radius_nm);
        let _ = writeln!(t, "reference_distance_nm = {}", self.reference_distance_nm);
        let _ = writeln!(t, "grid_points = {}", self.grid_points);
        let _ = writeln!(t, "grid_half_span_mev = {}", o(self.grid_half_span_mev));
        let _ = writeln!(t, "n_max = {}", self.n_max);
        let _ = writeln!(t, "paper_literal_kappa = {}", self.paper_literal_kappa);
        let _ = writeln!(t, "window_mode = {}", self.window_mode.as_str());
        t
    }

    pub fn resolve(&self) -> Result<Config> {
        let material = MaterialModel::new(
            self.eps_inf,
            units::from_ev(self.omega_p_ev),
            units::from_mev(self.gamma_mev),
            self.eps_b,
        )?;
        if !(self.dipole_enm >= 0.0) {
            return Err(Error::invalid("dipole_enm", "must be non-negative"));
        }
        let geometry = GeometryConfig::new(
            units::from_nm(self.radius_nm),
            units::from_nm(self.distance_nm),
            units::from_enm(self.dipole_enm),
        )?;
        GeometryConfig::new(
            units::from_nm(self.reference_radius_nm),
            units::from_nm(self.reference_distance_nm),
            0.0,
        )
        .map_err(|_| Error::invalid("reference_radius_nm/reference_distance_nm", "must be positive"))?;
        if !(self.delta_xx_mev > 0.0) {
            return Err(Error::invalid("delta_xx_mev", "must be positive"));
        }
        if !(self.delta_x_mev >= 0.0) {
            return Err(Error::invalid("delta_x_mev", "must be non-negative"));
        }
        if !(self.dephasing_mev >= 0.0) {
            return Err(Error::invalid("dephasing_mev", "must be non-negative"));
        }
        if !(self.filter_width_mev > 0.0) {
            return Err(Error::invalid("filter_width_mev", "must be positive"));
        }
        if !self.detuning_x_mev.is_finite() || !self.detuning_y_mev.is_finite() {
            return Err(Error::invalid("detuning", "must be finite"));
        }
        if let Some(w) = self.omega0_ev {
            if !(w > 0.0) {
                return Err(Error::invalid("omega0_ev", "must be positive"));
            }
        }
        if self.grid_points < 3 || self.grid_points % 2 == 0 {
            return Err(Error::invalid("grid_points", "must be odd and >= 3"));
        }
        if let Some(h) = self.grid_half_span_mev {
            if !(h > 0.0) {
                return Err(Error::invalid("grid_half_span_mev", "must be positive"));
            }
        }
        if self.n_max < 1 || self.n_max > 150 {
            return Err(Error::invalid("n_max", "must lie in 1..=150"));
        }
        let inputs = CascadeInputs {
            fss: units::from_mev(self.delta_x_mev),
            binding: units::from_mev(self.delta_xx_mev),
            detuning_x: units::from_mev(self.detuning_x_mev),
            detuning_y: units::from_mev(self.detuning_y_mev),
            dephasing: units::from_mev(self.dephasing_mev),
            filter_width: units::from_mev(self.filter_width_mev),
            omega0: self.omega0_ev.map(units::from_ev),
            reference: (
                units::from_nm(self.reference_radius_nm),
                units::from_nm(self.reference_distance_nm),
            ),
            grid_points: self.grid_points,
            grid_half_span: self.grid_half_span_mev.map(units::from_mev),
            n_max: self.n_max,
            paper_literal_kappa: self.paper_literal_kappa,
            window_mode: self.window_mode,
        };
        Ok(Config {
            units: UnitSystem::default(),
            geometry,
            material,
            inputs,
            settings: self.clone(),
        })
    }
}

pub fn parse_config(text: &str) -> Result<Config> {
    Settings::parse(text)?.resolve()
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

impl Config {
    pub fn with_geometry(&self, radius_nm: f64, distance_nm: f64) -> Result<Config> {
        let mut s = self.settings.clone();
        s.radius_nm = radius_nm;
        s.distance_nm = distance_nm;
        s.resolve()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c.material.eps_inf, 6.0);
        assert!((units::to_ev(c.material.omega_p) - 7.9).abs() < 1e-12);
        assert!((units::to_mev(c.material.gamma) - 51.0).abs() < 1e-10);
        assert!((units::to_nm(c.geometry.dipole) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn emitter_radius_is_r_plus_h() {
        let c = parse_config("radius_nm = 7\ndistance_nm = 10\n").unwrap();
        let r_d = c.geometry.emitter_radius();
        assert!((r_d - 17.0 / units::BOHR_NM).abs() < 1e-9);
    }

    #[test]
    fn negative_radius_names_field() {
        let err = parse_config("radius_nm = -1").unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("radius_nm"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = parse_config("# hi\n\nradius_nm = 7\nbogus = 3\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 4);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        let err = parse_config("eps_b = abc").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_config("eps_b = 2\neps_b = 3").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn snapshot_round_trips() {
        let mut s = Settings::default();
        s.radius_nm = 9.5;
        s.omega0_ev = Some(2.4881234567891234);
        s.window_mode = WindowMode::Single;
        s.paper_literal_kappa = true;
        assert_eq!(Settings::parse(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn markov_bound_interpolates() {
        assert_eq!(markov_bound(5.0), 1.4);
        assert_eq!(markov_bound(20.0), 1.0);
        assert!((markov_bound(10.5) - 1.2).abs() < 1e-12);
        let g = GeometryConfig::from_nm(7.0, 9.0).unwrap();
        assert!(!g.markov_valid());
        let g = GeometryConfig::from_nm(14.0, 14.0).unwrap();
        assert!(g.markov_valid());
    }

    #[test]
    fn drude_is_absorbing() {
        let m = MaterialModel::silver(1.0);
        for ev in [1.0, 2.5, 3.0, 5.0] {
            assert!(m.permittivity(units::from_ev(ev)).im > 0.0);
        }
    }
}
