//! Geometry and filter-width sweeps of the filtered entanglement.

use serde::Serialize;

use crate::config::Config;
use crate::entanglement::{filtered_entanglement, FilteredEntanglement, Quadrature, SpectralWindow};
use crate::error::{Error, Result};
use crate::par;
use crate::units;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Distances {
    Absolute(Vec<f64>),
    Ratio(Vec<f64>),
}

/// Parameter lists, in config units. Rows come out radius-major, then
/// distance, then filter width.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub radius_nm: Vec<f64>,
    pub distance: Distances,
    pub filter_width_mev: Vec<f64>,
}

/// `a, b, c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_values(text: &str) -> std::result::Result<Vec<f64>, String> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("range {text:?} must be start:stop:count"));
        }
        let a: f64 = parts[0]
            .parse()
            .map_err(|_| format!("bad range start {:?}", parts[0]))?;
        let b: f64 = parts[1].parse().map_err(|_| format!("bad range stop {:?}", parts[1]))?;
        let n: usize = parts[2]
            .parse()
            .map_err(|_| format!("bad range count {:?}", parts[2]))?;
        return match n {
            0 => Err("range count must be positive".into()),
            1 => Ok(vec![a]),
            _ => Ok((0..n)
                .map(|i| {
                    if i + 1 == n {
                        b
                    } else {
                        a + (b - a) * i as f64 / (n - 1) as f64
                    }
                })
                .collect()),
        };
    }
    text.split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>().map_err(|_| format!("cannot parse {v:?} as a number"))
        })
        .collect()
}

impl SweepSpec {
    pub fn parse(text: &str, base: &Config) -> Result<Self> {
        let mut radius = None;
        let mut distance = None;
        let mut ratio = None;
        let mut width = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = values`, got {body:?}"),
            })?;
            let values = parse_values(v).map_err(|message| Error::Parse { line, message })?;
            if values.is_empty() || values.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
                return Err(Error::Parse {
                    line,
                    message: format!("{} values must be positive", k.trim()),
                });
            }
            let slot = match k.trim() {
                "radius_nm" => &mut radius,
                "distance_nm" => &mut distance,
                "h_over_r" => &mut ratio,
                "filter_width_mev" => &mut width,
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown sweep key {other:?}"),
                    })
                }
            };
            if slot.is_some() {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate sweep key {:?}", k.trim()),
                });
            }
            *slot = Some(values);
        }
        let distance = match (distance, ratio) {
            (Some(_), Some(_)) => {
                return Err(Error::invalid("sweep", "give distance_nm or h_over_r, not both"));
            }
            (Some(d), None) => Distances::Absolute(d),
            (None, Some(r)) => Distances::Ratio(r),
            (None, None) => Distances::Absolute(vec![base.settings.distance_nm]),
        };
        Ok(SweepSpec {
            radius_nm: radius.unwrap_or_else(|| vec![base.settings.radius_nm]),
            distance,
            filter_width_mev: width.unwrap_or_else(|| vec![base.settings.filter_width_mev]),
        })
    }

    /// (R, h) pairs in nm, in row order.
    pub fn geometries(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &r in &self.radius_nm {
            match &self.distance {
                Distances::Absolute(hs) => out.extend(hs.iter().map(|&h| (r, h))),
                Distances::Ratio(xs) => out.extend(xs.iter().map(|&x| (r, x * r))),
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.geometries().len() * self.filter_width_mev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub r_nm: f64,
    pub h_nm: f64,
    pub h_over_r: f64,
    pub w_mev: f64,
    pub result: std::result::Result<FilteredEntanglement, String>,
    pub warnings: Vec<String>,
}

/// Evaluates every sweep point at the centre energy of `base`. Bad inputs
/// abort the sweep; numerical failures are recorded in the row.
pub fn concurrence_sweep(base: &Config, spec: &SweepSpec, quad: &Quadrature) -> Result<Vec<SweepRow>> {
    let omega0 = base.centre_energy()?;
    let geometries = spec.geometries();
    let configs: Vec<Config> = geometries
        .iter()
        .map(|&(r, h)| base.with_geometry(r, h))
        .collect::<Result<_>>()?;
    for &w in &spec.filter_width_mev {
        if !(w > 0.0) {
            return Err(Error::invalid("filter_width_mev", "must be positive"));
        }
    }

    let blocks = par::map(configs.len(), |k| {
        let cfg = &configs[k];
        let (r, h) = geometries[k];
        let model = crate::model::build_model(&cfg.geometry, &cfg.material, &cfg.inputs, omega0);
        spec.filter_width_mev
            .iter()
            .map(|&w| {
                let mut row = SweepRow {
                    r_nm: r,
                    h_nm: h,
                    h_over_r: h / r,
                    w_mev: w,
                    result: Err(String::new()),
                    warnings: Vec::new(),
                };
                row.result = match &model {
                    Err(e) => Err(e.to_string()),
                    Ok(model) => {
                        row.warnings.extend(model.warnings.iter().cloned());
                        evaluate(model, units::from_mev(w), cfg, quad, &mut row.warnings)
                    }
                };
                row
            })
            .collect::<Vec<_>>()
    });
    Ok(blocks.into_iter().flatten().collect())
}

fn evaluate(
    model: &crate::model::Model,
    w: f64,
    cfg: &Config,
    quad: &Quadrature,
    warnings: &mut Vec<String>,
) -> std::result::Result<FilteredEntanglement, String> {
    let window = SpectralWindow::for_params(&model.params, w, cfg.inputs.window_mode).map_err(|e| e.to_string())?;
    let (f, warn) = filtered_entanglement(&model.params, &window, quad).map_err(|e| e.to_string())?;
    warnings.extend(warn);
    if !(0.0..=1.0 + 1e-12).contains(&f.concurrence) {
        return Err(format!("2|gamma'| = {} outside [0, 1]", f.concurrence));
    }
    Ok(f)
}
