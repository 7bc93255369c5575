//! Joint and marginal two-photon spectra.

use ndarray::Array2;
use serde::Serialize;

use crate::cascade::{AmplitudeGrid, Channel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhotonAxis {
    /// Spectrum of the exciton photon, a function of omega_n.
    Exciton,
    /// Spectrum of the biexciton photon, a function of omega_m.
    Biexciton,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumCurve {
    pub axis: PhotonAxis,
    pub channel: Channel,
    /// omega - omega0, Hartree.
    pub offsets: Vec<f64>,
    pub values: Vec<f64>,
    /// Integral of `values` over the axis.
    pub total: f64,
    pub peak: f64,
    /// Lorentzian-tail estimate of the weight beyond the sampled range.
    pub leaked_fraction: f64,
    pub warnings: Vec<String>,
}

impl SpectrumCurve {
    pub fn normalized(&self) -> Vec<f64> {
        if self.peak > 0.0 {
            self.values.iter().map(|v| v / self.peak).collect()
        } else {
            self.values.clone()
        }
    }

    fn argmax(&self) -> usize {
        let mut k = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[k] {
                k = i;
            }
        }
        k
    }

    /// Maximum location refined by a three-point parabola.
    pub fn peak_offset(&self) -> f64 {
        let k = self.argmax();
        let x = &self.offsets;
        if k == 0 || k + 1 == x.len() {
            return x[k];
        }
        let (a, b, c) = (self.values[k - 1], self.values[k], self.values[k + 1]);
        let den = a - 2.0 * b + c;
        if den >= 0.0 {
            return x[k];
        }
        let t = 0.5 * (a - c) / den;
        x[k] + t * (x[k + 1] - x[k])
    }
}

/// Composite trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

pub fn joint_spectrum(grid: &AmplitudeGrid, a: Channel) -> Array2<f64> {
    grid.channel(a).mapv(|c| c.norm_sqr())
}

pub fn marginal_spectrum(grid: &AmplitudeGrid, a: Channel, axis: PhotonAxis) -> SpectrumCurve {
    let joint = joint_spectrum(grid, a);
    let g = &grid.grid;
    let (own, other, lanes) = match axis {
        PhotonAxis::Exciton => (g.exciton, g.biexciton, joint.columns()),
        PhotonAxis::Biexciton => (g.biexciton, g.exciton, joint.rows()),
    };
    let values: Vec<f64> = lanes
        .into_iter()
        .map(|lane| trapezoid(&lane.to_vec(), other.step()))
        .collect();
    let offsets = own.values();
    let total = trapezoid(&values, own.step());
    let peak = values.iter().cloned().fold(0.0, f64::max);

    let mut curve = SpectrumCurve {
        axis,
        channel: a,
        offsets,
        values,
        total,
        peak,
        leaked_fraction: 0.0,
        warnings: Vec::new(),
    };
    if peak > 0.0 {
        let x0 = curve.peak_offset();
        let n = curve.values.len();
        let (first, last) = (curve.values[0], curve.values[n - 1]);
        let tail = first * (x0 - curve.offsets[0]).abs() + last * (curve.offsets[n - 1] - x0).abs();
        curve.leaked_fraction = tail / total;
        if first.max(last) >= 1e-6 * peak {
            curve.warnings.push(format!(
                "{:?} {:?} marginal: boundary value {:.2e} of peak, estimated leaked fraction {:.2e}",
                a,
                axis,
                first.max(last) / peak,
                curve.leaked_fraction
            ));
        }
    }
    curve
}

fn half_crossing(x: &[f64], y: &[f64], k: usize, level: f64, dir: isize) -> Option<f64> {
    let mut i = k as isize;
    loop {
        let next = i + dir;
        if next < 0 || next as usize >= y.len() {
            return None;
        }
        let (a, b) = (i as usize, next as usize);
        if y[b] <= level {
            let t = (y[a] - level) / (y[a] - y[b]);
            return Some(x[a] + t * (x[b] - x[a]));
        }
        i = next;
    }
}

/// Full width at half maximum of the dominant peak.
pub fn fwhm(curve: &SpectrumCurve) -> Result<f64> {
    width_at(&curve.offsets, &curve.values, curve.argmax())
}

fn width_at(x: &[f64], y: &[f64], k: usize) -> Result<f64> {
    let level = 0.5 * y[k];
    let lo = half_crossing(x, y, k, level, -1).ok_or(Error::NoCrossing)?;
    let hi = half_crossing(x, y, k, level, 1).ok_or(Error::NoCrossing)?;
    Ok(hi - lo)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeakWidth {
    pub center: f64,
    pub height: f64,
    /// `None` when a half-maximum crossing is missing on either side.
    pub fwhm: Option<f64>,
}

/// Every strict local maximum above 1% of the global maximum, with its own FWHM.
pub fn fwhm_all(curve: &SpectrumCurve) -> Vec<PeakWidth> {
    let (x, y) = (&curve.offsets, &curve.values);
    let mut out = Vec::new();
    for k in 1..y.len().saturating_sub(1) {
        if y[k] > y[k - 1] && y[k] >= y[k + 1] && y[k] > 0.01 * curve.peak {
            out.push(PeakWidth {
                center: x[k],
                height: y[k],
                fwhm: width_at(x, y, k).ok(),
            });
        }
    }
    out
}
