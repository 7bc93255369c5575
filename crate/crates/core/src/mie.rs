//! Mie reflection coefficients of a Drude sphere and the scaled LDOS of a
//! radially oriented dipole outside it.

use num_complex::Complex64;
use serde::Serialize;

use crate::config::{GeometryConfig, MaterialModel};
use crate::error::{Error, Result};
use crate::par;
use crate::special::{bessel_j_all, hankel1_all, riccati_from, Kind};
use crate::units::SPEED_OF_LIGHT;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveNumbers {
    pub k1: f64,
    pub k2: Complex64,
}

impl WaveNumbers {
    pub fn new(omega: f64, material: &MaterialModel) -> Self {
        let k0 = omega / SPEED_OF_LIGHT;
        let mut root = material.permittivity(omega).sqrt();
        if root.im < 0.0 {
            root = -root;
        }
        WaveNumbers {
            k1: k0 * material.eps_b.sqrt(),
            k2: k0 * root,
        }
    }
}

/// Reflection coefficients R^V_1 .. R^V_nmax (index 0 unused) for host
/// wavenumber `k1` and sphere wavenumber `k2`.
pub fn reflection_coeffs(k1: f64, k2: Complex64, radius: f64, nmax: usize) -> Result<Vec<Complex64>> {
    let a = Complex64::new(k1 * radius, 0.0);
    let b = k2 * radius;
    let ja = bessel_j_all(nmax, a)?;
    let ha = hankel1_all(nmax, a)?;
    let jb = bessel_j_all(nmax, b)?;
    let k1s = Complex64::new(k1 * k1, 0.0);
    let k2s = k2 * k2;

    let mut out = vec![Complex64::new(0.0, 0.0); nmax + 1];
    for n in 1..=nmax {
        let psi_a = riccati_from(&ja, n, a, Kind::J);
        let psi_b = riccati_from(&jb, n, b, Kind::J);
        let xi_a = riccati_from(&ha, n, a, Kind::H1);
        let num = k1s * ja[n] * psi_b - k2s * jb[n] * psi_a;
        let den = k2s * jb[n] * xi_a - k1s * ha[n] * psi_b;
        if den.norm() < 1e-300 {
            return Err(Error::Singular {
                what: "Mie denominator",
                magnitude: den.norm(),
            });
        }
        out[n] = num / den;
    }
    Ok(out)
}

pub fn mie_reflection_coeff(n: usize, omega: f64, material: &MaterialModel, radius: f64) -> Result<Complex64> {
    if n < 1 {
        return Err(Error::invalid("n", "multipole order starts at 1"));
    }
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", "must be positive"));
    }
    let k = WaveNumbers::new(omega, material);
    Ok(reflection_coeffs(k.k1, k.k2, radius, n)?[n])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
    /// |last term| / |running sum| when the series stopped.
    pub last_ratio: f64,
    pub converged: bool,
}

/// Highest order (at least 1) for which |h1_n(x)| stays below 1e150, so that
/// squares and products of the Hankel values remain finite.
fn representable_order(x: f64, n_max: usize) -> usize {
    let (mut prev, mut cur) = (1.0 / x, (1.0 + x * x).sqrt() / (x * x));
    for n in 1..n_max {
        let next = cur * (2 * n + 1) as f64 / x + prev;
        if next > 1e150 {
            return n.max(1);
        }
        prev = cur;
        cur = next;
    }
    n_max
}

/// `Re sum_n (2n+1) n (n+1) R^V_n [h1_n(k1 r)/(k1 r)]^2`.
fn multipole_sum(omega: f64, geometry: &GeometryConfig, material: &MaterialModel, n_max: usize) -> Result<SeriesValue> {
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", "must be positive"));
    }
    if n_max < 1 {
        return Err(Error::invalid("n_max", "must be >= 1"));
    }
    let k = WaveNumbers::new(omega, material);
    let n_max = n_max.min(representable_order(k.k1 * geometry.radius, n_max));
    let rv = reflection_coeffs(k.k1, k.k2, geometry.radius, n_max)?;
    let x = k.k1 * geometry.emitter_radius();
    let h = hankel1_all(n_max, Complex64::new(x, 0.0))?;

    let mut sum = Complex64::new(0.0, 0.0);
    let mut ratio = f64::INFINITY;
    let mut terms = 0;
    for n in 1..=n_max {
        let q = h[n] / x;
        let w = ((2 * n + 1) * n * (n + 1)) as f64;
        let term = rv[n] * q * q * w;
        if !term.re.is_finite() || !term.im.is_finite() {
            return Err(Error::Overflow("multipole series"));
        }
        sum += term;
        terms = n;
        ratio = term.norm() / sum.norm();
        if ratio < 1e-12 {
            break;
        }
    }
    Ok(SeriesValue {
        value: sum.re,
        terms,
        last_ratio: ratio,
        converged: ratio < 1e-6,
    })
}

/// Scattered part of Im G_zz at the emitter, in inverse Bohr.
pub fn scattered_im_gzz(
    omega: f64,
    geometry: &GeometryConfig,
    material: &MaterialModel,
    n_max: usize,
) -> Result<SeriesValue> {
    let k1 = WaveNumbers::new(omega, material).k1;
    let s = multipole_sum(omega, geometry, material, n_max)?;
    Ok(SeriesValue {
        value: s.value * k1 / (4.0 * std::f64::consts::PI),
        ..s
    })
}

/// rho_zz / rho_0 = 1 + (6 pi / k1) Im G_zz^scat.
pub fn scaled_ldos(omega: f64, geometry: &GeometryConfig, material: &MaterialModel, n_max: usize) -> Result<f64> {
    let s = multipole_sum(omega, geometry, material, n_max)?;
    Ok(1.0 + 1.5 * s.value)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LdosCurve {
    pub frequencies: Vec<f64>,
    pub scaled_ldos: Vec<f64>,
    pub geometry: GeometryConfig,
    /// Frequencies at which the series hit n_max without converging.
    pub warnings: Vec<String>,
}

pub fn ldos_curve(
    frequencies: &[f64],
    geometry: &GeometryConfig,
    material: &MaterialModel,
    n_max: usize,
) -> Result<LdosCurve> {
    let results = par::map(frequencies.len(), |i| {
        multipole_sum(frequencies[i], geometry, material, n_max)
    });
    let mut values = Vec::with_capacity(frequencies.len());
    let mut warnings = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        let s = r?;
        if !s.converged {
            warnings.push(format!(
                "multipole series not converged at omega = {:.6e} Ha (last-term ratio {:.2e})",
                frequencies[i], s.last_ratio
            ));
        }
        values.push(1.0 + 1.5 * s.value);
    }
    Ok(LdosCurve {
        frequencies: frequencies.to_vec(),
        scaled_ldos: values,
        geometry: *geometry,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeakOrder {
    Dipole,
    HigherOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlasmonPeak {
    pub center: f64,
    pub half_width: f64,
    pub height: f64,
    pub order: PeakOrder,
}

/// Strict local maxima above 1.5x the curve minimum, sorted by position.
/// The half width is measured at half height above the minimum; where a
/// neighbouring peak hides the crossing, the valley between them is used.
pub fn find_peaks(x: &[f64], y: &[f64]) -> Vec<PlasmonPeak> {
    assert_eq!(x.len(), y.len());
    let n = y.len();
    if n < 3 {
        return Vec::new();
    }
    let base = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            // walk across a plateau
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] && y[i] > 1.5 * base {
                let k = (i + j) / 2;
                peaks.push(measure(x, y, k, base));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    for (idx, p) in peaks.iter_mut().enumerate() {
        p.order = if idx == 0 {
            PeakOrder::Dipole
        } else {
            PeakOrder::HigherOrder
        };
    }
    peaks
}

fn measure(x: &[f64], y: &[f64], k: usize, base: f64) -> PlasmonPeak {
    let level = base + 0.5 * (y[k] - base);
    let crossing = |dir: isize| -> f64 {
        let mut i = k as isize;
        loop {
            let next = i + dir;
            if next < 0 || next as usize >= y.len() {
                return x[i as usize];
            }
            let (a, b) = (i as usize, next as usize);
            if y[b] <= level {
                let t = (y[a] - level) / (y[a] - y[b]);
                return x[a] + t * (x[b] - x[a]);
            }
            if y[b] > y[a] {
                // rising again before reaching half height
                return x[a];
            }
            i = next;
        }
    };
    let lo = crossing(-1);
    let hi = crossing(1);
    PlasmonPeak {
        center: x[k],
        half_width: 0.5 * (hi - lo),
        height: y[k],
        order: PeakOrder::Dipole,
    }
}

/// Dipole LDOS peak frequency, refined by golden-section search.
pub fn dipole_peak(geometry: &GeometryConfig, material: &MaterialModel, n_max: usize) -> Result<f64> {
    let f = material.frohlich();
    let (lo, hi) = (0.7 * f, 1.15 * f);
    let n = 901;
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let curve = ldos_curve(&xs, geometry, material, n_max)?;
    let peaks = find_peaks(&xs, &curve.scaled_ldos);
    let first = peaks
        .first()
        .ok_or_else(|| Error::Numerical("no dipole LDOS peak found".into()))?;
    let step = xs[1] - xs[0];
    let (mut a, mut b) = (first.center - step, first.center + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let eval = |w: f64| scaled_ldos(w, geometry, material, n_max);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d)?;
        }
        if b - a < 1e-12 * f {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units;

    #[test]
    fn matched_medium_has_no_reflection() {
        let k1 = 1e-3;
        let rv = reflection_coeffs(k1, Complex64::new(k1, 0.0), 130.0, 10).unwrap();
        for v in &rv[1..] {
            assert!(v.norm() < 1e-12, "{v}");
        }
    }

    #[test]
    fn far_field_limit_is_unity() {
        let m = MaterialModel::silver(1.0);
        let g = GeometryConfig::from_nm(7.0, 7.0e4).unwrap();
        let v = scaled_ldos(units::from_ev(2.8), &g, &m, 50).unwrap();
        assert!((v - 1.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn lorentzian_peak() {
        let x: Vec<f64> = (0..2001).map(|i| 2.0 + 1.6 * i as f64 / 2000.0).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&w| 1.0 / (1.0 + ((w - 2.8) / 0.025f64).powi(2)))
            .collect();
        let p = find_peaks(&x, &y);
        assert_eq!(p.len(), 1);
        assert!((p[0].center - 2.8).abs() <= 0.0008 + 1e-12);
        assert!((p[0].half_width - 0.025).abs() / 0.025 < 0.1, "{}", p[0].half_width);
    }

    #[test]
    fn flat_curve_has_no_peaks() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        assert!(find_peaks(&x, &vec![1.0; 50]).is_empty());
    }
}
