//! Long-time two-photon amplitudes of the biexciton cascade and their
//! evaluation on frequency grids.
//!
//! `omega_m` is the biexciton-photon axis (lines near omega0 - Delta_xx),
//! `omega_n` the exciton-photon axis (lines near omega0). Public functions take
//! absolute frequencies; internally everything is measured from omega0 so that
//! meV-scale detunings keep full precision against the eV-scale carrier.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    X,
    Y,
}

impl Channel {
    pub const BOTH: [Channel; 2] = [Channel::X, Channel::Y];

    pub fn other(self) -> Channel {
        match self {
            Channel::X => Channel::Y,
            Channel::Y => Channel::X,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChannelParams {
    /// Real part of the exciton-plasmon detuning omega_alpha - omega_p^alpha.
    pub detuning: f64,
    /// Pure dephasing gamma'_alpha of the exciton level.
    pub dephasing: f64,
    pub kappa: f64,
    pub g_ex: f64,
    pub g_bx: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaForm {
    /// kappa_alpha in F_alpha.
    ChannelConsistent,
    /// kappa_x in both F_x and F_y, as printed.
    PaperLiteral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CascadeParams {
    pub omega0: f64,
    /// Fine-structure splitting delta_x = omega_x - omega_y.
    pub fss: f64,
    /// Biexciton binding energy Delta_xx.
    pub binding: f64,
    pub biexciton_dephasing: f64,
    pub gamma_ex: f64,
    pub gamma_bx: f64,
    pub x: ChannelParams,
    pub y: ChannelParams,
    pub kappa_form: KappaForm,
}

impl CascadeParams {
    pub fn channel(&self, a: Channel) -> &ChannelParams {
        match a {
            Channel::X => &self.x,
            Channel::Y => &self.y,
        }
    }

    pub fn exciton_offset(&self, a: Channel) -> f64 {
        match a {
            Channel::X => 0.5 * self.fss,
            Channel::Y => -0.5 * self.fss,
        }
    }

    pub fn exciton(&self, a: Channel) -> f64 {
        self.omega0 + self.exciton_offset(a)
    }

    pub fn plasmon_offset(&self, a: Channel) -> f64 {
        self.exciton_offset(a) - self.channel(a).detuning
    }

    pub fn plasmon(&self, a: Channel) -> f64 {
        self.omega0 + self.plasmon_offset(a)
    }

    pub fn biexciton(&self) -> f64 {
        2.0 * self.omega0 - self.binding
    }

    /// Delta_p = (omega_alpha - i gamma'_alpha) - omega_p.
    pub fn complex_detuning(&self, a: Channel) -> Complex64 {
        let c = self.channel(a);
        Complex64::new(c.detuning, -c.dephasing)
    }

    /// Flat-reservoir coupling |Omega| = sqrt(kappa / pi).
    pub fn reservoir_coupling(&self, a: Channel) -> f64 {
        (self.channel(a).kappa / PI).sqrt()
    }

    /// x and y exchanged together with the sign of the splitting.
    pub fn swapped(&self) -> Self {
        CascadeParams {
            fss: -self.fss,
            x: self.y,
            y: self.x,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega0,
            self.fss,
            self.binding,
            self.biexciton_dephasing,
            self.gamma_ex,
            self.gamma_bx,
        ]
        .into_iter()
        .chain(
            [self.x, self.y]
                .iter()
                .flat_map(|c| [c.detuning, c.dephasing, c.kappa, c.g_ex, c.g_bx]),
        )
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("cascade parameters", "non-finite value"));
        }
        if !(self.omega0 > 0.0) {
            return Err(Error::invalid("omega0", "must be positive"));
        }
        if !(self.binding > 0.0) {
            return Err(Error::invalid("delta_xx", "must be positive"));
        }
        for (name, v) in [
            ("gamma_ex", self.gamma_ex),
            ("gamma_bx", self.gamma_bx),
            ("biexciton dephasing", self.biexciton_dephasing),
            ("kappa_x", self.x.kappa),
            ("kappa_y", self.y.kappa),
            ("dephasing_x", self.x.dephasing),
            ("dephasing_y", self.y.dephasing),
        ] {
            if v < 0.0 {
                return Err(Error::invalid(name, "must be non-negative"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct Terms {
    /// Complex exciton offset omega_alpha - omega0 - i gamma'_alpha.
    e: Complex64,
    p: f64,
    kappa: f64,
    kappa_f: f64,
    g_ex: f64,
    g_bx: f64,
    omega: f64,
}

/// Eqs. for F, D and c in offset coordinates (s = omega_m + omega_n - 2 omega0).
#[derive(Clone, Copy, Debug)]
pub(crate) struct Kernel {
    u: Complex64,
    gamma_ex: f64,
    gamma_bx: f64,
    ch: [Terms; 2],
}

impl Kernel {
    pub(crate) fn new(p: &CascadeParams) -> Self {
        let terms = |a: Channel| {
            let c = p.channel(a);
            Terms {
                e: Complex64::new(p.exciton_offset(a), -c.dephasing),
                p: p.plasmon_offset(a),
                kappa: c.kappa,
                kappa_f: match p.kappa_form {
                    KappaForm::ChannelConsistent => c.kappa,
                    KappaForm::PaperLiteral => p.x.kappa,
                },
                g_ex: c.g_ex,
                g_bx: c.g_bx,
                omega: p.reservoir_coupling(a),
            }
        };
        Kernel {
            u: Complex64::new(-p.binding, -p.biexciton_dephasing),
            gamma_ex: p.gamma_ex,
            gamma_bx: p.gamma_bx,
            ch: [terms(Channel::X), terms(Channel::Y)],
        }
    }

    #[inline]
    pub(crate) fn f(&self, a: Channel, s: f64) -> Complex64 {
        let t = &self.ch[a.index()];
        let first = s - t.e - t.p + I * (t.kappa_f + self.gamma_ex);
        let second = Complex64::new(s - 2.0 * t.p, 2.0 * t.kappa_f);
        2.0 * t.g_ex * t.g_ex - first * second
    }

    #[inline]
    fn d_with(&self, s: f64, fx: Complex64, fy: Complex64) -> Complex64 {
        // grouped so that exchanging x and y is bit-exact
        let [x, y] = &self.ch;
        let tx = x.g_bx * x.g_bx * fy * Complex64::new(s - 2.0 * x.p, 2.0 * x.kappa);
        let ty = y.g_bx * y.g_bx * fx * Complex64::new(s - 2.0 * y.p, 2.0 * y.kappa);
        (s - self.u + I * self.gamma_bx) * (fx * fy) + (tx + ty)
    }

    pub(crate) fn d(&self, s: f64) -> Result<Complex64> {
        let d = self.d_with(s, self.f(Channel::X, s), self.f(Channel::Y, s));
        check_d(d)
    }

    /// `(c_x, c_y)` at offsets `m`, `n` from omega0.
    #[inline]
    pub(crate) fn amplitudes(&self, m: f64, n: f64) -> Result<[Complex64; 2]> {
        let s = m + n;
        let fx = self.f(Channel::X, s);
        let fy = self.f(Channel::Y, s);
        let d = check_d(self.d_with(s, fx, fy))?;
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for (k, f_other) in [(0, fy), (1, fx)] {
            let t = &self.ch[k];
            if t.g_bx == 0.0 || t.g_ex == 0.0 || t.omega == 0.0 {
                continue;
            }
            let first = t.g_bx * t.omega * f_other / d;
            let numer = s + 2.0 * n - 2.0 * t.e - 2.0 * t.p + 2.0 * I * (t.kappa + self.gamma_ex);
            let denom = (n - t.e + I * self.gamma_ex) * Complex64::new(n - t.p, t.kappa) - t.g_ex * t.g_ex;
            if denom.norm() < 1e-300 {
                return Err(Error::Singular {
                    what: "exciton-photon denominator",
                    magnitude: denom.norm(),
                });
            }
            out[k] = first * (t.g_ex * t.omega * numer / denom);
        }
        Ok(out)
    }
}

#[inline]
fn check_d(d: Complex64) -> Result<Complex64> {
    if d.norm() < 1e-300 || !d.re.is_finite() || !d.im.is_finite() {
        Err(Error::Singular {
            what: "D",
            magnitude: d.norm(),
        })
    } else {
        Ok(d)
    }
}

fn offsets(omega_m: f64, omega_n: f64, p: &CascadeParams) -> (f64, f64) {
    (omega_m - p.omega0, omega_n - p.omega0)
}

pub fn f_alpha(omega_m: f64, omega_n: f64, a: Channel, p: &CascadeParams) -> Complex64 {
    let (m, n) = offsets(omega_m, omega_n, p);
    Kernel::new(p).f(a, m + n)
}

pub fn d_denominator(omega_m: f64, omega_n: f64, p: &CascadeParams) -> Result<Complex64> {
    let (m, n) = offsets(omega_m, omega_n, p);
    Kernel::new(p).d(m + n)
}

pub fn two_photon_amplitude(omega_m: f64, omega_n: f64, a: Channel, p: &CascadeParams) -> Result<Complex64> {
    let (m, n) = offsets(omega_m, omega_n, p);
    Ok(Kernel::new(p).amplitudes(m, n)?[a.index()])
}

/// Uniform axis; `center` is measured from omega0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub center: f64,
    pub half_span: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(center: f64, half_span: f64, points: usize) -> Result<Self> {
        if !(half_span > 0.0) || !half_span.is_finite() || !center.is_finite() {
            return Err(Error::invalid("grid half span", "must be positive and finite"));
        }
        if points < 2 {
            return Err(Error::invalid("grid points", "need at least two points"));
        }
        Ok(Axis {
            center,
            half_span,
            points,
        })
    }

    /// Axis spanning `[lo, hi]` inclusive.
    pub fn between(lo: f64, hi: f64, points: usize) -> Result<Self> {
        Axis::new(0.5 * (lo + hi), 0.5 * (hi - lo), points)
    }

    pub fn lo(&self) -> f64 {
        self.center - self.half_span
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_span
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_span / (self.points - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.hi()
        } else {
            self.lo() + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    pub fn nearest(&self, x: f64) -> Option<usize> {
        let h = self.step();
        if x < self.lo() - 0.5 * h || x > self.hi() + 0.5 * h {
            return None;
        }
        Some((((x - self.lo()) / h).round().max(0.0) as usize).min(self.points - 1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrequencyGrid {
    pub omega0: f64,
    /// omega_m.
    pub biexciton: Axis,
    /// omega_n.
    pub exciton: Axis,
}

/// Largest line width in the problem; sets the default spectral span.
pub fn widest_line(p: &CascadeParams) -> f64 {
    let g2 = [p.x, p.y]
        .iter()
        .map(|c| if c.kappa > 0.0 { c.g_ex * c.g_ex / c.kappa } else { 0.0 })
        .fold(0.0, f64::max);
    let deph = p.x.dephasing.max(p.y.dephasing);
    p.gamma_bx + p.gamma_ex + p.biexciton_dephasing + deph + 4.0 * g2
}

impl FrequencyGrid {
    pub fn new(omega0: f64, biexciton: Axis, exciton: Axis) -> Self {
        FrequencyGrid {
            omega0,
            biexciton,
            exciton,
        }
    }

    /// Both axes share one frequency range centred between the two lines, wide
    /// enough for twelve line widths on either side.
    pub fn for_params(p: &CascadeParams, points: usize, half_span: Option<f64>) -> Result<Self> {
        let half = half_span.unwrap_or(0.5 * p.binding + 0.5 * p.fss.abs() + 12.0 * widest_line(p));
        let axis = Axis::new(-0.5 * p.binding, half, points)?;
        Ok(FrequencyGrid::new(p.omega0, axis, axis))
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.biexciton.points, self.exciton.points)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplitudeGrid {
    pub grid: FrequencyGrid,
    /// Rows follow omega_m, columns omega_n.
    pub c_x: Array2<Complex64>,
    pub c_y: Array2<Complex64>,
    pub params: CascadeParams,
}

impl AmplitudeGrid {
    pub fn channel(&self, a: Channel) -> &Array2<Complex64> {
        match a {
            Channel::X => &self.c_x,
            Channel::Y => &self.c_y,
        }
    }
}

pub fn amplitude_grid(p: &CascadeParams, grid: &FrequencyGrid) -> Result<AmplitudeGrid> {
    p.validate()?;
    let kernel = Kernel::new(p);
    let (rows, cols) = grid.shape();
    let ns = grid.exciton.values();
    let filled = par::map(rows, |i| -> Result<Vec<[Complex64; 2]>> {
        let m = grid.biexciton.value(i);
        ns.iter().map(|&n| kernel.amplitudes(m, n)).collect()
    });
    let mut c_x = Array2::zeros((rows, cols));
    let mut c_y = Array2::zeros((rows, cols));
    for (i, row) in filled.into_iter().enumerate() {
        for (j, [x, y]) in row?.into_iter().enumerate() {
            c_x[[i, j]] = x;
            c_y[[i, j]] = y;
        }
    }
    Ok(AmplitudeGrid {
        grid: *grid,
        c_x,
        c_y,
        params: *p,
    })
}
