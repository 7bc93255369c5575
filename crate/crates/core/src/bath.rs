//! Time-domain check of the closed-form amplitudes.
//!
//! Each plasmon reservoir is replaced by N discrete modes and the amplitude
//! equations of motion are integrated with fixed-step RK4 until every
//! intermediate state has decayed. Only `CascadeParams` is shared with the
//! `cascade` module; the closed form is touched in [`compare_to_analytic`] and
//! nowhere else.
//!
//! States, in the interaction picture with complex level energies (offsets
//! from omega0 for single-excitation states, from 2 omega0 for two):
//!
//! | amplitude | state                    | energy                 |
//! |-----------|--------------------------|------------------------|
//! | C1        | biexciton                | -Delta_xx - i gamma'_u |
//! | C2        | exciton + plasmon        | e + p                  |
//! | C3        | two plasmons             | 2p                     |
//! | C4_m      | exciton + photon m       | e + m                  |
//! | C5_m      | plasmon + photon m       | p + m                  |
//! | C_mn      | photons m and n          | m + n                  |
//!
//! with e = omega_alpha - omega0 - i gamma'_alpha and p = omega_p - omega0.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::cascade::{amplitude_grid, AmplitudeGrid, Axis, CascadeParams, Channel, FrequencyGrid};
use crate::error::{Error, Result};
use crate::par;
use crate::units;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscretizedBath {
    /// Mode frequencies minus omega0; shared by both channels.
    pub offsets: Vec<f64>,
    pub center: f64,
    pub span: f64,
    pub spacing: f64,
    /// Per-mode coupling sqrt(kappa spacing / pi), x then y.
    pub couplings: [f64; 2],
}

impl DiscretizedBath {
    pub fn modes(&self) -> usize {
        self.offsets.len()
    }

    pub fn axis(&self) -> Axis {
        Axis::new(self.center, self.span, self.modes()).expect("bath axis is valid")
    }
}

/// Uniform modes over `center +- span`, centred between the two plasmon lines.
pub fn build_bath(p: &CascadeParams, modes: usize, span: f64) -> Result<DiscretizedBath> {
    if modes < 100 {
        return Err(Error::invalid("modes", "need at least 100 bath modes"));
    }
    if !(span > 0.0) {
        return Err(Error::invalid("span", "must be positive"));
    }
    let center = 0.5 * (p.plasmon_offset(Channel::X) + p.plasmon_offset(Channel::Y));
    for a in Channel::BOTH {
        let kappa = p.channel(a).kappa;
        let reach = span - (p.plasmon_offset(a) - center).abs();
        if kappa > 0.0 && reach < 10.0 * kappa {
            return Err(Error::invalid(
                "span",
                format!(
                    "bath reaches {:.3} meV around the {:?} plasmon, below 10 kappa = {:.3} meV",
                    units::to_mev(reach),
                    a,
                    units::to_mev(10.0 * kappa)
                ),
            ));
        }
    }
    let axis = Axis::new(center, span, modes)?;
    let spacing = axis.step();
    let coupling = |a: Channel| (p.channel(a).kappa * spacing / PI).sqrt();
    Ok(DiscretizedBath {
        offsets: axis.values(),
        center,
        span,
        spacing,
        couplings: [coupling(Channel::X), coupling(Channel::Y)],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntermediateDamping {
    /// Exciton-plus-plasmon amplitude damped by gamma_bx, as printed.
    Printed,
    /// Damped by gamma_ex, the rate implied by the closed form.
    Exciton,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleVariant {
    pub damping: IntermediateDamping,
    /// Keep a factor sqrt(2) on the final photon emission.
    pub final_sqrt2: bool,
}

impl Default for OracleVariant {
    fn default() -> Self {
        OracleVariant {
            damping: IntermediateDamping::Printed,
            final_sqrt2: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplitudeState {
    pub c1: Complex64,
    pub c2: [Complex64; 2],
    pub c3: [Complex64; 2],
    pub c4: [Vec<Complex64>; 2],
    pub c5: [Vec<Complex64>; 2],
    /// Row-major, m then n.
    pub cmn: [Vec<Complex64>; 2],
    pub time: f64,
}

impl AmplitudeState {
    pub fn zeros(modes: usize) -> Self {
        let v = || vec![ZERO; modes];
        AmplitudeState {
            c1: ZERO,
            c2: [ZERO; 2],
            c3: [ZERO; 2],
            c4: [v(), v()],
            c5: [v(), v()],
            cmn: [vec![ZERO; modes * modes], vec![ZERO; modes * modes]],
            time: 0.0,
        }
    }

    /// C1 = 1, everything else empty.
    pub fn biexciton(modes: usize) -> Self {
        AmplitudeState {
            c1: Complex64::new(1.0, 0.0),
            ..Self::zeros(modes)
        }
    }

    pub fn modes(&self) -> usize {
        self.c4[0].len()
    }

    pub fn two_photon_probability(&self) -> f64 {
        self.cmn.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    /// Schrodinger-picture norm: amplitudes of levels carrying dephasing are
    /// scaled by e^{-gamma' t}.
    pub fn norm(&self, p: &CascadeParams) -> f64 {
        let t = self.time;
        let fu = (-2.0 * p.biexciton_dephasing * t).exp();
        let mut n = self.c1.norm_sqr() * fu;
        for a in Channel::BOTH {
            let k = a.index();
            let fe = (-2.0 * p.channel(a).dephasing * t).exp();
            n += self.c2[k].norm_sqr() * fe + self.c3[k].norm_sqr();
            n += self.c4[k].iter().map(|c| c.norm_sqr()).sum::<f64>() * fe;
            n += self.c5[k].iter().map(|c| c.norm_sqr()).sum::<f64>();
        }
        n + self.two_photon_probability()
    }
}

/// Largest step allowed: 0.05 / max(kappa, g, |Delta_p|).
pub fn max_step(p: &CascadeParams) -> f64 {
    let mut fastest: f64 = 0.0;
    for a in Channel::BOTH {
        let c = p.channel(a);
        fastest = fastest
            .max(c.kappa)
            .max(c.g_ex)
            .max(c.g_bx)
            .max(p.complex_detuning(a).norm());
    }
    0.05 / fastest
}

struct Rates {
    gamma_bx: f64,
    gamma_ex: f64,
    gamma2: f64,
    kappa: [f64; 2],
    g_ex: [f64; 2],
    g_bx: [f64; 2],
    omega: [f64; 2],
    /// E1 - E2 per channel.
    theta1: [Complex64; 2],
    /// Delta_p = E2 - E3 = E4 - E5.
    delta: [Complex64; 2],
    /// Plasmon offsets.
    p: [f64; 2],
}

impl Rates {
    fn new(p: &CascadeParams, bath: &DiscretizedBath, variant: OracleVariant) -> Self {
        let per = |f: &dyn Fn(Channel) -> f64| [f(Channel::X), f(Channel::Y)];
        let e = |a: Channel| Complex64::new(p.exciton_offset(a), -p.channel(a).dephasing);
        let e1 = Complex64::new(-p.binding, -p.biexciton_dephasing);
        let theta = |a: Channel| e1 - e(a) - p.plasmon_offset(a);
        let delta = |a: Channel| e(a) - p.plasmon_offset(a);
        Rates {
            gamma_bx: p.gamma_bx,
            gamma_ex: p.gamma_ex,
            gamma2: match variant.damping {
                IntermediateDamping::Printed => p.gamma_bx,
                IntermediateDamping::Exciton => p.gamma_ex,
            },
            kappa: per(&|a| p.channel(a).kappa),
            g_ex: per(&|a| p.channel(a).g_ex),
            g_bx: per(&|a| p.channel(a).g_bx),
            omega: bath.couplings,
            theta1: [theta(Channel::X), theta(Channel::Y)],
            delta: [delta(Channel::X), delta(Channel::Y)],
            p: per(&|a| p.plasmon_offset(a)),
        }
    }
}

/// Flat layout of everything except C_mn: c1, c2x, c2y, c3x, c3y, then
/// c4x, c4y, c5x, c5y (N each).
struct Layout {
    n: usize,
}

impl Layout {
    fn len(&self) -> usize {
        5 + 4 * self.n
    }
    fn c4(&self, k: usize) -> usize {
        5 + k * self.n
    }
    fn c5(&self, k: usize) -> usize {
        5 + (2 + k) * self.n
    }
}

/// Right-hand side at time `t`; `q[k][m] = e^{i (m - p_k) t}`.
fn derivative(t: f64, y: &[Complex64], q: &[Vec<Complex64>; 2], r: &Rates, lay: &Layout, out: &mut [Complex64]) {
    let n = lay.n;
    let c1 = y[0];
    let mut d1 = -r.gamma_bx * c1;
    for k in 0..2 {
        let ph1 = (I * r.theta1[k] * t).exp();
        let ph1_inv = (-I * r.theta1[k] * t).exp();
        let ph_d = (I * r.delta[k] * t).exp();
        let ph_d_inv = (-I * r.delta[k] * t).exp();
        let c2 = y[1 + k];
        let c3 = y[3 + k];
        d1 += -I * r.g_bx[k] * c2 * ph1;
        out[1 + k] = -I * r.g_bx[k] * c1 * ph1_inv - I * SQRT_2 * r.g_ex[k] * c3 * ph_d - (r.gamma2 + r.kappa[k]) * c2;
        out[3 + k] = -I * SQRT_2 * r.g_ex[k] * c2 * ph_d_inv - 2.0 * r.kappa[k] * c3;

        let (i4, i5) = (lay.c4(k), lay.c5(k));
        let a4 = -I * r.g_ex[k] * ph_d;
        let a5 = -I * r.g_ex[k] * ph_d_inv;
        let s4 = -I * r.omega[k] * c2;
        let s5 = -I * SQRT_2 * r.omega[k] * c3;
        let qk = &q[k];
        for m in 0..n {
            let c4 = y[i4 + m];
            let c5 = y[i5 + m];
            out[i4 + m] = a4 * c5 + s4 * qk[m] - r.gamma_ex * c4;
            out[i5 + m] = a5 * c4 + s5 * qk[m] - r.kappa[k] * c5;
        }
    }
    out[0] = d1;
}

/// Rank-one updates `C_mn += a_m q_n` collected and applied in blocks so a
/// row of C_mn stays in cache across many time steps.
struct Accumulator {
    n: usize,
    block: usize,
    coeff: [Vec<Complex64>; 2],
    phase: [Vec<Complex64>; 2],
    filled: usize,
}

impl Accumulator {
    fn new(n: usize, block: usize) -> Self {
        let v = || vec![ZERO; n * block];
        Accumulator {
            n,
            block,
            coeff: [v(), v()],
            phase: [v(), v()],
            filled: 0,
        }
    }

    fn push(
        &mut self,
        coeff: [&[Complex64]; 2],
        phase: [&[Complex64]; 2],
        scale: [Complex64; 2],
        cmn: &mut [Vec<Complex64>; 2],
    ) {
        let (n, b) = (self.n, self.filled);
        for k in 0..2 {
            for m in 0..n {
                self.coeff[k][b * n + m] = coeff[k][m] * scale[k];
            }
            self.phase[k][b * n..(b + 1) * n].copy_from_slice(phase[k]);
        }
        self.filled += 1;
        if self.filled == self.block {
            self.flush(cmn);
        }
    }

    fn flush(&mut self, cmn: &mut [Vec<Complex64>; 2]) {
        let (n, filled) = (self.n, self.filled);
        if filled == 0 {
            return;
        }
        for k in 0..2 {
            let coeff = &self.coeff[k];
            let phase = &self.phase[k];
            par::for_each_chunk(&mut cmn[k], n, |m, row| {
                for b in 0..filled {
                    let a = coeff[b * n + m];
                    if a == ZERO {
                        continue;
                    }
                    let q = &phase[b * n..(b + 1) * n];
                    for (r, &qn) in row.iter_mut().zip(q) {
                        *r += a * qn;
                    }
                }
            });
        }
        self.filled = 0;
    }
}

/// Fixed-step RK4 from `state0.time` to `t_final`.
pub fn integrate(
    state0: &AmplitudeState,
    bath: &DiscretizedBath,
    p: &CascadeParams,
    variant: OracleVariant,
    t_final: f64,
    dt: f64,
) -> Result<AmplitudeState> {
    p.validate()?;
    let n = bath.modes();
    if state0.modes() != n || state0.cmn[0].len() != n * n {
        return Err(Error::invalid("state", "mode count differs from the bath"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Numerical("step size underflow".into()));
    }
    if dt > max_step(p) * (1.0 + 1e-12) {
        return Err(Error::invalid(
            "dt",
            format!("{dt:e} exceeds 0.05/max(kappa, g, |Delta_p|) = {:e}", max_step(p)),
        ));
    }
    if p.gamma_ex > 0.0 && t_final < 20.0 / p.gamma_ex * (1.0 - 1e-12) {
        return Err(Error::invalid("t_final", "must reach 20/gamma_ex"));
    }
    let steps = ((t_final - state0.time) / dt).ceil();
    if !(steps >= 0.0) || steps > 1e8 {
        return Err(Error::Numerical(format!(
            "step size underflow: {steps} steps requested"
        )));
    }
    let steps = steps as usize;

    let r = Rates::new(p, bath, variant);
    let lay = Layout { n };
    let mut y = vec![ZERO; lay.len()];
    y[0] = state0.c1;
    for k in 0..2 {
        y[1 + k] = state0.c2[k];
        y[3 + k] = state0.c3[k];
        y[lay.c4(k)..lay.c4(k) + n].copy_from_slice(&state0.c4[k]);
        y[lay.c5(k)..lay.c5(k) + n].copy_from_slice(&state0.c5[k]);
    }
    let mut cmn = state0.cmn.clone();
    let final_coupling = if variant.final_sqrt2 { SQRT_2 } else { 1.0 };

    let phases = |t: f64| -> [Vec<Complex64>; 2] {
        let f = |k: usize| bath.offsets.iter().map(|&m| (I * ((m - r.p[k]) * t)).exp()).collect();
        [f(0), f(1)]
    };
    let half_turn: [Vec<Complex64>; 2] = {
        let f = |k: usize| {
            bath.offsets
                .iter()
                .map(|&m| (I * ((m - r.p[k]) * 0.5 * dt)).exp())
                .collect()
        };
        [f(0), f(1)]
    };
    let advance = |q: &[Vec<Complex64>; 2], out: &mut [Vec<Complex64>; 2]| {
        for k in 0..2 {
            for ((o, a), b) in out[k].iter_mut().zip(&q[k]).zip(&half_turn[k]) {
                *o = a * b;
            }
        }
    };

    let len = lay.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![ZERO; len],
        vec![ZERO; len],
        vec![ZERO; len],
        vec![ZERO; len],
        vec![ZERO; len],
    );
    let mut acc = Accumulator::new(n, 64);
    let mut carry: [Vec<Complex64>; 2] = [vec![ZERO; n], vec![ZERO; n]];
    let mut mid: [Vec<Complex64>; 2] = [vec![ZERO; n], vec![ZERO; n]];
    let mut node_sum: [Vec<Complex64>; 2] = [vec![ZERO; n], vec![ZERO; n]];
    let mut q0 = phases(state0.time);
    let mut qh = q0.clone();
    let mut q1 = q0.clone();
    let scale = [
        -I * final_coupling * r.omega[0] * (dt / 6.0),
        -I * final_coupling * r.omega[1] * (dt / 6.0),
    ];

    let mut t = state0.time;
    for step in 0..steps {
        if step % 512 == 0 {
            q0 = phases(t);
        }
        advance(&q0, &mut qh);
        advance(&qh, &mut q1);

        derivative(t, &y, &q0, &r, &lay, &mut k1);
        for i in 0..len {
            tmp[i] = y[i] + k1[i] * (0.5 * dt);
        }
        derivative(t + 0.5 * dt, &tmp, &qh, &r, &lay, &mut k2);
        for k in 0..2 {
            let i5 = lay.c5(k);
            for m in 0..n {
                mid[k][m] = tmp[i5 + m] * 2.0;
            }
        }
        for i in 0..len {
            tmp[i] = y[i] + k2[i] * (0.5 * dt);
        }
        derivative(t + 0.5 * dt, &tmp, &qh, &r, &lay, &mut k3);
        for k in 0..2 {
            let i5 = lay.c5(k);
            for m in 0..n {
                mid[k][m] += tmp[i5 + m] * 2.0;
            }
        }
        for i in 0..len {
            tmp[i] = y[i] + k3[i] * dt;
        }
        derivative(t + dt, &tmp, &q1, &r, &lay, &mut k4);

        // C_mn source at the three RK4 nodes; the end node of this step is
        // merged with the start node of the next.
        for k in 0..2 {
            let i5 = lay.c5(k);
            for m in 0..n {
                node_sum[k][m] = y[i5 + m] + carry[k][m];
                carry[k][m] = tmp[i5 + m];
            }
        }
        acc.push([&node_sum[0], &node_sum[1]], [&q0[0], &q0[1]], scale, &mut cmn);
        acc.push([&mid[0], &mid[1]], [&qh[0], &qh[1]], scale, &mut cmn);

        for i in 0..len {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
        t = state0.time + (step + 1) as f64 * dt;
        std::mem::swap(&mut q0, &mut q1);

        if acc.filled == 0 || step + 1 == steps {
            if step + 1 == steps {
                acc.push([&carry[0], &carry[1]], [&q0[0], &q0[1]], scale, &mut cmn);
                acc.flush(&mut cmn);
            }
            let snapshot = unpack(&y, &lay, &cmn, t);
            let norm = snapshot.norm(p);
            if !(norm <= 1.01) {
                return Err(Error::NormBlowUp { norm, time: t });
            }
        }
    }
    if steps == 0 {
        return Ok(state0.clone());
    }
    Ok(unpack(&y, &lay, &cmn, t))
}

fn unpack(y: &[Complex64], lay: &Layout, cmn: &[Vec<Complex64>; 2], t: f64) -> AmplitudeState {
    let n = lay.n;
    let slice = |i: usize| y[i..i + n].to_vec();
    AmplitudeState {
        c1: y[0],
        c2: [y[1], y[2]],
        c3: [y[3], y[4]],
        c4: [slice(lay.c4(0)), slice(lay.c4(1))],
        c5: [slice(lay.c5(0)), slice(lay.c5(1))],
        cmn: cmn.clone(),
        time: t,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeError {
    pub channel: Channel,
    pub m_offset_mev: f64,
    pub n_offset_mev: f64,
    pub oracle: f64,
    pub analytic: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub mean: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub modes: usize,
    pub spacing_mev: f64,
    pub dt: f64,
    pub t_final: f64,
    pub variant: OracleVariant,
    pub probes: Vec<ProbeError>,
    pub mean_rel_error: f64,
    pub max_rel_error: f64,
    pub per_channel: [ErrorSummary; 2],
    pub final_norm: f64,
    pub two_photon_oracle: f64,
    pub two_photon_analytic: f64,
}

fn summarize(errors: impl Iterator<Item = f64>) -> ErrorSummary {
    let v: Vec<f64> = errors.collect();
    if v.is_empty() {
        return ErrorSummary { mean: 0.0, max: 0.0 };
    }
    ErrorSummary {
        mean: v.iter().sum::<f64>() / v.len() as f64,
        max: v.iter().cloned().fold(0.0, f64::max),
    }
}

/// Compares |C_mn|^2 with |c(omega_m, omega_n)|^2 spacing^2 on a 5x5 block of
/// modes around each channel's resonance.
pub fn compare_to_analytic(
    state: &AmplitudeState,
    bath: &DiscretizedBath,
    grid: &AmplitudeGrid,
    p: &CascadeParams,
    dt: f64,
    variant: OracleVariant,
) -> Result<OracleReport> {
    let n = bath.modes();
    let g = &grid.grid;
    let shift = g.omega0 - p.omega0;
    let locate = |axis: &Axis, x: f64| -> Result<usize> {
        let i = axis
            .nearest(x - shift)
            .ok_or_else(|| Error::invalid("grid", "bath mode outside the analytic grid"))?;
        if (axis.value(i) + shift - x).abs() > 1e-6 * axis.step() {
            return Err(Error::invalid(
                "grid",
                "bath modes do not coincide with analytic grid points",
            ));
        }
        Ok(i)
    };
    let rows: Vec<usize> = bath
        .offsets
        .iter()
        .map(|&x| locate(&g.biexciton, x))
        .collect::<Result<_>>()?;
    let cols: Vec<usize> = bath
        .offsets
        .iter()
        .map(|&x| locate(&g.exciton, x))
        .collect::<Result<_>>()?;

    let area = bath.spacing * bath.spacing;
    let nearest_mode = |x: f64| -> usize {
        let i = ((x - bath.offsets[0]) / bath.spacing).round();
        (i.max(2.0) as usize).min(n - 3)
    };
    let mut probes = Vec::new();
    for a in Channel::BOTH {
        let k = a.index();
        let cm = nearest_mode(-p.binding - p.exciton_offset(a));
        let cn = nearest_mode(p.exciton_offset(a));
        for m in cm - 2..=cm + 2 {
            for j in cn - 2..=cn + 2 {
                let oracle = state.cmn[k][m * n + j].norm_sqr();
                let analytic = grid.channel(a)[[rows[m], cols[j]]].norm_sqr() * area;
                let rel_error = if analytic == 0.0 && oracle == 0.0 {
                    0.0
                } else {
                    (oracle - analytic).abs() / analytic
                };
                probes.push(ProbeError {
                    channel: a,
                    m_offset_mev: units::to_mev(bath.offsets[m]),
                    n_offset_mev: units::to_mev(bath.offsets[j]),
                    oracle,
                    analytic,
                    rel_error,
                });
            }
        }
    }
    let all = summarize(probes.iter().map(|e| e.rel_error));
    let per = |a: Channel| summarize(probes.iter().filter(|e| e.channel == a).map(|e| e.rel_error));
    let mut analytic_total = 0.0;
    for a in Channel::BOTH {
        for &i in &rows {
            for &j in &cols {
                analytic_total += grid.channel(a)[[i, j]].norm_sqr() * area;
            }
        }
    }
    Ok(OracleReport {
        modes: n,
        spacing_mev: units::to_mev(bath.spacing),
        dt,
        t_final: state.time,
        variant,
        mean_rel_error: all.mean,
        max_rel_error: all.max,
        per_channel: [per(Channel::X), per(Channel::Y)],
        probes,
        final_norm: state.norm(p),
        two_photon_oracle: state.two_photon_probability(),
        two_photon_analytic: analytic_total,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleSettings {
    pub modes: usize,
    /// Half-width of the bath; `None` gives 10 kappa beyond the farther plasmon line.
    pub span: Option<f64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub variant: OracleVariant,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            modes: 400,
            span: None,
            dt: None,
            t_final: None,
            variant: OracleVariant::default(),
        }
    }
}

pub fn default_span(p: &CascadeParams) -> f64 {
    let center = 0.5 * (p.plasmon_offset(Channel::X) + p.plasmon_offset(Channel::Y));
    Channel::BOTH
        .iter()
        .map(|&a| 10.0 * p.channel(a).kappa + (p.plasmon_offset(a) - center).abs())
        .fold(0.0, f64::max)
}

/// Build the bath, integrate from the biexciton, compare with the closed form.
pub fn run_oracle(p: &CascadeParams, s: &OracleSettings) -> Result<OracleReport> {
    let span = s.span.unwrap_or_else(|| default_span(p));
    let bath = build_bath(p, s.modes, span)?;
    let dt = s.dt.unwrap_or_else(|| max_step(p));
    let t_final = s.t_final.unwrap_or(if p.gamma_ex > 0.0 {
        20.0 / p.gamma_ex
    } else {
        20.0 / p.x.kappa.max(p.y.kappa)
    });
    let state = integrate(&AmplitudeState::biexciton(s.modes), &bath, p, s.variant, t_final, dt)?;
    let axis = bath.axis();
    let grid = amplitude_grid(p, &FrequencyGrid::new(p.omega0, axis, axis))?;
    compare_to_analytic(&state, &bath, &grid, p, dt, s.variant)
}
