//! Spectral filtering, the filtered off-diagonal element gamma' and the
//! two-qubit polarization density matrix.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::cascade::{AmplitudeGrid, Axis, CascadeParams, Kernel};
use crate::config::WindowMode;
use crate::error::{Error, Result};
use crate::par;
use crate::units;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralWindow {
    pub half_width: f64,
    pub omega0: f64,
    pub binding: f64,
    pub mode: WindowMode,
}

impl SpectralWindow {
    pub fn new(half_width: f64, omega0: f64, binding: f64, mode: WindowMode) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::invalid("filter width", "must be positive"));
        }
        Ok(SpectralWindow {
            half_width,
            omega0,
            binding,
            mode,
        })
    }

    pub fn for_params(p: &CascadeParams, half_width: f64, mode: WindowMode) -> Result<Self> {
        Self::new(half_width, p.omega0, p.binding, mode)
    }

    fn exciton_band(&self, offset: f64) -> bool {
        offset.abs() < self.half_width
    }

    fn biexciton_band(&self, offset: f64) -> bool {
        (offset + self.binding).abs() < self.half_width
    }

    /// W(omega_m, omega_n) for offsets from omega0.
    pub fn weight_offsets(&self, m: f64, n: f64) -> bool {
        match self.mode {
            WindowMode::Product => self.biexciton_band(m) && self.exciton_band(n),
            WindowMode::Single => {
                (self.exciton_band(m) || self.biexciton_band(m)) && (self.exciton_band(n) || self.biexciton_band(n))
            }
        }
    }

    pub fn weight(&self, omega_m: f64, omega_n: f64) -> bool {
        self.weight_offsets(omega_m - self.omega0, omega_n - self.omega0)
    }

    /// Closed intervals (offsets) on which the window is one, for the
    /// biexciton and exciton axes.
    fn bands(&self) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let w = self.half_width;
        let e = (-w, w);
        let b = (-self.binding - w, -self.binding + w);
        match self.mode {
            WindowMode::Product => (vec![b], vec![e]),
            WindowMode::Single => {
                let both = if b.1 >= e.0 { vec![(b.0, e.1)] } else { vec![b, e] };
                (both.clone(), both)
            }
        }
    }
}

/// One-dimensional window value: 1 inside either line's band.
pub fn window_value(omega: f64, window: &SpectralWindow) -> bool {
    let x = omega - window.omega0;
    window.exciton_band(x) || window.biexciton_band(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FilteredEntanglement {
    pub p: Complex64,
    pub t: f64,
    pub h: f64,
    pub gamma_prime: Complex64,
    pub concurrence: f64,
    pub alpha_sq: f64,
    pub beta_sq: f64,
}

impl FilteredEntanglement {
    pub fn from_integrals(p: Complex64, t: f64, h: f64) -> Result<Self> {
        let total = t + h;
        if !(total > 0.0) {
            return Err(Error::EmptyWindow);
        }
        let gamma_prime = p / total;
        Ok(FilteredEntanglement {
            p,
            t,
            h,
            gamma_prime,
            concurrence: 2.0 * gamma_prime.norm(),
            alpha_sq: t / total,
            beta_sq: h / total,
        })
    }

    pub fn gamma_prime_abs(&self) -> f64 {
        self.gamma_prime.norm()
    }
}

fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Window-masked trapezoid integrals over an existing amplitude grid.
pub fn filtered_integrals(grid: &AmplitudeGrid, window: &SpectralWindow) -> Result<FilteredEntanglement> {
    let g = &grid.grid;
    let shift = g.omega0 - window.omega0;
    let (rows, cols) = g.shape();
    let partial = par::map(rows, |i| {
        let m = g.biexciton.value(i) + shift;
        let wi = trapezoid_weight(i, rows);
        let mut acc = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        for j in 0..cols {
            if !window.weight_offsets(m, g.exciton.value(j) + shift) {
                continue;
            }
            let w = wi * trapezoid_weight(j, cols);
            let (x, y) = (grid.c_x[[i, j]], grid.c_y[[i, j]]);
            acc.0 += x.conj() * y * w;
            acc.1 += x.norm_sqr() * w;
            acc.2 += y.norm_sqr() * w;
        }
        acc
    });
    let area = g.biexciton.step() * g.exciton.step();
    let (p, t, h) = sum_rows(&partial);
    FilteredEntanglement::from_integrals(p * area, t * area, h * area)
}

fn sum_rows(rows: &[(Complex64, f64, f64)]) -> (Complex64, f64, f64) {
    rows.iter().fold((Complex64::new(0.0, 0.0), 0.0, 0.0), |a, r| {
        (a.0 + r.0, a.1 + r.1, a.2 + r.2)
    })
}

/// Resolution rule for window-aligned integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quadrature {
    /// Samples per narrowest line width.
    pub per_linewidth: f64,
    /// Upper bound on the step, Hartree.
    pub max_step: f64,
    pub min_points: usize,
    pub max_points: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            per_linewidth: 6.0,
            max_step: units::from_mev(0.1),
            min_points: 41,
            max_points: 8001,
        }
    }
}

impl Quadrature {
    /// Narrowest amplitude feature: the exciton line or the two-photon ridge.
    pub fn linewidth_floor(p: &CascadeParams) -> f64 {
        let exciton = p.gamma_ex + p.x.dephasing.min(p.y.dephasing);
        let ridge = p.gamma_bx + p.biexciton_dephasing;
        exciton.min(ridge)
    }

    pub fn step(&self, p: &CascadeParams) -> f64 {
        let floor = Self::linewidth_floor(p);
        let base = if floor > 0.0 {
            floor.min(self.max_step)
        } else {
            self.max_step
        };
        base / self.per_linewidth
    }

    fn axis(&self, lo: f64, hi: f64, step: f64) -> (Axis, bool) {
        let want = ((hi - lo) / step).ceil() as usize + 1;
        let mut n = want.max(self.min_points);
        let capped = n > self.max_points;
        n = n.min(self.max_points);
        if n % 2 == 0 {
            n += 1;
        }
        (Axis::between(lo, hi, n).expect("band has positive width"), capped)
    }
}

/// Filtered integrals evaluated only inside the window bands, on grids
/// aligned with the band edges and fine enough for the narrowest line.
pub fn filtered_entanglement(
    p: &CascadeParams,
    window: &SpectralWindow,
    quad: &Quadrature,
) -> Result<(FilteredEntanglement, Vec<String>)> {
    p.validate()?;
    let kernel = Kernel::new(p);
    let shift = window.omega0 - p.omega0;
    let step = quad.step(p);
    let (m_bands, n_bands) = window.bands();
    let mut warnings = Vec::new();
    let mut total = (Complex64::new(0.0, 0.0), 0.0, 0.0);
    for &(mlo, mhi) in &m_bands {
        for &(nlo, nhi) in &n_bands {
            let (am, cm) = quad.axis(mlo + shift, mhi + shift, step);
            let (an, cn) = quad.axis(nlo + shift, nhi + shift, step);
            if cm || cn {
                warnings.push(format!(
                    "filter quadrature capped at {} points per axis; step {:.3e} meV exceeds the target {:.3e} meV",
                    quad.max_points,
                    units::to_mev(am.step().max(an.step())),
                    units::to_mev(step)
                ));
            }
            let ns = an.values();
            let partial = par::map(am.points, |i| -> Result<(Complex64, f64, f64)> {
                let m = am.value(i);
                let wi = trapezoid_weight(i, am.points);
                let mut acc = (Complex64::new(0.0, 0.0), 0.0, 0.0);
                for (j, &n) in ns.iter().enumerate() {
                    let [x, y] = kernel.amplitudes(m, n)?;
                    let w = wi * trapezoid_weight(j, an.points);
                    acc.0 += x.conj() * y * w;
                    acc.1 += x.norm_sqr() * w;
                    acc.2 += y.norm_sqr() * w;
                }
                Ok(acc)
            });
            let partial: Vec<_> = partial.into_iter().collect::<Result<_>>()?;
            let area = am.step() * an.step();
            let (pp, t, h) = sum_rows(&partial);
            total.0 += pp * area;
            total.1 += t * area;
            total.2 += h * area;
        }
    }
    Ok((
        FilteredEntanglement::from_integrals(total.0, total.1, total.2)?,
        warnings,
    ))
}

/// Two-photon polarization state in the basis {xx, xy, yx, yy}.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationDensityMatrix {
    rho: Matrix4<Complex64>,
}

impl PolarizationDensityMatrix {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(rho: Matrix4<Complex64>) -> Result<Self> {
        let scale = rho.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        if (rho - rho.adjoint()).iter().any(|v| v.norm() > 1e-10 * scale) {
            return Err(Error::invalid("density matrix", "not Hermitian"));
        }
        if (rho.trace() - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::invalid("density matrix", "trace differs from one"));
        }
        let eig = SymmetricEigen::new(rho);
        if eig.eigenvalues.iter().any(|&l| l < -1e-10) {
            return Err(Error::invalid("density matrix", "not positive semidefinite"));
        }
        Ok(PolarizationDensityMatrix { rho })
    }

    /// alpha^2 |xx><xx| + beta^2 |yy><yy| + gamma |xx><yy| + h.c.
    pub fn from_weights(alpha_sq: f64, beta_sq: f64, gamma: Complex64) -> Result<Self> {
        let mut rho = Matrix4::zeros();
        rho[(0, 0)] = Complex64::new(alpha_sq, 0.0);
        rho[(3, 3)] = Complex64::new(beta_sq, 0.0);
        rho[(0, 3)] = gamma;
        rho[(3, 0)] = gamma.conj();
        Self::new(rho)
    }

    pub fn from_filtered(f: &FilteredEntanglement) -> Result<Self> {
        Self::from_weights(f.alpha_sq, f.beta_sq, f.gamma_prime)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.rho
    }

    pub fn gamma(&self) -> Complex64 {
        self.rho[(0, 3)]
    }
}

fn spin_flip() -> Matrix4<Complex64> {
    // sigma_y (x) sigma_y
    let mut s = Matrix4::zeros();
    s[(0, 3)] = Complex64::new(-1.0, 0.0);
    s[(1, 2)] = Complex64::new(1.0, 0.0);
    s[(2, 1)] = Complex64::new(1.0, 0.0);
    s[(3, 0)] = Complex64::new(-1.0, 0.0);
    s
}

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), with l_i the square roots
/// of the eigenvalues of rho (sy x sy) rho* (sy x sy), computed as the
/// eigenvalues of the Hermitian sqrt(rho) rho~ sqrt(rho).
pub fn concurrence_of_matrix(rho: &PolarizationDensityMatrix) -> f64 {
    let eig = SymmetricEigen::new(rho.rho);
    let root = eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let sqrt_rho = eig.eigenvectors * Matrix4::from_diagonal(&root) * eig.eigenvectors.adjoint();
    let s = spin_flip();
    let tilde = s * rho.rho.conjugate() * s;
    let m = sqrt_rho * tilde * sqrt_rho;
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let ev = SymmetricEigen::new(herm).eigenvalues;
    // Zero eigenvalues come back at round-off level; their square roots would not.
    let floor = 64.0 * f64::EPSILON * ev.iter().cloned().fold(0.0, f64::max);
    let mut l: Vec<f64> = ev.iter().map(|&v| if v <= floor { 0.0 } else { v.sqrt() }).collect();
    l.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}
