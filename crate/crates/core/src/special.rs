//! Spherical Bessel and Hankel functions of complex argument.
//!
//! `j_n` comes from a power series for |z| <= 1 and from Miller's downward
//! recurrence otherwise; `h1_n` from upward recurrence, which is stable for
//! the dominant solution.

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    J,
    H1,
}

fn series_j(n: usize, z: Complex64) -> Complex64 {
    let mut pref = ONE;
    for k in 1..=n {
        pref = pref * z / (2 * k + 1) as f64;
    }
    let q = -z * z * 0.5;
    let mut term = ONE;
    let mut sum = ONE;
    for k in 1..200 {
        term = term * q / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    pref * sum
}

/// `j_0(z) .. j_nmax(z)`.
pub fn bessel_j_all(nmax: usize, z: Complex64) -> Result<Vec<Complex64>> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::invalid("z", "non-finite argument"));
    }
    let r = z.norm();
    if r <= 1.0 {
        return Ok((0..=nmax).map(|n| series_j(n, z)).collect());
    }

    // Downward recurrence length grows with |z|.
    if r > 1e7 {
        return Err(Error::Overflow("spherical Bessel j"));
    }
    let top = nmax.max(1);
    let start = top + r.ceil() as usize + 40;
    let mut out = vec![Complex64::new(0.0, 0.0); top + 1];
    let mut f_next = Complex64::new(0.0, 0.0);
    let mut f = Complex64::new(1e-30, 0.0);
    for k in (1..=start).rev() {
        if k <= top {
            out[k] = f;
        }
        let f_prev = f * ((2 * k + 1) as f64) / z - f_next;
        f_next = f;
        f = f_prev;
        if f.norm() > 1e250 {
            f *= 1e-250;
            f_next *= 1e-250;
            for v in out.iter_mut().skip(k.min(top + 1)) {
                *v *= 1e-250;
            }
        }
    }
    out[0] = f;

    let (s, c) = (z.sin(), z.cos());
    let j0 = s / z;
    let j1 = s / (z * z) - c / z;
    if !(j0.re.is_finite() && j0.im.is_finite() && j1.re.is_finite() && j1.im.is_finite()) {
        return Err(Error::Overflow("spherical Bessel j"));
    }
    let scale = if j0.norm() >= j1.norm() {
        j0 / out[0]
    } else {
        j1 / out[1]
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out.truncate(nmax + 1);
    if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Overflow("spherical Bessel j"));
    }
    Ok(out)
}

/// `h1_0(z) .. h1_nmax(z)`.
pub fn hankel1_all(nmax: usize, z: Complex64) -> Result<Vec<Complex64>> {
    if z.norm() == 0.0 {
        return Err(Error::invalid("z", "spherical Hankel function undefined at z = 0"));
    }
    let e = (I * z).exp();
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(-I * e / z);
    if nmax >= 1 {
        out.push(-e * (z + I) / (z * z));
    }
    for n in 1..nmax {
        let next = out[n] * ((2 * n + 1) as f64) / z - out[n - 1];
        out.push(next);
    }
    if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Overflow("spherical Hankel h1"));
    }
    Ok(out)
}

pub fn spherical_bessel_j(n: usize, z: Complex64) -> Result<Complex64> {
    Ok(bessel_j_all(n, z)?[n])
}

pub fn spherical_hankel1(n: usize, z: Complex64) -> Result<Complex64> {
    Ok(hankel1_all(n, z)?[n])
}

pub fn spherical_bessel_y(n: usize, z: Complex64) -> Result<Complex64> {
    Ok(-I * (spherical_hankel1(n, z)? - spherical_bessel_j(n, z)?))
}

/// `d[z f_n(z)]/dz = z f_{n-1}(z) - n f_n(z)` given `f_0 .. f_n`.
pub(crate) fn riccati_from(values: &[Complex64], n: usize, z: Complex64, kind: Kind) -> Complex64 {
    if n == 0 {
        match kind {
            Kind::J => z.cos(),
            Kind::H1 => (I * z).exp(),
        }
    } else {
        z * values[n - 1] - values[n] * n as f64
    }
}

pub fn riccati_derivative(n: usize, z: Complex64, kind: Kind) -> Result<Complex64> {
    let values = match kind {
        Kind::J => bessel_j_all(n, z)?,
        Kind::H1 => hankel1_all(n, z)?,
    };
    Ok(riccati_from(&values, n, z, kind))
}
