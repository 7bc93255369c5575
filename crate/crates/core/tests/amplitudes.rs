use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Matrix2, Matrix5};
use num_complex::Complex64;
use plasmon_cascade::cascade::*;
use plasmon_cascade::config::parse_config;
use plasmon_cascade::units::{from_ev, from_mev};
use proptest::prelude::*;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn reference() -> CascadeParams {
    parse_config("").unwrap().model().unwrap().params
}

/// Complex exciton energy and plasmon energy, both relative to omega0.
fn levels(p: &CascadeParams, a: Channel) -> (Complex64, f64) {
    let c = p.channel(a);
    let sign = if a == Channel::X { 0.5 } else { -0.5 };
    let e = Complex64::new(sign * p.fss, -c.dephasing);
    (e, e.re - c.detuning)
}

/// Second encoding, written straight from the printed amplitude with every
/// frequency measured from omega0.
fn amplitude_by_hand(m: f64, n: f64, a: Channel, p: &CascadeParams) -> Complex64 {
    let f = |b: Channel| {
        let c = p.channel(b);
        let (e, wp) = levels(p, b);
        let first = m + n - e - wp + I * c.kappa + I * p.gamma_ex;
        let second = m + n - 2.0 * wp + 2.0 * I * c.kappa;
        2.0 * c.g_ex * c.g_ex - first * second
    };
    let u = Complex64::new(-p.binding, -p.biexciton_dephasing);
    let (fx, fy) = (f(Channel::X), f(Channel::Y));
    let branch = |b: Channel, other_f: Complex64| {
        let c = p.channel(b);
        let (_, wp) = levels(p, b);
        c.g_bx * c.g_bx * other_f * (m + n - 2.0 * wp + 2.0 * I * c.kappa)
    };
    let d = (m + n - u + I * p.gamma_bx) * fx * fy + branch(Channel::X, fy) + branch(Channel::Y, fx);
    let c = p.channel(a);
    let (e, wp) = levels(p, a);
    let omega = (c.kappa / PI).sqrt();
    let other = if a == Channel::X { fy } else { fx };
    let num = m + 3.0 * n - 2.0 * e - 2.0 * wp + 2.0 * I * c.kappa + 2.0 * I * p.gamma_ex;
    let den = (n - e + I * p.gamma_ex) * (n - wp + I * c.kappa) - c.g_ex * c.g_ex;
    c.g_bx * omega * other / d * c.g_ex * omega * num / den
}

#[test]
fn closed_form_matches_second_encoding() {
    let p = reference();
    let grid = FrequencyGrid::for_params(&p, 401, None).unwrap();
    let amps = amplitude_grid(&p, &grid).unwrap();
    let mut worst: f64 = 0.0;
    for i in (0..401).step_by(20) {
        for j in (0..401).step_by(20) {
            let (m, n) = (grid.biexciton.value(i), grid.exciton.value(j));
            for a in Channel::BOTH {
                let want = amplitude_by_hand(m, n, a, &p);
                let got = amps.channel(a)[[i, j]];
                worst = worst.max((got - want).norm() / want.norm());
            }
        }
    }
    assert!(worst < 1e-12, "{worst:e}");
}

/// D as the determinant of the biexciton / exciton-plasmon / two-plasmon
/// block matrix, F as minus the determinant of each channel block.
#[test]
fn denominator_is_a_determinant() {
    let p = reference();
    let zero = Complex64::new(0.0, 0.0);
    for (dm, dn) in [(0.0, 0.0), (-1.0, 0.05), (-0.5, -0.5), (3.0, -7.0), (-40.0, 25.0)] {
        let (m, n) = (from_mev(dm), from_mev(dn));
        let s = m + n;
        let u = Complex64::new(-p.binding, -p.biexciton_dephasing);
        let block = |a: Channel| {
            let c = p.channel(a);
            let (e, wp) = levels(&p, a);
            (
                s - e - wp + I * (c.kappa + p.gamma_ex),
                s - 2.0 * wp + 2.0 * I * c.kappa,
                SQRT_2 * c.g_ex,
                c.g_bx,
            )
        };
        let (ax, bx, kx, gx) = block(Channel::X);
        let (ay, by, ky, gy) = block(Channel::Y);
        let g = |v: f64| Complex64::new(v, 0.0);
        #[rustfmt::skip]
        let mat = Matrix5::from_row_slice(&[
            s - u + I * p.gamma_bx, g(gx), zero, g(gy), zero,
            g(gx), ax, g(kx), zero, zero,
            zero, g(kx), bx, zero, zero,
            g(gy), zero, zero, ay, g(ky),
            zero, zero, zero, g(ky), by,
        ]);
        let det = mat.lu().determinant();
        let (wm, wn) = (p.omega0 + m, p.omega0 + n);
        let d = d_denominator(wm, wn, &p).unwrap();
        assert!((d - det).norm() <= 1e-10 * det.norm(), "{d} vs {det}");
        let fx = -Matrix2::new(ax, g(kx), g(kx), bx).determinant();
        let got = f_alpha(wm, wn, Channel::X, &p);
        assert!((got - fx).norm() <= 1e-10 * fx.norm());
    }
}

#[test]
fn channel_swap_is_exact() {
    let p = reference();
    let q = p.swapped();
    let grid = FrequencyGrid::for_params(&p, 201, None).unwrap();
    let a = amplitude_grid(&p, &grid).unwrap();
    let b = amplitude_grid(&q, &grid).unwrap();
    assert_eq!(a.c_x, b.c_y);
    assert_eq!(a.c_y, b.c_x);
}

#[test]
fn closed_channel_is_silent() {
    let mut p = reference();
    p.y.g_bx = 0.0;
    let grid = FrequencyGrid::for_params(&p, 201, None).unwrap();
    let a = amplitude_grid(&p, &grid).unwrap();
    assert!(a.c_y.iter().all(|c| c.norm() == 0.0));
    assert!(a.c_x.iter().any(|c| c.norm() > 0.0));
    for c in [&mut p.x, &mut p.y] {
        c.g_bx = 0.0;
    }
    let a = amplitude_grid(&p, &grid).unwrap();
    assert!(a.c_x.iter().chain(a.c_y.iter()).all(|c| c.norm() == 0.0));
}

#[test]
fn symmetric_channels_agree() {
    let mut p = reference();
    p.fss = 0.0;
    p.y = p.x;
    let grid = FrequencyGrid::for_params(&p, 201, None).unwrap();
    let a = amplitude_grid(&p, &grid).unwrap();
    assert_eq!(a.c_x, a.c_y);
    let fx = f_alpha(p.omega0, p.omega0 - p.binding, Channel::X, &p);
    let fy = f_alpha(p.omega0, p.omega0 - p.binding, Channel::Y, &p);
    assert_eq!(fx, fy);
}

#[test]
fn denominator_without_cascade_coupling_reduces() {
    let mut p = reference();
    p.x.g_bx = 0.0;
    p.y.g_bx = 0.0;
    let (wm, wn) = (p.omega0 - p.binding, p.omega0 + from_mev(0.3));
    let s = wm + wn - 2.0 * p.omega0;
    let u = Complex64::new(-p.binding, -p.biexciton_dephasing);
    let want = (s - u + I * p.gamma_bx) * f_alpha(wm, wn, Channel::X, &p) * f_alpha(wm, wn, Channel::Y, &p);
    let got = d_denominator(wm, wn, &p).unwrap();
    assert!((got - want).norm() <= 1e-10 * want.norm());
}

#[test]
fn uncoupled_denominator_is_never_real() {
    let mut p = reference();
    for c in [&mut p.x, &mut p.y] {
        c.g_ex = 0.0;
        c.g_bx = 0.0;
    }
    for k in 0..100 {
        let dm = -60.0 + 1.2 * k as f64;
        let dn = 37.0 - 0.7 * k as f64;
        let d = d_denominator(p.omega0 + from_mev(dm), p.omega0 + from_mev(dn), &p).unwrap();
        assert!(d.im != 0.0 && d.norm() > 0.0);
    }
}

#[test]
fn joint_maximum_sits_on_a_resonance() {
    let p = reference();
    let grid = FrequencyGrid::for_params(&p, 201, None).unwrap();
    let a = amplitude_grid(&p, &grid).unwrap();
    let h = grid.exciton.step();
    for ch in Channel::BOTH {
        let (mut best, mut at) = (0.0, (0, 0));
        for ((i, j), c) in a.channel(ch).indexed_iter() {
            if c.norm_sqr() > best {
                best = c.norm_sqr();
                at = (i, j);
            }
        }
        let (m, n) = (grid.biexciton.value(at.0), grid.exciton.value(at.1));
        let e = p.exciton_offset(ch);
        assert!((n - e).abs() <= h, "{ch:?} exciton photon off resonance");
        assert!((m + n + p.binding).abs() <= 2.0 * h, "{ch:?} off the energy ridge");
    }
}

/// Toy cascade with narrow lines and no loss outside the plasmon channels,
/// where the two-photon probability must approach one.
fn lossless() -> CascadeParams {
    let ch = |det: f64| ChannelParams {
        detuning: from_mev(det),
        dephasing: 0.0,
        kappa: from_mev(5.0),
        g_ex: from_mev(0.8),
        g_bx: from_mev(0.8),
    };
    CascadeParams {
        omega0: from_ev(2.5),
        fss: from_mev(0.1),
        binding: from_mev(1.0),
        biexciton_dephasing: 0.0,
        gamma_ex: from_mev(1e-4),
        gamma_bx: from_mev(2e-4),
        x: ch(0.5),
        y: ch(-0.5),
        kappa_form: KappaForm::ChannelConsistent,
    }
}

#[test]
fn two_photon_probability_is_bounded_and_saturates() {
    let p = lossless();
    let grid = FrequencyGrid::for_params(&p, 2401, Some(from_mev(40.0))).unwrap();
    let a = amplitude_grid(&p, &grid).unwrap();
    let area = grid.biexciton.step() * grid.exciton.step();
    let total: f64 = a.c_x.iter().chain(a.c_y.iter()).map(|c| c.norm_sqr()).sum::<f64>() * area;
    assert!(total <= 1.0 + 1e-6, "{total}");
    assert!(total >= 0.9, "{total}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn swap_symmetry_pointwise(dm in -60.0f64..60.0, dn in -60.0f64..60.0, det in -5.0f64..5.0, fss in 0.0f64..0.5) {
        let mut p = reference();
        p.fss = from_mev(fss);
        p.y.detuning = from_mev(det);
        let q = p.swapped();
        let (wm, wn) = (p.omega0 + from_mev(dm), p.omega0 + from_mev(dn));
        let a = two_photon_amplitude(wm, wn, Channel::X, &p).unwrap();
        let b = two_photon_amplitude(wm, wn, Channel::Y, &q).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm());
    }
}
