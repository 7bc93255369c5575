use std::fmt::Write as _;

use clap::{Args, ValueEnum};
use plasmon_cascade::mie::ldos_curve;
use plasmon_cascade::sweep::{parse_values, Distances, SweepSpec};
use plasmon_cascade::units;

use crate::commands::{configure, coupling_table, write_spectrum, write_sweep, GeometryArgs, COUPLING_HEADER};
use crate::output::{Cell, Run};
use crate::{Context, Failure};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    #[value(name = "2a")]
    F2a,
    #[value(name = "2b")]
    F2b,
    #[value(name = "3a")]
    F3a,
    #[value(name = "3b")]
    F3b,
    #[value(name = "4")]
    F4,
    #[value(name = "5")]
    F5,
    #[value(name = "6a")]
    F6a,
    #[value(name = "6b")]
    F6b,
    #[value(name = "7")]
    F7,
    #[value(name = "8a")]
    F8a,
    #[value(name = "8b")]
    F8b,
    #[value(name = "8c")]
    F8c,
    #[value(name = "8d")]
    F8d,
}

#[derive(Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub id: FigureId,
}

fn grid(text: &str) -> Vec<f64> {
    parse_values(text).expect("built-in grid")
}

fn label(id: FigureId) -> &'static str {
    use FigureId::*;
    match id {
        F2a => "2a",
        F2b => "2b",
        F3a => "3a",
        F3b => "3b",
        F4 => "4",
        F5 => "5",
        F6a => "6a",
        F6b => "6b",
        F7 => "7",
        F8a => "8a",
        F8b => "8b",
        F8c => "8c",
        F8d => "8d",
    }
}

fn nm_tag(x: f64) -> String {
    format!("{x}").replace('.', "p")
}

fn sidecar(run: &mut Run, id: FigureId, title: &str, params: &str) -> Result<(), Failure> {
    let mut t = String::new();
    let _ = writeln!(t, "figure {}", label(id));
    let _ = writeln!(t, "{title}");
    let _ = writeln!(t);
    let _ = writeln!(t, "{params}");
    let _ = writeln!(t);
    let _ = writeln!(t, "settings:");
    if let Some(s) = &run.settings {
        t.push_str(&s.to_text());
    }
    run.write_text(&format!("fig{}.txt", label(id)), &t)
}

fn ldos_family(ctx: &Context, run: &mut Run, id: FigureId, radius: f64, distances: &[f64]) -> Result<(), Failure> {
    let geom = GeometryArgs {
        radius_nm: Some(radius),
        distance_nm: Some(distances[0]),
    };
    let cfg = configure(ctx, &geom, run)?;
    let ev = grid("2:4:1001");
    let freqs: Vec<f64> = ev.iter().map(|&e| units::from_ev(e)).collect();
    let mut columns = Vec::new();
    for &h in distances {
        let c = cfg.with_geometry(radius, h)?;
        let curve = ldos_curve(&freqs, &c.geometry, &c.material, c.inputs.n_max)?;
        run.warn(curve.warnings.iter().cloned());
        columns.push(curve.scaled_ldos);
    }
    let mut header = vec!["omega_ev".to_string()];
    header.extend(distances.iter().map(|h| format!("ldos_h{}nm", nm_tag(*h))));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = ev.iter().enumerate().map(|(k, &e)| {
        let mut row: Vec<Cell> = vec![e.into()];
        row.extend(columns.iter().map(|c| Cell::F(c[k])));
        row
    });
    run.write_csv(&format!("fig{}.csv", label(id)), &header, rows)?;
    let hs: Vec<String> = distances.iter().map(|h| h.to_string()).collect();
    sidecar(
        run,
        id,
        "Scaled LDOS versus photon energy for several QD-MNP distances.",
        &format!(
            "R = {radius} nm; h = {} nm; omega = 2..4 eV, 1001 points",
            hs.join(", ")
        ),
    )
}

fn coupling_family(ctx: &Context, run: &mut Run, id: FigureId, radius: f64, ratios: &str) -> Result<(), Failure> {
    let geom = GeometryArgs {
        radius_nm: Some(radius),
        distance_nm: None,
    };
    let cfg = configure(ctx, &geom, run)?;
    let xs = grid(ratios);
    let rows = coupling_table(&cfg, radius, &xs, run)?;
    run.write_csv(&format!("fig{}.csv", label(id)), &COUPLING_HEADER, rows)?;
    sidecar(
        run,
        id,
        "Coupling strength g and QD decay rate gamma_ex versus h/R.",
        &format!("R = {radius} nm; h/R = {ratios} (start:stop:count)"),
    )
}

fn spectrum_family(ctx: &Context, run: &mut Run, id: FigureId, radius: f64, distances: &[f64]) -> Result<(), Failure> {
    let mut sorted = distances.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &h in &sorted {
        let geom = GeometryArgs {
            radius_nm: Some(radius),
            distance_nm: Some(h),
        };
        let cfg = configure(ctx, &geom, run)?;
        let tag = format!("fig{}_h{}nm", label(id), nm_tag(h));
        write_spectrum(&cfg, run, &format!("{tag}.csv"), &format!("{tag}_peaks.csv"))?;
    }
    // The manifest snapshot keeps the base settings; each file differs only in h.
    configure(
        ctx,
        &GeometryArgs {
            radius_nm: Some(radius),
            distance_nm: None,
        },
        run,
    )?;
    let hs: Vec<String> = sorted.iter().map(|h| h.to_string()).collect();
    sidecar(
        run,
        id,
        "Marginal spectra of the exciton and biexciton photons in x and y polarisation, per meV.",
        &format!("R = {radius} nm; h = {} nm, one file each", hs.join(", ")),
    )
}

fn entanglement_family(
    ctx: &Context,
    run: &mut Run,
    id: FigureId,
    spec: SweepSpec,
    title: &str,
    params: &str,
) -> Result<(), Failure> {
    let cfg = configure(ctx, &GeometryArgs::default(), run)?;
    write_sweep(&cfg, &spec, ctx.report, run, &format!("fig{}.csv", label(id)))?;
    sidecar(run, id, title, params)
}

const RADII: &str = "7:14:15";

fn at_distance(ctx: &Context, run: &mut Run, id: FigureId, h: f64) -> Result<(), Failure> {
    let spec = SweepSpec {
        radius_nm: grid(RADII),
        distance: Distances::Absolute(vec![h]),
        filter_width_mev: vec![1.0],
    };
    entanglement_family(
        ctx,
        run,
        id,
        spec,
        "Filtered entanglement versus MNP radius at fixed QD-MNP distance.",
        &format!("R = 7..14 nm in 0.5 nm steps; h = {h} nm; w = 1 meV"),
    )
}

pub fn reproduce(a: &FigureArgs, ctx: &Context, run: &mut Run) -> Result<(), Failure> {
    use FigureId::*;
    match a.id {
        F2a => ldos_family(ctx, run, a.id, 7.0, &[10.0, 12.0, 14.0, 16.0])?,
        F2b => ldos_family(ctx, run, a.id, 14.0, &[16.0, 18.0, 20.0, 22.0, 24.0])?,
        F3a => coupling_family(ctx, run, a.id, 7.0, "1.4:4:27")?,
        F3b => coupling_family(ctx, run, a.id, 14.0, "1:4:31")?,
        F4 => spectrum_family(ctx, run, a.id, 7.0, &[10.0, 12.0, 14.0, 16.0])?,
        F5 => spectrum_family(ctx, run, a.id, 14.0, &[16.0, 18.0, 20.0, 24.0])?,
        F6a | F6b => {
            let (r, ratios) = if a.id == F6a {
                (7.0, "1.4:4:27")
            } else {
                (14.0, "1:4:31")
            };
            let spec = SweepSpec {
                radius_nm: vec![r],
                distance: Distances::Ratio(grid(ratios)),
                filter_width_mev: grid("0.01:1:100"),
            };
            entanglement_family(
                ctx,
                run,
                a.id,
                spec,
                "Filtered entanglement versus filter width and h/R.",
                &format!("R = {r} nm; h/R = {ratios}; w = 0.01:1:100 meV (start:stop:count)"),
            )?
        }
        F7 => {
            let spec = SweepSpec {
                radius_nm: grid(RADII),
                distance: Distances::Ratio(grid("1.4:4:27")),
                filter_width_mev: vec![1.0],
            };
            entanglement_family(
                ctx,
                run,
                a.id,
                spec,
                "Filtered entanglement versus MNP radius and h/R.",
                "R = 7..14 nm in 0.5 nm steps; h/R = 1.4:4:27; w = 1 meV",
            )?
        }
        F8a => at_distance(ctx, run, a.id, 14.0)?,
        F8b => at_distance(ctx, run, a.id, 20.0)?,
        F8c => at_distance(ctx, run, a.id, 30.0)?,
        F8d => {
            let spec = SweepSpec {
                radius_nm: grid(RADII),
                distance: Distances::Absolute(grid("10:30:21")),
                filter_width_mev: vec![1.0],
            };
            entanglement_family(
                ctx,
                run,
                a.id,
                spec,
                "Filtered entanglement versus MNP radius and QD-MNP distance.",
                "R = 7..14 nm in 0.5 nm steps; h = 10..30 nm in 1 nm steps; w = 1 meV",
            )?
        }
    }
    run.take_failure()
}
