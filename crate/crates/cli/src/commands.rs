use std::path::PathBuf;

use clap::{Args, ValueEnum};
use plasmon_cascade::bath::{run_oracle, IntermediateDamping, OracleSettings, OracleVariant};
use plasmon_cascade::mie::{find_peaks, ldos_curve, PeakOrder};
use plasmon_cascade::model::Model;
use plasmon_cascade::spectra::{fwhm, marginal_spectrum, PhotonAxis, SpectrumCurve};
use plasmon_cascade::sweep::{concurrence_sweep, parse_values, Distances, SweepRow, SweepSpec};
use plasmon_cascade::{
    amplitude_grid, par, units, AmplitudeGrid, Channel, Config, FrequencyGrid, Quadrature, Settings,
};
use serde::Serialize;

use crate::output::{Cell, Run};
use crate::{Context, Failure, Report};

#[derive(Args, Clone, Default)]
pub struct GeometryArgs {
    /// MNP radius, nm.
    #[arg(long, value_name = "NM")]
    pub radius_nm: Option<f64>,
    /// Surface-to-QD distance, nm.
    #[arg(long, value_name = "NM")]
    pub distance_nm: Option<f64>,
}

#[derive(Args)]
pub struct LdosArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Photon energies in eV: `start:stop:count` or a comma list.
    #[arg(long, value_name = "RANGE", default_value = "2:4:1001")]
    pub omega_ev: String,
}

#[derive(Args)]
pub struct CouplingArgs {
    #[arg(long, value_name = "NM")]
    pub radius_nm: Option<f64>,
    #[arg(long, value_name = "RANGE", default_value = "1.4:4:27")]
    pub h_over_r: String,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args)]
pub struct AmplitudeArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args)]
pub struct ConcurrenceArgs {
    #[arg(long, value_name = "LIST")]
    pub radius_nm: Option<String>,
    #[arg(long, value_name = "LIST", conflicts_with = "h_over_r")]
    pub distance_nm: Option<String>,
    #[arg(long, value_name = "LIST")]
    pub h_over_r: Option<String>,
    #[arg(long, value_name = "LIST")]
    pub filter_width_mev: Option<String>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Sweep-spec file: `radius_nm`, `distance_nm` or `h_over_r`, `filter_width_mev`.
    #[arg(long, value_name = "PATH")]
    pub spec: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Printed,
    ExcitonRate,
}

#[derive(Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Bath modes per channel.
    #[arg(long, default_value_t = 400)]
    pub modes: usize,
    /// Largest acceptable mean relative error.
    #[arg(long, default_value_t = 0.05)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value = "printed")]
    pub variant: VariantArg,
    /// Keep the sqrt(2) factor on the final emission step.
    #[arg(long)]
    pub final_sqrt2: bool,
}

fn values(flag: &str, text: &str) -> Result<Vec<f64>, Failure> {
    let v = parse_values(text).map_err(|m| Failure::Validation(format!("--{flag}: {m}")))?;
    if v.is_empty() || v.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Err(Failure::Validation(format!("--{flag}: values must be positive")));
    }
    Ok(v)
}

/// Applies geometry overrides, records the result in the manifest and resolves it.
pub fn configure(ctx: &Context, g: &GeometryArgs, run: &mut Run) -> Result<Config, Failure> {
    let mut s: Settings = ctx.settings.clone();
    if let Some(r) = g.radius_nm {
        s.radius_nm = r;
    }
    if let Some(h) = g.distance_nm {
        s.distance_nm = h;
    }
    let cfg = s.resolve()?;
    run.settings = Some(s);
    Ok(cfg)
}

fn mev(x: f64) -> Cell {
    Cell::F(units::to_mev(x))
}

pub fn ldos(a: &LdosArgs, ctx: &Context, run: &mut Run) -> Result<(), Failure> {
    let cfg = configure(ctx, &a.geometry, run)?;
    let ev = values("omega-ev", &a.omega_ev)?;
    let freqs: Vec<f64> = ev.iter().map(|&e| units::from_ev(e)).collect();
    let curve = ldos_curve(&freqs, &cfg.geometry, &cfg.material, cfg.inputs.n_max)?;
    run.warn(curve.warnings.iter().cloned());
    run.write_csv(
        "ldos.csv",
        &["omega_ev", "scaled_ldos"],
        ev.iter()
            .zip(&curve.scaled_ldos)
            .map(|(&e, &y)| vec![e.into(), y.into()]),
    )?;
    let peaks = find_peaks(&freqs, &curve.scaled_ldos);
    run.write_csv(
        "ldos_peaks.csv",
        &["order", "center_ev", "half_width_mev", "height"],
        peaks.iter().map(|p| {
            let order = match p.order {
                PeakOrder::Dipole => "dipole",
                PeakOrder::HigherOrder => "higher-order",
            };
            vec![
                order.into(),
                units::to_ev(p.center).into(),
                mev(p.half_width),
                p.height.into(),
            ]
        }),
    )
}

/// Models at fixed radius over a list of h/R; the centre energy is shared.
pub fn coupling_table(cfg: &Config, radius_nm: f64, ratios: &[f64], run: &mut Run) -> Result<Vec<Vec<Cell>>, Failure> {
    let omega0 = cfg.centre_energy()?;
    let configs = ratios
        .iter()
        .map(|&x| cfg.with_geometry(radius_nm, x * radius_nm))
        .collect::<Result<Vec<_>, _>>()?;
    let models = par::map(configs.len(), |k| {
        let c = &configs[k];
        plasmon_cascade::model::build_model(&c.geometry, &c.material, &c.inputs, omega0)
    });
    let mut rows = Vec::with_capacity(ratios.len());
    let mut failed = None;
    for (x, m) in ratios.iter().zip(models) {
        match m {
            Ok(m) => {
                run.warn(m.warnings.iter().cloned());
                let r = m.rates;
                rows.push(vec![(*x).into(), mev(r.g_ex[0]), mev(r.gamma_ex), mev(r.kappa)]);
            }
            Err(e) if e.is_validation() => return Err(e.into()),
            Err(e) => {
                run.warn([format!("h/R = {x}: {e}")]);
                failed.get_or_insert_with(|| e.to_string());
                rows.push(vec![(*x).into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into()]);
            }
        }
    }
    run.pending_failure(failed);
    Ok(rows)
}

pub const COUPLING_HEADER: [&str; 4] = ["h_over_r", "g_mev", "gamma_ex_mev", "kappa_mev"];

pub fn coupling(a: &CouplingArgs, ctx: &Context, run: &mut Run) -> Result<(), Failure> {
    let g = GeometryArgs {
        radius_nm: a.radius_nm,
        distance_nm: None,
    };
    let cfg = configure(ctx, &g, run)?;
    let ratios = values("h-over-r", &a.h_over_r)?;
    let rows = coupling_table(&cfg, cfg.settings.radius_nm, &ratios, run)?;
    run.write_csv("coupling.csv", &COUPLING_HEADER, rows)?;
    run.take_failure()
}

fn model_grid(cfg: &Config, run: &mut Run) -> Result<(Model, AmplitudeGrid), Failure> {
    let model = cfg.model()?;
    run.warn(model.warnings.iter().cloned());
    let grid = FrequencyGrid::for_params(&model.params, cfg.inputs.grid_points, cfg.inputs.grid_half_span)?;
    let amps = amplitude_grid(&model.params, &grid)?;
    Ok((model, amps))
}

#[derive(Serialize)]
struct AxisJson {
    center_mev: f64,
    half_span_mev: f64,
    points: usize,
}

#[derive(Serialize)]
struct ComplexMatrix {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Amplitudes in JSON; rows follow the biexciton-photon axis.
#[derive(Serialize)]
struct AmplitudeJson {
    omega0_ev: f64,
    biexciton_axis: AxisJson,
    exciton_axis: AxisJson,
    c_x: ComplexMatrix,
    c_y: ComplexMatrix,
}

fn axis_json(a: &plasmon_cascade::Axis) -> AxisJson {
    AxisJson {
        center_mev: units::to_mev(a.center),
        half_span_mev: units::to_mev(a.half_span),
        points: a.points,
    }
}

fn matrix_json(amps: &AmplitudeGrid, ch: Channel) -> ComplexMatrix {
    let m = amps.channel(ch);
    let (nm, nn) = amps.grid.shape();
    let part =
        |f: fn(&num_complex::Complex64) -> f64| (0..nm).map(|i| (0..nn).map(|j| f(&m[[i, j]])).collect()).collect();
    ComplexMatrix {
        re: part(|c| c.re),
        im: part(|c| c.im),
    }
}

pub fn amplitudes(a: &AmplitudeArgs, ctx: &Context, run: &mut Run) -> Result<(), Failure> {
    let cfg = configure(ctx, &a.geometry, run)?;
    let (_, amps) = model_grid(&cfg, run)?;
    let g = &amps.grid;
    match a.format {
        Format::Csv => {
            let (nm, nn) = g.shape();
            let rows = (0..nm).flat_map(|i| {
                let amps = &amps;
                (0..nn).map(move |j| {
                    let (cx, cy) = (amps.c_x[[i, j]], amps.c_y[[i, j]]);
                    vec![
                        mev(amps.grid.biexciton.value(i)),
                        mev(amps.grid.exciton.value(j)),
                        cx.re.into(),
                        cx.im.into(),
                        cy.re.into(),
                        cy.im.into(),
                    ]
                })
            });
            run.write_csv(
                "amplitudes.csv",
                &[
                    "omega_m_minus_omega0_mev",
                    "omega_n_minus_omega0_mev",
                    "re_c_x",
                    "im_c_x",
                    "re_c_y",
                    "im_c_y",
                ],
                rows,
            )
        }
        Format::Json => {
            let doc = AmplitudeJson {
                omega0_ev: units::to_ev(g.omega0),
                biexciton_axis: axis_json(&g.biexciton),
                exciton_axis: axis_json(&g.exciton),
                c_x: matrix_json(&amps, Channel::X),
                c_y: matrix_json(&amps, Channel::Y),
            };
            let text = serde_json::to_string(&doc).map_err(|e| Failure::Numerical(e.to_string()))?;
            run.write_text("amplitudes.json", &(text + "\n"))
        }
    }
}

pub const SPECTRUM_HEADER: [&str; 5] = [
    "omega_minus_omega0_mev",
    "sx_exciton",
    "sy_exciton",
    "sx_biexciton",
    "sy_biexciton",
];

/// Writes the four marginals (per meV) to `name` and their peak summary to `summary`.
pub fn write_spectrum(cfg: &Config, run: &mut Run, name: &str, summary: &str) -> Result<(), Failure> {
    let (_, amps) = model_grid(cfg, run)?;
    let curves: Vec<SpectrumCurve> = [
        (Channel::X, PhotonAxis::Exciton),
        (Channel::Y, PhotonAxis::Exciton),
        (Channel::X, PhotonAxis::Biexciton),
        (Channel::Y, PhotonAxis::Biexciton),
    ]
    .iter()
    .map(|&(c, ax)| marginal_spectrum(&amps, c, ax))
    .collect();
    let per_mev = units::from_mev(1.0);
    let offsets = &curves[0].offsets;
    if curves.iter().any(|c| &c.offsets != offsets) {
        return Err(Failure::Numerical(
            "photon axes differ; cannot tabulate on one axis".into(),
        ));
    }
    for c in &curves {
        run.warn(c.warnings.iter().map(|w| format!("{name}: {w}")));
    }
    run.write_csv(
        name,
        &SPECTRUM_HEADER,
        offsets.iter().enumerate().map(|(k, &x)| {
            let mut row = vec![mev(x)];
            row.extend(curves.iter().map(|c| Cell::F(c.values[k] * per_mev)));
            row
        }),
    )?;
    let mut rows = Vec::new();
    for c in &curves {
        let width = match fwhm(c) {
            Ok(w) => units::to_mev(w),
            Err(e) => {
                run.warn([format!("{name}: {:?} {:?} marginal: {e}", c.channel, c.axis)]);
                f64::NAN
            }
        };
        let photon = match c.axis {
            PhotonAxis::Exciton => "exciton",
            PhotonAxis::Biexciton => "biexciton",
        };
        let channel = match c.channel {
            Channel::X => "x",
            Channel::Y => "y",
        };
        rows.push(vec![
            photon.into(),
            channel.into(),
            mev(c.peak_offset()),
            width.into(),
            c.total.into(),
            c.leaked_fraction.into(),
        ]);
    }
    run.write_csv(
        summary,
        &[
            "photon",
            "channel",
            "peak_offset_mev",
            "fwhm_mev",
            "weight",
            "leaked_fraction",
        ],
        rows,
    )
}

pub fn spectrum(a: &GeometryArgs, ctx: &Context, run: &mut Run) -> Result<(), Failure> {
    let cfg = configure(ctx, a, run)?;
    write_spectrum(&cfg, run, "spectrum.csv", "spectrum_peaks.csv")
}

/// Runs the sweep and writes one row per point; rows that failed numerically
/// carry NaN and are reported once all rows are written.
pub fn write_sweep(cfg: &Config, spec: &SweepSpec, report: Report, run: &mut Run, name: &str) -> Result<(), Failure> {
    let rows = concurrence_sweep(cfg, spec, &Quadrature::default())?;
    let mut header = vec!["r_nm", "h_nm", "h_over_r", "w_mev"];
    if report != Report::Concurrence {
        header.push("gamma_prime_abs");
    }
    if report != Report::GammaPrime {
        header.push("concurrence");
    }
    header.extend(["t_weight", "h_weight"]);
    let mut failed = None;
    let mut out = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        run.warn(row.warnings.iter().cloned());
        let SweepRow {
            r_nm,
            h_nm,
            h_over_r,
            w_mev,
            ..
        } = *row;
        let (gamma, conc, t, h) = match &row.result {
            Ok(f) => (f.gamma_prime_abs(), f.concurrence, f.t, f.h),
            Err(e) => {
                run.warn([format!("row {k} (R = {r_nm} nm, h = {h_nm} nm, w = {w_mev} meV): {e}")]);
                failed.get_or_insert_with(|| e.clone());
                (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
            }
        };
        let mut cells: Vec<Cell> = vec![r_nm.into(), h_nm.into(), h_over_r.into(), w_mev.into()];
        if report != Report::Concurrence {
            cells.push(gamma.into());
        }
        if report != Report::GammaPrime {
            cells.push(conc.into());
        }
        cells.extend([t.into(), h.into()]);
        out.push(cells);
    }
    run.write_csv(name, &header, out)?;
    run.pending_failure(failed);
    Ok(())
}

pub fn concurrence(a: &ConcurrenceArgs, ctx: &Context, run: &mut Run) -> Result<(), Failure> {
    let cfg = configure(ctx, &GeometryArgs::default(), run)?;
    let s = &cfg.settings;
    let distance = match (&a.distance_nm, &a.h_over_r) {
        (_, Some(x)) => Distances::Ratio(values("h-over-r", x)?),
        (Some(h), None) => Distances::Absolute(values("distance-nm", h)?),
        (None, None) => Distances::Absolute(vec![s.distance_nm]),
    };
    let spec = SweepSpec {
        radius_nm: match &a.radius_nm {
            Some(r) => values("radius-nm", r)?,
            None => vec![s.radius_nm],
        },
        distance,
        filter_width_mev: match &a.filter_width_mev {
            Some(w) => values("filter-width-mev", w)?,
            None => vec![s.filter_width_mev],
        },
    };
    write_sweep(&cfg, &spec, ctx.report, run, "concurrence.csv")?;
    run.take_failure()
}

pub fn sweep(a: &SweepArgs, ctx: &Context, run: &mut Run) -> Result<(), Failure> {
    let cfg = configure(ctx, &GeometryArgs::default(), run)?;
    let text = std::fs::read_to_string(&a.spec)
        .map_err(|e| Failure::Validation(format!("cannot read sweep spec {}: {e}", a.spec.display())))?;
    let spec = SweepSpec::parse(&text, &cfg)?;
    write_sweep(&cfg, &spec, ctx.report, run, "sweep.csv")?;
    run.take_failure()
}

pub fn oracle_check(a: &OracleArgs, ctx: &Context, run: &mut Run) -> Result<(), Failure> {
    if !(a.threshold > 0.0) {
        return Err(Failure::Validation("--threshold must be positive".into()));
    }
    let cfg = configure(ctx, &a.geometry, run)?;
    let model = cfg.model()?;
    run.warn(model.warnings.iter().cloned());
    let settings = OracleSettings {
        modes: a.modes,
        variant: OracleVariant {
            damping: match a.variant {
                VariantArg::Printed => IntermediateDamping::Printed,
                VariantArg::ExcitonRate => IntermediateDamping::Exciton,
            },
            final_sqrt2: a.final_sqrt2,
        },
        ..OracleSettings::default()
    };
    let report = run_oracle(&model.params, &settings)?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Numerical(e.to_string()))?;
    println!("{text}");
    run.write_text("oracle_report.json", &(text + "\n"))?;
    if report.mean_rel_error > a.threshold {
        return Err(Failure::Check(format!(
            "mean relative error {:.3e} exceeds threshold {:.3e}",
            report.mean_rel_error, a.threshold
        )));
    }
    Ok(())
}
