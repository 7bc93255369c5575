mod commands;
mod figures;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use plasmon_cascade::{Settings, WindowMode};

use output::Run;

#[derive(Parser)]
#[command(
    name = "qdcascade",
    version,
    about = "Entangled photon pairs from a quantum dot near a metal nanoparticle"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Config file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH", default_value = "output")]
    output_dir: PathBuf,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Use kappa_x in both channels of the amplitude denominator.
    #[arg(long, global = true)]
    paper_literal_kappa: bool,
    #[arg(long, global = true, value_enum)]
    window_mode: Option<WindowArg>,
    /// Entanglement columns to emit.
    #[arg(long, global = true, value_enum, default_value = "both")]
    report: Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Product,
    Single,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Report {
    GammaPrime,
    Concurrence,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Scaled LDOS over a frequency range.
    Ldos(commands::LdosArgs),
    /// Coupling strength and rates versus h/R.
    Coupling(commands::CouplingArgs),
    /// Two-photon amplitudes on the frequency grid.
    Amplitudes(commands::AmplitudeArgs),
    /// Marginal spectra of both photons in both polarisations.
    Spectrum(commands::GeometryArgs),
    /// Filtered entanglement over lists of R, h (or h/R) and w.
    Concurrence(commands::ConcurrenceArgs),
    /// Filtered entanglement over a sweep-spec file.
    Sweep(commands::SweepArgs),
    /// Time-domain bath integration against the closed-form amplitudes.
    OracleCheck(commands::OracleArgs),
    /// Data behind one of the published figures.
    ReproduceFigure(figures::FigureArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ldos(_) => "ldos",
            Command::Coupling(_) => "coupling",
            Command::Amplitudes(_) => "amplitudes",
            Command::Spectrum(_) => "spectrum",
            Command::Concurrence(_) => "concurrence",
            Command::Sweep(_) => "sweep",
            Command::OracleCheck(_) => "oracle-check",
            Command::ReproduceFigure(_) => "reproduce-figure",
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
    /// A check ran to completion and did not pass.
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "validation error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical error: {m}"),
            Failure::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<plasmon_cascade::Error> for Failure {
    fn from(e: plasmon_cascade::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

/// Settings after the config file and global flags, before per-command overrides.
pub struct Context {
    pub settings: Settings,
    pub report: Report,
}

fn base_settings(g: &GlobalArgs) -> Result<Settings, Failure> {
    let mut s = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
            Settings::parse(&text)?
        }
        None => Settings::default(),
    };
    if g.paper_literal_kappa {
        s.paper_literal_kappa = true;
    }
    if let Some(w) = g.window_mode {
        s.window_mode = match w {
            WindowArg::Product => WindowMode::Product,
            WindowArg::Single => WindowMode::Single,
        };
    }
    s.resolve()?;
    Ok(s)
}

fn execute(cmd: &Command, ctx: &Context, run: &mut Run) -> Result<(), Failure> {
    match cmd {
        Command::Ldos(a) => commands::ldos(a, ctx, run),
        Command::Coupling(a) => commands::coupling(a, ctx, run),
        Command::Amplitudes(a) => commands::amplitudes(a, ctx, run),
        Command::Spectrum(a) => commands::spectrum(a, ctx, run),
        Command::Concurrence(a) => commands::concurrence(a, ctx, run),
        Command::Sweep(a) => commands::sweep(a, ctx, run),
        Command::OracleCheck(a) => commands::oracle_check(a, ctx, run),
        Command::ReproduceFigure(a) => figures::reproduce(a, ctx, run),
    }
}

#[cfg(feature = "parallel")]
fn with_workers<T: Send>(n: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match n {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Validation(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_workers<T: Send>(_n: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    Ok(f())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let parsed = Cli::command()
        .mut_subcommands(|c| c.allow_negative_numbers(true))
        .try_get_matches_from(&argv)
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };

    let mut run = match Run::new(&cli.global.output_dir, cli.command.name(), argv[1..].to_vec()) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("qdcascade: {e}");
            return ExitCode::from(e.code());
        }
    };

    let outcome = (|| {
        if cli.global.workers == Some(0) {
            return Err(Failure::Validation("--workers must be at least 1".into()));
        }
        if cfg!(not(feature = "parallel")) && cli.global.workers.is_some_and(|n| n > 1) {
            run.warn(["built without parallel support; --workers ignored".to_string()]);
        }
        let settings = base_settings(&cli.global)?;
        run.settings = Some(settings.clone());
        let ctx = Context {
            settings,
            report: cli.global.report,
        };
        let run = &mut run;
        with_workers(cli.global.workers, || execute(&cli.command, &ctx, run))?
    })();

    let written = run.finish(&outcome);
    match outcome.and(written) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdcascade: {e}");
            ExitCode::from(e.code())
        }
    }
}
