use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cat_decoherence::channels::{ClassicalChannel, DilationChannel, PhysicalParams};
use cat_decoherence::experiments::{
    consistency_report, header_comment, linspace, logspace, sweep_alpha, sweep_noise, write_csv, AlphaRow,
    ConsistencyRow, RatioCell, RatioConvention, SweepSpec,
};
use cat_decoherence::fock_oracle::{validate_channel_solution, GeneratorKind};
use cat_decoherence::indicators::{IndicatorTimes, Thresholds};
use cat_decoherence::numerics::Tolerance;
use cat_decoherence::phase_space::PhaseGrid;
use cat_decoherence::states::{wigner_isotropic, EvenCatState};
use cat_decoherence::Error;

/// Decoherence of a cat state under gravitational time dilation and
/// classical noise.
#[derive(Parser)]
#[command(name = "catdec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Loss time of every indicator, as CSV.
    Times {
        /// key = value parameter file
        #[arg(long)]
        params: PathBuf,
        /// Override the amplitude from the parameter file
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Loss times in units of tau_W over a range of amplitudes.
    SweepAlpha {
        #[arg(long, default_value_t = 0.5)]
        from: f64,
        #[arg(long, default_value_t = 4.0)]
        to: f64,
        #[arg(long, default_value_t = 36)]
        points: usize,
        /// Parameter file setting the absolute time scale (reference defaults otherwise)
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classical over gravitational loss time on a (gamma, lambda) grid.
    SweepNoise {
        #[arg(long)]
        params: Option<PathBuf>,
        /// log10 range of gamma/w0, as lo:hi
        #[arg(long, default_value = "-8:-4", allow_hyphen_values = true, value_parser = parse_decades)]
        gamma_decades: (f64, f64),
        /// log10 range of lambda/w0, as lo:hi
        #[arg(long, default_value = "-8:-4", allow_hyphen_values = true, value_parser = parse_decades)]
        lambda_decades: (f64, f64),
        /// Points per axis
        #[arg(long, default_value_t = 61)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Convention::Reduced)]
        convention: Convention,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form Wigner function of the attenuated cat on a grid.
    Wigner {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        nu: f64,
        /// Points per axis
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare Fock-basis integration against the analytic solution.
    Validate {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 40)]
        cutoff: usize,
        #[arg(long, value_enum, default_value_t = Generator::Isotropic)]
        generator: Generator,
    },
    /// Closed-form decoherence times and the ratios between them.
    ConsistencyReport {
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    /// Classical time in units of 1/w0
    Reduced,
    /// Both times in seconds
    Consistent,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Isotropic,
    Position,
}

fn parse_decades(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("'{lo}' is not a number"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("'{hi}' is not a number"))?;
    if !(hi > lo) {
        return Err(format!("need lo < hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn load_params(path: Option<&Path>) -> Result<PhysicalParams, Error> {
    match path {
        Some(p) => PhysicalParams::from_file(p),
        None => Ok(PhysicalParams::reference_defaults()),
    }
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tol = Tolerance::default();
    match cli.command {
        Command::Times { params, alpha } => {
            let mut p = PhysicalParams::from_file(&params)?;
            if let Some(a) = alpha {
                p.set("alpha", a)?;
            }
            let th = Thresholds::compute(p.alpha()?, tol)?;
            let mut rows = vec![th.times(&DilationChannel::from_params(&p)?)?];
            if p.lambda.is_some() || p.gamma.is_some() {
                rows.push(th.times(&ClassicalChannel::new(p.noise()?))?);
            }
            let header = header_comment("times", &p.echo());
            write_csv(output(None)?, &header, IndicatorTimes::CSV_HEADER, &rows, IndicatorTimes::csv_row)?;
        }
        Command::SweepAlpha { from, to, points, params, out } => {
            let p = load_params(params.as_deref())?;
            let mut spec = SweepSpec::new(p);
            spec.alpha_grid = linspace(from, to, points);
            let rows = sweep_alpha(&spec)?;
            let echo = format!("from={from:e};to={to:e};points={points};{}", spec.params.echo());
            let header = header_comment("sweep-alpha", &echo);
            write_csv(output(out.as_deref())?, &header, AlphaRow::CSV_HEADER, &rows, AlphaRow::csv_row)?;
        }
        Command::SweepNoise { params, gamma_decades, lambda_decades, points, convention, out } => {
            let p = load_params(params.as_deref())?;
            let mut spec = SweepSpec::new(p);
            spec.gamma_grid = logspace(gamma_decades.0, gamma_decades.1, points);
            spec.lambda_grid = logspace(lambda_decades.0, lambda_decades.1, points);
            spec.convention = match convention {
                Convention::Reduced => RatioConvention::ReducedClassical,
                Convention::Consistent => RatioConvention::Consistent,
            };
            let cells = sweep_noise(&spec)?;
            let echo = format!(
                "gamma_decades={}:{};lambda_decades={}:{};points={points};convention={:?};{}",
                gamma_decades.0,
                gamma_decades.1,
                lambda_decades.0,
                lambda_decades.1,
                spec.convention,
                spec.params.echo()
            );
            let header = header_comment("sweep-noise", &echo);
            write_csv(output(out.as_deref())?, &header, RatioCell::CSV_HEADER, &cells, RatioCell::csv_row)?;
        }
        Command::Wigner { alpha, nu, grid, out } => {
            if grid < 2 {
                return Err(Error::InvalidParam(format!("grid needs at least 2 points per axis, got {grid}")).into());
            }
            let state = EvenCatState::new(alpha)?;
            let base = PhaseGrid::default_for_cat(alpha, nu)?;
            let g = PhaseGrid::new((base.re_at(0), -base.re_at(0)), (base.im_at(0), -base.im_at(0)), grid, grid)?;
            // validates nu once so the fill closure cannot fail
            wigner_isotropic(&state, nu, 0.0, 0.0)?;
            let w = g.fill(|x, y| wigner_isotropic(&state, nu, x, y).map(|c| c.total()).unwrap_or(f64::NAN));
            let header = header_comment("wigner", &format!("alpha={alpha:e};nu={nu:e};grid={grid}"));
            let mut sink = output(out.as_deref())?;
            w.write_csv(&mut sink, Some(&header))?;
            sink.flush()?;
        }
        Command::Validate { alpha, kappa, t, cutoff, generator } => {
            let kind = match generator {
                Generator::Isotropic => GeneratorKind::Isotropic,
                Generator::Position => GeneratorKind::Position,
            };
            let report = validate_channel_solution(alpha, kappa, t, cutoff, kind, tol.scaled(100.0))?;
            if !report.cutoff_converged() {
                eprintln!(
                    "warning: cutoff {cutoff} not converged (moving to {} changes the state by {:e})",
                    cutoff + 10,
                    report.cutoff_sensitivity
                );
            }
            let echo = format!("alpha={alpha:e};kappa={kappa:e};t={t:e};cutoff={cutoff};generator={kind}");
            let header = header_comment("validate", &echo);
            write_csv(
                output(None)?,
                &header,
                cat_decoherence::fock_oracle::ValidationReport::CSV_HEADER,
                &[report],
                |r| r.csv_row(),
            )?;
        }
        Command::ConsistencyReport { params } => {
            let p = load_params(params.as_deref())?;
            let rows = consistency_report(&p)?;
            let header = header_comment("consistency-report", &p.echo());
            write_csv(output(None)?, &header, ConsistencyRow::CSV_HEADER, &rows, ConsistencyRow::csv_row)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            if e.is_solver_failure() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
