mod commands;
mod error;
mod svg;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use decom_core::codes::CodeName;
use decom_core::NoiseKind;

use crate::error::CliError;
use crate::table::Table;

/// Qubit channel inspection, error-correction sweeps and fits, and
/// double-dot decoherence curves.
#[derive(Parser)]
#[command(name = "decom", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print χ, Choi eigenvalues, D by each applicable method and a CPTP verdict.
    Channel {
        #[arg(long, value_parser = parse_kind)]
        channel: NoiseKind,
        #[arg(long)]
        p: f64,
    },
    /// Corrected and uncorrected D over a grid of calibrated p.
    Sweep {
        #[arg(long, value_parser = parse_code)]
        code: CodeName,
        #[arg(long, value_parser = parse_kind)]
        channel: NoiseKind,
        #[arg(long, default_value_t = 0.0)]
        pmin: f64,
        #[arg(long)]
        pmax: f64,
        #[arg(long, default_value_t = 31)]
        steps: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Exact polynomial fit of D(p) and the break-even point.
    Fit {
        #[arg(long, value_parser = parse_code)]
        code: CodeName,
        #[arg(long, value_parser = parse_kind)]
        channel: NoiseKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Double-dot error probabilities and decoherence after N operations.
    Dqd {
        /// JSON file with any of xi_eV, s_m_per_s, rho_g_per_cm3, L_nm, a_nm, k_per_m.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 68)]
        n_ops: u32,
        #[arg(long, default_value_t = 1e-15)]
        tmin: f64,
        #[arg(long, default_value_t = 1e-9)]
        tmax: f64,
        #[arg(long, default_value_t = 25)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Spacing::Log)]
        spacing: Spacing,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Svg,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Spacing {
    Lin,
    Log,
}

fn parse_kind(s: &str) -> Result<NoiseKind, String> {
    s.parse().map_err(|e: decom_core::Error| e.to_string())
}

fn parse_code(s: &str) -> Result<CodeName, String> {
    s.parse().map_err(|e: decom_core::Error| e.to_string())
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_table(table: &Table, output: &Output) -> Result<(), CliError> {
    let csv = table.to_csv()?;
    let text = match output.format {
        Format::Csv => csv,
        Format::Svg => svg::render(&Table::from_csv(&csv)?)?,
    };
    emit(&text, output.out.as_ref())
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("DECOM_THREADS") else {
        return Ok(());
    };
    let n: usize = value.parse().ok().filter(|n| *n >= 1).ok_or_else(|| {
        CliError::Config(format!("DECOM_THREADS={value} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Channel { channel, p } => {
            let report = commands::channel(channel, p)?;
            emit(&report.text, None)?;
            report.status
        }
        Command::Sweep {
            code,
            channel,
            pmin,
            pmax,
            steps,
            output,
        } => {
            let ps = commands::grid(pmin, pmax, steps, false)?;
            emit_table(&commands::sweep(code, channel, &ps)?, &output)
        }
        Command::Fit { code, channel, out } => {
            let report = commands::fit(code, channel)?;
            emit(&report.text, out.as_ref())?;
            report.status
        }
        Command::Dqd {
            params,
            n_ops,
            tmin,
            tmax,
            steps,
            spacing,
            output,
        } => {
            if n_ops == 0 {
                return Err(CliError::Config("--n-ops must be at least 1".into()));
            }
            let ts = commands::grid(tmin, tmax, steps, spacing == Spacing::Log)?;
            emit_table(&commands::dqd(params.as_ref(), n_ops, &ts)?, &output)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("decom: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
