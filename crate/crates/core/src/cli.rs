//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    analyze_nd, analyze_three_phase, compare_frames, write_analysis_csv, write_nd_csv, AnalysisOptions, Units,
};
use crate::error::{Error, Result};
use crate::frenet::EPS_KAPPA;
use crate::frenet_nd::DEFAULT_RANK_TOL;
use crate::signal::{builtin_scenario, read_csv, sample_series, write_series, DerivativeSource, SampledSeries, OMEGA_O};

#[derive(Debug, Parser)]
#[command(name = "frenet-park", version, about = "Park and Frenet frame analysis of multi-phase waveforms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a built-in scenario and write it as CSV.
    Generate(GenerateArgs),
    /// Per-sample dqo components and Frenet invariants of a 3-phase series.
    Analyze(RunConfig),
    /// Distance between the Park and Frenet frames, and the rotation of P F^T.
    Compare(RunConfig),
    /// Generalized frame invariants of an n-phase series.
    NdAnalyze(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DerivMode {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Built-in scenario: E1..E6 or SIX.
    #[arg(long)]
    pub scenario: Option<String>,
    /// CSV file with a header `t,v1,...,vn`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    /// Sample spacing in seconds (scenarios only).
    #[arg(long, default_value_t = 1e-4, value_parser = positive)]
    pub dt: f64,
    /// Window length in seconds, starting at t = 0 (scenarios only).
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    pub duration: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Built-in scenario: E1..E6 or SIX.
    #[arg(long)]
    pub scenario: String,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Append closed-form derivative columns up to order 3.
    #[arg(long)]
    pub with_derivatives: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Derivative source; analytic for scenarios by default, file inputs always use finite differences.
    #[arg(long, value_enum)]
    pub deriv_mode: Option<DerivMode>,
    /// Park frame speed in rad/s.
    #[arg(long, default_value_t = OMEGA_O, value_parser = finite)]
    pub park_omega: f64,
    /// Park angle at the first output sample in radians (0 unless set).
    #[arg(long = "theta-p0", default_value_t = 0.0, value_parser = finite)]
    pub theta_p0: f64,
    /// Voltage base; when given, voltages are printed per unit of it and frequencies per unit of 2*pi*60 rad/s.
    #[arg(long, value_parser = positive)]
    pub v_base: Option<f64>,
    /// Magnitude threshold in volts; defaults to 1e-6 of the series peak.
    #[arg(long, value_parser = positive)]
    pub eps_v: Option<f64>,
    /// Relative curvature threshold.
    #[arg(long, default_value_t = EPS_KAPPA, value_parser = positive)]
    pub eps_kappa: f64,
    /// Gram-Schmidt rank threshold (nd-analyze).
    #[arg(long, default_value_t = DEFAULT_RANK_TOL, value_parser = positive)]
    pub rank_tol: f64,
    /// Allow finite-difference orders above 3 (nd-analyze with more than 4 phases).
    #[arg(long)]
    pub allow_high_order: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be positive and finite, got {s}"))
    }
}

fn finite(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be finite, got {s}"))
    }
}

impl RunConfig {
    fn units(&self) -> Units {
        self.v_base.map_or(Units::SI, Units::per_unit)
    }

    /// Loads the series and resolves the derivative source.
    fn load(&self, warn: &mut dyn Write) -> Result<(SampledSeries, AnalysisOptions)> {
        let fd = DerivativeSource::FiniteDifference {
            allow_high_order: self.allow_high_order,
        };
        let (series, source) = match (&self.source.scenario, &self.source.input) {
            (Some(name), None) => {
                let sc = builtin_scenario(name)?;
                let analytic = self.deriv_mode != Some(DerivMode::FiniteDifference);
                let series = sample_series(&sc, 0.0, self.sampling.duration, self.sampling.dt, analytic)?;
                (series, if analytic { DerivativeSource::Analytic } else { fd })
            }
            (None, Some(path)) => {
                if self.deriv_mode == Some(DerivMode::Analytic) {
                    let _ = writeln!(
                        warn,
                        "warning: analytic derivatives are only available for built-in scenarios; using finite differences"
                    );
                }
                (read_csv(path)?, fd)
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "exactly one of --scenario or --input is required".into(),
                ))
            }
        };
        let opts = AnalysisOptions {
            park_omega: self.park_omega,
            theta_p0: self.theta_p0,
            eps_v: self.eps_v,
            eps_kappa: self.eps_kappa,
            rank_tol: self.rank_tol,
            source,
        };
        Ok((series, opts))
    }
}

fn with_output<F>(path: Option<&Path>, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush().map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

/// Runs one command; warnings go to `warn`.
pub fn run(cli: Cli, warn: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Generate(args) => {
            let sc = builtin_scenario(&args.scenario)?;
            let series = sample_series(&sc, 0.0, args.sampling.duration, args.sampling.dt, args.with_derivatives)?;
            with_output(args.output.as_deref(), |w| write_series(&series, w))
        }
        Command::Analyze(cfg) => {
            let (series, opts) = cfg.load(warn)?;
            let rows = analyze_three_phase(&series, &opts)?;
            with_output(cfg.output.as_deref(), |w| write_analysis_csv(&rows, cfg.units(), w))
        }
        Command::Compare(cfg) => {
            let (series, opts) = cfg.load(warn)?;
            let report = compare_frames(&series, &opts)?;
            let path = cfg.output.clone();
            with_output(path.as_deref(), |w| {
                report.render(cfg.units(), w).map_err(|source| Error::Io {
                    path: path.clone().unwrap_or_else(|| "<stdout>".into()),
                    source,
                })
            })
        }
        Command::NdAnalyze(cfg) => {
            let (series, opts) = cfg.load(warn)?;
            let rows = analyze_nd(&series, &opts)?;
            with_output(cfg.output.as_deref(), |w| write_nd_csv(&rows, series.dim(), cfg.units(), w))
        }
    }
}
