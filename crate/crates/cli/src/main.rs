use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cvtele_cli::error::{CliError, Result};
use cvtele_cli::format::{write_csv, write_json, CsvRow};
use cvtele_cli::reports::{
    experiment, experiment_check, oracle_validate, ExperimentConfig, Report, Suite, ValidateConfig,
};
use cvtele_cli::sweeps::{
    crossover_table, depth_sweep, fidelity_sweep, CrossoverConfig, DepthFamilies, DepthSweepConfig,
    FidelityRow, FidelitySweepConfig, DEFAULT_PHOTONS, DEFAULT_POINTS, DEFAULT_R_MAX,
    DEFAULT_VALIDATION_TOL,
};

#[derive(Debug, Parser)]
#[command(
    name = "cvtele",
    version,
    about = "Fidelity and nonclassical-depth sweeps for continuous-variable teleportation"
)]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; sweeps default to csv, reports to json.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Fock cutoff for the numerical oracles.
    #[arg(long, global = true)]
    cutoff: Option<usize>,

    /// Fidelity tolerance for oracle comparisons.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Cross-check closed forms against the Fock-basis oracle.
    #[arg(long, global = true)]
    validate: bool,

    /// Regenerate the data behind a figure (2: depth versus squeezing,
    /// 3: fidelity curves, 4: teleportation versus direct depth).
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
    figure: Option<u8>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    R,
    T,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cat and Fock fidelities, teleported and direct, against T.
    FidelitySweep {
        /// Two-mode squeezing values, comma separated.
        #[arg(long = "r", value_delimiter = ',', default_values_t = vec![2.0, 0.7, 0.2])]
        r_values: Vec<f64>,
        /// Mean photon number |α|² of the odd cat.
        #[arg(long, default_value_t = DEFAULT_PHOTONS)]
        photons: f64,
        /// Photon number of the Fock input.
        #[arg(long, default_value_t = DEFAULT_PHOTONS as usize)]
        fock_n: usize,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        /// Compare with direct transmission over T instead of T².
        #[arg(long)]
        raw_t: bool,
    },
    /// Nonclassical depth after teleportation and direct transmission.
    DepthSweep {
        #[arg(long, default_value_t = 0.5)]
        tau_in: f64,
        /// Squeezing values of the curves against T, comma separated.
        #[arg(long = "r", value_delimiter = ',', default_values_t = vec![2.0, 0.7, 0.2])]
        r_values: Vec<f64>,
        /// Transmittances of the curves against r, comma separated.
        #[arg(long = "t", value_delimiter = ',', default_values_t = vec![1.0, 0.9, 0.8, 0.7, 0.6])]
        t_values: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_R_MAX)]
        r_max: f64,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        /// Curves against r, against T, or both.
        #[arg(long, value_enum, default_value_t = Family::All)]
        family: Family,
    },
    /// Transmittance windows where teleportation beats direct transmission.
    Crossover {
        /// Single input depth; a grid over [0, 1] when omitted.
        #[arg(long)]
        tau_in: Option<f64>,
        /// Single squeezing value; a grid over [0, r-max] when omitted.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 101)]
        tau_points: usize,
        #[arg(long, default_value_t = DEFAULT_R_MAX)]
        r_max: f64,
        #[arg(long, default_value_t = 61)]
        r_points: usize,
    },
    /// Compare the model with the experimental reference numbers.
    ExperimentCheck {
        #[arg(long, default_value_t = experiment::R)]
        r: f64,
        #[arg(long, default_value_t = experiment::T)]
        t: f64,
        /// Single-mode squeezing of the input state.
        #[arg(long, default_value_t = experiment::XI)]
        xi: f64,
        /// Two-mode squeezing used for the transmittance threshold.
        #[arg(long, default_value_t = experiment::R_DEPTH)]
        r_depth: f64,
    },
    /// Cross-validate closed forms against independent numerics.
    OracleValidate {
        /// Suites to run, comma separated; all when omitted.
        #[arg(long = "suite", value_delimiter = ',')]
        suites: Vec<Suite>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let structured = matches!(
        cli.command,
        Some(Command::ExperimentCheck { .. } | Command::OracleValidate { .. })
    );
    match run(cli) {
        Ok(code) => code,
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            if structured {
                println!("{}", e.to_json());
            }
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Config(format!(
                "tolerance {tol} must be positive"
            )));
        }
    }
    let command = match (cli.figure, cli.command) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "--figure cannot be combined with a subcommand".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Config(
                "a subcommand or --figure is required".into(),
            ))
        }
        (Some(2), None) => Job::Depth(DepthSweepConfig::figure2()),
        (Some(4), None) => Job::Depth(DepthSweepConfig::figure4()),
        (Some(_), None) => Job::Fidelity(FidelitySweepConfig::default()),
        (None, Some(cmd)) => Job::from_command(cmd)?,
    };
    let out = Output {
        path: cli.out,
        format: cli.format,
    };
    match command {
        Job::Fidelity(mut cfg) => {
            cfg.validate = cli.validate;
            cfg.cutoff = cli.cutoff;
            cfg.tol = cli.tol.unwrap_or(DEFAULT_VALIDATION_TOL);
            let rows = fidelity_sweep(&cfg)?;
            out.table(&rows)?;
            let failures = validation_failures(&rows, cfg.tol);
            if failures > 0 {
                return Err(CliError::Validation(format!(
                    "{failures} sampled points differ from the oracle by more than {}",
                    cfg.tol
                )));
            }
            Ok(ExitCode::SUCCESS)
        }
        Job::Depth(cfg) => {
            out.table(&depth_sweep(&cfg)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Job::Crossover(cfg) => {
            out.table(&crossover_table(&cfg))?;
            Ok(ExitCode::SUCCESS)
        }
        Job::Experiment(mut cfg) => {
            cfg.tol = cli.tol;
            out.report(&experiment_check(&cfg)?)
        }
        Job::Validate(mut cfg) => {
            cfg.cutoff = cli.cutoff;
            cfg.tol = cli.tol;
            out.report(&oracle_validate(&cfg)?)
        }
    }
}

enum Job {
    Fidelity(FidelitySweepConfig),
    Depth(DepthSweepConfig),
    Crossover(CrossoverConfig),
    Experiment(ExperimentConfig),
    Validate(ValidateConfig),
}

impl Job {
    fn from_command(cmd: Command) -> Result<Self> {
        Ok(match cmd {
            Command::FidelitySweep {
                r_values,
                photons,
                fock_n,
                points,
                raw_t,
            } => Job::Fidelity(FidelitySweepConfig {
                r_values,
                cat_photons: photons,
                fock_n,
                points,
                raw_t,
                ..FidelitySweepConfig::default()
            }),
            Command::DepthSweep {
                tau_in,
                r_values,
                t_values,
                r_max,
                points,
                family,
            } => Job::Depth(DepthSweepConfig {
                tau_in,
                r_values,
                t_values,
                r_max,
                points,
                families: DepthFamilies {
                    versus_r: family != Family::T,
                    versus_t: family != Family::R,
                },
            }),
            Command::Crossover {
                tau_in,
                r,
                tau_points,
                r_max,
                r_points,
            } => Job::Crossover(CrossoverConfig::grid(
                tau_in, r, tau_points, r_max, r_points,
            )?),
            Command::ExperimentCheck { r, t, xi, r_depth } => Job::Experiment(ExperimentConfig {
                r,
                t,
                xi,
                r_depth,
                tol: None,
            }),
            Command::OracleValidate { suites } => Job::Validate(ValidateConfig {
                suites: if suites.is_empty() {
                    Suite::ALL.to_vec()
                } else {
                    suites
                },
                ..ValidateConfig::default()
            }),
        })
    }
}

fn validation_failures(rows: &[FidelityRow], tol: f64) -> usize {
    rows.iter()
        .filter(|row| row.abs_diff.is_some_and(|d| d.is_nan() || d > tol))
        .count()
}

struct Output {
    path: Option<PathBuf>,
    format: Option<OutputFormat>,
}

impl Output {
    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn table<R: CsvRow + Serialize>(&self, rows: &[R]) -> Result<()> {
        let mut w = self.writer()?;
        match self.format.unwrap_or(OutputFormat::Csv) {
            OutputFormat::Csv => write_csv(rows, &mut w)?,
            OutputFormat::Json => write_json(rows, &mut w)?,
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the report and maps a failed check to exit code 3.
    fn report(&self, report: &Report) -> Result<ExitCode> {
        let mut w = self.writer()?;
        match self.format.unwrap_or(OutputFormat::Json) {
            OutputFormat::Json => write_json(report, &mut w)?,
            OutputFormat::Csv => write_csv(&report.checks, &mut w)?,
        }
        w.flush()?;
        Ok(if report.pass {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(3)
        })
    }
}
