use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use nhs_core::lab::{
    emit_report, render_csv, render_json, run_experiments, ExperimentConfig, ExperimentReport, Lab, ReportFormat,
    Session,
};
use nhs_core::mmspace::SpaceFile;
use nhs_core::spaces::DiscreteFunction;
use nhs_core::{NhsError, Result};

#[derive(Parser)]
#[command(name = "nhs-lab", version, about = "Campanato/Morrey experiments on weighted point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Report format; defaults to the output extension, else JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for sampled families (NHS_LAB_SEED takes precedence).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Measure-space checks: upper doubling, λ comparability, reverse doubling.
    Validate { space: PathBuf },
    /// Coefficient suite for K̃ at dilation τ.
    Coeff {
        space: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        tau: f64,
    },
    /// Campanato-type norms and their equivalence bands for one function.
    Norms { space: PathBuf, function: PathBuf },
    /// Operator checks for one function, plus commutator checks when b is given.
    Operators {
        space: PathBuf,
        function: PathBuf,
        #[arg(long)]
        b: Option<PathBuf>,
    },
    /// Run a full experiment configuration.
    Experiment { config: PathBuf },
}

const VALIDATE_CHECKS: &[&str] = &[
    "metric",
    "geometric_doubling",
    "upper_doubling",
    "lambda_comparability",
    "weak_reverse_doubling",
];
const COEFF_CHECKS: &[&str] = &[
    "k_properties",
    "k_quasi_additivity",
    "k_tau_band",
    "doubling_coefficient_bound",
    "weak_doubling_mu",
];
const NORM_CHECKS: &[&str] = &[
    "phi_gdec",
    "psi_validation",
    "campanato_norms",
    "mean_jump_lemma",
    "comparable_balls",
    "equivalence_tau_gamma1",
    "equivalence_tau_gamma2",
    "equivalence_gamma_tau1",
    "equivalence_gamma_tau2",
    "p_oscillation_p2",
    "p_oscillation_p4",
];
const OPERATOR_CHECKS: &[&str] = &[
    "dini",
    "kernel",
    "pointwise_domination",
    "maximal_lp",
    "doubling_maximal_lp",
    "t_lambda_morrey",
    "marcinkiewicz_morrey",
    "morrey_pointwise",
];
const SYMBOL_CHECKS: &[&str] = &["sharp_estimate", "commutator_morrey"];

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| NhsError::Spec(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<nhs_core::PointCloudSpace> {
    SpaceFile::from_json(&read(path)?)?.into_space()
}

fn load_function(path: &Path) -> Result<DiscreteFunction> {
    DiscreteFunction::from_json(&read(path)?).map_err(|e| NhsError::Spec(format!("{}: {e}", path.display())))
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("NHS_LAB_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| NhsError::Spec(format!("NHS_LAB_SEED is not an integer: '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn file_report(
    mut config: ExperimentConfig,
    space_path: &Path,
    functions: Option<Vec<DiscreteFunction>>,
    symbol: Option<DiscreteFunction>,
    checks: &[&str],
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let space = load_space(space_path)?;
    let checks: Vec<String> = checks.iter().map(|c| c.to_string()).collect();
    if let Some(f) = &functions {
        config.function_count = f.len();
    }
    config.checks = checks.clone();
    let label = format!("file:{}", space_path.display());
    let lab = Lab::with_space(config, space, label, functions)?;
    let session = Session::new(&lab);
    let session = match symbol {
        Some(b) => {
            b.check_len(&lab.space)?;
            session.with_symbol(b)
        }
        None => session,
    };
    Ok(session.report(&checks, start))
}

fn execute(cli: &Cli) -> Result<(ExperimentReport, Option<PathBuf>)> {
    let seed = env_seed()?.or(cli.seed);
    let mut config = ExperimentConfig::default();
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let report = match &cli.command {
        Command::Validate { space } => file_report(config, space, None, None, VALIDATE_CHECKS)?,
        Command::Coeff { space, tau } => {
            config.params.coefficient_tau = *tau;
            config.params.validate().map_err(|e| NhsError::Spec(e.to_string()))?;
            file_report(config, space, None, None, COEFF_CHECKS)?
        }
        Command::Norms { space, function } => {
            let f = load_function(function)?;
            file_report(config, space, Some(vec![f]), None, NORM_CHECKS)?
        }
        Command::Operators { space, function, b } => {
            let f = load_function(function)?;
            let b = b.as_deref().map(load_function).transpose()?;
            let mut checks = OPERATOR_CHECKS.to_vec();
            if b.is_some() {
                checks.extend_from_slice(SYMBOL_CHECKS);
            }
            file_report(config, space, Some(vec![f]), b, &checks)?
        }
        Command::Experiment { config: path } => {
            let mut config = ExperimentConfig::from_json(&read(path)?)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let output = config.output_path.clone().map(PathBuf::from);
            return Ok((run_experiments(&config)?, output));
        }
    };
    Ok((report, None))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, config_output) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("nhs-lab: {e}");
            return ExitCode::from(2);
        }
    };
    let output = cli.output.clone().or(config_output);
    let format = match (cli.format, &output) {
        (Some(Format::Json), _) => ReportFormat::Json,
        (Some(Format::Csv), _) => ReportFormat::Csv,
        (None, Some(path)) => ReportFormat::from_path(path),
        (None, None) => ReportFormat::Json,
    };
    let written = match &output {
        Some(path) => emit_report(&report, format, path),
        None => match format {
            ReportFormat::Json => render_json(&report),
            ReportFormat::Csv => render_csv(&report),
        }
        .map(|text| print!("{text}")),
    };
    if let Err(e) = written {
        eprintln!("nhs-lab: {e}");
        return ExitCode::from(2);
    }
    for row in report.rows.iter().filter(|r| r.message.is_some()) {
        eprintln!("nhs-lab: {} errored: {}", row.check, row.message.as_deref().unwrap_or_default());
    }
    ExitCode::from(report.exit_code() as u8)
}
