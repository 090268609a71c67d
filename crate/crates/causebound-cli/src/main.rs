//! `causebound`: bounds and identification for probabilities of causation
//! from 2x2 study data.
//!
//! Subcommands: `analyze` (diagnostics plus bounds per assumption regime),
//! `check` (diagnostics only), `verify` (replay sharpness/containment/
//! identity claims on sampled models), and `simulate` (emit sampled study
//! files).
//!
//! Exit codes: 0 success, 1 validation/parse error, 2 infeasible evidence or
//! contradicted assumptions, 3 verification failures.

mod report;
mod study;

use std::io::Read;
use std::path::PathBuf;

use causebound::rational::parse_number;
use causebound::{
    sample_profile, verify_bounds_trial_with, AssumptionSet, DefectInjection, Error, Rat, Regime,
    SamplerConfig,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use thiserror::Error;

use report::{
    render_analyze_text, render_check_text, render_simulated_study, render_verify_text, to_json,
    AnalyzeOptions, VerifyDoc, VerifyRegimeView, REPORT_FORMAT_VERSION,
};
use study::{parse_study, Study};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {message}")]
    Parse { message: String },
    #[error("invalid study ({location}): {message}")]
    Validation { location: String, message: String },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. }
            | CliError::Validation { .. }
            | CliError::Io(_)
            | CliError::Usage(_) => 1,
            CliError::Core(err) => match err {
                Error::IncompatibleEvidence { .. }
                | Error::AssumptionContradiction { .. }
                | Error::MonotonicityIncompatible { .. }
                | Error::InconsistentExogeneityDeclaration { .. }
                | Error::InfeasibleSystem
                | Error::UndefinedConditional { .. } => 2,
                _ => 1,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Fixed-layout human-readable report.
    Text,
    /// Structured report with exact rationals as "numerator/denominator".
    Json,
}

#[derive(Parser)]
#[command(
    name = "causebound",
    version,
    about = "Bounds and identification for probabilities of causation (PN, PS, PNS) from 2x2 study data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run diagnostics and compute bounds for each assumption regime.
    Analyze(AnalyzeArgs),
    /// Run diagnostics only.
    Check(CheckArgs),
    /// Replay containment, sharpness, and identity claims on sampled models.
    Verify(VerifyArgs),
    /// Emit sampled response profiles as study files.
    Simulate(SimulateArgs),
}

fn parse_assumptions(s: &str) -> Result<AssumptionSet, String> {
    s.parse()
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Study file path, or `-` for stdin.
    path: String,
    /// Assumption regime (e.g. `monotonicity`, `exogeneity+monotonicity`);
    /// repeat the flag for several regimes. Defaults to the assumptions
    /// declared in the study file, or `none`.
    #[arg(long = "assume", value_parser = parse_assumptions)]
    assume: Vec<AssumptionSet>,
    /// Run every assumption row: none, exogeneity, monotonicity,
    /// exogeneity+monotonicity.
    #[arg(long, conflicts_with = "assume")]
    regime_matrix: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Decimal digits in rendered values (half-to-even rounding).
    #[arg(long, default_value_t = 3)]
    digits: u32,
    /// Exogeneity-test tolerance as a decimal or fraction (default: 0 for
    /// count data, 1/1000000 for probability data).
    #[arg(long)]
    tolerance: Option<String>,
    /// Compute bounds even for regimes the data contradicts, annotating
    /// them instead of refusing.
    #[arg(long)]
    override_contradiction: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Study file path, or `-` for stdin.
    path: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long, default_value_t = 3)]
    digits: u32,
    /// Exogeneity-test tolerance as a decimal or fraction.
    #[arg(long)]
    tolerance: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trials per regime.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Verify only these regimes (repeatable); default is every regime:
    /// none, exogeneity, monotonicity, strong-exogeneity,
    /// exogeneity+monotonicity.
    #[arg(long = "assume", value_parser = parse_assumptions)]
    assume: Vec<AssumptionSet>,
    /// Verify every regime (the default when --assume is absent).
    #[arg(long, conflicts_with = "assume")]
    regime_matrix: bool,
    /// Positivity floor for the conditioning cells, in `[0, 1/4)`.
    #[arg(long, default_value = "1/100")]
    floor: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Deliberately corrupt the closed-form PNS upper bound to prove the
    /// harness detects mismatches.
    #[arg(long, hide = true)]
    inject_defect: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of study files to generate.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Constraints the sampled profiles satisfy exactly.
    #[arg(long = "assume", value_parser = parse_assumptions)]
    assume: Option<AssumptionSet>,
    /// Positivity floor for the conditioning cells, in `[0, 1/4)`.
    #[arg(long, default_value = "1/100")]
    floor: String,
    /// Directory for the generated files; with a single trial and no
    /// directory the study is written to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() {
    // Flag misuse exits 1 like any other validation error; 2 is reserved
    // for infeasible or contradicted evidence.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Check(args) => run_check(args),
        Command::Verify(args) => run_verify(args),
        Command::Simulate(args) => run_simulate(args),
    }
}

fn load_study(path: &str) -> Result<(Study, String), CliError> {
    let (text, source) = if path == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        (text, "<stdin>".to_string())
    } else {
        (std::fs::read_to_string(path)?, path.to_string())
    };
    Ok((parse_study(&text)?, source))
}

fn parse_tolerance(flag: &Option<String>, study: &Study) -> Result<Rat, CliError> {
    match flag {
        Some(text) => {
            let value = parse_number(text).ok_or_else(|| {
                CliError::Usage(format!("--tolerance `{text}` is not a decimal or fraction"))
            })?;
            if value.is_negative() {
                return Err(CliError::Usage("--tolerance must be nonnegative".into()));
            }
            Ok(value)
        }
        None => Ok(study.default_tolerance()),
    }
}

fn parse_floor(text: &str) -> Result<Rat, CliError> {
    parse_number(text)
        .ok_or_else(|| CliError::Usage(format!("--floor `{text}` is not a decimal or fraction")))
}

fn analysis_regimes(
    args_assume: Vec<AssumptionSet>,
    matrix: bool,
    study: &Study,
) -> Vec<AssumptionSet> {
    if matrix {
        vec![
            AssumptionSet::NONE,
            AssumptionSet::exogeneity(),
            AssumptionSet::monotonicity(),
            AssumptionSet::exo_monotonicity(),
        ]
    } else if !args_assume.is_empty() {
        args_assume
    } else {
        vec![study.declared]
    }
}

fn run_analyze(args: AnalyzeArgs) -> Result<i32, CliError> {
    let (study, source) = load_study(&args.path)?;
    let options = AnalyzeOptions {
        regimes: analysis_regimes(args.assume, args.regime_matrix, &study),
        digits: args.digits,
        tolerance: parse_tolerance(&args.tolerance, &study)?,
        override_contradiction: args.override_contradiction,
        source,
    };
    let doc = report::run_analyze(&study, &options)?;
    match args.format {
        OutputFormat::Text => print!("{}", render_analyze_text(&doc)),
        OutputFormat::Json => print!("{}", to_json(&doc)),
    }
    Ok(0)
}

fn run_check(args: CheckArgs) -> Result<i32, CliError> {
    let (study, source) = load_study(&args.path)?;
    let options = AnalyzeOptions {
        regimes: Vec::new(),
        digits: args.digits,
        tolerance: parse_tolerance(&args.tolerance, &study)?,
        override_contradiction: false,
        source,
    };
    let doc = report::run_check(&study, &options)?;
    match args.format {
        OutputFormat::Text => print!("{}", render_check_text(&doc)),
        OutputFormat::Json => print!("{}", to_json(&doc)),
    }
    Ok(0)
}

fn run_verify(args: VerifyArgs) -> Result<i32, CliError> {
    let floor = parse_floor(&args.floor)?;
    let regimes: Vec<(String, AssumptionSet)> = if args.assume.is_empty() {
        Regime::ALL
            .iter()
            .map(|r| (r.label().to_string(), r.assumptions()))
            .collect()
    } else {
        args.assume
            .into_iter()
            .map(|a| (a.to_string(), a))
            .collect()
    };
    let defect = if args.inject_defect {
        DefectInjection::SkewPnsUpper
    } else {
        DefectInjection::None
    };
    let mut views = Vec::new();
    let mut passed = true;
    for (label, assume) in regimes {
        let config = SamplerConfig::new(args.seed, args.trials, assume, floor.clone())?;
        let report = verify_bounds_trial_with(&config, defect);
        passed &= report.passed();
        views.push(VerifyRegimeView::new(label, &report));
    }
    let doc = VerifyDoc {
        format_version: REPORT_FORMAT_VERSION,
        command: "verify",
        seed: args.seed,
        trials: args.trials,
        positivity_floor: causebound::rational::rational_string(&floor),
        injected_defect: args.inject_defect.then_some("skew-pns-upper"),
        regimes: views,
        passed,
    };
    match args.format {
        OutputFormat::Text => print!("{}", render_verify_text(&doc)),
        OutputFormat::Json => print!("{}", to_json(&doc)),
    }
    Ok(if passed { 0 } else { 3 })
}

fn run_simulate(args: SimulateArgs) -> Result<i32, CliError> {
    let floor = parse_floor(&args.floor)?;
    let constraints = args.assume.unwrap_or(AssumptionSet::NONE);
    let config = SamplerConfig::new(args.seed, args.trials.max(1), constraints, floor)?;
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    match &args.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for index in 0..args.trials {
                let profile = sample_profile(&config, index)?;
                let label = format!("sim-seed{}-{index}", args.seed);
                let rendered = render_simulated_study(&profile, &label, &constraints);
                std::fs::write(dir.join(format!("{label}.study")), rendered)?;
            }
            println!("wrote {} study file(s) to {}", args.trials, dir.display());
        }
        None if args.trials == 1 => {
            let profile = sample_profile(&config, 0)?;
            let label = format!("sim-seed{}-0", args.seed);
            print!("{}", render_simulated_study(&profile, &label, &constraints));
        }
        None => {
            return Err(CliError::Usage(
                "writing more than one study requires --out-dir".into(),
            ));
        }
    }
    Ok(0)
}
