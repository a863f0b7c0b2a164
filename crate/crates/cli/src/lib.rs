//! The `sorkin` command: simulate, scan and analyse κ.
//!
//! Exit codes: 0 success, 1 runtime or I/O failure, 2 invalid
//! configuration or input, 3 degenerate regime (δ at or below its floor).

mod output;

use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sorkin_core::protocol::read_octets_csv;
use sorkin_core::stats::summarize;
use sorkin_core::{kappa_default, Error, ErrorMethod, KappaSeries, Scenario};

pub use output::{Summary, SummaryRow};

#[derive(Debug, Parser)]
#[command(
    name = "sorkin",
    version,
    about = "Triple-slit interference null test: simulate and analyse κ"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario at each position and write κ series, summary and octets.
    Simulate(ScenarioArgs),
    /// Run the scenario at each position and write one summary row per position.
    Scan(ScenarioArgs),
    /// Compute κ from measured octets in CSV form.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario file (TOML).
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in scenario: born-ideal, power-meter, attenuated-apd, heralded, mask-fault.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Overrides plan.master_seed.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Detector positions in metres, comma separated. Overrides plan.positions.
    #[arg(long, value_name = "a,b,c", allow_hyphen_values = true, value_parser = parse_positions)]
    pub positions: Option<Positions>,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Overrides error_method.
    #[arg(long, value_name = "standard|allan", value_parser = parse_method)]
    pub error_method: Option<ErrorMethod>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// CSV with header `run,combination,raw_value,normalizer`.
    pub csv: PathBuf,
    #[arg(long, value_name = "standard|allan", default_value = "allan", value_parser = parse_method)]
    pub error_method: ErrorMethod,
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Positions(pub Vec<f64>);

fn parse_positions(s: &str) -> Result<Positions, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Positions(Vec::new()));
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("{p:?} is not a number"))
        })
        .collect::<Result<_, _>>()
        .map(Positions)
}

fn parse_method(s: &str) -> Result<ErrorMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_degenerate() {
            3
        } else {
            match e.root() {
                Error::Config { .. } | Error::Ingest { .. } => 2,
                _ => 1,
            }
        };
        let message = match &e {
            Error::Config { path, message } => {
                format!("configuration error at `{path}`: {message}")
            }
            other => other.to_string(),
        };
        CliError { code, message }
    }
}

fn usage(path: &str, message: impl Into<String>) -> CliError {
    CliError::from(Error::Config {
        path: path.into(),
        message: message.into(),
    })
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => simulate(&args).map(|_| ()),
        Command::Scan(args) => scan(&args).map(|_| ()),
        Command::Analyze(args) => analyze(&args).map(|_| ()),
    }
}

/// Loads the scenario and applies command-line overrides.
pub fn load_scenario(args: &ScenarioArgs) -> Result<Scenario, CliError> {
    let mut scenario = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage("--config", format!("cannot read {}: {e}", path.display())))?;
            Scenario::from_toml_str(&text)?
        }
        (None, Some(name)) => Scenario::preset(name)?,
        (None, None) => return Err(usage("--config", "give --config PATH or --preset NAME")),
    };
    if let Some(seed) = args.seed {
        scenario.plan.master_seed = seed;
    }
    if let Some(Positions(p)) = &args.positions {
        if p.is_empty() {
            return Err(usage("--positions", "empty position list"));
        }
        scenario.plan.positions = p.clone();
    }
    if let Some(m) = args.error_method {
        scenario.error_method = m;
    }
    scenario.plan = scenario.plan.resolved();
    Ok(scenario)
}

/// Paths of the files written by a command.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub files: Vec<PathBuf>,
    pub summary: Summary,
}

pub fn simulate(args: &ScenarioArgs) -> Result<Artifacts, CliError> {
    let scenario = load_scenario(args)?;
    let experiment = scenario.experiment()?;
    let sessions = experiment.simulate()?;
    let summary = Summary::new(&scenario, session_rows(&sessions, scenario.error_method)?);
    let header = output::provenance(&scenario)?;

    let files = vec![
        output::write_atomic(&args.out, "kappa_series.csv", |w| {
            output::kappa_series_csv(w, &header, &sessions)
        })?,
        output::write_atomic(&args.out, "summary.json", |w| output::json(w, &summary))?,
        output::write_atomic(&args.out, "octets.csv", |w| {
            output::octets_csv(w, &header, &sessions)
        })?,
    ];
    for row in &summary.results {
        println!(
            "x = {:+.6e} m: κ = {:.6e} ± {:.6e} ({}, n = {})",
            row.position_m.unwrap_or(f64::NAN),
            row.mean,
            row.std_error,
            row.method,
            row.n_runs
        );
    }
    Ok(Artifacts { files, summary })
}

pub fn scan(args: &ScenarioArgs) -> Result<Artifacts, CliError> {
    let scenario = load_scenario(args)?;
    if scenario.plan.positions.is_empty() {
        return Err(usage(
            "plan.positions",
            "a scan needs at least one position",
        ));
    }
    let experiment = scenario.experiment()?;
    let sessions = experiment.simulate()?;
    let summary = Summary::new(&scenario, session_rows(&sessions, scenario.error_method)?);
    let header = output::provenance(&scenario)?;
    let files = vec![
        output::write_atomic(&args.out, "scan.csv", |w| {
            output::scan_csv(w, &header, &summary.results)
        })?,
        output::write_atomic(&args.out, "summary.json", |w| output::json(w, &summary))?,
    ];
    println!(
        "{} positions written to {}",
        summary.results.len(),
        files[0].display()
    );
    Ok(Artifacts { files, summary })
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Artifacts, CliError> {
    let file = fs::File::open(&args.csv)
        .map_err(|e| usage("csv", format!("cannot read {}: {e}", args.csv.display())))?;
    let octets = read_octets_csv(std::io::BufReader::new(file))?;
    let kappas = octets
        .iter()
        .map(|o| {
            kappa_default(&o.octet).map_err(|e| Error::InRun {
                run: o.run as usize,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    let (summary, _) = summarize(&kappas, args.error_method)?;
    let summary = Summary::for_input(
        &args.csv,
        vec![SummaryRow::new(None, &summary, args.error_method)],
    );

    let runs: Vec<u64> = octets.iter().map(|o| o.run).collect();
    let header = vec![format!("source = {}", args.csv.display())];
    let files = vec![
        output::write_atomic(&args.out, "kappa_series.csv", |w| {
            output::run_kappa_csv(w, &header, &runs, &kappas)
        })?,
        output::write_atomic(&args.out, "summary.json", |w| output::json(w, &summary))?,
    ];
    let row = &summary.results[0];
    println!(
        "κ = {:.6e} ± {:.6e} ({}, n = {})",
        row.mean, row.std_error, row.method, row.n_runs
    );
    Ok(Artifacts { files, summary })
}

fn session_rows(
    sessions: &[KappaSeries],
    method: ErrorMethod,
) -> Result<Vec<SummaryRow>, CliError> {
    sessions
        .iter()
        .map(|s| {
            let (summary, _) = summarize(&s.kappa_values, method)?;
            Ok(SummaryRow::new(Some(s.position), &summary, method))
        })
        .collect()
}
