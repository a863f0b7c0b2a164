use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sorkin_core::protocol::{format_float, write_records_csv};
use sorkin_core::{ErrorMethod, KappaSeries, Scenario, SeriesSummary};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub position_m: Option<f64>,
    pub mean: f64,
    pub std: f64,
    pub std_error: f64,
    pub method: ErrorMethod,
    pub n_runs: usize,
}

impl SummaryRow {
    pub fn new(position_m: Option<f64>, s: &SeriesSummary, method: ErrorMethod) -> Self {
        Self {
            position_m,
            mean: s.mean,
            std: s.std,
            std_error: s.std_error,
            method,
            n_runs: s.n,
        }
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub results: Vec<SummaryRow>,
}

impl Summary {
    pub fn new(scenario: &Scenario, results: Vec<SummaryRow>) -> Self {
        Self {
            master_seed: Some(scenario.plan.master_seed),
            config: Some(scenario.clone()),
            input: None,
            results,
        }
    }

    pub fn for_input(path: &Path, results: Vec<SummaryRow>) -> Self {
        Self {
            master_seed: None,
            config: None,
            input: Some(path.display().to_string()),
            results,
        }
    }
}

/// Comment lines identifying the run: seed, then the resolved scenario.
pub fn provenance(scenario: &Scenario) -> Result<Vec<String>, CliError> {
    let mut lines = vec![format!("master_seed = {}", scenario.plan.master_seed)];
    lines.push("resolved scenario:".into());
    lines.extend(scenario.to_toml_string()?.lines().map(str::to_owned));
    Ok(lines)
}

fn comments(w: &mut dyn Write, lines: &[String]) -> io::Result<()> {
    for l in lines {
        if l.is_empty() {
            writeln!(w, "#")?;
        } else {
            writeln!(w, "# {l}")?;
        }
    }
    Ok(())
}

/// Writes to a temporary file next to the target and renames it into
/// place, so readers never see a half-written artifact.
pub fn write_atomic(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<PathBuf, CliError> {
    let io_err = |what: &str, e: io::Error| CliError {
        code: 1,
        message: format!("{what}: {e}"),
    };
    fs::create_dir_all(dir).map_err(|e| io_err(&dir.display().to_string(), e))?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let file = fs::File::create(&tmp).map_err(|e| io_err(&tmp.display().to_string(), e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        let file = w
            .into_inner()
            .map_err(|e| io_err(&tmp.display().to_string(), e.into_error()))?;
        file.sync_all()
            .map_err(|e| io_err(&tmp.display().to_string(), e))?;
        fs::rename(&tmp, &target).map_err(|e| io_err(&target.display().to_string(), e))
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map(|_| target)
}

fn io(e: io::Error) -> CliError {
    CliError {
        code: 1,
        message: e.to_string(),
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError {
        code: 1,
        message: e.to_string(),
    }
}

/// Run numbers continue across sessions: session `i` starts at `i · n_runs`.
fn run_offsets(sessions: &[KappaSeries]) -> Vec<u64> {
    let mut next = 0u64;
    sessions
        .iter()
        .map(|s| {
            let start = next;
            next += s.kappa_values.len() as u64;
            start
        })
        .collect()
}

pub fn kappa_series_csv(
    w: &mut dyn Write,
    header: &[String],
    sessions: &[KappaSeries],
) -> Result<(), CliError> {
    comments(w, header).map_err(io)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["run", "position_m", "kappa"])
        .map_err(csv_err)?;
    for (s, offset) in sessions.iter().zip(run_offsets(sessions)) {
        for (i, k) in s.kappa_values.iter().enumerate() {
            csv.write_record([
                (offset + i as u64).to_string(),
                format_float(s.position),
                format_float(*k),
            ])
            .map_err(csv_err)?;
        }
    }
    csv.flush().map_err(io)
}

pub fn run_kappa_csv(
    w: &mut dyn Write,
    header: &[String],
    runs: &[u64],
    kappas: &[f64],
) -> Result<(), CliError> {
    comments(w, header).map_err(io)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["run", "kappa"]).map_err(csv_err)?;
    for (run, k) in runs.iter().zip(kappas) {
        csv.write_record([run.to_string(), format_float(*k)])
            .map_err(csv_err)?;
    }
    csv.flush().map_err(io)
}

pub fn octets_csv(
    w: &mut dyn Write,
    header: &[String],
    sessions: &[KappaSeries],
) -> Result<(), CliError> {
    comments(w, header).map_err(io)?;
    let offsets = run_offsets(sessions);
    write_records_csv(
        w,
        sessions
            .iter()
            .zip(offsets)
            .map(|(s, o)| (o, s.records.as_slice())),
    )?;
    Ok(())
}

pub fn scan_csv(w: &mut dyn Write, header: &[String], rows: &[SummaryRow]) -> Result<(), CliError> {
    comments(w, header).map_err(io)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["position_m", "mean", "std_error"])
        .map_err(csv_err)?;
    for r in rows {
        csv.write_record([
            r.position_m.map(format_float).unwrap_or_default(),
            format_float(r.mean),
            format_float(r.std_error),
        ])
        .map_err(csv_err)?;
    }
    csv.flush().map_err(io)
}

pub fn json(w: &mut dyn Write, summary: &Summary) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, summary).map_err(|e| CliError {
        code: 1,
        message: e.to_string(),
    })?;
    writeln!(w).map_err(io)
}
