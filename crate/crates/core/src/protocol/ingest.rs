//! Octet exchange format: one CSV row per measurement,
//! `run,combination,raw_value,normalizer`, with `#` comment lines allowed.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::hierarchy::{ProbabilityOctet, SlitCombination};

use super::MeasurementRecord;

pub const CSV_HEADER: [&str; 4] = ["run", "combination", "raw_value", "normalizer"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOctet {
    pub run: u64,
    pub octet: ProbabilityOctet,
}

/// Reads measurement rows and groups them into octets, sorted by run.
/// Row numbers in errors are 1-based file lines.
pub fn read_octets_csv<R: Read>(mut input: R) -> Result<Vec<RunOctet>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    // the csv reader's line count skips comments and blank lines, so
    // comments become one-field placeholder records instead
    let text: String = text
        .lines()
        .map(|l| {
            if l.trim().is_empty() || l.trim_start().starts_with('#') {
                "#"
            } else {
                l
            }
        })
        .flat_map(|l| [l, "\n"])
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut header_seen = false;
    // run -> (first row, value and row per combination)
    type Slots = [Option<(f64, usize)>; 8];
    let mut runs: BTreeMap<u64, (usize, Slots)> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Ingest {
            row: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        if rec.len() == 1 && &rec[0] == "#" {
            continue;
        }
        let row = rec.position().map_or(0, |p| p.line() as usize);
        if !header_seen {
            if rec.iter().ne(CSV_HEADER) {
                return Err(Error::Ingest {
                    row,
                    message: format!("header must be exactly `{}`", CSV_HEADER.join(",")),
                });
            }
            header_seen = true;
            continue;
        }
        let err = |message: String| Error::Ingest { row, message };
        if rec.len() != 4 {
            return Err(err(format!("expected 4 fields, got {}", rec.len())));
        }
        let run: u64 = rec[0]
            .parse()
            .map_err(|_| err(format!("run {:?} is not a non-negative integer", &rec[0])))?;
        let combination: SlitCombination = rec[1]
            .parse()
            .map_err(|_| err(format!("unknown combination {:?}", &rec[1])))?;
        let number = |field: &str, name: &str| -> Result<f64> {
            let v: f64 = field
                .parse()
                .map_err(|_| err(format!("{name} {field:?} is not a number")))?;
            if !v.is_finite() {
                return Err(err(format!("{name} must be finite")));
            }
            Ok(v)
        };
        let raw = number(&rec[2], "raw_value")?;
        let normalizer = number(&rec[3], "normalizer")?;
        if raw < 0.0 {
            return Err(err(format!("raw_value {raw} is negative")));
        }
        if normalizer <= 0.0 {
            return Err(err(format!("normalizer {normalizer} must be > 0")));
        }

        let (_, slots) = runs.entry(run).or_insert((row, [None; 8]));
        let slot = &mut slots[combination.index()];
        if let Some((_, first)) = slot {
            return Err(err(format!(
                "duplicate combination {combination} in run {run} (first at row {first})"
            )));
        }
        *slot = Some((raw / normalizer, row));
    }
    if !header_seen {
        return Err(Error::Ingest {
            row: 0,
            message: "empty file".into(),
        });
    }

    runs.into_iter()
        .map(|(run, (first_row, slots))| {
            let mut values = [0.0; 8];
            for c in SlitCombination::ALL {
                values[c.index()] = match slots[c.index()] {
                    Some((v, _)) => v,
                    None => {
                        return Err(Error::Ingest {
                            row: first_row,
                            message: format!("run {run} is missing combination {c}"),
                        })
                    }
                };
            }
            Ok(RunOctet {
                run,
                octet: ProbabilityOctet::new(values)?,
            })
        })
        .collect()
}

/// Shortest decimal that parses back to the same `f64`, in plain
/// notation for moderate magnitudes and exponent notation otherwise.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Writes the header and one row per record. `run_offset` is added to each
/// record's run index so several sessions can share one file.
pub fn write_records_csv<'a, W: Write>(
    output: W,
    sessions: impl IntoIterator<Item = (u64, &'a [MeasurementRecord])>,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(output);
    let io = |e: csv::Error| Error::Io(e.to_string());
    writer.write_record(CSV_HEADER).map_err(io)?;
    for (run_offset, records) in sessions {
        for r in records {
            writer
                .write_record([
                    (run_offset + r.run_index as u64).to_string(),
                    r.combination.to_string(),
                    format_float(r.raw_value),
                    format_float(r.normalizer),
                ])
                .map_err(io)?;
        }
    }
    writer.flush()?;
    Ok(())
}
