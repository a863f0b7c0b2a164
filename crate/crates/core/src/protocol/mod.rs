//! The measurement protocol: repeated runs over the eight slit
//! combinations in random order, each measured with the chosen source and
//! detector, assembled into octets and reduced to κ.
//!
//! A session is one detector position. Its clock starts at zero and
//! advances through every measurement and every mask move, so slow drifts
//! act across the whole session rather than restarting with each run.

mod ingest;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ingest::{format_float, read_octets_csv, write_records_csv, RunOctet, CSV_HEADER};

use crate::detection::DetectionLaw;
use crate::error::{Error, Result};
use crate::hierarchy::{kappa_default, KappaEstimate, ProbabilityOctet, SlitCombination};
use crate::instruments::{
    apd_observed_rate, apply_fault, heralded_measurement, poisson_counts, power_meter_reading,
    DriftProcess, Instruments,
};
use crate::optics::{
    central_maximum, ApertureSample, Propagator, SlitGeometry, TransmittanceTable,
};
use crate::rng::{stream, SimRng, DRIFT_STREAM};
use crate::stats::{summarize, ErrorMethod};

pub const DEFAULT_INTEGRATION_TIME: f64 = 1.0;
pub const DEFAULT_TRIGGER_QUOTA: u64 = 30_000_000;

/// Detector positions farther than this many single-slit envelope widths
/// (`λL / w_min`) from the axis are outside the simulated pattern.
pub const PATTERN_EXTENT_ENVELOPES: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementMode {
    /// Laser and calibrated power meter; raw values in watts.
    #[default]
    PowerMeter,
    /// Attenuated laser on a photon counter; raw values are counts over a
    /// fixed integration time.
    AttenuatedApd,
    /// Pair source; raw values are coincidences, normalised by triggers.
    Heralded,
}

impl MeasurementMode {
    pub fn is_timed(self) -> bool {
        !matches!(self, MeasurementMode::Heralded)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// Fresh uniform permutation of the eight combinations every run.
    #[default]
    Random,
    /// Canonical order every run. Only useful as a control.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunPlan {
    pub n_runs: usize,
    pub mode: MeasurementMode,
    /// Seconds per combination; timed modes only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integration_time: Option<f64>,
    /// Triggers per combination; heralded mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trigger_quota: Option<u64>,
    /// Detector positions in metres. Empty means the central maximum.
    pub positions: Vec<f64>,
    pub master_seed: u64,
    pub ordering: Ordering,
    /// Seconds the blocking mask takes to change combination.
    pub mask_move_time: f64,
    /// Sample Poisson / binomial counting noise. When off, counting modes
    /// record expected values.
    pub shot_noise: bool,
}

impl Default for RunPlan {
    fn default() -> Self {
        Self {
            n_runs: 100,
            mode: MeasurementMode::PowerMeter,
            integration_time: None,
            trigger_quota: None,
            positions: Vec::new(),
            master_seed: 0,
            ordering: Ordering::Random,
            mask_move_time: 1.0,
            shot_noise: true,
        }
    }
}

impl RunPlan {
    /// Fills in the default integration time or trigger quota for the mode.
    pub fn resolved(mut self) -> Self {
        if self.mode.is_timed() {
            if self.trigger_quota.is_none() {
                self.integration_time
                    .get_or_insert(DEFAULT_INTEGRATION_TIME);
            }
        } else if self.integration_time.is_none() {
            self.trigger_quota.get_or_insert(DEFAULT_TRIGGER_QUOTA);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::config("plan.n_runs", "must be >= 1"));
        }
        if self.n_runs > u32::MAX as usize - 1 {
            return Err(Error::config("plan.n_runs", "too many runs"));
        }
        match (
            self.mode.is_timed(),
            self.integration_time,
            self.trigger_quota,
        ) {
            (true, Some(t), None) => {
                if !(t.is_finite() && t > 0.0) {
                    return Err(Error::config("plan.integration_time", "must be > 0"));
                }
            }
            (true, _, Some(_)) => {
                return Err(Error::config(
                    "plan.trigger_quota",
                    "only valid in heralded mode",
                ));
            }
            (false, None, Some(q)) => {
                if q == 0 {
                    return Err(Error::config("plan.trigger_quota", "must be >= 1"));
                }
            }
            (false, Some(_), _) => {
                return Err(Error::config(
                    "plan.integration_time",
                    "only valid in timed modes",
                ));
            }
            (true, None, None) => {
                return Err(Error::config(
                    "plan.integration_time",
                    "required in timed modes",
                ))
            }
            (false, None, None) => {
                return Err(Error::config(
                    "plan.trigger_quota",
                    "required in heralded mode",
                ))
            }
        }
        if !(self.mask_move_time.is_finite() && self.mask_move_time >= 0.0) {
            return Err(Error::config("plan.mask_move_time", "must be >= 0"));
        }
        for (i, x) in self.positions.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::config(
                    format!("plan.positions[{i}]"),
                    "must be finite",
                ));
            }
        }
        Ok(())
    }
}

/// One of the eight measurements of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub run_index: usize,
    pub combination: SlitCombination,
    /// Watts or counts.
    pub raw_value: f64,
    /// 1 for power, seconds for timed counts, triggers for heralded counts.
    pub normalizer: f64,
    /// Position of this measurement within its run's sequence.
    pub timestamp_index: usize,
}

impl MeasurementRecord {
    pub fn value(&self) -> f64 {
        self.raw_value / self.normalizer
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaSeries {
    pub position: f64,
    pub kappa_values: Vec<f64>,
    /// In measurement order, eight per run.
    pub records: Vec<MeasurementRecord>,
}

impl KappaSeries {
    /// The octet of each run, in canonical combination order.
    pub fn octets(&self) -> Result<Vec<ProbabilityOctet>> {
        self.records.chunks(8).map(assemble_octet).collect()
    }
}

/// Normalises each record and places it in canonical order.
pub fn assemble_octet(records: &[MeasurementRecord]) -> Result<ProbabilityOctet> {
    let mut values = [None; 8];
    for r in records {
        let slot = &mut values[r.combination.index()];
        if slot.is_some() {
            return Err(Error::InvalidOctet(format!(
                "combination {} measured twice",
                r.combination
            )));
        }
        *slot = Some(r.value());
    }
    let mut out = [0.0; 8];
    for c in SlitCombination::ALL {
        out[c.index()] = values[c.index()]
            .ok_or_else(|| Error::InvalidOctet(format!("combination {c} not measured")))?;
    }
    ProbabilityOctet::new(out)
}

/// Physical setup plus plan, validated once, with the flux reference
/// (ABC at the central maximum, unfaulted) precomputed.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub geometry: SlitGeometry,
    pub law: DetectionLaw,
    pub propagator: Propagator,
    pub instruments: Instruments,
    pub plan: RunPlan,
    anchor: f64,
    reference: f64,
    table: TransmittanceTable,
}

impl Experiment {
    pub fn new(
        geometry: SlitGeometry,
        law: DetectionLaw,
        propagator: Propagator,
        instruments: Instruments,
        plan: RunPlan,
    ) -> Result<Self> {
        let plan = plan.resolved();
        geometry.validate()?;
        instruments.validate()?;
        plan.validate()?;

        let extent = pattern_extent(&geometry);
        for (i, x) in plan.positions.iter().enumerate() {
            if x.abs() > extent {
                return Err(Error::config(
                    format!("plan.positions[{i}]"),
                    format!("{x} m is outside the simulated pattern (±{extent:e} m)"),
                ));
            }
        }

        let base = TransmittanceTable::from_geometry(&geometry);
        let table = apply_fault(&base, &instruments.faults)?;
        let anchor = central_maximum(&geometry, law, propagator)?;
        let reference = ApertureSample::new(&geometry, anchor, propagator)?.probability(
            SlitCombination::ABC,
            &base.row(SlitCombination::ABC),
            law,
        );
        if !(reference.is_finite() && reference > 0.0) {
            return Err(Error::OutOfModel(format!(
                "no signal at the central maximum ({reference:e})"
            )));
        }

        let exp = Self {
            geometry,
            law,
            propagator,
            instruments,
            plan,
            anchor,
            reference,
            table,
        };
        exp.instruments.drift.validate(exp.session_duration())?;
        if exp.plan.mode == MeasurementMode::Heralded && exp.heralded_source().trigger_rate() <= 0.0
        {
            return Err(Error::CannotTerminate);
        }
        Ok(exp)
    }

    /// Central maximum of the all-open pattern: the default position.
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    /// Plan positions, or the anchor alone when none are given.
    pub fn positions(&self) -> Vec<f64> {
        if self.plan.positions.is_empty() {
            vec![self.anchor]
        } else {
            self.plan.positions.clone()
        }
    }

    /// Nominal session length in seconds (heralded: expected time).
    pub fn session_duration(&self) -> f64 {
        let per = match self.plan.mode {
            MeasurementMode::Heralded => {
                let rate = self.heralded_source().trigger_rate();
                self.plan.trigger_quota.unwrap_or(0) as f64 / rate
            }
            _ => self.plan.integration_time.unwrap_or(0.0),
        };
        self.plan.n_runs as f64 * 8.0 * (per + self.plan.mask_move_time)
    }

    fn heralded_source(&self) -> crate::instruments::HeraldedSource {
        self.instruments
            .source
            .heralded(self.plan.trigger_quota.unwrap_or(DEFAULT_TRIGGER_QUOTA))
    }

    /// Expected signals at `position` relative to the reference, with
    /// faults applied and no background.
    pub fn relative_octet(&self, position: f64) -> Result<[f64; 8]> {
        let sample = ApertureSample::new(&self.geometry, position, self.propagator)?;
        let mut out = [0.0; 8];
        for c in SlitCombination::ALL {
            out[c.index()] = sample.probability(c, &self.table.row(c), self.law) / self.reference;
        }
        Ok(out)
    }

    /// Expected recorded values (raw / normaliser) with no noise or drift.
    pub fn expected_octet(&self, position: f64) -> Result<ProbabilityOctet> {
        let rel = self.relative_octet(position)?;
        ProbabilityOctet::from_fn(|c| self.expected_value(rel[c.index()]))
    }

    fn expected_value(&self, relative: f64) -> f64 {
        let inst = &self.instruments;
        let signal = inst.source.with_background(relative);
        match self.plan.mode {
            MeasurementMode::PowerMeter => {
                inst.power_meter.response(inst.source.peak_power * signal)
            }
            MeasurementMode::AttenuatedApd => {
                apd_observed_rate(inst.source.peak_rate * signal, &inst.apd)
            }
            MeasurementMode::Heralded => self.coincidence_probability(relative),
        }
    }

    fn coincidence_probability(&self, relative: f64) -> f64 {
        let inst = &self.instruments;
        inst.source.signal_efficiency
            * inst.apd.efficiency
            * inst.source.collection
            * inst.source.with_background(relative)
            + inst.apd.dark_rate * inst.apd.coincidence_window
    }

    /// One session at `position`. `session` selects the random streams;
    /// distinct positions of a scan use distinct sessions.
    pub fn run_session(&self, position: f64, session: u32) -> Result<KappaSeries> {
        let rel = self.relative_octet(position)?;
        let seed = self.plan.master_seed;
        let mut drift =
            DriftProcess::new(self.instruments.drift, stream(seed, session, DRIFT_STREAM));
        let mut clock = 0.0;
        let mut kappa_values = Vec::with_capacity(self.plan.n_runs);
        let mut records = Vec::with_capacity(8 * self.plan.n_runs);

        for run in 0..self.plan.n_runs {
            let mut rng = stream(seed, session, run as u32);
            let mut order = SlitCombination::ALL;
            if self.plan.ordering == Ordering::Random {
                order.shuffle(&mut rng);
            }
            let start = records.len();
            for (slot, &c) in order.iter().enumerate() {
                let (raw_value, normalizer, duration) = self
                    .measure(rel[c.index()], clock, &mut drift, &mut rng)
                    .map_err(|e| in_run(run, e))?;
                records.push(MeasurementRecord {
                    run_index: run,
                    combination: c,
                    raw_value,
                    normalizer,
                    timestamp_index: slot,
                });
                clock += duration + self.plan.mask_move_time;
            }
            let octet = assemble_octet(&records[start..]).map_err(|e| in_run(run, e))?;
            kappa_values.push(kappa_default(&octet).map_err(|e| in_run(run, e))?);
        }
        Ok(KappaSeries {
            position,
            kappa_values,
            records,
        })
    }

    /// Returns `(raw, normaliser, duration)` for one combination measured
    /// from time `start`.
    fn measure(
        &self,
        relative: f64,
        start: f64,
        drift: &mut DriftProcess,
        rng: &mut SimRng,
    ) -> Result<(f64, f64, f64)> {
        let inst = &self.instruments;
        let signal = inst.source.with_background(relative);
        match self.plan.mode {
            MeasurementMode::PowerMeter => {
                let t = self.plan.integration_time.expect("validated");
                let m = drift.multiplier_at(start + 0.5 * t)?;
                let reading = power_meter_reading(
                    inst.source.peak_power * signal * m,
                    &inst.power_meter,
                    rng,
                )?;
                Ok((reading, 1.0, t))
            }
            MeasurementMode::AttenuatedApd => {
                let t = self.plan.integration_time.expect("validated");
                let m = drift.multiplier_at(start + 0.5 * t)?;
                let rate = apd_observed_rate(inst.source.peak_rate * signal * m, &inst.apd);
                let counts = if self.plan.shot_noise {
                    poisson_counts(rate, t, rng) as f64
                } else {
                    rate * t
                };
                Ok((counts, t, t))
            }
            MeasurementMode::Heralded => {
                // flux drift changes how long the quota takes, not the
                // per-trigger success probability
                let m = drift.multiplier_at(start)?;
                let p = self.coincidence_probability(relative);
                if p > 1.0 {
                    return Err(Error::OutOfModel(format!(
                        "coincidence probability {p} exceeds 1"
                    )));
                }
                let source = self.heralded_source();
                let quota = source.trigger_quota as f64;
                let (coincidences, elapsed) = if self.plan.shot_noise {
                    let out = heralded_measurement(&source, p, rng)?;
                    (out.coincidences as f64, out.elapsed)
                } else {
                    (quota * p, quota / source.trigger_rate())
                };
                Ok((coincidences, quota, elapsed / m))
            }
        }
    }

    /// One session per plan position (the anchor if none), sessions
    /// numbered by position index, run in parallel.
    pub fn simulate(&self) -> Result<Vec<KappaSeries>> {
        self.sessions(&self.positions())
    }

    fn sessions(&self, positions: &[f64]) -> Result<Vec<KappaSeries>> {
        if positions.len() > u32::MAX as usize {
            return Err(Error::config("plan.positions", "too many positions"));
        }
        positions
            .par_iter()
            .enumerate()
            .map(|(i, &x)| self.run_session(x, i as u32))
            .collect()
    }

    pub fn position_scan(
        &self,
        positions: &[f64],
        method: ErrorMethod,
    ) -> Result<Vec<(f64, KappaEstimate)>> {
        let extent = pattern_extent(&self.geometry);
        if let Some((i, x)) = positions
            .iter()
            .enumerate()
            .find(|(_, x)| x.is_nan() || x.abs() > extent)
        {
            return Err(Error::config(
                format!("plan.positions[{i}]"),
                format!("{x} m is outside the simulated pattern (±{extent:e} m)"),
            ));
        }
        self.sessions(positions)?
            .into_iter()
            .map(|s| Ok((s.position, summarize(&s.kappa_values, method)?.1)))
            .collect()
    }
}

fn in_run(run: usize, e: Error) -> Error {
    Error::InRun {
        run,
        source: Box::new(e),
    }
}

pub fn pattern_extent(geom: &SlitGeometry) -> f64 {
    let w_min = geom
        .slit_widths
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    PATTERN_EXTENT_ENVELOPES * geom.wavelength * geom.screen_distance / w_min
}

/// A single session (session 0) at `position`.
pub fn run_experiment(
    geometry: &SlitGeometry,
    law: DetectionLaw,
    propagator: Propagator,
    instruments: &Instruments,
    plan: &RunPlan,
    position: f64,
) -> Result<KappaSeries> {
    Experiment::new(
        geometry.clone(),
        law,
        propagator,
        instruments.clone(),
        plan.clone(),
    )?
    .run_session(position, 0)
}

pub fn position_scan(
    geometry: &SlitGeometry,
    law: DetectionLaw,
    propagator: Propagator,
    instruments: &Instruments,
    plan: &RunPlan,
    positions: &[f64],
    method: ErrorMethod,
) -> Result<Vec<(f64, KappaEstimate)>> {
    Experiment::new(
        geometry.clone(),
        law,
        propagator,
        instruments.clone(),
        plan.clone(),
    )?
    .position_scan(positions, method)
}
