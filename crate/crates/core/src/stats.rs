//! κ estimation and uncertainty.
//!
//! Two error-bar conventions are supported: the ordinary sample variance
//! and the Allan variance (half the mean squared first difference), which
//! ignores slow drifts between successive samples. Gaussian propagation
//! through ε/δ uses analytic partial derivatives with the sign of each
//! pairwise term frozen at its measured value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{
    pairwise_interference, sorkin_delta, sorkin_epsilon, EstimationMethod, KappaEstimate,
    ProbabilityOctet, SlitCombination,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMethod {
    #[default]
    Standard,
    Allan,
}

impl ErrorMethod {
    pub fn estimation_method(self) -> EstimationMethod {
        match self {
            ErrorMethod::Standard => EstimationMethod::StandardVariance,
            ErrorMethod::Allan => EstimationMethod::AllanVariance,
        }
    }

    pub fn variance(self, series: &[f64]) -> Result<f64> {
        match self {
            ErrorMethod::Standard => standard_variance(series),
            ErrorMethod::Allan => allan_variance(series),
        }
    }
}

impl fmt::Display for ErrorMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorMethod::Standard => "standard",
            ErrorMethod::Allan => "allan",
        })
    }
}

impl FromStr for ErrorMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "standard" => Ok(ErrorMethod::Standard),
            "allan" => Ok(ErrorMethod::Allan),
            other => Err(Error::config(
                "error_method",
                format!("expected \"standard\" or \"allan\", got {other:?}"),
            )),
        }
    }
}

fn require_len(series: &[f64], needed: usize) -> Result<()> {
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            got: series.len(),
        });
    }
    Ok(())
}

pub fn mean(series: &[f64]) -> f64 {
    series.iter().sum::<f64>() / series.len() as f64
}

/// Sample variance with the `n − 1` denominator.
pub fn standard_variance(series: &[f64]) -> Result<f64> {
    require_len(series, 2)?;
    let m = mean(series);
    Ok(series.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (series.len() - 1) as f64)
}

/// `1/(2(N−1)) Σ (x_{i+1} − x_i)²`.
pub fn allan_variance(series: &[f64]) -> Result<f64> {
    require_len(series, 2)?;
    let sum: f64 = series.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Ok(sum / (2.0 * (series.len() - 1) as f64))
}

/// Distribution summary of a κ series with a one-σ band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub mean: f64,
    /// Sample standard deviation (`n − 1`).
    pub std: f64,
    /// `sqrt(variance / n)` for the chosen variance.
    pub std_error: f64,
    pub n: usize,
    pub band_lo: f64,
    pub band_hi: f64,
}

pub fn summarize(series: &[f64], method: ErrorMethod) -> Result<(SeriesSummary, KappaEstimate)> {
    require_len(series, 2)?;
    if let Some(bad) = series.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("series value {bad}")));
    }
    let n = series.len();
    let m = mean(series);
    let std = standard_variance(series)?.sqrt();
    let std_error = (method.variance(series)? / n as f64).sqrt();
    let summary = SeriesSummary {
        mean: m,
        std,
        std_error,
        n,
        band_lo: m - std,
        band_hi: m + std,
    };
    let estimate = KappaEstimate::new(m, std_error, method.estimation_method(), n)?;
    Ok((summary, estimate))
}

/// `∂κ/∂P_S` for all eight entries, treating each `|I_ij|` as `s_ij I_ij`
/// with `s_ij` the measured sign. Fails when some `|I_ij| <= sign_tolerance`.
pub fn kappa_gradient(octet: &ProbabilityOctet, sign_tolerance: f64) -> Result<[f64; 8]> {
    let mut signs = [0.0; 8];
    for pair in SlitCombination::PAIRS {
        let value = pairwise_interference(octet, pair)?;
        if value.abs() <= sign_tolerance {
            return Err(Error::SignAmbiguous {
                pair,
                value,
                tolerance: sign_tolerance,
            });
        }
        signs[pair.index()] = value.signum();
    }
    let eps = sorkin_epsilon(octet);
    let delta = sorkin_delta(octet);

    let mut grad = [0.0; 8];
    for c in SlitCombination::ALL {
        // ε carries (−1)^(3 − |S|)
        let d_eps = if (3 - c.len()) % 2 == 0 { 1.0 } else { -1.0 };
        // δ = Σ_pairs s (P_pair − P_i − P_j + P_0)
        let d_delta: f64 = SlitCombination::PAIRS
            .iter()
            .map(|&pair| {
                let s = signs[pair.index()];
                if c == pair || c.is_empty() {
                    s
                } else if c.len() == 1 && pair.bits() & c.bits() != 0 {
                    -s
                } else {
                    0.0
                }
            })
            .sum();
        grad[c.index()] = (d_eps * delta - eps * d_delta) / (delta * delta);
    }
    Ok(grad)
}

/// Gaussian propagation `σ_κ² = Σ (∂κ/∂P_S)² σ_S²`, with the sign
/// tolerance at `1e-9` of the largest entry.
pub fn propagate_kappa_error(octet: &ProbabilityOctet, sigmas: &[f64; 8]) -> Result<f64> {
    propagate_kappa_error_with(octet, sigmas, octet.default_delta_floor())
}

pub fn propagate_kappa_error_with(
    octet: &ProbabilityOctet,
    sigmas: &[f64; 8],
    sign_tolerance: f64,
) -> Result<f64> {
    if let Some(s) = sigmas.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(Error::NonFinite(format!(
            "sigma {s} must be finite and >= 0"
        )));
    }
    let grad = kappa_gradient(octet, sign_tolerance)?;
    Ok(grad
        .iter()
        .zip(sigmas)
        .map(|(g, s)| (g * s).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Entry-wise mean of a set of octets.
pub fn mean_octet(octets: &[ProbabilityOctet]) -> Result<ProbabilityOctet> {
    if octets.is_empty() {
        return Err(Error::SeriesTooShort { needed: 1, got: 0 });
    }
    ProbabilityOctet::from_fn(|c| {
        octets.iter().map(|o| o.get(c)).sum::<f64>() / octets.len() as f64
    })
}

/// Per-combination standard deviation across runs, using the sample or
/// the Allan variance of each measured quantity.
pub fn octet_sigmas(octets: &[ProbabilityOctet], method: ErrorMethod) -> Result<[f64; 8]> {
    let mut out = [0.0; 8];
    for c in SlitCombination::ALL {
        let series: Vec<f64> = octets.iter().map(|o| o.get(c)).collect();
        out[c.index()] = method.variance(&series)?.sqrt();
    }
    Ok(out)
}

/// Single-run σ_κ propagated from the run-to-run spread of each of the
/// eight quantities, evaluated at the mean octet.
pub fn propagated_run_sigma(octets: &[ProbabilityOctet], method: ErrorMethod) -> Result<f64> {
    let centre = mean_octet(octets)?;
    let sigmas = octet_sigmas(octets, method)?;
    propagate_kappa_error(&centre, &sigmas)
}
