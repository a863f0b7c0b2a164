//! Shared fixtures for the benchmarks.

use std::collections::BTreeMap;

use sorkin_core::{Experiment, Scenario};

/// A preset prepared for running, with the run count overridden.
pub fn experiment(preset: &str, n_runs: usize) -> Experiment {
    let mut s = Scenario::preset(preset).expect("built-in preset");
    s.plan.n_runs = n_runs;
    s.experiment().expect("presets are valid")
}

/// Square-law subset probabilities for `n` equal, evenly phased paths.
pub fn square_law_subsets(n: usize) -> BTreeMap<usize, f64> {
    (0..1usize << n)
        .map(|mask| {
            let (re, im) = (0..n)
                .filter(|k| mask & (1 << k) != 0)
                .fold((0.0, 0.0), |(r, i), k| {
                    let phi = std::f64::consts::TAU * k as f64 / n as f64 * 0.37;
                    (r + phi.cos(), i + phi.sin())
                });
            (mask, re * re + im * im)
        })
        .collect()
}
