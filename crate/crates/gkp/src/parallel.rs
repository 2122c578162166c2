//! Data-parallel versions of the trial loops.
//!
//! Each trial draws from its own RNG stream, keyed by the master seed and
//! the trial index, and the aggregates are plain counts; results are
//! therefore identical to the sequential drivers whatever the scheduling.

use gkp_core::montecarlo::{RunConfig, RunStats, Simulator, Tally};
use gkp_core::oracle::{compare_trial, summarize, AgreementReport, OracleConfig, ShiftSampling};
use gkp_core::shift::Quadrature;
use gkp_core::{Result, ShiftDistribution};
use rayon::prelude::*;

/// Trials per work item.
const CHUNK: u64 = 512;

pub fn simulate_parallel(
    config: RunConfig,
    dist0: &ShiftDistribution,
    dist_plus: &ShiftDistribution,
) -> Result<RunStats> {
    let sim = Simulator::new(config, dist0, dist_plus)?;
    let chunks = config.trials.div_ceil(CHUNK);
    let tallies = (0..chunks)
        .into_par_iter()
        .map(|c| sim.tally(c * CHUNK..((c + 1) * CHUNK).min(config.trials)))
        .collect::<Result<Vec<_>>>()?;
    let total = tallies.iter().fold(Tally::default(), |acc, t| acc.merge(t));
    Ok(RunStats::from_tally(config, &total))
}

pub fn oracle_check_parallel(
    config: &OracleConfig,
    quadrature: Quadrature,
    sampling: ShiftSampling,
    trials: usize,
    seed: u64,
) -> Result<AgreementReport> {
    let details = (0..trials as u64)
        .into_par_iter()
        .map(|i| compare_trial(config, quadrature, sampling, seed, i))
        .collect::<Result<Vec<_>>>()?;
    summarize(details, config)
}
