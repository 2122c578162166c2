//! Repeated correction rounds driven by sampled preparation shifts.
//!
//! Only state preparation is noisy: each trial draws the qubit's initial
//! shift and, per round, one x-ancilla (prepared as |+⟩) and one p-ancilla
//! (prepared as |0⟩), then runs [`correction_round`]. The |+⟩ distribution
//! is the |0⟩ one with u and v exchanged.

use alloc::vec::Vec;
use core::ops::Range;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::error_model::{p_no_error, trial_rng, SamplerState, ShiftDistribution};
use crate::shift::{correction_round, QubitErrorState};
use crate::{Error, LogicalLabel, Result, StateParams, CORRECTABLE_SHIFT, SQRT_PI};

/// Number of bins of the residual histogram over `[0, √π]`.
pub const HISTOGRAM_BINS: usize = 32;

/// z for a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ThresholdMode {
    /// Run every round and count flips.
    #[default]
    TrackOnly,
    /// End a trial at its first flip.
    AbortOnFlip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunConfig {
    pub params: StateParams,
    pub rounds: u32,
    pub trials: u64,
    pub master_seed: u64,
    pub threshold_mode: ThresholdMode,
}

impl RunConfig {
    pub fn new(params: StateParams, rounds: u32, trials: u64, master_seed: u64) -> Result<Self> {
        let config = Self { params, rounds, trials, master_seed, threshold_mode: ThresholdMode::TrackOnly };
        config.validate()?;
        Ok(config)
    }

    pub fn with_mode(mut self, mode: ThresholdMode) -> Self {
        self.threshold_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds < 1 {
            return Err(Error::invalid("rounds must be at least 1"));
        }
        if self.trials < 1 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        Ok(())
    }

    /// Fresh states per trial: the qubit plus two ancillas per round.
    pub fn states_consumed(&self) -> u32 {
        1 + 2 * self.rounds
    }
}

/// Rate with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateEstimate {
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RateEstimate {
    pub fn wilson(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return Self { rate: 0.0, ci_low: 0.0, ci_high: 1.0 };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        // The score interval touches 0 (or 1) exactly at the extremes;
        // pin those against round-off.
        let ci_low = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
        let ci_high = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
        Self { rate: p, ci_low, ci_high }
    }

    /// Binomial standard error of the point estimate.
    pub fn std_error(&self, trials: u64) -> f64 {
        (self.rate * (1.0 - self.rate) / trials as f64).sqrt()
    }
}

/// Counts from a set of trials; merging is order-insensitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub x_flip_trials: u64,
    pub z_flip_trials: u64,
    pub any_flip_trials: u64,
    /// Trials whose every sampled shift had magnitude below √π/6.
    pub inside_threshold_trials: u64,
    pub inside_threshold_flips: u64,
    pub histogram: Vec<u64>,
}

impl Default for Tally {
    fn default() -> Self {
        Self {
            trials: 0,
            x_flip_trials: 0,
            z_flip_trials: 0,
            any_flip_trials: 0,
            inside_threshold_trials: 0,
            inside_threshold_flips: 0,
            histogram: alloc::vec![0; HISTOGRAM_BINS],
        }
    }
}

impl Tally {
    pub fn merge(mut self, other: &Tally) -> Tally {
        self.trials += other.trials;
        self.x_flip_trials += other.x_flip_trials;
        self.z_flip_trials += other.z_flip_trials;
        self.any_flip_trials += other.any_flip_trials;
        self.inside_threshold_trials += other.inside_threshold_trials;
        self.inside_threshold_flips += other.inside_threshold_flips;
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        self
    }

    fn record(&mut self, outcome: &TrialOutcome) {
        self.trials += 1;
        self.x_flip_trials += u64::from(outcome.x_flip);
        self.z_flip_trials += u64::from(outcome.z_flip);
        let any = outcome.x_flip || outcome.z_flip;
        self.any_flip_trials += u64::from(any);
        if outcome.inside_threshold {
            self.inside_threshold_trials += 1;
            self.inside_threshold_flips += u64::from(any);
        }
        for r in &outcome.residuals {
            self.histogram[histogram_bin(*r)] += 1;
        }
    }
}

fn histogram_bin(magnitude: f64) -> usize {
    let b = (magnitude / SQRT_PI * HISTOGRAM_BINS as f64).floor();
    if b >= 0.0 {
        (b as usize).min(HISTOGRAM_BINS - 1)
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub x_flip: bool,
    pub z_flip: bool,
    pub inside_threshold: bool,
    /// Magnitude of each step's residual relative to the lattice.
    pub residuals: Vec<f64>,
    pub final_state: QubitErrorState,
}

/// Per-step residual histogram over `[0, √π]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunStats {
    pub config: RunConfig,
    pub trials: u64,
    pub x_flip_trials: u64,
    pub z_flip_trials: u64,
    pub any_flip_trials: u64,
    pub x_flip_rate: RateEstimate,
    pub z_flip_rate: RateEstimate,
    pub any_flip_rate: RateEstimate,
    pub inside_threshold_trials: u64,
    pub inside_threshold_flips: u64,
    pub residual_histogram: Histogram,
}

impl RunStats {
    pub fn from_tally(config: RunConfig, tally: &Tally) -> Self {
        let n = tally.trials;
        Self {
            config,
            trials: n,
            x_flip_trials: tally.x_flip_trials,
            z_flip_trials: tally.z_flip_trials,
            any_flip_trials: tally.any_flip_trials,
            x_flip_rate: RateEstimate::wilson(tally.x_flip_trials, n),
            z_flip_rate: RateEstimate::wilson(tally.z_flip_trials, n),
            any_flip_rate: RateEstimate::wilson(tally.any_flip_trials, n),
            inside_threshold_trials: tally.inside_threshold_trials,
            inside_threshold_flips: tally.inside_threshold_flips,
            residual_histogram: Histogram {
                bin_width: SQRT_PI / HISTOGRAM_BINS as f64,
                counts: tally.histogram.clone(),
            },
        }
    }

    /// Fraction of trials without any flip.
    pub fn success_rate(&self) -> f64 {
        1.0 - self.any_flip_rate.rate
    }
}

/// Samplers and distributions for one configuration.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    config: RunConfig,
    dist0: &'a ShiftDistribution,
    dist_plus: &'a ShiftDistribution,
    sampler0: SamplerState,
    sampler_plus: SamplerState,
}

impl<'a> Simulator<'a> {
    pub fn new(config: RunConfig, dist0: &'a ShiftDistribution, dist_plus: &'a ShiftDistribution) -> Result<Self> {
        config.validate()?;
        if dist0.params != config.params || dist_plus.params != config.params {
            return Err(Error::invalid("distributions must be built from the run's state parameters"));
        }
        let sampler0 = SamplerState::new(dist0, config.master_seed)?;
        let sampler_plus = SamplerState::new(dist_plus, config.master_seed)?;
        Ok(Self { config, dist0, dist_plus, sampler0, sampler_plus })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn run_trial(&self, index: u64) -> Result<TrialOutcome> {
        let mut rng = trial_rng(self.config.master_seed, index);
        let initial = self.sampler0.draw(self.dist0, &mut rng);
        let mut inside = initial.max_abs() < CORRECTABLE_SHIFT;
        let mut state = QubitErrorState::new(initial);
        let mut x_flip = false;
        let mut z_flip = false;
        let mut residuals = Vec::with_capacity(2 * self.config.rounds as usize);
        for _ in 0..self.config.rounds {
            let ax = self.sampler_plus.draw(self.dist_plus, &mut rng);
            let ap = self.sampler0.draw(self.dist0, &mut rng);
            inside &= ax.max_abs() < CORRECTABLE_SHIFT && ap.max_abs() < CORRECTABLE_SHIFT;
            let (next, records) = correction_round(state, ax, ap)?;
            for rec in &records {
                residuals.push(rec.reduced_residual().abs());
            }
            x_flip |= records[0].flip_applied;
            z_flip |= records[1].flip_applied;
            state = next;
            if self.config.threshold_mode == ThresholdMode::AbortOnFlip && (x_flip || z_flip) {
                break;
            }
        }
        Ok(TrialOutcome { x_flip, z_flip, inside_threshold: inside, residuals, final_state: state })
    }

    /// Tally of the trials with indices in `range`.
    pub fn tally(&self, range: Range<u64>) -> Result<Tally> {
        let mut tally = Tally::default();
        for i in range {
            tally.record(&self.run_trial(i)?);
        }
        Ok(tally)
    }
}

pub fn simulate(config: RunConfig, dist0: &ShiftDistribution, dist_plus: &ShiftDistribution) -> Result<RunStats> {
    let sim = Simulator::new(config, dist0, dist_plus)?;
    let tally = sim.tally(0..config.trials)?;
    Ok(RunStats::from_tally(config, &tally))
}

/// Probability that all `parts` fresh states lie inside the √π/6 square,
/// which guarantees no flip.
pub fn lower_bound_success(params: StateParams, parts: u32) -> Result<f64> {
    Ok(lower_bound_from(p_no_error(params, LogicalLabel::Zero, CORRECTABLE_SHIFT)?, parts))
}

pub fn lower_bound_from(p_no_error: f64, parts: u32) -> f64 {
    p_no_error.powi(parts as i32)
}
