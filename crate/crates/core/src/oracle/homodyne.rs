//! Homodyne detection of mode 2 with collapse of mode 1.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use super::grid::{TwoModeGrid, WaveGrid};
use crate::numerics::fourier::{momentum_axis, momentum_in_place};
use crate::{Error, Result};

/// Draws before giving up on a vanishing slice.
pub const MAX_RETRIES: u32 = 16;

/// Slices with less than this share of the total probability are redrawn.
const DEGENERATE_WEIGHT: f64 = 1e-14;

/// How the outcome of a measurement is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Readout {
    /// Inverse-CDF draw from the marginal.
    Sampled,
    /// The grid point of largest marginal probability.
    MostLikely,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomodyneResult {
    pub outcome: f64,
    pub index: usize,
    /// Normalized mode-1 state conditioned on the outcome.
    pub collapsed: WaveGrid,
    /// Probability weight of the chosen grid point.
    pub weight: f64,
}

fn pick<R: Rng + ?Sized>(weights: &[f64], readout: Readout, rng: &mut R) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::NonFinite);
    }
    match readout {
        Readout::MostLikely => {
            let mut best = 0;
            for (i, w) in weights.iter().enumerate() {
                if *w > weights[best] {
                    best = i;
                }
            }
            Ok(best)
        }
        Readout::Sampled => {
            let mut cumulative = Vec::with_capacity(weights.len());
            let mut acc = 0.0;
            for w in weights {
                acc += w / total;
                cumulative.push(acc);
            }
            for _ in 0..MAX_RETRIES {
                let r: f64 = rng.random::<f64>() * acc;
                let i = cumulative.partition_point(|&c| c <= r).min(weights.len() - 1);
                if weights[i] > DEGENERATE_WEIGHT * total {
                    return Ok(i);
                }
            }
            Err(Error::DegenerateMarginal(MAX_RETRIES))
        }
    }
}

fn collapse(state: &TwoModeGrid, weights: &[f64], index: usize, outcome: f64) -> HomodyneResult {
    let collapsed = state.mode1_slice(index).normalized();
    HomodyneResult { outcome, index, collapsed, weight: weights[index] }
}

/// Measures x̂ of mode 2; the outcome is a grid point of mode 2's axis.
pub fn homodyne_x<R: Rng + ?Sized>(state: &TwoModeGrid, readout: Readout, rng: &mut R) -> Result<HomodyneResult> {
    let weights = state.mode2_weights();
    let i = pick(&weights, readout, rng)?;
    Ok(collapse(state, &weights, i, state.axis().point(i)))
}

/// Measures p̂ of mode 2 by transforming mode 2 to momentum first; mode 1
/// stays in the position representation.
pub fn homodyne_p<R: Rng + ?Sized>(state: &TwoModeGrid, readout: Readout, rng: &mut R) -> Result<HomodyneResult> {
    let axis = *state.axis();
    let mut mixed = state.clone();
    for row in mixed.amplitudes_mut().chunks_exact_mut(axis.n) {
        momentum_in_place(row, axis.x_min, axis.dx)?;
    }
    // Rows are still indexed by x₁; weights need dx·dp instead of dx².
    let p_axis = momentum_axis(&axis);
    let mut weights = alloc::vec![0.0; axis.n];
    for row in mixed.amplitudes().chunks_exact(axis.n) {
        for (acc, c) in weights.iter_mut().zip(row) {
            *acc += c.norm_sqr();
        }
    }
    weights.iter_mut().for_each(|w| *w *= axis.dx * p_axis.dx);
    let j = pick(&weights, readout, rng)?;
    let n = axis.n;
    let slice: Vec<Complex64> = (0..n).map(|i1| mixed.amplitudes()[i1 * n + j]).collect();
    let collapsed = WaveGrid::new(axis, slice)?.normalized();
    Ok(HomodyneResult { outcome: p_axis.point(j), index: j, collapsed, weight: weights[j] })
}
