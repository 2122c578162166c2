//! Symmetric truncation of the codeword lattice sums.

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::{StateParams, SQRT_PI};

/// Probability-weight cutoff below which lattice terms are dropped.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-16;

/// Symmetric cutoff `|s| ≤ s_max` for sums over the even sublattice 2s√π.
///
/// The squared envelope weight `exp(-(2·s_max·k·√π)²)` of the outermost
/// retained term is at most [`NEGLIGIBLE_WEIGHT`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesTruncation {
    pub s_max: u32,
}

impl SeriesTruncation {
    /// Largest |m| of lattice sites m√π that carry weight, for either parity.
    pub fn max_site(&self) -> i64 {
        2 * self.s_max as i64 + 1
    }
}

/// Cutoff for the envelope `exp(-½(m k √π)²)` of the given parameters.
///
/// Never returns 0: the nearest neighbours s = ±1 are always kept.
pub fn truncation_for(params: &StateParams) -> SeriesTruncation {
    let reach = (-NEGLIGIBLE_WEIGHT.ln()).sqrt() / (2.0 * params.kappa() * SQRT_PI);
    let s_max = (reach.ceil() as u32).max(1);
    SeriesTruncation { s_max }
}
