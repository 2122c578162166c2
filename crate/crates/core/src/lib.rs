//! Shift-error model of qubits encoded in an oscillator (GKP codes).
//!
//! The crate is `no_std` with `alloc`. It provides:
//!
//! - [`numerics`]: adaptive Simpson quadrature, lattice-sum truncation,
//!   bisection and the position/momentum discrete Fourier transform.
//! - [`states`]: approximate codewords (Gaussian peaks of width Δ under a
//!   Gaussian envelope of width 1/k) and their scalar diagnostics.
//! - [`shift`]: closed-form x- and p-correction steps, Pauli-frame
//!   bookkeeping and the worst-case √π/6 threshold checker.
//! - [`error_model`]: the shift-basis wavefunction f(u,v), the density
//!   P(u,v), P_no-error and its inversion, plus a seeded sampler.
//! - [`oracle`]: one- and two-mode wavefunction grids on which the
//!   correction circuits are simulated gate by gate.
//! - [`montecarlo`]: repeated correction rounds driven by sampled shifts.
//!
//! All quadrature variables are dimensionless with `[x, p] = i`; the code
//! lattice spacing is √π.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod error_model;
pub mod montecarlo;
pub mod numerics;
pub mod oracle;
pub mod shift;
pub mod states;

pub use error::{Error, Result};
pub use error_model::{SamplerState, ShiftDistribution};
pub use montecarlo::{RunConfig, RunStats, ThresholdMode};
pub use shift::{PauliFrame, QubitErrorState, ShiftPair};
pub use states::{GkpState, LogicalLabel, StateParams};

/// √π, the lattice spacing between the logical-0 and logical-1 peaks.
pub const SQRT_PI: f64 = 1.772_453_850_905_516_f64;

/// √π/6: every preparation shift below this magnitude is always corrected.
pub const CORRECTABLE_SHIFT: f64 = SQRT_PI / 6.0;
