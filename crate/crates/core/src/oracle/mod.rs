//! Grid simulation of the correction circuits, independent of the closed-form
//! shift algebra it is used to check.

pub mod circuit;
pub mod gates;
pub mod grid;
pub mod homodyne;

pub use circuit::{
    compare_trial, draw_trial, fit_residual, make_codeword, make_state, oracle_check, p_correction_run, predict,
    run_drawn, run_p_correction_circuit, run_x_correction_circuit, summarize, x_correction_run, AgreementReport,
    AlgebraPrediction, CircuitOutcome, CircuitRun, Codeword, OracleConfig, ResidualFit, ShiftSampling, TrialComparison,
    TrialDraw,
};
pub use gates::{beamsplitter, displace_p, displace_x, reflect, squeeze};
pub use grid::{Axis, TwoModeGrid, WaveGrid};
pub use homodyne::{homodyne_p, homodyne_x, HomodyneResult, Readout};
