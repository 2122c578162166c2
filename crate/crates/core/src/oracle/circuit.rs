//! The x- and p-correction circuits, simulated gate by gate.
//!
//! x-correction: qubit ⊗ |+⟩ ancilla, shift errors, a π rotation of the
//! ancilla, the 50:50 beamsplitter, x-homodyne of mode 2, `S(√2)` on mode 1
//! and the displacement `s(outcome)`. The p-correction is the mirror image
//! with an |0⟩ ancilla, p-homodyne, `S(1/√2)` and a momentum kick. The
//! remaining shift of mode 1 is read off by maximizing its overlap with
//! displaced reference codewords.

use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::gates::{beamsplitter, displace_p, displace_x, reflect, squeeze, MAX_DISPLACEMENT_FRACTION};
use super::grid::{Axis, TwoModeGrid, WaveGrid};
use super::homodyne::{homodyne_p, homodyne_x, Readout};
use crate::error_model::trial_rng;
use crate::numerics::fourier::momentum_axis;
use crate::shift::{correction_shift, p_correction_step, x_correction_step, Quadrature, QubitErrorState, ShiftPair};
use crate::{Error, GkpState, LogicalLabel, Result, StateParams, SQRT_PI};

/// Coarsest spacing accepted for a codeword of peak width Δ.
pub const MAX_DX_OVER_DELTA: f64 = 1.0 / 6.0;

/// Axis half-width a codeword needs: `4/k + 4Δ`.
pub fn required_half_width(params: StateParams) -> f64 {
    4.0 / params.kappa() + 4.0 * params.delta()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Codeword {
    Zero,
    One,
    Plus,
    Minus,
}

impl Codeword {
    /// The logical X image for Zero/One, the Z image for Plus/Minus.
    pub fn flipped(self) -> Self {
        match self {
            Codeword::Zero => Codeword::One,
            Codeword::One => Codeword::Zero,
            Codeword::Plus => Codeword::Minus,
            Codeword::Minus => Codeword::Plus,
        }
    }
}

/// Real wavefunction of a codeword, unnormalized for Plus/Minus.
#[derive(Debug, Clone)]
struct CodewordFn {
    zero: GkpState,
    one: GkpState,
}

impl CodewordFn {
    fn new(params: StateParams) -> Self {
        Self { zero: GkpState::new(params, LogicalLabel::Zero), one: GkpState::new(params, LogicalLabel::One) }
    }

    fn eval(&self, c: Codeword, x: f64) -> f64 {
        match c {
            Codeword::Zero => self.zero.wavefunction(x),
            Codeword::One => self.one.wavefunction(x),
            Codeword::Plus => self.zero.wavefunction(x) + self.one.wavefunction(x),
            Codeword::Minus => self.zero.wavefunction(x) - self.one.wavefunction(x),
        }
    }
}

fn check_axis(params: StateParams, axis: &Axis) -> Result<()> {
    axis.validate()?;
    let r = required_half_width(params);
    if axis.x_min > -r || axis.x_min + axis.span() < r {
        return Err(Error::domain(alloc::format!("axis must span at least ±{r}")));
    }
    if axis.dx > MAX_DX_OVER_DELTA * params.delta() {
        return Err(Error::domain(alloc::format!(
            "grid spacing {} is coarser than delta/6 = {}",
            axis.dx,
            MAX_DX_OVER_DELTA * params.delta()
        )));
    }
    Ok(())
}

/// Samples `⟨x|c̃⟩` on `axis`. The samples keep the exact normalization;
/// on an axis of the required width the grid norm differs from 1 only by
/// the envelope tail outside it.
pub fn make_state(params: StateParams, label: LogicalLabel, axis: Axis) -> Result<WaveGrid> {
    check_axis(params, &axis)?;
    let state = GkpState::new(params, label);
    Ok(WaveGrid::from_fn(axis, |x| Complex64::new(state.wavefunction(x), 0.0)))
}

/// As [`make_state`], with |±⟩ built as `|0̃⟩ ± |1̃⟩` renormalized on the grid.
pub fn make_codeword(params: StateParams, codeword: Codeword, axis: Axis) -> Result<WaveGrid> {
    check_axis(params, &axis)?;
    let f = CodewordFn::new(params);
    let g = WaveGrid::from_fn(axis, |x| Complex64::new(f.eval(codeword, x), 0.0));
    Ok(match codeword {
        Codeword::Zero | Codeword::One => g,
        Codeword::Plus | Codeword::Minus => g.normalized(),
    })
}

/// `e^{-iup̂} e^{-ivx̂}`: the momentum kick first, then the translation.
pub fn apply_shift(state: &WaveGrid, shift: ShiftPair) -> Result<WaveGrid> {
    displace_x(&displace_p(state, shift.v)?, shift.u)
}

/// Grid size, state shape and readout rule for the circuits.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleConfig {
    pub params: StateParams,
    pub n: usize,
    pub readout: Readout,
}

impl OracleConfig {
    pub fn new(params: StateParams, n: usize) -> Result<Self> {
        let config = Self { params, n, readout: Readout::Sampled };
        config.axis()?;
        Ok(config)
    }

    pub fn with_readout(mut self, readout: Readout) -> Self {
        self.readout = readout;
        self
    }

    /// Symmetric axis of half-width `4/k + 4Δ` with `n` points.
    pub fn axis(&self) -> Result<Axis> {
        if !self.n.is_power_of_two() {
            return Err(Error::GridSize(self.n));
        }
        let axis = Axis::symmetric(required_half_width(self.params), self.n)?;
        check_axis(self.params, &axis)?;
        Ok(axis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CircuitOutcome {
    pub quadrature: Quadrature,
    /// Homodyne outcome of mode 2.
    pub measured: f64,
    /// `s(measured)`, the displacement applied to mode 1.
    pub correction: f64,
    /// Shift of the best-matching reference, reduced to `[-√π/2, √π/2)²`.
    pub residual_estimate: ShiftPair,
    pub best_codeword: Codeword,
    pub flip_detected: bool,
    /// `|⟨reference|state⟩|` at the optimum.
    pub overlap: f64,
    /// Position spacing of the input grid.
    pub dx: f64,
    /// Momentum spacing of the input grid.
    pub dp: f64,
}

fn smallest_padding(state: &WaveGrid, shift: f64) -> Result<WaveGrid> {
    let mut factor = 1;
    while shift.abs() > MAX_DISPLACEMENT_FRACTION * state.axis().span() * factor as f64 {
        factor *= 2;
        if factor > 64 {
            return Err(Error::domain("correction shift too large for the grid"));
        }
    }
    state.padded(factor)
}

/// Outcome of a circuit run together with the corrected mode-1 state.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitRun {
    pub outcome: CircuitOutcome,
    pub corrected: WaveGrid,
}

/// Runs the x-correction on `|input⟩ ⊗ |+̃⟩`.
pub fn run_x_correction_circuit<R: Rng + ?Sized>(
    config: &OracleConfig,
    input: LogicalLabel,
    qubit_shift: ShiftPair,
    ancilla_shift: ShiftPair,
    rng: &mut R,
) -> Result<CircuitOutcome> {
    Ok(x_correction_run(config, input, qubit_shift, ancilla_shift, rng)?.outcome)
}

/// As [`run_x_correction_circuit`], keeping the corrected state.
pub fn x_correction_run<R: Rng + ?Sized>(
    config: &OracleConfig,
    input: LogicalLabel,
    qubit_shift: ShiftPair,
    ancilla_shift: ShiftPair,
    rng: &mut R,
) -> Result<CircuitRun> {
    check_shifts(qubit_shift, ancilla_shift)?;
    let axis = config.axis()?;
    let p = config.params;
    let input_cw = if input == LogicalLabel::Zero { Codeword::Zero } else { Codeword::One };
    let qubit = apply_shift(&make_codeword(p, input_cw, axis)?, qubit_shift)?;
    let ancilla = reflect(&apply_shift(&make_codeword(p, Codeword::Plus, axis)?, ancilla_shift)?)?;
    let joint = beamsplitter(&TwoModeGrid::product(&qubit, &ancilla)?)?;
    let h = homodyne_x(&joint, config.readout, rng)?;
    let mode1 = squeeze(&h.collapsed, SQRT_2)?;
    let s = correction_shift(h.outcome);
    let corrected = displace_x(&smallest_padding(&mode1, s)?, s)?;
    let shape = StateParams::new_unchecked(p.delta() / SQRT_2, p.kappa() * SQRT_2);
    let fit = fit_residual(&corrected, shape, Quadrature::X)?;
    let outcome = CircuitOutcome {
        quadrature: Quadrature::X,
        measured: h.outcome,
        correction: s,
        residual_estimate: fit.shift,
        best_codeword: fit.codeword,
        flip_detected: fit.codeword != input_cw,
        overlap: fit.overlap,
        dx: axis.dx,
        dp: momentum_axis(&axis).dx,
    };
    Ok(CircuitRun { outcome, corrected })
}

/// Runs the p-correction on `|±̃⟩ ⊗ |0̃⟩`; `input` Zero means |+̃⟩.
pub fn run_p_correction_circuit<R: Rng + ?Sized>(
    config: &OracleConfig,
    input: LogicalLabel,
    qubit_shift: ShiftPair,
    ancilla_shift: ShiftPair,
    rng: &mut R,
) -> Result<CircuitOutcome> {
    Ok(p_correction_run(config, input, qubit_shift, ancilla_shift, rng)?.outcome)
}

/// As [`run_p_correction_circuit`], keeping the corrected state.
pub fn p_correction_run<R: Rng + ?Sized>(
    config: &OracleConfig,
    input: LogicalLabel,
    qubit_shift: ShiftPair,
    ancilla_shift: ShiftPair,
    rng: &mut R,
) -> Result<CircuitRun> {
    check_shifts(qubit_shift, ancilla_shift)?;
    let axis = config.axis()?;
    let p = config.params;
    let input_cw = if input == LogicalLabel::Zero { Codeword::Plus } else { Codeword::Minus };
    let qubit = apply_shift(&make_codeword(p, input_cw, axis)?, qubit_shift)?;
    let ancilla = reflect(&apply_shift(&make_codeword(p, Codeword::Zero, axis)?, ancilla_shift)?)?;
    let joint = beamsplitter(&TwoModeGrid::product(&qubit, &ancilla)?)?;
    let h = homodyne_p(&joint, config.readout, rng)?;
    let mode1 = squeeze(&h.collapsed, 1.0 / SQRT_2)?;
    let s = correction_shift(h.outcome);
    let corrected = displace_p(&mode1, s)?;
    let shape = StateParams::new_unchecked(p.delta() * SQRT_2, p.kappa() / SQRT_2);
    let fit = fit_residual(&corrected, shape, Quadrature::P)?;
    let outcome = CircuitOutcome {
        quadrature: Quadrature::P,
        measured: h.outcome,
        correction: s,
        residual_estimate: fit.shift,
        best_codeword: fit.codeword,
        flip_detected: fit.codeword != input_cw,
        overlap: fit.overlap,
        dx: axis.dx,
        dp: momentum_axis(&axis).dx,
    };
    Ok(CircuitRun { outcome, corrected })
}

fn check_shifts(a: ShiftPair, b: ShiftPair) -> Result<()> {
    for s in [a, b] {
        if !s.is_finite() || s.max_abs() > SQRT_PI {
            return Err(Error::invalid("circuit shifts must be finite and at most sqrt(pi)"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualFit {
    pub codeword: Codeword,
    pub shift: ShiftPair,
    pub overlap: f64,
}

/// Grid samples that carry weight, with their positions.
struct Support {
    x: Vec<f64>,
    amp: Vec<Complex64>,
    dx: f64,
}

impl Support {
    fn new(state: &WaveGrid) -> Self {
        let peak = state.amplitudes().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let axis = *state.axis();
        let (x, amp) = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 1e-7 * peak)
            .map(|(j, c)| (axis.point(j), *c))
            .unzip();
        Self { x, amp, dx: axis.dx }
    }
}

struct Objective<'a> {
    support: &'a Support,
    refs: CodewordFn,
    /// Grid norm of each reference, indexed like `basis`.
    norms: [f64; 2],
    basis: [Codeword; 2],
}

impl Objective<'_> {
    /// Reference samples `φ_c(x - u)` on the support.
    fn profile(&self, which: usize, u: f64) -> Vec<f64> {
        let c = self.basis[which];
        self.support.x.iter().map(|x| self.refs.eval(c, x - u)).collect()
    }

    /// `|⟨ref_{c,u,v}|ψ⟩|` with `ref(x) = e^{-iv(x-u)} φ_c(x-u)`, given the
    /// profile for `(c, u)`.
    fn value_at(&self, which: usize, profile: &[f64], v: f64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((x, a), r) in self.support.x.iter().zip(&self.support.amp).zip(profile) {
            if *r != 0.0 {
                acc += Complex64::from_polar(*r, v * x) * a;
            }
        }
        acc.norm() * self.support.dx / self.norms[which]
    }

    fn value(&self, which: usize, u: f64, v: f64) -> f64 {
        self.value_at(which, &self.profile(which, u), v)
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = 0.618_033_988_749_894_9;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// Points per axis of the coarse search.
const COARSE_POINTS: usize = 24;
const REFINE_SWEEPS: usize = 4;

/// Best reference codeword and shift for a state left by a `quadrature`
/// correction. x-corrections leave Zero/One, p-corrections Plus/Minus.
pub fn fit_residual(state: &WaveGrid, shape: StateParams, quadrature: Quadrature) -> Result<ResidualFit> {
    let basis = match quadrature {
        Quadrature::X => [Codeword::Zero, Codeword::One],
        Quadrature::P => [Codeword::Plus, Codeword::Minus],
    };
    let support = Support::new(state);
    if support.x.is_empty() {
        return Err(Error::NonFinite);
    }
    let refs = CodewordFn::new(shape);
    let mut norms = [0.0; 2];
    let axis = *state.axis();
    for (k, c) in basis.iter().enumerate() {
        let s: f64 = axis.points().map(|x| refs.eval(*c, x).powi(2)).sum();
        norms[k] = (s * axis.dx).sqrt();
    }
    let obj = Objective { support: &support, refs, norms, basis };

    let half = 0.5 * SQRT_PI;
    let step = SQRT_PI / COARSE_POINTS as f64;
    let mut best = (0usize, 0.0, 0.0, f64::NEG_INFINITY);
    for which in 0..2 {
        for i in 0..COARSE_POINTS {
            let u = -half + (i as f64 + 0.5) * step;
            let profile = obj.profile(which, u);
            for j in 0..COARSE_POINTS {
                let v = -half + (j as f64 + 0.5) * step;
                let val = obj.value_at(which, &profile, v);
                if val > best.3 {
                    best = (which, u, v, val);
                }
            }
        }
    }
    let (which, mut u, mut v, _) = best;
    let tol = 1e-5;
    for _ in 0..REFINE_SWEEPS {
        u = golden_max(|x| obj.value(which, x, v), u - step, u + step, tol);
        let profile = obj.profile(which, u);
        v = golden_max(|y| obj.value_at(which, &profile, y), v - step, v + step, tol);
    }
    let overlap = obj.value(which, u, v);
    let mut codeword = basis[which];
    // Fold back into the search cell; a √π step in the corrected
    // quadrature swaps the codeword.
    let (ku, kv) = ((u / SQRT_PI).round(), (v / SQRT_PI).round());
    u -= ku * SQRT_PI;
    v -= kv * SQRT_PI;
    let swaps = match quadrature {
        Quadrature::X => ku,
        Quadrature::P => kv,
    };
    if (swaps as i64).rem_euclid(2) == 1 {
        codeword = codeword.flipped();
    }
    Ok(ResidualFit { codeword, shift: ShiftPair::new(u, v), overlap })
}

/// Shift-algebra prediction for a circuit run, with the homodyne noise of
/// finite-width peaks attributed equally to the qubit and the ancilla.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlgebraPrediction {
    /// Residual reduced to `[-√π/2, √π/2)²`.
    pub residual: ShiftPair,
    pub flip: bool,
    /// Qubit-plus-ancilla shift implied by the outcome.
    pub measured_sum: f64,
    /// Distance of `measured_sum` from the nearest flip boundary.
    pub boundary_distance: f64,
}

/// Reduces to `[-√π/2, √π/2)`; also returns the number of √π steps removed.
fn reduce(x: f64) -> (f64, i64) {
    let k = (x / SQRT_PI + 0.5).floor();
    (x - k * SQRT_PI, k as i64)
}

pub fn predict(
    quadrature: Quadrature,
    qubit: ShiftPair,
    ancilla: ShiftPair,
    measured: f64,
) -> Result<AlgebraPrediction> {
    let (own, anc) = match quadrature {
        Quadrature::X => (qubit.u, ancilla.u),
        Quadrature::P => (qubit.v, ancilla.v),
    };
    let sum = own + anc;
    let n = ((sum + SQRT_2 * measured) / SQRT_PI).round();
    let measured_sum = n * SQRT_PI - SQRT_2 * measured;
    let half_delta = 0.5 * (measured_sum - sum);
    let residual = match quadrature {
        Quadrature::X => {
            let q = QubitErrorState::new(ShiftPair::new(qubit.u + half_delta, qubit.v));
            x_correction_step(q, ShiftPair::new(ancilla.u + half_delta, ancilla.v))?.0.shift
        }
        Quadrature::P => {
            let q = QubitErrorState::new(ShiftPair::new(qubit.u, qubit.v + half_delta));
            p_correction_step(q, ShiftPair::new(ancilla.u, ancilla.v + half_delta))?.0.shift
        }
    };
    let (ru, ku) = reduce(residual.u);
    let (rv, kv) = reduce(residual.v);
    let steps = match quadrature {
        Quadrature::X => ku,
        Quadrature::P => kv,
    };
    let m = measured_sum / SQRT_PI;
    let boundary_distance = (m - (m - 0.5).round() - 0.5).abs() * SQRT_PI;
    Ok(AlgebraPrediction {
        residual: ShiftPair::new(ru, rv),
        flip: steps.rem_euclid(2) == 1,
        measured_sum,
        boundary_distance,
    })
}

/// Difference of two values identified modulo √π.
fn periodic_gap(a: f64, b: f64) -> f64 {
    reduce(a - b).0.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ShiftSampling {
    /// Each corrected-quadrature shift in `±0.225√π`, so the nominal sum
    /// stays below `0.45√π`.
    SuccessBranch,
    /// Each shift in `±0.5√π`; sums straddle the flip boundary.
    Straddling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialComparison {
    pub quadrature: Quadrature,
    pub input: LogicalLabel,
    pub qubit: ShiftPair,
    pub ancilla: ShiftPair,
    pub outcome: CircuitOutcome,
    pub prediction: AlgebraPrediction,
    /// Discrepancy in the corrected quadrature.
    pub corrected_error: f64,
    /// Discrepancy in the other quadrature.
    pub spectator_error: f64,
    /// Too close to a flip boundary to resolve on the grid.
    pub skipped: bool,
    pub flip_agrees: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AgreementReport {
    pub trials: usize,
    pub compared: usize,
    pub skipped: usize,
    pub dx: f64,
    pub dp: f64,
    /// Largest corrected-quadrature discrepancy over compared trials.
    pub max_corrected_error: f64,
    pub max_spectator_error: f64,
    pub flip_agreements: usize,
    pub details: Vec<TrialComparison>,
}

impl AgreementReport {
    /// Corrected residuals within `k·dx` and every compared flip agreeing.
    pub fn passes(&self, k: f64) -> bool {
        self.compared > 0 && self.max_corrected_error < k * self.dx && self.flip_agreements == self.compared
    }
}

/// Trials whose measured sum lies within this many dx of a flip boundary
/// are not compared.
pub const BOUNDARY_SKIP_DX: f64 = 2.0;

/// Shifts, input label and remaining random stream of one oracle trial.
#[derive(Debug, Clone)]
pub struct TrialDraw {
    pub input: LogicalLabel,
    pub qubit: ShiftPair,
    pub ancilla: ShiftPair,
    /// Continues into the homodyne sampling.
    pub rng: ChaCha8Rng,
}

/// Draws the shifts for trial `index`: the corrected quadrature from the
/// `sampling` range, the other from `±0.2√π`.
pub fn draw_trial(quadrature: Quadrature, sampling: ShiftSampling, seed: u64, index: u64) -> TrialDraw {
    let mut rng = trial_rng(seed, index);
    let half = match sampling {
        ShiftSampling::SuccessBranch => 0.225 * SQRT_PI,
        ShiftSampling::Straddling => 0.5 * SQRT_PI,
    };
    let spectator = 0.2 * SQRT_PI;
    let mut draw = |h: f64| rng.random_range(-h..h);
    let (qubit, ancilla) = match quadrature {
        Quadrature::X => {
            let (u1, u2, v1, v2) = (draw(half), draw(half), draw(spectator), draw(spectator));
            (ShiftPair::new(u1, v1), ShiftPair::new(u2, v2))
        }
        Quadrature::P => {
            let (v1, v2, u1, u2) = (draw(half), draw(half), draw(spectator), draw(spectator));
            (ShiftPair::new(u1, v1), ShiftPair::new(u2, v2))
        }
    };
    let input = if rng.random::<bool>() { LogicalLabel::One } else { LogicalLabel::Zero };
    TrialDraw { input, qubit, ancilla, rng }
}

/// Runs the circuit for a drawn trial, keeping the corrected state.
pub fn run_drawn(config: &OracleConfig, quadrature: Quadrature, draw: &mut TrialDraw) -> Result<CircuitRun> {
    match quadrature {
        Quadrature::X => x_correction_run(config, draw.input, draw.qubit, draw.ancilla, &mut draw.rng),
        Quadrature::P => p_correction_run(config, draw.input, draw.qubit, draw.ancilla, &mut draw.rng),
    }
}

/// One oracle-versus-algebra comparison for trial `index`.
pub fn compare_trial(
    config: &OracleConfig,
    quadrature: Quadrature,
    sampling: ShiftSampling,
    seed: u64,
    index: u64,
) -> Result<TrialComparison> {
    let mut draw = draw_trial(quadrature, sampling, seed, index);
    let outcome = run_drawn(config, quadrature, &mut draw)?.outcome;
    let TrialDraw { input, qubit, ancilla, .. } = draw;
    let prediction = predict(quadrature, qubit, ancilla, outcome.measured)?;
    let (du, dv) = (
        periodic_gap(outcome.residual_estimate.u, prediction.residual.u),
        periodic_gap(outcome.residual_estimate.v, prediction.residual.v),
    );
    let (corrected_error, spectator_error) = match quadrature {
        Quadrature::X => (du, dv),
        Quadrature::P => (dv, du),
    };
    Ok(TrialComparison {
        quadrature,
        input,
        qubit,
        ancilla,
        outcome,
        prediction,
        corrected_error,
        spectator_error,
        skipped: prediction.boundary_distance < BOUNDARY_SKIP_DX * outcome.dx,
        flip_agrees: outcome.flip_detected == prediction.flip,
    })
}

/// Folds per-trial comparisons into a report.
pub fn summarize(details: Vec<TrialComparison>, config: &OracleConfig) -> Result<AgreementReport> {
    let axis = config.axis()?;
    let mut report = AgreementReport {
        trials: details.len(),
        compared: 0,
        skipped: 0,
        dx: axis.dx,
        dp: momentum_axis(&axis).dx,
        max_corrected_error: 0.0,
        max_spectator_error: 0.0,
        flip_agreements: 0,
        details: Vec::new(),
    };
    for t in &details {
        if t.skipped {
            report.skipped += 1;
            continue;
        }
        report.compared += 1;
        report.max_corrected_error = report.max_corrected_error.max(t.corrected_error);
        report.max_spectator_error = report.max_spectator_error.max(t.spectator_error);
        report.flip_agreements += usize::from(t.flip_agrees);
    }
    report.details = details;
    Ok(report)
}

/// Runs `trials` comparisons of one circuit sequentially.
pub fn oracle_check(
    config: &OracleConfig,
    quadrature: Quadrature,
    sampling: ShiftSampling,
    trials: usize,
    seed: u64,
) -> Result<AgreementReport> {
    let details =
        (0..trials as u64).map(|i| compare_trial(config, quadrature, sampling, seed, i)).collect::<Result<Vec<_>>>()?;
    summarize(details, config)
}
