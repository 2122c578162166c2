//! Closed-form shift algebra of the two correction circuits.
//!
//! A qubit carries an unbounded shift pair `(u, v)` and a Pauli frame. The
//! x-correction with ancilla shifts `(u₂, v₂)` maps
//!
//! ```text
//! u₁ → u₁ - ½·Mod_{2√π}(2u₁ + 2u₂),    v₁ → v₁ - v₂,
//! ```
//!
//! and the p-correction is the same map with the quadratures swapped. The
//! new shift differs from `-u₂` by `m√π`; odd `m` is a logical flip. Global
//! phases are not tracked.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::{Error, Result, SQRT_PI};

/// Displacement `(u, v)`: `u` along x, `v` along p.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShiftPair {
    pub u: f64,
    pub v: f64,
}

impl ShiftPair {
    pub const ZERO: ShiftPair = ShiftPair { u: 0.0, v: 0.0 };

    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    /// Swaps the roles of the two quadratures.
    pub fn swapped(self) -> Self {
        Self { u: self.v, v: self.u }
    }

    pub fn max_abs(self) -> f64 {
        self.u.abs().max(self.v.abs())
    }

    pub fn is_finite(self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// Parities of the logical X and Z flips applied so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PauliFrame {
    pub x_flips: bool,
    pub z_flips: bool,
}

impl PauliFrame {
    pub fn compose(self, other: PauliFrame) -> PauliFrame {
        PauliFrame { x_flips: self.x_flips ^ other.x_flips, z_flips: self.z_flips ^ other.z_flips }
    }

    pub fn is_identity(self) -> bool {
        !self.x_flips && !self.z_flips
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QubitErrorState {
    pub shift: ShiftPair,
    pub frame: PauliFrame,
}

impl QubitErrorState {
    pub fn new(shift: ShiftPair) -> Self {
        Self { shift, frame: PauliFrame::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Quadrature {
    X,
    P,
}

/// What one correction step measured and did.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrectionRecord {
    pub quadrature: Quadrature,
    /// Qubit plus ancilla shift in the corrected quadrature.
    pub raw_sum: f64,
    /// Homodyne outcome `(n√π - raw_sum)/√2` for the recorded comb integer.
    pub measurement_outcome: f64,
    pub comb_integer: i64,
    /// `s(measurement_outcome)`.
    pub applied_shift: f64,
    /// Qubit shift in the corrected quadrature after the step.
    pub residual_before_next: f64,
    /// `(residual + ancilla shift)/√π`.
    pub lattice_steps: i64,
    pub flip_applied: bool,
}

impl CorrectionRecord {
    /// Residual with the lattice jump removed, i.e. relative to the
    /// (possibly flipped) codeword.
    pub fn reduced_residual(&self) -> f64 {
        self.residual_before_next - self.lattice_steps as f64 * SQRT_PI
    }
}

/// `Mod_{2√π}(q)` with range `[-√π, √π)`.
pub fn centered_mod(q: f64) -> f64 {
    if (-SQRT_PI..SQRT_PI).contains(&q) {
        return q;
    }
    let period = 2.0 * SQRT_PI;
    let r = q - period * ((q + SQRT_PI) / period).floor();
    // Round-off can land exactly on the excluded edge.
    if r >= SQRT_PI {
        r - period
    } else if r < -SQRT_PI {
        r + period
    } else {
        r
    }
}

/// Correction displacement `s(q) = -q/√2 + ½·Mod_{2√π}(2√2·q)`.
pub fn correction_shift(q: f64) -> f64 {
    -q / core::f64::consts::SQRT_2 + 0.5 * centered_mod(2.0 * core::f64::consts::SQRT_2 * q)
}

/// Number of lattice steps `m` picked by the mod: `Mod(2w) = 2w - 2m√π`.
#[inline]
fn lattice_steps(sum: f64) -> i64 {
    (sum / SQRT_PI + 0.5).floor() as i64
}

const CONSISTENCY_TOL: f64 = 1e-9;

/// One correction in `quadrature`. `own`/`other` are the qubit's shifts in
/// the corrected and the spectator quadrature.
fn correct(
    quadrature: Quadrature,
    own: f64,
    other: f64,
    ancilla_own: f64,
    ancilla_other: f64,
) -> Result<(f64, f64, CorrectionRecord)> {
    if !(own.is_finite() && other.is_finite() && ancilla_own.is_finite() && ancilla_other.is_finite()) {
        return Err(Error::invalid("shifts must be finite"));
    }
    let sum = own + ancilla_own;
    let m = lattice_steps(sum);
    // -u₂ + m√π; exactly -u₂ on the success branch.
    let residual = if m == 0 { -ancilla_own } else { -ancilla_own + m as f64 * SQRT_PI };
    // Same quantity straight from the mod formula.
    let direct = own - 0.5 * centered_mod(2.0 * own + 2.0 * ancilla_own);
    let scale = 1.0f64.max(own.abs()).max(ancilla_own.abs());
    if (direct - residual).abs() > CONSISTENCY_TOL * scale {
        return Err(Error::Consistency(alloc::format!(
            "mod residual {direct} disagrees with lattice residual {residual}"
        )));
    }
    let steps = (residual + ancilla_own) / SQRT_PI;
    if (steps - m as f64).abs() > CONSISTENCY_TOL * scale {
        return Err(Error::Consistency(alloc::format!("residual is off the lattice by {steps}")));
    }
    let outcome = -sum / core::f64::consts::SQRT_2;
    let record = CorrectionRecord {
        quadrature,
        raw_sum: sum,
        measurement_outcome: outcome,
        comb_integer: 0,
        applied_shift: correction_shift(outcome),
        residual_before_next: residual,
        lattice_steps: m,
        flip_applied: m.rem_euclid(2) == 1,
    };
    Ok((residual, other - ancilla_other, record))
}

/// Corrects the x-quadrature shift using an ancilla prepared in |+⟩.
pub fn x_correction_step(qubit: QubitErrorState, ancilla: ShiftPair) -> Result<(QubitErrorState, CorrectionRecord)> {
    let (u, v, record) = correct(Quadrature::X, qubit.shift.u, qubit.shift.v, ancilla.u, ancilla.v)?;
    let mut frame = qubit.frame;
    frame.x_flips ^= record.flip_applied;
    Ok((QubitErrorState { shift: ShiftPair { u, v }, frame }, record))
}

/// Corrects the p-quadrature shift using an ancilla prepared in |0⟩.
pub fn p_correction_step(qubit: QubitErrorState, ancilla: ShiftPair) -> Result<(QubitErrorState, CorrectionRecord)> {
    let (v, u, record) = correct(Quadrature::P, qubit.shift.v, qubit.shift.u, ancilla.v, ancilla.u)?;
    let mut frame = qubit.frame;
    frame.z_flips ^= record.flip_applied;
    Ok((QubitErrorState { shift: ShiftPair { u, v }, frame }, record))
}

/// An x-correction followed by a p-correction with a fresh ancilla.
pub fn correction_round(
    qubit: QubitErrorState,
    ancilla_x: ShiftPair,
    ancilla_p: ShiftPair,
) -> Result<(QubitErrorState, [CorrectionRecord; 2])> {
    let (mid, rx) = x_correction_step(qubit, ancilla_x)?;
    let (out, rp) = p_correction_step(mid, ancilla_p)?;
    Ok((out, [rx, rp]))
}

/// Ancilla shifts consumed by one round: x-step ancilla, then p-step ancilla.
pub type RoundAncillas = (ShiftPair, ShiftPair);

/// An assignment of shifts that drives the correction chain into a flip.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    pub initial: ShiftPair,
    pub ancillas: Vec<RoundAncillas>,
    /// Zero-based round and quadrature of the first flip.
    pub failing_round: usize,
    pub failing_quadrature: Quadrature,
    /// Signed shift sum seen by the failing step.
    pub failing_sum: f64,
}

impl Witness {
    /// Replays the chain; returns the first round and record that flipped.
    pub fn replay(&self) -> Result<Option<(usize, CorrectionRecord)>> {
        first_flip(self.initial, &self.ancillas)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundCheck {
    pub safe: bool,
    pub witness: Option<Witness>,
    /// Sign patterns examined.
    pub assignments_checked: u128,
}

/// Default enumeration budget for [`worst_case_check`].
pub const DEFAULT_BUDGET: u128 = 1 << 24;

fn first_flip(initial: ShiftPair, ancillas: &[RoundAncillas]) -> Result<Option<(usize, CorrectionRecord)>> {
    let mut q = QubitErrorState::new(initial);
    for (r, (ax, ap)) in ancillas.iter().enumerate() {
        let (next, recs) = correction_round(q, *ax, *ap)?;
        for rec in recs {
            if rec.flip_applied {
                return Ok(Some((r, rec)));
            }
        }
        q = next;
    }
    Ok(None)
}

// Variable layout: 0,1 = initial (u, v); round r uses 2+4r .. 2+4r+3 for
// (x-ancilla u, x-ancilla v, p-ancilla u, p-ancilla v).
fn var_initial_u() -> usize {
    0
}
fn var_initial_v() -> usize {
    1
}
fn var_ax_u(r: usize) -> usize {
    2 + 4 * r
}
fn var_ax_v(r: usize) -> usize {
    3 + 4 * r
}
fn var_ap_u(r: usize) -> usize {
    4 + 4 * r
}
fn var_ap_v(r: usize) -> usize {
    5 + 4 * r
}

/// A signed sum of shift variables, each ±1.
type LinearForm = Vec<(usize, i8)>;

fn plus(form: &LinearForm, var: usize, coeff: i8) -> LinearForm {
    let mut out = form.clone();
    out.push((var, coeff));
    out
}

fn build_witness(t: f64, rounds: usize, pattern: &[(usize, f64)]) -> (ShiftPair, Vec<RoundAncillas>) {
    let mut values = alloc::vec![t; 2 + 4 * rounds];
    for &(var, value) in pattern {
        values[var] = value;
    }
    let initial = ShiftPair::new(values[var_initial_u()], values[var_initial_v()]);
    let ancillas = (0..rounds)
        .map(|r| {
            (
                ShiftPair::new(values[var_ax_u(r)], values[var_ax_v(r)]),
                ShiftPair::new(values[var_ap_u(r)], values[var_ap_v(r)]),
            )
        })
        .collect();
    (initial, ancillas)
}

/// Decides whether every shift of magnitude at most `t` (qubit and all
/// ancillas) is corrected without a flip for `rounds` correction rounds.
///
/// While no flip has occurred each step's success condition is
/// `|signed sum| < √π/2` over at most three shift variables, and the sum
/// is linear in each of them; its extremes over the box `[-t, t]ⁿ` are
/// attained at the corners. The enumeration therefore only walks the 2³
/// sign patterns of each step's window.
pub fn worst_case_check(t: f64, rounds: usize) -> Result<BoundCheck> {
    worst_case_check_with_budget(t, rounds, DEFAULT_BUDGET)
}

pub fn worst_case_check_with_budget(t: f64, rounds: usize, budget: u128) -> Result<BoundCheck> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("threshold t must be finite and nonnegative"));
    }
    if rounds < 1 {
        return Err(Error::invalid("rounds must be at least 1"));
    }
    // Each step's window holds at most 3 variables.
    let needed = 16u128 * rounds as u128;
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let limit = 0.5 * SQRT_PI;
    let mut qu: LinearForm = alloc::vec![(var_initial_u(), 1)];
    let mut qv: LinearForm = alloc::vec![(var_initial_v(), 1)];
    let mut checked = 0u128;

    for r in 0..rounds {
        for quad in [Quadrature::X, Quadrature::P] {
            let (own, anc_own, anc_other) = match quad {
                Quadrature::X => (&qu, var_ax_u(r), var_ax_v(r)),
                Quadrature::P => (&qv, var_ap_v(r), var_ap_u(r)),
            };
            let sum_form = plus(own, anc_own, 1);
            let k = sum_form.len();
            for bits in 0u32..(1 << k) {
                checked += 1;
                let pattern: Vec<(usize, f64)> = sum_form
                    .iter()
                    .enumerate()
                    .map(|(i, &(var, _))| (var, if bits >> i & 1 == 1 { -t } else { t }))
                    .collect();
                let sum: f64 = sum_form.iter().zip(&pattern).map(|(&(_, c), &(_, val))| f64::from(c) * val).sum();
                if sum.abs() >= limit {
                    let (initial, ancillas) = build_witness(t, rounds, &pattern);
                    let witness =
                        Witness { initial, ancillas, failing_round: r, failing_quadrature: quad, failing_sum: sum };
                    match witness.replay()? {
                        Some((round, rec)) if round == r && rec.quadrature == quad => {}
                        other => {
                            return Err(Error::Consistency(alloc::format!(
                                "witness for round {r} {quad:?} replayed as {other:?}"
                            )))
                        }
                    }
                    return Ok(BoundCheck { safe: false, witness: Some(witness), assignments_checked: checked });
                }
            }
            // Success-branch update of the symbolic shifts.
            match quad {
                Quadrature::X => {
                    let new_v = plus(&qv, anc_other, -1);
                    qu = alloc::vec![(anc_own, -1)];
                    qv = new_v;
                }
                Quadrature::P => {
                    let new_u = plus(&qu, anc_other, -1);
                    qv = alloc::vec![(anc_own, -1)];
                    qu = new_u;
                }
            }
        }
    }
    Ok(BoundCheck { safe: true, witness: None, assignments_checked: checked })
}

/// Replays every assignment of ±t to all `2 + 4·rounds` shift variables.
/// Exponential; used to cross-check [`worst_case_check`] on short chains.
pub fn brute_force_check(t: f64, rounds: usize, budget: u128) -> Result<BoundCheck> {
    if rounds < 1 {
        return Err(Error::invalid("rounds must be at least 1"));
    }
    let vars = 2 + 4 * rounds;
    let needed = 1u128 << vars;
    if needed > budget || vars >= 64 {
        return Err(Error::Budget { needed, budget });
    }
    for bits in 0u64..(1u64 << vars) {
        let pattern: Vec<(usize, f64)> = (0..vars).map(|i| (i, if bits >> i & 1 == 1 { -t } else { t })).collect();
        let (initial, ancillas) = build_witness(t, rounds, &pattern);
        if let Some((round, rec)) = first_flip(initial, &ancillas)? {
            let witness = Witness {
                initial,
                ancillas,
                failing_round: round,
                failing_quadrature: rec.quadrature,
                failing_sum: rec.raw_sum,
            };
            return Ok(BoundCheck { safe: false, witness: Some(witness), assignments_checked: bits as u128 + 1 });
        }
    }
    Ok(BoundCheck { safe: true, witness: None, assignments_checked: needed })
}
