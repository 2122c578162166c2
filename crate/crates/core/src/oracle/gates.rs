//! Gaussian gates on grid wavefunctions.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use super::grid::{TwoModeGrid, WaveGrid};
use crate::numerics::{shift_periodic, FftPlan};
use crate::{Error, Result};

/// Largest displacement as a fraction of the axis span.
pub const MAX_DISPLACEMENT_FRACTION: f64 = 0.1;

/// `e^{-iup̂}`: `ψ(x) → ψ(x - u)`, applied as a momentum-space phase.
pub fn displace_x(state: &WaveGrid, u: f64) -> Result<WaveGrid> {
    let span = state.axis().span();
    if !u.is_finite() || u.abs() > MAX_DISPLACEMENT_FRACTION * span {
        return Err(Error::domain(alloc::format!(
            "displacement {u} exceeds {} of the axis span {span}",
            MAX_DISPLACEMENT_FRACTION
        )));
    }
    let mut out = state.clone();
    if u != 0.0 {
        shift_periodic(out.amplitudes_mut(), u / state.axis().dx)?;
    }
    Ok(out)
}

/// `e^{-ivx̂}`: multiplies by `e^{-ivx}`, moving momentum by `+v`.
pub fn displace_p(state: &WaveGrid, v: f64) -> Result<WaveGrid> {
    if !v.is_finite() {
        return Err(Error::invalid("momentum kick must be finite"));
    }
    let axis = *state.axis();
    let mut out = state.clone();
    for (j, c) in out.amplitudes_mut().iter_mut().enumerate() {
        *c *= Complex64::from_polar(1.0, -v * axis.point(j));
    }
    Ok(out)
}

/// `ψ(y) → √q·ψ(q·y)`.
///
/// Done exactly by relabelling the axis (`x_min/q`, `dx/q`) and scaling the
/// samples by `√q`; no interpolation, so the support never leaves the grid.
pub fn squeeze(state: &WaveGrid, q: f64) -> Result<WaveGrid> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::invalid(alloc::format!("squeeze factor must be positive, got {q}")));
    }
    let (mut axis, amps) = state.clone().into_parts();
    axis.x_min /= q;
    axis.dx /= q;
    let s = q.sqrt();
    WaveGrid::new(axis, amps.into_iter().map(|c| c * s).collect())
}

/// `ψ(x) → ψ(-x)`, a π phase rotation. The axis must be symmetric.
pub fn reflect(state: &WaveGrid) -> Result<WaveGrid> {
    let axis = *state.axis();
    if !axis.is_symmetric() {
        return Err(Error::domain("reflection needs an axis symmetric about 0"));
    }
    let n = axis.n;
    let src = state.amplitudes();
    let amps = (0..n).map(|j| src[(n - j) % n]).collect();
    WaveGrid::new(axis, amps)
}

/// Shear along mode 1: `ψ(x₁, x₂) → ψ(x₁ + a·x₂, x₂)`.
fn shear_mode1(state: &mut TwoModeGrid, a: f64) -> Result<()> {
    let axis = *state.axis();
    let n = axis.n;
    let plan = FftPlan::new(n)?;
    let mut column: Vec<Complex64> = alloc::vec![Complex64::new(0.0, 0.0); n];
    let amps = state.amplitudes_mut();
    for i2 in 0..n {
        for (i1, c) in column.iter_mut().enumerate() {
            *c = amps[i1 * n + i2];
        }
        plan.shift(&mut column, -a * axis.point(i2) / axis.dx)?;
        for (i1, c) in column.iter().enumerate() {
            amps[i1 * n + i2] = *c;
        }
    }
    Ok(())
}

/// Shear along mode 2: `ψ(x₁, x₂) → ψ(x₁, x₂ + b·x₁)`.
fn shear_mode2(state: &mut TwoModeGrid, b: f64) -> Result<()> {
    let axis = *state.axis();
    let n = axis.n;
    let plan = FftPlan::new(n)?;
    for (i1, row) in state.amplitudes_mut().chunks_exact_mut(n).enumerate() {
        plan.shift(row, -b * axis.point(i1) / axis.dx)?;
    }
    Ok(())
}

/// `ψ(x₁, x₂) → ψ((x₁ - x₂)/√2, (x₁ + x₂)/√2)`.
///
/// The 45° rotation is factored into three shears, each a band-limited
/// shift of rows or columns, so the map is unitary up to FFT round-off
/// and wrap-around of whatever weight sits at the grid edge.
pub fn beamsplitter(state: &TwoModeGrid) -> Result<TwoModeGrid> {
    if !state.axis().is_symmetric() {
        return Err(Error::domain("beamsplitter needs an axis symmetric about 0"));
    }
    let a = -(PI / 8.0).tan();
    let b = FRAC_1_SQRT_2;
    let mut out = state.clone();
    shear_mode1(&mut out, a)?;
    shear_mode2(&mut out, b)?;
    shear_mode1(&mut out, a)?;
    Ok(out)
}
