use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Largest per-mode length accepted by [`TwoModeGrid`].
pub const MAX_TWO_MODE_N: usize = 4096;

/// Uniform sample points `x_min + j·dx`, `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Axis {
    pub x_min: f64,
    pub dx: f64,
    pub n: usize,
}

impl Axis {
    /// `n` points over `[-half_width, half_width)`, so that `j ↔ n - j`
    /// is the reflection `x ↔ -x`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::invalid("axis half-width must be positive"));
        }
        let axis = Axis { x_min: -half_width, dx: 2.0 * half_width / n.max(1) as f64, n };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() || self.n < 2 {
            return Err(Error::GridSize(self.n));
        }
        if !(self.dx > 0.0) || !self.dx.is_finite() || !self.x_min.is_finite() {
            return Err(Error::invalid("axis needs finite x_min and positive dx"));
        }
        Ok(())
    }

    pub fn point(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    /// Length of the periodic cell, `n·dx`.
    pub fn span(&self) -> f64 {
        self.n as f64 * self.dx
    }

    /// Whether `j ↔ (n - j) mod n` maps x to -x.
    pub fn is_symmetric(&self) -> bool {
        (self.x_min + 0.5 * self.span()).abs() <= 1e-9 * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }
}

/// A one-mode wavefunction sampled on an [`Axis`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveGrid {
    axis: Axis,
    amps: Vec<Complex64>,
}

impl WaveGrid {
    pub fn new(axis: Axis, amps: Vec<Complex64>) -> Result<Self> {
        axis.validate()?;
        if amps.len() != axis.n {
            return Err(Error::invalid(alloc::format!("expected {} amplitudes, got {}", axis.n, amps.len())));
        }
        Ok(Self { axis, amps })
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(axis: Axis, mut f: F) -> Self {
        let amps = axis.points().map(&mut f).collect();
        Self { axis, amps }
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_parts(self) -> (Axis, Vec<Complex64>) {
        (self.axis, self.amps)
    }

    /// `Σ |ψ_j|² dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.axis.dx
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let s = 1.0 / n;
            self.amps.iter_mut().for_each(|c| *c *= s);
        }
        self
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.amps.iter_mut().for_each(|c| *c *= factor);
        self
    }

    pub fn pointwise_mul(&self, other: &WaveGrid) -> WaveGrid {
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a * b).collect();
        WaveGrid { axis: self.axis, amps }
    }

    fn same_axis(&self, other: &WaveGrid) -> Result<()> {
        let (a, b) = (self.axis, other.axis);
        if a.n != b.n || (a.dx - b.dx).abs() > 1e-12 * a.dx || (a.x_min - b.x_min).abs() > 1e-9 * a.dx {
            return Err(Error::invalid("grids live on different axes"));
        }
        Ok(())
    }

    /// `⟨self|other⟩ = Σ conj(self_j)·other_j dx`.
    pub fn inner(&self, other: &WaveGrid) -> Result<Complex64> {
        self.same_axis(other)?;
        let s: Complex64 = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.axis.dx)
    }

    /// `|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)`.
    pub fn fidelity(&self, other: &WaveGrid) -> Result<f64> {
        let ov = self.inner(other)?;
        Ok(ov.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    pub fn add(&self, other: &WaveGrid) -> Result<WaveGrid> {
        self.same_axis(other)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        Ok(WaveGrid { axis: self.axis, amps })
    }

    pub fn sub(&self, other: &WaveGrid) -> Result<WaveGrid> {
        self.same_axis(other)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect();
        Ok(WaveGrid { axis: self.axis, amps })
    }

    /// `⟨x⟩` for a normalized or unnormalized state.
    pub fn expectation_x(&self) -> f64 {
        self.moment(1)
    }

    pub fn expectation_x2(&self) -> f64 {
        self.moment(2)
    }

    fn moment(&self, k: i32) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, c) in self.amps.iter().enumerate() {
            let w = c.norm_sqr();
            num += w * self.axis.point(j).powi(k);
            den += w;
        }
        num / den
    }

    /// Zero-pads to `factor·n` points on the same spacing, keeping the
    /// axis symmetric about the old centre.
    pub fn padded(&self, factor: usize) -> Result<WaveGrid> {
        if !factor.is_power_of_two() {
            return Err(Error::GridSize(factor));
        }
        if factor == 1 {
            return Ok(self.clone());
        }
        let n = self.axis.n;
        let extra = (factor - 1) * n / 2;
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); factor * n];
        amps[extra..extra + n].copy_from_slice(&self.amps);
        let axis = Axis { x_min: self.axis.x_min - extra as f64 * self.axis.dx, dx: self.axis.dx, n: factor * n };
        WaveGrid::new(axis, amps)
    }
}

/// Two modes on a shared axis; amplitude `ψ(x₁[i₁], x₂[i₂])` sits at
/// `i₁·n + i₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeGrid {
    axis: Axis,
    amps: Vec<Complex64>,
}

impl TwoModeGrid {
    pub fn new(axis: Axis, amps: Vec<Complex64>) -> Result<Self> {
        axis.validate()?;
        if axis.n > MAX_TWO_MODE_N {
            return Err(Error::GridSize(axis.n));
        }
        if amps.len() != axis.n * axis.n {
            return Err(Error::invalid("two-mode amplitude count must be n*n"));
        }
        Ok(Self { axis, amps })
    }

    /// `ψ₁(x₁)·ψ₂(x₂)`.
    pub fn product(mode1: &WaveGrid, mode2: &WaveGrid) -> Result<Self> {
        mode1.same_axis(mode2)?;
        let n = mode1.axis.n;
        if n > MAX_TWO_MODE_N {
            return Err(Error::GridSize(n));
        }
        let mut amps = Vec::with_capacity(n * n);
        for a in &mode1.amps {
            amps.extend(mode2.amps.iter().map(|b| a * b));
        }
        Ok(Self { axis: mode1.axis, amps })
    }

    pub fn from_fn<F: FnMut(f64, f64) -> Complex64>(axis: Axis, mut f: F) -> Result<Self> {
        let mut amps = Vec::with_capacity(axis.n * axis.n);
        for i1 in 0..axis.n {
            let x1 = axis.point(i1);
            for i2 in 0..axis.n {
                amps.push(f(x1, axis.point(i2)));
            }
        }
        Self::new(axis, amps)
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.axis.n + i2
    }

    pub fn at(&self, i1: usize, i2: usize) -> Complex64 {
        self.amps[self.index(i1, i2)]
    }

    /// `Σ |ψ|² dx²`.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.axis.dx * self.axis.dx
    }

    pub fn inner(&self, other: &TwoModeGrid) -> Complex64 {
        let s: Complex64 = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        s * self.axis.dx * self.axis.dx
    }

    /// Probability per grid point of mode 2: `Σ_{i₁} |ψ|² dx²`.
    pub fn mode2_weights(&self) -> Vec<f64> {
        let n = self.axis.n;
        let mut w = alloc::vec![0.0; n];
        for row in self.amps.chunks_exact(n) {
            for (acc, c) in w.iter_mut().zip(row) {
                *acc += c.norm_sqr();
            }
        }
        let area = self.axis.dx * self.axis.dx;
        w.iter_mut().for_each(|x| *x *= area);
        w
    }

    /// Unnormalized mode-1 wavefunction at mode-2 index `i2`.
    pub fn mode1_slice(&self, i2: usize) -> WaveGrid {
        let n = self.axis.n;
        let amps = (0..n).map(|i1| self.amps[i1 * n + i2]).collect();
        WaveGrid { axis: self.axis, amps }
    }
}
