//! Discrete Fourier transform between x- and p-representations.
//!
//! Convention, used by every module in this crate:
//!
//! ```text
//! φ(p) = (2π)^{-1/2} ∫ ψ(x) e^{+ipx} dx
//! ```
//!
//! on a centered momentum grid `p_j = (j - n/2)·dp`, `dp = 2π / (n·dx)`.
//! With this sign a position-space multiplication by `e^{-ivx}` moves the
//! momentum wavefunction by `+v`, and a translation `ψ(x - u)` multiplies
//! `φ(p)` by `e^{+ipu}`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::oracle::{Axis, WaveGrid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FftDirection {
    /// Kernel `e^{-2πi jk/n}`.
    Forward,
    /// Kernel `e^{+2πi jk/n}`, unnormalized.
    Backward,
}

/// Twiddle table for repeated transforms of one length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    /// `e^{-2πik/n}` for `k < n/2`, each computed directly (not by
    /// recurrence) to keep the round-off of long transforms at 1e-15.
    twiddles: Vec<Complex64>,
}

impl FftPlan {
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        let step = -2.0 * PI / n as f64;
        let twiddles = (0..n / 2).map(|k| Complex64::from_polar(1.0, step * k as f64)).collect();
        Ok(Self { n, twiddles })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place iterative radix-2 transform of a buffer of the plan's length.
    pub fn transform(&self, buf: &mut [Complex64], direction: FftDirection) -> Result<()> {
        let n = self.n;
        if buf.len() != n {
            return Err(Error::GridSize(buf.len()));
        }
        if n == 1 {
            return Ok(());
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let backward = direction == FftDirection::Backward;
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for chunk in buf.chunks_exact_mut(len) {
                let (lo, hi) = chunk.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let w = self.twiddles[k * stride];
                    let t = *b * if backward { w.conj() } else { w };
                    *b = *a - t;
                    *a += t;
                }
            }
            len <<= 1;
        }
        Ok(())
    }

    /// Band-limited periodic translation, as [`shift_periodic`].
    pub fn shift(&self, buf: &mut [Complex64], shift_in_samples: f64) -> Result<()> {
        let n = self.n;
        self.transform(buf, FftDirection::Forward)?;
        let theta = -2.0 * PI * shift_in_samples / n as f64;
        let ramp = PhaseRamp::new(theta, n);
        let scale = 1.0 / n as f64;
        // Bins at and above n/2 carry negative frequencies k - n.
        let wrap = Complex64::from_polar(scale, -theta * n as f64);
        for (k, c) in buf.iter_mut().enumerate() {
            let w = ramp.at(k);
            *c *= if k < n / 2 { w * scale } else { w * wrap };
        }
        self.transform(buf, FftDirection::Backward)
    }
}

/// `e^{iθk}` for `0 <= k < n` from two short tables, `k = hi·B + lo`, so
/// each value costs one complex product instead of a sin/cos pair.
struct PhaseRamp {
    low: Vec<Complex64>,
    high: Vec<Complex64>,
}

const RAMP_BLOCK: usize = 64;

impl PhaseRamp {
    fn new(theta: f64, n: usize) -> Self {
        let low = (0..RAMP_BLOCK).map(|j| Complex64::from_polar(1.0, theta * j as f64)).collect();
        let high =
            (0..n.div_ceil(RAMP_BLOCK)).map(|j| Complex64::from_polar(1.0, theta * (j * RAMP_BLOCK) as f64)).collect();
        Self { low, high }
    }

    #[inline]
    fn at(&self, k: usize) -> Complex64 {
        self.high[k / RAMP_BLOCK] * self.low[k % RAMP_BLOCK]
    }
}

/// In-place iterative radix-2 FFT. The length must be a power of two.
pub fn fft_in_place(buf: &mut [Complex64], direction: FftDirection) -> Result<()> {
    FftPlan::new(buf.len())?.transform(buf, direction)
}

/// Band-limited periodic translation of uniformly spaced samples:
/// `g(x) -> g(x - shift_in_samples·dx)`.
pub fn shift_periodic(buf: &mut [Complex64], shift_in_samples: f64) -> Result<()> {
    FftPlan::new(buf.len())?.shift(buf, shift_in_samples)
}

/// Momentum axis conjugate to a position axis.
pub fn momentum_axis(position: &Axis) -> Axis {
    let dp = 2.0 * PI / (position.n as f64 * position.dx);
    Axis { x_min: -(position.n as f64 / 2.0) * dp, dx: dp, n: position.n }
}

/// Position → momentum on raw samples (`x_min`, `dx` describe the input).
pub fn momentum_in_place(buf: &mut [Complex64], x_min: f64, dx: f64) -> Result<()> {
    let n = buf.len();
    if !n.is_power_of_two() {
        return Err(Error::GridSize(n));
    }
    for (k, c) in buf.iter_mut().enumerate() {
        if k % 2 == 1 {
            *c = -*c;
        }
    }
    fft_in_place(buf, FftDirection::Backward)?;
    let dp = 2.0 * PI / (n as f64 * dx);
    let scale = dx / (2.0 * PI).sqrt();
    for (j, c) in buf.iter_mut().enumerate() {
        let p = (j as f64 - n as f64 / 2.0) * dp;
        *c *= Complex64::from_polar(scale, p * x_min);
    }
    Ok(())
}

/// Momentum → position on raw samples; `x_min`, `dx` describe the output.
pub fn position_in_place(buf: &mut [Complex64], x_min: f64, dx: f64) -> Result<()> {
    let n = buf.len();
    if !n.is_power_of_two() {
        return Err(Error::GridSize(n));
    }
    let dp = 2.0 * PI / (n as f64 * dx);
    for (j, c) in buf.iter_mut().enumerate() {
        let p = (j as f64 - n as f64 / 2.0) * dp;
        *c *= Complex64::from_polar(1.0, -p * x_min);
    }
    fft_in_place(buf, FftDirection::Forward)?;
    let scale = dp / (2.0 * PI).sqrt();
    for (k, c) in buf.iter_mut().enumerate() {
        let s = if k % 2 == 1 { -scale } else { scale };
        *c *= s;
    }
    Ok(())
}

/// Momentum representation of a position-space grid state.
pub fn to_momentum(grid: &WaveGrid) -> Result<WaveGrid> {
    let axis = *grid.axis();
    let mut amps = grid.amplitudes().to_vec();
    momentum_in_place(&mut amps, axis.x_min, axis.dx)?;
    WaveGrid::new(momentum_axis(&axis), amps)
}

/// Inverse of [`to_momentum`]; `x_min` fixes the origin of the position axis.
pub fn to_position(grid: &WaveGrid, x_min: f64) -> Result<WaveGrid> {
    let m = *grid.axis();
    let dx = 2.0 * PI / (m.n as f64 * m.dx);
    let mut amps = grid.amplitudes().to_vec();
    position_in_place(&mut amps, x_min, dx)?;
    WaveGrid::new(Axis { x_min, dx, n: m.n }, amps)
}
