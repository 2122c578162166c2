//! Decomposition of an approximate codeword into shifted ideal codewords.
//!
//! With `|u,v⟩ = e^{-iup̂} e^{-ivx̂} |c⟩` built on the ideal codeword `c`,
//!
//! ```text
//! f(u,v) = π^{-1/4} Σ_s e^{iv·2s√π} ψ(2s√π + u + offset_c),
//! ```
//!
//! and `P(u,v) = |f(u,v)|²` is a probability density on the cell
//! `u ∈ [-√π, √π)`, `v ∈ [-√π/2, √π/2)`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{bisect, integrate_segments, QuadratureSpec};
use crate::shift::ShiftPair;
use crate::{Error, GkpState, LogicalLabel, Result, StateParams, SQRT_PI};

/// Default grid resolution per axis.
pub const DEFAULT_RESOLUTION: usize = 256;

/// `π^{-1/4}`.
const PI_QUARTER_ROOT_INV: f64 = 0.751_125_544_464_942_5;

/// Evaluates `f(u, v)` for one codeword, reusing its peak table.
#[derive(Debug, Clone)]
pub struct ShiftAmplitude {
    state: GkpState,
    s_max: i64,
}

impl ShiftAmplitude {
    pub fn new(params: StateParams, label: LogicalLabel) -> Self {
        let state = GkpState::new(params, label);
        // 2s√π must cover every retained site m√π, |m| ≤ 2·s_max + 1.
        let s_max = i64::from(state.truncation().s_max) + 1;
        Self { state, s_max }
    }

    pub fn state(&self) -> &GkpState {
        &self.state
    }

    /// The real coefficients `ψ(2s√π + u + offset)` for s = -S..=S.
    fn coefficients(&self, u: f64) -> impl Iterator<Item = (i64, f64)> + '_ {
        let offset = self.state.label().offset();
        (-self.s_max..=self.s_max).map(move |s| (s, self.state.wavefunction(2.0 * s as f64 * SQRT_PI + u + offset)))
    }

    pub fn eval(&self, u: f64, v: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, a) in self.coefficients(u) {
            if a != 0.0 {
                acc += Complex64::from_polar(a, v * 2.0 * s as f64 * SQRT_PI);
            }
        }
        acc * PI_QUARTER_ROOT_INV
    }

    pub fn density(&self, u: f64, v: f64) -> f64 {
        self.eval(u, v).norm_sqr()
    }

    /// `∫_{-t}^{t} P(u, v) dv` in closed form:
    /// `π^{-1/2} Σ_{s,s'} a_s a_{s'} sin(2(s-s')√π t)/((s-s')√π)`.
    pub fn v_marginal_within(&self, u: f64, t: f64) -> f64 {
        let coeffs: Vec<f64> = self.coefficients(u).map(|(_, a)| a).collect();
        let n = coeffs.len();
        let mut total = 0.0;
        for d in 0..n {
            // Lags +d and -d are folded together.
            let c = if d == 0 {
                2.0 * t
            } else {
                let w = d as f64 * SQRT_PI;
                2.0 * (2.0 * w * t).sin() / w
            };
            let mut corr = 0.0;
            for i in 0..n - d {
                corr += coeffs[i] * coeffs[i + d];
            }
            total += c * corr;
        }
        total / SQRT_PI
    }
}

/// `f(u, v)` for a codeword with shifts measured from its own ideal comb.
pub fn shift_wavefunction(params: StateParams, label: LogicalLabel, u: f64, v: f64) -> Complex64 {
    ShiftAmplitude::new(params, label).eval(u, v)
}

/// `P(u, v)` sampled at the centres of a regular grid over a rectangular cell.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShiftDistribution {
    pub reference_label: LogicalLabel,
    pub params: StateParams,
    pub u_min: f64,
    pub u_extent: f64,
    pub v_min: f64,
    pub v_extent: f64,
    pub nu: usize,
    pub nv: usize,
    /// Row-major by u: `density[iu * nv + iv]`.
    pub density: Vec<f64>,
}

impl ShiftDistribution {
    /// Checks shape, extents and nonnegativity.
    pub fn validate(&self) -> Result<()> {
        if self.nu == 0 || self.nv == 0 || self.density.len() != self.nu * self.nv {
            return Err(Error::invalid("distribution grid shape does not match its data"));
        }
        let finite = [self.u_min, self.u_extent, self.v_min, self.v_extent].iter().all(|x| x.is_finite());
        if !finite || !(self.u_extent > 0.0 && self.v_extent > 0.0) {
            return Err(Error::invalid("distribution cell must have positive finite extents"));
        }
        if self.density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(Error::invalid("densities must be finite and nonnegative"));
        }
        Ok(())
    }

    pub fn du(&self) -> f64 {
        self.u_extent / self.nu as f64
    }

    pub fn dv(&self) -> f64 {
        self.v_extent / self.nv as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.du() * self.dv()
    }

    pub fn u_at(&self, iu: usize) -> f64 {
        self.u_min + (iu as f64 + 0.5) * self.du()
    }

    pub fn v_at(&self, iv: usize) -> f64 {
        self.v_min + (iv as f64 + 0.5) * self.dv()
    }

    pub fn at(&self, iu: usize, iv: usize) -> f64 {
        self.density[iu * self.nv + iv]
    }

    /// Midpoint sum of the density times the cell-element area.
    pub fn total_mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.cell_area()
    }

    /// Mass inside `max(|u|, |v|) < threshold`.
    ///
    /// Integrates the trigonometric interpolant of the (periodic) samples
    /// over the square, so cells cut by its edge need no special handling.
    pub fn mass_within(&self, threshold: f64) -> f64 {
        let wu = interval_weights(self.u_min, self.u_extent, self.nu, threshold);
        let wv = interval_weights(self.v_min, self.v_extent, self.nv, threshold);
        let mut total = 0.0;
        for (iu, a) in wu.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            let row = &self.density[iu * self.nv..(iu + 1) * self.nv];
            total += a * row.iter().zip(&wv).map(|(d, b)| d * b).sum::<f64>();
        }
        total
    }

    /// Grid index of the largest density.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, d) in self.density.iter().enumerate() {
            if *d > self.density[best] {
                best = i;
            }
        }
        (best / self.nv, best % self.nv)
    }

    /// The same density with the roles of u and v exchanged.
    pub fn transposed(&self) -> ShiftDistribution {
        let mut density = Vec::with_capacity(self.density.len());
        for iv in 0..self.nv {
            for iu in 0..self.nu {
                density.push(self.at(iu, iv));
            }
        }
        ShiftDistribution {
            reference_label: self.reference_label,
            params: self.params,
            u_min: self.v_min,
            u_extent: self.v_extent,
            v_min: self.u_min,
            v_extent: self.u_extent,
            nu: self.nv,
            nv: self.nu,
            density,
        }
    }
}

/// Weights `w_i` with `Σ w_i g(x_i) = ∫_{-t}^{t} g` for the trigonometric
/// interpolant of `g` through the `n` cell centres of `[min, min + extent)`.
fn interval_weights(min: f64, extent: f64, n: usize, t: f64) -> Vec<f64> {
    let t = t.min(0.5 * extent);
    let half = n / 2;
    // ∫_{-t}^{t} e^{iωx} dx for ω = 2πk/extent, k = 0..=n/2.
    let integral: Vec<f64> = (0..=half)
        .map(|k| {
            if k == 0 {
                2.0 * t
            } else {
                let w = 2.0 * core::f64::consts::PI * k as f64 / extent;
                2.0 * (w * t).sin() / w
            }
        })
        .collect();
    (0..n)
        .map(|i| {
            let x = min + (i as f64 + 0.5) * extent / n as f64;
            let mut acc = integral[0];
            for (k, ik) in integral.iter().enumerate().skip(1) {
                let w = 2.0 * core::f64::consts::PI * k as f64 / extent;
                // ±k pair; the Nyquist term is shared between both signs.
                let pair = if 2 * k == n { 1.0 } else { 2.0 };
                acc += pair * (w * x).cos() * ik;
            }
            acc / n as f64
        })
        .collect()
}

/// Tabulates `P(u, v)` over `[-√π, √π) × [-√π/2, √π/2)`.
pub fn shift_distribution(params: StateParams, label: LogicalLabel, nu: usize, nv: usize) -> Result<ShiftDistribution> {
    if nu < 16 || nv < 16 {
        return Err(Error::invalid(alloc::format!("grid must be at least 16x16, got {nu}x{nv}")));
    }
    let amp = ShiftAmplitude::new(params, label);
    let mut dist = ShiftDistribution {
        reference_label: label,
        params,
        u_min: -SQRT_PI,
        u_extent: 2.0 * SQRT_PI,
        v_min: -0.5 * SQRT_PI,
        v_extent: SQRT_PI,
        nu,
        nv,
        density: Vec::with_capacity(nu * nv),
    };
    for iu in 0..nu {
        let u = dist.u_at(iu);
        for iv in 0..nv {
            let v = dist.v_at(iv);
            dist.density.push(amp.density(u, v));
        }
    }
    Ok(dist)
}

/// Tolerances used for [`p_no_error`].
pub fn default_p_quadrature() -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-12, max_depth: 40, rel_tol: 0.0 }
}

/// Probability that the state's shifts both lie below `threshold`.
pub fn p_no_error(params: StateParams, label: LogicalLabel, threshold: f64) -> Result<f64> {
    p_no_error_with(params, label, threshold, &default_p_quadrature())
}

/// As [`p_no_error`] with explicit quadrature settings. The v-integral is
/// done in closed form, the u-integral adaptively.
pub fn p_no_error_with(params: StateParams, label: LogicalLabel, threshold: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(threshold > 0.0 && threshold <= 0.5 * SQRT_PI) {
        return Err(Error::invalid(alloc::format!("threshold must lie in (0, sqrt(pi)/2], got {threshold}")));
    }
    let amp = ShiftAmplitude::new(params, label);
    let t = threshold;
    let p = integrate_segments(|u| amp.v_marginal_within(u, t), &[-t, 0.0, t], quad)?;
    Ok(p.clamp(0.0, 1.0))
}

/// Lower end of the Δ = k search bracket for [`find_delta`].
pub const FIND_DELTA_LO: f64 = 0.05;
/// Upper end of the Δ = k search bracket for [`find_delta`].
pub const FIND_DELTA_HI: f64 = 1.0;

/// Δ = k at which `p_no_error` (label 0) equals `target`.
pub fn find_delta(target: f64, threshold: f64) -> Result<f64> {
    find_delta_with(target, threshold, 1e-7)
}

pub fn find_delta_with(target: f64, threshold: f64, tol: f64) -> Result<f64> {
    find_delta_with_quadrature(target, threshold, tol, &default_p_quadrature())
}

/// As [`find_delta_with`], evaluating `p_no_error` with `quad`.
pub fn find_delta_with_quadrature(target: f64, threshold: f64, tol: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::invalid(alloc::format!("target must lie in (0, 1), got {target}")));
    }
    let eval = |d: f64| -> Result<f64> {
        Ok(p_no_error_with(StateParams::symmetric(d)?, LogicalLabel::Zero, threshold, quad)? - target)
    };
    let (lo, hi) = (FIND_DELTA_LO, FIND_DELTA_HI);
    let g_lo = eval(lo)?;
    let g_hi = eval(hi)?;
    // Strict: p_no_error is decreasing, so the target must sit strictly
    // between its values at the bracket ends.
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::NoBracket { lo, hi, g_lo, g_hi });
    }
    let mut failure = None;
    let root = bisect(
        |d| match eval(d) {
            Ok(g) => g,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        tol,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(root),
    }
}

/// Inverse-CDF table over a distribution's flattened grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerState {
    cumulative: Vec<f64>,
    master_seed: u64,
}

impl SamplerState {
    pub fn new(dist: &ShiftDistribution, master_seed: u64) -> Result<Self> {
        dist.validate()?;
        let mut cumulative = Vec::with_capacity(dist.density.len());
        let mut acc = 0.0;
        for d in &dist.density {
            acc += d;
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::invalid("distribution has no mass"));
        }
        for c in &mut cumulative {
            *c /= acc;
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Ok(Self { cumulative, master_seed })
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// One draw using the caller's generator.
    pub fn draw<R: Rng + ?Sized>(&self, dist: &ShiftDistribution, rng: &mut R) -> ShiftPair {
        let r: f64 = rng.random();
        let idx = self.cumulative.partition_point(|&c| c <= r).min(self.cumulative.len() - 1);
        let (iu, iv) = (idx / dist.nv, idx % dist.nv);
        let ju: f64 = rng.random();
        let jv: f64 = rng.random();
        ShiftPair::new(dist.u_min + (iu as f64 + ju) * dist.du(), dist.v_min + (iv as f64 + jv) * dist.dv())
    }
}

/// Generator for trial `trial_index` under `master_seed`; independent of
/// the order in which trials run.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(master_seed ^ mix(trial_index.wrapping_add(0x9e37_79b9_7f4a_7c15))))
}

// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One draw for `trial_index`, deterministic in (master seed, index).
pub fn sample_shift(dist: &ShiftDistribution, sampler: &SamplerState, trial_index: u64) -> Result<ShiftPair> {
    if sampler.cumulative.len() != dist.density.len() {
        return Err(Error::invalid("sampler was built for a different grid"));
    }
    let mut rng = trial_rng(sampler.master_seed, trial_index);
    Ok(sampler.draw(dist, &mut rng))
}
