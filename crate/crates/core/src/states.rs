//! Approximate GKP codewords and their scalar diagnostics.
//!
//! `⟨x|c̃⟩ = N_c Σ_m exp(-½(m k √π)²) exp(-½((x - m√π)/Δ)²)` with m running
//! over the even (c = 0) or odd (c = 1) integers.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::numerics::{integrate_segments, truncation_for, QuadratureSpec, SeriesTruncation};
use crate::{Error, Result, SQRT_PI};

/// Peak width Δ and inverse envelope width k of an approximate codeword.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StateParams {
    delta: f64,
    kappa: f64,
}

impl StateParams {
    /// Both parameters must lie in (0, 1].
    pub fn new(delta: f64, kappa: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::invalid(alloc::format!("delta must lie in (0, 1], got {delta}")));
        }
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::invalid(alloc::format!("kappa must lie in (0, 1], got {kappa}")));
        }
        Ok(Self { delta, kappa })
    }

    /// Δ = k, the tied convention used for quality curves.
    pub fn symmetric(width: f64) -> Result<Self> {
        Self::new(width, width)
    }

    /// Skips the range check; for shapes that only arise inside the oracle
    /// (e.g. a codeword after squeezing).
    pub fn new_unchecked(delta: f64, kappa: f64) -> Self {
        Self { delta, kappa }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LogicalLabel {
    Zero,
    One,
}

impl LogicalLabel {
    pub fn bit(self) -> u8 {
        match self {
            LogicalLabel::Zero => 0,
            LogicalLabel::One => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(LogicalLabel::Zero),
            1 => Ok(LogicalLabel::One),
            _ => Err(Error::invalid(alloc::format!("logical label must be 0 or 1, got {bit}"))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            LogicalLabel::Zero => LogicalLabel::One,
            LogicalLabel::One => LogicalLabel::Zero,
        }
    }

    /// Offset of the codeword's peaks from the even lattice: 0 or √π.
    pub fn offset(self) -> f64 {
        f64::from(self.bit()) * SQRT_PI
    }
}

/// Peaks beyond this many widths from x contribute below f64 resolution.
const PEAK_REACH: f64 = 40.0;

/// An approximate codeword with its peak table and normalization resolved.
#[derive(Debug, Clone)]
pub struct GkpState {
    params: StateParams,
    label: LogicalLabel,
    truncation: SeriesTruncation,
    centers: Vec<f64>,
    weights: Vec<f64>,
    norm: f64,
}

impl GkpState {
    pub fn new(params: StateParams, label: LogicalLabel) -> Self {
        let truncation = truncation_for(&params);
        let max_site = truncation.max_site();
        let parity = i64::from(label.bit());
        let (centers, weights): (Vec<f64>, Vec<f64>) = (-max_site..=max_site)
            .filter(|m| m.rem_euclid(2) == parity)
            .map(|m| {
                let x = m as f64 * SQRT_PI;
                (x, (-0.5 * (params.kappa * x).powi(2)).exp())
            })
            .unzip();
        // Exact Gaussian overlaps: ∫ g_a g_b dx = Δ√π exp(-(a-b)²/(4Δ²)).
        let d = params.delta;
        let mut gram = 0.0;
        for (a, wa) in centers.iter().zip(&weights) {
            for (b, wb) in centers.iter().zip(&weights) {
                gram += wa * wb * (-(a - b) * (a - b) / (4.0 * d * d)).exp();
            }
        }
        let norm = 1.0 / (gram * d * SQRT_PI).sqrt();
        Self { params, label, truncation, centers, weights, norm }
    }

    pub fn params(&self) -> StateParams {
        self.params
    }

    pub fn label(&self) -> LogicalLabel {
        self.label
    }

    pub fn truncation(&self) -> SeriesTruncation {
        self.truncation
    }

    /// Peak positions m√π retained by the truncation.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// N_c.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    /// `⟨x|c̃⟩`, real and nonnegative.
    pub fn wavefunction(&self, x: f64) -> f64 {
        let d = self.params.delta;
        let reach = PEAK_REACH * d;
        let mut sum = 0.0;
        for (c, w) in self.centers.iter().zip(&self.weights) {
            let z = x - c;
            if z.abs() < reach {
                sum += w * (-0.5 * (z / d) * (z / d)).exp();
            }
        }
        self.norm * sum
    }

    /// `d⟨x|c̃⟩/dx` from the closed-form Gaussian sum.
    pub fn derivative(&self, x: f64) -> f64 {
        let d = self.params.delta;
        let reach = PEAK_REACH * d;
        let mut sum = 0.0;
        for (c, w) in self.centers.iter().zip(&self.weights) {
            let z = x - c;
            if z.abs() < reach {
                sum -= w * z / (d * d) * (-0.5 * (z / d) * (z / d)).exp();
            }
        }
        self.norm * sum
    }

    /// Lattice sites m√π in reach, tails of 12Δ, and a Δ/10 subdivision of
    /// ±6Δ around every retained peak so that the first Simpson refinement
    /// already samples each peak at Δ/40.
    fn breakpoints(&self) -> Vec<f64> {
        let m = self.truncation.max_site() + 1;
        let d = self.params.delta;
        let tail = 12.0 * d;
        let mut pts = Vec::new();
        pts.push(-(m as f64) * SQRT_PI - tail);
        pts.extend((-m..=m).map(|i| i as f64 * SQRT_PI));
        pts.push(m as f64 * SQRT_PI + tail);
        let window = 6.0 * d;
        for &c in &self.centers {
            pts.extend((-60..=60).map(|j| c + f64::from(j) * window / 60.0));
        }
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * d);
        pts
    }

    /// Probability that an x-homodyne readout lands closer to the wrong
    /// parity of √π multiples.
    ///
    /// Sums the wrong-parity bins adjacent to every retained peak; bins
    /// further out hold less than the truncation weight (1e-16).
    pub fn misid_probability(&self, quad: &QuadratureSpec) -> Result<f64> {
        let m = self.truncation.max_site() + 1;
        let wrong = 1 - i64::from(self.label.bit());
        let mut total = 0.0;
        for site in (-m..=m).filter(|s| s.rem_euclid(2) == wrong) {
            let c = site as f64 * SQRT_PI;
            let lo = c - 0.5 * SQRT_PI;
            let hi = c + 0.5 * SQRT_PI;
            let f = |x: f64| {
                let y = self.wavefunction(x);
                y * y
            };
            total += integrate_segments(f, &[lo, c, hi], quad)?;
        }
        Ok(total)
    }

    /// Wavefunction and derivative at `centers[i] + z`, with peak offsets
    /// formed from lattice integers so that `z` carries no rounding from
    /// the absolute position.
    fn local(&self, i: usize, z: f64) -> (f64, f64) {
        let d = self.params.delta;
        let reach = PEAK_REACH * d;
        let (mut value, mut slope) = (0.0, 0.0);
        for (j, w) in self.weights.iter().enumerate() {
            let t = z + (i as f64 - j as f64) * 2.0 * SQRT_PI;
            if t.abs() < reach {
                let g = w * (-0.5 * (t / d) * (t / d)).exp();
                value += g;
                slope -= g * t / (d * d);
            }
        }
        (self.norm * value, self.norm * slope)
    }

    /// `½(⟨x²⟩ + ⟨p²⟩) - ½` with `⟨p²⟩ = ∫ (dψ/dx)² dx`.
    ///
    /// Integrates cell by cell in coordinates local to each peak; far from
    /// the origin, evaluating at absolute positions leaves relative noise of
    /// order |x|·ε/Δ in the integrand, which stalls the refinement.
    pub fn mean_photons(&self, quad: &QuadratureSpec) -> Result<f64> {
        let d = self.params.delta;
        let last = self.centers.len() - 1;
        let tail = (12.0 * d).max(SQRT_PI);
        let window = 6.0 * d;
        let cells: Vec<(f64, f64)> = (0..=last)
            .map(|i| {
                let lo = if i == 0 { -SQRT_PI - tail } else { -SQRT_PI };
                let hi = if i == last { SQRT_PI + tail } else { SQRT_PI };
                (lo, hi)
            })
            .collect();
        let total: f64 = cells.iter().map(|(lo, hi)| hi - lo).sum();
        let mut x2 = 0.0;
        let mut p2 = 0.0;
        for (i, &(lo, hi)) in cells.iter().enumerate() {
            let mut br: Vec<f64> =
                (-60..=60).map(|j| f64::from(j) * window / 60.0).filter(|z| *z > lo && *z < hi).collect();
            br.insert(0, lo);
            br.push(hi);
            let spec = QuadratureSpec { abs_tol: quad.abs_tol * (hi - lo) / total, ..*quad };
            let c = self.centers[i];
            x2 += integrate_segments(
                |z| {
                    let y = self.local(i, z).0;
                    (c + z) * (c + z) * y * y
                },
                &br,
                &spec,
            )?;
            p2 += integrate_segments(
                |z| {
                    let y = self.local(i, z).1;
                    y * y
                },
                &br,
                &spec,
            )?;
        }
        Ok(0.5 * (x2 + p2) - 0.5)
    }

    /// `∫ |⟨x|c̃⟩|² dx` by quadrature.
    pub fn norm_integral(&self, quad: &QuadratureSpec) -> Result<f64> {
        integrate_segments(
            |x| {
                let y = self.wavefunction(x);
                y * y
            },
            &self.breakpoints(),
            quad,
        )
    }
}

/// Panel acceptance dominated by relative error, for integrals far below
/// 1e-12. Only safe on panels without unresolved peaks; the misid bins
/// hold monotone Gaussian tails between breakpoints.
fn relative_quadrature(rel_tol: f64, abs_floor: f64) -> QuadratureSpec {
    QuadratureSpec { abs_tol: abs_floor, max_depth: 40, rel_tol }
}

/// `⟨x|c̃⟩` at a single point.
pub fn wavefunction(params: StateParams, label: LogicalLabel, x: f64) -> f64 {
    GkpState::new(params, label).wavefunction(x)
}

/// N_c, computed from the exact lattice of Gaussian overlaps.
pub fn normalization(params: StateParams, label: LogicalLabel) -> f64 {
    GkpState::new(params, label).normalization()
}

/// Exact misidentification probability P_{c→1-c}.
pub fn misid_probability_exact(params: StateParams, label: LogicalLabel) -> Result<f64> {
    GkpState::new(params, label).misid_probability(&relative_quadrature(1e-10, 1e-60))
}

/// Small-Δ approximation `erfc(√π / (2Δ))`, independent of k.
pub fn misid_probability_approx(params: StateParams) -> f64 {
    libm::erfc(SQRT_PI / (2.0 * params.delta()))
}

/// Crude photon estimate `1/(4Δ²) + 1/(4k²)`.
pub fn mean_photons_crude(params: StateParams) -> f64 {
    let (d, k) = (params.delta(), params.kappa());
    1.0 / (4.0 * d * d) + 1.0 / (4.0 * k * k)
}

/// Mean photon number of the normalized approximate codeword.
pub fn mean_photons_exact(params: StateParams, label: LogicalLabel) -> Result<f64> {
    GkpState::new(params, label).mean_photons(&QuadratureSpec::default())
}

/// `⟨0̃|1̃⟩`, which is real and nonnegative.
pub fn overlap(params: StateParams) -> Result<f64> {
    overlap_with(params, &QuadratureSpec::default())
}

pub fn overlap_with(params: StateParams, quad: &QuadratureSpec) -> Result<f64> {
    let zero = GkpState::new(params, LogicalLabel::Zero);
    let one = GkpState::new(params, LogicalLabel::One);
    let br = zero.breakpoints();
    integrate_segments(|x| zero.wavefunction(x) * one.wavefunction(x), &br, quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use LogicalLabel::{One, Zero};

    fn p(d: f64, k: f64) -> StateParams {
        StateParams::new(d, k).unwrap()
    }

    #[test]
    fn params_are_validated() {
        assert!(StateParams::new(0.0, 0.5).is_err());
        assert!(StateParams::new(0.5, 1.5).is_err());
        assert!(StateParams::new(f64::NAN, 0.5).is_err());
        assert!(StateParams::new(1.0, 1.0).is_ok());
        assert!(LogicalLabel::from_bit(2).is_err());
    }

    #[test]
    fn label_zero_peaks_at_origin() {
        let s = GkpState::new(p(0.25, 0.25), Zero);
        let peak = s.wavefunction(0.0);
        for i in -400..=400 {
            let x = i as f64 * 0.05;
            assert!(s.wavefunction(x) <= peak);
        }
    }

    #[test]
    fn label_one_vanishes_at_origin() {
        let s = GkpState::new(p(0.25, 0.25), One);
        // The two nearest peaks at ±√π dominate; envelope weights are ≤ 1.
        let bound = 2.0 * (-0.5 * (SQRT_PI / 0.25).powi(2)).exp() * s.normalization();
        assert!(s.wavefunction(0.0) <= bound);
        assert!(s.wavefunction(0.0) < 1e-10);
    }

    #[test]
    fn unit_norm_by_quadrature() {
        let quad = QuadratureSpec::default();
        for &(d, k) in &[(0.25, 0.25), (0.1, 0.3), (0.5, 0.5), (1.0, 1.0), (0.15, 0.05)] {
            for label in [Zero, One] {
                let n = GkpState::new(p(d, k), label).norm_integral(&quad).unwrap();
                assert!((n - 1.0).abs() < 1e-9, "Δ={d} k={k} {label:?}: {n}");
            }
        }
    }

    #[test]
    fn normalization_small_width_limit() {
        let prm = p(0.01, 0.01);
        let n0 = normalization(prm, Zero);
        let n1 = normalization(prm, One);
        // Off-diagonal overlaps vanish and the envelope sum over every other
        // site tends to 1/(2k): N → (2k / (Δ√π))^{1/2}.
        let limit = (2.0 * 0.01 / (0.01 * SQRT_PI)).sqrt();
        assert!((0.99..=1.01).contains(&(n0 / limit)), "{}", n0 / limit);
        assert!(((n0 - n1) / n0).abs() < 0.01);
    }

    #[test]
    fn label_one_peaks_sit_on_odd_multiples() {
        let s = GkpState::new(p(0.25, 0.25), One);
        let h = 1e-7;
        for &c in s.centers() {
            let weight = (-0.5 * (0.25 * c).powi(2)).exp();
            if weight <= 1e-6 {
                continue;
            }
            // Local maximum: derivative changes sign within 1e-6 of the site.
            let lo = s.derivative(c - 1e-6);
            let hi = s.derivative(c + 1e-6);
            assert!(lo > 0.0 && hi < 0.0, "site {c}");
            // Refine the stationary point by bisection on the derivative.
            let x = crate::numerics::bisect(|x| s.derivative(x), c - 1e-6, c + 1e-6, h).unwrap();
            assert!((x - c).abs() < 1e-6);
        }
    }

    #[test]
    fn misid_anchors() {
        let half = misid_probability_exact(p(0.5, 0.5), Zero).unwrap();
        assert!((0.005..=0.02).contains(&half), "{half}");
        let quarter0 = misid_probability_exact(p(0.25, 0.25), Zero).unwrap();
        let quarter1 = misid_probability_exact(p(0.25, 0.25), One).unwrap();
        assert!((2e-7..=5e-6).contains(&quarter0), "{quarter0}");
        assert!(((quarter0 - quarter1) / quarter0).abs() < 0.1);
    }

    #[test]
    fn misid_approx_values() {
        // erfc(√π) and erfc(2√π), evaluated independently with mpmath.
        assert!((misid_probability_approx(p(0.5, 0.5)) - 0.012_188_882_184_802_9).abs() < 1e-15);
        assert!((misid_probability_approx(p(0.25, 0.9)) - 5.351_646_619_598_06e-7).abs() < 1e-18);
        assert!(misid_probability_approx(p(0.02, 0.5)) < 1e-300);
    }

    #[test]
    fn misid_exact_and_approx_agree_at_small_widths() {
        for i in 0..5 {
            let d = 0.1 + 0.05 * i as f64;
            let exact = misid_probability_exact(p(d, d), Zero).unwrap();
            let approx = misid_probability_approx(p(d, d));
            assert!(((exact - approx) / approx).abs() < 0.2, "Δ={d}: {exact} vs {approx}");
        }
    }

    #[test]
    fn misid_increases_with_delta() {
        let mut last = 0.0;
        for i in 0..9 {
            let d = 0.1 + 0.05 * i as f64;
            let v = misid_probability_exact(p(d, 0.25), Zero).unwrap();
            assert!(v > last, "Δ={d}");
            last = v;
        }
    }

    #[test]
    fn crude_photons() {
        assert_eq!(mean_photons_crude(p(0.25, 0.25)), 8.0);
        assert_eq!(mean_photons_crude(p(0.5, 0.5)), 2.0);
        assert_eq!(mean_photons_crude(p(0.2, 0.4)), mean_photons_crude(p(0.4, 0.2)));
    }

    #[test]
    fn exact_photon_anchors() {
        let a = mean_photons_exact(p(0.214, 0.214), Zero).unwrap();
        let b = mean_photons_exact(p(0.149, 0.149), Zero).unwrap();
        assert!((a - 10.4).abs() <= 0.3, "{a}");
        assert!((b - 22.1).abs() <= 0.6, "{b}");
    }

    #[test]
    fn exact_photons_label_independent_and_near_crude() {
        let a = mean_photons_exact(p(0.25, 0.25), Zero).unwrap();
        let b = mean_photons_exact(p(0.25, 0.25), One).unwrap();
        assert!(((a - b) / a).abs() < 0.05);
        for i in 1..=6 {
            let d = 0.05 * i as f64;
            let exact = mean_photons_exact(p(d, d), Zero).unwrap();
            let crude = mean_photons_crude(p(d, d));
            assert!(exact >= 0.0 && exact <= 2.0 * crude && crude <= 2.0 * exact, "Δ={d}: {exact} vs {crude}");
        }
    }

    /// Gaussian-pair moments in closed form: with O = Δ√π e^{-(a-b)²/(4Δ²)},
    /// ∫ x² g_a g_b = O (((a+b)/2)² + Δ²/2) and
    /// ∫ g_a' g_b' = O (1/(2Δ²) - (a-b)²/(4Δ⁴)).
    fn photons_closed_form(s: &GkpState) -> f64 {
        let d = s.params.delta;
        let (mut x2, mut p2) = (0.0, 0.0);
        for (a, wa) in s.centers.iter().zip(&s.weights) {
            for (b, wb) in s.centers.iter().zip(&s.weights) {
                let o = wa * wb * d * SQRT_PI * (-(a - b) * (a - b) / (4.0 * d * d)).exp();
                let m = 0.5 * (a + b);
                x2 += o * (m * m + 0.5 * d * d);
                p2 += o * (0.5 / (d * d) - (a - b) * (a - b) / (4.0 * d.powi(4)));
            }
        }
        let n2 = s.norm * s.norm;
        0.5 * n2 * (x2 + p2) - 0.5
    }

    #[test]
    fn exact_photons_match_closed_form() {
        for (d, k, label) in [(0.05, 0.05, Zero), (0.214, 0.214, One), (0.25, 0.4, Zero), (0.5, 0.5, One)] {
            let s = GkpState::new(p(d, k), label);
            let quad = s.mean_photons(&QuadratureSpec::default()).unwrap();
            let exact = photons_closed_form(&s);
            assert!(((quad - exact) / exact).abs() < 1e-10, "Δ={d} k={k}: {quad} vs {exact}");
        }
    }

    #[test]
    fn exact_photons_decrease_with_width() {
        let mut last = f64::INFINITY;
        for i in 1..=10 {
            let d = 0.05 * i as f64;
            let n = mean_photons_exact(p(d, d), Zero).unwrap();
            assert!(n < last, "Δ=k={d}");
            last = n;
        }
    }

    #[test]
    fn overlap_examples() {
        let half = overlap(p(0.5, 0.5)).unwrap();
        assert!(half > 0.0 && half < 0.1, "{half}");
        assert!(overlap(p(0.05, 0.05)).unwrap() < 1e-10);
    }
}
