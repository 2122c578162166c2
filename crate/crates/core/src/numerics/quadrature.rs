//! Adaptive Simpson quadrature with interval halving.

use crate::{Error, Result};

/// Tolerance and recursion limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureSpec {
    /// Absolute error target for the whole integral.
    pub abs_tol: f64,
    /// Maximum number of interval halvings along any branch.
    pub max_depth: u32,
    /// Optional relative error target; a panel is accepted when either the
    /// absolute or the relative criterion holds. Zero disables it.
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-12, max_depth: 40, rel_tol: 0.0 }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, max_depth: u32) -> Result<Self> {
        let spec = Self { abs_tol, max_depth, rel_tol: 0.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::invalid("quadrature abs_tol must be positive and finite"));
        }
        if self.max_depth < 1 {
            return Err(Error::invalid("quadrature max_depth must be at least 1"));
        }
        if !(self.rel_tol >= 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::invalid("quadrature rel_tol must be nonnegative"));
        }
        Ok(())
    }
}

const ROUNDOFF: f64 = 128.0 * f64::EPSILON;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

struct Simpson<'a, F> {
    f: &'a F,
    spec: &'a QuadratureSpec,
    exhausted: bool,
    finite: bool,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    fn eval(&mut self, x: f64) -> f64 {
        let y = (self.f)(x);
        if !y.is_finite() {
            self.finite = false;
            return 0.0;
        }
        y
    }

    fn refine(&mut self, p: Panel, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = self.eval(lm);
        let frm = self.eval(rm);
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let both = left + right;
        let delta = both - p.whole;
        // |delta|/15 estimates the error of the corrected value; demanding
        // |delta| itself meet the target leaves a margin for panels where
        // the estimate is optimistic.
        // Below ROUNDOFF·|both| the difference is round-off and halving
        // further cannot shrink it.
        let accept = delta.abs() <= tol
            || delta.abs() <= ROUNDOFF * both.abs()
            || (self.spec.rel_tol > 0.0 && delta.abs() <= self.spec.rel_tol * both.abs());
        if accept {
            return both + delta / 15.0;
        }
        if depth >= self.spec.max_depth {
            self.exhausted = true;
            return both + delta / 15.0;
        }
        let l = Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left };
        let r = Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right };
        self.refine(l, 0.5 * tol, depth + 1) + self.refine(r, 0.5 * tol, depth + 1)
    }

    fn run(&mut self, a: f64, b: f64, tol: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let fa = self.eval(a);
        let fb = self.eval(b);
        let fm = self.eval(0.5 * (a + b));
        let whole = simpson(a, b, fa, fm, fb);
        self.refine(Panel { a, b, fa, fm, fb, whole }, tol, 1)
    }
}

/// Integrates `f` over `[a, b]` by adaptive Simpson refinement.
///
/// Fails with [`Error::NonConvergence`] (carrying the best estimate) when a
/// branch reaches `max_depth` before meeting the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_segments(f, &[a, b], spec)
}

/// Integrates over consecutive segments `[breaks[i], breaks[i+1]]`.
///
/// Placing breakpoints at the features of a narrow-peaked integrand keeps
/// the first Simpson panels from stepping over them. The absolute tolerance
/// is shared across segments in proportion to their length.
pub fn integrate_segments<F: Fn(f64) -> f64>(f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if breaks.len() < 2 {
        return Err(Error::invalid("at least two breakpoints are required"));
    }
    if breaks.iter().any(|x| !x.is_finite()) || breaks.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("integration limits must be finite and ordered"));
    }
    let total = breaks[breaks.len() - 1] - breaks[0];
    let mut runner = Simpson { f: &f, spec, exhausted: false, finite: true };
    let mut sum = 0.0;
    for w in breaks.windows(2) {
        let share = if total > 0.0 { (w[1] - w[0]) / total } else { 0.0 };
        sum += runner.run(w[0], w[1], spec.abs_tol * share);
    }
    if !runner.finite {
        return Err(Error::NonFinite);
    }
    if runner.exhausted {
        return Err(Error::NonConvergence { estimate: sum });
    }
    Ok(sum)
}
