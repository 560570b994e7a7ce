//! Box-counting dimension of sampled graphs.
//!
//! Estimators work on uniformly sampled graphs `y_i = f(a + i h)`. The
//! δ-oscillation is the sampled max minus min over `[x - δ, x + δ] ∩ [a, b]`,
//! which biases it low by at most the variation of `f` over one spacing.

mod fit;
mod window;

pub use fit::{
    fit_dimension_boxcount, fit_dimension_shift, fit_dimension_variation, fit_loglog, hardy_exponent, section_dims,
    surface_dimension, FitKind, LadderRow, LogLogFit, ScalingFit, SectionDims, FIT_MIN_POINTS,
};
pub use window::{sliding_max, sliding_min};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when converting a length into a whole number of spacings.
const INDEX_SLACK: f64 = 1e-9;

/// Samples of `f: [a, b] → ℝ` on a uniform grid, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGraph {
    a: f64,
    b: f64,
    ys: Vec<f64>,
}

impl SampledGraph {
    /// Graph on `[a, b]` with `ys[i] = f(a + i (b - a)/(n - 1))`.
    pub fn from_uniform(a: f64, b: f64, ys: Vec<f64>) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite("interval"));
        }
        if b <= a {
            return Err(Error::InvalidGraph(format!("empty interval [{a}, {b}]")));
        }
        if ys.len() < 2 {
            return Err(Error::InvalidGraph("need at least two samples".into()));
        }
        if let Some(i) = ys.iter().position(|y| !y.is_finite()) {
            return Err(Error::InvalidGraph(format!("sample {i} is not finite")));
        }
        Ok(SampledGraph { a, b, ys })
    }

    /// Graph from explicit abscissae, which must be uniformly spaced.
    pub fn new(xs: &[f64], ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidGraph(format!(
                "{} abscissae for {} ordinates",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidGraph("need at least two samples".into()));
        }
        let (a, b) = (xs[0], xs[xs.len() - 1]);
        let h = (b - a) / (xs.len() - 1) as f64;
        for (i, &x) in xs.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite("abscissa"));
            }
            let want = a + h * i as f64;
            if (x - want).abs() > 1e-12 * (b - a).abs().max(want.abs()) {
                return Err(Error::InvalidGraph(format!("abscissa {i} breaks uniform spacing")));
            }
        }
        SampledGraph::from_uniform(a, b, ys)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.ys.len() - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.ys.len() {
            self.b
        } else {
            self.a + self.spacing() * i as f64
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Same abscissae, ordinates mapped by `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        SampledGraph::from_uniform(self.a, self.b, self.ys.iter().map(|&y| f(y)).collect())
    }

    fn is_constant(&self) -> bool {
        self.ys.iter().all(|&y| y == self.ys[0])
    }

    /// Piecewise-linear interpolant at `x ∈ [a, b]`.
    pub fn interpolate(&self, x: f64) -> f64 {
        let u = ((x - self.a) / self.spacing()).clamp(0.0, (self.len() - 1) as f64);
        let i = (u.floor() as usize).min(self.len() - 2);
        let frac = u - i as f64;
        if frac == 0.0 {
            self.ys[i]
        } else {
            self.ys[i] + frac * (self.ys[i + 1] - self.ys[i])
        }
    }

    /// Number of whole spacings in `len`, forgiving rounding just below an integer.
    fn spacings_in(&self, len: f64) -> usize {
        (len / self.spacing() * (1.0 + INDEX_SLACK)).floor() as usize
    }

    fn check_delta(&self, delta: f64, min_spacings: f64) -> Result<()> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::param("delta", format!("delta = {delta} must be positive")));
        }
        let h = self.spacing();
        if delta < min_spacings * h * (1.0 - INDEX_SLACK) {
            return Err(Error::BelowResolution { delta, spacing: h });
        }
        Ok(())
    }
}

/// Scales `δ_n = base^{-n}` for `n = n_min..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaLadder {
    pub base: f64,
    pub n_min: i32,
    pub n_max: i32,
}

impl DeltaLadder {
    pub fn new(base: f64, n_min: i32, n_max: i32) -> Result<Self> {
        if !base.is_finite() || base <= 1.0 {
            return Err(Error::InvalidLadder(format!("base {base} must exceed 1")));
        }
        if n_max <= n_min {
            return Err(Error::InvalidLadder(format!(
                "n_max = {n_max} must exceed n_min = {n_min}"
            )));
        }
        Ok(DeltaLadder { base, n_min, n_max })
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Scales in ladder order, largest first.
    pub fn deltas(&self) -> Vec<f64> {
        (self.n_min..=self.n_max).map(|n| self.base.powi(-n)).collect()
    }

    pub fn delta_min(&self) -> f64 {
        self.base.powi(-self.n_max)
    }

    pub fn delta_max(&self) -> f64 {
        self.base.powi(-self.n_min)
    }

    /// Every scale must fit twice in the interval and span at least 8 spacings.
    pub fn validate_for(&self, g: &SampledGraph) -> Result<()> {
        self.validate_span(g.b() - g.a(), g.len() - 1)
    }

    /// [`validate_for`](Self::validate_for) before sampling: a graph of
    /// `intervals` equal steps over an interval of length `width`.
    pub fn validate_span(&self, width: f64, intervals: usize) -> Result<()> {
        if self.delta_max() >= width / 2.0 {
            return Err(Error::InvalidLadder(format!(
                "largest delta {} is not below half the interval width {}",
                self.delta_max(),
                width / 2.0
            )));
        }
        let spacing = width / intervals as f64;
        if self.delta_min() < MIN_SPACINGS_PER_DELTA * spacing * (1.0 - 1e-12) {
            return Err(Error::BelowResolution {
                delta: self.delta_min(),
                spacing,
            });
        }
        Ok(())
    }
}

/// A ladder's smallest scale must cover this many sample spacings.
pub const MIN_SPACINGS_PER_DELTA: f64 = 8.0;

/// Number of `δ`-grid squares `[mδ, (m+1)δ] × [kδ, (k+1)δ]`, anchored at the
/// origin, met by the piecewise-linear interpolant of the samples.
pub fn box_count(g: &SampledGraph, delta: f64) -> Result<u64> {
    g.check_delta(delta, 2.0)?;
    let (a, b) = (g.a(), g.b());
    let h = g.spacing();
    let n = g.len();
    let first = (a / delta).floor() as i64;
    let last = ((b / delta).ceil() as i64 - 1).max(first);
    let mut total = 0u64;
    for m in first..=last {
        let lo = (m as f64 * delta).max(a);
        let hi = ((m + 1) as f64 * delta).min(b);
        if hi < lo {
            continue;
        }
        let mut ymin = g.interpolate(lo);
        let mut ymax = ymin;
        let right = g.interpolate(hi);
        ymin = ymin.min(right);
        ymax = ymax.max(right);
        let i0 = (((lo - a) / h).ceil().max(0.0)) as usize;
        let i1 = ((((hi - a) / h).floor()) as usize).min(n - 1);
        if i0 <= i1 {
            for &y in &g.ys()[i0..=i1] {
                ymin = ymin.min(y);
                ymax = ymax.max(y);
            }
        }
        let rows = (ymax / delta).floor() - (ymin / delta).floor() + 1.0;
        total += rows as u64;
    }
    Ok(total)
}

fn window_bounds(g: &SampledGraph, x: f64, delta: f64) -> (usize, usize) {
    let h = g.spacing();
    let last = g.len() - 1;
    let lo = (x - delta - g.a()) / h;
    let hi = (x + delta - g.a()) / h;
    let i0 = (lo - INDEX_SLACK * lo.abs().max(1.0)).ceil().max(0.0) as usize;
    let i1 = (hi + INDEX_SLACK * hi.abs().max(1.0))
        .floor()
        .min(last as f64)
        .max(-1.0);
    if i1 < 0.0 {
        return (1, 0);
    }
    (i0, i1 as usize)
}

/// `osc_δ(x)`: sampled max minus min over `[x - δ, x + δ] ∩ [a, b]`.
pub fn oscillation(g: &SampledGraph, x: f64, delta: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("x"));
    }
    if x < g.a() || x > g.b() {
        return Err(Error::param(
            "x",
            format!("x = {x} lies outside [{}, {}]", g.a(), g.b()),
        ));
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::param("delta", "must be positive"));
    }
    let (i0, i1) = window_bounds(g, x, delta);
    if i1 < i0 + 1 {
        return Err(Error::EmptyWindow { x, delta });
    }
    let w = &g.ys()[i0..=i1];
    let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = w.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

/// `osc_δ(x_i)` at every sample, from one monotone-deque pass.
pub fn oscillation_profile(g: &SampledGraph, delta: f64) -> Result<Vec<f64>> {
    g.check_delta(delta, 1.0)?;
    let w = g.spacings_in(delta);
    let max = sliding_max(g.ys(), w);
    let min = sliding_min(g.ys(), w);
    Ok(max.iter().zip(&min).map(|(a, b)| a - b).collect())
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// `Var_δ = ∫_a^b osc_δ(x) dx` by the trapezoid rule on the samples.
pub fn variation(g: &SampledGraph, delta: f64) -> Result<f64> {
    let osc = oscillation_profile(g, delta)?;
    Ok(trapezoid(&osc, g.spacing()))
}

/// [`variation`] with every window scanned directly, `O(n·w)`. Reference for
/// the deque implementation.
pub fn variation_brute_force(g: &SampledGraph, delta: f64) -> Result<f64> {
    g.check_delta(delta, 1.0)?;
    let w = g.spacings_in(delta);
    let ys = g.ys();
    let n = ys.len();
    let osc: Vec<f64> = (0..n)
        .map(|i| {
            let win = &ys[i.saturating_sub(w)..=(i + w).min(n - 1)];
            let max = win.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = win.iter().copied().fold(f64::INFINITY, f64::min);
            max - min
        })
        .collect();
    Ok(trapezoid(&osc, g.spacing()))
}

/// `∫ |f(x + δ) - f(x - δ)| dx` over the samples with both shifts inside
/// `[a, b]`, shifted values by linear interpolation. Never exceeds
/// `variation(2δ)`.
pub fn shift_lower_functional(g: &SampledGraph, delta: f64) -> Result<f64> {
    g.check_delta(delta, 1.0)?;
    let h = g.spacing();
    let n = g.len();
    let u = delta / h;
    let mut d = u.floor() as usize;
    let mut frac = u - d as f64;
    if frac > 1.0 - INDEX_SLACK {
        d += 1;
        frac = 0.0;
    } else if frac < INDEX_SLACK {
        frac = 0.0;
    }
    let reach = if frac > 0.0 { d + 1 } else { d };
    // samples i with i - reach ≥ 0 and i + reach ≤ n - 1
    if n < 2 * reach + 2 {
        return Err(Error::EmptyWindow {
            x: 0.5 * (g.a() + g.b()),
            delta,
        });
    }
    let ys = g.ys();
    let at = |j_floor: usize| {
        if frac == 0.0 {
            ys[j_floor]
        } else {
            ys[j_floor] + frac * (ys[j_floor + 1] - ys[j_floor])
        }
    };
    let diffs: Vec<f64> = (reach..n - reach)
        .map(|i| {
            let right = at(i + d);
            // x_i - δ = x_{i-d-1} + (1 - frac) h
            let left = if frac == 0.0 {
                ys[i - d]
            } else {
                ys[i - d - 1] + (1.0 - frac) * (ys[i - d] - ys[i - d - 1])
            };
            (right - left).abs()
        })
        .collect();
    Ok(trapezoid(&diffs, h))
}

/// Ratios `δ² N(δ) / Var_{√2 δ}` and `δ² N(δ) / Var_δ`. Both stay between
/// `δ`-independent constants for a non-constant continuous graph.
pub fn sandwich_check(g: &SampledGraph, delta: f64) -> Result<(f64, f64)> {
    if g.is_constant() {
        return Err(Error::Degenerate("constant graph has zero variation".into()));
    }
    let n = box_count(g, delta)? as f64;
    let wide = variation(g, std::f64::consts::SQRT_2 * delta)?;
    let narrow = variation(g, delta)?;
    if narrow == 0.0 || wide == 0.0 {
        return Err(Error::Degenerate("zero variation".into()));
    }
    let area = delta * delta * n;
    Ok((area / wide, area / narrow))
}

/// `sup_x osc_{δ/2}(x) = sup{|f(x) - f(y)| : |x - y| ≤ δ}` over the samples.
pub fn max_oscillation(g: &SampledGraph, delta: f64) -> Result<f64> {
    g.check_delta(delta, 1.0)?;
    // windows of `w` spacings total width
    let w = g.spacings_in(delta);
    let ys = g.ys();
    let max = sliding_max_forward(ys, w);
    let min = sliding_min_forward(ys, w);
    Ok(max.iter().zip(&min).map(|(a, b)| a - b).fold(0.0, f64::max))
}

fn sliding_max_forward(ys: &[f64], w: usize) -> Vec<f64> {
    window::sliding_forward(ys, w, |a, b| a >= b)
}

fn sliding_min_forward(ys: &[f64], w: usize) -> Vec<f64> {
    window::sliding_forward(ys, w, |a, b| a <= b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> SampledGraph {
        let ys = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        SampledGraph::from_uniform(0.0, 1.0, ys).unwrap()
    }

    fn constant(n: usize, v: f64) -> SampledGraph {
        SampledGraph::from_uniform(0.0, 1.0, vec![v; n]).unwrap()
    }

    #[test]
    fn box_count_hand_values() {
        assert_eq!(box_count(&constant(101, 0.5), 0.25).unwrap(), 4);
        assert_eq!(box_count(&line(101), 0.25).unwrap(), 8);
    }

    #[test]
    fn box_count_rejects_sub_resolution_delta() {
        let g = line(11);
        assert!(matches!(box_count(&g, 0.15), Err(Error::BelowResolution { .. })));
        assert!(box_count(&g, 0.2).is_ok());
    }

    #[test]
    fn oscillation_hand_values() {
        let g = line(101);
        assert!((oscillation(&g, 0.5, 0.1).unwrap() - 0.2).abs() < 1e-12);
        assert!((oscillation(&g, 0.05, 0.1).unwrap() - 0.15).abs() < 1e-12);
        assert_eq!(oscillation(&constant(11, 2.0), 0.3, 0.2).unwrap(), 0.0);
        assert!(matches!(
            oscillation(&line(11), 0.5, 0.01),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn variation_of_line() {
        let v = variation(&line(1001), 0.1).unwrap();
        assert!((v - 0.19).abs() < 1e-12, "{v}");
        assert_eq!(variation(&constant(101, 1.0), 0.1).unwrap(), 0.0);
    }

    #[test]
    fn shift_functional_of_line() {
        let delta = 0.1;
        let w = shift_lower_functional(&line(1001), delta).unwrap();
        assert!((w - 2.0 * delta * (1.0 - 2.0 * delta)).abs() < 1e-12, "{w}");
        // off-grid shift
        let w = shift_lower_functional(&line(1001), 0.1234).unwrap();
        assert!(w <= variation(&line(1001), 0.2468).unwrap() + 1e-12);
        assert_eq!(shift_lower_functional(&constant(101, 3.0), delta).unwrap(), 0.0);
    }

    #[test]
    fn sandwich_rejects_constant() {
        assert!(matches!(
            sandwich_check(&constant(101, 1.0), 0.1),
            Err(Error::Degenerate(_))
        ));
        let (lo, hi) = sandwich_check(&line(1001), 0.05).unwrap();
        assert!(lo > 0.0 && hi >= lo);
    }

    #[test]
    fn max_oscillation_of_line() {
        let m = max_oscillation(&line(1001), 0.1).unwrap();
        assert!((m - 0.1).abs() < 1e-12);
    }

    #[test]
    fn explicit_abscissae_must_be_uniform() {
        assert!(SampledGraph::new(&[0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).is_ok());
        assert!(SampledGraph::new(&[0.0, 0.4, 1.0], vec![0.0, 1.0, 0.0]).is_err());
        assert!(SampledGraph::new(&[0.0, 1.0], vec![0.0]).is_err());
        assert!(SampledGraph::from_uniform(0.0, 1.0, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn ladder_validation() {
        let g = line(1025);
        assert!(DeltaLadder::new(2.0, 3, 7).unwrap().validate_for(&g).is_ok());
        assert!(DeltaLadder::new(2.0, 1, 7).unwrap().validate_for(&g).is_err());
        assert!(matches!(
            DeltaLadder::new(2.0, 3, 9).unwrap().validate_for(&g),
            Err(Error::BelowResolution { .. })
        ));
        assert!(DeltaLadder::new(1.0, 3, 9).is_err());
        assert!(DeltaLadder::new(2.0, 3, 3).is_err());
    }
}
