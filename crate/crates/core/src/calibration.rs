//! Classical Weierstrass function `W(x) = Σ aⁿ cos(bⁿπx)`, whose graph dimension
//! `2 + ln a / ln b` is known, as a reference for the estimators.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractal_dim::{
    fit_dimension_boxcount, fit_dimension_variation, hardy_exponent, DeltaLadder, SampledGraph, ScalingFit,
};
use crate::phase::{Angle, DoubleDouble};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeierstrass", into = "RawWeierstrass")]
pub struct WeierstrassParams {
    a: f64,
    b: f64,
    m: u32,
}

#[derive(Serialize, Deserialize)]
struct RawWeierstrass {
    a: f64,
    b: f64,
    #[serde(rename = "M")]
    m: u32,
}

impl TryFrom<RawWeierstrass> for WeierstrassParams {
    type Error = Error;
    fn try_from(r: RawWeierstrass) -> Result<Self> {
        WeierstrassParams::new(r.a, r.b, r.m)
    }
}

impl From<WeierstrassParams> for RawWeierstrass {
    fn from(p: WeierstrassParams) -> Self {
        RawWeierstrass { a: p.a, b: p.b, m: p.m }
    }
}

impl WeierstrassParams {
    pub fn new(a: f64, b: f64, m: u32) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite("a/b"));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::param("a", format!("a = {a} must lie in (0, 1)")));
        }
        // ab = 1 is the smooth end of the family, dimension 1
        if b <= 1.0 || a * b < 1.0 {
            return Err(Error::param(
                "b",
                format!("need b > 1 and ab >= 1, got b = {b}, ab = {}", a * b),
            ));
        }
        Ok(WeierstrassParams { a, b, m })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Hölder exponent `H = ln(1/a) / ln b`.
    pub fn hurst(&self) -> f64 {
        (1.0 / self.a).ln() / self.b.ln()
    }

    fn integer_base(&self) -> Option<u64> {
        (self.b.fract() == 0.0 && self.b < 2f64.powi(53)).then_some(self.b as u64)
    }
}

/// `Σ_{n≤M} aⁿ cos(bⁿπx)` with every phase reduced modulo `2π`.
pub fn eval_weierstrass(p: &WeierstrassParams, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("x"));
    }
    // πx is x/2 turns, exact in double-double
    let angle = Angle::Turns(DoubleDouble::from_f64(x).mul_f64(0.5));
    Ok(eval_at_angle(p, &angle))
}

/// `W` at `x = θ/π` for an exactly represented `θ`.
pub fn eval_weierstrass_angle(p: &WeierstrassParams, theta: &Angle) -> f64 {
    eval_at_angle(p, theta)
}

fn eval_at_angle(p: &WeierstrassParams, theta: &Angle) -> f64 {
    let terms = p.m as usize + 1;
    let mut sum = 0.0;
    let mut coef = 1.0;
    match p.integer_base() {
        Some(b) => {
            for (_, c) in theta.geometric(b).take(terms) {
                sum += coef * c;
                coef *= p.a;
            }
        }
        None => {
            let turns = match *theta {
                Angle::PiRational { num, den } => DoubleDouble::from_ratio(num, 2 * den),
                Angle::Turns(u) => u,
            };
            let mut bn = DoubleDouble::from_f64(1.0);
            for _ in 0..terms {
                let u = turns.mul(bn).fract().to_f64();
                sum += coef * (std::f64::consts::TAU * u).cos();
                coef *= p.a;
                bn = bn.mul_f64(p.b);
            }
        }
    }
    sum
}

/// `2 + ln a / ln b`.
pub fn theoretical_dimension(p: &WeierstrassParams) -> f64 {
    2.0 + p.a.ln() / p.b.ln()
}

/// `W` on `[0, 1]` at `samples` equal intervals; abscissae `i/samples` are exact.
pub fn sample_weierstrass(p: &WeierstrassParams, samples: usize) -> Result<SampledGraph> {
    if samples < 2 {
        return Err(Error::param("samples", "need at least two intervals"));
    }
    let den = samples as u64;
    let ys: Vec<f64> = (0..=den)
        .into_par_iter()
        .map(|i| eval_at_angle(p, &Angle::pi_ratio(i as i64, den).expect("bounded")))
        .collect();
    SampledGraph::from_uniform(0.0, 1.0, ys)
}

/// Fit of `sup{|W(x) - W(y)| : |x - y| ≤ δ} ~ δ^H` over the ladder; the slope
/// estimates `H`.
pub fn hardy_exponent_check(p: &WeierstrassParams, ladder: &DeltaLadder, samples: usize) -> Result<ScalingFit> {
    hardy_exponent(&sample_weierstrass(p, samples)?, ladder)
}

/// Estimator outputs for one calibration function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub params: WeierstrassParams,
    pub theoretical: f64,
    pub hurst: f64,
    pub variation: ScalingFit,
    pub box_count: ScalingFit,
    pub hardy: ScalingFit,
}

impl Calibration {
    /// Variation dimension within `tol` of theory, and `2 - H` consistent with it.
    pub fn passed(&self, tol: f64) -> bool {
        (self.variation.dimension - self.theoretical).abs() <= tol
            && (self.hardy.slope - self.hurst).abs() <= tol
            && ((2.0 - self.hardy.slope) - self.variation.dimension).abs() <= tol
    }
}

pub fn calibrate(p: &WeierstrassParams, ladder: &DeltaLadder, samples: usize) -> Result<Calibration> {
    let g = sample_weierstrass(p, samples)?;
    Ok(Calibration {
        params: *p,
        theoretical: theoretical_dimension(p),
        hurst: p.hurst(),
        variation: fit_dimension_variation(&g, ladder)?,
        box_count: fit_dimension_boxcount(&g, ladder)?,
        hardy: hardy_exponent(&g, ladder)?,
    })
}

/// Default calibration corpus `(a, b, M)`, with `b^M` a few times the sample count.
pub fn default_corpus() -> Vec<WeierstrassParams> {
    [(0.5, 4.0, 12), (0.7, 5.0, 10), (0.6, 3.0, 14)]
        .into_iter()
        .map(|(a, b, m)| WeierstrassParams::new(a, b, m).expect("valid corpus"))
        .collect()
}

/// Lipschitz graphs on `[0, 1]` whose fitted dimension must be 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothControl {
    /// `sin 2πx`
    Sine,
    /// `x`
    Line,
}

/// Variation-fit dimension of a smooth control graph.
pub fn smooth_control(which: SmoothControl, ladder: &DeltaLadder, samples: usize) -> Result<ScalingFit> {
    let ys = (0..=samples)
        .map(|j| {
            let x = j as f64 / samples as f64;
            match which {
                SmoothControl::Sine => (2.0 * std::f64::consts::PI * x).sin(),
                SmoothControl::Line => x,
            }
        })
        .collect();
    fit_dimension_variation(&SampledGraph::from_uniform(0.0, 1.0, ys)?, ladder)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_outside_hardy_range() {
        assert!(WeierstrassParams::new(1.0, 4.0, 5).is_err());
        assert!(WeierstrassParams::new(0.2, 4.0, 5).is_err());
        assert!(WeierstrassParams::new(0.5, 1.0, 5).is_err());
        assert!(eval_weierstrass(&WeierstrassParams::new(0.5, 4.0, 5).unwrap(), f64::NAN).is_err());
    }

    #[test]
    fn value_at_origin_is_geometric_sum() {
        let p = WeierstrassParams::new(0.6, 3.0, 9).unwrap();
        let want = (1.0 - 0.6f64.powi(10)) / 0.4;
        assert!((eval_weierstrass(&p, 0.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn integer_points_for_base_two() {
        let m = 20;
        let p = WeierstrassParams::new(0.5, 2.0, m).unwrap();
        // cos(2ⁿπ) = 1 except the n = 0 term at odd x
        let tail = 1.0 - 2f64.powi(-(m as i32));
        assert_eq!(eval_weierstrass(&p, 2.0).unwrap(), 1.0 + tail);
        assert_eq!(eval_weierstrass(&p, 1.0).unwrap(), -1.0 + tail);
        assert_eq!(theoretical_dimension(&p), 1.0);
    }

    #[test]
    fn non_integer_base_matches_direct_sum() {
        let p = WeierstrassParams::new(0.5, 2.5, 6).unwrap();
        let x = 0.3;
        let direct: f64 = (0..=6)
            .map(|n| 0.5f64.powi(n) * (2.5f64.powi(n) * std::f64::consts::PI * x).cos())
            .sum();
        assert!((eval_weierstrass(&p, x).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn theoretical_values() {
        let p = WeierstrassParams::new(0.5, 4.0, 5).unwrap();
        assert!((theoretical_dimension(&p) - 1.5).abs() < 1e-15);
        let p = WeierstrassParams::new(0.5, 3.0, 5).unwrap();
        assert!((theoretical_dimension(&p) - (2.0 - 2f64.ln() / 3f64.ln())).abs() < 1e-15);
        let p = WeierstrassParams::new(0.2501, 4.0, 5).unwrap();
        assert!((theoretical_dimension(&p) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn smooth_controls_are_one_dimensional() {
        let ladder = DeltaLadder::new(2.0, 4, 12).unwrap();
        for c in [SmoothControl::Sine, SmoothControl::Line] {
            let d = smooth_control(c, &ladder, 1 << 16).unwrap().dimension;
            assert!((d - 1.0).abs() <= 0.05, "{c:?}: {d}");
        }
    }
}
